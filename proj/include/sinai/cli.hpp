#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace sinai::cli {

using nlohmann::json;

// "start:stop:step" (inclusive, step > 0), "a,b,c", or one number
std::vector<double> parse_grid(const std::string& s);
// non-negative integer, scientific notation allowed ("1e6")
uint64_t parse_count(const std::string& s);

enum class FieldType { number, integer, count, grid, list, choice, text, flag };

struct Field {
    std::string name;
    FieldType type = FieldType::number;
    std::string help;
    json fallback;              // null: required
    double min = -1e300, max = 1e300;
    bool min_open = false;      // value must exceed min
    std::vector<std::string> choices;
};

struct VerbSchema {
    std::string verb;
    std::string help;
    std::vector<Field> fields;
};

const std::vector<VerbSchema>& verb_schemas();
const VerbSchema& schema_for(const std::string& verb); // throws std::out_of_range
// JSON Schema (draft-07) document for one verb
json schema_document(const VerbSchema& s);

// Normalizes raw values (strings from the command line or typed values from a config
// file) into a typed config. Every offending field is reported.
struct Validation {
    json config;
    std::vector<std::string> errors;
    bool ok() const { return errors.empty(); }
};
Validation validate(const VerbSchema& s, const json& raw);

// git blob id: sha1("blob <size>\0" + content), hex
std::string git_blob_hash(std::string_view content);

// writes to a temporary file in the same directory, then renames over `path`
void write_atomic(const std::string& path, std::string_view content);
void write_atomic_with(const std::string& path, const std::function<void(const std::string& tmp)>& writer);

} // namespace sinai::cli
