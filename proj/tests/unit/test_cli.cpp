#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <set>
#include <stdexcept>

#include "sinai/cli.hpp"
#include "sinai/targets.hpp"

using namespace sinai::cli;

TEST_CASE("grid ranges") {
    auto g = parse_grid("1:4:0.5");
    REQUIRE(g.size() == 7);
    CHECK(g.front() == 1.0);
    CHECK(g.back() == 4.0);
    CHECK(parse_grid("2:8:1").size() == 7);
    CHECK(parse_grid("0.1:0.3:0.1").size() == 3);
    CHECK(parse_grid("1,2.5,4") == std::vector<double>{1, 2.5, 4});
    CHECK(parse_grid("3") == std::vector<double>{3});
    CHECK_THROWS_AS(parse_grid("1:4"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("4:1:1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("1:4:0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("1,x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid(""), std::invalid_argument);
}

TEST_CASE("counts accept scientific notation") {
    CHECK(parse_count("1e6") == 1000000);
    CHECK(parse_count("4000") == 4000);
    CHECK(parse_count("2.5e3") == 2500);
    CHECK_THROWS_AS(parse_count("1.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_count("-3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_count("lots"), std::invalid_argument);
}

TEST_CASE("validation lists every offending field") {
    auto& s = schema_for("confine");
    json raw = {{"event", "q"}, {"t-grid", "1:x"}, {"samples", "1.5"}, {"eps", 0.7}, {"colour", "red"}};
    auto v = validate(s, raw);
    CHECK(v.errors.size() == 5);
    std::string all;
    for (auto& e : v.errors) all += e + "\n";
    for (const char* f : {"event:", "t-grid:", "samples:", "eps:", "colour:"}) CHECK(all.find(f) != std::string::npos);

    auto ok = validate(s, {{"t-grid", "1:4:0.5"}, {"samples", "1e5"}});
    REQUIRE(ok.ok());
    CHECK(ok.config["samples"] == 100000);
    CHECK(ok.config["t-grid"].size() == 7);
    CHECK(ok.config["event"] == "a");
    CHECK(ok.config["seed"] == 1);
    // typed values from a config file normalize to the same config
    auto typed = validate(s, {{"t-grid", {1, 1.5, 2, 2.5, 3, 3.5, 4}}, {"samples", 100000}});
    CHECK(typed.config == ok.config);
    CHECK_FALSE(validate(s, json::object()).ok()); // t-grid is required
    CHECK_THROWS_AS(schema_for("nope"), std::out_of_range);
}

TEST_CASE("schemas cover every verb and match the shipped files") {
    std::vector<std::string> verbs;
    for (auto& s : verb_schemas()) verbs.push_back(s.verb);
    for (const char* v : {"env", "wells", "rate", "confine", "blocks", "vessel", "walk", "corollary", "jumpprob",
                          "tightness", "report"})
        CHECK(std::find(verbs.begin(), verbs.end(), v) != verbs.end());
    for (auto& s : verb_schemas()) {
        auto doc = schema_document(s);
        CHECK(doc["type"] == "object");
        for (auto& f : s.fields) CHECK(doc["properties"].contains(f.name));
        std::ifstream is(std::string(SINAI_SOURCE_DIR) + "/schemas/" + s.verb + ".schema.json");
        REQUIRE_MESSAGE(is, s.verb);
        std::stringstream ss;
        ss << is.rdbuf();
        CHECK_MESSAGE(json::parse(ss.str()) == doc, s.verb);
    }
}

TEST_CASE("git blob hash") {
    CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("atomic writes leave no temporaries") {
    namespace fs = std::filesystem;
    fs::path d = fs::temp_directory_path() / "sinai_cli_atomic";
    fs::remove_all(d);
    std::string p = (d / "sub" / "a.txt").string();
    write_atomic(p, "one");
    write_atomic(p, "two");
    std::ifstream is(p);
    std::string s;
    is >> s;
    CHECK(s == "two");
    CHECK_THROWS(write_atomic_with(p, [](const std::string&) { throw std::runtime_error("boom"); }));
    std::size_t files = 0;
    for (auto& e : fs::directory_iterator(d / "sub")) files += e.is_regular_file();
    CHECK(files == 1);
    fs::remove_all(d);
}

TEST_CASE("target table") {
    std::set<int> ids;
    for (auto& t : sinai::acceptance_targets()) ids.insert(t.criterion);
    CHECK(ids.size() == 12);
    CHECK(*ids.begin() == 1);
    CHECK(*ids.rbegin() == 12);
}
