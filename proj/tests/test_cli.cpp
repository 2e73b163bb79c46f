#include "doctest.h"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "besselheat/cli.hpp"

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

Result invoke(std::initializer_list<const char*> args)
{
    std::vector<const char*> argv{"besselheat"};
    argv.insert(argv.end(), args.begin(), args.end());
    std::ostringstream out;
    std::ostringstream err;
    Result r;
    r.code = besselheat::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        rows.push_back(fields);
    }
    return rows;
}

}  // namespace

TEST_CASE("eval reflected emits value, terms_used and tail_bound")
{
    const Result r = invoke({"eval", "--nu", "0", "--t", "1", "--x", "0.3", "--y", "0.7", "--kernel", "reflected",
                             "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["value"].get<double>() > 0.0);
    CHECK(j["terms_used"].get<int>() >= 1);
    CHECK(j["tail_bound"].get<double>() >= 0.0);
    CHECK(j.contains("comparator"));
}

TEST_CASE("JSON key order is stable")
{
    const Result r = invoke({"eval", "--nu", "0.5", "--t", "0.2", "--x", "0.3", "--y", "0.7"});
    REQUIRE(r.code == 0);
    const std::size_t v = r.out.find("\"value\"");
    const std::size_t n = r.out.find("\"terms_used\"");
    const std::size_t b = r.out.find("\"tail_bound\"");
    CHECK(v < n);
    CHECK(n < b);
}

TEST_CASE("index below -1 is a usage error naming the precondition")
{
    const Result r = invoke({"eval", "--nu", "-2", "--t", "1", "--x", "0.3", "--y", "0.7"});
    CHECK(r.code == 2);
    CHECK(r.err.find("nu > -1") != std::string::npos);
    CHECK(r.out.empty());
}

TEST_CASE("usage errors exit 2 and print the synopsis")
{
    for (const Result& r : {invoke({"eval", "--nu", "0", "--t", "1", "--x", "0.3", "--y", "0.7", "--frobnicate"}),
                            invoke({"eval", "--nu", "0", "--t", "1", "--x", "0.3"}),
                            invoke({"eval", "--nu", "zero", "--t", "1", "--x", "0.3", "--y", "0.7"}),
                            invoke({"eval", "--nu", "0", "--t", "1", "--x", "0.3", "--y", "0.7", "--format", "xml"}),
                            invoke({"nonsense"}), invoke({}),
                            invoke({"simulate", "--nu", "0", "--x", "0.3", "--t", "0.5", "--paths", "0"}),
                            invoke({"verify", "--suite", "semigroup", "--nodes", "10"})}) {
        CHECK(r.code == 2);
        CHECK(r.err.find("Usage") != std::string::npos);
    }
}

TEST_CASE("domain errors from the library exit 2")
{
    CHECK(invoke({"eval", "--nu", "0", "--t", "-1", "--x", "0.3", "--y", "0.7"}).code == 2);
    CHECK(invoke({"eval", "--nu", "0", "--t", "1", "--x", "1.5", "--y", "0.7"}).code == 2);
    CHECK(invoke({"eval", "--nu", "0", "--t", "1e-4", "--x", "0.3", "--y", "0.7"}).code == 2);
    CHECK(invoke({"simulate", "--nu", "0", "--x", "1.3", "--t", "0.5", "--paths", "10"}).code == 2);
    CHECK(invoke({"scan", "--nu", "0", "--x-nodes", "0,0.5"}).code == 2);
    CHECK(invoke({"verify", "--suite", "asymptotics", "--format", "csv"}).code == 2);
}

TEST_CASE("CSV and JSON carry the same numbers")
{
    const Result j = invoke({"scan", "--nu", "0.5", "--x-nodes", "0.2,0.5", "--y-nodes", "0.3,0.9", "--t-nodes",
                             "0.1,1"});
    const Result c = invoke({"scan", "--nu", "0.5", "--x-nodes", "0.2,0.5", "--y-nodes", "0.3,0.9", "--t-nodes",
                             "0.1,1", "--format", "csv"});
    REQUIRE(j.code == 0);
    REQUIRE(c.code == 0);
    const auto nodes = nlohmann::json::parse(j.out)["report"]["nodes"];
    const auto rows = parse_csv(c.out);
    REQUIRE(rows.size() == nodes.size() + 1);
    CHECK(rows[0] == std::vector<std::string>{"nu", "t", "x", "y", "kernel", "comparator", "ratio", "tail_bound"});
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& row = rows[i + 1];
        REQUIRE(row.size() == 8);
        CHECK(std::stod(row[0]) == 0.5);
        CHECK(std::stod(row[1]) == nodes[i]["t"].get<double>());
        CHECK(std::stod(row[2]) == nodes[i]["x"].get<double>());
        CHECK(std::stod(row[3]) == nodes[i]["y"].get<double>());
        CHECK(std::stod(row[4]) == nodes[i]["kernel"].get<double>());
        CHECK(std::stod(row[5]) == nodes[i]["comparator"].get<double>());
        CHECK(std::stod(row[6]) == nodes[i]["ratio"].get<double>());
        CHECK(std::stod(row[7]) == nodes[i]["tail_bound"].get<double>());
    }

    const Result je = invoke({"eval", "--nu", "-0.3", "--t", "0.4", "--x", "0.1", "--y", "0.8"});
    const Result ce = invoke({"eval", "--nu", "-0.3", "--t", "0.4", "--x", "0.1", "--y", "0.8", "--format", "csv"});
    const auto e = nlohmann::json::parse(je.out);
    const auto row = parse_csv(ce.out).at(1);
    CHECK(std::stod(row[4]) == e["value"].get<double>());
    CHECK(std::stod(row[6]) == e["ratio"].get<double>());
    CHECK(std::stod(row[7]) == e["tail_bound"].get<double>());
}

TEST_CASE("kernels without a tail bound leave the CSV field empty")
{
    const Result c = invoke({"eval", "--nu", "0", "--t", "0.3", "--x", "0.2", "--y", "0.6", "--kernel",
                             "images-dirichlet", "--format", "csv"});
    REQUIRE(c.code == 0);
    const auto row = parse_csv(c.out).at(1);
    REQUIRE(row.size() == 8);
    CHECK(!row[4].empty());
    CHECK(row[5].empty());
    CHECK(row[7].empty());
}

TEST_CASE("repeat runs are byte identical and independent of threads")
{
    const auto sim = [](const char* threads) {
        return invoke({"simulate", "--nu", "0", "--x", "0.3", "--t", "0.5", "--paths", "5000", "--bins", "20",
                       "--seed", "11", "--threads", threads});
    };
    const Result a = sim("1");
    const Result b = sim("1");
    const Result c = sim("4");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);

    const Result d = invoke({"verify", "--suite", "inequalities", "--samples", "2000", "--seed", "3"});
    const Result e = invoke({"verify", "--suite", "inequalities", "--samples", "2000", "--seed", "3"});
    CHECK(d.out == e.out);
}

TEST_CASE("--output writes the document to a file")
{
    const std::string path = "test_cli_output.json";
    std::remove(path.c_str());
    const Result r = invoke({"eval", "--nu", "1", "--t", "0.5", "--x", "0.4", "--y", "0.5", "--output",
                             path.c_str()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    const Result direct = invoke({"eval", "--nu", "1", "--t", "0.5", "--x", "0.4", "--y", "0.5"});
    CHECK(text.str() == direct.out);
    std::remove(path.c_str());
}

TEST_CASE("verification outcomes set the exit code")
{
    CHECK(invoke({"verify", "--suite", "semigroup", "--nu", "0.5"}).code == 0);
    CHECK(invoke({"verify", "--suite", "asymptotics", "--nu", "0"}).code == 0);
    CHECK(invoke({"scan", "--nu", "0", "--max-spread", "2"}).code == 1);
    CHECK(invoke({"simulate", "--nu", "0", "--x", "0.3", "--t", "0.5", "--paths", "2000", "--bins", "10",
                  "--min-fraction", "1.0", "--h", "0.05", "--no-bridge"})
              .code == 1);
}

TEST_CASE("inequality suite example")
{
    // The shifted inequality fails near nu = -1 (see README), so this
    // documented example reports violations and exits 1.
    const Result r = invoke({"verify", "--suite", "inequalities", "--samples", "100000", "--seed", "7"});
    CHECK(r.code == 1);
    const auto j = nlohmann::json::parse(r.out);
    for (const auto& res : j["report"]["results"]) {
        if (res["name"] == "shifted_laforgia") {
            CHECK(res["violation_count"].get<int>() > 0);
            for (const auto& v : res["violations"]) {
                CHECK(v["nu"].get<double>() < -0.9);
            }
        } else {
            CHECK(res["violation_count"].get<int>() == 0);
        }
    }
}
