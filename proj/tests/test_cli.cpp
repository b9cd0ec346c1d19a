#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cyclodet/cli.hpp"

namespace cyclodet {
namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "cyclodet");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

TEST(CliVerify, WritesJsonReports) {
    const auto path = std::filesystem::temp_directory_path() / ("cyclodet_cli_" + std::to_string(::getpid()) + ".json");
    const auto r = run({"verify", "--pmin", "5", "--pmax", "40", "--format", "json", "--out", path.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    std::ifstream in(path);
    const auto j = Json::parse(in);
    ASSERT_TRUE(j.is_array());
    EXPECT_EQ(j.size(), 10u);
    EXPECT_EQ(j.front().at("p"), 5);
    EXPECT_EQ(j.back().at("p"), 37);
    std::filesystem::remove(path);
}

TEST(CliVerify, EmptyRangeAndUsageErrors) {
    auto r = run({"verify", "--pmin", "4", "--pmax", "4"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(Json::parse(r.out), Json::array());
    EXPECT_EQ(run({"verify", "--pmin", "10", "--pmax", "5"}).code, 1);
    EXPECT_EQ(run({"verify", "--pmin", "3", "--pmax", "5"}).code, 1);
    EXPECT_EQ(run({"verify", "--pmin", "5"}).code, 1);
    EXPECT_EQ(run({"verify", "--pmin", "5", "--pmax", "7", "--format", "xml"}).code, 1);
    EXPECT_EQ(run({"verify", "--pmin", "5", "--pmax", "7", "--delta", "2", "--delta-sweep", "2"}).code, 1);
    EXPECT_EQ(run({}).code, 1);
}

TEST(CliVerify, FailingCheckExitsTwo) {
    // 4 is a square mod 13, so the Delta-dependent checks fail.
    const auto r = run({"verify", "--pmin", "13", "--pmax", "13", "--delta", "4"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("delta_valid"), std::string::npos);
}

TEST(CliVerify, CsvAndCache) {
    const auto dir = std::filesystem::temp_directory_path() / ("cyclodet_cli_cache_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    const auto cold = run({"verify", "--pmin", "5", "--pmax", "11", "--format", "csv", "--cache-dir", dir.string(),
                           "--delta-sweep", "2", "--threads", "2"});
    EXPECT_EQ(cold.code, 0);
    EXPECT_EQ(first_line(cold.out).rfind("p,residue_mod8,all_passed", 0), 0u);
    EXPECT_TRUE(std::filesystem::exists(dir / "p11.jsonl"));
    const auto warm = run({"verify", "--pmin", "5", "--pmax", "11", "--format", "csv", "--cache-dir", dir.string(),
                           "--delta-sweep", "2"});
    EXPECT_EQ(warm.out, cold.out);
    std::filesystem::remove_all(dir);
}

TEST(CliDet, Examples) {
    auto r = run({"det", "--family", "S", "--p", "7"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "-4\n");
    r = run({"det", "--family", "SD", "--p", "5", "--delta", "2"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "0\n");
    r = run({"det", "--family", "C", "--p", "3"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(first_line(r.out), "1");
    r = run({"det", "--family", "T", "--p", "5", "--delta", "2", "--backend", "bareiss"});
    EXPECT_EQ(r.out, "-4\n");
}

TEST(CliDet, PrintsDecompositions) {
    auto r = run({"det", "--family", "D", "--p", "7"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("u = 7/2, v = 7/2"), std::string::npos);
    r = run({"det", "--family", "D", "--p", "5"});
    EXPECT_NE(r.out.find("alpha = 0, beta = 1/2"), std::string::npos);
}

TEST(CliDet, InvalidCombinations) {
    EXPECT_EQ(run({"det", "--family", "SD", "--p", "5", "--delta", "4"}).code, 1);
    EXPECT_EQ(run({"det", "--family", "E", "--p", "5"}).code, 1);
    EXPECT_EQ(run({"det", "--family", "F", "--p", "7"}).code, 1);
    EXPECT_EQ(run({"det", "--family", "Q", "--p", "7"}).code, 1);
    EXPECT_EQ(run({"det", "--family", "S", "--p", "9"}).code, 1);
}

TEST(CliClassno, Examples) {
    auto r = run({"classno", "--p", "23"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "h(-23) = 3\n");
    r = run({"classno", "--p", "5"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "h(5) = 1\neps = (1 + sqrt(5))/2, norm -1\n");
    EXPECT_EQ(run({"classno", "--p", "9"}).code, 1);
    EXPECT_EQ(run({"classno", "--p", "3"}).code, 1);
}

}  // namespace
}  // namespace cyclodet
