#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "critprog/cli.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kWorked = std::string(CRITPROG_FIXTURE_DIR) + "/worked_example.csv";

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = critprog::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("critprog_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void write(const std::string& name, const std::string& text) const {
        std::ofstream(dir_ / name, std::ios::binary) << text;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, FitWorkedExample) {
    auto r = run({"fit", "--input", kWorked, "--threshold", "8", "--quorum", "1.0"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("x 3  y 1  p 0.75"), std::string::npos) << r.out;
    auto j = run({"fit", "--input", kWorked, "--threshold", "8", "--quorum", "100%", "--format", "json"});
    ASSERT_EQ(j.code, 0) << j.err;
    EXPECT_NE(j.out.find("\"x\": 3"), std::string::npos);
    EXPECT_NE(j.out.find("\"y\": 1"), std::string::npos);
    EXPECT_NE(j.out.find("\"p\": 0.75"), std::string::npos);
}

TEST_F(CliTest, FitTooFewCriticalYearsIsDataError) {
    auto r = run({"fit", "--input", kWorked, "--threshold", "9.5", "--min-critical", "2"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("InsufficientCriticalYears"), std::string::npos) << r.err;
    EXPECT_TRUE(r.out.empty());
}

TEST_F(CliTest, SelectThreshold) {
    auto r = run({"fit", "--input", kWorked, "--select-threshold", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("\"threshold_source\": \"selected\""), std::string::npos);
    EXPECT_NE(r.out.find("\"threshold\": 9.0"), std::string::npos) << r.out;
}

TEST_F(CliTest, UsageErrorsNameTheFlag) {
    auto r = run({"fit", "--input", kWorked, "--threshold", "8", "--quorum", "2"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("--quorum"), std::string::npos) << r.err;

    r = run({"fit", "--input", kWorked, "--threshold", "8", "--format", "xml"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("--format"), std::string::npos) << r.err;

    r = run({"fit", "--input", kWorked});
    EXPECT_EQ(r.code, 1);
    r = run({"fit", "--input", kWorked, "--threshold", "8", "--select-threshold"});
    EXPECT_EQ(r.code, 1);
    r = run({"fit", "--input", kWorked, "--threshold", "8", "--bogus"});
    EXPECT_EQ(r.code, 1);
    r = run({"nonsense"});
    EXPECT_EQ(r.code, 1);
    r = run({});
    EXPECT_EQ(r.code, 1);
    r = run({"backtest", "--input", kWorked, "--threshold", "8", "--mode", "sideways"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("--mode"), std::string::npos) << r.err;
    r = run({"sweep", "--input", kWorked, "--threshold", "8", "--axis", "colour"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("--axis"), std::string::npos) << r.err;
}

TEST_F(CliTest, HelpExitsZero) {
    auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("synth"), std::string::npos);
}

TEST_F(CliTest, DataErrorsReportLocation) {
    write("bad.csv", "year,incidence,a\n1990,1,1\n1991,2,n/a\n1992,3,3\n");
    auto r = run({"fit", "--input", path("bad.csv"), "--threshold", "1"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("NonNumericCell"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("row 3"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("'a'"), std::string::npos) << r.err;

    r = run({"fit", "--input", path("missing.csv"), "--threshold", "1"});
    EXPECT_EQ(r.code, 2);
    r = run({"fit", "--input", kWorked, "--threshold", "8", "--factors", "nope"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("UnknownFactor"), std::string::npos);
    r = run({"fit", "--input", kWorked, "--threshold", "8", "--lag", "4"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("LagTooLarge"), std::string::npos);
}

TEST_F(CliTest, OutputFlagWritesFileNotStdout) {
    auto r = run({"backtest", "--input", kWorked, "--threshold", "8", "--min-train-years", "3",
                  "--output", path("bt.json"), "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    EXPECT_NE(slurp(path("bt.json")).find("\"backtest\""), std::string::npos);
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir_)) ++files;
    EXPECT_EQ(files, 1u);
}

TEST_F(CliTest, SynthTwiceIsIdentical) {
    for (const char* name : {"a", "b"}) {
        auto r = run({"synth", "--seed", "7", "--years", "30", "--factors", "8", "--output",
                      path(std::string(name) + ".csv"), "--truth", path(std::string(name) + "_truth.csv")});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    EXPECT_EQ(slurp(path("a_truth.csv")), slurp(path("b_truth.csv")));
    const auto csv = slurp(path("a.csv"));
    EXPECT_EQ(csv.rfind("year,incidence,f1,f2,f3,f4,f5,f6,f7,f8\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 31);
}

TEST_F(CliTest, SynthOptions) {
    auto r = run({"synth", "--seed", "3", "--years", "12", "--factors", "2", "--decoys", "1",
                  "--preset", "north", "--lag-shift", "1", "--regime-change", "1995"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("year,incidence,f1,f2,d1\n", 0), 0u);
    r = run({"synth", "--years", "3"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("--years"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("InvalidSpec"), std::string::npos);
    r = run({"synth", "--noise", "1.5"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("--noise"), std::string::npos) << r.err;
    r = run({"synth", "--lag-shift", "40"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("--lag-shift"), std::string::npos) << r.err;
    r = run({"synth", "--preset", "east"});
    EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, ClassifyWithSavedProfile) {
    auto fit = run({"fit", "--input", kWorked, "--threshold", "8", "--quorum", "1",
                    "--profile-out", path("profile.json")});
    ASSERT_EQ(fit.code, 0) << fit.err;
    write("next.csv", "year,jan_temp\n2007,6.5\n2008,9\n");
    auto r = run({"classify", "--profile", path("profile.json"), "--input", path("next.csv"),
                  "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto at2007 = r.out.find("\"year\": 2007");
    const auto at2008 = r.out.find("\"year\": 2008");
    ASSERT_NE(at2007, std::string::npos);
    const auto first = r.out.find("\"prediction\": ", at2007);
    EXPECT_EQ(r.out.find("\"critical\"", first), first + 14) << r.out;
    const auto second = r.out.find("\"prediction\": ", at2008);
    EXPECT_EQ(r.out.find("\"non_critical\"", second), second + 14) << r.out;

    write("other.csv", "year,july_rain\n2007,6.5\n");
    r = run({"classify", "--profile", path("profile.json"), "--input", path("other.csv")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("MissingFactorValue"), std::string::npos) << r.err;

    write("broken.json", "{\"kind\": \"x\"}");
    r = run({"classify", "--profile", path("broken.json"), "--input", path("next.csv")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("InvalidProfile"), std::string::npos);
}

TEST_F(CliTest, SweepAxes) {
    auto r = run({"sweep", "--input", kWorked, "--threshold", "8", "--axis", "quorum", "--grid",
                  "0.5,1", "--mode", "in_sample", "--format", "plot_csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "configuration,status,p\nq=0.5,ok,0.75\nq=1,ok,0.75\n");
    r = run({"sweep", "--input", kWorked, "--axis", "threshold", "--grid", "8,11", "--mode",
             "in_sample", "--format", "plot_csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "configuration,status,p\nc=8,ok,0.75\nc=11,skipped,\n");
    r = run({"sweep", "--input", kWorked, "--threshold", "8", "--axis", "row_length", "--grid", "2"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("WindowTooShort"), std::string::npos);
    r = run({"sweep", "--input", kWorked, "--threshold", "8", "--axis", "lag", "--grid", "0,x"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("--grid"), std::string::npos);
}
