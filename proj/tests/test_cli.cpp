#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vandermonde/cli.hpp"

using namespace vandermonde;

namespace {

int invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "vandermonde");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream log;
    return cli::run(static_cast<int>(argv.size()), argv.data(), log);
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("vandermonde_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::filesystem::path dir_;
};

} // namespace

TEST_F(CliTest, MomentsJson) {
    ASSERT_EQ(invoke({"moments", "--p-max", "3", "--beta", "0.55", "--d", "2", "--jitter", "uniform", "--seed", "7", "--out", path("m.json")}), 0);
    const auto j = nlohmann::json::parse(slurp(path("m.json")));
    EXPECT_EQ(j.at("schema_version"), json_schema_version);
    ASSERT_EQ(j.at("moments").size(), 3u);
    EXPECT_EQ(j.at("moments")[0].at("p"), 1);
    EXPECT_EQ(j.at("moments")[0].at("value").get<double>(), 1.0);
    EXPECT_GT(j.at("moments")[1].at("value").get<double>(), 1.0);
}

TEST_F(CliTest, MomentsCsv) {
    ASSERT_EQ(invoke({"moments", "--p-max", "2", "--format", "csv", "--out", path("m.csv")}), 0);
    const auto text = slurp(path("m.csv"));
    EXPECT_EQ(text.substr(0, text.find('\n')), "p,value,std_error,mp_moment");
}

TEST_F(CliTest, MpOutput) {
    ASSERT_EQ(invoke({"mp", "--beta", "0.5", "--p-max", "3", "--out", path("mp.json")}), 0);
    const auto j = nlohmann::json::parse(slurp(path("mp.json")));
    EXPECT_EQ(j.at("schema_version"), json_schema_version);
}

TEST_F(CliTest, SimulateIsBitIdentical) {
    const std::vector<std::string> base{"simulate", "--beta", "0.55", "--d", "1", "--budget", "41", "--trials", "4", "--bins", "20", "--seed", "42"};
    auto a = base;
    a.insert(a.end(), {"--out", path("a.csv"), "--dump-eigs", path("ea.csv")});
    auto b = base;
    b.insert(b.end(), {"--threads", "1", "--out", path("b.csv"), "--dump-eigs", path("eb.csv")});
    ASSERT_EQ(invoke(a), 0);
    ASSERT_EQ(invoke(b), 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    EXPECT_EQ(slurp(path("ea.csv")), slurp(path("eb.csv")));
    const auto text = slurp(path("a.csv"));
    EXPECT_EQ(text.substr(0, text.find('\n')), "bin_left,bin_right,density");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 21);
}

TEST_F(CliTest, MseCsv) {
    ASSERT_EQ(invoke({"mse", "--beta", "0.729", "--d", "1,2", "--snr-db", "0:10:5", "--trials", "3", "--out", path("mse.csv")}), 0);
    const auto text = slurp(path("mse.csv"));
    EXPECT_EQ(text.substr(0, text.find('\n')), "snr_db,source,beta,d,mse,std_err");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 3 * 4);
    ASSERT_EQ(invoke({"mse", "--beta", "0.729", "--d", "1,2", "--snr-db", "0:10:5", "--trials", "3", "--out", path("mse2.csv")}), 0);
    EXPECT_EQ(text, slurp(path("mse2.csv")));
}

TEST_F(CliTest, Verify) {
    EXPECT_EQ(invoke({"verify", "--suite", "oracle", "--out", path("v.json")}), 0);
    const auto j = nlohmann::json::parse(slurp(path("v.json")));
    EXPECT_EQ(j.at("schema_version"), json_schema_version);
}

TEST_F(CliTest, ValidationErrors) {
    EXPECT_EQ(invoke({"moments", "--beta", "1.5"}), 2);
    EXPECT_EQ(invoke({"moments", "--p-max", "9"}), 2);
    EXPECT_EQ(invoke({"moments", "--jitter", "cauchy"}), 2);
    EXPECT_EQ(invoke({"moments", "--bogus"}), 2);
    EXPECT_EQ(invoke({"mse", "--snr-db", "10:0:1"}), 2);
    EXPECT_EQ(invoke({"mse", "--d", "1,x"}), 2);
    EXPECT_EQ(invoke({"simulate", "--d", "3", "--budget", "5"}), 2);
    EXPECT_EQ(invoke({"simulate", "--format", "xml"}), 2);
    EXPECT_EQ(invoke({"verify", "--suite", "nonsense"}), 2);
    EXPECT_EQ(invoke({}), 2);
    EXPECT_EQ(invoke({"--help"}), 0);
}

TEST(CliParse, IntList) {
    EXPECT_EQ(cli::parse_int_list("1,2,3"), (std::vector<int>{1, 2, 3}));
    EXPECT_THROW(cli::parse_int_list(""), InvalidArgument);
    EXPECT_THROW(cli::parse_int_list("1,,2"), InvalidArgument);
}
