#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace tpd::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tpd_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void make_data() {
    ASSERT_EQ(invoke({"gen", "--rows", "3000", "--discrete", "3", "--continuous", "5",
                      "--glitch-rate", "0.01", "--seed", "1", "-o", path("train.csv")})
                  .code,
              kExitOk);
    ASSERT_EQ(invoke({"gen", "--rows", "2000", "--discrete", "3", "--continuous", "5",
                      "--anomaly-rate", "0.1", "--min-run", "100", "--max-run", "150", "--seed",
                      "2", "-o", path("test.csv")})
                  .code,
              kExitOk);
  }

  fs::path dir_;
};

TEST_F(Cli, EndToEnd) {
  make_data();
  auto r = invoke({"train", "-i", path("train.csv"), "-m", path("m.tpd")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto summary = nlohmann::json::parse(r.out);
  EXPECT_EQ(summary["removed_rows"], 300);
  EXPECT_EQ(summary["phase2_rows"], 2700);

  r = invoke({"score", "-m", path("m.tpd"), "-i", path("test.csv"), "-o", path("s.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto first = slurp(path("s.csv"));
  EXPECT_EQ(first.substr(0, first.find('\n')),
            "sample,score_discrete,score_continuous,combined,final_label,top_dimensions");

  r = invoke({"score", "-m", path("m.tpd"), "-i", path("test.csv"), "-o", path("s2.csv")});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_EQ(slurp(path("s2.csv")), first);

  r = invoke({"eval", "--scores", path("s.csv"), "--truth", path("test.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto metrics = nlohmann::json::parse(r.out);
  EXPECT_GT(metrics["f1"].get<double>(), 0.5);

  r = invoke({"explain", "-m", path("m.tpd"), "-i", path("test.csv"), "-o", path("e.jsonl"),
              "--columns", path("e.csv"), "--rows", "0,5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream lines(slurp(path("e.jsonl")));
  std::string line;
  int records = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("sample"));
    ++records;
  }
  EXPECT_EQ(records, 4);  // two rows x two models
  const auto cols = slurp(path("e.csv"));
  EXPECT_EQ(cols.substr(0, cols.find('\n')), "sample,model,dimension,score,band90,band99,flag");

  r = invoke({"filter", "-i", path("train.csv"), "-o", path("clean.csv"), "--explain",
              path("removed.jsonl")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["kept"], 2700);
}

TEST_F(Cli, InvalidInputExitsTwo) {
  EXPECT_EQ(invoke({"train", "-i", path("missing.csv"), "-m", path("m.tpd")}).code, kExitInvalid);
  {
    std::ofstream(path("bad.csv")) << "a,b\n1,2\n3,x\n";
  }
  const auto r = invoke({"train", "-i", path("bad.csv"), "-m", path("m.tpd")});
  EXPECT_EQ(r.code, kExitInvalid);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
  {
    std::ofstream(path("empty.csv"));
  }
  EXPECT_EQ(invoke({"train", "-i", path("empty.csv"), "-m", path("m.tpd")}).code, kExitInvalid);
}

TEST_F(Cli, InvalidConfigExitsTwo) {
  make_data();
  EXPECT_EQ(invoke({"train", "-i", path("train.csv"), "-m", path("m.tpd"), "--contamination",
                    "0.9"})
                .code,
            kExitInvalid);
  EXPECT_EQ(invoke({"train", "-i", path("train.csv"), "-m", path("m.tpd"), "--combiner", "xor"})
                .code,
            kExitInvalid);
  {
    std::ofstream(path("c.json")) << R"({"window": {"length": 0}})";
  }
  EXPECT_EQ(invoke({"train", "-i", path("train.csv"), "-m", path("m.tpd"), "--config",
                    path("c.json")})
                .code,
            kExitInvalid);
  EXPECT_EQ(invoke({"bogus"}).code, kExitInvalid);
  EXPECT_EQ(invoke({"score", "-m", path("m.tpd")}).code, kExitInvalid);
}

TEST_F(Cli, CorruptModelExitsThree) {
  make_data();
  ASSERT_EQ(invoke({"train", "-i", path("train.csv"), "-m", path("m.tpd")}).code, kExitOk);
  auto bytes = slurp(path("m.tpd"));
  {
    std::ofstream(path("trunc.tpd"), std::ios::binary) << bytes.substr(0, bytes.size() / 3);
  }
  EXPECT_EQ(invoke({"score", "-m", path("trunc.tpd"), "-i", path("test.csv"), "-o", path("s.csv")})
                .code,
            kExitCorruptModel);
  bytes[9] = static_cast<char>(bytes[9] + 1);
  {
    std::ofstream(path("ver.tpd"), std::ios::binary) << bytes;
  }
  const auto r =
      invoke({"explain", "-m", path("ver.tpd"), "-i", path("test.csv"), "-o", path("e.jsonl")});
  EXPECT_EQ(r.code, kExitCorruptModel);
}

TEST_F(Cli, KindOverridesAcceptCommaLists) {
  make_data();
  const auto r = invoke({"train", "-i", path("train.csv"), "-m", path("m.tpd"), "--discrete",
                         "s0,s1", "--continuous", "a0"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto summary = nlohmann::json::parse(r.out);
  const auto discrete = summary["discrete"]["columns"].get<std::vector<std::string>>();
  const auto continuous = summary["continuous"]["columns"].get<std::vector<std::string>>();
  EXPECT_NE(std::find(discrete.begin(), discrete.end(), "s1"), discrete.end());
  EXPECT_NE(std::find(continuous.begin(), continuous.end(), "a0"), continuous.end());
}

TEST_F(Cli, MissingColumnIsRejected) {
  make_data();
  ASSERT_EQ(invoke({"train", "-i", path("train.csv"), "-m", path("m.tpd")}).code, kExitOk);
  {
    std::ofstream(path("narrow.csv")) << "s0,s1\n1,2\n3,4\n";
  }
  EXPECT_EQ(invoke({"score", "-m", path("m.tpd"), "-i", path("narrow.csv"), "-o", path("s.csv")})
                .code,
            kExitInvalid);
}

}  // namespace
}  // namespace tpd::cli
