#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "skewd/error.hpp"
#include "skewd/io.hpp"

namespace fs = std::filesystem;

namespace skewd {
namespace {

TEST(Csv, ReadsWithAndWithoutHeader) {
  std::istringstream with("x,y\n1.5,2\n-3e-2, 4\n");
  const XYData a = read_xy_csv(with);
  EXPECT_EQ(a.x, (std::vector<double>{1.5, -0.03}));
  EXPECT_EQ(a.y, (std::vector<double>{2.0, 4.0}));
  std::istringstream without("1,2\r\n3,4\r\n");
  const XYData b = read_xy_csv(without);
  EXPECT_EQ(b.x.size(), 2u);
  EXPECT_EQ(b.y[1], 4.0);
}

TEST(Csv, ReportsLineNumbers) {
  std::istringstream bad("x,y\n1,2\n3,abc\n");
  try {
    read_xy_csv(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos) << e.what();
  }
  std::istringstream three("1,2,3\n");
  EXPECT_THROW(read_xy_csv(three), ParseError);
  std::istringstream empty("x,y\n");
  EXPECT_THROW(read_xy_csv(empty), ParseError);
}

TEST(Csv, RoundTripIsExact) {
  const std::vector<double> x{0.1, -1.0 / 3.0, 1e-300, 6.02214076e23};
  const std::vector<double> y{std::nextafter(1.0, 2.0), -0.0, 123456789.123456789, 2.5};
  std::ostringstream out;
  write_xy_csv(out, x, y);
  EXPECT_EQ(out.str().substr(0, 4), "x,y\n");
  EXPECT_EQ(out.str().find('\r'), std::string::npos);
  std::istringstream in(out.str());
  const XYData back = read_xy_csv(in);
  EXPECT_EQ(back.x, x);
  EXPECT_EQ(back.y, y);
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Metadata, CarriesTruth) {
  const LabeledPair p = generate_pair({Setting::LSs, {NoiseKind::gno, -0.5}, 20, 3});
  const nlohmann::json meta = pair_metadata(p, "0007", "LSs_1750");
  EXPECT_EQ(meta.at("pair"), "0007");
  EXPECT_EQ(meta.at("true_direction"), "x->y");
  EXPECT_EQ(meta.at("seed").get<std::uint64_t>(), 3u);
  EXPECT_EQ(truth_from_metadata(meta), Direction::XtoY);
  EXPECT_THROW(truth_from_metadata(nlohmann::json::object()), ParseError);
}

TEST(Parallel, RunsEveryTaskAndRethrows) {
  std::vector<int> slots(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { slots[i] = static_cast<int>(i) * 2; });
  for (int i = 0; i < 100; ++i) EXPECT_EQ(slots[i], 2 * i);
  std::atomic<int> ran{0};
  EXPECT_THROW(parallel_for(10, 2,
                            [&](std::size_t i) {
                              ++ran;
                              if (i == 3) throw InputError("boom");
                            }),
               InputError);
  EXPECT_EQ(resolve_jobs(3), 3u);
  EXPECT_GE(resolve_jobs(0), 1u);
}

// ---------------------------------------------------------------------------
// command line

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("skewd_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args, std::string* stdout_text = nullptr) {
    const fs::path out = dir_ / "stdout.txt";
    const std::string cmd = std::string(SKEWD_CLI_PATH) + " " + args + " > " + out.string() + " 2> " +
                            (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    if (stdout_text) *stdout_text = read_text(out);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string stderr_text() const { return read_text(dir_ / "stderr.txt"); }

  fs::path dir_;
};

const char* kSmall = "--q 8 --p 4 --population 16 --max-iters 100 --folds 3 --lhs 3 --ei 1";

TEST_F(Cli, GenerateWritesFilesDeterministically) {
  ASSERT_EQ(run("generate ANs_985 --pairs 2 --n 100 --seed 5 --out " + (dir_ / "a").string()), 0);
  ASSERT_EQ(run("generate ANs_985 --pairs 2 --n 100 --seed 5 --out " + (dir_ / "b").string()), 0);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(dir_ / "a")) {
    ++files;
    EXPECT_EQ(read_text(entry.path()), read_text(dir_ / "b" / entry.path().filename()));
  }
  EXPECT_EQ(files, 5);
  EXPECT_TRUE(fs::exists(dir_ / "a" / "pair_0000.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "pair_0001.meta.json"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "manifest.json"));
  const XYData d = read_xy_csv(dir_ / "a" / "pair_0001.csv");
  EXPECT_EQ(d.x.size(), 100u);
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("generate SIM --pairs 2 --n 100 --out " + dir_.string()), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("infer " + (dir_ / "missing.csv").string() + " --profile turbo"), 2);

  write_text(dir_ / "bad.csv", "x,y\n1,2\n3,4\n5,oops\n");
  EXPECT_EQ(run("infer " + (dir_ / "bad.csv").string()), 2);
  EXPECT_NE(stderr_text().find("line 4"), std::string::npos) << stderr_text();

  write_text(dir_ / "empty.jsonl", "");
  EXPECT_EQ(run("curve " + (dir_ / "empty.jsonl").string() + " --out " + (dir_ / "c.csv").string()), 2);
}

TEST_F(Cli, ConstantColumnIsRuntimeFailure) {
  std::string csv = "x,y\n";
  for (int i = 0; i < 60; ++i) csv += std::to_string(i) + ",1\n";
  write_text(dir_ / "flat.csv", csv);
  EXPECT_EQ(run("infer " + (dir_ / "flat.csv").string() + " " + kSmall), 1);
}

TEST_F(Cli, CurveOfAllCorrectResults) {
  std::string jsonl;
  for (int i = 0; i < 4; ++i) {
    jsonl += R"({"pair":"000)" + std::to_string(i) + R"(","inferred":"x->y","truth":"x->y","confidence":)" +
             std::to_string(i + 1) + "}\n";
  }
  write_text(dir_ / "r.jsonl", jsonl);
  ASSERT_EQ(run("curve " + (dir_ / "r.jsonl").string() + " --out " + (dir_ / "c.csv").string()), 0);
  EXPECT_EQ(read_text(dir_ / "c.csv"), "rate,accuracy\n0.25,1\n0.5,1\n0.75,1\n1,1\n");
  write_text(dir_ / "broken.jsonl", "{\"pair\": 1\n");
  EXPECT_EQ(run("curve " + (dir_ / "broken.jsonl").string() + " --out " + (dir_ / "c.csv").string()), 2);
}

TEST_F(Cli, InferWithBothRules) {
  ASSERT_EQ(run("generate ANs_985 --pairs 1 --n 120 --seed 3 --out " + dir_.string()), 0);
  std::string text;
  ASSERT_EQ(run("infer " + (dir_ / "pair_0000.csv").string() + " --rule both --seed 4 " + kSmall, &text), 0);
  const auto rec = nlohmann::json::parse(text);
  EXPECT_EQ(rec.at("rule"), "both");
  EXPECT_TRUE(rec.at("ll_xy").is_number());
  EXPECT_TRUE(rec.at("p_yx").is_number());
  EXPECT_TRUE(rec.at("decisions").contains("likelihood"));
  EXPECT_TRUE(rec.at("decisions").contains("independence"));
  EXPECT_EQ(rec.at("seed").get<std::uint64_t>(), 4u);
  EXPECT_EQ(rec.at("profile"), "fast");
  EXPECT_TRUE(rec.at("runtime_seconds").is_number());

  ASSERT_EQ(run("infer " + (dir_ / "pair_0000.csv").string() + " --seed 4 " + kSmall, &text), 0);
  const auto ll_only = nlohmann::json::parse(text);
  EXPECT_TRUE(ll_only.at("p_xy").is_null());
  EXPECT_EQ(ll_only.at("ll_xy"), rec.at("ll_xy"));
}

TEST_F(Cli, BenchmarkIsReproducible) {
  ASSERT_EQ(run("generate ANs_985 --pairs 3 --n 100 --seed 8 --out " + (dir_ / "data").string()), 0);
  fs::remove(dir_ / "data" / "pair_0002.meta.json");
  const std::string common = "benchmark " + (dir_ / "data").string() + " --seed 2 --jobs 1 --rule both " + kSmall;
  std::string summary_text;
  ASSERT_EQ(run(common + " --out " + (dir_ / "r1.jsonl").string(), &summary_text), 0);
  ASSERT_EQ(run(common + " --out " + (dir_ / "r2.jsonl").string()), 0);
  EXPECT_EQ(read_text(dir_ / "r1.jsonl"), read_text(dir_ / "r2.jsonl"));
  EXPECT_NE(stderr_text().find("pair_0002"), std::string::npos);

  const auto summary = nlohmann::json::parse(summary_text);
  EXPECT_EQ(summary.at("pairs").get<int>(), 2);
  EXPECT_EQ(summary.at("skipped").get<int>(), 1);
  EXPECT_TRUE(summary.at("per_rule").contains("independence"));
  EXPECT_EQ(summary, nlohmann::json::parse(read_text(dir_ / "r1.summary.json")));

  // the curve of the primary rule averages to the summary AUDRC
  ASSERT_EQ(run("curve " + (dir_ / "r1.jsonl").string() + " --out " + (dir_ / "c.csv").string()), 0);
  std::istringstream curve(read_text(dir_ / "c.csv"));
  const XYData pts = read_xy_csv(curve);
  double mean = 0.0;
  for (double a : pts.y) mean += a / static_cast<double>(pts.y.size());
  EXPECT_NEAR(mean, summary.at("audrc").get<double>(), 1e-12);
}

}  // namespace
}  // namespace skewd
