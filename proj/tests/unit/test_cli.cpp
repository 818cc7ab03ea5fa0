#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
  int status = -1;
  std::string out;
};

// Runs the CLI with stderr folded into stdout.
Result cli(const std::string& args) {
  const std::string cmd = std::string("\"") + DSEARCH_CLI + "\" " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) r.out += buf.data();
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string data(const char* name) { return (fs::path(DSEARCH_TEST_DATA_DIR) / name).string(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("dsearch_cli_" + std::to_string(rd()) + std::to_string(rd()));
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_CASE("help lists every subcommand") {
  const auto r = cli("--help");
  CHECK(r.status == 0);
  for (const char* sub : {"run", "sweep", "compare", "diagnose", "schedule-table"}) CHECK(r.out.find(sub) != std::string::npos);
}

TEST_CASE("run and rerun") {
  TempDir a, b;
  CHECK(cli("run --config " + data("tiny_seq.json") + " --out " + a.path.string()).status == 0);
  CHECK(cli("run --config " + data("tiny_seq.json") + " --out " + b.path.string() + " --jobs 8").status == 0);
  for (const char* f : {"run_seed0.jsonl", "run_seed1.jsonl", "summary.json"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a.path / f));
    CHECK(slurp(a.path / f) == slurp(b.path / f));
  }
}

TEST_CASE("single seed and trace flags") {
  TempDir a;
  CHECK(cli("run --config " + data("tiny_gmm.json") + " --seed 5 --trace --out " + a.path.string()).status == 0);
  CHECK(fs::exists(a.path / "run_seed5.jsonl"));
  CHECK(fs::exists(a.path / "trace_seed5.jsonl"));
  CHECK_FALSE(fs::exists(a.path / "run_seed3.jsonl"));
}

TEST_CASE("sweep, compare, diagnose and schedule-table") {
  TempDir a;
  const auto cfg = data("tiny_seq.json");
  const auto out = " --out " + a.path.string();
  CHECK(cli("sweep --config " + cfg + " --axis C_bar --values 2,6,10" + out).status == 0);
  CHECK(fs::exists(a.path / "sweep.csv"));
  CHECK(cli("compare --config " + cfg + " --algorithms best-of-n,svdd,dsearch" + out).status == 0);
  CHECK(slurp(a.path / "compare.csv").find("pretrained") != std::string::npos);
  CHECK(cli("diagnose --config " + cfg + " --checkpoints 7,1" + out).status == 0);
  CHECK(fs::exists(a.path / "diagnose.csv"));
  const auto table = cli("schedule-table --config " + cfg);
  CHECK(table.status == 0);
  CHECK(table.out.rfind("s,t,beams,width,searched,next_beams,calls", 0) == 0);
}

TEST_CASE("configuration errors exit nonzero with a field") {
  for (auto [file, field] : {std::pair{"bad_reward.json", "reward"}, std::pair{"bad_field.json", "plan.beam.slope"}}) {
    const auto r = cli("run --config " + data(file));
    CHECK(r.status != 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["error"]["field"] == field);
    CHECK(j["error"]["kind"] == "invalid-configuration");
  }
  const auto missing = cli("run --config /nonexistent/config.json");
  CHECK(missing.status != 0);
  const auto axis = cli("sweep --config " + data("tiny_seq.json") + " --axis r_r --values 0.25");
  CHECK(axis.status != 0);
  CHECK(nlohmann::json::parse(axis.out)["error"]["field"] == "axis");
  CHECK(cli("run").status != 0);
}

TEST_CASE("worker cap from the environment") {
  TempDir a, b;
  const auto cfg = data("tiny_seq.json");
  setenv("DSEARCH_MAX_JOBS", "1", 1);
  CHECK(cli("run --config " + cfg + " --jobs 16 --out " + a.path.string()).status == 0);
  // Unparseable caps are ignored rather than fatal.
  setenv("DSEARCH_MAX_JOBS", "bogus", 1);
  CHECK(cli("run --config " + cfg + " --jobs 4 --out " + b.path.string()).status == 0);
  unsetenv("DSEARCH_MAX_JOBS");
  CHECK(slurp(a.path / "summary.json") == slurp(b.path / "summary.json"));
}
