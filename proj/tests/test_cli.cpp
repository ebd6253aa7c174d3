#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <unistd.h>

#include "cli.hpp"
#include "json.hpp"

using namespace edwards;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "edwards");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string f; std::getline(in, f, ',');) v.push_back(f);
  return v;
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("edwards_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }
  std::size_t entries() const { return static_cast<std::size_t>(std::distance(fs::directory_iterator(path_), fs::directory_iterator())); }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const std::vector<std::string> kPolymerSmall{"polymer", "--T", "1", "--n", "300"};

}  // namespace

TEST(Cli, ConstantsTable) {
  const auto r = run({"--no-cache", "constants"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[0], "a_star,b_star,c_star,a_dstar,b_dstar,rho_a_dstar");
  const auto f = split(l[1]);
  ASSERT_EQ(f.size(), 6u);
  EXPECT_NEAR(std::stod(f[0]), 2.19, 0.01);
  EXPECT_NEAR(std::stod(f[3]), 2.95, 0.01);
}

TEST(Cli, ConstantsCacheFile) {
  TempDir dir;
  const auto cache = (dir / "c.csv").string();
  const auto first = run({"--cache", cache, "constants"});
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_TRUE(fs::exists(cache));
  const auto second = run({"--cache", cache, "constants"});
  EXPECT_EQ(first.out, second.out);
  EXPECT_EQ(dir.entries(), 1u);
}

TEST(Cli, RateCurveBranchFlipsOnce) {
  const auto r = run({"--no-cache", "rate-curve", "--bmin", "0", "--bmax", "3", "--step", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 302u);
  EXPECT_EQ(l[0], "b,I,dI,branch,I_shifted");
  int flips = 0;
  std::string prev;
  for (std::size_t i = 1; i < l.size(); ++i) {
    const auto f = split(l[i]);
    ASSERT_EQ(f.size(), 5u);
    if (i > 1 && f[3] != prev) ++flips;
    prev = f[3];
  }
  EXPECT_EQ(flips, 1);
}

TEST(Cli, UsageErrors) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"constants", "--bogus"},
           {"nosuch"},
           {},
           {"airy-zeros", "--K", "zero"},
           {"airy-zeros", "--K", "0"},
           {"eigen"},
           {"rate-curve", "--step", "-1"},
           {"polymer", "--T", "1", "--dt", "0.01"},
           {"besq-validate", "--suite", "nope"}}) {
    const auto r = run(args);
    EXPECT_EQ(r.code, cli::kExitUsage) << (args.empty() ? "(none)" : args[0]) << ": " << r.err;
    EXPECT_TRUE(r.out.empty());
    EXPECT_FALSE(r.err.empty());
  }
}

TEST(Cli, DomainErrorIsUsage) {
  const auto r = run({"eigen", "--a", "nan"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, AiryZerosAndJson) {
  const auto csv = run({"airy-zeros", "--K", "3"});
  ASSERT_EQ(csv.code, 0);
  const auto l = lines(csv.out);
  ASSERT_EQ(l.size(), 4u);
  EXPECT_EQ(l[0], "k,a_k,aip_k");
  EXPECT_NEAR(std::stod(split(l[1])[1]), -2.3381, 5e-4);

  const auto js = run({"--json", "airy-zeros", "--K", "3"});
  ASSERT_EQ(js.code, 0);
  const auto doc = nlohmann::json::parse(js.out);
  ASSERT_TRUE(doc.is_array());
  ASSERT_EQ(doc.size(), 3u);
  EXPECT_EQ(doc[0]["k"], 0);
  EXPECT_DOUBLE_EQ(doc[0]["a_k"].get<double>(), std::stod(split(l[1])[1]));

  const auto one = nlohmann::json::parse(run({"--json", "airy-zeros", "--K", "1"}).out);
  EXPECT_TRUE(one.is_object());
}

TEST(Cli, ConfigFileAndPrecedence) {
  TempDir dir;
  const auto cfg = dir / "run.cfg";
  write(cfg, "# zeros\nK = 4\n");
  auto r = run({"--config", cfg.string(), "airy-zeros"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).size(), 5u);
  r = run({"--config", cfg.string(), "airy-zeros", "--K", "2"});
  EXPECT_EQ(lines(r.out).size(), 3u);

  write(cfg, "K = 4\nwhat = 1\n");
  r = run({"--config", cfg.string(), "airy-zeros"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_TRUE(r.out.empty());
  write(cfg, "K = 4\nK = 5\n");
  EXPECT_EQ(run({"--config", cfg.string(), "airy-zeros"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"--config", (dir / "missing.cfg").string(), "airy-zeros"}).code, cli::kExitUsage);
}

TEST(Cli, ParseConfig) {
  const auto kv = cli::parse_config("a = 1\n  --b=two # note\n\n# only comment\n");
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv[0].first, "a");
  EXPECT_EQ(kv[1].first, "b");
  EXPECT_EQ(kv[1].second, "two");
  EXPECT_THROW(cli::parse_config("novalue\n"), std::runtime_error);
  EXPECT_THROW(cli::parse_config("x = \n"), std::runtime_error);
  EXPECT_THROW(cli::parse_config("x = 1\nx = 2\n"), std::runtime_error);
}

TEST(Cli, SeedFromEnvironment) {
  TempDir dir;
  auto args = kPolymerSmall;
  ::setenv("EDWARDS_SEED", "77", 1);
  const auto env = run(args);
  ::unsetenv("EDWARDS_SEED");
  ASSERT_EQ(env.code, 0) << env.err;
  auto explicit_args = args;
  explicit_args.insert(explicit_args.end(), {"--seed", "77"});
  EXPECT_EQ(env.out, run(explicit_args).out);
  EXPECT_NE(env.out, run(args).out);

  // flag beats config beats environment
  const auto cfg = dir / "seed.cfg";
  write(cfg, "seed = 5\n");
  ::setenv("EDWARDS_SEED", "77", 1);
  std::vector<std::string> with_cfg{"--config", cfg.string()};
  with_cfg.insert(with_cfg.end(), args.begin(), args.end());
  const auto from_cfg = run(with_cfg);
  auto flag_args = with_cfg;
  flag_args.insert(flag_args.end(), {"--seed", "9"});
  const auto from_flag = run(flag_args);
  ::unsetenv("EDWARDS_SEED");
  auto five = args, nine = args;
  five.insert(five.end(), {"--seed", "5"});
  nine.insert(nine.end(), {"--seed", "9"});
  EXPECT_EQ(from_cfg.out, run(five).out);
  EXPECT_EQ(from_flag.out, run(nine).out);

  ::setenv("EDWARDS_SEED", "abc", 1);
  EXPECT_EQ(run(args).code, cli::kExitUsage);
  ::unsetenv("EDWARDS_SEED");
}

TEST(Cli, DeterministicOutput) {
  const auto a = run(kPolymerSmall), b = run(kPolymerSmall);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto l = lines(a.out);
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(split(l[0]).size(), split(l[1]).size());
  auto threads = kPolymerSmall;
  threads.insert(threads.begin(), {"--threads", "1"});
  EXPECT_EQ(run(threads).out, a.out);
}

TEST(Cli, AtomicOutputFile) {
  TempDir dir;
  const auto target = dir / "zeros.csv";
  const auto r = run({"-o", target.string(), "airy-zeros", "--K", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(target), run({"airy-zeros", "--K", "5"}).out);
  EXPECT_EQ(dir.entries(), 1u);

  // a failing run leaves the previous file untouched and no temporaries
  const auto bad = run({"-o", target.string(), "airy-zeros", "--K", "0"});
  EXPECT_EQ(bad.code, cli::kExitUsage);
  EXPECT_EQ(slurp(target), run({"airy-zeros", "--K", "5"}).out);
  EXPECT_EQ(dir.entries(), 1u);

  EXPECT_EQ(run({"-o", (dir / "no/such/dir/x.csv").string(), "airy-zeros"}).code, cli::kExitCheckFailed);
}

TEST(Cli, WriteAtomicReplaces) {
  TempDir dir;
  const auto p = dir / "f.txt";
  cli::write_atomic(p.string(), "one");
  cli::write_atomic(p.string(), "two");
  EXPECT_EQ(slurp(p), "two");
  EXPECT_EQ(dir.entries(), 1u);
}

TEST(Cli, ValidationSuiteExitCodes) {
  const auto ok = run({"besq-validate", "--suite", "absorption", "--n", "20000"});
  EXPECT_EQ(ok.code, cli::kExitOk) << ok.out;
  EXPECT_EQ(lines(ok.out)[0], "check,estimate,target,se,z");
  // Euler with dt = 0.5 over t = 2 carries a clamping bias far beyond 4 se
  const auto bad = run({"besq-validate", "--suite", "absorption", "--n", "20000", "--dt", "0.5"});
  EXPECT_EQ(bad.code, cli::kExitCheckFailed);
  EXPECT_EQ(lines(bad.out).size(), lines(ok.out).size());
}

TEST(Cli, VersionLine) {
  const auto r = run({"--no-cache", "--version"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[0], "artifact,version,artifact_fingerprint,constants_fingerprint,cache_file");
  EXPECT_EQ(std::count(l[1].begin(), l[1].end(), ','), 4);
  EXPECT_EQ(l[1].back(), ',');
}

TEST(Cli, ProfilesAndCoefficients) {
  auto r = run({"w-profile", "--t", "1", "--K", "50", "--hmax", "2", "--dh", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto l = lines(r.out);
  ASSERT_EQ(l.size(), 6u);
  EXPECT_EQ(split(l[1])[1], "0");
  r = run({"w-profile", "--t", "0.01", "--K", "50"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("tail bound"), std::string::npos);

  r = run({"w-coeffs", "--K", "3"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out)[0], "k,a_k,a_scaled_k,gamma_k");
  r = run({"--no-cache", "mgf-curve", "--mumin", "-1", "--mumax", "1", "--step", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).size(), 6u);
  r = run({"eigen", "--a", "1"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out)[0], "a,rho,rho1,rho2,h_max,n");
}
