#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <cstring>
#include <cmath>
#include <unistd.h>
#include <sstream>
#include <string>

#include "experiment/config.hpp"
#include "experiment/csv.hpp"
#include "experiment/experiment.hpp"
#include "reloc/errors.hpp"

namespace fs = std::filesystem;

namespace reloc::cli {
namespace {

struct Outcome {
  int code = -1;
  std::string output;  // stdout and stderr together
};

Outcome run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" RELOC_LDP_PATH "\" " + args + " 2>&1";
  Outcome out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.output.append(buf, n);
  const int status = pclose(pipe);
  out.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("reloc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "_" +
            std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

  fs::path dir_;
};

const char* kScgfConfig = R"({
  "experiment": "scgf",
  "kernel": {"family": "Mu1", "alpha": 1, "beta": 1},
  "runlength": {"family": "Deterministic", "c": 1},
  "markov": {"family": "LatticeWalk"},
  "scgf": {"xi_grid": [0.5, 1, 2], "horizons": [100, 1000, 10000, 100000], "theory_points": 11}
})";

TEST(Schema, ScgfColumns) {
  const std::vector<std::string> expected{"xi",         "horizon",       "s_of_t", "exact_log_mgf",
                                          "slope_fit", "lambda_theory", "abs_gap"};
  EXPECT_EQ(schema_header(ExperimentKind::Scgf), expected);
}

TEST(Schema, EveryKindHasAHeaderWithUniqueColumns) {
  for (ExperimentKind kind : all_kinds()) {
    const auto h = schema_header(kind);
    ASSERT_FALSE(h.empty());
    std::set<std::string> unique(h.begin(), h.end());
    EXPECT_EQ(unique.size(), h.size()) << to_string(kind);
    EXPECT_EQ(kind_from_name(to_string(kind)), kind);
  }
  EXPECT_THROW(kind_from_name("annealed"), ConfigError);
}

TEST_F(CliTest, SchemaSubcommandPrintsHeader) {
  const Outcome o = run_cli("schema scgf");
  EXPECT_EQ(o.code, 0);
  EXPECT_EQ(o.output, "xi,horizon,s_of_t,exact_log_mgf,slope_fit,lambda_theory,abs_gap\n");
  for (ExperimentKind kind : all_kinds()) {
    EXPECT_EQ(run_cli("schema " + to_string(kind)).output, join_header(schema_header(kind)) + "\n");
  }
  EXPECT_EQ(run_cli("schema nonsense").code, 2);
}

TEST_F(CliTest, GeometricRunLengthsRejectedCitingA2) {
  const fs::path cfg = write_config("geo.json", R"({
    "experiment": "scgf",
    "kernel": {"family": "Mu1", "alpha": 1, "beta": 1},
    "runlength": {"family": "Geometric", "p": 0.5},
    "markov": {"family": "LatticeWalk"}
  })");
  for (const std::string& args : {"validate " + cfg.string(), "run " + cfg.string() + " --out " + (dir_ / "o").string()}) {
    const Outcome o = run_cli(args);
    EXPECT_EQ(o.code, 2) << args;
    EXPECT_NE(o.output.find("A2"), std::string::npos) << o.output;
    EXPECT_NE(o.output.find("geometric"), std::string::npos) << o.output;
  }
  EXPECT_FALSE(fs::exists(dir_ / "o" / "scgf.csv"));
}

TEST_F(CliTest, OtherInvalidConfigsExitTwo) {
  // lattice walk needs integer run lengths
  const fs::path a3 = write_config("a3.json", R"({
    "experiment": "equivalence",
    "kernel": {"family": "Mu1", "alpha": 1, "beta": 1},
    "runlength": {"family": "UniformInterval", "a": 0.5, "b": 1.5},
    "markov": {"family": "LatticeWalk"}
  })");
  Outcome o = run_cli("validate " + a3.string());
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.output.find("A3"), std::string::npos) << o.output;
  // delta above 1/2
  const fs::path a1 = write_config("a1.json", R"({
    "experiment": "scgf",
    "kernel": {"family": "Mu2", "gamma": 1, "delta": 0.9},
    "runlength": {"family": "Deterministic", "c": 1},
    "markov": {"family": "LatticeWalk"}
  })");
  o = run_cli("validate " + a1.string());
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.output.find("A1"), std::string::npos) << o.output;
  EXPECT_EQ(run_cli("validate " + write_config("bad.json", "{not json").string()).code, 2);
  EXPECT_EQ(run_cli("validate " + (dir_ / "missing.json").string()).code, 2);
  const fs::path typo = write_config("typo.json", R"({
    "experiment": "scgf", "kernel.family": "Mu1", "kernel.alpha": 1, "kernel.beta": 1,
    "runlength.family": "Deterministic", "runlength.c": 1, "markov.family": "LatticeWalk",
    "scgf.xi_grdi": [1]
  })");
  o = run_cli("validate " + typo.string());
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.output.find("scgf.xi_grdi"), std::string::npos) << o.output;
  EXPECT_EQ(run_cli("run").code, 2);
}

TEST_F(CliTest, ValidateAcceptsGoodConfig) {
  const Outcome o = run_cli("validate " + write_config("ok.json", kScgfConfig).string());
  EXPECT_EQ(o.code, 0);
  EXPECT_EQ(o.output, "ok: scgf\n");
}

TEST_F(CliTest, RuntimeFailureExitsThree) {
  const fs::path cfg = write_config("ok.json", kScgfConfig);
  std::ofstream(dir_ / "blocker") << "x";
  const Outcome o = run_cli("run " + cfg.string() + " --out " + (dir_ / "blocker" / "sub").string());
  EXPECT_EQ(o.code, 3) << o.output;
}

TEST_F(CliTest, RunWritesSchemaConformingCsv) {
  const fs::path cfg = write_config("scgf.json", kScgfConfig);
  const Outcome o = run_cli("run " + cfg.string() + " --out " + (dir_ / "out").string());
  ASSERT_EQ(o.code, 0) << o.output;
  const std::string csv = slurp(dir_ / "out" / "scgf.csv");
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  ASSERT_FALSE(csv.empty());
  EXPECT_EQ(csv.back(), '\n');
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, join_header(schema_header(ExperimentKind::Scgf)));
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6) << line;
  }
  EXPECT_EQ(rows, 3u * 4u);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "scgf_theory.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "scgf.meta.json"));
}

TEST_F(CliTest, WorkerCountDoesNotChangeBytes) {
  const fs::path cfg = write_config("scgf.json", kScgfConfig);
  std::string reference;
  for (const char* w : {"1", "4", "8"}) {
    const fs::path out = dir_ / (std::string("w") + w);
    ASSERT_EQ(run_cli("run " + cfg.string() + " --workers " + w + " --out " + out.string()).code, 0);
    const std::string csv = slurp(out / "scgf.csv");
    if (reference.empty()) {
      reference = csv;
    } else {
      EXPECT_EQ(csv, reference) << w;
    }
    EXPECT_EQ(slurp(out / "scgf_theory.csv"), slurp(dir_ / "w1" / "scgf_theory.csv"));
  }
  // Monte Carlo kinds as well
  const fs::path eq = write_config("eq.json", R"({
    "experiment": "equivalence",
    "kernel": {"family": "Mu2", "gamma": 1, "delta": 0.5},
    "runlength": {"family": "UniformInterval", "a": 0.5, "b": 1.5},
    "markov": {"family": "BrownianMotion"},
    "equivalence": {"t": 30, "samples": 3000}
  })");
  ASSERT_EQ(run_cli("run " + eq.string() + " --workers 1 --out " + (dir_ / "e1").string()).code, 0);
  ASSERT_EQ(run_cli("run " + eq.string() + " --out " + (dir_ / "e8").string(), "RELOC_LDP_WORKERS=8").code, 0);
  EXPECT_EQ(slurp(dir_ / "e1" / "equivalence.csv"), slurp(dir_ / "e8" / "equivalence.csv"));
}

TEST_F(CliTest, BadWorkerEnvironmentIsConfigError) {
  const fs::path cfg = write_config("scgf.json", kScgfConfig);
  const Outcome o = run_cli("run " + cfg.string() + " --out " + (dir_ / "x").string(), "RELOC_LDP_WORKERS=zero");
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.output.find("RELOC_LDP_WORKERS"), std::string::npos) << o.output;
}

TEST_F(CliTest, MetadataEchoesConfigThatRoundTrips) {
  const fs::path cfg = write_config("scgf.json", kScgfConfig);
  ASSERT_EQ(run_cli("run " + cfg.string() + " --workers 2 --out " + (dir_ / "m").string()).code, 0);
  const auto meta = nlohmann::json::parse(slurp(dir_ / "m" / "scgf.meta.json"));
  const ExperimentConfig original = load_config(cfg.string());
  EXPECT_EQ(parse_config(meta.at("config")), original);
  EXPECT_EQ(meta.at("config"), to_json(original));
  EXPECT_EQ(meta.at("library").at("name"), "reloc");
  EXPECT_FALSE(meta.at("library").at("version").get<std::string>().empty());
  EXPECT_EQ(meta.at("seeds").at("master"), 1);
  EXPECT_EQ(meta.at("seeds").at("env"), 1);
  EXPECT_EQ(meta.at("schema").at("kind"), "scgf");
  EXPECT_EQ(meta.at("schema").at("version"), kSchemaVersion);
  const auto& files = meta.at("schema").at("files");
  ASSERT_GE(files.size(), 2u);
  EXPECT_EQ(files[0].at("file"), "scgf.csv");
  EXPECT_EQ(files[0].at("columns"), nlohmann::json(schema_header(ExperimentKind::Scgf)));
  EXPECT_EQ(files[0].at("rows"), 12);
}

TEST(ConfigRoundTrip, EveryKindAndFamily) {
  const std::vector<std::string> docs{
      kScgfConfig,
      R"({"experiment": "tails", "kernel.family": "Mu2", "kernel.gamma": 2, "kernel.delta": 0.25,
          "runlength.family": "StretchedExpTail", "runlength.kappa": 3, "runlength.lambda": 0.7,
          "markov.family": "BrownianMotion", "markov.dimension": 3, "seeds.master": 18446744073709551615,
          "tails.x_grid": [0.1, 0.3], "run.workers": 3})",
      R"({"experiment": "lemmas", "kernel.family": "Mu1", "kernel.alpha": 0.5, "kernel.beta": 0,
          "runlength.family": "UniformInterval", "runlength.a": 0, "runlength.b": 2,
          "markov.family": "BrownianMotion", "lemmas.g": "exp_centered", "lemmas.g_xi": 0.3})",
      R"({"experiment": "dobrow", "kernel.family": "Mu1", "kernel.alpha": 2, "kernel.beta": 1,
          "runlength.family": "Deterministic", "runlength.c": 0.1, "markov.family": "BrownianMotion",
          "dobrow.weights": [1, 0.5, 3, 1e-3], "dobrow.targets": [2, 4]})",
      R"({"experiment": "residual", "kernel.family": "Mu1", "kernel.alpha": 1, "kernel.beta": 0,
          "runlength.family": "Deterministic", "runlength.c": 2, "markov.family": "LatticeWalk",
          "markov.dimension": 2, "residual.env_seeds": [9, 10]})",
  };
  for (const auto& text : docs) {
    const ExperimentConfig c = parse_config_text(text);
    const nlohmann::json j = to_json(c);
    EXPECT_EQ(parse_config(j), c) << text;
    // through text as well
    EXPECT_EQ(parse_config_text(j.dump()), c) << text;
  }
  EXPECT_EQ(parse_config_text(docs[1]).master_seed, std::numeric_limits<std::uint64_t>::max());
}

TEST(ConfigParse, NestedAndDottedKeysAgree) {
  const auto nested = parse_config_text(kScgfConfig);
  const auto flat = parse_config_text(R"({
    "experiment": "scgf", "kernel.family": "Mu1", "kernel.alpha": 1, "kernel.beta": 1,
    "runlength.family": "Deterministic", "runlength.c": 1, "markov.family": "LatticeWalk",
    "scgf.xi_grid": [0.5, 1, 2], "scgf.horizons": [100, 1000, 10000, 100000], "scgf.theory_points": 11
  })");
  EXPECT_EQ(nested, flat);
  // family names are case-sensitive
  EXPECT_THROW(parse_config_text(R"({"experiment": "scgf", "kernel.family": "mu1", "kernel.alpha": 1,
      "kernel.beta": 1, "runlength.family": "Deterministic", "runlength.c": 1,
      "markov.family": "LatticeWalk"})"),
               ConfigError);
}

TEST(Csv, EscapingFollowsRfc4180) {
  EXPECT_EQ(escape_field("plain"), "plain");
  EXPECT_EQ(escape_field("a,b"), "\"a,b\"");
  EXPECT_EQ(escape_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(escape_field("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(escape_field("cr\r"), "\"cr\r\"");
  EXPECT_EQ(escape_field(""), "");

  CsvTable t({"name", "value"});
  t.row().add("x,y").add(1.5);
  t.row().add("q\"").add(true);
  t.row().add(std::string("ok")).empty();
  EXPECT_EQ(t.render(), "name,value\n\"x,y\",1.5\n\"q\"\"\",true\nok,\n");
  CsvTable bad({"a", "b"});
  bad.row().add(1.0);
  EXPECT_THROW(bad.render(), std::logic_error);
}

TEST(Csv, DoublesRoundTrip) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<std::uint64_t> bits;
  int checked = 0;
  while (checked < 100000) {
    const std::uint64_t b = bits(gen);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    ++checked;
    const std::string s = format_double(v);
    ASSERT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
    ASSERT_EQ(s.find(','), std::string::npos);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(std::strtod(format_double(std::exp(1.0) - 2).c_str(), nullptr), std::exp(1.0) - 2);
}

}  // namespace
}  // namespace reloc::cli
