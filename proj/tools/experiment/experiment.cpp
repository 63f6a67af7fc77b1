#include "experiment/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "reloc/errors.hpp"
#include "reloc/rng.hpp"
#include "reloc/verify.hpp"
#include "reloc/version.hpp"

namespace reloc::cli {

using nlohmann::json;

std::vector<std::string> schema_header(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Scgf:
      return {"xi", "horizon", "s_of_t", "exact_log_mgf", "slope_fit", "lambda_theory", "abs_gap"};
    case ExperimentKind::Tails:
      return {"x",           "horizon",           "s_of_t",         "samples",
              "hits",        "p_hat",             "p_lower",        "p_upper",
              "resolved",    "empirical_exponent", "exponent_lower", "exponent_upper",
              "theory_exponent", "abs_gap"};
    case ExperimentKind::Equivalence:
      return {"t",         "samples",   "ks_statistic", "ks_critical", "alpha",
              "threshold", "p_value",   "pass",         "mean_direct", "mean_timechange"};
    case ExperimentKind::Dobrow:
      return {"target", "tv_exact", "exact_pass", "samples", "chi2", "dof", "p_value",
              "sampled_pass"};
    case ExperimentKind::Lemmas:
      return {"sum", "g", "exponent", "n", "empirical", "predicted", "remainder",
              "remainder_over_log_n"};
    case ExperimentKind::Residual:
      return {"env_seed", "regime", "report_only", "horizon", "i_of_t", "A", "s_of_t", "ratio",
              "seed_max_ratio", "dense_q50", "dense_q90", "threshold", "pass"};
  }
  return {};
}

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  }
  return out;
}

std::vector<NamedTable> scgf_tables(const ExperimentConfig& c, unsigned workers) {
  const ScgfReport rep =
      scgf_slope_check(c.model, c.scgf.xi_grid, c.scgf.horizons, c.env_seed, workers);
  CsvTable main(schema_header(ExperimentKind::Scgf));
  for (const auto& row : rep.rows) {
    for (std::size_t j = 0; j < rep.horizons.size(); ++j) {
      main.row()
          .add(row.xi)
          .add(rep.horizons[j])
          .add(rep.s_values[j])
          .add(row.exact[j])
          .add(row.slope)
          .add(row.lambda_theory)
          .add(row.pointwise_gap[j]);
    }
  }
  CsvTable theory({"xi", "lambda_theory"});
  const double mult = c.model.kernel.scgf_multiplier();
  for (double xi : linspace(c.scgf.theory_xi_min, c.scgf.theory_xi_max, c.scgf.theory_points)) {
    theory.row().add(xi).add(mult * lambda(c.model.runs, xi));
  }
  return {{"scgf.csv", "result", std::move(main)}, {"scgf_theory.csv", "theory", std::move(theory)}};
}

std::vector<NamedTable> tails_tables(const ExperimentConfig& c, unsigned workers) {
  const TailReport rep =
      tail_exponent_estimate(c.model, c.tails.x_grid, c.tails.horizons, c.tails.samples,
                             c.env_seed, c.master_seed, workers, c.tails.min_hits);
  CsvTable main(schema_header(ExperimentKind::Tails));
  for (const TailCell& cell : rep.cells) {
    auto& r = main.row();
    r.add(cell.x)
        .add(cell.t)
        .add(cell.s)
        .add(static_cast<std::uint64_t>(cell.samples))
        .add(static_cast<std::uint64_t>(cell.hits))
        .add(cell.p_hat)
        .add(cell.p_ci.lower)
        .add(cell.p_ci.upper)
        .add(cell.resolved);
    // Unresolved cells carry no estimate.
    if (cell.resolved) {
      r.add(cell.exponent).add(cell.exponent_lo).add(cell.exponent_hi);
    } else {
      r.empty().empty().empty();
    }
    r.add(cell.theory);
    if (cell.resolved) {
      r.add(cell.abs_gap);
    } else {
      r.empty();
    }
  }
  const RateFunction rf = c.model.rate_function();
  CsvTable theory({"x", "tail_exponent"});
  for (double x : linspace(0.0, c.tails.theory_x_max, c.tails.theory_points)) {
    theory.row().add(x).add(tail_exponent(rf, x));
  }
  return {{"tails.csv", "result", std::move(main)},
          {"tails_theory.csv", "theory", std::move(theory)}};
}

std::vector<NamedTable> equivalence_tables(const ExperimentConfig& c, unsigned workers) {
  const auto& e = c.equivalence;
  const EquivalenceReport rep = equivalence_ks(c.model, e.t, e.samples, c.env_seed,
                                               c.master_seed, workers, e.threshold, e.alpha);
  CsvTable main(schema_header(ExperimentKind::Equivalence));
  main.row()
      .add(rep.t)
      .add(static_cast<std::uint64_t>(rep.samples))
      .add(rep.statistic)
      .add(rep.critical)
      .add(e.alpha)
      .add(rep.threshold)
      .add(rep.p_value)
      .add(rep.pass)
      .add(rep.mean_direct)
      .add(rep.mean_timechange);
  return {{"equivalence.csv", "result", std::move(main)}};
}

std::vector<NamedTable> dobrow_tables(const ExperimentConfig& c, unsigned workers) {
  const std::size_t max_target = *std::max_element(c.dobrow.targets.begin(), c.dobrow.targets.end());
  const RunSequence runs =
      c.dobrow.weights.empty()
          ? RunSequence::build(c.model.runs, c.model.kernel, RunCount{max_target}, c.env_seed)
          : RunSequence::from_weights(c.dobrow.weights);
  CsvTable main(schema_header(ExperimentKind::Dobrow));
  for (std::size_t n : c.dobrow.targets) {
    const DobrowReport rep =
        dobrow_gof(runs, n, c.dobrow.samples, splitmix64(c.master_seed + n), workers);
    main.row()
        .add(static_cast<std::uint64_t>(n))
        .add(rep.tv)
        .add(rep.exact_pass)
        .add(static_cast<std::uint64_t>(rep.samples))
        .add(rep.chi2.statistic)
        .add(rep.chi2.dof)
        .add(rep.chi2.p_value)
        .add(rep.sampled_pass);
  }
  return {{"dobrow.csv", "result", std::move(main)}};
}

std::vector<NamedTable> lemma_tables(const ExperimentConfig& c) {
  const auto& l = c.lemmas;
  const TestFunction g = TestFunction::from_name(l.g, l.g_xi);
  const LemmaSum kind = l.sum == "log_power" ? LemmaSum::LogPower : LemmaSum::DeltaPower;
  const LemmaReport rep = lemma_sum_check(g, kind, l.exponent, c.model.runs, l.n_ladder, c.env_seed);
  CsvTable main(schema_header(ExperimentKind::Lemmas));
  for (const LemmaPoint& p : rep.points) {
    main.row()
        .add(l.sum)
        .add(rep.g)
        .add(l.exponent)
        .add(static_cast<std::uint64_t>(p.n))
        .add(p.empirical)
        .add(p.predicted)
        .add(p.remainder)
        .add(p.scaled_remainder);
  }
  return {{"lemmas.csv", "result", std::move(main)}};
}

std::vector<NamedTable> residual_tables(const ExperimentConfig& c) {
  const auto& r = c.residual;
  const ResidualReport rep =
      residual_check(c.model, r.horizons, r.env_seeds, r.dense_points, r.threshold);
  CsvTable main(schema_header(ExperimentKind::Residual));
  for (const ResidualSeed& seed : rep.seeds) {
    const bool seed_pass = rep.report_only || seed.max_ratio < rep.threshold;
    for (const ResidualPoint& p : seed.ladder) {
      main.row()
          .add(seed.seed)
          .add(to_string(rep.regime))
          .add(rep.report_only)
          .add(p.t)
          .add(static_cast<std::uint64_t>(p.i_of_t))
          .add(p.A)
          .add(p.s)
          .add(p.ratio)
          .add(seed.max_ratio)
          .add(seed.q50)
          .add(seed.q90)
          .add(rep.threshold)
          .add(seed_pass);
    }
  }
  return {{"residual.csv", "result", std::move(main)}};
}

}  // namespace

std::vector<NamedTable> run_tables(const ExperimentConfig& config, unsigned workers) {
  switch (config.kind) {
    case ExperimentKind::Scgf:
      return scgf_tables(config, workers);
    case ExperimentKind::Tails:
      return tails_tables(config, workers);
    case ExperimentKind::Equivalence:
      return equivalence_tables(config, workers);
    case ExperimentKind::Dobrow:
      return dobrow_tables(config, workers);
    case ExperimentKind::Lemmas:
      return lemma_tables(config);
    case ExperimentKind::Residual:
      return residual_tables(config);
  }
  return {};
}

json metadata(const ExperimentConfig& config, const std::vector<NamedTable>& tables,
              unsigned workers) {
  json files = json::array();
  for (const auto& t : tables) {
    files.push_back({{"file", t.file}, {"role", t.role}, {"columns", t.table.header()},
                     {"rows", t.table.size()}});
  }
  json seeds = {{"master", config.master_seed}, {"env", config.env_seed}};
  if (config.kind == ExperimentKind::Residual) seeds["env_list"] = config.residual.env_seeds;
  return {
      {"schema", {{"kind", to_string(config.kind)}, {"version", kSchemaVersion}, {"files", files}}},
      {"library", {{"name", "reloc"}, {"version", std::string(kVersion)}}},
      {"seeds", seeds},
      {"config", to_json(config)},
      {"runtime", {{"workers", workers}}},
  };
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         unsigned workers) {
  std::filesystem::create_directories(out_dir);
  const std::vector<NamedTable> tables = run_tables(config, workers);
  RunResult result;
  for (const auto& t : tables) {
    const auto path = out_dir / t.file;
    write_file(path, t.table.render());
    result.files.push_back(path);
  }
  const auto meta_path = out_dir / (to_string(config.kind) + ".meta.json");
  write_file(meta_path, metadata(config, tables, workers).dump(2) + "\n");
  result.files.push_back(meta_path);
  return result;
}

}  // namespace reloc::cli
