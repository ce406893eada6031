#include "onebit/complexity.hpp"
#include "onebit/errors.hpp"
#include "onebit/estimate.hpp"
#include "onebit/harness.hpp"
#include "onebit/json_io.hpp"
#include "onebit/parallel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitSpecError = 2;
constexpr int kExitNumerical = 3;

// Inline JSON, or @path to read it from a file.
json parse_json_arg(std::string const &arg, char const *what)
{
  if (!arg.empty() && arg.front() == '@') { return onebit::read_json_file(arg.substr(1)); }
  try {
    return json::parse(arg);
  } catch (json::exception const &e) {
    throw onebit::InvalidArgument(std::string(what) + ": " + e.what());
  }
}

void print_record(double value, double std_error, std::string const &method, std::uint64_t seed, json extra = {})
{
  json out{{"value", value}, {"std_error", std_error}, {"method", method}, {"seed", seed}};
  if (extra.is_object()) { out.update(extra); }
  std::cout << out.dump() << '\n';
}

struct SweepArgs
{
  std::string spec;
  std::string out;
  unsigned threads = 0;
  bool timing = false;
};

void add_sweep_options(CLI::App *cmd, SweepArgs &args)
{
  cmd->add_option("--spec", args.spec, "Experiment spec (JSON file)")->required();
  cmd->add_option("--out", args.out, "Output directory")->required();
  cmd->add_option("--threads", args.threads, "Worker count (default: ONEBIT_THREADS or all cores)");
  cmd->add_flag("--timing", args.timing, "Fill wall_time_ms in records.csv (breaks byte-identical reruns)");
}

void report_sweep(onebit::SweepResult const &result, fs::path const &out)
{
  json summary{{"out", out.string()},
               {"records", result.records.size()},
               {"slope", result.fit.slope},
               {"ci", {result.fit.ci_low, result.fit.ci_high}}};
  std::cout << summary.dump() << '\n';
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"onebit: 1-bit compressed sensing by constrained hinge-loss minimization"};
  app.require_subcommand(1);

  SweepArgs simulate_args;
  int simulate_trial = 0;
  auto *simulate = app.add_subcommand("simulate", "Generate one dataset from a spec, solve it, and save everything");
  simulate->add_option("--spec", simulate_args.spec, "Experiment spec (JSON file); uses the first m of m_grid")->required();
  simulate->add_option("--out", simulate_args.out, "Output directory")->required();
  simulate->add_option("--trial", simulate_trial, "Trial index used for seed derivation");

  SweepArgs sweep_args;
  auto *sweep = app.add_subcommand("sweep", "Run trials over m_grid and fit the error decay rate");
  add_sweep_options(sweep, sweep_args);

  SweepArgs mu_args;
  auto *mu_sweep = app.add_subcommand("mu-sweep", "Run trials over mu_grid with m = c mu^4 s log n");
  add_sweep_options(mu_sweep, mu_args);

  std::string set_arg, anchor_arg;
  std::int64_t width_samples = 10'000;
  std::uint64_t width_seed = 0;
  double width_t = 0.0;
  auto *width = app.add_subcommand("width", "Monte Carlo Gaussian width (or local width with --t and --anchor)");
  width->add_option("--set", set_arg, "Signal set descriptor (JSON or @file)")->required();
  width->add_option("--samples", width_samples, "Gaussian draws");
  width->add_option("--seed", width_seed, "Seed");
  width->add_option("--t", width_t, "Localization radius for local width");
  width->add_option("--anchor", anchor_arg, "Anchor point as a JSON array (local width)");

  std::string quantizer_arg = R"({"type":"sign"})";
  std::string lambda_method = "closed_form";
  std::int64_t lambda_samples = 1'000'000;
  std::uint64_t lambda_seed = 0;
  auto *lambda = app.add_subcommand("lambda", "Correlation parameter E[f(g) g]");
  lambda->add_option("--quantizer", quantizer_arg, "Quantizer descriptor (JSON or @file)");
  lambda->add_option("--method", lambda_method, "closed_form | quadrature | monte_carlo");
  lambda->add_option("--samples", lambda_samples, "Monte Carlo draws");
  lambda->add_option("--seed", lambda_seed, "Seed");

  int quad_points = onebit::kDefaultQuadPoints;
  auto *mu = app.add_subcommand("mu", "Scaling factor argmin_s E[hinge(s f(g) g)]");
  mu->add_option("--quantizer", quantizer_arg, "Quantizer descriptor (JSON or @file)");
  mu->add_option("--quad-points", quad_points, "Gauss-Legendre points per panel");

  std::int64_t c2_samples = 1'000'000;
  int c2_bins = onebit::kDefaultC2Bins;
  std::uint64_t c2_seed = 0;
  auto *c2 = app.add_subcommand("c2", "Binned check of E[f(g) sign(g) | |g|] >= 0");
  c2->add_option("--quantizer", quantizer_arg, "Quantizer descriptor (JSON or @file)");
  c2->add_option("--samples", c2_samples, "Monte Carlo draws");
  c2->add_option("--bins", c2_bins, "Equal-probability bins of |g|");
  c2->add_option("--seed", c2_seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const &e) {
    int const code = app.exit(e);
    return code == 0 ? 0 : kExitSpecError;
  }

  try {
    if (*simulate) {
      auto const spec = onebit::experiment_spec_from_json(onebit::read_json_file(simulate_args.spec));
      if (spec.m_grid.empty()) { throw onebit::InvalidArgument("simulate: m_grid is empty"); }
      onebit::Index const m = spec.m_grid.front();
      auto const seed = onebit::trial_seed(spec.base_seed, m, simulate_trial);
      auto const x0 = onebit::sample_signal(spec.signal_kind(), spec.n, onebit::derive_seed(seed, 0));
      auto const data = onebit::generate_dataset(x0, m, spec.quantizer, onebit::derive_seed(seed, 1));
      auto const est = spec.estimator == onebit::Estimator::hinge ? onebit::solve_hinge(data, spec.set, spec.solver)
                                                                   : onebit::solve_lasso(data, spec.set, spec.solver);
      fs::path const out = simulate_args.out;
      onebit::save_dataset(data, out);
      auto est_json = onebit::estimate_to_json(est);
      onebit::write_json_file(est_json, out / "estimate.json");
      onebit::write_trace_csv(est, out / "trace.csv");
      onebit::write_json_file(onebit::experiment_spec_to_json(spec), out / "spec.json");
      std::cout << json{{"out", out.string()},
                        {"m", m},
                        {"objective", est.objective},
                        {"iterations_used", est.iterations_used},
                        {"error", onebit::normalized_error(x0, est.x_hat).value}}
                     .dump()
                << '\n';
    } else if (*sweep || *mu_sweep) {
      auto const &args = *sweep ? sweep_args : mu_args;
      auto const spec = onebit::experiment_spec_from_json(onebit::read_json_file(args.spec));
      unsigned const threads = args.threads ? args.threads : onebit::default_threads();
      auto const result = *sweep ? onebit::run_sweep(spec, threads) : onebit::run_mu_sweep(spec, threads);
      onebit::emit(result, spec, args.out, {.include_timing = args.timing});
      report_sweep(result, args.out);
    } else if (*width) {
      auto const set = onebit::signal_set_from_json(parse_json_arg(set_arg, "--set"));
      if (width_t > 0.0) {
        if (anchor_arg.empty()) { throw onebit::InvalidArgument("width: --t requires --anchor"); }
        auto const anchor = onebit::vector_from_json(parse_json_arg(anchor_arg, "--anchor"));
        auto const est = onebit::local_width(set, anchor, width_t, width_samples, width_seed);
        print_record(est.mean, est.std_error, "local_monte_carlo", width_seed,
                     {{"samples", est.samples}, {"lower_bound", est.lower_bound}, {"t", width_t}});
      } else {
        auto const est = onebit::gaussian_width(set, width_samples, width_seed);
        print_record(est.mean, est.std_error, "monte_carlo", width_seed, {{"samples", est.samples}});
      }
    } else if (*lambda) {
      auto const q = onebit::quantizer_from_json(parse_json_arg(quantizer_arg, "--quantizer"));
      auto const method = onebit::lambda_method_from_string(lambda_method);
      auto const est = onebit::lambda_of(q, method, {.samples = lambda_samples, .seed = lambda_seed});
      print_record(est.mean, est.std_error, lambda_method, lambda_seed, {{"samples", est.samples}});
    } else if (*mu) {
      auto const q = onebit::quantizer_from_json(parse_json_arg(quantizer_arg, "--quantizer"));
      print_record(onebit::mu_of(q, quad_points), 0.0, "quadrature_golden_section", 0, {{"quad_points", quad_points}});
    } else if (*c2) {
      auto const q = onebit::quantizer_from_json(parse_json_arg(quantizer_arg, "--quantizer"));
      auto const report = onebit::check_c2(q, c2_samples, c2_bins, c2_seed);
      print_record(report.margin, report.std_error, "binned_monte_carlo", c2_seed,
                   {{"passes", report.passes}, {"bins", c2_bins}, {"bin_means", report.bin_means}});
    }
  } catch (onebit::InvalidArgument const &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSpecError;
  } catch (onebit::Unsupported const &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSpecError;
  } catch (onebit::NumericalFailure const &e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (std::exception const &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
