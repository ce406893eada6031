#pragma once

#include "onebit/estimate.hpp"
#include "onebit/measure.hpp"
#include "onebit/signal_sets.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace onebit {

enum class Estimator
{
  hinge,
  lasso
};

struct ExperimentSpec
{
  Index n = 0;
  int s = 1;
  SignalSet set = SignalSet::l2_ball(1);
  Quantizer quantizer;
  // Ground-truth generator; exact_sparse(s) when not given.
  std::optional<SignalKind> signal;
  std::vector<Index> m_grid;
  int trials_per_m = 1;
  std::vector<double> mu_grid;
  // mu-sweeps use m = ceil(mu_sample_constant * mu^4 * s * log n).
  double mu_sample_constant = 2.0;
  SolverConfig solver;
  Estimator estimator = Estimator::hinge;
  std::uint64_t base_seed = 0;

  SignalKind signal_kind() const;
  void validate() const;
};

nlohmann::json experiment_spec_to_json(ExperimentSpec const &spec);
ExperimentSpec experiment_spec_from_json(nlohmann::json const &j);

struct TrialRecord
{
  Index m = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double error = 2.0;
  double objective = 0.0;
  double wall_time_ms = 0.0;
  double mu = 1.0;
};

struct SummaryRow
{
  Index m = 0;
  double mu = 1.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  int count = 0;

  bool operator==(SummaryRow const &) const = default;
};

enum class SweepAxis
{
  m,
  mu
};

struct SlopeFit
{
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct SweepResult
{
  std::vector<TrialRecord> records; // sorted by (m, trial)
  std::vector<SummaryRow> summary;  // one row per grid point
  SweepAxis axis = SweepAxis::m;
  SlopeFit fit;
};

// Per-trial seed: derive_seed(base_seed, m, trial).
std::uint64_t trial_seed(std::uint64_t base_seed, Index m, int trial);

// Draws x0 and the dataset from the trial seed, solves, and scores the
// normalized error. `mu` overrides spec.solver.mu when given.
TrialRecord run_trial(ExperimentSpec const &spec, Index m, int trial, std::optional<double> mu = std::nullopt);

// Linearly interpolated quantile of unsorted data, q in [0, 1].
double quantile(std::vector<double> values, double q);

// Least-squares slope and intercept of log(y) against log(x).
SlopeFit fit_loglog(std::vector<double> const &x, std::vector<double> const &y);

// Groups records by grid point, computes median/IQR per point, fits the
// log-log slope of the medians and a percentile bootstrap CI over trials.
SweepResult summarize(std::vector<TrialRecord> records,
                      SweepAxis axis,
                      std::uint64_t bootstrap_seed,
                      int resamples = 1000);

SweepResult run_sweep(ExperimentSpec const &spec, unsigned threads = 0);
SweepResult run_mu_sweep(ExperimentSpec const &spec, unsigned threads = 0);

// m used for one point of a mu-sweep.
Index mu_sweep_samples(ExperimentSpec const &spec, double mu);

struct EmitOptions
{
  // Wall times vary run to run; records.csv leaves the column empty unless
  // this is set, which keeps reruns byte-identical.
  bool include_timing = false;
};

// records.csv, summary.csv, fit.json and spec.json under `dir`.
void emit(SweepResult const &result, ExperimentSpec const &spec, std::filesystem::path const &dir, EmitOptions opts = {});

std::vector<TrialRecord> read_records(std::filesystem::path const &path);
std::vector<SummaryRow> read_summary(std::filesystem::path const &path);

} // namespace onebit
