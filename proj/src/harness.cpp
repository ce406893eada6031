#include "onebit/harness.hpp"
#include "onebit/errors.hpp"
#include "onebit/json_io.hpp"
#include "onebit/parallel.hpp"
#include "onebit/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace onebit {

using nlohmann::json;

namespace {

constexpr char const *kRecordsHeader = "m,trial,seed,error,objective,wall_time_ms";
constexpr char const *kSummaryHeader = "m,mu,median,q1,q3,count";
constexpr std::uint64_t kBootstrapStream = 0xb0075742ULL;

std::string fmt(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_for_write(std::filesystem::path const &path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) { throw std::runtime_error("cannot write " + path.string()); }
  return out;
}

void finish(std::ofstream &out, std::filesystem::path const &path)
{
  out.flush();
  if (!out) { throw std::runtime_error("write failed: " + path.string()); }
}

std::vector<std::string> split_csv(std::string const &line)
{
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) { cells.push_back(cell); }
  if (!line.empty() && line.back() == ',') { cells.emplace_back(); }
  return cells;
}

std::vector<std::vector<std::string>> read_table(std::filesystem::path const &path, std::string const &header)
{
  std::ifstream in(path);
  if (!in) { throw InvalidArgument("cannot open " + path.string()); }
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw InvalidArgument(path.string() + ": expected header '" + header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  auto const width = split_csv(header).size();
  while (std::getline(in, line)) {
    if (line.empty()) { continue; }
    auto cells = split_csv(line);
    if (cells.size() != width) { throw InvalidArgument(path.string() + ": malformed row '" + line + "'"); }
    rows.push_back(std::move(cells));
  }
  return rows;
}

double parse_double(std::string const &cell)
{
  if (cell.empty()) { return std::numeric_limits<double>::quiet_NaN(); }
  try {
    return std::stod(cell);
  } catch (std::exception const &) {
    throw InvalidArgument("malformed number '" + cell + "'");
  }
}

double median_of(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double safe_log(double v) { return std::log(std::max(v, std::numeric_limits<double>::min())); }

} // namespace

SignalKind ExperimentSpec::signal_kind() const { return signal ? *signal : SignalKind{ExactSparse{s}}; }

void ExperimentSpec::validate() const
{
  if (n < 1) { throw InvalidArgument("spec: n must be positive"); }
  if (s < 1 || s > n) { throw InvalidArgument("spec: need 1 <= s <= n"); }
  if (set.dim() != n) { throw InvalidArgument("spec: set dimension differs from n"); }
  if (trials_per_m < 1) { throw InvalidArgument("spec: trials_per_m must be >= 1"); }
  for (std::size_t i = 0; i < m_grid.size(); ++i) {
    if (m_grid[i] < 1) { throw InvalidArgument("spec: m_grid entries must be >= 1"); }
    if (i > 0 && m_grid[i] <= m_grid[i - 1]) { throw InvalidArgument("spec: m_grid must be strictly increasing"); }
  }
  for (std::size_t i = 0; i < mu_grid.size(); ++i) {
    if (!(mu_grid[i] > 0.0)) { throw InvalidArgument("spec: mu_grid entries must be positive"); }
    if (i > 0 && mu_grid[i] <= mu_grid[i - 1]) { throw InvalidArgument("spec: mu_grid must be strictly increasing"); }
  }
  if (!(mu_sample_constant > 0.0)) { throw InvalidArgument("spec: mu_sample_constant must be positive"); }
  solver.validate();
}

json experiment_spec_to_json(ExperimentSpec const &spec)
{
  json j{{"n", spec.n},
         {"s", spec.s},
         {"set", signal_set_to_json(spec.set)},
         {"quantizer", quantizer_to_json(spec.quantizer)},
         {"signal", signal_kind_to_json(spec.signal_kind())},
         {"m_grid", spec.m_grid},
         {"trials_per_m", spec.trials_per_m},
         {"mu_grid", spec.mu_grid},
         {"mu_sample_constant", spec.mu_sample_constant},
         {"solver", solver_config_to_json(spec.solver)},
         {"estimator", spec.estimator == Estimator::hinge ? "hinge" : "lasso"},
         {"base_seed", spec.base_seed}};
  return j;
}

ExperimentSpec experiment_spec_from_json(json const &j)
{
  ExperimentSpec spec;
  try {
    spec.n = j.at("n").get<Index>();
    spec.s = j.value("s", 1);
    spec.set = signal_set_from_json(j.at("set"));
    spec.quantizer = j.contains("quantizer") ? quantizer_from_json(j.at("quantizer")) : Quantizer::sign();
    if (j.contains("signal")) { spec.signal = signal_kind_from_json(j.at("signal")); }
    spec.m_grid = j.value("m_grid", std::vector<Index>{});
    spec.trials_per_m = j.value("trials_per_m", 1);
    spec.mu_grid = j.value("mu_grid", std::vector<double>{});
    spec.mu_sample_constant = j.value("mu_sample_constant", 2.0);
    if (j.contains("solver")) { spec.solver = solver_config_from_json(j.at("solver")); }
    auto const estimator = j.value("estimator", std::string("hinge"));
    if (estimator == "hinge") {
      spec.estimator = Estimator::hinge;
    } else if (estimator == "lasso") {
      spec.estimator = Estimator::lasso;
    } else {
      throw InvalidArgument("spec: unknown estimator '" + estimator + "'");
    }
    spec.base_seed = j.value("base_seed", std::uint64_t{0});
  } catch (json::exception const &e) {
    throw InvalidArgument(std::string("spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::uint64_t trial_seed(std::uint64_t base_seed, Index m, int trial)
{
  return derive_seed(base_seed, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(trial));
}

TrialRecord run_trial(ExperimentSpec const &spec, Index m, int trial, std::optional<double> mu)
{
  auto const start = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.m = m;
  rec.trial = trial;
  rec.seed = trial_seed(spec.base_seed, m, trial);

  Vector const x0 = sample_signal(spec.signal_kind(), spec.n, derive_seed(rec.seed, 0));
  Dataset const data = generate_dataset(x0, m, spec.quantizer, derive_seed(rec.seed, 1));
  SolverConfig cfg = spec.solver;
  if (mu) { cfg.mu = *mu; }
  rec.mu = cfg.mu;
  Estimate const est = spec.estimator == Estimator::hinge ? solve_hinge(data, spec.set, cfg)
                                                           : solve_lasso(data, spec.set, cfg);
  rec.error = normalized_error(x0, est.x_hat).value;
  rec.objective = est.objective;
  rec.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

double quantile(std::vector<double> values, double q)
{
  if (values.empty()) { throw InvalidArgument("quantile: empty sample"); }
  std::sort(values.begin(), values.end());
  double const pos = q * static_cast<double>(values.size() - 1);
  auto const lo = static_cast<std::size_t>(std::floor(pos));
  auto const hi = std::min(lo + 1, values.size() - 1);
  double const frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

SlopeFit fit_loglog(std::vector<double> const &x, std::vector<double> const &y)
{
  SlopeFit fit;
  if (x.size() != y.size()) { throw InvalidArgument("fit_loglog: size mismatch"); }
  if (x.size() < 2) {
    fit.slope = fit.intercept = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += safe_log(x[i]);
    my += safe_log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double const dx = safe_log(x[i]) - mx;
    sxy += dx * (safe_log(y[i]) - my);
    sxx += dx * dx;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.ci_low = fit.ci_high = fit.slope;
  return fit;
}

SweepResult summarize(std::vector<TrialRecord> records, SweepAxis axis, std::uint64_t bootstrap_seed, int resamples)
{
  std::sort(records.begin(), records.end(), [](TrialRecord const &a, TrialRecord const &b) {
    return std::tie(a.m, a.trial) < std::tie(b.m, b.trial);
  });
  SweepResult result;
  result.axis = axis;

  std::map<Index, std::vector<double>> groups;
  std::map<Index, double> mus;
  for (auto const &r : records) {
    groups[r.m].push_back(r.error);
    mus.emplace(r.m, r.mu);
  }
  std::vector<double> xs, medians;
  for (auto const &[m, errors] : groups) {
    SummaryRow row;
    row.m = m;
    row.mu = mus[m];
    row.median = median_of(errors);
    row.q1 = quantile(errors, 0.25);
    row.q3 = quantile(errors, 0.75);
    row.count = static_cast<int>(errors.size());
    result.summary.push_back(row);
    xs.push_back(axis == SweepAxis::m ? static_cast<double>(m) : row.mu);
    medians.push_back(row.median);
  }
  result.fit = fit_loglog(xs, medians);

  if (xs.size() >= 2 && resamples > 0) {
    Rng rng(bootstrap_seed);
    std::vector<double> slopes;
    slopes.reserve(static_cast<std::size_t>(resamples));
    std::vector<double> boot_medians(medians.size());
    for (int r = 0; r < resamples; ++r) {
      std::size_t g = 0;
      for (auto const &[m, errors] : groups) {
        std::vector<double> draw(errors.size());
        for (auto &d : draw) { d = errors[rng.below(errors.size())]; }
        boot_medians[g++] = median_of(std::move(draw));
      }
      slopes.push_back(fit_loglog(xs, boot_medians).slope);
    }
    result.fit.ci_low = quantile(slopes, 0.025);
    result.fit.ci_high = quantile(slopes, 0.975);
  }
  result.records = std::move(records);
  return result;
}

namespace {

SweepResult run_grid(ExperimentSpec const &spec,
                     std::vector<std::pair<Index, double>> const &grid,
                     SweepAxis axis,
                     unsigned threads)
{
  std::vector<std::pair<std::size_t, int>> tasks;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (int t = 0; t < spec.trials_per_m; ++t) { tasks.emplace_back(g, t); }
  }
  std::vector<TrialRecord> records(tasks.size());
  parallel_for(tasks.size(), threads ? threads : default_threads(), [&](std::size_t i) {
    auto const [g, t] = tasks[i];
    records[i] = run_trial(spec, grid[g].first, t, grid[g].second);
  });
  return summarize(std::move(records), axis, derive_seed(spec.base_seed, kBootstrapStream));
}

} // namespace

SweepResult run_sweep(ExperimentSpec const &spec, unsigned threads)
{
  spec.validate();
  if (spec.m_grid.empty()) { throw InvalidArgument("sweep: m_grid is empty"); }
  std::vector<std::pair<Index, double>> grid;
  for (Index m : spec.m_grid) { grid.emplace_back(m, spec.solver.mu); }
  return run_grid(spec, grid, SweepAxis::m, threads);
}

Index mu_sweep_samples(ExperimentSpec const &spec, double mu)
{
  double const m = spec.mu_sample_constant * std::pow(mu, 4) * spec.s * std::log(static_cast<double>(spec.n));
  return std::max<Index>(1, static_cast<Index>(std::ceil(m)));
}

SweepResult run_mu_sweep(ExperimentSpec const &spec, unsigned threads)
{
  spec.validate();
  if (spec.mu_grid.empty()) { throw InvalidArgument("mu-sweep: mu_grid is empty"); }
  std::vector<std::pair<Index, double>> grid;
  for (double mu : spec.mu_grid) {
    Index const m = mu_sweep_samples(spec, mu);
    if (!grid.empty() && m <= grid.back().first) {
      throw InvalidArgument("mu-sweep: grid points map to the same sample count");
    }
    grid.emplace_back(m, mu);
  }
  return run_grid(spec, grid, SweepAxis::mu, threads);
}

void emit(SweepResult const &result, ExperimentSpec const &spec, std::filesystem::path const &dir, EmitOptions opts)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) { throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message()); }

  auto records = result.records;
  std::sort(records.begin(), records.end(), [](TrialRecord const &a, TrialRecord const &b) {
    return std::tie(a.m, a.trial) < std::tie(b.m, b.trial);
  });
  {
    auto const path = dir / "records.csv";
    auto out = open_for_write(path);
    out << kRecordsHeader << '\n';
    for (auto const &r : records) {
      out << r.m << ',' << r.trial << ',' << r.seed << ',' << fmt(r.error) << ',' << fmt(r.objective) << ','
          << (opts.include_timing ? fmt(r.wall_time_ms) : std::string()) << '\n';
    }
    finish(out, path);
  }
  {
    auto const path = dir / "summary.csv";
    auto out = open_for_write(path);
    out << kSummaryHeader << '\n';
    for (auto const &row : result.summary) {
      out << row.m << ',' << fmt(row.mu) << ',' << fmt(row.median) << ',' << fmt(row.q1) << ',' << fmt(row.q3) << ','
          << row.count << '\n';
    }
    finish(out, path);
  }
  {
    json fit{{"axis", result.axis == SweepAxis::m ? "m" : "mu"},
             {"slope", result.fit.slope},
             {"intercept", result.fit.intercept},
             {"ci_low", result.fit.ci_low},
             {"ci_high", result.fit.ci_high}};
    write_json_file(fit, dir / "fit.json");
  }
  write_json_file(experiment_spec_to_json(spec), dir / "spec.json");
}

std::vector<TrialRecord> read_records(std::filesystem::path const &path)
{
  std::vector<TrialRecord> records;
  for (auto const &cells : read_table(path, kRecordsHeader)) {
    TrialRecord r;
    try {
      r.m = std::stoll(cells[0]);
      r.trial = std::stoi(cells[1]);
      r.seed = std::stoull(cells[2]);
    } catch (std::exception const &) {
      throw InvalidArgument(path.string() + ": malformed record");
    }
    r.error = parse_double(cells[3]);
    r.objective = parse_double(cells[4]);
    r.wall_time_ms = parse_double(cells[5]);
    records.push_back(r);
  }
  return records;
}

std::vector<SummaryRow> read_summary(std::filesystem::path const &path)
{
  std::vector<SummaryRow> rows;
  for (auto const &cells : read_table(path, kSummaryHeader)) {
    SummaryRow row;
    try {
      row.m = std::stoll(cells[0]);
      row.count = std::stoi(cells[5]);
    } catch (std::exception const &) {
      throw InvalidArgument(path.string() + ": malformed summary row");
    }
    row.mu = parse_double(cells[1]);
    row.median = parse_double(cells[2]);
    row.q1 = parse_double(cells[3]);
    row.q3 = parse_double(cells[4]);
    rows.push_back(row);
  }
  return rows;
}

} // namespace onebit
