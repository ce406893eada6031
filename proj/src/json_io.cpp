#include "onebit/json_io.hpp"
#include "onebit/detail/overloaded.hpp"
#include "onebit/errors.hpp"

#include <cstdio>
#include <fstream>

namespace onebit {

using detail::Overloaded;
using nlohmann::json;

namespace {

// Wraps nlohmann's type/key errors so they surface as validation failures.
template <typename Fn> auto guarded(char const *what, Fn &&fn)
{
  try {
    return fn();
  } catch (json::exception const &e) {
    throw InvalidArgument(std::string(what) + ": " + e.what());
  }
}

} // namespace

json vector_to_json(Vector const &v) { return std::vector<double>(v.begin(), v.end()); }

Vector vector_from_json(json const &j)
{
  auto const values = guarded("vector", [&] { return j.get<std::vector<double>>(); });
  return Eigen::Map<Vector const>(values.data(), static_cast<Index>(values.size()));
}

json matrix_to_json(Matrix const &m)
{
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) { rows.push_back(vector_to_json(m.row(i).transpose())); }
  return rows;
}

Matrix matrix_from_json(json const &j)
{
  auto const rows = guarded("matrix", [&] { return j.get<std::vector<std::vector<double>>>(); });
  if (rows.empty() || rows.front().empty()) { throw InvalidArgument("matrix: must be non-empty"); }
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) { throw InvalidArgument("matrix: ragged rows"); }
    for (std::size_t k = 0; k < rows[i].size(); ++k) { m(static_cast<Index>(i), static_cast<Index>(k)) = rows[i][k]; }
  }
  return m;
}

json signal_set_to_json(SignalSet const &set)
{
  json j = std::visit(Overloaded{
                        [&](L2Ball const &b) { return json{{"variant", "l2_ball"}, {"radius", b.radius}}; },
                        [&](ScaledL1Ball const &b) { return json{{"variant", "scaled_l1_ball"}, {"radius", b.radius}}; },
                        [&](EffSparse const &k) {
                          json out{{"variant", "eff_sparse"}, {"s", k.s}};
                          if (k.l1_radius) { out["l1_radius"] = *k.l1_radius; }
                          return out;
                        },
                        [&](Subspace const &e) { return json{{"variant", "subspace"}, {"basis", matrix_to_json(e.basis)}}; },
                        [&](Polytope const &p) {
                          return json{{"variant", "polytope"}, {"vertices", matrix_to_json(p.vertices)}};
                        },
                      },
                      set.variant());
  j["n"] = set.dim();
  if (set.scale() != 1.0) { j["scale"] = set.scale(); }
  return j;
}

SignalSet signal_set_from_json(json const &j)
{
  auto set = guarded("signal set", [&]() -> SignalSet {
    auto const variant = j.at("variant").get<std::string>();
    if (variant == "subspace") { return SignalSet::subspace(matrix_from_json(j.at("basis"))); }
    if (variant == "polytope") { return SignalSet::polytope(matrix_from_json(j.at("vertices"))); }
    auto const n = j.at("n").get<Index>();
    if (variant == "l2_ball") { return SignalSet::l2_ball(n, j.value("radius", 1.0)); }
    if (variant == "scaled_l1_ball") { return SignalSet::scaled_l1_ball(n, j.at("radius").get<double>()); }
    if (variant == "eff_sparse") {
      std::optional<double> r1;
      if (j.contains("l1_radius")) { r1 = j.at("l1_radius").get<double>(); }
      return SignalSet::eff_sparse(n, j.at("s").get<int>(), r1);
    }
    throw InvalidArgument("signal set: unknown variant '" + variant + "'");
  });
  if (j.contains("n") && guarded("signal set", [&] { return j.at("n").get<Index>(); }) != set.dim()) {
    throw InvalidArgument("signal set: 'n' disagrees with the basis/vertex dimension");
  }
  if (j.contains("scale")) { set = set.scaled(guarded("signal set", [&] { return j.at("scale").get<double>(); })); }
  return set;
}

json quantizer_to_json(Quantizer const &q)
{
  return std::visit(Overloaded{
                      [](SignQuantizer const &) { return json{{"type", "sign"}}; },
                      [](BitFlip const &b) { return json{{"type", "bit_flip"}, {"p", b.p}}; },
                      [](AdditiveGaussian const &a) { return json{{"type", "additive_gaussian"}, {"sigma", a.sigma}}; },
                      [](CustomQuantizer const &c) { return json{{"type", "custom"}, {"name", c.name}}; },
                    },
                    q.variant());
}

Quantizer quantizer_from_json(json const &j)
{
  return guarded("quantizer", [&]() -> Quantizer {
    auto const type = j.at("type").get<std::string>();
    if (type == "sign") { return Quantizer::sign(); }
    if (type == "bit_flip") { return Quantizer::bit_flip(j.at("p").get<double>()); }
    if (type == "additive_gaussian") { return Quantizer::additive_gaussian(j.at("sigma").get<double>()); }
    throw InvalidArgument("quantizer: unknown type '" + type + "'");
  });
}

json signal_kind_to_json(SignalKind const &kind)
{
  return std::visit(Overloaded{
                      [](ExactSparse const &k) { return json{{"kind", "exact_sparse"}, {"s", k.s}}; },
                      [](Compressible const &k) { return json{{"kind", "compressible"}, {"s", k.s}, {"decay", k.decay}}; },
                      [](SubspaceSignal const &e) { return json{{"kind", "subspace"}, {"basis", matrix_to_json(e.basis)}}; },
                      [](PolytopeMix const &p) {
                        return json{{"kind", "polytope_mix"}, {"vertices", matrix_to_json(p.vertices)}};
                      },
                    },
                    kind);
}

SignalKind signal_kind_from_json(json const &j)
{
  return guarded("signal", [&]() -> SignalKind {
    auto const kind = j.at("kind").get<std::string>();
    if (kind == "exact_sparse") { return ExactSparse{j.at("s").get<int>()}; }
    if (kind == "compressible") { return Compressible{j.at("s").get<int>(), j.at("decay").get<double>()}; }
    if (kind == "subspace") { return SubspaceSignal{matrix_from_json(j.at("basis"))}; }
    if (kind == "polytope_mix") { return PolytopeMix{matrix_from_json(j.at("vertices"))}; }
    throw InvalidArgument("signal: unknown kind '" + kind + "'");
  });
}

json solver_config_to_json(SolverConfig const &cfg)
{
  return json{{"max_iters", cfg.max_iters}, {"step0", cfg.step0}, {"tolerance", cfg.tolerance},
              {"window", cfg.window},       {"mu", cfg.mu}};
}

SolverConfig solver_config_from_json(json const &j)
{
  SolverConfig cfg;
  guarded("solver", [&] {
    cfg.max_iters = j.value("max_iters", cfg.max_iters);
    cfg.step0 = j.value("step0", cfg.step0);
    cfg.tolerance = j.value("tolerance", cfg.tolerance);
    cfg.window = j.value("window", cfg.window);
    cfg.mu = j.value("mu", cfg.mu);
    return 0;
  });
  cfg.validate();
  return cfg;
}

json estimate_to_json(Estimate const &est)
{
  return json{{"x_hat", vector_to_json(est.x_hat)}, {"objective", est.objective}, {"iterations_used", est.iterations_used}};
}

void write_trace_csv(Estimate const &est, std::filesystem::path const &path)
{
  std::ofstream out(path);
  if (!out) { throw std::runtime_error("cannot write " + path.string()); }
  out << "iteration,best_objective\n";
  char buf[32];
  for (std::size_t k = 0; k < est.trace.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", est.trace[k]);
    out << k + 1 << ',' << buf << '\n';
  }
  if (!out) { throw std::runtime_error("write failed: " + path.string()); }
}

json read_json_file(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in) { throw InvalidArgument("cannot open " + path.string()); }
  try {
    return json::parse(in);
  } catch (json::exception const &e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

void write_json_file(json const &j, std::filesystem::path const &path)
{
  std::ofstream out(path);
  if (!out) { throw std::runtime_error("cannot write " + path.string()); }
  out << j.dump(2) << '\n';
  if (!out) { throw std::runtime_error("write failed: " + path.string()); }
}

} // namespace onebit
