#include "onebit/measure.hpp"
#include "onebit/detail/overloaded.hpp"
#include "onebit/errors.hpp"
#include "onebit/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace onebit {

namespace {

using detail::Overloaded;

void validate(Quantizer::Variant const &v)
{
  std::visit(Overloaded{
               [](SignQuantizer const &) {},
               [](BitFlip const &b) {
                 if (!(b.p > 0.5 && b.p <= 1.0)) { throw InvalidArgument("bit_flip: p must lie in (1/2, 1]"); }
               },
               [](AdditiveGaussian const &a) {
                 if (!(a.sigma >= 0.0) || !std::isfinite(a.sigma)) {
                   throw InvalidArgument("additive_gaussian: sigma must be finite and >= 0");
                 }
               },
               [](CustomQuantizer const &c) {
                 if (!c.apply) { throw InvalidArgument("custom quantizer: missing function"); }
               },
             },
             v);
}

std::string format_double(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::vector<double>> read_csv(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in) { throw InvalidArgument("cannot open " + path.string()); }
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) { continue; }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (std::exception const &) {
        throw InvalidArgument(path.string() + ": malformed number '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace

Quantizer::Quantizer()
  : variant_(SignQuantizer{})
{
}

Quantizer::Quantizer(Variant variant)
  : variant_(std::move(variant))
{
  validate(variant_);
}

std::string Quantizer::name() const
{
  return std::visit(Overloaded{
                      [](SignQuantizer const &) -> std::string { return "sign"; },
                      [](BitFlip const &) -> std::string { return "bit_flip"; },
                      [](AdditiveGaussian const &) -> std::string { return "additive_gaussian"; },
                      [](CustomQuantizer const &c) -> std::string { return c.name; },
                    },
                    variant_);
}

int quantize(Quantizer const &q, double v, Rng &noise)
{
  return std::visit(Overloaded{
                      [&](SignQuantizer const &) { return sign_of(v); },
                      [&](BitFlip const &b) { return noise.bernoulli(b.p) ? sign_of(v) : -sign_of(v); },
                      [&](AdditiveGaussian const &a) { return sign_of(v + a.sigma * noise.normal()); },
                      [&](CustomQuantizer const &c) {
                        int const out = c.apply(v, noise);
                        if (out != 1 && out != -1) { throw InvalidArgument("custom quantizer returned non +-1 value"); }
                        return out;
                      },
                    },
                    q.variant());
}

Dataset generate_dataset(Vector const &x0, Index m, Quantizer const &q, std::uint64_t seed)
{
  if (m < 1) { throw InvalidArgument("generate_dataset: m must be >= 1"); }
  if (x0.size() < 1) { throw InvalidArgument("generate_dataset: empty signal"); }
  if (!x0.allFinite() || std::abs(x0.norm() - 1.0) > 1e-9) {
    throw InvalidArgument("generate_dataset: x0 must have unit Euclidean norm");
  }
  Dataset data;
  data.x0 = x0;
  data.seed = seed;
  data.quantizer = q;
  data.A.resize(m, x0.size());
  data.y.resize(m);

  Rng const root(seed);
  Rng rows = root.split(0);
  Rng noise = root.split(1);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < x0.size(); ++j) { data.A(i, j) = rows.normal(); }
    data.y[i] = quantize(q, data.A.row(i).dot(x0), noise);
  }
  return data;
}

void save_dataset(Dataset const &data, std::filesystem::path const &dir)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) { throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message()); }

  auto open = [](std::filesystem::path const &path) {
    std::ofstream out(path);
    if (!out) { throw std::runtime_error("cannot write " + path.string()); }
    return out;
  };
  {
    auto out = open(dir / "A.csv");
    for (Index i = 0; i < data.m(); ++i) {
      for (Index j = 0; j < data.n(); ++j) { out << (j ? "," : "") << format_double(data.A(i, j)); }
      out << '\n';
    }
  }
  {
    auto out = open(dir / "y.csv");
    for (Index i = 0; i < data.m(); ++i) { out << static_cast<int>(data.y[i]) << '\n'; }
  }
  {
    nlohmann::json sidecar;
    sidecar["m"] = data.m();
    sidecar["n"] = data.n();
    sidecar["seed"] = data.seed;
    sidecar["x0"] = std::vector<double>(data.x0.begin(), data.x0.end());
    sidecar["quantizer"] = quantizer_to_json(data.quantizer);
    auto out = open(dir / "dataset.json");
    out << sidecar.dump(2) << '\n';
  }
}

Dataset load_dataset(std::filesystem::path const &dir)
{
  std::ifstream side(dir / "dataset.json");
  if (!side) { throw InvalidArgument("cannot open " + (dir / "dataset.json").string()); }
  nlohmann::json sidecar;
  try {
    side >> sidecar;
  } catch (nlohmann::json::exception const &e) {
    throw InvalidArgument("dataset.json: " + std::string(e.what()));
  }

  auto const rows = read_csv(dir / "A.csv");
  auto const labels = read_csv(dir / "y.csv");
  if (rows.empty() || labels.size() != rows.size()) {
    throw InvalidArgument("dataset: A.csv and y.csv must have the same positive number of rows");
  }
  Dataset data;
  auto const x0 = sidecar.at("x0").get<std::vector<double>>();
  data.x0 = Eigen::Map<Vector const>(x0.data(), static_cast<Index>(x0.size()));
  data.seed = sidecar.at("seed").get<std::uint64_t>();
  data.quantizer = quantizer_from_json(sidecar.at("quantizer"));
  data.A.resize(static_cast<Index>(rows.size()), data.x0.size());
  data.y.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Index>(rows[i].size()) != data.x0.size() || labels[i].size() != 1) {
      throw InvalidArgument("dataset: row " + std::to_string(i) + " has the wrong shape");
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) { data.A(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j]; }
    double const label = labels[i][0];
    if (label != 1.0 && label != -1.0) { throw InvalidArgument("dataset: labels must be +1 or -1"); }
    data.y[static_cast<Index>(i)] = label;
  }
  return data;
}

} // namespace onebit
