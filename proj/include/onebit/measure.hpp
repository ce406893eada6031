#pragma once

#include "onebit/rng.hpp"
#include "onebit/types.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <variant>

namespace onebit {

struct SignQuantizer
{
};

// y = eps * sign(v) with P[eps = +1] = p, p in (1/2, 1].
struct BitFlip
{
  double p = 1.0;
};

// y = sign(v + tau), tau ~ N(0, sigma^2).
struct AdditiveGaussian
{
  double sigma = 0.0;
};

// User-supplied quantizer. Its validity under the correlation conditions is
// not checked; analytic routines in `complexity` fall back to Monte Carlo.
struct CustomQuantizer
{
  std::string name;
  std::function<int(double, Rng &)> apply;
};

class Quantizer
{
public:
  using Variant = std::variant<SignQuantizer, BitFlip, AdditiveGaussian, CustomQuantizer>;

  Quantizer();
  Quantizer(Variant variant);

  static Quantizer sign() { return Quantizer(SignQuantizer{}); }
  static Quantizer bit_flip(double p) { return Quantizer(BitFlip{p}); }
  static Quantizer additive_gaussian(double sigma) { return Quantizer(AdditiveGaussian{sigma}); }

  Variant const &variant() const { return variant_; }
  std::string name() const;

private:
  Variant variant_;
};

// sign(0) = +1.
inline int sign_of(double v) { return v >= 0.0 ? 1 : -1; }

// One draw of f(v). `noise` supplies the per-call randomness; Sign ignores it.
int quantize(Quantizer const &q, double v, Rng &noise);

struct Dataset
{
  Matrix A;  // m x n, one measurement vector per row
  Vector y;  // entries in {-1, +1}
  Vector x0; // ground truth, unit norm
  std::uint64_t seed = 0;
  Quantizer quantizer;

  Index m() const { return A.rows(); }
  Index n() const { return A.cols(); }
};

// Rows of A are i.i.d. N(0, I_n), y_i = f_i(<a_i, x0>). A is drawn from one
// sub-stream of `seed` and the quantizer noise from another, so datasets that
// differ only in the quantizer share A.
Dataset generate_dataset(Vector const &x0, Index m, Quantizer const &q, std::uint64_t seed);

// Writes A.csv (row-major), y.csv and dataset.json (x0, seed, quantizer) into `dir`.
void save_dataset(Dataset const &data, std::filesystem::path const &dir);
Dataset load_dataset(std::filesystem::path const &dir);

} // namespace onebit
