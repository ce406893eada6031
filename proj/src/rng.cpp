#include "onebit/rng.hpp"

#include <cmath>

namespace onebit {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept
{
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept
{
  return mix64(mix64(seed ^ 0x6a09e667f3bcc909ULL) + kGamma * (index + 1));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept
{
  return derive_seed(derive_seed(seed, a), b);
}

Rng::Rng(std::uint64_t seed) noexcept
  : key_(mix64(seed + 0x243f6a8885a308d3ULL))
{
}

Rng::result_type Rng::operator()() noexcept
{
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

Rng Rng::split(std::uint64_t index) const noexcept { return Rng(derive_seed(key_, index)); }

double Rng::uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Rng::normal() noexcept
{
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double const scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

bool Rng::bernoulli(double p) noexcept { return uniform() < p; }

std::uint64_t Rng::below(std::uint64_t bound) noexcept
{
  // Lemire's rejection keeps the result unbiased.
  std::uint64_t const threshold = (0 - bound) % bound;
  while (true) {
    std::uint64_t const r = (*this)();
    if (r >= threshold) { return r % bound; }
  }
}

} // namespace onebit
