#include "cfser/common.hpp"

#include <cmath>

namespace cfser {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t id0,
                             std::uint64_t id1) {
  std::uint64_t state = master;
  std::uint64_t out = splitmix64(state);
  state ^= id0;
  out ^= splitmix64(state);
  state ^= id1;
  out ^= splitmix64(state);
  return out;
}

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
  const double a = phase();
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

cplx Rng::complex_gaussian(double variance) {
  // Magnitude-phase form of a circularly-symmetric draw: |z|^2 ~ Exp(variance).
  const double r = std::sqrt(-variance * std::log(uniform_pos()));
  const double a = phase();
  return {r * std::cos(a), r * std::sin(a)};
}

cplx Rng::unit_phasor() {
  const double a = phase();
  return {std::cos(a), std::sin(a)};
}

}  // namespace cfser
