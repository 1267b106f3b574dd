#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace cfser {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// Mixes a master seed with up to two stream ids (splitmix64 chain). Parallel
/// drops and Monte-Carlo batches derive their generators from this, so results
/// are reproducible regardless of scheduling.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t id0,
                             std::uint64_t id1 = 0);

/// Random generator wrapping mt19937_64. Gaussian, phase and complex-Gaussian
/// draws are produced by explicit uniform transforms, so sequences depend only
/// on the seed and not on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master, std::uint64_t id0, std::uint64_t id1 = 0)
      : engine_(substream_seed(master, id0, id1)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe as a log() argument.
  double uniform_pos() { return double((engine_() >> 11) + 1) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian();

  /// Circularly-symmetric complex Gaussian CN(0, variance).
  cplx complex_gaussian(double variance);

  /// Uniform phase on [0, 2*pi).
  double phase() { return 2.0 * kPi * uniform(); }

  cplx unit_phasor();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Dense row-major grid of per-link records.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols)
      : rows_(rows), cols_(cols), data_(std::size_t(rows) * std::size_t(cols)) {}

  T& operator()(int r, int c) { return data_[std::size_t(r) * cols_ + c]; }
  const T& operator()(int r, int c) const {
    return data_[std::size_t(r) * cols_ + c];
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

}  // namespace cfser
