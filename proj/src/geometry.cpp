#include "cfser/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "cfser/common.hpp"

namespace cfser {

Deployment generate_deployment(int num_aps, int num_users, double side_length,
                               double height_diff, std::uint64_t seed) {
  if (num_aps < 1) throw std::invalid_argument("generate_deployment: num_aps must be >= 1");
  if (num_users < 1) throw std::invalid_argument("generate_deployment: num_users must be >= 1");
  if (!(side_length > 0.0)) throw std::invalid_argument("generate_deployment: side_length must be > 0");
  if (height_diff < 0.0) throw std::invalid_argument("generate_deployment: height_diff must be >= 0");

  Deployment dep;
  dep.side_length = side_length;
  dep.height_diff = height_diff;
  dep.rng_seed = seed;
  dep.ap_positions.resize(static_cast<std::size_t>(num_aps));
  dep.user_positions.resize(static_cast<std::size_t>(num_users));

  Rng rng(seed);
  for (auto& p : dep.ap_positions) {
    p.x = rng.uniform(0.0, side_length);
    p.y = rng.uniform(0.0, side_length);
  }
  for (auto& p : dep.user_positions) {
    p.x = rng.uniform(0.0, side_length);
    p.y = rng.uniform(0.0, side_length);
  }
  return dep;
}

double wrap_distance_2d(const Point2& a, const Point2& b, double side) {
  double best = std::numeric_limits<double>::infinity();
  for (int sx = -1; sx <= 1; ++sx) {
    for (int sy = -1; sy <= 1; ++sy) {
      const double dx = a.x - (b.x + sx * side);
      const double dy = a.y - (b.y + sy * side);
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) best = d2;
    }
  }
  return std::sqrt(best);
}

double wrap_distance(const Point2& a, const Point2& b, double side,
                     double height) {
  const double d2d = wrap_distance_2d(a, b, side);
  return std::hypot(d2d, height);
}

}  // namespace cfser
