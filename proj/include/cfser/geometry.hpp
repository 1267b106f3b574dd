#pragma once

#include <cstdint>
#include <vector>

namespace cfser {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// AP/user placement on a wrap-around square. The vertical AP-user offset is
/// stored here and applied when 3-D distances are computed; same-plane links
/// (user-user, AP-AP) use a zero offset.
struct Deployment {
  double side_length = 0.0;  // m
  double height_diff = 0.0;  // m, APs above users
  std::vector<Point2> ap_positions;
  std::vector<Point2> user_positions;
  std::uint64_t rng_seed = 0;

  int num_aps() const { return static_cast<int>(ap_positions.size()); }
  int num_users() const { return static_cast<int>(user_positions.size()); }
};

/// Draws i.i.d. uniform positions on [0, side)^2 for all APs and users.
/// Throws std::invalid_argument on non-positive dimensions.
Deployment generate_deployment(int num_aps, int num_users, double side_length,
                               double height_diff, std::uint64_t seed);

/// Minimum planar distance between a and b over the nine toroidal shifts of b.
double wrap_distance_2d(const Point2& a, const Point2& b, double side);

/// 3-D distance: toroidal planar minimum first, then the vertical offset.
double wrap_distance(const Point2& a, const Point2& b, double side,
                     double height);

}  // namespace cfser
