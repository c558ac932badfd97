#include "metsob/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace metsob {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

std::vector<std::size_t> ball_index_by_center(const PointCloudSpace& space, const WhitneyCover& cover) {
  std::vector<std::size_t> by_center(space.size(), kNone);
  for (std::size_t b = 0; b < cover.balls.size(); ++b) by_center[cover.balls[b].center] = b;
  return by_center;
}

// Any ball whose double contains x has its centre within dist(x)/3 of x, since
// the distance to the boundary set is 1-Lipschitz.
template <class F>
void for_each_double_ball(const PointCloudSpace& space, const WhitneyCover& cover,
                          const std::vector<std::size_t>& by_center, std::size_t x, F&& fn) {
  const double dx = space.dist_to_boundary(space.local(x));
  const double reach = dx / 3 * (1 + 1e-9) + 1e-300;
  space.for_each_in_ball(Ball::at(x, reach), Region::Interior, [&](std::size_t id, double d) {
    const std::size_t b = by_center[id];
    if (b != kNone && d < 2 * cover.balls[b].radius) fn(b, d);
  });
}

SparseWeights weights_at(const PointCloudSpace& space, const WhitneyCover& cover,
                         const std::vector<std::size_t>& by_center, std::size_t x) {
  SparseWeights w;
  double sum = 0;
  for_each_double_ball(space, cover, by_center, x, [&](std::size_t b, double d) {
    const double r = cover.balls[b].radius;
    const double eta = std::clamp((2 * r - d) / r, 0.0, 1.0);
    if (eta > 0) {
      w.push_back({b, eta});
      sum += eta;
    }
  });
  require(sum > 0, ErrorCode::Internal, "interior point outside every doubled Whitney ball");
  std::sort(w.begin(), w.end());
  for (auto& e : w) e.second /= sum;
  return w;
}

}  // namespace

int dyadic_level(double r) {
  require(r > 0 && std::isfinite(r), ErrorCode::InvalidArgument, "radius must be positive");
  int j = static_cast<int>(std::ceil(std::log2(r)));
  while (std::ldexp(1.0, j) < r) ++j;
  while (std::ldexp(1.0, j - 1) >= r) --j;
  return j;
}

WhitneyCover build_cover(const PointCloudSpace& space) {
  require(space.count(Region::Interior) > 0 && space.count(Region::Boundary) > 0, ErrorCode::InvalidArgument,
          "Whitney cover needs interior and boundary points");
  const auto& in = space.ids(Region::Interior);
  const std::size_t n = in.size();
  std::vector<double> radius(n);
  std::map<int, std::vector<std::size_t>, std::greater<>> by_level;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = space.dist_to_boundary(k);
    require(d > 0, ErrorCode::ZeroDistance, "zero distance to boundary at interior point " + std::to_string(in[k]));
    radius[k] = d / 8;
    by_level[dyadic_level(radius[k])].push_back(k);
  }

  WhitneyCover cover;
  cover.j0 = by_level.begin()->first;
  std::vector<char> selected(n, 0);
  for (const auto& [level, members] : by_level) {
    std::vector<std::size_t> chosen;
    for (std::size_t k : members) {
      bool covered = false;
      space.for_each_in_ball(Ball::at(in[k], std::ldexp(1.0, level)), Region::Interior, [&](std::size_t id, double d) {
        const std::size_t li = space.local(id);
        if (selected[li] && d < radius[li]) covered = true;
      });
      if (covered) continue;
      selected[k] = 1;
      chosen.push_back(k);
      cover.balls.push_back({in[k], radius[k], level, space.nearest_boundary(k)});
    }
    for (std::size_t k : chosen) selected[k] = 0;
  }

  const auto by_center = ball_index_by_center(space, cover);
  std::size_t worst = 0;
#pragma omp parallel for schedule(dynamic, 64) reduction(max : worst)
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t c = 0;
    for_each_double_ball(space, cover, by_center, in[k], [&](std::size_t, double) { ++c; });
    worst = std::max(worst, c);
  }
  cover.overlap_bound = worst;
  return cover;
}

WhitneyCheck check_cover(const PointCloudSpace& space, const WhitneyCover& cover, std::size_t overlap_limit) {
  WhitneyCheck chk;
  const auto& in = space.ids(Region::Interior);
  const auto& bd = space.ids(Region::Boundary);
  const auto& balls = cover.balls;
  const std::size_t nb = balls.size();
  if (overlap_limit == 0) overlap_limit = cover.overlap_bound;

  for (const auto& b : balls) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = kNone;
    for (std::size_t z : bd) {
      const double d = space.dist(b.center, z);
      if (d < best) {
        best = d;
        arg = z;
      }
    }
    const double err = std::abs(b.radius - best / 8) / (best / 8);
    chk.worst_radius_error = std::max(chk.worst_radius_error, err);
    if (err > 1e-12) chk.radius_ok = false;
    if (!(std::ldexp(1.0, b.level - 1) < b.radius && b.radius <= std::ldexp(1.0, b.level))) chk.level_ok = false;
    if (b.anchor != arg) chk.anchor_ok = false;
  }

  std::size_t uncovered = 0, overlap = 0;
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : uncovered) reduction(max : overlap)
  for (std::size_t k = 0; k < in.size(); ++k) {
    bool covered = false;
    std::size_t c = 0;
    for (const auto& b : balls) {
      const double d = space.dist(in[k], b.center);
      covered = covered || d < b.radius;
      c += d < 2 * b.radius;
    }
    uncovered += !covered;
    overlap = std::max(overlap, c);
  }
  chk.uncovered = uncovered;
  chk.coverage_ok = uncovered == 0;
  chk.measured_overlap = overlap;
  chk.overlap_ok = overlap <= overlap_limit;

  std::size_t clashes = 0;
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : clashes)
  for (std::size_t a = 0; a < nb; ++a)
    for (std::size_t b = 0; b < nb; ++b)
      if (balls[b].level == balls[a].level + 2 &&
          space.dist(balls[a].center, balls[b].center) < balls[a].radius + balls[b].radius)
        ++clashes;
  chk.intersecting_pairs = clashes;
  chk.disjoint_ok = clashes == 0;

  if (chk.coverage_ok) {
    const PartitionOfUnity pu(space, cover);
    for (std::size_t k = 0; k < in.size(); ++k) {
      double s = 0;
      for (const auto& [b, w] : pu.row(k)) {
        s += w;
        if (!(space.dist(in[k], balls[b].center) < 2 * balls[b].radius) || w < 0) chk.partition_ok = false;
      }
      chk.worst_partition_error = std::max(chk.worst_partition_error, std::abs(s - 1));
    }
    if (chk.worst_partition_error > 1e-12) chk.partition_ok = false;
  } else {
    chk.partition_ok = false;
  }
  return chk;
}

SparseWeights partition_of_unity(const PointCloudSpace& space, const WhitneyCover& cover, std::size_t interior_id) {
  require(interior_id < space.size() && space.point(interior_id).region == Region::Interior, ErrorCode::NoSuchPoint,
          "no such interior point: " + std::to_string(interior_id));
  return weights_at(space, cover, ball_index_by_center(space, cover), interior_id);
}

PartitionOfUnity::PartitionOfUnity(const PointCloudSpace& space, const WhitneyCover& cover)
    : rows_(space.count(Region::Interior)), n_balls_(cover.balls.size()) {
  const auto by_center = ball_index_by_center(space, cover);
  const auto& in = space.ids(Region::Interior);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t k = 0; k < in.size(); ++k) rows_[k] = weights_at(space, cover, by_center, in[k]);
}

std::vector<double> PartitionOfUnity::column(std::size_t ball) const {
  require(ball < n_balls_, ErrorCode::InvalidArgument, "ball index out of range");
  std::vector<double> out(rows_.size(), 0.0);
  for (std::size_t k = 0; k < rows_.size(); ++k)
    for (const auto& [b, w] : rows_[k])
      if (b == ball) out[k] = w;
  return out;
}

std::vector<std::size_t> boundary_patch(const PointCloudSpace& space, const WhitneyCover& cover, std::size_t ball,
                                        double expansion) {
  require(ball < cover.balls.size(), ErrorCode::InvalidArgument, "ball index out of range");
  require(expansion == 1 || expansion == 64, ErrorCode::InvalidArgument, "expansion must be 1 or 64");
  const auto& b = cover.balls[ball];
  auto ids = space.ball_members(Ball::at(b.anchor, expansion * b.radius), Region::Boundary);
  require(!ids.empty(), ErrorCode::EmptyPatch, "boundary resolution too coarse for this ball");
  return ids;
}

}  // namespace metsob
