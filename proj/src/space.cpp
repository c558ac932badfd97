#include "metsob/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace metsob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double euclid(const Coord& a, const Coord& b, int dim) {
  double s = 0;
  for (int d = 0; d < dim; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return std::sqrt(s);
}

double cross(const Coord& o, const Coord& a, const Coord& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

std::vector<Coord> convex_hull(std::vector<Coord> pts) {
  std::sort(pts.begin(), pts.end(), [](const Coord& a, const Coord& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Coord> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + m, v.end());
  return v[m];
}

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxx > 0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

// Region mass of the open balls B(center, radii[k]) for every k (radii ascending).
std::vector<double> mass_profile(const PointCloudSpace& space, std::size_t center, const std::vector<double>& radii,
                                 Region region = Region::Interior) {
  std::vector<double> bucket(radii.size() + 1, 0.0);
  for (std::size_t id : space.ids(region)) {
    const double d = space.dist(center, id);
    const std::size_t k = std::upper_bound(radii.begin(), radii.end(), d) - radii.begin();
    bucket[k] += space.weight(id);
  }
  std::vector<double> out(radii.size());
  double acc = 0;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    acc += bucket[k];
    out[k] = acc;
  }
  return out;
}

std::vector<double> sorted_radii(std::vector<double> radii) {
  require(!radii.empty(), ErrorCode::InvalidArgument, "probe schedule is empty");
  for (double r : radii) require(r > 0 && std::isfinite(r), ErrorCode::InvalidArgument, "probe radii must be positive");
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  return radii;
}

}  // namespace

PointCloudSpace::PointCloudSpace(int dim, std::vector<Point> points, std::vector<double> distance_matrix)
    : dim_(dim), points_(std::move(points)), dmat_(std::move(distance_matrix)) {
  require(dim_ == 2 || dim_ == 3, ErrorCode::InvalidArgument, "dimension must be 2 or 3");
  const std::size_t n = points_.size();
  local_.resize(n);
  coords_.resize(n * dim_);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = points_[i];
    require(p.weight > 0 && std::isfinite(p.weight), ErrorCode::InvalidArgument,
            "point " + std::to_string(i) + " has non-positive weight");
    for (int d = 0; d < dim_; ++d) {
      require(std::isfinite(p.x[d]), ErrorCode::InvalidArgument, "non-finite coordinate");
      coords_[i * dim_ + d] = p.x[d];
    }
    auto& list = ids_[idx(p.region)];
    local_[i] = list.size();
    list.push_back(i);
    total_mass_[idx(p.region)] += p.weight;
  }
  if (!dmat_.empty()) {
    require(dmat_.size() == n * n, ErrorCode::InvalidArgument, "distance matrix has wrong size");
    for (std::size_t i = 0; i < n; ++i) {
      require(dmat_[i * n + i] == 0, ErrorCode::InvalidArgument, "distance matrix diagonal must vanish");
      for (std::size_t j = i + 1; j < n; ++j) {
        const double a = dmat_[i * n + j];
        require(a >= 0 && std::isfinite(a) && a == dmat_[j * n + i], ErrorCode::InvalidArgument,
                "distance matrix must be symmetric and nonnegative");
      }
    }
  } else {
    for (int r = 0; r < 2; ++r) trees_[r] = KdTree(dim_, ids_[r], coords_);
  }

  for (Region r : {Region::Interior, Region::Boundary}) {
    diam_[idx(r)] = compute_diam(r);
    const auto& list = ids_[idx(r)];
    std::vector<double> nn(list.size());
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < list.size(); ++k) nn[k] = list.size() > 1 ? nearest(list[k], r).second : 0.0;
    spacing_[idx(r)] = median(nn);
    min_spacing_[idx(r)] = nn.empty() ? 0.0 : *std::min_element(nn.begin(), nn.end());
  }

  const auto& interior = ids_[0];
  const auto& boundary = ids_[1];
  dist_bd_.assign(interior.size(), kInf);
  nearest_bd_.assign(interior.size(), std::numeric_limits<std::size_t>::max());
  if (!boundary.empty()) {
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < interior.size(); ++k) {
      const auto [id, d] = nearest(interior[k], Region::Boundary);
      dist_bd_[k] = d;
      nearest_bd_[k] = id;
    }
  }
  if (!interior.empty()) {
    double worst = 0;
    for (std::size_t id : boundary) worst = std::max(worst, nearest(id, Region::Interior).second);
    adjacent_spacing_ = worst;
  }
}

const PointCloudSpace::Point& PointCloudSpace::point(std::size_t id) const {
  require(id < points_.size(), ErrorCode::NoSuchPoint, "no such point: " + std::to_string(id));
  return points_[id];
}

double PointCloudSpace::dist(std::size_t a, std::size_t b) const {
  if (!dmat_.empty()) return dmat_[a * points_.size() + b];
  return euclid(points_[a].x, points_[b].x, dim_);
}

double PointCloudSpace::dist(std::size_t a, const Coord& c) const {
  require(dmat_.empty(), ErrorCode::InvalidArgument, "coordinate centers need a Euclidean metric");
  return euclid(points_[a].x, c, dim_);
}

void PointCloudSpace::check_ball(const Ball& b) const {
  require(b.radius > 0, ErrorCode::InvalidArgument, "ball radius must be positive");
  if (b.center_id) {
    require(*b.center_id < points_.size(), ErrorCode::NoSuchPoint, "no such point: " + std::to_string(*b.center_id));
  } else {
    require(dmat_.empty(), ErrorCode::InvalidArgument, "coordinate centers need a Euclidean metric");
  }
}

std::vector<std::size_t> PointCloudSpace::ball_members(const Ball& b, Region region) const {
  std::vector<std::size_t> out;
  for_each_in_ball(b, region, [&](std::size_t id, double) { out.push_back(id); });
  std::sort(out.begin(), out.end());
  return out;
}

double PointCloudSpace::ball_mass(const Ball& b, Region region) const {
  // Summed in id order so the result does not depend on the tree layout.
  double m = 0;
  for (std::size_t id : ball_members(b, region)) m += points_[id].weight;
  return m;
}

std::pair<std::size_t, double> PointCloudSpace::nearest(std::size_t id, Region region) const {
  if (dmat_.empty()) return trees_[idx(region)].nearest(points_[id].x, id);
  std::size_t best = std::numeric_limits<std::size_t>::max();
  double bd = kInf;
  for (std::size_t o : ids_[idx(region)]) {
    if (o == id) continue;
    const double d = dmat_[id * points_.size() + o];
    if (d < bd) {
      bd = d;
      best = o;
    }
  }
  return {best, bd};
}

const std::vector<PairEntry>& PointCloudSpace::sorted_pairs(Region r) const {
  PairCache& cache = *pair_cache_;
  std::call_once(cache.once[idx(r)], [&] {
    const auto& list = ids_[idx(r)];
    const std::size_t n = list.size();
    auto& pairs = cache.pairs[idx(r)];
    pairs.reserve(n > 1 ? n * (n - 1) / 2 : 0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        pairs.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), dist(list[a], list[b])});
    std::sort(pairs.begin(), pairs.end(), [](const PairEntry& x, const PairEntry& y) {
      if (x.d != y.d) return x.d < y.d;
      return x.i != y.i ? x.i < y.i : x.j < y.j;
    });
  });
  return cache.pairs[idx(r)];
}

std::pair<std::size_t, double> PointCloudSpace::nearest_to(const Coord& c, Region region) const {
  require(dmat_.empty(), ErrorCode::InvalidArgument, "coordinate queries need a Euclidean metric");
  return trees_[idx(region)].nearest(c);
}

double PointCloudSpace::compute_diam(Region r) const {
  const auto& list = ids_[idx(r)];
  if (list.size() < 2) return 0.0;
  if (dmat_.empty() && dim_ == 2) {
    std::vector<Coord> pts;
    pts.reserve(list.size());
    for (std::size_t id : list) pts.push_back(points_[id].x);
    const auto hull = convex_hull(std::move(pts));
    double best = 0;
    for (std::size_t i = 0; i < hull.size(); ++i)
      for (std::size_t j = i + 1; j < hull.size(); ++j) best = std::max(best, euclid(hull[i], hull[j], 2));
    return best;
  }
  double best = 0;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : best)
  for (std::size_t i = 0; i < list.size(); ++i)
    for (std::size_t j = i + 1; j < list.size(); ++j) best = std::max(best, dist(list[i], list[j]));
  return best;
}

std::vector<double> default_probe_schedule(const PointCloudSpace& space, Region region) {
  std::vector<double> radii;
  const double diam = space.diam(region);
  const double h = space.spacing(region);
  if (!(diam > 0) || !(h > 0)) return radii;
  for (double r = 4 * h; r <= diam; r *= 2) radii.push_back(r);
  if (radii.empty()) radii.push_back(diam);
  return radii;
}

MassExponents estimate_mass_exponents(const PointCloudSpace& space, const std::vector<double>& probe, Region region) {
  require(space.count(region) >= 3, ErrorCode::InsufficientGeometry,
          "insufficient geometry: need at least three points in the region");
  const auto radii = sorted_radii(probe);
  const double diam = space.diam(region);
  // Doubling ratios need both r and 2r; lookup table holds both.
  std::vector<double> table = radii;
  for (double r : radii) table.push_back(2 * r);
  std::sort(table.begin(), table.end());
  table.erase(std::unique(table.begin(), table.end()), table.end());
  auto slot = [&](double r) { return std::lower_bound(table.begin(), table.end(), r) - table.begin(); };

  // Interior measure: centres sampled from the closure. Boundary measure: boundary centres.
  std::vector<std::size_t> pool;
  if (region == Region::Interior) {
    pool.resize(space.size());
    for (std::size_t id = 0; id < pool.size(); ++id) pool[id] = id;
  } else {
    pool = space.ids(Region::Boundary);
  }
  const std::size_t stride = std::max<std::size_t>(1, pool.size() / 400);
  std::vector<std::size_t> centers;
  for (std::size_t k = 0; k < pool.size(); k += stride) centers.push_back(pool[k]);

  std::vector<std::vector<double>> profiles(centers.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t c = 0; c < centers.size(); ++c) profiles[c] = mass_profile(space, centers[c], table, region);

  MassExponents out;
  double s = 0;
  bool any_fit = false;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    std::vector<double> xs, ys;
    for (double r : radii) {
      const double m = profiles[c][slot(r)];
      if (m > 0) {
        const double m2 = profiles[c][slot(2 * r)];
        out.c_dbl = std::max(out.c_dbl, m2 / m);
        if (r <= diam / 2) {
          xs.push_back(r);
          ys.push_back(m);
        }
      }
    }
    const double slope = loglog_slope(xs, ys);
    if (std::isfinite(slope)) {
      s = std::max(s, slope);
      any_fit = true;
    }
  }
  require(any_fit && s > 0, ErrorCode::InsufficientGeometry,
          "insufficient geometry: mass profile does not vary over the probe radii");
  out.s = std::ceil(s / 0.05 - 1e-9) * 0.05;
  out.c_s = kInf;
  for (std::size_t c = 0; c < centers.size(); ++c)
    for (double r : radii) {
      const double m = profiles[c][slot(r)];
      if (m > 0) out.c_s = std::min(out.c_s, m / std::pow(r, out.s));
    }
  return out;
}

CodimBounds estimate_codim_bounds(const PointCloudSpace& space, const std::vector<double>& probe) {
  require(space.count(Region::Boundary) > 0, ErrorCode::InvalidArgument, "empty boundary");
  require(space.count(Region::Interior) > 0, ErrorCode::InvalidArgument, "empty interior");
  const double diam_b = space.diam(Region::Boundary);
  std::vector<double> radii;
  for (double r : sorted_radii(probe))
    if (r < 2 * diam_b) radii.push_back(r);
  require(!radii.empty(), ErrorCode::InvalidArgument, "no probe radius below twice the boundary diameter");

  const auto& bd = space.ids(Region::Boundary);
  std::vector<std::vector<double>> mu(bd.size()), hm(bd.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < bd.size(); ++k) {
    mu[k] = mass_profile(space, bd[k], radii);
    hm[k] = mass_profile(space, bd[k], radii, Region::Boundary);
  }

  // Extremal ratios mu/H per radius over the centres that carry interior mass at
  // every fitted radius; the exponents are the slopes of the upper and lower envelopes.
  std::vector<std::size_t> fit;
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (radii[i] <= diam_b / 4) fit.push_back(i);
  require(fit.size() >= 2, ErrorCode::UnresolvableScale, "need two probe radii below a quarter of the boundary diameter");
  std::vector<double> xs, upper, lower;
  for (std::size_t i : fit) {
    double mx = 0, mn = kInf;
    for (std::size_t k = 0; k < bd.size(); ++k) {
      if (!(mu[k][fit.front()] > 0)) continue;
      const double v = mu[k][i] / hm[k][i];
      mx = std::max(mx, v);
      mn = std::min(mn, v);
    }
    if (mx > 0 && std::isfinite(mn)) {
      xs.push_back(radii[i]);
      upper.push_back(mx);
      lower.push_back(mn);
    }
  }
  const double lo = loglog_slope(xs, upper);
  const double hi = loglog_slope(xs, lower);
  CodimBounds out;
  out.vartheta = std::max(0.05, std::floor(lo / 0.05 + 1e-9) * 0.05);
  out.theta = std::max(out.vartheta, std::ceil(hi / 0.05 - 1e-9) * 0.05);
  out.c_vartheta = kInf;
  out.c_theta = 0;
  for (std::size_t k = 0; k < bd.size(); ++k)
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (!(mu[k][i] > 0)) continue;
      out.c_vartheta = std::min(out.c_vartheta, hm[k][i] * std::pow(radii[i], out.vartheta) / mu[k][i]);
      out.c_theta = std::max(out.c_theta, hm[k][i] * std::pow(radii[i], out.theta) / mu[k][i]);
    }
  return out;
}

double shell_mass(const PointCloudSpace& space, double rho) {
  require(rho > 0, ErrorCode::InvalidArgument, "shell width must be positive");
  double m = 0;
  const auto& ids = space.ids(Region::Interior);
  for (std::size_t k = 0; k < ids.size(); ++k)
    if (space.dist_to_boundary(k) < rho) m += space.weight(ids[k]);
  return m;
}

double codim_hausdorff(const PointCloudSpace& space, const std::vector<std::size_t>& subset, double theta,
                       double delta) {
  require(!subset.empty(), ErrorCode::InvalidArgument, "subset is empty");
  require(delta > 0, ErrorCode::InvalidArgument, "delta must be positive");
  for (std::size_t id : subset) {
    require(id < space.size(), ErrorCode::NoSuchPoint, "no such point: " + std::to_string(id));
    require(space.point(id).region == Region::Boundary, ErrorCode::InvalidArgument, "subset must be boundary points");
  }
  double min_gap = kInf;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    double nn = kInf;
    for (std::size_t b = 0; b < subset.size(); ++b)
      if (a != b) nn = std::min(nn, space.dist(subset[a], subset[b]));
    min_gap = std::min(min_gap, nn);
  }
  require(subset.size() == 1 || delta > min_gap, ErrorCode::UnresolvableScale,
          "unresolvable scale: delta is below the minimal spacing of the subset");

  // Each menu radius gets its own farthest-point cover; the cheapest wins.
  const double floor_r = 0.5 * space.spacing(Region::Interior);
  double best = kInf;
  for (double r = delta / 2; r >= floor_r && r > 0; r /= 2) {
    std::vector<double> gap(subset.size(), kInf);
    std::vector<bool> covered(subset.size(), false);
    double cost = 0;
    bool admissible = true;
    std::size_t next = 0;
    while (true) {
      const std::size_t c = subset[next];
      const double m = space.ball_mass(Ball::at(c, r), Region::Interior);
      if (!(m > 0)) {
        admissible = false;
        break;
      }
      cost += m / std::pow(r, theta);
      double far = -1;
      std::size_t far_k = 0;
      bool done = true;
      for (std::size_t k = 0; k < subset.size(); ++k) {
        const double d = space.dist(c, subset[k]);
        gap[k] = std::min(gap[k], d);
        if (d < r) covered[k] = true;
        if (!covered[k]) {
          done = false;
          if (gap[k] > far) {
            far = gap[k];
            far_k = k;
          }
        }
      }
      if (done) break;
      next = far_k;
    }
    if (admissible) best = std::min(best, cost);
  }
  require(std::isfinite(best), ErrorCode::UnresolvableScale,
          "unresolvable scale: no menu radius yields balls with positive interior mass");
  return best;
}

}  // namespace metsob
