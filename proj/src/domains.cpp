#include "metsob/domains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

namespace metsob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kSub = 8;

struct Geometry {
  double xmin, xmax;
  // Vertical extent of the domain above abscissa x.
  std::pair<double, double> (*column)(double x);
};

std::pair<double, double> square_column(double) { return {0.0, 1.0}; }
std::pair<double, double> cusp_column(double x) { return {0.0, x * x}; }
std::pair<double, double> disc_column(double x) {
  const double h = std::sqrt(std::max(0.0, 1 - x * x));
  return {-h, h};
}

Geometry geometry(DomainKind kind) {
  switch (kind) {
    case DomainKind::UnitSquare:
    case DomainKind::WeightedSquare:
      return {0, 1, square_column};
    case DomainKind::Cusp:
      return {0, 1, cusp_column};
    case DomainKind::WeightedDisc:
    case DomainKind::SharpnessDisc:
      return {-1, 1, disc_column};
  }
  fail(ErrorCode::InvalidArgument, "unknown domain kind");
}

double density(const DomainSpec& spec, double x, double y) {
  switch (spec.kind) {
    case DomainKind::UnitSquare:
    case DomainKind::Cusp:
      return 1.0;
    case DomainKind::WeightedSquare:
      return std::hypot(x, y);
    case DomainKind::WeightedDisc:
      return std::max(0.0, 1 - std::hypot(x, y));
    case DomainKind::SharpnessDisc:
      return std::pow(std::max(0.0, 1 - std::hypot(x, y)), sharpness_exponent(spec) - 1);
  }
  return 1.0;
}

bool strictly_inside(DomainKind kind, double x, double y) {
  const Geometry g = geometry(kind);
  if (!(x > g.xmin && x < g.xmax)) return false;
  const auto [a, b] = g.column(x);
  return y > a && y < b;
}

double parabola_arclength(double x) {
  // Arclength of y = t^2 on [0, x].
  const double s = std::sqrt(1 + 4 * x * x);
  return 0.5 * x * s + 0.25 * std::asinh(2 * x);
}

double parabola_at_arclength(double target) {
  double lo = 0, hi = 1;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (parabola_arclength(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void add_segment(std::vector<PointCloudSpace::Point>& out, Coord a, Coord b, int count) {
  const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
  for (int k = 0; k < count; ++k) {
    const double s = (k + 0.5) / count;
    out.push_back({{a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]), 0}, Region::Boundary, len / count});
  }
}

double dist_to_parabola(double a, double b) {
  // min over t in [0,1] of |(t, t^2) - (a, b)|, by scan plus Newton polish.
  auto f = [&](double t) { return (t - a) * (t - a) + (t * t - b) * (t * t - b); };
  double best_t = 0, best = f(0);
  constexpr int kScan = 256;
  for (int i = 1; i <= kScan; ++i) {
    const double t = static_cast<double>(i) / kScan;
    if (f(t) < best) {
      best = f(t);
      best_t = t;
    }
  }
  double t = best_t;
  for (int it = 0; it < 30; ++it) {
    const double g = 2 * (t - a) + 4 * t * (t * t - b);
    const double h = 2 + 12 * t * t - 4 * b;
    if (!(h > 0)) break;
    const double nt = std::clamp(t - g / h, 0.0, 1.0);
    if (std::abs(nt - t) < 1e-16) break;
    t = nt;
  }
  return std::sqrt(std::min(best, f(t)));
}

}  // namespace

DomainKind parse_domain_kind(const std::string& name) {
  if (name == "square" || name == "unit_square") return DomainKind::UnitSquare;
  if (name == "cusp") return DomainKind::Cusp;
  if (name == "weighted_square") return DomainKind::WeightedSquare;
  if (name == "weighted_disc") return DomainKind::WeightedDisc;
  if (name == "sharpness_disc") return DomainKind::SharpnessDisc;
  fail(ErrorCode::InvalidArgument, "unknown domain: " + name);
}

std::string domain_kind_name(DomainKind kind) {
  switch (kind) {
    case DomainKind::UnitSquare:
      return "square";
    case DomainKind::Cusp:
      return "cusp";
    case DomainKind::WeightedSquare:
      return "weighted_square";
    case DomainKind::WeightedDisc:
      return "weighted_disc";
    case DomainKind::SharpnessDisc:
      return "sharpness_disc";
  }
  return "unknown";
}

int sharpness_exponent(const DomainSpec& spec) {
  if (spec.n > 0) return spec.n;
  require(spec.eps > 0, ErrorCode::InvalidArgument, "eps must be positive");
  return std::max(2, static_cast<int>(std::ceil(2 / spec.eps - 1e-12)));
}

PointCloudSpace generate(const DomainSpec& spec) {
  require(spec.resolution >= 8, ErrorCode::InvalidArgument,
          "resolution too low: at least 8 cells per unit length are needed to resolve the domain");
  if (spec.kind == DomainKind::WeightedDisc || spec.kind == DomainKind::SharpnessDisc)
    require(spec.eps > 0 && spec.eps < 1, ErrorCode::InvalidArgument, "eps must lie in (0,1)");
  const int bres = spec.boundary_resolution > 0 ? spec.boundary_resolution : spec.resolution;
  require(bres >= 1, ErrorCode::InvalidArgument, "boundary resolution must be positive");

  const Geometry g = geometry(spec.kind);
  const double h = 1.0 / spec.resolution;
  const int cells = static_cast<int>(std::lround((g.xmax - g.xmin) * spec.resolution));
  const double ymin = spec.kind == DomainKind::WeightedDisc || spec.kind == DomainKind::SharpnessDisc ? -1.0 : 0.0;
  std::vector<PointCloudSpace::Point> pts;

  // Each cell is integrated column by column against the exact vertical extent,
  // so thin slivers (cusp tip, disc rim) keep their true mass.
  for (int i = 0; i < cells; ++i) {
    for (int j = 0; j < cells; ++j) {
      const double x0 = g.xmin + i * h, y0 = ymin + j * h;
      double mass = 0, mx = 0, my = 0, heaviest = 0;
      Coord heavy{};
      for (int a = 0; a < kSub; ++a) {
        const double x = x0 + (a + 0.5) * h / kSub;
        const auto [lo_d, hi_d] = g.column(x);
        const double lo = std::max(lo_d, y0), hi = std::min(hi_d, y0 + h);
        if (!(hi > lo)) continue;
        const double dy = (hi - lo) / kSub;
        for (int b = 0; b < kSub; ++b) {
          const double y = lo + (b + 0.5) * dy;
          const double w = (h / kSub) * dy * density(spec, x, y);
          mass += w;
          mx += w * x;
          my += w * y;
          if (w > heaviest) {
            heaviest = w;
            heavy = {x, y, 0};
          }
        }
      }
      if (!(mass > 0)) continue;
      Coord c{mx / mass, my / mass, 0};
      if (!strictly_inside(spec.kind, c[0], c[1])) c = heavy;
      pts.push_back({c, Region::Interior, mass});
    }
  }

  switch (spec.kind) {
    case DomainKind::UnitSquare:
    case DomainKind::WeightedSquare:
      add_segment(pts, {0, 0, 0}, {1, 0, 0}, bres);
      add_segment(pts, {1, 0, 0}, {1, 1, 0}, bres);
      add_segment(pts, {1, 1, 0}, {0, 1, 0}, bres);
      add_segment(pts, {0, 1, 0}, {0, 0, 0}, bres);
      break;
    case DomainKind::Cusp: {
      add_segment(pts, {0, 0, 0}, {1, 0, 0}, bres);
      add_segment(pts, {1, 0, 0}, {1, 1, 0}, bres);
      const double total = parabola_arclength(1.0);
      const int count = static_cast<int>(std::ceil(total * bres));
      for (int k = 0; k < count; ++k) {
        const double x = parabola_at_arclength((k + 0.5) * total / count);
        pts.push_back({{x, x * x, 0}, Region::Boundary, total / count});
      }
      break;
    }
    case DomainKind::WeightedDisc:
    case DomainKind::SharpnessDisc: {
      const int count = static_cast<int>(std::ceil(2 * std::numbers::pi * bres));
      for (int k = 0; k < count; ++k) {
        const double a = 2 * std::numbers::pi * (k + 0.5) / count;
        pts.push_back({{std::cos(a), std::sin(a), 0}, Region::Boundary, 2 * std::numbers::pi / count});
      }
      break;
    }
  }
  return PointCloudSpace(2, std::move(pts));
}

double analytic_boundary_distance(DomainKind kind, const Coord& x) {
  switch (kind) {
    case DomainKind::UnitSquare:
    case DomainKind::WeightedSquare:
      return std::max(0.0, std::min({x[0], 1 - x[0], x[1], 1 - x[1]}));
    case DomainKind::Cusp:
      return std::max(0.0, std::min({x[1], 1 - x[0], dist_to_parabola(x[0], x[1])}));
    case DomainKind::WeightedDisc:
    case DomainKind::SharpnessDisc:
      return std::max(0.0, 1 - std::hypot(x[0], x[1]));
  }
  return 0;
}

double analytic_interior_mass(const DomainSpec& spec) {
  switch (spec.kind) {
    case DomainKind::UnitSquare:
      return 1.0;
    case DomainKind::Cusp:
      return 1.0 / 3.0;
    case DomainKind::WeightedSquare:
      return (std::sqrt(2.0) + std::log(1 + std::sqrt(2.0))) / 3.0;
    case DomainKind::WeightedDisc:
      return std::numbers::pi / 3.0;
    case DomainKind::SharpnessDisc: {
      const double n = sharpness_exponent(spec);
      return 2 * std::numbers::pi / (n * (n + 1));
    }
  }
  return 0;
}

double analytic_boundary_length(DomainKind kind) {
  switch (kind) {
    case DomainKind::UnitSquare:
    case DomainKind::WeightedSquare:
      return 4.0;
    case DomainKind::Cusp:
      return 2.0 + parabola_arclength(1.0);
    case DomainKind::WeightedDisc:
    case DomainKind::SharpnessDisc:
      return 2 * std::numbers::pi;
  }
  return 0;
}

CurveGraph::CurveGraph(const PointCloudSpace& space) : space_(&space) {
  const auto& ids = space.ids(Region::Interior);
  require(!ids.empty(), ErrorCode::InvalidArgument, "interior is empty");
  radius_ = 2 * space.spacing(Region::Interior);
  if (!(radius_ > 0)) radius_ = std::max(space.diam(Region::Interior), 1e-300) * 2;
  offsets_.assign(ids.size() + 1, 0);
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(ids.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t k = 0; k < ids.size(); ++k) {
    space.for_each_in_ball(Ball::at(ids[k], radius_), Region::Interior, [&](std::size_t id, double d) {
      if (id != ids[k]) adj[k].push_back({space.local(id), d});
    });
    std::sort(adj[k].begin(), adj[k].end());
  }
  for (std::size_t k = 0; k < ids.size(); ++k) offsets_[k + 1] = offsets_[k] + adj[k].size();
  nbr_.resize(offsets_.back());
  len_.resize(offsets_.back());
  for (std::size_t k = 0; k < ids.size(); ++k)
    for (std::size_t e = 0; e < adj[k].size(); ++e) {
      nbr_[offsets_[k] + e] = adj[k][e].first;
      len_[offsets_[k] + e] = adj[k][e].second;
    }
  // Connectivity by breadth-first search from the first point.
  std::vector<char> seen(ids.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t e = offsets_[v]; e < offsets_[v + 1]; ++e)
      if (!seen[nbr_[e]]) {
        seen[nbr_[e]] = 1;
        ++reached;
        stack.push_back(nbr_[e]);
      }
  }
  require(reached == ids.size(), ErrorCode::NotConnected, "not connected at this resolution");
}

CurveGraph::Tree CurveGraph::tree(std::size_t root, PathMetric metric) const {
  const std::size_t n = size();
  require(root < n, ErrorCode::NoSuchPoint, "no such interior point");
  Tree t;
  t.root = root;
  t.parent.assign(n, root);
  t.length.assign(n, kInf);
  t.order.reserve(n);
  std::vector<double> cost(n, kInf);
  std::vector<char> done(n, 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  cost[root] = 0;
  t.length[root] = 0;
  pq.push({0, root});
  while (!pq.empty()) {
    const auto [c, v] = pq.top();
    pq.pop();
    if (done[v]) continue;
    done[v] = 1;
    t.order.push_back(v);
    const double dv = space_->dist_to_boundary(v);
    for (std::size_t e = offsets_[v]; e < offsets_[v + 1]; ++e) {
      const std::size_t w = nbr_[e];
      if (done[w]) continue;
      double step = len_[e];
      if (metric == PathMetric::QuasiHyperbolic) step = len_[e] * 2 / (dv + space_->dist_to_boundary(w));
      const double nc = c + step;
      if (nc < cost[w] || (nc == cost[w] && v < t.parent[w])) {
        cost[w] = nc;
        t.parent[w] = v;
        t.length[w] = t.length[v] + len_[e];
        pq.push({nc, w});
      }
    }
  }
  return t;
}

std::vector<std::size_t> CurveGraph::path_to_root(const Tree& t, std::size_t from) {
  std::vector<std::size_t> path{from};
  while (path.back() != t.root) path.push_back(t.parent[path.back()]);
  return path;
}

std::vector<double> default_constant_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 19; ++k) g.push_back(0.05 * k);
  return g;
}

std::size_t deepest_interior_point(const PointCloudSpace& space) {
  const auto& ids = space.ids(Region::Interior);
  require(!ids.empty(), ErrorCode::InvalidArgument, "interior is empty");
  std::size_t best = 0;
  for (std::size_t k = 1; k < ids.size(); ++k)
    if (space.dist_to_boundary(k) > space.dist_to_boundary(best)) best = k;
  return ids[best];
}

GeometryCheck john_check(const PointCloudSpace& space, std::size_t center_id, const std::vector<double>& c_grid) {
  require(center_id < space.size(), ErrorCode::NoSuchPoint, "no such point: " + std::to_string(center_id));
  require(space.point(center_id).region == Region::Interior, ErrorCode::InvalidArgument, "John center must be interior");
  require(!c_grid.empty(), ErrorCode::InvalidArgument, "empty candidate grid");
  const CurveGraph graph(space);
  const std::size_t root = space.local(center_id);
  const CurveGraph::Tree trees[2] = {graph.tree(root, PathMetric::Euclidean),
                                     graph.tree(root, PathMetric::QuasiHyperbolic)};
  std::vector<double> grid = c_grid;
  std::sort(grid.begin(), grid.end());

  const std::size_t n = graph.size();
  auto passes = [&](double c) {
    std::vector<char> ok(n, 0);
    std::vector<double> m(n);
    for (const auto& t : trees) {
      // m(x) = min over the path from x to the root of L(v) + dist(v)/c; the
      // condition dist(v) >= c (L(x) - L(v)) along the path is L(x) <= m(x).
      for (std::size_t v : t.order) {
        const double own = t.length[v] + space.dist_to_boundary(v) / c;
        m[v] = v == t.root ? own : std::min(m[t.parent[v]], own);
        if (t.length[v] <= m[v] * (1 + 1e-12)) ok[v] = 1;
      }
    }
    return std::all_of(ok.begin(), ok.end(), [](char b) { return b != 0; });
  };

  GeometryCheck out;
  for (double c : grid) {
    if (!passes(c)) break;
    out.ok = true;
    out.best_c = c;
  }
  return out;
}

GeometryCheck uniform_check(const PointCloudSpace& space, const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                            const std::vector<double>& c_grid) {
  require(!c_grid.empty(), ErrorCode::InvalidArgument, "empty candidate grid");
  std::vector<double> grid = c_grid;
  std::sort(grid.begin(), grid.end());
  for (const auto& [a, b] : pairs) {
    for (std::size_t id : {a, b}) {
      require(id < space.size(), ErrorCode::NoSuchPoint, "no such point: " + std::to_string(id));
      require(space.point(id).region == Region::Interior, ErrorCode::InvalidArgument, "pairs must be interior points");
    }
  }
  bool any = false;
  for (const auto& [a, b] : pairs) any = any || a != b;
  GeometryCheck out;
  if (!any) {
    out.ok = true;
    out.best_c = grid.back();
    return out;
  }
  const CurveGraph graph(space);
  double worst = kInf;
  for (const auto& [a, b] : pairs) {
    if (a == b) continue;
    const double d = space.dist(a, b);
    double pair_best = 0;
    for (PathMetric metric : {PathMetric::Euclidean, PathMetric::QuasiHyperbolic}) {
      const auto t = graph.tree(space.local(a), metric);
      const auto path = CurveGraph::path_to_root(t, space.local(b));
      const double l = t.length[space.local(b)];
      double c = d / l;
      for (std::size_t v : path) {
        const double s = t.length[v];
        const double reach = std::min(s, l - s);
        if (reach > 0) c = std::min(c, space.dist_to_boundary(v) / reach);
      }
      pair_best = std::max(pair_best, c);
    }
    worst = std::min(worst, pair_best);
  }
  for (double c : grid) {
    if (c > worst * (1 + 1e-12)) break;
    out.ok = true;
    out.best_c = c;
  }
  return out;
}

namespace {

struct Polyline {
  std::vector<Coord> pts;
  std::vector<double> s;  // cumulative arclength

  Coord at(double t) const {
    if (t >= s.back()) return pts.back();
    const std::size_t k = std::upper_bound(s.begin(), s.end(), t) - s.begin();
    const double seg = s[k] - s[k - 1];
    const double w = seg > 0 ? (t - s[k - 1]) / seg : 0;
    Coord c{};
    for (int d = 0; d < 3; ++d) c[d] = pts[k - 1][d] + w * (pts[k][d] - pts[k - 1][d]);
    return c;
  }
};

Polyline john_curve(const PointCloudSpace& space, const CurveGraph::Tree& tree, std::size_t boundary_id) {
  Polyline p;
  p.pts.push_back(space.point(boundary_id).x);
  p.s.push_back(0);
  const std::size_t start = space.local(space.nearest(boundary_id, Region::Interior).first);
  for (std::size_t v : CurveGraph::path_to_root(tree, start)) {
    const Coord& c = space.point(space.global(Region::Interior, v)).x;
    const Coord& prev = p.pts.back();
    p.s.push_back(p.s.back() + std::hypot(c[0] - prev[0], c[1] - prev[1], c[2] - prev[2]));
    p.pts.push_back(c);
  }
  return p;
}

}  // namespace

Chain build_chain(const PointCloudSpace& space, std::size_t z, std::size_t y, double c_j, double lambda) {
  return build_chain(space, z, y, c_j, lambda, deepest_interior_point(space));
}

Chain build_chain(const PointCloudSpace& space, std::size_t z, std::size_t y, double c_j, double lambda,
                  std::size_t center_id) {
  require(!space.has_distance_matrix(), ErrorCode::InvalidArgument, "chains need a Euclidean metric");
  for (std::size_t id : {z, y}) {
    require(id < space.size(), ErrorCode::NoSuchPoint, "no such point: " + std::to_string(id));
    require(space.point(id).region == Region::Boundary, ErrorCode::InvalidArgument, "chain endpoints must be boundary points");
  }
  require(z != y, ErrorCode::InvalidArgument, "chain endpoints must differ");
  require(c_j > 0 && c_j <= 1, ErrorCode::InvalidArgument, "John constant must lie in (0,1]");
  require(lambda >= 1, ErrorCode::InvalidArgument, "dilation must be at least 1");
  require(space.point(center_id).region == Region::Interior, ErrorCode::InvalidArgument, "John center must be interior");

  const CurveGraph graph(space);
  const double d = space.dist(z, y);
  const double q = 1 - c_j / (2 * lambda);
  const double floor_r = 2 * space.spacing(Region::Interior);

  Chain chain;
  chain.z = z;
  chain.y = y;
  chain.john_constant = c_j;
  chain.lambda = lambda;

  // One side of the chain; returns false when the curve violates the John bound.
  auto side = [&](const Polyline& curve, int sign, std::vector<ChainBall>& out) {
    out.clear();
    for (int k = 1;; ++k) {
      const double t = d * std::pow(q, k);
      const double r = c_j / (2 * lambda) * t;
      if (r < floor_r) break;
      const Coord c = curve.at(t);
      if (space.nearest_to(c, Region::Boundary).second < c_j * t) return false;
      out.push_back({sign * k, c, r, t});
    }
    return true;
  };

  std::vector<ChainBall> zs, ys;
  bool found = false;
  for (PathMetric metric : {PathMetric::QuasiHyperbolic, PathMetric::Euclidean}) {
    const auto tree = graph.tree(space.local(center_id), metric);
    if (side(john_curve(space, tree, z), 1, zs) && side(john_curve(space, tree, y), -1, ys)) {
      found = true;
      break;
    }
  }
  require(found, ErrorCode::NoAdmissibleCurve, "no admissible curve at this resolution for the requested John constant");
  for (auto it = ys.rbegin(); it != ys.rend(); ++it) chain.balls.push_back(*it);
  chain.balls.push_back({0, space.point(z).x, 3 * d, 0});
  for (const auto& b : zs) chain.balls.push_back(b);
  return chain;
}

ChainCheck verify_chain(const PointCloudSpace& space, const Chain& chain) {
  ChainCheck out;
  const double alpha = chain.alpha();
  const double beta = chain.beta();
  const double lambda = chain.lambda;
  const double c_j = chain.john_constant;
  const double dzy = space.dist(chain.z, chain.y);
  constexpr double kTol = 1e-12;

  for (std::size_t i = 0; i < chain.balls.size(); ++i) {
    const ChainBall& b = chain.balls[i];
    if (b.k == 0) continue;
    const std::size_t tip = b.k > 0 ? chain.z : chain.y;
    // Containment of the next ball further from B_0 on the same side.
    const std::size_t j = b.k > 0 ? i + 1 : i - 1;
    if (b.k > 0 ? j < chain.balls.size() : i > 0) {
      const ChainBall& nb = chain.balls[j];
      if (nb.k != 0 && (nb.k > 0) == (b.k > 0)) {
        space.for_each_in_ball(Ball::at(nb.center, nb.radius), Region::Interior, [&](std::size_t id, double) {
          const double ratio = space.dist(id, b.center) / (alpha * b.radius) - 1;
          out.worst_containment = std::max(out.worst_containment, ratio);
          if (ratio >= kTol) out.containment = false;
        });
      }
    }
    space.for_each_in_ball(Ball::at(b.center, alpha * lambda * b.radius), Region::Interior, [&](std::size_t id, double) {
      const double dxz = space.dist(id, tip);
      const double lo = dxz / (lambda * (alpha + 2 / c_j));
      const double hi = 2 * dxz / c_j;
      const double sw = std::max(lo / b.radius - 1, b.radius / hi - 1);
      out.worst_sandwich = std::max(out.worst_sandwich, sw);
      if (sw > kTol) out.sandwich = false;
      const double dist = space.dist_to_boundary(space.local(id));
      const double cv = std::max(beta * dxz / dist - 1, dist / (2 * dzy) - 1);
      out.worst_carrot = std::max(out.worst_carrot, cv);
      if (cv > kTol) out.carrot = false;
    });
  }
  return out;
}

}  // namespace metsob
