#include "metsob/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "metsob/error.hpp"
#include "metsob/extension.hpp"
#include "metsob/functionals.hpp"
#include "metsob/trace.hpp"
#include "metsob/whitney.hpp"

namespace metsob {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

constexpr double kE = std::numbers::e;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Check le(const std::string& name, double v, double bound) {
  Check c{name, v, bound, 0, "<=", false};
  c.pass = std::isfinite(v) && v <= bound;
  return c;
}

Check ge(const std::string& name, double v, double bound) {
  Check c{name, v, bound, 0, ">=", false};
  c.pass = !std::isnan(v) && v >= bound;
  return c;
}

Check within(const std::string& name, double v, double lo, double hi) {
  Check c{name, v, hi, lo, "in", false};
  c.pass = std::isfinite(v) && v >= lo && v <= hi;
  return c;
}

Check from_comparison(const Comparison& cmp) {
  if (cmp.two_sided) return within(cmp.name, cmp.measured, cmp.frozen / cmp.factor, cmp.frozen * cmp.factor);
  return le(cmp.name, cmp.measured, cmp.frozen * cmp.factor);
}

double rel_change(double a, double b) { return std::abs(b - a) / std::max(std::abs(a), 1e-300); }

PointCloudSpace make_domain(DomainKind kind, int res, double eps = 0.25, int n = 0) {
  DomainSpec s;
  s.kind = kind;
  s.resolution = res;
  s.eps = eps;
  s.n = n;
  return generate(s);
}

std::string res_label(int res) { return std::to_string(res); }

// ---- corpus ---------------------------------------------------------------

struct Box {
  Coord lo{}, hi{};
  double extent = 1;
};

Box bounding_box(const PointCloudSpace& space, Region region) {
  Box b;
  const int dim = space.dim();
  for (int c = 0; c < dim; ++c) {
    b.lo[c] = kInfinity;
    b.hi[c] = -kInfinity;
  }
  for (std::size_t id : space.ids(region))
    for (int c = 0; c < dim; ++c) {
      b.lo[c] = std::min(b.lo[c], space.point(id).x[c]);
      b.hi[c] = std::max(b.hi[c], space.point(id).x[c]);
    }
  b.extent = 0;
  for (int c = 0; c < dim; ++c) b.extent = std::max(b.extent, b.hi[c] - b.lo[c]);
  if (b.extent <= 0) b.extent = 1;
  return b;
}

double dot(const Coord& a, const Coord& b, int dim) {
  double s = 0;
  for (int c = 0; c < dim; ++c) s += a[c] * b[c];
  return s;
}

double euclid(const Coord& a, const Coord& b, int dim) {
  double s = 0;
  for (int c = 0; c < dim; ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
  return std::sqrt(s);
}

Coord random_point(const Box& b, int dim, Rng& rng) {
  Coord x{};
  for (int c = 0; c < dim; ++c) x[c] = rng.uniform(b.lo[c], b.hi[c]);
  return x;
}

}  // namespace

const char* field_family_name(FieldFamily f) {
  switch (f) {
    case FieldFamily::Fourier:
      return "fourier";
    case FieldFamily::Jump:
      return "jump";
    case FieldFamily::Cone:
      return "cone";
    case FieldFamily::Power:
      return "power";
    case FieldFamily::Noise:
      return "noise";
  }
  return "?";
}

std::vector<FieldFamily> all_families() {
  return {FieldFamily::Fourier, FieldFamily::Jump, FieldFamily::Cone, FieldFamily::Power, FieldFamily::Noise};
}

std::vector<FieldFamily> lipschitz_families() { return {FieldFamily::Fourier, FieldFamily::Cone}; }

ScalarField random_field(const PointCloudSpace& space, Region region, FieldFamily family, Rng& rng) {
  require(space.count(region) > 0, ErrorCode::InvalidArgument,
          std::string("cannot build a field on the empty ") + region_name(region));
  const int dim = space.dim();
  const Box box = bounding_box(space, region);
  switch (family) {
    case FieldFamily::Fourier: {
      struct Term {
        Coord k;
        double a, phase;
      };
      std::vector<Term> terms(4);
      for (auto& t : terms) {
        double norm2 = 0;
        while (norm2 == 0) {
          for (int c = 0; c < dim; ++c) {
            t.k[c] = rng.integer(-3, 3);
            norm2 += t.k[c] * t.k[c];
          }
        }
        t.a = rng.normal() / (1 + std::sqrt(norm2));
        t.phase = rng.uniform(0, 2 * std::numbers::pi);
      }
      return sample(space, region, [&](const Coord& x) {
        double v = 0;
        for (const auto& t : terms) {
          double arg = t.phase;
          for (int c = 0; c < dim; ++c) arg += 2 * std::numbers::pi * t.k[c] * (x[c] - box.lo[c]) / box.extent;
          v += t.a * std::sin(arg);
        }
        return v;
      });
    }
    case FieldFamily::Jump: {
      Coord n{};
      double len = 0;
      while (len < 1e-6) {
        len = 0;
        for (int c = 0; c < dim; ++c) {
          n[c] = rng.normal();
          len += n[c] * n[c];
        }
        len = std::sqrt(len);
      }
      for (int c = 0; c < dim; ++c) n[c] /= len;
      double lo = kInfinity, hi = -kInfinity;
      for (std::size_t id : space.ids(region)) {
        const double s = dot(n, space.point(id).x, dim);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      const double cut = rng.uniform(lo + 0.25 * (hi - lo), hi - 0.25 * (hi - lo));
      const double base = rng.normal(), step = rng.normal();
      return sample(space, region, [&](const Coord& x) { return base + (dot(n, x, dim) > cut ? step : 0.0); });
    }
    case FieldFamily::Cone: {
      struct Tip {
        Coord c;
        double radius, a;
      };
      std::vector<Tip> tips(3);
      for (auto& t : tips) {
        t.c = random_point(box, dim, rng);
        t.radius = rng.uniform(0.2, 0.8) * box.extent;
        t.a = rng.normal();
      }
      return sample(space, region, [&](const Coord& x) {
        double v = 0;
        for (const auto& t : tips) v += t.a * std::max(0.0, 1 - euclid(x, t.c, dim) / t.radius);
        return v;
      });
    }
    case FieldFamily::Power: {
      const Coord c = random_point(box, dim, rng);
      const double gamma = rng.uniform(0.3, 1.0);
      const double a = rng.normal();
      return sample(space, region, [&](const Coord& x) { return a * std::pow(euclid(x, c, dim) / box.extent, gamma); });
    }
    case FieldFamily::Noise: {
      ScalarField f{region, std::vector<double>(space.count(region))};
      for (double& v : f.values) v = rng.normal();
      return f;
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown field family");
}

std::vector<ScalarField> field_corpus(const PointCloudSpace& space, Region region, std::size_t count,
                                      std::uint64_t seed, const std::vector<FieldFamily>& families) {
  require(count > 0, ErrorCode::InvalidArgument, "empty corpus");
  require(!families.empty(), ErrorCode::InvalidArgument, "corpus needs at least one field family");
  std::vector<ScalarField> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Rng rng(seed + k);
    out.push_back(random_field(space, region, families[k % families.size()], rng));
  }
  return out;
}

ScalarField cusp_example_field(const PointCloudSpace& space, double a) {
  return sample(space, Region::Interior, [a](const Coord& x) {
    require(x[0] > 0, ErrorCode::InvalidArgument, "cusp field needs x1 > 0");
    return std::pow(x[0], -a) / std::log(kE / x[0]);
  });
}

ScalarField cusp_example_gradient(const PointCloudSpace& space, double a) {
  return sample(space, Region::Interior, [a](const Coord& x) {
    require(x[0] > 0, ErrorCode::InvalidArgument, "cusp field needs x1 > 0");
    return (a + 1) * std::pow(x[0], -a) / std::log(kE / x[0]) / x[0];
  });
}

ScalarField radial_example_field(const PointCloudSpace& space, double a) {
  return sample(space, Region::Interior, [a](const Coord& x) {
    const double r = std::hypot(x[0], x[1]);
    require(r > 0, ErrorCode::InvalidArgument, "radial field needs x != 0");
    return std::pow(r, -a) / std::log(kE / r);
  });
}

ScalarField radial_example_gradient(const PointCloudSpace& space, double a) {
  return sample(space, Region::Interior, [a](const Coord& x) {
    const double r = std::hypot(x[0], x[1]);
    require(r > 0, ErrorCode::InvalidArgument, "radial field needs x != 0");
    return (a + 1) * std::pow(r, -a) / std::log(kE / r) / r;
  });
}

ScalarField log_distance_field(const PointCloudSpace& space, DomainKind kind, double e) {
  return sample(space, Region::Interior, [kind, e](const Coord& x) {
    const double d = analytic_boundary_distance(kind, x);
    require(d > 0, ErrorCode::ZeroDistance, "interior point on the boundary curve");
    return std::pow(std::log(kE / d), e);
  });
}

ScalarField log_distance_gradient(const PointCloudSpace& space, DomainKind kind, double c, double e) {
  return sample(space, Region::Interior, [kind, c, e](const Coord& x) {
    const double d = analytic_boundary_distance(kind, x);
    require(d > 0, ErrorCode::ZeroDistance, "interior point on the boundary curve");
    return c / (d * std::pow(std::log(kE / d), e));
  });
}

Json to_json(const Check& c) {
  Json j{{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"pass", c.pass}};
  if (c.relation == "in") {
    j["lower"] = c.lower;
    j["upper"] = c.bound;
  } else {
    j["bound"] = c.bound;
  }
  return j;
}

Json to_json(const CriterionResult& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return {{"id", r.id},           {"title", r.title},   {"pass", r.pass},     {"seconds", r.seconds},
          {"budget", r.budget},   {"summary", r.summary}, {"checks", checks}, {"detail", r.detail}};
}

// ---- measurement kernels -----------------------------------------------------

namespace {

struct NormCase {
  double alpha, p;
};
constexpr NormCase kNormCases[] = {{0.25, 2}, {0.5, 2}, {0.2, 2.5}};

// Worst max(r, 1/r) of the BP/GKS norm ratio per case.
std::vector<double> norm_equivalence_worst(int resolution, std::uint64_t seed, std::size_t fields) {
  const PointCloudSpace space = make_domain(DomainKind::UnitSquare, resolution);
  const auto corpus = field_corpus(space, Region::Boundary, fields, seed, all_families());
  std::vector<double> worst(std::size(kNormCases), 1.0);
  for (const auto& f : corpus)
    for (std::size_t c = 0; c < std::size(kNormCases); ++c) {
      BesovParams bp;
      bp.alpha = kNormCases[c].alpha;
      bp.p = bp.q = kNormCases[c].p;
      const double gks = besov_norm_gks(space, f, bp).norm;
      const double b = besov_norm_bp(space, f, bp.alpha, bp.p).norm;
      if (gks == 0 && b == 0) continue;
      const double r = b / gks;
      worst[c] = std::max(worst[c], std::max(r, 1 / r));
    }
  return worst;
}

std::vector<FieldFamily> extension_families() {
  return {FieldFamily::Fourier, FieldFamily::Cone, FieldFamily::Power};
}

// Bottom-edge integrals of (Tu)^q and the L^p mass of g for the cusp or radial example.
struct ExampleRow {
  int res = 0;
  std::size_t interior = 0, boundary = 0;
  double q4 = 0, q6 = 0, gp = 0;
};

ExampleRow example_row(DomainKind kind, int res, double p) {
  const double a = 3 / p - 1;
  const PointCloudSpace space = make_domain(kind, res);
  const bool cusp = kind == DomainKind::Cusp;
  const ScalarField u = cusp ? cusp_example_field(space, a) : radial_example_field(space, a);
  const ScalarField g = cusp ? cusp_example_gradient(space, a) : radial_example_gradient(space, a);
  const ScalarField T = trace_average(space, u, smallest_trace_radius(space));
  ExampleRow row;
  row.res = res;
  row.interior = space.count(Region::Interior);
  row.boundary = space.count(Region::Boundary);
  for (std::size_t k = 0; k < T.values.size(); ++k) {
    const auto& x = space.point(space.global(Region::Boundary, k)).x;
    if (std::abs(x[1]) > 1e-12 || x[0] >= 1 - 1e-9) continue;
    const double w = space.weight_local(Region::Boundary, k);
    row.q4 += w * std::pow(T.values[k], 4);
    row.q6 += w * std::pow(T.values[k], 6);
  }
  row.gp = std::pow(lp_norm(space, g, p), p);
  return row;
}

struct RoundtripSeries {
  std::vector<int> res;
  std::vector<double> r_min;
  std::vector<std::vector<double>> err;  // [field][resolution]
  std::vector<double> lip;               // Lipschitz constant per field at the finest resolution
};

RoundtripSeries roundtrip_series(const std::vector<int>& resolutions, std::uint64_t seed, std::size_t fields,
                                 double p) {
  RoundtripSeries s;
  s.res = resolutions;
  s.err.assign(fields, {});
  s.lip.assign(fields, 0);
  for (int res : resolutions) {
    const PointCloudSpace space = make_domain(DomainKind::UnitSquare, res);
    const WhitneyCover cover = build_cover(space);
    const BesovExtension ext(space, cover);
    const double r = smallest_trace_radius(space);
    s.r_min.push_back(r);
    const auto corpus = field_corpus(space, Region::Boundary, fields, seed, lipschitz_families());
    for (std::size_t k = 0; k < fields; ++k) {
      const ScalarField T = trace_average(space, ext.apply(corpus[k]), r);
      ScalarField diff = T;
      for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= corpus[k].values[i];
      s.err[k].push_back(lp_norm(space, diff, p));
      if (res == resolutions.back()) s.lip[k] = lipschitz_constant(space, corpus[k]);
    }
  }
  return s;
}

struct SharpRow {
  int res = 0;
  int n = 0;
  double gnorm = 0;
  DivergenceReport dv;
};

SharpRow sharpness_row(int res, double eps, int n_in) {
  DomainSpec spec;
  spec.kind = DomainKind::SharpnessDisc;
  spec.resolution = res;
  spec.eps = eps;
  spec.n = n_in;
  const PointCloudSpace space = generate(spec);
  SharpRow row;
  row.res = res;
  row.n = sharpness_exponent(spec);
  const ScalarField gt = log_distance_gradient(space, spec.kind, 1.0, eps / 2 + eps * eps / 4);
  row.gnorm = lp_norm(space, gt, row.n);
  row.dv = detect_divergence(space, log_distance_field(space, spec.kind, eps / 4), eps / 4);
  return row;
}

DivergenceReport weighted_disc_divergence(int res, double eps) {
  const PointCloudSpace space = make_domain(DomainKind::WeightedDisc, res, eps);
  return detect_divergence(space, log_distance_field(space, DomainKind::WeightedDisc, eps), eps);
}

Json divergence_json(const DivergenceReport& d) {
  return {{"radii", d.radii},
          {"mean_average", d.mean_average},
          {"increasing_fraction", d.increasing_fraction},
          {"fit_c", d.fit_c},
          {"fit_residual", d.fit_residual},
          {"no_trace", d.no_trace}};
}

}  // namespace

ExtensionRatios square_extension_ratios(int resolution, std::uint64_t seed, std::size_t fields, double p) {
  const PointCloudSpace space = make_domain(DomainKind::UnitSquare, resolution);
  const WhitneyCover cover = build_cover(space);
  const BesovExtension ext(space, cover);
  const double vartheta = 1;
  const double h = lip_radius(space);
  const double diam_factor = std::pow(space.diam(Region::Interior), vartheta / p);
  ExtensionRatios out;
  for (const auto& f : field_corpus(space, Region::Boundary, fields, seed, extension_families())) {
    const ScalarField F = ext.apply(f);
    const double fn = lp_norm(space, f, p);
    if (fn > 0) out.lp = std::max(out.lp, lp_norm(space, F, p) / (diam_factor * fn));
    BesovParams bp;
    bp.alpha = 1 - vartheta / p;
    bp.p = bp.q = p;
    const double bn = besov_norm_gks(space, f, bp).norm;
    if (bn > 0) out.grad = std::max(out.grad, lp_norm(space, lip_field(space, F, h), p) / bn);
  }
  return out;
}

double norm_equivalence_constant(int resolution, std::uint64_t seed, std::size_t fields) {
  const auto worst = norm_equivalence_worst(resolution, seed, fields);
  return *std::max_element(worst.begin(), worst.end());
}

double weighted_trace_constant(int resolution, std::uint64_t seed, std::size_t fields, double eps) {
  const PointCloudSpace space = make_domain(DomainKind::WeightedDisc, resolution, eps);
  TraceWeight w;
  w.exponent = 1 + eps;
  const double h = lip_radius(space);
  double worst = 0;
  for (const auto& u : field_corpus(space, Region::Interior, fields, seed, lipschitz_families())) {
    const auto rep = weighted_trace(space, u, lip_field(space, u, h), 2, w, 2);
    if (!rep.exact_match) worst = std::max(worst, rep.ratio);
  }
  return worst;
}

// ---- experiments -----------------------------------------------------------

ExperimentId parse_experiment_id(const std::string& name) {
  static const std::pair<const char*, ExperimentId> names[] = {
      {"E1", ExperimentId::E1_CuspTrace},           {"E2", ExperimentId::E2_WeightedSquare},
      {"E3", ExperimentId::E3_WeightedDiscNoTrace}, {"E4", ExperimentId::E4_SharpnessDisc},
      {"E5", ExperimentId::E5_RoundTrip},           {"E6", ExperimentId::E6_InequalitySuite}};
  for (const auto& [k, v] : names)
    if (name == k || name == experiment_name(v)) return v;
  fail(ErrorCode::InvalidArgument, "unknown experiment '" + name + "' (expected E1..E6)");
}

std::string experiment_name(ExperimentId id) {
  switch (id) {
    case ExperimentId::E1_CuspTrace:
      return "E1_CuspTrace";
    case ExperimentId::E2_WeightedSquare:
      return "E2_WeightedSquare";
    case ExperimentId::E3_WeightedDiscNoTrace:
      return "E3_WeightedDiscNoTrace";
    case ExperimentId::E4_SharpnessDisc:
      return "E4_SharpnessDisc";
    case ExperimentId::E5_RoundTrip:
      return "E5_RoundTrip";
    case ExperimentId::E6_InequalitySuite:
      return "E6_InequalitySuite";
  }
  return "?";
}

ExperimentConfig default_experiment_config(ExperimentId id) {
  ExperimentConfig c;
  c.id = id;
  switch (id) {
    case ExperimentId::E1_CuspTrace:
    case ExperimentId::E2_WeightedSquare:
      c.resolutions = {64, 128, 256};
      c.p = 2.5;
      break;
    case ExperimentId::E3_WeightedDiscNoTrace:
      c.resolutions = {48, 96};
      c.p = 2;
      c.eps = 0.25;
      c.fields = 12;
      break;
    case ExperimentId::E4_SharpnessDisc:
      c.resolutions = {32, 64, 128};
      c.eps = 0.9;
      break;
    case ExperimentId::E5_RoundTrip:
      c.resolutions = {64, 128, 256};
      c.p = 2;
      c.fields = 20;
      break;
    case ExperimentId::E6_InequalitySuite:
      c.resolutions = {32};
      c.fields = 24;
      break;
  }
  return c;
}

void validate_experiment_config(const ExperimentConfig& c) {
  require(!c.resolutions.empty(), ErrorCode::InvalidArgument, "at least one resolution is required");
  for (std::size_t k = 0; k < c.resolutions.size(); ++k) {
    require(c.resolutions[k] >= 4, ErrorCode::InvalidArgument, "resolutions must be at least 4");
    require(k == 0 || c.resolutions[k] > c.resolutions[k - 1], ErrorCode::InvalidArgument,
            "resolutions must be strictly increasing");
  }
  switch (c.id) {
    case ExperimentId::E1_CuspTrace:
    case ExperimentId::E2_WeightedSquare:
      require(c.p > 2 && c.p < 3, ErrorCode::InvalidArgument, "E1/E2 need p in (2, 3)");
      break;
    case ExperimentId::E3_WeightedDiscNoTrace:
      require(c.eps > 0 && c.eps < 1, ErrorCode::InvalidArgument, "E3 needs eps in (0, 1)");
      require(c.fields >= 0, ErrorCode::InvalidArgument, "field count must be nonnegative");
      break;
    case ExperimentId::E4_SharpnessDisc:
      require(c.eps > 0 && c.eps <= 1, ErrorCode::InvalidArgument, "E4 needs eps in (0, 1]");
      require(c.n == 0 || c.n >= 2, ErrorCode::InvalidArgument, "E4 needs n >= 2 (or 0 for ceil(2/eps))");
      break;
    case ExperimentId::E5_RoundTrip:
      require(c.p >= 1, ErrorCode::InvalidArgument, "E5 needs p >= 1");
      require(c.fields >= 1, ErrorCode::InvalidArgument, "E5 needs at least one field");
      break;
    case ExperimentId::E6_InequalitySuite:
      require(c.fields >= 1, ErrorCode::InvalidArgument, "E6 needs at least one field");
      break;
  }
}

namespace {

struct Builder {
  ExperimentResult res;
  std::string name;
  Json rows = Json::array();
  std::vector<Check> checks;

  void row(int resolution, const std::string& quantity, double value) {
    res.table.push_back({name, res_label(resolution), quantity, fmt(value)});
  }

  ExperimentResult finish(const ExperimentConfig& cfg, const Json& extra) {
    Json cj = Json::array();
    bool pass = true;
    for (const auto& c : checks) {
      cj.push_back(to_json(c));
      pass = pass && c.pass;
    }
    res.report = {{"schema", 1},
                  {"experiment", name},
                  {"config",
                   {{"resolutions", cfg.resolutions},
                    {"p", cfg.p},
                    {"eps", cfg.eps},
                    {"n", cfg.n},
                    {"seed", cfg.seed},
                    {"fields", cfg.fields}}},
                  {"rows", rows},
                  {"checks", cj},
                  {"pass", pass}};
    for (const auto& [k, v] : extra.items()) res.report[k] = v;
    res.pass = pass;
    return std::move(res);
  }
};

void example_checks(Builder& b, const std::vector<ExampleRow>& rows, bool with_q6) {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const std::string tag = std::to_string(rows[k - 1].res) + "->" + std::to_string(rows[k].res);
    if (with_q6) b.checks.push_back(ge("q6 growth " + tag, rows[k].q6 / rows[k - 1].q6, 1.5));
    b.checks.push_back(le("q4 relative change " + tag, rel_change(rows[k - 1].q4, rows[k].q4), 0.10));
  }
  if (rows.size() >= 2) {
    const auto& a = rows[rows.size() - 2];
    const auto& c = rows.back();
    b.checks.push_back(le("g^p relative change " + std::to_string(a.res) + "->" + std::to_string(c.res),
                          rel_change(a.gp, c.gp), 0.05));
  }
}

ExperimentResult run_example(const ExperimentConfig& cfg, DomainKind kind) {
  Builder b;
  b.name = experiment_name(cfg.id);
  std::vector<ExampleRow> rows;
  const double a = 3 / cfg.p - 1;
  Json besov = Json::array();
  for (int res : cfg.resolutions) {
    rows.push_back(example_row(kind, res, cfg.p));
    const auto& r = rows.back();
    b.rows.push_back({{"resolution", res},
                      {"interior_points", r.interior},
                      {"boundary_points", r.boundary},
                      {"int_Tu_q4", r.q4},
                      {"int_Tu_q6", r.q6},
                      {"g_Lp_p", r.gp}});
    b.row(res, "int_Tu_q4", r.q4);
    b.row(res, "int_Tu_q6", r.q6);
    b.row(res, "g_Lp_p", r.gp);
  }
  // Besov smoothness of the trace at the finest resolution.
  {
    const int res = cfg.resolutions.back();
    const PointCloudSpace space = make_domain(kind, res);
    const bool cusp = kind == DomainKind::Cusp;
    const ScalarField u = cusp ? cusp_example_field(space, a) : radial_example_field(space, a);
    const ScalarField T = trace_average(space, u, smallest_trace_radius(space));
    const EpProfile prof = ep_profile(space, T, cfg.p);
    const double R = default_besov_radius(space, Region::Boundary);
    for (double off : {0.0, 0.1}) {
      const double s = 1 - 2 / cfg.p + off;
      const double v = besov_seminorm(prof, s, kInfinity, R);
      besov.push_back({{"smoothness", s}, {"seminorm_p_inf", v}});
      b.row(res, "trace_besov_inf_s" + fmt_short(s), v);
    }
  }
  example_checks(b, rows, kind == DomainKind::Cusp);
  return b.finish(cfg, {{"alpha", a}, {"trace_besov", besov}});
}

ExperimentResult run_e3(const ExperimentConfig& cfg, const FrozenConstants* fc) {
  Builder b;
  b.name = experiment_name(cfg.id);
  for (int res : cfg.resolutions) {
    const DivergenceReport d = weighted_disc_divergence(res, cfg.eps);
    Json row = divergence_json(d);
    row["resolution"] = res;
    b.row(res, "increasing_fraction", d.increasing_fraction);
    b.row(res, "fit_c", d.fit_c);
    b.row(res, "fit_residual", d.fit_residual);
    b.checks.push_back(ge("increasing fraction at " + res_label(res), d.increasing_fraction, 0.9));
    b.checks.push_back(le("log fit residual at " + res_label(res), d.fit_residual, 0.10));
    b.checks.push_back(ge("no_trace at " + res_label(res), d.no_trace ? 1 : 0, 1));
    if (cfg.fields > 0) {
      const double c = weighted_trace_constant(res, cfg.seed, cfg.fields, cfg.eps);
      row["weighted_trace_ratio"] = c;
      b.row(res, "weighted_trace_ratio", c);
      if (fc && fc->has("weighted_trace_C"))
        b.checks.push_back(from_comparison(compare_band("weighted trace ratio at " + res_label(res), c,
                                                        fc->get("weighted_trace_C"))));
    }
    b.rows.push_back(row);
  }
  return b.finish(cfg, Json::object());
}

ExperimentResult run_e4(const ExperimentConfig& cfg) {
  Builder b;
  b.name = experiment_name(cfg.id);
  std::vector<SharpRow> rows;
  for (int res : cfg.resolutions) {
    rows.push_back(sharpness_row(res, cfg.eps, cfg.n));
    const auto& r = rows.back();
    Json row = divergence_json(r.dv);
    row["resolution"] = res;
    row["n"] = r.n;
    row["gtilde_norm"] = r.gnorm;
    b.rows.push_back(row);
    b.row(res, "gtilde_norm", r.gnorm);
    b.row(res, "increasing_fraction", r.dv.increasing_fraction);
    b.row(res, "fit_residual", r.dv.fit_residual);
    b.checks.push_back(ge("increasing fraction at " + res_label(res), r.dv.increasing_fraction, 0.9));
  }
  for (std::size_t k = 1; k < rows.size(); ++k)
    b.checks.push_back(le("gtilde norm relative change " + res_label(rows[k - 1].res) + "->" + res_label(rows[k].res),
                          rel_change(rows[k - 1].gnorm, rows[k].gnorm), 0.05));
  return b.finish(cfg, Json::object());
}

ScalarField jump_field(const PointCloudSpace& space) {
  return sample(space, Region::Boundary, [](const Coord& x) { return x[0] < 0.5 - 1e-9 ? 0.0 : 1.0; });
}

ExperimentResult run_e5(const ExperimentConfig& cfg) {
  Builder b;
  b.name = experiment_name(cfg.id);
  const RoundtripSeries s = roundtrip_series(cfg.resolutions, cfg.seed, static_cast<std::size_t>(cfg.fields), cfg.p);
  std::size_t non_monotone = 0;
  double worst_final = 0;
  for (std::size_t k = 0; k < s.err.size(); ++k) {
    for (std::size_t r = 1; r < s.res.size(); ++r) non_monotone += !(s.err[k][r] < s.err[k][r - 1]);
    if (s.lip[k] > 0) worst_final = std::max(worst_final, s.err[k].back() / (s.r_min.back() * s.lip[k]));
  }
  std::vector<double> jump_err;
  for (std::size_t r = 0; r < s.res.size(); ++r) {
    const int res = s.res[r];
    double mean_err = 0;
    for (const auto& e : s.err) mean_err += e[r] / s.err.size();
    const PointCloudSpace space = make_domain(DomainKind::UnitSquare, res);
    const WhitneyCover cover = build_cover(space);
    const ScalarField f = jump_field(space);
    const ExtensionReport rep = extend_lp(space, cover, f, cfg.p, 40, 1);
    jump_err.push_back(rep.roundtrip_error);
    Json ratios = Json::object();
    for (const auto& [k, v] : rep.norm_ratios) ratios[k] = v;
    b.rows.push_back({{"resolution", res},
                      {"smallest_radius", s.r_min[r]},
                      {"mean_lipschitz_roundtrip", mean_err},
                      {"jump_lp_roundtrip", rep.roundtrip_error},
                      {"jump_layers", rep.layers.size()},
                      {"jump_schedule_ok", rep.schedule_ok},
                      {"jump_norm_ratios", ratios}});
    b.row(res, "mean_lipschitz_roundtrip", mean_err);
    b.row(res, "jump_lp_roundtrip", rep.roundtrip_error);
    b.checks.push_back(ge("jump schedule invariants at " + res_label(res), rep.schedule_ok ? 1 : 0, 1));
  }
  b.checks.push_back(le("fields with non-monotone roundtrip", static_cast<double>(non_monotone), 0));
  b.checks.push_back(le("finest roundtrip / (r_min LIP f)", worst_final, 4));
  for (std::size_t r = 1; r < jump_err.size(); ++r)
    b.checks.push_back(ge("jump roundtrip decrease " + res_label(s.res[r - 1]) + "->" + res_label(s.res[r]),
                          jump_err[r - 1] / jump_err[r], 1.3));
  return b.finish(cfg, Json::object());
}

std::vector<InequalityResult> suite_on_square(int res, std::uint64_t seed, std::size_t fields) {
  const PointCloudSpace space = make_domain(DomainKind::UnitSquare, res);
  const auto corpus = field_corpus(space, Region::Boundary, fields, seed, all_families());
  return inequality_suite(space, corpus, InequalityConfig{});
}

ExperimentResult run_e6(const ExperimentConfig& cfg) {
  Builder b;
  b.name = experiment_name(cfg.id);
  for (int res : cfg.resolutions) {
    const auto results = suite_on_square(res, cfg.seed, static_cast<std::size_t>(cfg.fields));
    Json entries = Json::array();
    for (const auto& r : results) {
      entries.push_back({{"id", r.id},
                         {"exact", r.exact},
                         {"worst_ratio", r.worst_ratio},
                         {"evaluations", r.evaluations},
                         {"passed", r.passed}});
      b.row(res, r.id, r.worst_ratio);
      if (r.exact) b.checks.push_back(le(r.id + " at " + res_label(res), r.worst_ratio, 1 + 1e-9));
    }
    b.rows.push_back({{"resolution", res}, {"entries", entries}});
  }
  return b.finish(cfg, Json::object());
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const FrozenConstants* frozen) {
  validate_experiment_config(cfg);
  switch (cfg.id) {
    case ExperimentId::E1_CuspTrace:
      return run_example(cfg, DomainKind::Cusp);
    case ExperimentId::E2_WeightedSquare:
      return run_example(cfg, DomainKind::WeightedSquare);
    case ExperimentId::E3_WeightedDiscNoTrace:
      return run_e3(cfg, frozen);
    case ExperimentId::E4_SharpnessDisc:
      return run_e4(cfg);
    case ExperimentId::E5_RoundTrip:
      return run_e5(cfg);
    case ExperimentId::E6_InequalitySuite:
      return run_e6(cfg);
  }
  fail(ErrorCode::InvalidArgument, "unknown experiment");
}

void write_experiment(const ExperimentConfig& cfg, const ExperimentResult& res) {
  require(!cfg.out_dir.empty(), ErrorCode::InvalidArgument, "output directory is required");
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  require(!ec, ErrorCode::Io, "cannot create " + cfg.out_dir + ": " + ec.message());
  const auto dir = std::filesystem::path(cfg.out_dir);
  std::ofstream rj(dir / "report.json");
  require(rj.good(), ErrorCode::Io, "cannot write report.json in " + cfg.out_dir);
  rj << res.report.dump(2) << "\n";
  std::ofstream csv(dir / "tables.csv");
  require(csv.good(), ErrorCode::Io, "cannot write tables.csv in " + cfg.out_dir);
  csv << "experiment,resolution,quantity,value\n";
  for (const auto& row : res.table) {
    for (std::size_t k = 0; k < row.size(); ++k) csv << (k ? "," : "") << row[k];
    csv << "\n";
  }
}

// ---- freeze ------------------------------------------------------------------

std::map<std::string, double> measure_constants(const FreezeConfig& cfg) {
  require(cfg.norm_fields > 0 && cfg.extension_fields > 0 && cfg.trace_fields > 0, ErrorCode::InvalidArgument,
          "freeze corpora must be nonempty");
  std::map<std::string, double> c;
  c["norm_equiv_C"] = norm_equivalence_constant(cfg.norm_resolution, cfg.seed, cfg.norm_fields);

  const std::pair<const char*, PointCloudSpace> covers[] = {
      {"whitney_overlap_square", make_domain(DomainKind::UnitSquare, cfg.whitney_resolution)},
      {"whitney_overlap_cusp", make_domain(DomainKind::Cusp, cfg.whitney_resolution)},
      {"whitney_overlap_weighted_disc", make_domain(DomainKind::WeightedDisc, cfg.disc_resolution)}};
  for (const auto& [name, space] : covers) c[name] = static_cast<double>(build_cover(space).overlap_bound);

  const ExtensionRatios er = square_extension_ratios(cfg.square_resolution, cfg.seed, cfg.extension_fields, 2);
  c["extension_lp_C"] = er.lp;
  c["extension_lip_C"] = er.grad;
  c["weighted_trace_C"] = weighted_trace_constant(cfg.disc_resolution, cfg.seed, cfg.trace_fields, 0.25);

  // Constants used by the unit tests, all on the square at the extension resolution.
  const PointCloudSpace sq = make_domain(DomainKind::UnitSquare, cfg.square_resolution);
  const WhitneyCover cover = build_cover(sq);
  const BesovExtension ext(sq, cover);
  const double h = lip_radius(sq);
  const auto interior = field_corpus(sq, Region::Interior, cfg.trace_fields, cfg.seed, lipschitz_families());
  double haj = 0, tnorm = 0, local = 0;
  for (const auto& u : interior) {
    const ScalarField g = lip_field(sq, u, h);
    const auto rep = trace_besov_report(sq, u, g, 2, 1);
    haj = std::max(haj, rep.hajlasz_ratio);
    tnorm = std::max(tnorm, rep.norm_ratio);
    const ScalarField T = trace_average(sq, u, smallest_trace_radius(sq));
    for (std::size_t z = 0; z < sq.count(Region::Boundary); z += sq.count(Region::Boundary) / 5)
      for (double r : {0.1, 0.2, 0.4}) {
        const auto lt = local_trace_estimate(sq, T, u, g, LocalTraceParams{}, Ball::at(sq.global(Region::Boundary, z), r));
        if (lt.rhs > 0) local = std::max(local, lt.ratio);
      }
  }
  c["trace_hajlasz_C"] = haj;
  c["trace_norm_C"] = tnorm;
  c["local_trace_C"] = local;

  const auto boundary = field_corpus(sq, Region::Boundary, cfg.extension_fields, cfg.seed, extension_families());
  double shell_ball = 0, shell_global = 0, layer = 0, pointwise = 0, maximal = 0;
  for (std::size_t k = 0; k < boundary.size(); ++k) {
    const auto& f = boundary[k];
    const ScalarField F = ext.apply(f);
    const std::size_t z = sq.global(Region::Boundary, (k * 37) % sq.count(Region::Boundary));
    for (double r : {0.05, 0.2})
      for (double rho : {0.05, 0.25, 2.0}) {
        const auto e = shell_estimates(sq, F, f, z, r, rho, 2, 1);
        if (e.ball_rhs > 0) shell_ball = std::max(shell_ball, e.ball_lhs / e.ball_rhs);
        if (e.shell_rhs > 0) shell_global = std::max(shell_global, e.shell_lhs / e.shell_rhs);
      }
    const ScalarField lipF = lip_field(sq, F, h);
    const double L = lipschitz_constant(sq, f);
    for (double rho : {0.1, 0.2, 0.4}) {
      const double v = lip_layer_ratio(sq, lipF, rho, L, 2);
      if (std::isfinite(v)) layer = std::max(layer, v);
    }
    pointwise = std::max(pointwise, extension_gradient_report(sq, cover, f, 2, 1).pointwise_ratio);
  }
  for (const auto& u : interior) {
    const double fn = lp_norm(sq, u, 2);
    if (fn > 0) maximal = std::max(maximal, weak_quasinorm(sq, frac_maximal(sq, u, 0.5, 2), 0.75) / fn);
  }
  c["shell_ball_C"] = shell_ball;
  c["shell_global_C"] = shell_global;
  c["lip_layer_C"] = layer;
  c["extension_pointwise_C"] = pointwise;
  c["frac_maximal_weak_C"] = maximal;
  return c;
}

std::map<std::string, std::string> freeze_reference(const FreezeConfig& cfg) {
  return {{"seed", std::to_string(cfg.seed)},
          {"norm_equiv_C", "unit square res " + std::to_string(cfg.norm_resolution) + ", " +
                               std::to_string(cfg.norm_fields) + " boundary fields, max of max(r,1/r)"},
          {"whitney_overlap", "square/cusp res " + std::to_string(cfg.whitney_resolution) + ", weighted disc res " +
                                  std::to_string(cfg.disc_resolution)},
          {"extension", "unit square res " + std::to_string(cfg.square_resolution) + ", " +
                            std::to_string(cfg.extension_fields) + " boundary fields, p = 2, vartheta = 1"},
          {"weighted_trace_C", "weighted disc res " + std::to_string(cfg.disc_resolution) + ", eps 0.25, " +
                                   std::to_string(cfg.trace_fields) + " interior fields, w = log(2 diam/t)^1.25"},
          {"trace", "unit square res " + std::to_string(cfg.square_resolution) + ", " +
                        std::to_string(cfg.trace_fields) + " interior fields, g = Lip u, p = 2, theta = 1"}};
}

// ---- acceptance criteria -------------------------------------------------------

namespace {

CriterionResult finish(CriterionResult r, Clock::time_point t0) {
  r.seconds = elapsed(t0);
  r.checks.push_back(le("runtime seconds", r.seconds, r.budget));
  r.pass = true;
  std::size_t failed = 0;
  for (const auto& c : r.checks)
    if (!c.pass) {
      r.pass = false;
      ++failed;
    }
  if (r.summary.empty())
    r.summary = failed ? std::to_string(failed) + " of " + std::to_string(r.checks.size()) + " checks failed"
                       : "all " + std::to_string(r.checks.size()) + " checks passed";
  return r;
}

}  // namespace

CriterionResult criterion_norm_equivalence(const FrozenConstants& fc) {
  const auto t0 = Clock::now();
  CriterionResult r{1, "norm equivalence BP/GKS", false, 0, 60, "", {}, Json::object()};
  const double C = fc.get("norm_equiv_C");
  const auto worst = norm_equivalence_worst(128, 1, 200);
  for (std::size_t c = 0; c < worst.size(); ++c) {
    const std::string tag = "(" + fmt_short(kNormCases[c].alpha) + "," + fmt_short(kNormCases[c].p) + ")";
    r.checks.push_back(le("max(r,1/r) " + tag, worst[c], kFreezeFactor * C));
    r.detail[tag] = worst[c];
  }
  r.detail["frozen_C"] = C;
  return finish(r, t0);
}

CriterionResult criterion_inequality_suite() {
  const auto t0 = Clock::now();
  CriterionResult r{2, "exact inequality suite", false, 0, 120, "", {}, Json::object()};
  for (const auto& e : suite_on_square(32, 1, 24)) {
    r.detail[e.id] = {{"worst_ratio", e.worst_ratio}, {"exact", e.exact}, {"evaluations", e.evaluations}};
    if (e.exact) r.checks.push_back(le(e.id, e.worst_ratio, 1 + 1e-9));
  }
  return finish(r, t0);
}

CriterionResult criterion_whitney(const FrozenConstants& fc) {
  const auto t0 = Clock::now();
  CriterionResult r{3, "Whitney cover invariants", false, 0, 60, "", {}, Json::object()};
  const std::tuple<const char*, DomainKind, int> cases[] = {{"square", DomainKind::UnitSquare, 64},
                                                            {"cusp", DomainKind::Cusp, 64},
                                                            {"weighted_disc", DomainKind::WeightedDisc, 48}};
  for (const auto& [name, kind, res] : cases) {
    const PointCloudSpace space = make_domain(kind, res);
    const WhitneyCover cover = build_cover(space);
    const double frozen = fc.get(std::string("whitney_overlap_") + name);
    const auto limit = static_cast<std::size_t>(std::floor(kFreezeFactor * frozen));
    const WhitneyCheck chk = check_cover(space, cover, limit);
    const int bad = !chk.radius_ok + !chk.level_ok + !chk.coverage_ok + !chk.anchor_ok + !chk.disjoint_ok;
    r.checks.push_back(le(std::string(name) + " structural invariants failing", bad, 0));
    r.checks.push_back(le(std::string(name) + " overlap", static_cast<double>(chk.measured_overlap),
                          static_cast<double>(limit)));
    r.checks.push_back(le(std::string(name) + " partition error", chk.worst_partition_error, 1e-12));
    r.detail[name] = {{"balls", cover.balls.size()},         {"j0", cover.j0},
                      {"overlap", chk.measured_overlap},     {"uncovered", chk.uncovered},
                      {"intersecting_pairs", chk.intersecting_pairs}, {"worst_radius_error", chk.worst_radius_error}};
  }
  return finish(r, t0);
}

CriterionResult criterion_extension_bounds(const FrozenConstants& fc) {
  const auto t0 = Clock::now();
  CriterionResult r{4, "extension bounds under refinement", false, 0, 180, "", {}, Json::object()};
  const double lpC = fc.get("extension_lp_C"), lipC = fc.get("extension_lip_C");
  for (int res : {32, 64, 128}) {
    const ExtensionRatios er = square_extension_ratios(res, 1, 20, 2);
    r.checks.push_back(from_comparison(compare_band("Lp ratio at " + res_label(res), er.lp, lpC)));
    r.checks.push_back(from_comparison(compare_band("Lip ratio at " + res_label(res), er.grad, lipC)));
    r.detail[res_label(res)] = {{"lp", er.lp}, {"lip", er.grad}};
  }
  r.detail["frozen"] = {{"lp", lpC}, {"lip", lipC}};
  return finish(r, t0);
}

CriterionResult criterion_roundtrip() {
  const auto t0 = Clock::now();
  CriterionResult r{5, "trace-extension roundtrip", false, 0, 300, "", {}, Json::object()};
  const RoundtripSeries s = roundtrip_series({64, 128, 256}, 1, 20, 2);
  std::size_t non_monotone = 0;
  double worst = 0;
  for (std::size_t k = 0; k < s.err.size(); ++k) {
    for (std::size_t j = 1; j < s.res.size(); ++j) non_monotone += !(s.err[k][j] < s.err[k][j - 1]);
    if (s.lip[k] > 0) worst = std::max(worst, s.err[k].back() / (s.r_min.back() * s.lip[k]));
  }
  r.checks.push_back(le("fields with non-monotone error", static_cast<double>(non_monotone), 0));
  r.checks.push_back(le("finest error / (r_min LIP f)", worst, 4));
  r.detail["smallest_radius"] = s.r_min;
  r.detail["errors"] = s.err;
  return finish(r, t0);
}

CriterionResult criterion_cusp_example() {
  const auto t0 = Clock::now();
  CriterionResult r{6, "cusp example trace integrability", false, 0, 300, "", {}, Json::object()};
  std::vector<ExampleRow> rows;
  for (int res : {64, 128, 256}) {
    rows.push_back(example_row(DomainKind::Cusp, res, 2.5));
    r.detail[res_label(res)] = {{"q4", rows.back().q4}, {"q6", rows.back().q6}, {"g_p", rows.back().gp}};
  }
  Builder b;
  example_checks(b, rows, true);
  r.checks = b.checks;
  return finish(r, t0);
}

CriterionResult criterion_no_trace(const FrozenConstants& fc) {
  const auto t0 = Clock::now();
  CriterionResult r{7, "weighted disc divergence and weighted trace", false, 0, 300, "", {}, Json::object()};
  const double eps = 0.25;
  for (int res : {48, 96}) {
    const DivergenceReport d = weighted_disc_divergence(res, eps);
    r.checks.push_back(ge("increasing fraction at " + res_label(res), d.increasing_fraction, 0.9));
    r.checks.push_back(le("log fit residual at " + res_label(res), d.fit_residual, 0.10));
    const double c = weighted_trace_constant(res, 1, 12, eps);
    r.checks.push_back(from_comparison(compare_band("weighted trace ratio at " + res_label(res), c,
                                                    fc.get("weighted_trace_C"))));
    r.detail["disc_" + res_label(res)] = divergence_json(d);
    r.detail["disc_" + res_label(res)]["weighted_trace_ratio"] = c;
  }
  std::vector<SharpRow> rows;
  for (int res : {32, 64, 128}) {
    rows.push_back(sharpness_row(res, 0.9, 0));
    r.detail["sharpness_" + res_label(res)] = {{"n", rows.back().n}, {"gtilde_norm", rows.back().gnorm}};
  }
  for (std::size_t k = 1; k < rows.size(); ++k)
    r.checks.push_back(le("gtilde norm change " + res_label(rows[k - 1].res) + "->" + res_label(rows[k].res),
                          rel_change(rows[k - 1].gnorm, rows[k].gnorm), 0.05));
  return finish(r, t0);
}

CriterionResult criterion_selection() {
  const auto t0 = Clock::now();
  CriterionResult r{8, "small-row selection", false, 0, 5, "", {}, Json::object()};
  const std::size_t J = 64, K = 64, instances = 500;
  const double bound = 10, eps = 0.1;
  const std::size_t min_card = K / 2;
  std::size_t violations = 0, errors = 0, smallest = K;
  for (std::size_t t = 0; t < instances; ++t) {
    Rng rng(1 + t);
    std::vector<std::vector<double>> a(J, std::vector<double>(K));
    for (std::size_t k = 0; k < K; ++k) {
      std::vector<double> w(J);
      double s = 0;
      for (auto& v : w) s += v = rng.gamma(0.1);
      const double total = rng.uniform(0, bound);
      for (std::size_t j = 0; j < J; ++j) a[j][k] = s > 0 ? w[j] / s * total : 0;
    }
    try {
      const Selection sel = select_small_row(a, bound, eps, min_card);
      bool ok = sel.j0 < J && sel.columns.size() >= min_card;
      for (std::size_t k : sel.columns) ok = ok && k < K && a[sel.j0][k] <= eps;
      violations += !ok;
      smallest = std::min(smallest, sel.columns.size());
    } catch (const Error&) {
      ++errors;
    }
  }
  r.checks.push_back(le("postcondition violations", static_cast<double>(violations), 0));
  r.checks.push_back(le("instances raising an error", static_cast<double>(errors), 0));
  r.detail = {{"instances", instances}, {"smallest_selection", smallest}, {"min_card", min_card}};
  return finish(r, t0);
}

CriterionResult criterion_oracles() {
  const auto t0 = Clock::now();
  CriterionResult r{9, "oracle equivalence", false, 0, 60, "", {}, Json::object()};
  double worst = 0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    Rng rng(1 + t);
    std::vector<PointCloudSpace::Point> pts(50);
    for (auto& p : pts) {
      p.x = {rng.uniform(), rng.uniform(), 0};
      p.region = Region::Interior;
      p.weight = rng.uniform(0.5, 1.5) / 50;
    }
    const PointCloudSpace space(2, pts);
    ScalarField u{Region::Interior, std::vector<double>(50)};
    for (auto& v : u.values) v = rng.normal();
    BesovParams bp;
    bp.alpha = rng.uniform(0.1, 0.9);
    bp.p = std::array<double, 3>{1, 2, 3}[t % 3];
    bp.q = std::array<double, 3>{1, 2, 4}[(t / 3) % 3];
    const double exact = besov_norm_gks(space, u, bp).seminorm;
    const double quad = besov_norm_gks_quadrature(space, u, bp, 40).seminorm;
    worst = std::max(worst, rel_change(exact, quad));
  }
  r.checks.push_back(le("GKS vs quadrature relative error", worst, 0.02));

  Rng rng(777);
  std::vector<PointCloudSpace::Point> pts(600);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    pts[k].x = {rng.uniform(), rng.uniform(), 0};
    pts[k].region = k % 5 == 0 ? Region::Boundary : Region::Interior;
    pts[k].weight = 1.0 / 600;
  }
  const PointCloudSpace space(2, pts);
  std::size_t mismatches = 0;
  for (int q = 0; q < 200; ++q) {
    const Region region = q % 2 ? Region::Boundary : Region::Interior;
    const double radius = rng.uniform(0.01, 0.5);
    const Ball ball = q % 3 == 0 ? Ball::at(Coord{rng.uniform(), rng.uniform(), 0}, radius)
                                 : Ball::at(static_cast<std::size_t>(rng.integer(0, 599)), radius);
    auto got = space.ball_members(ball, region);
    std::sort(got.begin(), got.end());
    const Coord c = ball.center_id ? pts[*ball.center_id].x : ball.center;
    std::vector<std::size_t> want;
    for (std::size_t id = 0; id < pts.size(); ++id)
      if (pts[id].region == region && std::hypot(pts[id].x[0] - c[0], pts[id].x[1] - c[1]) < radius)
        want.push_back(id);
    mismatches += got != want;
  }
  r.checks.push_back(le("ball query mismatches", static_cast<double>(mismatches), 0));
  r.detail = {{"worst_gks_relative_error", worst}, {"ball_queries", 200}};
  return finish(r, t0);
}

}  // namespace metsob
