#include "metsob/metsob.h"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "json.hpp"
#include "metsob/constants.hpp"
#include "metsob/domains.hpp"
#include "metsob/experiments.hpp"
#include "metsob/extension.hpp"
#include "metsob/functionals.hpp"
#include "metsob/io.hpp"
#include "metsob/space.hpp"
#include "metsob/trace.hpp"
#include "metsob/whitney.hpp"

using metsob::ErrorCode;
using metsob::Json;
using metsob::Region;
using metsob::ScalarField;

struct ms_space {
  explicit ms_space(metsob::PointCloudSpace s) : space(std::move(s)) {}
  metsob::PointCloudSpace space;
};

struct ms_field {
  ScalarField field;
};

struct ms_cover {
  metsob::WhitneyCover cover;
  std::size_t points = 0;  // size of the space it was built for
};

namespace {

thread_local std::string g_last_error;

ms_status record(ms_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
ms_status guard(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MS_OK;
  } catch (const metsob::Error& e) {
    return record(static_cast<ms_status>(e.code()), e.what());
  } catch (const Json::exception& e) {
    return record(MS_ERR_PARSE, std::string("malformed JSON: ") + e.what());
  } catch (const std::bad_alloc&) {
    return record(MS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(MS_ERR_INTERNAL, e.what());
  }
}

void need(const void* p, const char* what) {
  metsob::require(p != nullptr, ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

Region region_of(int r) {
  metsob::require(r == MS_INTERIOR || r == MS_BOUNDARY, ErrorCode::InvalidArgument, "region must be 0 or 1");
  return static_cast<Region>(r);
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const Json& j) {
  need(out, "output string");
  *out = dup(j.dump(2));
}

// NaN and infinity are not JSON; encode them as null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json nums(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

ms_field* wrap(ScalarField f) { return new ms_field{std::move(f)}; }

metsob::FieldFamily family_of(const std::string& name) {
  for (auto f : metsob::all_families())
    if (name == metsob::field_family_name(f)) return f;
  metsob::fail(ErrorCode::InvalidArgument, "unknown field family '" + name + "'");
}

Json cover_json(const metsob::WhitneyCover& c) {
  Json balls = Json::array();
  for (const auto& b : c.balls)
    balls.push_back({{"center", b.center}, {"radius", b.radius}, {"level", b.level}, {"anchor", b.anchor}});
  return {{"schema", 1}, {"j0", c.j0}, {"overlap_bound", c.overlap_bound}, {"balls", balls}};
}

metsob::FrozenConstants frozen_or_empty(const char* path, bool required) {
  const std::string p = path && *path ? path : metsob::default_constants_path();
  if (!required && !std::ifstream(p).good()) return metsob::FrozenConstants{p, {}};
  return metsob::load_constants(p);
}

int g_default_threads = 0;

}  // namespace

extern "C" {

const char* ms_version(void) { return "1.0.0"; }

const char* ms_last_error(void) { return g_last_error.c_str(); }

const char* ms_status_name(ms_status s) {
  switch (s) {
    case MS_OK: return "ok";
    case MS_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case MS_ERR_NO_SUCH_POINT: return "no_such_point";
    case MS_ERR_INSUFFICIENT_GEOMETRY: return "insufficient_geometry";
    case MS_ERR_UNRESOLVABLE_SCALE: return "unresolvable_scale";
    case MS_ERR_NOT_CONNECTED: return "not_connected";
    case MS_ERR_DEGENERATE_METRIC: return "degenerate_metric";
    case MS_ERR_HYPOTHESIS_FAILED: return "hypothesis_failed";
    case MS_ERR_RADIUS_BELOW_RESOLUTION: return "radius_below_resolution";
    case MS_ERR_EMPTY_PATCH: return "empty_patch";
    case MS_ERR_ZERO_DISTANCE: return "zero_distance";
    case MS_ERR_SUPERCRITICAL_TRACE: return "supercritical_trace";
    case MS_ERR_PRECONDITION_FAILED: return "precondition_failed";
    case MS_ERR_NO_ADMISSIBLE_CURVE: return "no_admissible_curve";
    case MS_ERR_IO: return "io";
    case MS_ERR_PARSE: return "parse";
    case MS_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void ms_string_free(char* s) { std::free(s); }

ms_status ms_set_threads(int n) {
  return guard([&] {
    if (g_default_threads == 0) g_default_threads = omp_get_max_threads();
    omp_set_num_threads(n > 0 ? n : g_default_threads);
  });
}

// ---- spaces ----

ms_status ms_space_generate(const char* kind, int resolution, int boundary_resolution, double eps, int n,
                            ms_space** out) {
  return guard([&] {
    need(kind, "kind");
    need(out, "output handle");
    metsob::require(resolution > 0 && boundary_resolution >= 0, ErrorCode::InvalidArgument,
                    "resolutions must be positive");
    metsob::DomainSpec spec;
    spec.kind = metsob::parse_domain_kind(kind);
    spec.resolution = resolution;
    spec.boundary_resolution = boundary_resolution;
    spec.eps = eps;
    spec.n = n;
    *out = new ms_space(metsob::generate(spec));
  });
}

ms_status ms_space_load(const char* path, const char* dmat_path, ms_space** out) {
  return guard([&] {
    need(path, "path");
    need(out, "output handle");
    *out = new ms_space(metsob::load_space(path, dmat_path ? dmat_path : ""));
  });
}

ms_status ms_space_save(const ms_space* space, const char* path) {
  return guard([&] {
    need(space, "space");
    need(path, "path");
    metsob::save_space(space->space, path);
  });
}

ms_status ms_space_from_points(int dim, size_t n, const double* coords, const int* regions, const double* weights,
                               ms_space** out) {
  return guard([&] {
    need(coords, "coords");
    need(regions, "regions");
    need(weights, "weights");
    need(out, "output handle");
    metsob::require(dim == 2 || dim == 3, ErrorCode::InvalidArgument, "dimension must be 2 or 3");
    std::vector<metsob::PointCloudSpace::Point> pts(n);
    for (size_t i = 0; i < n; ++i) {
      for (int c = 0; c < dim; ++c) pts[i].x[c] = coords[i * dim + c];
      pts[i].region = region_of(regions[i]);
      pts[i].weight = weights[i];
    }
    *out = new ms_space(metsob::PointCloudSpace(dim, std::move(pts)));
  });
}

void ms_space_free(ms_space* space) { delete space; }

ms_status ms_space_count(const ms_space* space, int region, size_t* out) {
  return guard([&] {
    need(space, "space");
    need(out, "output");
    *out = space->space.count(region_of(region));
  });
}

ms_status ms_space_global_id(const ms_space* space, int region, size_t local_index, size_t* out) {
  return guard([&] {
    need(space, "space");
    need(out, "output");
    const Region r = region_of(region);
    metsob::require(local_index < space->space.count(r), ErrorCode::NoSuchPoint, "local index out of range");
    *out = space->space.global(r, local_index);
  });
}

ms_status ms_space_info(const ms_space* space, char** json) {
  return guard([&] {
    need(space, "space");
    const auto& s = space->space;
    Json j{{"dim", s.dim()}, {"points", s.size()}, {"distance_matrix", s.has_distance_matrix()}};
    for (Region r : {Region::Interior, Region::Boundary}) {
      Json rj{{"count", s.count(r)}, {"mass", s.total_mass(r)}};
      if (s.count(r) > 0) {
        rj["diam"] = s.diam(r);
        rj["spacing"] = s.spacing(r);
        rj["min_spacing"] = s.min_spacing(r);
      }
      j[metsob::region_name(r)] = rj;
    }
    if (s.count(Region::Boundary) > 0 && s.count(Region::Interior) > 0)
      j["boundary_adjacent_spacing"] = s.boundary_adjacent_spacing();
    emit(json, j);
  });
}

ms_status ms_space_ball_members(const ms_space* space, size_t center_id, const double* coords, double radius,
                                int region, size_t* ids, size_t capacity, size_t* count) {
  return guard([&] {
    need(space, "space");
    need(count, "count");
    metsob::Ball b;
    if (center_id == SIZE_MAX) {
      need(coords, "coords");
      metsob::Coord c{};
      for (int k = 0; k < space->space.dim(); ++k) c[k] = coords[k];
      b = metsob::Ball::at(c, radius);
    } else {
      b = metsob::Ball::at(center_id, radius);
    }
    auto members = space->space.ball_members(b, region_of(region));
    std::sort(members.begin(), members.end());
    *count = members.size();
    if (capacity > 0) need(ids, "ids");
    for (size_t k = 0; k < members.size() && k < capacity; ++k) ids[k] = members[k];
  });
}

ms_status ms_space_ball_mass(const ms_space* space, size_t center_id, double radius, int region, double* out) {
  return guard([&] {
    need(space, "space");
    need(out, "output");
    *out = space->space.ball_mass(metsob::Ball::at(center_id, radius), region_of(region));
  });
}

ms_status ms_space_mass_exponents(const ms_space* space, int region, char** json) {
  return guard([&] {
    need(space, "space");
    const Region r = region_of(region);
    const auto radii = metsob::default_probe_schedule(space->space, r);
    const auto m = metsob::estimate_mass_exponents(space->space, radii, r);
    emit(json, {{"s", num(m.s)}, {"c_s", num(m.c_s)}, {"c_dbl", num(m.c_dbl)}, {"radii", radii}});
  });
}

ms_status ms_space_codim_bounds(const ms_space* space, char** json) {
  return guard([&] {
    need(space, "space");
    const auto radii = metsob::default_probe_schedule(space->space, Region::Interior);
    const auto c = metsob::estimate_codim_bounds(space->space, radii);
    emit(json, {{"vartheta", num(c.vartheta)},
                {"c_vartheta", num(c.c_vartheta)},
                {"theta", num(c.theta)},
                {"c_theta", num(c.c_theta)},
                {"radii", radii}});
  });
}

ms_status ms_space_shell_mass(const ms_space* space, double rho, double* out) {
  return guard([&] {
    need(space, "space");
    need(out, "output");
    *out = metsob::shell_mass(space->space, rho);
  });
}

// ---- fields ----

ms_status ms_field_create(const ms_space* space, int region, const double* values, size_t n, ms_field** out) {
  return guard([&] {
    need(space, "space");
    need(out, "output handle");
    if (n > 0) need(values, "values");
    ScalarField f{region_of(region), std::vector<double>(values, values + n)};
    metsob::check_field(space->space, f);
    *out = wrap(std::move(f));
  });
}

ms_status ms_field_load(const ms_space* space, int region, const char* path, ms_field** out) {
  return guard([&] {
    need(space, "space");
    need(path, "path");
    need(out, "output handle");
    *out = wrap(metsob::load_field(space->space, region_of(region), path));
  });
}

ms_status ms_field_save(const ms_field* field, const char* path) {
  return guard([&] {
    need(field, "field");
    need(path, "path");
    metsob::save_field(field->field, path);
  });
}

ms_status ms_field_random(const ms_space* space, int region, const char* family, uint64_t seed, ms_field** out) {
  return guard([&] {
    need(space, "space");
    need(family, "family");
    need(out, "output handle");
    metsob::Rng rng(seed);
    *out = wrap(metsob::random_field(space->space, region_of(region), family_of(family), rng));
  });
}

ms_status ms_field_values(const ms_field* field, const double** values, size_t* n) {
  return guard([&] {
    need(field, "field");
    need(values, "values");
    need(n, "n");
    *values = field->field.values.data();
    *n = field->field.values.size();
  });
}

ms_status ms_field_region(const ms_field* field, int* region) {
  return guard([&] {
    need(field, "field");
    need(region, "region");
    *region = static_cast<int>(field->field.region);
  });
}

void ms_field_free(ms_field* field) { delete field; }

// ---- functionals ----

ms_status ms_lp_norm(const ms_space* space, const ms_field* f, double p, double* out) {
  return guard([&] {
    need(space, "space");
    need(f, "field");
    need(out, "output");
    *out = metsob::lp_norm(space->space, f->field, p);
  });
}

ms_status ms_besov_norm(const ms_space* space, const ms_field* f, double alpha, double p, double q, double R, int form,
                        double* seminorm, double* norm) {
  return guard([&] {
    need(space, "space");
    need(f, "field");
    metsob::NormPair r;
    switch (form) {
      case MS_BESOV_GKS:
      case MS_BESOV_QUADRATURE: {
        metsob::BesovParams bp;
        bp.alpha = alpha;
        bp.p = p;
        bp.q = q;
        bp.R = R;
        r = form == MS_BESOV_GKS ? metsob::besov_norm_gks(space->space, f->field, bp)
                                 : metsob::besov_norm_gks_quadrature(space->space, f->field, bp);
        break;
      }
      case MS_BESOV_BP:
        metsob::require(q == p, ErrorCode::InvalidArgument, "the pair-integral form needs q = p");
        r = metsob::besov_norm_bp(space->space, f->field, alpha, p, R);
        break;
      default:
        metsob::fail(ErrorCode::InvalidArgument, "unknown Besov form");
    }
    if (seminorm) *seminorm = r.seminorm;
    if (norm) *norm = r.norm;
  });
}

ms_status ms_hajlasz_gradient(const ms_space* space, const ms_field* u, double alpha, ms_field** out) {
  return guard([&] {
    need(space, "space");
    need(u, "field");
    need(out, "output handle");
    *out = wrap(metsob::hajlasz_feasible_gradient(space->space, u->field, alpha));
  });
}

ms_status ms_lip_field(const ms_space* space, const ms_field* u, double radius, ms_field** out) {
  return guard([&] {
    need(space, "space");
    need(u, "field");
    need(out, "output handle");
    *out = wrap(metsob::lip_field(space->space, u->field, radius));
  });
}

ms_status ms_frac_maximal(const ms_space* space, const ms_field* f, double alpha, double p, ms_field** out) {
  return guard([&] {
    need(space, "space");
    need(f, "field");
    need(out, "output handle");
    *out = wrap(metsob::frac_maximal(space->space, f->field, alpha, p));
  });
}

ms_status ms_inequality_suite(const ms_space* space, const ms_field* const* corpus, size_t count, char** json) {
  return guard([&] {
    need(space, "space");
    need(corpus, "corpus");
    std::vector<ScalarField> fields;
    for (size_t k = 0; k < count; ++k) {
      need(corpus[k], "corpus field");
      fields.push_back(corpus[k]->field);
    }
    Json arr = Json::array();
    for (const auto& r : metsob::inequality_suite(space->space, fields, metsob::InequalityConfig{}))
      arr.push_back({{"id", r.id},
                     {"exact", r.exact},
                     {"worst_ratio", num(r.worst_ratio)},
                     {"evaluations", r.evaluations},
                     {"passed", r.passed}});
    emit(json, {{"results", arr}});
  });
}

ms_status ms_select_small_row(const double* a, size_t rows, size_t cols, double k_bound, double eps, size_t min_card,
                              size_t* j0, size_t* columns, size_t* n_columns) {
  return guard([&] {
    need(a, "matrix");
    need(j0, "j0");
    need(columns, "columns");
    need(n_columns, "n_columns");
    metsob::require(rows > 0 && cols > 0, ErrorCode::InvalidArgument, "matrix must be nonempty");
    std::vector<std::vector<double>> m(rows, std::vector<double>(cols));
    for (size_t j = 0; j < rows; ++j)
      for (size_t k = 0; k < cols; ++k) m[j][k] = a[j * cols + k];
    const auto sel = metsob::select_small_row(m, k_bound, eps, min_card);
    *j0 = sel.j0;
    *n_columns = sel.columns.size();
    std::copy(sel.columns.begin(), sel.columns.end(), columns);
  });
}

// ---- trace ----

ms_status ms_trace(const ms_space* space, const ms_field* u, double p, int k_max, double R, char** json,
                   ms_field** trace_out) {
  return guard([&] {
    need(space, "space");
    need(u, "field");
    auto rep = metsob::trace_field(space->space, u->field, p, k_max, R);
    Json besov = Json::array();
    for (const auto& [a, v] : rep.besov_seminorms) besov.push_back({{"alpha", a}, {"seminorm_p_inf", num(v)}});
    Json j{{"schema", 1},
           {"radii", rep.radii},
           {"cauchy_gaps", nums(rep.cauchy_gaps)},
           {"fitted_rate", num(rep.fitted_rate)},
           {"besov_seminorms", besov},
           {"truncated", rep.truncated},
           {"trace_lp_norm", num(metsob::lp_norm(space->space, rep.trace, p))}};
    if (json) emit(json, j);
    if (trace_out) *trace_out = wrap(std::move(rep.trace));
  });
}

ms_status ms_trace_besov(const ms_space* space, const ms_field* u, const ms_field* g, double p, double theta,
                         char** json) {
  return guard([&] {
    need(space, "space");
    need(u, "field u");
    need(g, "field g");
    const auto rep = metsob::trace_besov_report(space->space, u->field, g->field, p, theta, {0.1});
    Json extra = Json::array();
    for (const auto& [a, v] : rep.extra) extra.push_back({{"alpha", a}, {"seminorm_p_inf", num(v)}});
    emit(json, {{"schema", 1},
                {"smoothness", rep.smoothness},
                {"seminorm_p_inf", num(rep.seminorm_inf)},
                {"seminorm_p_p", num(rep.seminorm_pp)},
                {"extra", extra},
                {"hajlasz_ratio", num(rep.hajlasz_ratio)},
                {"norm_ratio", num(rep.norm_ratio)},
                {"maximal_weak_norm", num(rep.maximal_weak_norm)}});
  });
}

ms_status ms_weighted_trace(const ms_space* space, const ms_field* u, const ms_field* g, double p, double exponent,
                            double scale, double theta, char** json) {
  return guard([&] {
    need(space, "space");
    need(u, "field u");
    need(g, "field g");
    metsob::TraceWeight w;
    w.exponent = exponent;
    w.scale = scale;
    const auto rep = metsob::weighted_trace(space->space, u->field, g->field, p, w, theta);
    emit(json, {{"schema", 1},
                {"weight", w.describe()},
                {"weighted_norm", num(rep.weighted_norm)},
                {"mean_u", num(rep.mean_u)},
                {"deviation", num(rep.deviation)},
                {"ratio", num(rep.ratio)},
                {"exact_match", rep.exact_match},
                {"regime_ok", rep.regime_ok}});
  });
}

ms_status ms_detect_divergence(const ms_space* space, const ms_field* u, double eps, double R, char** json) {
  return guard([&] {
    need(space, "space");
    need(u, "field");
    const auto d = metsob::detect_divergence(space->space, u->field, eps, R);
    emit(json, {{"schema", 1},
                {"radii", d.radii},
                {"mean_average", nums(d.mean_average)},
                {"increasing_fraction", d.increasing_fraction},
                {"fit_c", num(d.fit_c)},
                {"fit_residual", num(d.fit_residual)},
                {"no_trace", d.no_trace}});
  });
}

// ---- covers ----

ms_status ms_cover_build(const ms_space* space, ms_cover** out) {
  return guard([&] {
    need(space, "space");
    need(out, "output handle");
    *out = new ms_cover{metsob::build_cover(space->space), space->space.size()};
  });
}

ms_status ms_cover_load(const ms_space* space, const char* path, ms_cover** out) {
  return guard([&] {
    need(space, "space");
    need(path, "path");
    need(out, "output handle");
    std::ifstream in(path);
    metsob::require(in.good(), ErrorCode::Io, std::string("cannot open cover file ") + path);
    Json j;
    in >> j;
    metsob::require(j.value("schema", 0) == 1, ErrorCode::Parse, "unsupported cover schema");
    auto c = std::make_unique<ms_cover>();
    c->points = space->space.size();
    c->cover.j0 = j.at("j0").get<int>();
    c->cover.overlap_bound = j.at("overlap_bound").get<std::size_t>();
    for (const auto& b : j.at("balls")) {
      metsob::WhitneyBall wb;
      wb.center = b.at("center").get<std::size_t>();
      wb.radius = b.at("radius").get<double>();
      wb.level = b.at("level").get<int>();
      wb.anchor = b.at("anchor").get<std::size_t>();
      metsob::require(wb.center < c->points && space->space.point(wb.center).region == Region::Interior,
                      ErrorCode::NoSuchPoint, "cover centre is not an interior point of this space");
      metsob::require(wb.anchor < c->points && space->space.point(wb.anchor).region == Region::Boundary,
                      ErrorCode::NoSuchPoint, "cover anchor is not a boundary point of this space");
      c->cover.balls.push_back(wb);
    }
    *out = c.release();
  });
}

ms_status ms_cover_save(const ms_cover* cover, const char* path) {
  return guard([&] {
    need(cover, "cover");
    need(path, "path");
    std::ofstream out(path);
    metsob::require(out.good(), ErrorCode::Io, std::string("cannot write cover file ") + path);
    out << cover_json(cover->cover).dump(1) << "\n";
  });
}

ms_status ms_cover_info(const ms_cover* cover, char** json) {
  return guard([&] {
    need(cover, "cover");
    std::map<int, std::size_t> per_level;
    for (const auto& b : cover->cover.balls) ++per_level[b.level];
    Json levels = Json::object();
    for (const auto& [l, n] : per_level) levels[std::to_string(l)] = n;
    emit(json, {{"balls", cover->cover.balls.size()},
                {"j0", cover->cover.j0},
                {"overlap_bound", cover->cover.overlap_bound},
                {"levels", levels}});
  });
}

ms_status ms_cover_check(const ms_space* space, const ms_cover* cover, size_t overlap_limit, char** json) {
  return guard([&] {
    need(space, "space");
    need(cover, "cover");
    metsob::require(cover->points == space->space.size(), ErrorCode::InvalidArgument,
                    "cover was built for a different space");
    const auto c = metsob::check_cover(space->space, cover->cover, overlap_limit);
    emit(json, {{"ok", c.ok()},
                {"radius_ok", c.radius_ok},
                {"level_ok", c.level_ok},
                {"coverage_ok", c.coverage_ok},
                {"overlap_ok", c.overlap_ok},
                {"anchor_ok", c.anchor_ok},
                {"disjoint_ok", c.disjoint_ok},
                {"partition_ok", c.partition_ok},
                {"worst_radius_error", c.worst_radius_error},
                {"uncovered", c.uncovered},
                {"measured_overlap", c.measured_overlap},
                {"intersecting_pairs", c.intersecting_pairs},
                {"worst_partition_error", c.worst_partition_error}});
  });
}

void ms_cover_free(ms_cover* cover) { delete cover; }

// ---- extension ----

ms_status ms_extend(const ms_space* space, const ms_cover* cover, const ms_field* f, int mode, double p, int k_max,
                    double theta, ms_field** F_out, char** json) {
  return guard([&] {
    need(space, "space");
    need(cover, "cover");
    need(f, "field");
    metsob::require(cover->points == space->space.size(), ErrorCode::InvalidArgument,
                    "cover was built for a different space");
    Json j{{"schema", 1}};
    ScalarField F;
    if (mode == MS_EXTEND_BESOV) {
      F = metsob::extend_besov(space->space, cover->cover, f->field);
      const auto T = metsob::trace_average(space->space, F, metsob::smallest_trace_radius(space->space));
      ScalarField diff = T;
      for (std::size_t k = 0; k < diff.values.size(); ++k) diff.values[k] -= f->field.values[k];
      j["mode"] = "besov";
      j["F_lp_norm"] = num(metsob::lp_norm(space->space, F, p));
      j["f_lp_norm"] = num(metsob::lp_norm(space->space, f->field, p));
      j["roundtrip_error"] = num(metsob::lp_norm(space->space, diff, p));
    } else if (mode == MS_EXTEND_LP) {
      auto rep = metsob::extend_lp(space->space, cover->cover, f->field, p, k_max, theta);
      Json ratios = Json::object();
      for (const auto& [k, v] : rep.norm_ratios) ratios[k] = num(v);
      Json layers = Json::array();
      for (const auto& l : rep.layers) layers.push_back({{"k", l.k}, {"rho", l.rho}, {"L", l.L}, {"step", l.step}});
      j["mode"] = "lp";
      j["norm_ratios"] = ratios;
      j["roundtrip_error"] = num(rep.roundtrip_error);
      j["layers"] = layers;
      j["schedule_ok"] = rep.schedule_ok;
      j["truncated"] = rep.truncated;
      j["regime_warning"] = rep.regime_warning;
      F = std::move(rep.F);
    } else {
      metsob::fail(ErrorCode::InvalidArgument, "mode must be besov (0) or lp (1)");
    }
    if (json) emit(json, j);
    if (F_out) *F_out = wrap(std::move(F));
  });
}

ms_status ms_extension_gradient_report(const ms_space* space, const ms_cover* cover, const ms_field* f, double p,
                                       double vartheta, char** json) {
  return guard([&] {
    need(space, "space");
    need(cover, "cover");
    need(f, "field");
    const auto r = metsob::extension_gradient_report(space->space, cover->cover, f->field, p, vartheta);
    emit(json, {{"lip_norm", num(r.lip_norm)},
                {"besov_norm", num(r.besov_norm)},
                {"ratio", num(r.ratio)},
                {"lp_ratio", num(r.lp_ratio)},
                {"pointwise_ratio", num(r.pointwise_ratio)}});
  });
}

ms_status ms_roundtrip_error(const ms_space* space, const ms_cover* cover, const ms_field* f, double p, int mode,
                             double* out) {
  return guard([&] {
    need(space, "space");
    need(cover, "cover");
    need(f, "field");
    need(out, "output");
    metsob::require(mode == MS_EXTEND_BESOV || mode == MS_EXTEND_LP, ErrorCode::InvalidArgument, "unknown mode");
    *out = metsob::roundtrip_error(space->space, cover->cover, f->field, p,
                                   mode == MS_EXTEND_BESOV ? metsob::ExtensionMode::Besov : metsob::ExtensionMode::Lp);
  });
}

// ---- experiments ----

ms_status ms_constants_path(char** out) {
  return guard([&] {
    need(out, "output string");
    *out = dup(metsob::default_constants_path());
  });
}

ms_status ms_experiment_run(const char* config_json, const char* constants_path, int* passed, char** report) {
  return guard([&] {
    need(config_json, "config");
    const Json j = Json::parse(config_json);
    auto cfg = metsob::default_experiment_config(metsob::parse_experiment_id(j.at("experiment").get<std::string>()));
    if (j.contains("resolutions")) cfg.resolutions = j["resolutions"].get<std::vector<int>>();
    cfg.p = j.value("p", cfg.p);
    cfg.eps = j.value("eps", cfg.eps);
    cfg.n = j.value("n", cfg.n);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.fields = j.value("fields", cfg.fields);
    cfg.out_dir = j.value("out_dir", std::string());
    const auto fc = frozen_or_empty(constants_path, false);
    const auto res = metsob::run_experiment(cfg, fc.values.empty() ? nullptr : &fc);
    if (!cfg.out_dir.empty()) metsob::write_experiment(cfg, res);
    if (passed) *passed = res.pass ? 1 : 0;
    if (report) emit(report, res.report);
  });
}

ms_status ms_freeze(const char* path, const char* config_json, char** json) {
  return guard([&] {
    need(path, "path");
    metsob::FreezeConfig cfg;
    if (config_json && *config_json) {
      const Json j = Json::parse(config_json);
      cfg.seed = j.value("seed", cfg.seed);
      cfg.square_resolution = j.value("square_resolution", cfg.square_resolution);
      cfg.whitney_resolution = j.value("whitney_resolution", cfg.whitney_resolution);
      cfg.disc_resolution = j.value("disc_resolution", cfg.disc_resolution);
      cfg.norm_resolution = j.value("norm_resolution", cfg.norm_resolution);
      cfg.norm_fields = j.value("norm_fields", cfg.norm_fields);
      cfg.extension_fields = j.value("extension_fields", cfg.extension_fields);
      cfg.trace_fields = j.value("trace_fields", cfg.trace_fields);
    }
    const auto values = metsob::measure_constants(cfg);
    metsob::write_constants(path, values, metsob::freeze_reference(cfg));
    if (json) emit(json, values);
  });
}

ms_status ms_criterion_run(int id, const char* constants_path, int* passed, char** json) {
  return guard([&] {
    metsob::require(id >= 1 && id <= 9, ErrorCode::InvalidArgument, "criterion id must be 1..9");
    metsob::CriterionResult r;
    auto fc = [&] { return frozen_or_empty(constants_path, true); };
    switch (id) {
      case 1: r = metsob::criterion_norm_equivalence(fc()); break;
      case 2: r = metsob::criterion_inequality_suite(); break;
      case 3: r = metsob::criterion_whitney(fc()); break;
      case 4: r = metsob::criterion_extension_bounds(fc()); break;
      case 5: r = metsob::criterion_roundtrip(); break;
      case 6: r = metsob::criterion_cusp_example(); break;
      case 7: r = metsob::criterion_no_trace(fc()); break;
      case 8: r = metsob::criterion_selection(); break;
      case 9: r = metsob::criterion_oracles(); break;
    }
    if (passed) *passed = r.pass ? 1 : 0;
    if (json) emit(json, metsob::to_json(r));
  });
}

}  // extern "C"
