// Exercises the shared library through its C header only.
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "metsob/metsob.h"

namespace {

using Json = nlohmann::json;

Json take(char* s) {
  REQUIRE(s != nullptr);
  Json j = Json::parse(s);
  ms_string_free(s);
  return j;
}

struct Space {
  ms_space* h = nullptr;
  ~Space() { ms_space_free(h); }
};
struct Field {
  ms_field* h = nullptr;
  ~Field() { ms_field_free(h); }
};
struct Cover {
  ms_cover* h = nullptr;
  ~Cover() { ms_cover_free(h); }
};

}  // namespace

TEST_CASE("status names and errors") {
  CHECK(std::string(ms_status_name(MS_OK)) == "ok");
  CHECK(std::strlen(ms_version()) > 0);
  Space s;
  CHECK(ms_space_generate("torus", 16, 0, 0.25, 0, &s.h) == MS_ERR_INVALID_ARGUMENT);
  CHECK(s.h == nullptr);
  CHECK(std::strlen(ms_last_error()) > 0);
  CHECK(ms_space_generate("square", 16, 0, 0.25, 0, nullptr) == MS_ERR_INVALID_ARGUMENT);
  size_t n = 0;
  CHECK(ms_space_count(nullptr, MS_INTERIOR, &n) == MS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("hand-built space: masses, balls and fields") {
  const double coords[] = {0, 0, 1, 0, 0, 1, 2, 2};
  const int regions[] = {MS_INTERIOR, MS_INTERIOR, MS_INTERIOR, MS_BOUNDARY};
  const double weights[] = {0.5, 0.25, 0.25, 1};
  Space s;
  REQUIRE(ms_space_from_points(2, 4, coords, regions, weights, &s.h) == MS_OK);
  size_t n = 0;
  REQUIRE(ms_space_count(s.h, MS_INTERIOR, &n) == MS_OK);
  CHECK(n == 3);
  size_t gid = 0;
  CHECK(ms_space_global_id(s.h, MS_BOUNDARY, 0, &gid) == MS_OK);
  CHECK(gid == 3);

  double m = 0;
  REQUIRE(ms_space_ball_mass(s.h, 0, 1.0, MS_INTERIOR, &m) == MS_OK);
  CHECK(m == doctest::Approx(0.5));  // open ball excludes distance 1
  REQUIRE(ms_space_ball_mass(s.h, 0, 1.01, MS_INTERIOR, &m) == MS_OK);
  CHECK(m == doctest::Approx(1.0));
  CHECK(ms_space_ball_mass(s.h, 9, 1.0, MS_INTERIOR, &m) == MS_ERR_NO_SUCH_POINT);
  CHECK(ms_space_ball_mass(s.h, 0, 0, MS_INTERIOR, &m) == MS_ERR_INVALID_ARGUMENT);

  size_t ids[1];
  size_t count = 0;
  const double c[] = {0.5, 0.5};
  REQUIRE(ms_space_ball_members(s.h, SIZE_MAX, c, 0.8, MS_INTERIOR, ids, 1, &count) == MS_OK);
  CHECK(count == 3);
  CHECK(ids[0] == 0);

  const double vals[] = {2, -4, 0};
  Field f;
  REQUIRE(ms_field_create(s.h, MS_INTERIOR, vals, 3, &f.h) == MS_OK);
  double norm = 0;
  REQUIRE(ms_lp_norm(s.h, f.h, 2, &norm) == MS_OK);
  CHECK(norm == doctest::Approx(std::sqrt(0.5 * 4 + 0.25 * 16)));
  Field bad;
  CHECK(ms_field_create(s.h, MS_INTERIOR, vals, 2, &bad.h) == MS_ERR_INVALID_ARGUMENT);
  const double* v = nullptr;
  size_t nv = 0;
  REQUIRE(ms_field_values(f.h, &v, &nv) == MS_OK);
  CHECK(nv == 3);
  CHECK(v[1] == -4);

  const double bad_w[] = {0.5, 0.25, -1, 1};
  Space t;
  CHECK(ms_space_from_points(2, 4, coords, regions, bad_w, &t.h) != MS_OK);
}

TEST_CASE("generated square: cover, extension and trace through the C API") {
  Space s;
  REQUIRE(ms_space_generate("square", 24, 0, 0.25, 0, &s.h) == MS_OK);
  const Json info = take([&] {
    char* j = nullptr;
    REQUIRE(ms_space_info(s.h, &j) == MS_OK);
    return j;
  }());
  CHECK(info["dim"] == 2);

  Cover cv;
  REQUIRE(ms_cover_build(s.h, &cv.h) == MS_OK);
  char* js = nullptr;
  REQUIRE(ms_cover_check(s.h, cv.h, 0, &js) == MS_OK);
  CHECK(take(js)["ok"] == true);

  Field f;
  REQUIRE(ms_field_random(s.h, MS_BOUNDARY, "fourier", 5, &f.h) == MS_OK);
  Field F;
  REQUIRE(ms_extend(s.h, cv.h, f.h, MS_EXTEND_BESOV, 2, 40, -1, &F.h, &js) == MS_OK);
  ms_string_free(js);
  int region = -1;
  REQUIRE(ms_field_region(F.h, &region) == MS_OK);
  CHECK(region == MS_INTERIOR);

  Field T;
  REQUIRE(ms_trace(s.h, F.h, 2, 8, 0, &js, &T.h) == MS_OK);
  const Json tr = take(js);
  CHECK(tr.contains("cauchy_gaps"));
  double err = 0;
  REQUIRE(ms_roundtrip_error(s.h, cv.h, f.h, 2, MS_EXTEND_BESOV, &err) == MS_OK);
  CHECK(err >= 0);
  CHECK(err < 1);

  // Interior field where a boundary one is required.
  CHECK(ms_extend(s.h, cv.h, F.h, MS_EXTEND_BESOV, 2, 40, -1, nullptr, &js) == MS_ERR_INVALID_ARGUMENT);
  Field g;
  REQUIRE(ms_field_random(s.h, MS_INTERIOR, "cone", 3, &g.h) == MS_OK);
  CHECK(ms_trace_besov(s.h, g.h, g.h, 2, 2, &js) == MS_ERR_SUPERCRITICAL_TRACE);
}

TEST_CASE("row selection through the C API") {
  const double a[] = {0.9, 0.0, 0.1, 0.1, 1.0, 0.2};  // 2 x 3
  size_t j0 = 9, cols[3], nc = 0;
  REQUIRE(ms_select_small_row(a, 2, 3, 1.5, 0.15, 1, &j0, cols, &nc) == MS_OK);
  CHECK(j0 == 0);
  CHECK(nc == 2);
  CHECK(ms_select_small_row(a, 2, 3, 0.5, 0.15, 1, &j0, cols, &nc) == MS_ERR_HYPOTHESIS_FAILED);
}

TEST_CASE("experiment entry point") {
  char* js = nullptr;
  int passed = 0;
  REQUIRE(ms_experiment_run(R"({"experiment": "E6", "resolutions": [12], "fields": 3})", nullptr, &passed, &js) ==
          MS_OK);
  const Json rep = take(js);
  CHECK(passed == 1);
  CHECK(rep["pass"] == true);
  CHECK(ms_experiment_run(R"({"experiment": "E9"})", nullptr, &passed, &js) == MS_ERR_INVALID_ARGUMENT);
  CHECK(ms_experiment_run("not json", nullptr, &passed, &js) == MS_ERR_PARSE);
  CHECK(ms_criterion_run(10, nullptr, &passed, &js) == MS_ERR_INVALID_ARGUMENT);
}
