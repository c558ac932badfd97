#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "metsob/functionals.hpp"
#include "metsob/io.hpp"

using namespace testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "metsob_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("constants file round trip") {
  const auto path = scratch("constants.json").string();
  write_constants(path, {{"b", 2.5}, {"a", 1}}, {{"seed", "7"}});
  const auto fc = load_constants(path);
  CHECK(fc.path == path);
  CHECK(fc.get("a") == 1);
  CHECK(fc.get("b") == 2.5);
  CHECK_FALSE(fc.has("c"));
  CHECK_THROWS_AS(fc.get("c"), Error);

  std::ofstream(path) << "{\"schema\": 2, \"constants\": {}}";
  CHECK_THROWS_AS(load_constants(path), Error);
  CHECK_THROWS_AS(load_constants(scratch("missing.json").string()), Error);
}

TEST_CASE("frozen comparisons") {
  CHECK(compare_upper("x", 1.5, 1).pass);
  CHECK_FALSE(compare_upper("x", 1.51, 1).pass);
  CHECK(compare_upper("x", 0, 1).pass);
  CHECK(compare_band("x", 1 / 1.5, 1).pass);
  CHECK_FALSE(compare_band("x", 0.6, 1).pass);
  CHECK_FALSE(compare_band("x", 1.6, 1).pass);
  CHECK(compare_band("x", 1.2, 1).two_sided);
}

TEST_CASE("shipped constants file holds every criterion constant") {
  const auto& fc = frozen();
  for (const char* k : {"norm_equiv_C", "whitney_overlap_square", "whitney_overlap_cusp",
                        "whitney_overlap_weighted_disc", "extension_lp_C", "extension_lip_C", "weighted_trace_C"}) {
    CHECK_MESSAGE(fc.has(k), k);
    if (fc.has(k)) CHECK(fc.get(k) > 0);
  }
}

TEST_CASE("experiment ids and config validation") {
  CHECK(parse_experiment_id("E3") == ExperimentId::E3_WeightedDiscNoTrace);
  CHECK(parse_experiment_id(experiment_name(ExperimentId::E5_RoundTrip)) == ExperimentId::E5_RoundTrip);
  CHECK_THROWS_AS(parse_experiment_id("E7"), Error);

  auto c = default_experiment_config(ExperimentId::E1_CuspTrace);
  CHECK_NOTHROW(validate_experiment_config(c));
  c.p = 3;
  CHECK_THROWS_AS(validate_experiment_config(c), Error);
  c = default_experiment_config(ExperimentId::E5_RoundTrip);
  c.resolutions = {64, 32};
  CHECK_THROWS_AS(validate_experiment_config(c), Error);
  c = default_experiment_config(ExperimentId::E6_InequalitySuite);
  c.fields = 0;
  CHECK_THROWS_AS(validate_experiment_config(c), Error);
}

TEST_CASE("field corpus is deterministic and cycles through the families") {
  const auto s = square(16);
  const auto a = field_corpus(s, Region::Boundary, 5, 42, all_families());
  const auto b = field_corpus(s, Region::Boundary, 5, 42, all_families());
  REQUIRE(a.size() == 5);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].values == b[k].values);
  const auto c = field_corpus(s, Region::Boundary, 5, 43, all_families());
  CHECK(a[1].values != c[0].values);
  for (const auto& f : a) CHECK(f.values.size() == s.count(Region::Boundary));
}

TEST_CASE("freeze rejects empty corpora") {
  FreezeConfig cfg;
  cfg.norm_fields = 0;
  CHECK_THROWS_AS(measure_constants(cfg), Error);
}

TEST_CASE("E6 writes a report and a table") {
  auto cfg = default_experiment_config(ExperimentId::E6_InequalitySuite);
  cfg.resolutions = {12};
  cfg.fields = 4;
  cfg.out_dir = scratch("e6").string();
  const auto res = run_experiment(cfg, &frozen());
  CHECK(res.pass);
  CHECK(res.report["schema"] == 1);
  CHECK(res.report["checks"].is_array());
  write_experiment(cfg, res);
  CHECK(fs::exists(fs::path(cfg.out_dir) / "report.json"));
  std::ifstream csv(fs::path(cfg.out_dir) / "tables.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "experiment,resolution,quantity,value");
}

TEST_CASE("space and field files round trip") {
  const auto s = domain(DomainKind::Cusp, 16);
  const auto sp = scratch("cusp.txt").string();
  save_space(s, sp);
  const auto t = load_space(sp);
  REQUIRE(t.size() == s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(t.point(k).region == s.point(k).region);
    CHECK(t.point(k).weight == s.point(k).weight);
    CHECK(t.point(k).x[0] == s.point(k).x[0]);
  }
  const auto f = field_corpus(s, Region::Interior, 1, 3, all_families())[0];
  const auto fp = scratch("field.txt").string();
  save_field(f, fp);
  CHECK(load_field(t, Region::Interior, fp).values == f.values);
  CHECK_THROWS_AS(load_field(t, Region::Boundary, fp), Error);
  CHECK(triangle_spot_check(t, 200, 1) <= 1e-12);
}
