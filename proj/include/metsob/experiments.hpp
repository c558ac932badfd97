#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "metsob/constants.hpp"
#include "metsob/domains.hpp"
#include "metsob/space.hpp"

namespace metsob {

using Json = nlohmann::json;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double a = 0, double b = 1) { return std::uniform_real_distribution<double>(a, b)(eng_); }
  double normal() { return std::normal_distribution<double>(0, 1)(eng_); }
  double gamma(double shape) { return std::gamma_distribution<double>(shape, 1)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

enum class FieldFamily { Fourier, Jump, Cone, Power, Noise };
const char* field_family_name(FieldFamily f);

ScalarField random_field(const PointCloudSpace& space, Region region, FieldFamily family, Rng& rng);
// `count` fields cycling through `families`; field k uses seed + k.
std::vector<ScalarField> field_corpus(const PointCloudSpace& space, Region region, std::size_t count,
                                      std::uint64_t seed, const std::vector<FieldFamily>& families);
std::vector<FieldFamily> all_families();
std::vector<FieldFamily> lipschitz_families();

// Sample of a function of the coordinates.
template <class F>
ScalarField sample(const PointCloudSpace& space, Region region, F&& fn) {
  ScalarField out{region, {}};
  out.values.reserve(space.count(region));
  for (std::size_t id : space.ids(region)) out.values.push_back(fn(space.point(id).x));
  return out;
}

// u = x1^-a / log(e/x1) on the cusp and its gradient (a+1) u / x1.
ScalarField cusp_example_field(const PointCloudSpace& space, double a);
ScalarField cusp_example_gradient(const PointCloudSpace& space, double a);
// u = |x|^-a / log(e/|x|) on the weighted square and its gradient (a+1) u / |x|.
ScalarField radial_example_field(const PointCloudSpace& space, double a);
ScalarField radial_example_gradient(const PointCloudSpace& space, double a);
// log(e/dist)^e with the exact distance to the boundary curve of `kind`.
ScalarField log_distance_field(const PointCloudSpace& space, DomainKind kind, double e);
// c / (dist * log(e/dist)^e).
ScalarField log_distance_gradient(const PointCloudSpace& space, DomainKind kind, double c, double e);

struct Check {
  std::string name;
  double value = 0;
  double bound = 0;   // upper bound for "<=" and "in", lower bound for ">="
  double lower = 0;   // lower bound for "in"
  std::string relation;  // "<=", ">=", "in"
  bool pass = false;
};
Json to_json(const Check& c);

enum class ExperimentId { E1_CuspTrace, E2_WeightedSquare, E3_WeightedDiscNoTrace, E4_SharpnessDisc, E5_RoundTrip,
                          E6_InequalitySuite };
ExperimentId parse_experiment_id(const std::string& name);
std::string experiment_name(ExperimentId id);

struct ExperimentConfig {
  ExperimentId id = ExperimentId::E6_InequalitySuite;
  std::vector<int> resolutions;
  double p = 2;
  double eps = 0.25;
  int n = 0;
  std::uint64_t seed = 1;
  int fields = 0;
  std::string out_dir;
};

// Defaults per experiment: resolutions, p, eps, field counts.
ExperimentConfig default_experiment_config(ExperimentId id);
void validate_experiment_config(const ExperimentConfig& cfg);

struct ExperimentResult {
  Json report;               // schema 1; includes "checks" and "pass"
  std::vector<std::vector<std::string>> table;  // CSV rows: experiment, resolution, quantity, value
  bool pass = false;
};

// `frozen` may be null; checks that need a frozen constant are then skipped.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const FrozenConstants* frozen);
// Writes report.json and tables.csv into cfg.out_dir.
void write_experiment(const ExperimentConfig& cfg, const ExperimentResult& res);

struct FreezeConfig {
  std::uint64_t seed = 1000;
  int square_resolution = 32;  // extension constants
  int whitney_resolution = 64;
  int disc_resolution = 48;
  int norm_resolution = 128;
  int norm_fields = 40;
  int extension_fields = 20;
  int trace_fields = 12;
};

// Measures every constant the acceptance criteria and the tests compare against.
std::map<std::string, double> measure_constants(const FreezeConfig& cfg);
std::map<std::string, std::string> freeze_reference(const FreezeConfig& cfg);

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  double seconds = 0;
  double budget = 0;
  std::string summary;
  std::vector<Check> checks;
  Json detail;
};
Json to_json(const CriterionResult& r);

CriterionResult criterion_norm_equivalence(const FrozenConstants& fc);
CriterionResult criterion_inequality_suite();
CriterionResult criterion_whitney(const FrozenConstants& fc);
CriterionResult criterion_extension_bounds(const FrozenConstants& fc);
CriterionResult criterion_roundtrip();
CriterionResult criterion_cusp_example();
CriterionResult criterion_no_trace(const FrozenConstants& fc);
CriterionResult criterion_selection();
CriterionResult criterion_oracles();

// Shared measurement kernels (also used by freeze).
struct ExtensionRatios {
  double lp = 0;    // max over fields of ||Ef||_p / (diam^{vartheta/p} ||f||_p)
  double grad = 0;  // max over fields of ||Lip Ef||_p / ||f||_{B^{1-vartheta/p}_{p,p}}
};
ExtensionRatios square_extension_ratios(int resolution, std::uint64_t seed, std::size_t fields, double p);
double norm_equivalence_constant(int resolution, std::uint64_t seed, std::size_t fields);
double weighted_trace_constant(int resolution, std::uint64_t seed, std::size_t fields, double eps);

}  // namespace metsob
