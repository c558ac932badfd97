#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "metsob/space.hpp"

namespace metsob {

enum class DomainKind { UnitSquare, Cusp, WeightedSquare, WeightedDisc, SharpnessDisc };

struct DomainSpec {
  DomainKind kind = DomainKind::UnitSquare;
  int resolution = 64;           // interior grid cells per unit length
  int boundary_resolution = 0;   // boundary samples per unit length; 0 means `resolution`
  double eps = 0.25;             // WeightedDisc / SharpnessDisc parameter
  int n = 0;                     // SharpnessDisc exponent; 0 means ceil(2/eps)
};

DomainKind parse_domain_kind(const std::string& name);
std::string domain_kind_name(DomainKind kind);
int sharpness_exponent(const DomainSpec& spec);

PointCloudSpace generate(const DomainSpec& spec);

// Exact distance to the boundary curve of the continuous domain (not the sampled
// boundary). Available for every kind.
double analytic_boundary_distance(DomainKind kind, const Coord& x);
// Exact interior mass and boundary length of the continuous domain.
double analytic_interior_mass(const DomainSpec& spec);
double analytic_boundary_length(DomainKind kind);

enum class PathMetric { Euclidean, QuasiHyperbolic };

// Neighbour graph on interior points; edges join points closer than twice the
// interior spacing.
class CurveGraph {
 public:
  explicit CurveGraph(const PointCloudSpace& space);

  struct Tree {
    std::size_t root = 0;
    std::vector<std::size_t> parent;  // interior local index; root points to itself
    std::vector<double> length;       // arclength along the tree path to the root
    std::vector<std::size_t> order;   // settle order (parents precede children)
  };
  // Shortest-path tree; every node is reachable (the graph is connected).
  Tree tree(std::size_t root_local, PathMetric metric) const;
  // Vertices of the tree path from `from` to the tree root, inclusive.
  static std::vector<std::size_t> path_to_root(const Tree& t, std::size_t from);

  double connectivity_radius() const { return radius_; }
  std::size_t size() const { return offsets_.size() - 1; }

 private:
  const PointCloudSpace* space_;
  double radius_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> nbr_;
  std::vector<double> len_;
};

std::vector<double> default_constant_grid();

struct GeometryCheck {
  bool ok = false;
  double best_c = 0;  // largest passing grid value, 0 if none
};

GeometryCheck john_check(const PointCloudSpace& space, std::size_t center_id, const std::vector<double>& c_grid);
GeometryCheck uniform_check(const PointCloudSpace& space, const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                            const std::vector<double>& c_grid);
// Interior point farthest from the boundary (lowest id on ties).
std::size_t deepest_interior_point(const PointCloudSpace& space);

struct ChainBall {
  int k = 0;  // signed chain index; 0 is B(z, 3 d(y,z))
  Coord center{};
  double radius = 0;
  double t = 0;
};

struct Chain {
  std::vector<ChainBall> balls;  // ordered from the y side through B_0 to the z side
  std::size_t z = 0, y = 0;
  double john_constant = 0;
  double lambda = 1;
  double alpha() const { return 2 - john_constant / (2 * lambda); }
  double beta() const { return john_constant / (2 * lambda * (alpha() + 2 / john_constant)); }
};

Chain build_chain(const PointCloudSpace& space, std::size_t z, std::size_t y, double c_j, double lambda);
Chain build_chain(const PointCloudSpace& space, std::size_t z, std::size_t y, double c_j, double lambda,
                  std::size_t center_id);

struct ChainCheck {
  bool containment = true;
  bool sandwich = true;
  bool carrot = true;
  double worst_containment = 0;  // max over k of (needed radius / alpha r_k) - 1
  double worst_sandwich = 0;
  double worst_carrot = 0;
  bool ok() const { return containment && sandwich && carrot; }
};

// Checks the chain invariants on the interior point set.
ChainCheck verify_chain(const PointCloudSpace& space, const Chain& chain);

}  // namespace metsob
