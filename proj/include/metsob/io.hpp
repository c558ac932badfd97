#pragma once

#include <string>
#include <vector>

#include "metsob/space.hpp"

namespace metsob {

// Point-cloud text format: `x y [z] mu|bd weight` per line, '#' starts a comment.
PointCloudSpace load_space(const std::string& path, const std::string& distance_matrix_path = "");
void save_space(const PointCloudSpace& space, const std::string& path);

// Binary distance matrix: magic "MSDM1", uint64 point count, row-major float64.
std::vector<double> load_distance_matrix(const std::string& path, std::size_t expected_points);
void save_distance_matrix(const std::vector<double>& m, std::size_t n, const std::string& path);

// Field format: `index value` lines with indices local to the region.
ScalarField load_field(const PointCloudSpace& space, Region region, const std::string& path);
void save_field(const ScalarField& f, const std::string& path);

// Spot-check of the triangle inequality on `samples` random triples; returns the
// largest violation d(a,c) - d(a,b) - d(b,c) found (<= 0 means none).
double triangle_spot_check(const PointCloudSpace& space, std::size_t samples, unsigned seed);

}  // namespace metsob
