#include "metsob/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace metsob {

namespace {

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  require(in.good(), ErrorCode::Io, "cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  require(out.good(), ErrorCode::Io, "cannot write " + path);
  return out;
}

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

PointCloudSpace load_space(const std::string& path, const std::string& distance_matrix_path) {
  auto in = open_in(path);
  std::vector<PointCloudSpace::Point> pts;
  int dim = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(strip_comment(line));
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    require(tok.size() == 4 || tok.size() == 5, ErrorCode::Parse, where + ": expected `x y [z] mu|bd weight`");
    const int d = static_cast<int>(tok.size()) - 2;
    require(dim == 0 || dim == d, ErrorCode::Parse, where + ": inconsistent dimension");
    dim = d;
    PointCloudSpace::Point p;
    try {
      for (int k = 0; k < d; ++k) p.x[k] = std::stod(tok[k]);
      p.weight = std::stod(tok[d + 1]);
    } catch (const std::exception&) {
      fail(ErrorCode::Parse, where + ": malformed number");
    }
    const std::string& reg = tok[d];
    require(reg == "mu" || reg == "bd", ErrorCode::Parse, where + ": region must be `mu` or `bd`");
    p.region = reg == "mu" ? Region::Interior : Region::Boundary;
    require(p.weight > 0 && std::isfinite(p.weight), ErrorCode::Parse, where + ": weight must be positive");
    pts.push_back(p);
  }
  require(!pts.empty(), ErrorCode::Parse, path + ": no points");
  std::vector<double> dm;
  if (!distance_matrix_path.empty()) dm = load_distance_matrix(distance_matrix_path, pts.size());
  return PointCloudSpace(dim, std::move(pts), std::move(dm));
}

void save_space(const PointCloudSpace& space, const std::string& path) {
  auto out = open_out(path);
  out << "# x y" << (space.dim() == 3 ? " z" : "") << " region weight\n";
  out << std::setprecision(17);
  for (const auto& p : space.points()) {
    for (int d = 0; d < space.dim(); ++d) out << p.x[d] << ' ';
    out << (p.region == Region::Interior ? "mu" : "bd") << ' ' << p.weight << '\n';
  }
  require(out.good(), ErrorCode::Io, "write failed: " + path);
}

std::vector<double> load_distance_matrix(const std::string& path, std::size_t expected_points) {
  auto in = open_in(path, std::ios::binary);
  char magic[5];
  in.read(magic, 5);
  require(in.good() && std::memcmp(magic, "MSDM1", 5) == 0, ErrorCode::Parse, path + ": bad distance-matrix header");
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  require(in.good() && n == expected_points, ErrorCode::Parse, path + ": point count does not match the cloud");
  std::vector<double> m(n * n);
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  require(in.good(), ErrorCode::Parse, path + ": truncated distance matrix");
  return m;
}

void save_distance_matrix(const std::vector<double>& m, std::size_t n, const std::string& path) {
  require(m.size() == n * n, ErrorCode::InvalidArgument, "distance matrix has wrong size");
  auto out = open_out(path, std::ios::binary);
  out.write("MSDM1", 5);
  const std::uint64_t nn = n;
  out.write(reinterpret_cast<const char*>(&nn), sizeof nn);
  out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  require(out.good(), ErrorCode::Io, "write failed: " + path);
}

ScalarField load_field(const PointCloudSpace& space, Region region, const std::string& path) {
  auto in = open_in(path);
  ScalarField f{region, std::vector<double>(space.count(region), std::nan(""))};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(strip_comment(line));
    std::string a, b;
    if (!(ss >> a)) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    require(static_cast<bool>(ss >> b), ErrorCode::Parse, where + ": expected `index value`");
    std::size_t i = 0;
    double v = 0;
    try {
      i = std::stoul(a);
      v = std::stod(b);
    } catch (const std::exception&) {
      fail(ErrorCode::Parse, where + ": malformed entry");
    }
    require(i < f.values.size(), ErrorCode::NoSuchPoint, where + ": no such point " + a);
    require(std::isfinite(v), ErrorCode::Parse, where + ": value must be finite");
    f.values[i] = v;
  }
  for (std::size_t i = 0; i < f.values.size(); ++i)
    require(!std::isnan(f.values[i]), ErrorCode::Parse, path + ": missing value for index " + std::to_string(i));
  return f;
}

void save_field(const ScalarField& f, const std::string& path) {
  auto out = open_out(path);
  out << "# " << region_name(f.region) << " field: index value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < f.values.size(); ++i) out << i << ' ' << f.values[i] << '\n';
  require(out.good(), ErrorCode::Io, "write failed: " + path);
}

double triangle_spot_check(const PointCloudSpace& space, std::size_t samples, unsigned seed) {
  const std::size_t n = space.size();
  if (n < 3) return 0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
    worst = std::max(worst, space.dist(a, c) - space.dist(a, b) - space.dist(b, c));
  }
  return worst;
}

}  // namespace metsob
