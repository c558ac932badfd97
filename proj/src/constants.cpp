#include "metsob/constants.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "json.hpp"
#include "metsob/error.hpp"

#ifndef METSOB_DEFAULT_CONSTANTS
#define METSOB_DEFAULT_CONSTANTS "data/constants.json"
#endif

namespace metsob {

std::string default_constants_path() {
  if (const char* env = std::getenv("METSOB_CONSTANTS"); env && *env) return env;
  return METSOB_DEFAULT_CONSTANTS;
}

double FrozenConstants::get(const std::string& name) const {
  const auto it = values.find(name);
  require(it != values.end(), ErrorCode::InvalidArgument, "constant '" + name + "' is not frozen in " + path);
  return it->second;
}

FrozenConstants load_constants(const std::string& path_in) {
  FrozenConstants fc;
  fc.path = path_in.empty() ? default_constants_path() : path_in;
  std::ifstream in(fc.path);
  require(in.good(), ErrorCode::Io, "cannot open constants file " + fc.path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, "malformed constants file " + fc.path + ": " + e.what());
  }
  require(j.value("schema", 0) == 1, ErrorCode::Parse, "unsupported constants schema in " + fc.path);
  require(j.contains("constants") && j["constants"].is_object(), ErrorCode::Parse, "constants file lacks a constants map");
  for (const auto& [k, v] : j["constants"].items()) {
    require(v.is_number(), ErrorCode::Parse, "constant '" + k + "' is not a number");
    fc.values[k] = v.get<double>();
  }
  return fc;
}

void write_constants(const std::string& path, const std::map<std::string, double>& values,
                     const std::map<std::string, std::string>& reference) {
  require(!values.empty(), ErrorCode::InvalidArgument, "refusing to write an empty constants file");
  nlohmann::json j;
  j["schema"] = 1;
  j["constants"] = nlohmann::json::object();
  for (const auto& [k, v] : values) {
    require(std::isfinite(v), ErrorCode::Internal, "constant '" + k + "' is not finite");
    j["constants"][k] = v;
  }
  j["reference"] = reference;
  std::ofstream out(path);
  require(out.good(), ErrorCode::Io, "cannot write constants file " + path);
  out << j.dump(2) << "\n";
}

Comparison compare_upper(const std::string& name, double measured, double frozen, double factor) {
  Comparison c{name, measured, frozen, factor, false, false};
  c.pass = std::isfinite(measured) && measured <= factor * frozen;
  return c;
}

Comparison compare_band(const std::string& name, double measured, double frozen, double factor) {
  Comparison c{name, measured, frozen, factor, true, false};
  c.pass = std::isfinite(measured) && measured <= factor * frozen && measured >= frozen / factor;
  return c;
}

}  // namespace metsob
