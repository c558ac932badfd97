#pragma once

#include <map>
#include <string>

namespace metsob {

// Path of the frozen-constants file: $METSOB_CONSTANTS if set, else the file
// shipped in data/.
std::string default_constants_path();

struct FrozenConstants {
  std::string path;
  std::map<std::string, double> values;
  bool has(const std::string& name) const { return values.count(name) != 0; }
  // Throws InvalidArgument when the constant was never frozen.
  double get(const std::string& name) const;
};

FrozenConstants load_constants(const std::string& path = "");
// Writes `{"schema": 1, "constants": {...}, "reference": {...}}` with sorted keys.
void write_constants(const std::string& path, const std::map<std::string, double>& values,
                     const std::map<std::string, std::string>& reference);

inline constexpr double kFreezeFactor = 1.5;

struct Comparison {
  std::string name;
  double measured = 0;
  double frozen = 0;
  double factor = kFreezeFactor;
  bool two_sided = false;
  bool pass = false;
};

// measured <= factor * frozen.
Comparison compare_upper(const std::string& name, double measured, double frozen, double factor = kFreezeFactor);
// frozen / factor <= measured <= factor * frozen.
Comparison compare_band(const std::string& name, double measured, double frozen, double factor = kFreezeFactor);

}  // namespace metsob
