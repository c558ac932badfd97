// Acceptance runner: one PASS/FAIL line per criterion. Tolerances live in the
// criterion implementations; the constants file comes from $METSOB_CONSTANTS
// or the shipped default.
#include <cstdio>
#include <string>

#include "json.hpp"
#include "metsob/metsob.h"

int main(int argc, char** argv) {
  const char* constants = argc > 1 ? argv[1] : nullptr;
  int failures = 0;
  for (int id = 1; id <= 9; ++id) {
    int passed = 0;
    char* out = nullptr;
    const ms_status s = ms_criterion_run(id, constants, &passed, &out);
    if (s != MS_OK) {
      std::printf("FAIL criterion %d: error %s: %s\n", id, ms_status_name(s), ms_last_error());
      ++failures;
      continue;
    }
    const auto j = nlohmann::json::parse(out);
    ms_string_free(out);
    std::string line = j["summary"].get<std::string>();
    for (const auto& c : j["checks"])
      if (!c["pass"].get<bool>()) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "; %s = %.6g (%s %.6g)", c["name"].get<std::string>().c_str(),
                      c["value"].is_number() ? c["value"].get<double>() : NAN, c["relation"].get<std::string>().c_str(),
                      c.contains("bound") ? c["bound"].get<double>() : c["upper"].get<double>());
        line += buf;
      }
    std::printf("%s criterion %d (%s): %s [%.2fs of %.0fs]\n", passed ? "PASS" : "FAIL", id,
                j["title"].get<std::string>().c_str(), line.c_str(), j["seconds"].get<double>(),
                j["budget"].get<double>());
    std::fflush(stdout);
    failures += !passed;
  }
  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
