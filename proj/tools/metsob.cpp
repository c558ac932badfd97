// Command-line front end. Links only the C API.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "metsob/metsob.h"

using nlohmann::json;

namespace {

struct Failure {
  ms_status status;
  std::string message;
};

void ok(ms_status s) {
  if (s != MS_OK) throw Failure{s, ms_last_error()};
}

// Takes ownership of a string returned by the library.
json take_json(char* s) {
  json j = json::parse(s);
  ms_string_free(s);
  return j;
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};
using Space = Handle<ms_space, ms_space_free>;
using Field = Handle<ms_field, ms_field_free>;
using Cover = Handle<ms_cover, ms_cover_free>;

void write_json(const std::string& path, const json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw Failure{MS_ERR_IO, "cannot write " + path};
  out << j.dump(2) << "\n";
}

int region_code(const std::string& r) {
  if (r == "interior" || r == "mu") return MS_INTERIOR;
  if (r == "boundary" || r == "bd") return MS_BOUNDARY;
  throw Failure{MS_ERR_INVALID_ARGUMENT, "region must be interior or boundary"};
}


}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metsob: traces, extensions and Besov norms on point-cloud metric measure spaces"};
  app.require_subcommand(1);
  int threads = 0;
  std::uint64_t seed = 1;
  app.add_option("--threads", threads, "worker threads (0 = all cores)");
  app.add_option("--seed", seed, "random seed for generated fields and corpora");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a domain point cloud");
  std::string g_domain = "square", g_out, g_family, g_region = "boundary", g_field_out;
  int g_res = 64, g_bres = 0, g_n = 0;
  double g_eps = 0.25;
  gen->add_option("--domain", g_domain, "square | cusp | weighted_square | weighted_disc | sharpness_disc");
  gen->add_option("--res", g_res, "interior grid cells per unit length");
  gen->add_option("--bres", g_bres, "boundary samples per unit length (0 = --res)");
  gen->add_option("--eps", g_eps, "weighted/sharpness disc parameter");
  gen->add_option("--n", g_n, "sharpness disc exponent (0 = ceil(2/eps))");
  gen->add_option("--out", g_out, "point-cloud file")->required();
  gen->add_option("--field", g_family, "also write a random field: fourier | jump | cone | power | noise");
  gen->add_option("--region", g_region, "region of the random field");
  gen->add_option("--field-out", g_field_out, "field file for --field");

  // whitney
  auto* wh = app.add_subcommand("whitney", "build (and check) a Whitney cover");
  std::string w_space, w_out, w_report;
  bool w_check = false;
  std::size_t w_limit = 0;
  wh->add_option("--space", w_space, "point-cloud file")->required();
  wh->add_option("--out", w_out, "cover JSON")->required();
  wh->add_flag("--check", w_check, "run the independent invariant checker");
  wh->add_option("--overlap-limit", w_limit, "overlap bound for --check (0 = measured)");
  wh->add_option("--report", w_report, "write the check report here instead of stdout");

  // trace
  auto* tr = app.add_subcommand("trace", "trace of an interior field");
  std::string t_space, t_field, t_grad, t_out, t_trace_out;
  double t_p = 2, t_R = 0, t_weight_exp = 1.25;
  std::optional<double> t_theta;
  int t_kmax = 30;
  tr->add_option("--space", t_space, "point-cloud file")->required();
  tr->add_option("--field", t_field, "interior field u")->required();
  tr->add_option("--grad", t_grad, "interior gradient g (default: discrete Lip u)");
  tr->add_option("--p", t_p, "integrability exponent");
  tr->add_option("--theta", t_theta, "codimension exponent; enables the Besov or weighted report");
  tr->add_option("--k-max", t_kmax, "number of dyadic radii");
  tr->add_option("--R", t_R, "largest radius (0 = 2 diam)");
  tr->add_option("--weight-exponent", t_weight_exp, "exponent of the log weight when theta = p");
  tr->add_option("--out", t_out, "report JSON (default stdout)");
  tr->add_option("--trace-out", t_trace_out, "boundary field file for Tu");

  // extend
  auto* ex = app.add_subcommand("extend", "extend a boundary field into the domain");
  std::string e_mode = "besov", e_space, e_cover, e_field, e_out, e_field_out;
  double e_p = 2, e_theta = -1;
  int e_kmax = 40;
  ex->add_option("--mode", e_mode, "besov | lp")->check(CLI::IsMember({"besov", "lp"}));
  ex->add_option("--space", e_space, "point-cloud file")->required();
  ex->add_option("--cover", e_cover, "cover JSON (built when omitted)");
  ex->add_option("--bfield", e_field, "boundary field f")->required();
  ex->add_option("--p", e_p, "integrability exponent");
  ex->add_option("--k-max", e_kmax, "layer count for --mode lp");
  ex->add_option("--theta", e_theta, "codimension for the lp regime check (< 0 skips)");
  ex->add_option("--out", e_out, "report JSON (default stdout)");
  ex->add_option("--field-out", e_field_out, "interior field file for the extension");

  // run
  auto* run = app.add_subcommand("run", "run an experiment (E1..E6)");
  std::string r_exp, r_out, r_constants;
  std::vector<int> r_res;
  std::optional<double> r_p, r_eps;
  std::optional<int> r_n, r_fields;
  run->add_option("--experiment", r_exp, "E1..E6")->required();
  run->add_option("--res", r_res, "resolutions, increasing")->delimiter(',');
  run->add_option("--p", r_p, "exponent p");
  run->add_option("--eps", r_eps, "epsilon");
  run->add_option("--n", r_n, "sharpness exponent");
  run->add_option("--fields", r_fields, "corpus size");
  run->add_option("--out", r_out, "output directory")->required();
  run->add_option("--constants", r_constants, "constants file (default: $METSOB_CONSTANTS or the shipped file)");

  // freeze
  auto* fr = app.add_subcommand("freeze", "measure and write the frozen constants");
  std::string f_out;
  fr->add_option("--out", f_out, "constants file (default: $METSOB_CONSTANTS or the shipped file)");

  // check
  auto* ck = app.add_subcommand("check", "run acceptance criteria");
  std::vector<int> c_ids;
  std::string c_constants, c_report;
  ck->add_option("--criterion", c_ids, "criterion ids (default all)")->delimiter(',');
  ck->add_option("--constants", c_constants, "constants file");
  ck->add_option("--report", c_report, "write all criterion details as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    ok(ms_set_threads(threads));

    if (*gen) {
      Space s;
      ok(ms_space_generate(g_domain.c_str(), g_res, g_bres, g_eps, g_n, &s.p));
      ok(ms_space_save(s.p, g_out.c_str()));
      char* info = nullptr;
      ok(ms_space_info(s.p, &info));
      json j = take_json(info);
      if (!g_family.empty()) {
        if (g_field_out.empty()) throw Failure{MS_ERR_INVALID_ARGUMENT, "--field needs --field-out"};
        Field f;
        ok(ms_field_random(s.p, region_code(g_region), g_family.c_str(), seed, &f.p));
        ok(ms_field_save(f.p, g_field_out.c_str()));
        j["field"] = {{"family", g_family}, {"region", g_region}, {"seed", seed}, {"path", g_field_out}};
      }
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*wh) {
      Space s;
      Cover c;
      ok(ms_space_load(w_space.c_str(), nullptr, &s.p));
      ok(ms_cover_build(s.p, &c.p));
      ok(ms_cover_save(c.p, w_out.c_str()));
      char* info = nullptr;
      ok(ms_cover_info(c.p, &info));
      json j = take_json(info);
      bool pass = true;
      if (w_check) {
        char* rep = nullptr;
        ok(ms_cover_check(s.p, c.p, w_limit, &rep));
        j["check"] = take_json(rep);
        pass = j["check"]["ok"].get<bool>();
      }
      write_json(w_report, j);
      return pass ? 0 : 1;
    }

    if (*tr) {
      Space s;
      Field u, g, T;
      ok(ms_space_load(t_space.c_str(), nullptr, &s.p));
      ok(ms_field_load(s.p, MS_INTERIOR, t_field.c_str(), &u.p));
      char* out = nullptr;
      ok(ms_trace(s.p, u.p, t_p, t_kmax, t_R, &out, &T.p));
      json j = take_json(out);
      if (t_theta) {
        if (!t_grad.empty()) {
          ok(ms_field_load(s.p, MS_INTERIOR, t_grad.c_str(), &g.p));
        } else {
          char* info = nullptr;
          ok(ms_space_info(s.p, &info));
          const double h = 1.5 * take_json(info)["interior"]["spacing"].get<double>();
          ok(ms_lip_field(s.p, u.p, h, &g.p));
        }
        char* extra = nullptr;
        if (std::abs(*t_theta - t_p) <= 0.2) {
          ok(ms_weighted_trace(s.p, u.p, g.p, t_p, t_weight_exp, 0, *t_theta, &extra));
          j["weighted"] = take_json(extra);
        } else {
          ok(ms_trace_besov(s.p, u.p, g.p, t_p, *t_theta, &extra));
          j["besov"] = take_json(extra);
        }
      }
      if (!t_trace_out.empty()) ok(ms_field_save(T.p, t_trace_out.c_str()));
      write_json(t_out, j);
      return 0;
    }

    if (*ex) {
      Space s;
      Cover c;
      Field f, F;
      ok(ms_space_load(e_space.c_str(), nullptr, &s.p));
      if (e_cover.empty())
        ok(ms_cover_build(s.p, &c.p));
      else
        ok(ms_cover_load(s.p, e_cover.c_str(), &c.p));
      ok(ms_field_load(s.p, MS_BOUNDARY, e_field.c_str(), &f.p));
      char* out = nullptr;
      const int mode = e_mode == "lp" ? MS_EXTEND_LP : MS_EXTEND_BESOV;
      ok(ms_extend(s.p, c.p, f.p, mode, e_p, e_kmax, e_theta, &F.p, &out));
      json j = take_json(out);
      if (!e_field_out.empty()) ok(ms_field_save(F.p, e_field_out.c_str()));
      write_json(e_out, j);
      return 0;
    }

    if (*run) {
      json cfg{{"experiment", r_exp}, {"seed", seed}, {"out_dir", r_out}};
      if (!r_res.empty()) cfg["resolutions"] = r_res;
      if (r_p) cfg["p"] = *r_p;
      if (r_eps) cfg["eps"] = *r_eps;
      if (r_n) cfg["n"] = *r_n;
      if (r_fields) cfg["fields"] = *r_fields;
      int passed = 0;
      char* report = nullptr;
      ok(ms_experiment_run(cfg.dump().c_str(), r_constants.empty() ? nullptr : r_constants.c_str(), &passed, &report));
      json j = take_json(report);
      for (const auto& c : j["checks"])
        std::printf("%s  %s\n", c["pass"].get<bool>() ? "ok  " : "FAIL", c["name"].get<std::string>().c_str());
      std::printf("%s: %s (report in %s)\n", r_exp.c_str(), passed ? "pass" : "fail", r_out.c_str());
      return passed ? 0 : 1;
    }

    if (*fr) {
      if (f_out.empty()) {
        char* p = nullptr;
        ok(ms_constants_path(&p));
        f_out = p;
        ms_string_free(p);
      }
      char* out = nullptr;
      const json cfg{{"seed", app.get_option("--seed")->count() ? seed : 1000}};
      ok(ms_freeze(f_out.c_str(), cfg.dump().c_str(), &out));
      std::cout << take_json(out).dump(2) << "\nwritten to " << f_out << "\n";
      return 0;
    }

    if (*ck) {
      if (c_ids.empty()) c_ids = {1, 2, 3, 4, 5, 6, 7, 8, 9};
      json all = json::array();
      bool every = true;
      for (int id : c_ids) {
        int passed = 0;
        char* out = nullptr;
        ok(ms_criterion_run(id, c_constants.empty() ? nullptr : c_constants.c_str(), &passed, &out));
        json j = take_json(out);
        std::printf("%s criterion %d (%s): %s [%.1fs]\n", passed ? "PASS" : "FAIL", id,
                    j["title"].get<std::string>().c_str(), j["summary"].get<std::string>().c_str(),
                    j["seconds"].get<double>());
        every = every && passed;
        all.push_back(j);
      }
      if (!c_report.empty()) write_json(c_report, all);
      return every ? 0 : 1;
    }
  } catch (const Failure& f) {
    std::cerr << json{{"error", ms_status_name(f.status)}, {"code", static_cast<int>(f.status)}, {"message", f.message}}
                     .dump()
              << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }
  return 0;
}
