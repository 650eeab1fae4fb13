#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "j0rank/j0rank.h"

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string cache;
  std::string out;
  std::string format = "json";
  int jobs = 1;
  double tol = 0;
  std::int64_t pmax = 10000;
};

int exit_code(j0r_status s) {
  switch (s) {
    case J0R_OK: return 0;
    case J0R_ERR_USAGE: return 2;
    case J0R_ERR_CAPACITY: return 4;
    default: return 3;
  }
}

int report_error(j0r_status s, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = j0r_status_name(s);
  j["status"] = static_cast<int>(s);
  j["message"] = message;
  std::cout << j.dump() << '\n';
  std::cerr << "error: " << message << '\n';
  return exit_code(s);
}

struct Failure {
  j0r_status status;
};

void check(j0r_status s) {
  if (s != J0R_OK) throw Failure{s};
}

class Text {
 public:
  ~Text() { j0r_free(p_); }
  char** slot() { return &p_; }
  std::string str() const { return p_ ? p_ : ""; }

 private:
  char* p_ = nullptr;
};

class Level {
 public:
  Level(std::int64_t q, const j0r_options& o) { check(j0r_level_open(q, &o, &h_)); }
  ~Level() { j0r_level_close(h_); }
  Level(const Level&) = delete;
  Level& operator=(const Level&) = delete;
  const j0r_level* get() const { return h_; }

 private:
  j0r_level* h_ = nullptr;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ranks, zeros and trace-formula checks for weight-2 newforms of prime level"};
  app.require_subcommand(1);
  Globals g;
  if (const char* env = std::getenv("J0RANK_CACHE")) g.cache = env;
  app.set_config("--config", "", "key=value configuration file; command-line flags win")->check(CLI::ExistingFile);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.add_option("--cache", g.cache, "cache directory for eigenvalue records");
  app.add_option("--out", g.out, "write the report here instead of stdout");
  app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--tol", g.tol, "zero refinement width")->check(CLI::NonNegativeNumber);
  app.add_option("--pmax", g.pmax, "coefficient horizon")->check(CLI::Range(std::int64_t{2}, std::int64_t{100000000}));

  std::int64_t q = 0;
  auto level_arg = [&](CLI::App* sub) { sub->add_option("q", q, "prime level")->required(); };

  auto* eigens = app.add_subcommand("eigens", "compute or load the newforms and write their records");
  level_arg(eigens);
  std::string records;
  eigens->add_option("--records", records, "record file (default q=<q>.txt unless a cache is set)");

  auto* rank = app.add_subcommand("rank", "analytic ranks");
  level_arg(rank);

  double height = 30;
  auto* zeros = app.add_subcommand("zeros", "zeros on the critical line up to height T");
  level_arg(zeros);
  zeros->add_option("--T", height, "height")->check(CLI::PositiveNumber);

  auto* pet = app.add_subcommand("petersson", "harmonic weights and trace-formula checks");
  level_arg(pet);

  double lambda = 2;
  std::string test_function = "fejer";
  auto* expl = app.add_subcommand("explicit", "explicit formula residuals");
  level_arg(expl);
  expl->add_option("--lambda", lambda, "test function width")->check(CLI::PositiveNumber);
  expl->add_option("--F", test_function, "test function")->check(CLI::IsMember({"fejer", "pp"}));
  expl->add_option("--T", height, "zero height")->check(CLI::PositiveNumber);

  std::string mode = "all";
  double bound_lambda = 0, bound_height = 0;
  std::int64_t cutoff = 0;
  auto* bound = app.add_subcommand("bound", "rank bounds");
  level_arg(bound);
  bound->add_option("--mode", mode, "pipeline")
      ->check(CLI::IsMember({"all", "unconditional", "harmonic", "grh", "sign"}));
  bound->add_option("--lambda", bound_lambda, "test function width (0: pipeline default)");
  bound->add_option("--T", bound_height, "zero height (0: log^3 q)");
  bound->add_option("--F", test_function, "test function")->check(CLI::IsMember({"fejer", "pp"}));
  bound->add_option("--C", cutoff, "Kloosterman cutoff (0: sqrt q)");

  std::vector<std::int64_t> levels;
  std::vector<double> alphas{0.55, 0.75, 1.0};
  std::vector<std::string> boxes{"-10:10"};
  double density_B = 4, density_c = 0.5;
  auto* dens = app.add_subcommand("density", "zero counts right of alpha");
  dens->add_option("q", levels, "prime levels")->required();
  dens->add_option("--alpha", alphas, "alpha grid")->delimiter(',');
  dens->add_option("--box", boxes, "t1:t2 boxes")->delimiter(',');
  dens->add_option("--B", density_B, "envelope exponent of T");
  dens->add_option("--c", density_c, "envelope slope in alpha");

  std::int64_t km = 0, kn = 0, kc = 0;
  auto* kloo = app.add_subcommand("kloosterman", "the Kloosterman sum S(m, n; c)");
  kloo->add_option("m", km)->required();
  kloo->add_option("n", kn)->required();
  kloo->add_option("c", kc)->required();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error(J0R_ERR_USAGE, e.what());
  }

  // every path is fixed before any computation starts
  std::error_code ec;
  if (!g.cache.empty()) g.cache = fs::absolute(g.cache, ec).string();
  if (!g.out.empty()) g.out = fs::absolute(g.out, ec).string();
  if (!records.empty()) records = fs::absolute(records, ec).string();

  j0r_options o;
  j0r_options_init(&o);
  o.cache_dir = g.cache.empty() ? nullptr : g.cache.c_str();
  o.pmax = g.pmax;
  o.jobs = g.jobs;
  o.tol = g.tol;

  Text json, csv;
  std::string report;
  int passed = 1;
  try {
    if (*eigens) {
      Level L(q, o);
      check(j0r_eigens_report(L.get(), json.slot(), &passed));
      if (!records.empty() || g.cache.empty()) {
        if (records.empty()) records = fs::absolute("q=" + std::to_string(q) + ".txt", ec).string();
        check(j0r_level_export(L.get(), records.c_str()));
      }
    } else if (*rank) {
      Level L(q, o);
      check(j0r_rank_report(L.get(), json.slot(), &passed));
    } else if (*zeros) {
      Level L(q, o);
      check(j0r_zeros_report(L.get(), height, &o, json.slot(), csv.slot(), &passed));
    } else if (*pet) {
      Level L(q, o);
      check(j0r_petersson_report(L.get(), &o, json.slot(), csv.slot(), &passed));
    } else if (*expl) {
      Level L(q, o);
      check(j0r_explicit_report(L.get(), lambda, test_function.c_str(), height, &o, json.slot(), &passed));
    } else if (*bound) {
      Level L(q, o);
      j0r_bound_params p;
      j0r_bound_params_init(&p);
      p.mode = mode.c_str();
      p.lambda = bound_lambda;
      p.height = bound_height;
      p.test_function = test_function.c_str();
      p.C = cutoff;
      check(j0r_bound_report(L.get(), &p, &o, json.slot(), &passed));
    } else if (*dens) {
      std::vector<double> flat;
      for (const auto& b : boxes) {
        const auto colon = b.find(':');
        if (colon == std::string::npos) return report_error(J0R_ERR_USAGE, "box '" + b + "' is not t1:t2");
        try {
          flat.push_back(std::stod(b.substr(0, colon)));
          flat.push_back(std::stod(b.substr(colon + 1)));
        } catch (const std::exception&) {
          return report_error(J0R_ERR_USAGE, "box '" + b + "' is not t1:t2");
        }
      }
      check(j0r_density_report(levels.data(), levels.size(), alphas.data(), alphas.size(), flat.data(),
                               flat.size() / 2, density_B, density_c, &o, json.slot(), csv.slot(), &passed));
    } else if (*kloo) {
      double value = 0;
      check(j0r_kloosterman(km, kn, kc, &value));
      nlohmann::ordered_json j{{"m", km}, {"n", kn}, {"c", kc}, {"value", std::round(value * 1e9) / 1e9}};
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.10g", std::round(value * 1e9) / 1e9 + 0.0);
      j["passed"] = true;
      j["summary"] = buf;
      report = j.dump();
    }
  } catch (const Failure& f) {
    return report_error(f.status, j0r_last_error());
  }

  if (report.empty()) report = json.str();
  const bool want_csv = g.format == "csv";
  if (want_csv && csv.str().empty()) return report_error(J0R_ERR_USAGE, "this command has no CSV form");
  const std::string body = want_csv ? csv.str() : report + "\n";
  const auto parsed = nlohmann::json::parse(report);
  const std::string summary = parsed.value("summary", "");
  if (g.out.empty()) {
    std::cout << body;
    std::cerr << summary << '\n';
  } else {
    std::ofstream file(g.out, std::ios::binary);
    file << body;
    if (!file) return report_error(J0R_ERR_IO, "cannot write " + g.out);
    std::cout << summary << '\n';
  }
  return passed ? 0 : 3;
}
