#include "j0rank/j0rank.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "j0rank/arith.hpp"
#include "j0rank/bounds.hpp"
#include "j0rank/error.hpp"
#include "j0rank/explicit.hpp"
#include "j0rank/lfunc.hpp"
#include "j0rank/modsym.hpp"
#include "j0rank/petersson.hpp"

using json = nlohmann::ordered_json;
using namespace j0rank;

struct j0r_level {
  std::int64_t q = 0;
  std::int64_t pmax = 0;
  std::vector<modsym::NewformData> forms;
};

namespace {

thread_local std::string last_error;

template <class Body>
j0r_status guarded(Body&& body) {
  try {
    body();
    last_error.clear();
    return J0R_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return static_cast<j0r_status>(static_cast<int>(e.kind()));
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return J0R_ERR_CAPACITY;
  } catch (const std::exception& e) {
    last_error = e.what();
    return J0R_ERR_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** slot, const std::string& s) {
  if (slot) *slot = dup(s);
}

void finish(json& j, bool ok, const std::string& summary, char** out, int* passed) {
  j["passed"] = ok;
  j["summary"] = summary;
  emit(out, j.dump());
  if (passed) *passed = ok ? 1 : 0;
}

j0r_options resolved(const j0r_options* options) {
  j0r_options o;
  j0r_options_init(&o);
  if (options) o = *options;
  if (o.jobs < 1) o.jobs = 1;
  return o;
}

const j0r_level& need(const j0r_level* level) {
  if (!level) fail(ErrorKind::Usage, "null level handle");
  return *level;
}

std::string fmt(double x, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

weil::TestFunction make_test_function(const char* id, double lambda) {
  const std::string name = id ? id : "fejer";
  if (name == "fejer") return weil::fejer(lambda);
  if (name == "pp") {
    weil::BumpParams p;
    p.scale = lambda / p.support;
    return weil::pp_candidate(p);
  }
  fail(ErrorKind::Usage, "unknown test function '" + name + "' (fejer or pp)");
}

lfunc::ScanOptions scan_options(const j0r_options& o) {
  lfunc::ScanOptions s;
  s.jobs = o.jobs;
  if (o.tol > 0) s.refine_tol = o.tol;
  return s;
}

json route_json(const bounds::RouteCheck& c) {
  return {{"direct", c.direct}, {"petersson", c.petersson}, {"tolerance", c.tolerance}, {"agreed", c.agreed}};
}

}  // namespace

extern "C" {

void j0r_options_init(j0r_options* options) {
  if (!options) return;
  options->cache_dir = nullptr;
  options->pmax = 10000;
  options->jobs = 1;
  options->tol = 0;
}

void j0r_bound_params_init(j0r_bound_params* params) {
  if (!params) return;
  params->mode = "all";
  params->lambda = 0;
  params->height = 0;
  params->test_function = nullptr;
  params->C = 0;
}

const char* j0r_version(void) { return "0.1.0"; }

const char* j0r_status_name(j0r_status status) {
  switch (status) {
    case J0R_OK: return "ok";
    case J0R_ERR_INTERNAL: return "internal";
    default: return error_kind_name(static_cast<ErrorKind>(status));
  }
}

const char* j0r_last_error(void) { return last_error.c_str(); }

void j0r_free(char* text) { std::free(text); }

j0r_status j0r_level_open(int64_t q, const j0r_options* options, j0r_level** out) {
  return guarded([&] {
    if (!out) fail(ErrorKind::Usage, "null output handle");
    *out = nullptr;
    const auto o = resolved(options);
    if (q < 2 || !arith::is_prime(q)) fail(ErrorKind::Usage, "level " + std::to_string(q) + " is not prime");
    if (o.pmax < 2) fail(ErrorKind::Usage, "pmax must be >= 2");
    auto level = std::make_unique<j0r_level>();
    level->q = q;
    level->pmax = o.pmax;
    level->forms = modsym::load_or_compute(o.cache_dir ? o.cache_dir : "", q, o.pmax, o.jobs);
    *out = level.release();
  });
}

j0r_status j0r_level_load(const char* path, j0r_level** out) {
  return guarded([&] {
    if (!out || !path) fail(ErrorKind::Usage, "null argument");
    *out = nullptr;
    auto level = std::make_unique<j0r_level>();
    level->forms = modsym::ingest(path);
    if (level->forms.empty()) fail(ErrorKind::Parse, std::string("no records in ") + path);
    level->q = level->forms.front().level;
    level->pmax = level->forms.front().pmax();
    *out = level.release();
  });
}

void j0r_level_close(j0r_level* level) { delete level; }

int64_t j0r_level_q(const j0r_level* level) { return level ? level->q : 0; }

size_t j0r_level_forms(const j0r_level* level) { return level ? level->forms.size() : 0; }

int64_t j0r_level_pmax(const j0r_level* level) { return level ? level->pmax : 0; }

j0r_status j0r_level_export(const j0r_level* level, const char* path) {
  return guarded([&] {
    if (!path) fail(ErrorKind::Usage, "null path");
    modsym::export_records(need(level).forms, path);
  });
}

j0r_status j0r_eigens_report(const j0r_level* level, char** out, int* passed) {
  return guarded([&] {
    const auto& L = need(level);
    json j;
    j["q"] = L.q;
    j["pmax"] = L.pmax;
    j["dim"] = L.forms.size();
    const auto genus = modsym::genus_x0(L.q);
    j["genus"] = genus;
    bool ok = static_cast<std::int64_t>(L.forms.size()) == genus;
    j["forms"] = json::array();
    for (const auto& f : L.forms) {
      json a = json::object();
      for (std::size_t i = 0; i < f.primes.size() && f.primes[i] < 100; ++i) {
        a[std::to_string(f.primes[i])] = f.exact[i].to_string();
      }
      j["forms"].push_back({{"index", f.index}, {"eps", f.eps}, {"a_q", f.a_q}, {"a_p", a}});
    }
    // sum over the forms of a_p against the trace formula
    double worst = 0;
    for (std::int64_t p = 2; p <= std::min<std::int64_t>(50, L.pmax); ++p) {
      if (!arith::is_prime(p) || p == L.q) continue;
      double sum = 0;
      for (const auto& f : L.forms) sum += f.ap(p);
      worst = std::max(worst, std::abs(sum - modsym::trace_Tn(L.q, p).get_d()));
    }
    j["trace_check_max_error"] = worst;
    ok = ok && worst < 1e-6;
    finish(j, ok, "dim = " + std::to_string(L.forms.size()), out, passed);
  });
}

j0r_status j0r_rank_report(const j0r_level* level, char** out, int* passed) {
  return guarded([&] {
    const auto& L = need(level);
    json j;
    j["q"] = L.q;
    j["forms"] = json::array();
    bool ok = true;
    int total = 0;
    std::string list;
    for (const auto& f : L.forms) {
      const auto r = lfunc::analytic_rank(lfunc::LFunction(f));
      ok = ok && r.parity_ok;
      total += r.rank;
      list += (list.empty() ? "" : ", ") + std::to_string(r.rank);
      j["forms"].push_back(
          {{"index", f.index}, {"eps", f.eps}, {"rank", r.rank}, {"parity_ok", r.parity_ok}, {"taylor", r.taylor}});
    }
    j["total"] = total;
    finish(j, ok, "ranks: [" + list + "] (order by index), total " + std::to_string(total), out, passed);
  });
}

j0r_status j0r_zeros_report(const j0r_level* level, double height, const j0r_options* options, char** out,
                            char** csv, int* passed) {
  return guarded([&] {
    const auto& L = need(level);
    const auto o = resolved(options);
    if (!(height > 0)) fail(ErrorKind::Usage, "height must be positive");
    std::vector<lfunc::ZeroList> lists;
    json j;
    j["q"] = L.q;
    j["T"] = height;
    j["forms"] = json::array();
    std::size_t count = 0;
    for (const auto& f : L.forms) {
      lists.push_back(lfunc::find_zeros(lfunc::LFunction(f), height, scan_options(o)));
      const auto& z = lists.back();
      count += z.ordinates.size();
      j["forms"].push_back({{"index", f.index},
                            {"central_order", z.central_order},
                            {"contour_count", z.contour_count},
                            {"ordinates", z.ordinates}});
    }
    emit(csv, lfunc::zeros_csv(lists));
    finish(j, true, std::to_string(count) + " zeros with |gamma| <= " + fmt(height), out, passed);
  });
}

j0r_status j0r_petersson_report(const j0r_level* level, const j0r_options* options, char** out, char** csv,
                                int* passed) {
  return guarded([&] {
    const auto& L = need(level);
    const auto o = resolved(options);
    petersson::WeightOptions wo;
    wo.jobs = o.jobs;
    const auto w = petersson::recover_harmonic_weights(L.forms, wo);
    const auto held = petersson::held_out_checks(L.forms, w);
    const auto measure = petersson::check_probability_measure(w);
    json j;
    j["q"] = L.q;
    j["c_max"] = w.c_max;
    j["pairs"] = w.pairs;
    j["omega"] = w.omega;
    j["residual"] = w.residual;
    j["tail_bound"] = w.tail_bound;
    j["condition"] = w.condition;
    j["positive"] = w.positive;
    double worst = 0;
    int failures = 0;
    for (const auto& h : held) {
      worst = std::max(worst, std::abs(h.lhs - h.rhs));
      failures += !h.passed;
    }
    j["held_out"] = {{"pairs", held.size()}, {"max_error", worst}, {"failures", failures}};
    j["probability_measure"] = {{"total", measure.total},
                                {"deviation", measure.deviation},
                                {"scaled", measure.scaled},
                                {"constant", measure.constant},
                                {"passed", measure.passed}};
    bool traces_ok = true;
    double worst_ratio = 0;
    for (std::int64_t p = 2; p <= 500; ++p) {
      if (!arith::is_prime(p) || p == L.q) continue;
      const auto t = petersson::brumer_trace_check(L.q, p);
      traces_ok = traces_ok && t.passed;
      worst_ratio = std::max(worst_ratio, t.ratio);
    }
    j["trace_envelope"] = {{"max_ratio", worst_ratio}, {"constant", petersson::kTraceConstant}, {"passed", traces_ok}};
    emit(csv, petersson::weights_csv({w}));
    const bool ok = w.positive && failures == 0 && measure.passed && traces_ok;
    std::string weights;
    for (double x : w.omega) weights += (weights.empty() ? "" : ", ") + fmt(x);
    finish(j, ok,
           "weights: [" + weights + "], sum " + fmt(measure.total) + ", deviation*q^1.5 = " + fmt(measure.scaled, "%.3g"),
           out, passed);
  });
}

j0r_status j0r_explicit_report(const j0r_level* level, double lambda, const char* test_function, double height,
                               const j0r_options* options, char** out, int* passed) {
  return guarded([&] {
    const auto& L = need(level);
    const auto o = resolved(options);
    if (!(lambda > 0) || !(height > 0)) fail(ErrorKind::Usage, "lambda and T must be positive");
    const auto F = make_test_function(test_function, lambda);
    json j;
    j["q"] = L.q;
    j["reports"] = json::array();
    bool ok = true;
    std::string res;
    for (const auto& f : L.forms) {
      const auto zeros = lfunc::find_zeros(lfunc::LFunction(f), height, scan_options(o));
      const auto r = weil::explicit_formula_check(f, F, zeros);
      ok = ok && r.passed;
      res += (res.empty() ? "" : ", ") + fmt(r.residual, "%.3g");
      j["reports"].push_back(json::parse(weil::to_json(r)));
    }
    finish(j, ok, "explicit formula residuals: [" + res + "]", out, passed);
  });
}

j0r_status j0r_bound_report(const j0r_level* level, const j0r_bound_params* params, const j0r_options* options,
                            char** out, int* passed) {
  return guarded([&] {
    const auto& L = need(level);
    const auto o = resolved(options);
    j0r_bound_params p;
    j0r_bound_params_init(&p);
    if (params) p = *params;
    const std::string mode = p.mode ? p.mode : "all";
    if (mode != "all" && mode != "unconditional" && mode != "harmonic" && mode != "grh" && mode != "sign") {
      fail(ErrorKind::Usage, "unknown mode '" + mode + "'");
    }
    json j;
    j["q"] = L.q;
    bool ok = true;
    std::string summary;
    const auto sign = bounds::sign_lower_bound(L.forms);
    if (mode == "sign" || mode == "all") {
      j["sign"] = {{"odd", sign.odd}, {"dim", sign.dim}, {"lower_bound", sign.lower_bound}, {"ratio", sign.ratio}};
      summary = "sign lower bound " + std::to_string(sign.lower_bound);
    }
    if (mode != "sign") {
      bounds::LevelOptions lo;
      lo.pmax = L.pmax;
      lo.height = p.height;
      lo.jobs = o.jobs;
      lo.weights = mode != "unconditional";
      const auto data = bounds::prepare_level(L.forms, lo);
      int total = 0;
      for (int r : data.ranks) total += r;
      ok = ok && sign.lower_bound <= total;
      std::optional<weil::TestFunction> pp;
      const std::string tf = p.test_function ? p.test_function : "fejer";
      const double lam = p.lambda > 0 ? p.lambda : 2.0;
      if (tf == "pp") {
        pp = make_test_function("pp", lam);
        weil::verify_strip_positivity(*pp, 0.5);
      } else if (tf != "fejer") {
        fail(ErrorKind::Usage, "unknown test function '" + tf + "'");
      }
      j["reports"] = json::array();
      auto add = [&](const bounds::RankBoundReport& r) {
        ok = ok && r.slack >= -1e-4;
        if (r.s1_routes) ok = ok && r.s1_routes->agreed;
        if (r.s2_square_routes) ok = ok && r.s2_square_routes->agreed;
        j["reports"].push_back(json::parse(bounds::to_json(r)));
        summary += (summary.empty() ? "" : "; ") + r.mode + " bound " + fmt(r.bound) + " >= measured " +
                   fmt(r.measured) + " (slack " + fmt(r.slack, "%.3g") + ")";
      };
      const weil::TestFunction* ppf = pp ? &*pp : nullptr;
      if (mode == "unconditional" || mode == "all") add(bounds::unconditional_bound(data, lam, ppf));
      if (mode == "harmonic" || mode == "all") {
        add(bounds::harmonic_bound(data, lam, ppf));
        const std::int64_t C = p.C > 0 ? p.C : static_cast<std::int64_t>(std::sqrt(static_cast<double>(L.q)));
        const auto k = bounds::s1_kloosterman_route(L.q, lam, C, &data);
        json kj = {{"C", k.cut}, {"value", k.value}, {"tail_bound", k.tail_bound}};
        if (k.reconciliation) {
          kj["reconciliation"] = route_json(*k.reconciliation);
          ok = ok && k.reconciliation->agreed;
        }
        j["kloosterman_route"] = kj;
      }
      if (mode == "grh" || mode == "all") {
        add(bounds::grh_bound(data, p.lambda > 0 && mode == "grh" ? p.lambda : bounds::default_grh_lambda(L.q)));
      }
      j["measured_total_rank"] = total;
    }
    finish(j, ok, summary, out, passed);
  });
}

j0r_status j0r_density_report(const int64_t* levels, size_t n_levels, const double* alphas, size_t n_alphas,
                              const double* boxes, size_t n_boxes, double B, double c, const j0r_options* options,
                              char** out, char** csv, int* passed) {
  return guarded([&] {
    if ((!levels && n_levels) || (!alphas && n_alphas) || (!boxes && n_boxes)) fail(ErrorKind::Usage, "null array");
    const auto o = resolved(options);
    std::vector<std::int64_t> qs(levels, levels + n_levels);
    std::vector<double> as(alphas, alphas + n_alphas);
    std::vector<std::pair<double, double>> bs;
    for (size_t i = 0; i < n_boxes; ++i) bs.emplace_back(boxes[2 * i], boxes[2 * i + 1]);
    bounds::DensityOptions d;
    d.B = B;
    d.c = c;
    d.jobs = o.jobs;
    d.pmax = std::min<std::int64_t>(o.pmax, 400);
    const auto rows = bounds::density_tabulate(qs, as, bs, d);
    json j;
    j["B"] = B;
    j["c"] = c;
    j["rows"] = json::array();
    int nonzero = 0;
    for (const auto& r : rows) {
      if (r.alpha >= 0.55 && r.count != 0) ++nonzero;
      j["rows"].push_back({{"q", r.q},
                           {"alpha", r.alpha},
                           {"t1", r.t1},
                           {"t2", r.t2},
                           {"count", r.count},
                           {"harmonic_count", r.harmonic_count},
                           {"envelope", r.envelope}});
    }
    emit(csv, bounds::density_csv(rows));
    finish(j, nonzero == 0,
           std::to_string(rows.size()) + " boxes, " + std::to_string(nonzero) + " with zeros right of 0.55", out,
           passed);
  });
}

j0r_status j0r_kloosterman(int64_t m, int64_t n, int64_t c, double* out) {
  return guarded([&] {
    if (!out) fail(ErrorKind::Usage, "null output");
    if (c < 1) fail(ErrorKind::Usage, "modulus must be >= 1");
    *out = arith::kloosterman_crt(m, n, c);
  });
}

}  // extern "C"
