#include "j0rank/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "j0rank/arith.hpp"
#include "j0rank/error.hpp"
#include "j0rank/parallel.hpp"

namespace j0rank::bounds {

namespace {

constexpr double kPi = std::numbers::pi;

struct PrimeWeight {
  std::int64_t p;
  double w;
};

// F(k log p) log p / p^{k/2} for the primes inside the support
std::vector<PrimeWeight> prime_weights(const weil::TestFunction& F, int k) {
  std::vector<PrimeWeight> out;
  const double limit = std::exp(F.support() / k);
  if (limit < 2) return out;
  for (auto p : arith::shared_primes(static_cast<std::int64_t>(limit) + 1).primes()) {
    const double lp = std::log(static_cast<double>(p));
    if (k * lp >= F.support()) break;
    out.push_back({p, F(k * lp) * lp / std::pow(static_cast<double>(p), 0.5 * k)});
  }
  return out;
}

const petersson::HarmonicWeights& require_weights(const LevelData& level) {
  if (!level.weights) fail(ErrorKind::Usage, "harmonic weights were not recovered for this level");
  if (!level.weights->positive) fail(ErrorKind::Invariant, "recovered harmonic weights are not all positive");
  return *level.weights;
}

// Shared assembly: per-form explicit-formula terms, weighted sums, bound.
RankBoundReport assemble(const LevelData& level, const weil::TestFunction& F, const std::vector<double>& weights,
                         bool measure_off_line) {
  RankBoundReport r;
  r.q = level.q;
  r.test_function = F.id();
  r.lambda = F.scale();
  r.height = level.height;
  r.transform_at_zero = F.transform(0.0).real();
  if (!(r.transform_at_zero > 0)) fail(ErrorKind::Invariant, "test function transform vanishes at 0");
  const double F0 = F(0.0);
  const double arch = weil::archimedean_integral(F, 1e-12);
  r.quadrature_tol = 1e-10;

  // sup of |Fhat| over the critical strip; F >= 0 makes the real point the worst
  const double strip_sup = F.transform(0.5).real();
  // |Fhat(sigma + i gamma)| <= A / gamma^2 for |sigma| <= 1/2, Fejer kernel only
  const double lam = F.scale();
  const double strip_coef = 2 * (std::cosh(lam / 2) + 1) / lam;

  std::vector<FormTerms> terms(level.forms.size());
  std::vector<double> tails(level.forms.size(), 0.0);
  std::vector<weil::PrimeSide> sides(level.forms.size());
  for (std::size_t i = 0; i < level.forms.size(); ++i) {
    const auto& f = level.forms[i];
    const auto& ps = sides[i] = weil::prime_side(f, F);
    FormTerms& t = terms[i];
    t.index = f.index;
    t.weight = weights[i];
    t.rank = level.ranks[i];
    t.eps = f.eps;
    t.log_q = F0 * std::log(static_cast<double>(level.q));
    t.s1 = ps.s1;
    t.s2 = ps.s2;
    t.archimedean = arch;
    if (measure_off_line) {
      t.off_line = level.off_line[i] * strip_sup;
      const double c = weil::zero_tail(level.zeros[i], F, level.height).constant;
      const double T = level.height;
      tails[i] = 4 * strip_coef * c * (std::log(static_cast<double>(level.q) * T) + 1) / T;
    }
    t.bound = (t.log_q - 2 * F0 * std::log(2 * kPi) - 2 * t.s1 - 2 * t.s2 - 2 * t.archimedean + t.off_line +
               tails[i]) /
              r.transform_at_zero;
  }

  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double w = weights[i];
    const auto& ps = sides[i];
    r.log_q += w * terms[i].log_q;
    r.gamma_shift += w * (-2 * F0 * std::log(2 * kPi));
    r.s1 += w * terms[i].s1;
    r.s2 += w * terms[i].s2;
    r.s2_higher += w * ps.s2_higher;
    r.s2_higher_envelope += w * ps.higher_envelope;
    r.archimedean += w * terms[i].archimedean;
    r.off_line += w * terms[i].off_line;
    r.off_line_tail += w * tails[i];
    r.measured += w * terms[i].rank;
  }
  r.bound = (r.log_q + r.gamma_shift - 2 * r.s1 - 2 * r.s2 - 2 * r.archimedean + r.off_line + r.off_line_tail) /
            r.transform_at_zero;
  r.slack = r.bound - r.measured;
  r.forms = std::move(terms);
  return r;
}

}  // namespace

double default_height(std::int64_t q) {
  const double l = std::log(static_cast<double>(q));
  return l * l * l;
}

LevelData prepare_level(std::int64_t q, const LevelOptions& options) {
  if (q < 2 || !arith::is_prime(q)) fail(ErrorKind::Usage, "level must be prime");
  if (modsym::genus_x0(q) == 0) fail(ErrorKind::Usage, "no cusp forms at level " + std::to_string(q));
  return prepare_level(modsym::decompose(q, options.pmax, options.jobs), options);
}

LevelData prepare_level(std::vector<modsym::NewformData> forms, const LevelOptions& options) {
  if (forms.empty()) fail(ErrorKind::Usage, "no forms");
  LevelData d;
  d.q = forms.front().level;
  d.height = options.height > 0 ? options.height : default_height(d.q);
  d.forms = std::move(forms);
  const std::size_t n = d.forms.size();
  d.zeros.resize(n);
  d.ranks.resize(n);
  d.off_line.resize(n);
  lfunc::ScanOptions scan;
  scan.jobs = options.jobs;
  for (std::size_t i = 0; i < n; ++i) {
    const lfunc::LFunction L(d.forms[i]);
    d.zeros[i] = lfunc::find_zeros(L, d.height, scan);
    d.ranks[i] = lfunc::analytic_rank(L).rank;
    const auto& z = d.zeros[i];
    const int positive =
        static_cast<int>(std::count_if(z.ordinates.begin(), z.ordinates.end(), [](double g) { return g > 0; }));
    // zeros off the line above 0.01 come in conjugate pairs; the strip
    // |t| < 0.01 holds only the central zero when the line is clean
    const int near_real = lfunc::contour_count(L, -0.25, 1.25, -0.01, 0.01);
    d.off_line[i] = 2 * (z.contour_count - positive) + (near_real - z.central_order);
  }
  if (options.weights) d.weights = petersson::recover_harmonic_weights(d.forms, {3, 0, petersson::kDefaultCap, options.jobs});
  return d;
}

RankBoundReport unconditional_bound(const LevelData& level, double lambda, const weil::TestFunction* pp) {
  const std::vector<double> ones(level.forms.size(), 1.0);
  if (pp && pp->flags().strip_positivity) {
    auto r = assemble(level, *pp, ones, false);
    r.mode = "unconditional";
    r.variant = "pp";
    return r;
  }
  auto r = assemble(level, weil::fejer(lambda), ones, true);
  r.mode = "unconditional";
  r.variant = "measured";
  if (pp) r.notes.push_back("candidate " + pp->id() + " has no verified strip positivity; measured mode");
  return r;
}

RankBoundReport harmonic_bound(const LevelData& level, double lambda, const weil::TestFunction* pp,
                               const std::vector<double>* weights) {
  const auto& hw = require_weights(level);
  const std::vector<double>& w = weights ? *weights : hw.omega;
  if (w.size() != level.forms.size()) fail(ErrorKind::Usage, "weight count does not match the forms");
  const bool use_pp = pp && pp->flags().strip_positivity;
  const weil::TestFunction F = use_pp ? *pp : weil::fejer(lambda);
  auto r = assemble(level, F, w, !use_pp);
  r.mode = "harmonic";
  r.variant = use_pp ? "pp" : "measured";

  const petersson::KloostermanSeries series(level.q, hw.c_max);
  RouteCheck s1;
  s1.direct = r.s1;
  for (const auto& [p, wp] : prime_weights(F, 1)) {
    const auto rhs = series.rhs(1, p);
    s1.petersson += wp * rhs.value;
    s1.tolerance += std::abs(wp) * (rhs.tail_bound + hw.residual);
  }
  s1.agreed = std::abs(s1.direct - s1.petersson) <= s1.tolerance;
  r.s1_routes = s1;
  return r;
}

double default_grh_lambda(std::int64_t q) { return 11.0 / 6.0 * std::log(static_cast<double>(q)); }

RankBoundReport grh_bound(const LevelData& level, double lambda) {
  const auto& hw = require_weights(level);
  const auto F = weil::fejer(lambda);
  auto r = assemble(level, F, hw.omega, false);
  r.mode = "grh";
  r.reference = 23.0 / 22.0;
  const bool clean = std::all_of(level.off_line.begin(), level.off_line.end(), [](int c) { return c == 0; });
  r.grh_verified_height = clean ? level.height : 0.0;
  if (!clean) r.notes.push_back("zeros off the critical line were counted; the bound assumes GRH");
  r.notes.push_back("valid under GRH; verified numerically to the recorded height only");

  const petersson::KloostermanSeries series(level.q, hw.c_max);
  RouteCheck sq;
  for (std::size_t i = 0; i < level.forms.size(); ++i) sq.direct += hw.omega[i] * weil::prime_side(level.forms[i], F).s2_square;
  const auto one = series.rhs(1, 1);
  for (const auto& [p, wp] : prime_weights(F, 2)) {
    const auto pp = series.rhs(p, p);
    if (p == level.q) {
      sq.petersson += wp * pp.value;
      sq.tolerance += std::abs(wp) * (pp.tail_bound + hw.residual);
    } else {
      // a_{p^2} = lambda(p)^2 - 2
      sq.petersson += wp * (pp.value - 2 * one.value);
      sq.tolerance += std::abs(wp) * (pp.tail_bound + 2 * one.tail_bound + 3 * hw.residual);
      r.s2_square_main -= wp;
    }
  }
  sq.agreed = std::abs(sq.direct - sq.petersson) <= sq.tolerance;
  r.s2_square_routes = sq;

  RouteCheck s1;
  s1.direct = r.s1;
  for (const auto& [p, wp] : prime_weights(F, 1)) {
    const auto rhs = series.rhs(1, p);
    s1.petersson += wp * rhs.value;
    s1.tolerance += std::abs(wp) * (rhs.tail_bound + hw.residual);
  }
  s1.agreed = std::abs(s1.direct - s1.petersson) <= s1.tolerance;
  r.s1_routes = s1;
  return r;
}

SignBound sign_lower_bound(const std::vector<modsym::NewformData>& forms) {
  SignBound s;
  if (!forms.empty()) s.q = forms.front().level;
  s.dim = static_cast<int>(forms.size());
  for (const auto& f : forms) s.odd += f.eps < 0;
  s.lower_bound = s.odd;
  s.ratio = s.dim ? static_cast<double>(s.odd) / s.dim : 0.0;
  return s;
}

double density_envelope(std::int64_t q, double alpha, double t1, double t2, double B, double c) {
  const double T = std::max({1.0, std::abs(t1), std::abs(t2)});
  const double lq = std::log(static_cast<double>(q));
  return std::pow(T, B) * std::pow(static_cast<double>(q), 1 - c * (alpha - 0.5)) * (t2 - t1) * lq;
}

std::vector<DensityRow> density_tabulate(const std::vector<std::int64_t>& levels, const std::vector<double>& alphas,
                                         const std::vector<std::pair<double, double>>& boxes,
                                         const DensityOptions& options) {
  std::vector<DensityRow> rows;
  for (auto q : levels) {
    if (!arith::is_prime(q)) fail(ErrorKind::Usage, "level must be prime");
    if (modsym::genus_x0(q) == 0) continue;
    const auto forms = modsym::decompose(q, options.pmax, options.jobs);
    const auto w = petersson::recover_harmonic_weights(forms, {3, 0, petersson::kDefaultCap, options.jobs});
    const std::size_t cells = alphas.size() * boxes.size();
    std::vector<std::vector<int>> counts(forms.size(), std::vector<int>(cells, 0));
    parallel_for(forms.size(), options.jobs, [&](std::size_t i) {
      const lfunc::LFunction L(forms[i]);
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        for (std::size_t b = 0; b < boxes.size(); ++b) {
          counts[i][a * boxes.size() + b] = lfunc::count_zeros_box(L, alphas[a], boxes[b].first, boxes[b].second);
        }
      }
    });
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      for (std::size_t b = 0; b < boxes.size(); ++b) {
        DensityRow row;
        row.q = q;
        row.alpha = alphas[a];
        row.t1 = boxes[b].first;
        row.t2 = boxes[b].second;
        for (std::size_t i = 0; i < forms.size(); ++i) {
          const int n = counts[i][a * boxes.size() + b];
          row.count += n;
          row.harmonic_count += w.omega[i] * n;
        }
        row.envelope = density_envelope(q, row.alpha, row.t1, row.t2, options.B, options.c);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

SigmaPrime vaughan_sigma_prime(double x, std::int64_t c, std::int64_t q) {
  if (c < 1 || q < 1) fail(ErrorKind::Usage, "c and q must be >= 1");
  if (x > 1e7) fail(ErrorKind::Capacity, "sigma prime is summed directly; x must be <= 1e7");
  SigmaPrime s;
  const std::int64_t cq = c * q;
  const double e = std::pow(static_cast<double>(cq), kVaughanEpsilon);
  s.envelope = e * (x + std::pow(static_cast<double>(cq), 0.625) * std::pow(x, 0.75) +
                    static_cast<double>(cq) * std::sqrt(x));
  if (x < 2) return s;
  const auto n_max = static_cast<std::int64_t>(std::floor(x));
  const arith::KloostermanTable table(cq);
  for (auto p : arith::shared_primes(n_max).primes()) {
    if (p > n_max) break;
    const double lp = std::log(static_cast<double>(p));
    for (std::int64_t pk = p; pk <= n_max; pk *= p) {
      s.value += lp * table.value(1, pk);
      if (pk > n_max / p) break;
    }
  }
  s.ratio = std::abs(s.value) / s.envelope;
  return s;
}

KloostermanRoute s1_kloosterman_route(std::int64_t q, double lambda, std::int64_t C, const LevelData* level) {
  if (C < 1) fail(ErrorKind::Usage, "cutoff C must be >= 1");
  KloostermanRoute out;
  out.cut = C;
  const auto primes = prime_weights(weil::fejer(lambda), 1);
  if (primes.empty()) return out;
  const petersson::KloostermanSeries series(q, C);
  for (std::int64_t c = 1; c <= C; ++c) {
    const double cq = static_cast<double>(c * q);
    double inner = 0;
    for (const auto& [p, wp] : primes) {
      inner += wp * series.kloosterman(1, p, c) * petersson::bessel_j1(4 * kPi * std::sqrt(static_cast<double>(p)) / cq);
    }
    out.value += -2 * kPi * inner / cq;
  }
  for (const auto& [p, wp] : primes) out.tail_bound += std::abs(wp) * petersson::tail_bound(1, p, q, C);

  if (level && level->weights) {
    const auto& hw = *level->weights;
    const auto F = weil::fejer(lambda);
    RouteCheck rc;
    for (std::size_t i = 0; i < level->forms.size(); ++i) rc.direct += hw.omega[i] * weil::prime_side(level->forms[i], F).s1;
    rc.petersson = out.value;
    rc.tolerance = out.tail_bound;
    for (const auto& [p, wp] : primes) rc.tolerance += std::abs(wp) * (petersson::tail_bound(1, p, q, hw.c_max) + hw.residual);
    rc.agreed = std::abs(rc.direct - rc.petersson) <= rc.tolerance;
    out.reconciliation = rc;
  }
  return out;
}

std::string to_json(const RankBoundReport& r) {
  nlohmann::ordered_json j;
  j["q"] = r.q;
  j["mode"] = r.mode;
  if (!r.variant.empty()) j["variant"] = r.variant;
  j["test_function"] = r.test_function;
  j["lambda"] = r.lambda;
  j["T"] = r.height;
  j["transform_at_zero"] = r.transform_at_zero;
  j["terms"] = {{"log_q", r.log_q},
                {"gamma_shift", r.gamma_shift},
                {"S1", r.s1},
                {"S2", r.s2},
                {"S2_higher", r.s2_higher},
                {"S2_higher_envelope", r.s2_higher_envelope},
                {"archimedean", r.archimedean},
                {"off_line", r.off_line},
                {"off_line_tail", r.off_line_tail},
                {"quadrature_tol", r.quadrature_tol}};
  j["bound"] = r.bound;
  j["measured"] = r.measured;
  j["slack"] = r.slack;
  auto route = [](const RouteCheck& c) {
    return nlohmann::ordered_json{
        {"direct", c.direct}, {"petersson", c.petersson}, {"tolerance", c.tolerance}, {"agreed", c.agreed}};
  };
  if (r.s1_routes) j["S1_routes"] = route(*r.s1_routes);
  if (r.s2_square_routes) {
    j["S2_square_routes"] = route(*r.s2_square_routes);
    j["S2_square_main"] = r.s2_square_main;
  }
  if (r.mode == "grh") {
    j["grh_verified_height"] = r.grh_verified_height;
    j["reference"] = r.reference;
  }
  j["forms"] = nlohmann::ordered_json::array();
  for (const auto& f : r.forms) {
    j["forms"].push_back({{"index", f.index},
                          {"weight", f.weight},
                          {"rank", f.rank},
                          {"eps", f.eps},
                          {"S1", f.s1},
                          {"S2", f.s2},
                          {"off_line", f.off_line},
                          {"bound", f.bound}});
  }
  j["notes"] = r.notes;
  return j.dump();
}

std::string density_csv(const std::vector<DensityRow>& rows) {
  std::ostringstream out;
  out << "q,alpha,t1,t2,count,harmonic_count,envelope\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%lld,%.6g,%.6g,%.6g,%d,%.10g,%.6g\n", static_cast<long long>(r.q), r.alpha, r.t1,
                  r.t2, r.count, r.harmonic_count, r.envelope);
    out << buf;
  }
  return out.str();
}

}  // namespace j0rank::bounds
