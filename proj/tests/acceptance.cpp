// Acceptance criteria, one PASS/FAIL line each. With no argument every
// criterion runs; otherwise only the numbered ones.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "j0rank/arith.hpp"
#include "j0rank/bounds.hpp"
#include "j0rank/error.hpp"
#include "j0rank/explicit.hpp"
#include "j0rank/lfunc.hpp"
#include "j0rank/modsym.hpp"
#include "j0rank/petersson.hpp"
#include "j0rank/special.hpp"

using namespace j0rank;
using cplx = std::complex<double>;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

std::vector<std::int64_t> levels_up_to(std::int64_t bound) {
  std::vector<std::int64_t> out;
  for (std::int64_t q = 2; q <= bound; ++q)
    if (arith::is_prime(q) && modsym::genus_x0(q) > 0) out.push_back(q);
  return out;
}

const std::vector<modsym::NewformData>& forms(std::int64_t q, std::int64_t pmax) {
  static std::map<std::pair<std::int64_t, std::int64_t>, std::vector<modsym::NewformData>> cache;
  auto it = cache.find({q, pmax});
  if (it == cache.end()) it = cache.emplace(std::pair{q, pmax}, modsym::decompose(q, pmax)).first;
  return it->second;
}

Outcome traces() {
  int checked = 0, wrong = 0;
  std::string first;
  for (std::int64_t q : {11, 37, 43, 53, 67, 101}) {
    const modsym::HeckeDecomposition H(q);
    for (std::int64_t n = 1; n <= 50; ++n) {
      if (n % q == 0) continue;
      ++checked;
      const auto from_symbols = H.trace(n);
      const auto from_formula = modsym::trace_Tn(q, n);
      if (from_symbols != from_formula) {
        if (first.empty()) first = fmt(" first q=%lld n=%lld", (long long)q, (long long)n);
        ++wrong;
      }
    }
  }
  return {wrong == 0, fmt("%d traces compared, %d mismatches", checked, wrong) + first};
}

Outcome functional_equation() {
  double worst = 0;
  int count = 0;
  for (auto q : levels_up_to(101))
    for (const auto& f : forms(q, 2000)) {
      const lfunc::LFunction L(f);
      for (int i = 0; i < 20; ++i) {
        const cplx s{(i % 5) / 4.0, -5.0 + 10.0 * (i / 5) / 3.0 + 0.1 * (i % 3)};
        const cplx lhs = L.completed_split(s, 0.0, f.eps);
        const cplx rhs = L.completed_split(1.0 - s, 0.3, f.eps);
        worst = std::max(worst, std::abs(lhs - static_cast<double>(f.eps) * rhs));
      }
      ++count;
    }
  return {worst < 1e-8, fmt("%d forms x 20 points, worst residual %.2e (limit 1e-8)", count, worst)};
}

Outcome petersson_identities() {
  bool ok = true;
  std::string detail;
  int held = 0, held_failed = 0;
  for (std::int64_t q : {11, 37, 43}) {
    const auto& fs = forms(q, 200);
    const auto w = petersson::recover_harmonic_weights(fs);
    for (const auto& h : petersson::held_out_checks(fs, w)) {
      ++held;
      held_failed += !h.passed;
    }
  }
  ok = held_failed == 0;
  detail = fmt("held-out %d/%d within tails", held - held_failed, held);
  int measure_failed = 0;
  double worst = 0;
  std::int64_t worst_q = 0;
  std::string failing;
  for (auto q : levels_up_to(101)) {
    const auto w = petersson::recover_harmonic_weights(forms(q, 200));
    const auto m = petersson::check_probability_measure(w, 20.0);
    if (!m.passed) {
      ++measure_failed;
      failing += (failing.empty() ? "" : ",") + std::to_string(q);
    }
    if (m.scaled > worst) {
      worst = m.scaled;
      worst_q = q;
    }
  }
  ok = ok && measure_failed == 0;
  detail += fmt("; |sum w - 1| q^1.5 <= 20 fails at %d levels (max %.1f at q=%lld)", measure_failed, worst,
                (long long)worst_q);
  if (!failing.empty()) detail += " [" + failing + "]";
  return {ok, detail};
}

Outcome explicit_formula() {
  int checked = 0, failed = 0;
  double worst_ratio = 0;
  for (std::int64_t q : {11, 17, 19, 37, 43})
    for (const auto& f : forms(q, 2000)) {
      const auto zeros = lfunc::find_zeros(lfunc::LFunction(f), 30.0);
      for (double lambda : {1.0, 2.0, 3.0}) {
        const auto r = weil::explicit_formula_check(f, weil::fejer(lambda), zeros);
        const double allowed = r.zero_tail_bound + r.prime_tail_bound + r.quadrature_tol + 1e-6;
        worst_ratio = std::max(worst_ratio, std::abs(r.residual) / allowed);
        ++checked;
        failed += !r.passed;
      }
    }
  return {failed == 0,
          fmt("%d (form, lambda) pairs, %d outside tail + 1e-6, worst |residual|/allowance %.3f", checked, failed,
              worst_ratio)};
}

Outcome bounding() {
  int failed = 0;
  double min_slack = 1e300;
  std::string where;
  for (auto q : levels_up_to(43)) {
    const auto level = bounds::prepare_level(q);
    int measured = 0;
    for (int r : level.ranks) measured += r;
    const auto reports = {bounds::unconditional_bound(level, 2.0), bounds::harmonic_bound(level, 2.0),
                          bounds::grh_bound(level, bounds::default_grh_lambda(q))};
    for (const auto& r : reports) {
      if (r.slack < min_slack) {
        min_slack = r.slack;
        where = r.mode + " q=" + std::to_string(q);
      }
      failed += r.slack < -1e-4;
    }
    failed += bounds::sign_lower_bound(level.forms).lower_bound > measured;
  }
  return {failed == 0, fmt("9 levels x 3 pipelines + sign, %d violations, least slack %.4f (", failed, min_slack) +
                           where + ")"};
}

Outcome twisted_kloosterman() {
  int checked = 0, failed = 0;
  double worst = 0;
  for (std::int64_t c = 1; c <= 500; ++c) {
    const auto chars = arith::characters_mod(c);
    // S(1, a; c) summed over x directly
    std::vector<cplx> unit(c);
    for (std::int64_t k = 0; k < c; ++k) unit[k] = std::polar(1.0, 2 * std::numbers::pi * k / c);
    std::vector<std::int64_t> inv(c, -1);
    for (std::int64_t x = 0; x < c; ++x)
      for (std::int64_t y = 0; y < c; ++y)
        if ((x * y) % c == 1 % c) {
          inv[x] = y;
          break;
        }
    std::vector<cplx> row(c, 0.0);
    for (std::int64_t a = 0; a < c; ++a)
      for (std::int64_t x = 0; x < c; ++x)
        if (inv[x] >= 0) row[a] += unit[(x + a * inv[x]) % c];
    for (const auto& chi : chars) {
      if (!chi.is_primitive()) continue;
      cplx direct = 0;
      for (std::int64_t a = 0; a < c; ++a)
        if (inv[a] >= 0) direct += row[a] * chi(a);
      const cplx g = arith::gauss_sum(chi);
      const cplx value = arith::twisted_kloosterman_sum(chi, c);
      const double scale = std::abs(g * g);
      const double err = std::max(std::abs(value - g * g), std::abs(direct - g * g)) / scale;
      worst = std::max(worst, err);
      ++checked;
      failed += err > 1e-8;
    }
  }
  return {failed == 0,
          fmt("%d primitive characters, modulus <= 500, worst relative error %.2e", checked, worst)};
}

Outcome weil_and_bessel() {
  int weil_failed = 0, bessel_failed = 0;
  double weil_ratio = 0, bessel_ratio = 0;
  for (std::int64_t c = 1; c <= 1000; ++c) {
    const arith::KloostermanTable table(c);
    const double tc = static_cast<double>(arith::tau(c));
    for (std::int64_t m = 1; m <= 20; ++m)
      for (std::int64_t n = 1; n <= 20; ++n) {
        const double g = static_cast<double>(arith::gcd(arith::gcd(m, n), c));
        const double envelope = std::sqrt(g * static_cast<double>(c)) * tc;
        const double r = std::abs(table.value(m, n)) / envelope;
        weil_ratio = std::max(weil_ratio, r);
        weil_failed += r > 1 + 1e-9;
      }
  }
  for (int i = 1; i <= 100000; ++i) {
    const double x = i * 1e-3;
    const double r = std::abs(special::bessel_j1(x)) / std::min(x / 2, 1 / std::sqrt(x));
    bessel_ratio = std::max(bessel_ratio, r);
    bessel_failed += r > 1;
  }
  return {weil_failed == 0 && bessel_failed == 0,
          fmt("Weil: 400000 sums, max ratio %.4f; J1 <= min(x/2, x^-1/2): 100000 points, max ratio %.4f",
              weil_ratio, bessel_ratio)};
}

Outcome route_reconciliation() {
  bool ok = true;
  std::string detail;
  for (std::int64_t q : {37, 43}) {
    const auto level = bounds::prepare_level(q);
    const auto C = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(q))));
    const auto route = bounds::s1_kloosterman_route(q, 2.0, C, &level);
    const auto& rc = *route.reconciliation;
    ok = ok && rc.agreed;
    detail += fmt("%sq=%lld C=%lld: kloosterman %.6f, direct %.6f, |diff| %.2e <= %.2e", detail.empty() ? "" : "; ",
                  (long long)q, (long long)C, rc.petersson, rc.direct, std::abs(rc.petersson - rc.direct),
                  rc.tolerance);
  }
  return {ok, detail};
}

Outcome density() {
  const auto levels = levels_up_to(101);
  const auto rows = bounds::density_tabulate(levels, {0.55, 0.75, 1.0}, {{-10.0, 10.0}});
  int nonzero = 0;
  std::string where;
  for (const auto& r : rows)
    if (r.alpha >= 0.55 && r.count != 0) {
      ++nonzero;
      where += fmt(" q=%lld alpha=%.2f count=%d", (long long)r.q, r.alpha, r.count);
    }
  return {nonzero == 0, fmt("%zu levels, %zu boxes, %d with zeros right of 0.55", levels.size(), rows.size(), nonzero) +
                            where};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "eigenvalue traces", traces},
      {2, "functional equation", functional_equation},
      {3, "petersson identities", petersson_identities},
      {4, "explicit formula", explicit_formula},
      {5, "bounding property", bounding},
      {6, "twisted kloosterman sums", twisted_kloosterman},
      {7, "weil and bessel bounds", weil_and_bessel},
      {8, "route reconciliation", route_reconciliation},
      {9, "zero density record", density},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %d %s: %s (%.1fs)\n", o.passed ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.passed;
  }
  return failures == 0 ? 0 : 1;
}
