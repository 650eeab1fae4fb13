#include "j0rank/lfunc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "j0rank/error.hpp"
#include "j0rank/parallel.hpp"
#include "j0rank/special.hpp"

namespace j0rank::lfunc {

namespace {

constexpr double kPi = std::numbers::pi;
// the ray y = e^{i phi} u stops this far short of i infinity; costs ~e^4 in cancellation
constexpr double kRotationSlack = 4.0;

struct NearZero {};

}  // namespace

std::vector<double> lambda_coeffs(const modsym::NewformData& f, std::int64_t n) {
  return f.lambda_table(n);
}

LFunction::LFunction(const modsym::NewformData& f)
    : form_(&f),
      q_scale_(std::sqrt(static_cast<double>(f.level)) / (2 * kPi)),
      lambda_(f.lambda_table(f.pmax())) {}

double LFunction::rotation(double t) const {
  t = std::abs(t);
  if (t * 2 / kPi <= kRotationSlack) return 0.0;
  return kPi / 2 - kRotationSlack / t;
}

std::int64_t LFunction::terms_needed(cplx s, double phi, double tol) const {
  // |lambda(n) sqrt(n) G(a, w)| <= 2n e^{-nx} / (nx - (a-1)), x = Re w / n
  const double x = std::cos(phi) / q_scale_;
  const double a1 = std::max(s.real() + 0.5, 1.0) - 1;
  const double a2 = std::max(1.5 - s.real(), 1.0) - 1;
  const double amax = std::max(a1, a2);
  auto log_tail = [&](double n) {
    const double k = n / (n * x - a1) + n / (n * x - a2);
    return std::log(2 * k) - (n + 1) * x - std::log1p(-std::exp(-x));
  };
  double n = std::ceil(2 * amax / x) + 1;
  const double target = std::log(tol);
  for (int it = 0; it < 100; ++it) {
    const double excess = log_tail(n) - target;
    if (excess <= 0) return static_cast<std::int64_t>(n);
    n += std::ceil(excess / x);
  }
  fail(ErrorKind::Numerical, "truncation estimate did not settle");
}

cplx LFunction::rescaled(cplx s, double tol) const {
  if (s.imag() < 0) return std::conj(rescaled(std::conj(s), tol));
  return split_sum(s, rotation(s.imag()), form_->eps, tol);
}

cplx LFunction::split_sum(cplx s, double phi, int eps, double tol) const {
  const std::int64_t n_terms = terms_needed(s, phi, tol * std::sqrt(q_scale_) / 2);
  if (n_terms > horizon()) {
    fail(ErrorKind::Capacity, "coefficient horizon " + std::to_string(horizon()) + " too small at s = (" +
                                  std::to_string(s.real()) + ", " + std::to_string(s.imag()) + "); requires N = " +
                                  std::to_string(n_terms));
  }
  const cplx delta = std::polar(1.0, phi), delta_bar = std::conj(delta);
  const cplx a = s + 0.5, a_dual = 1.5 - s;
  const cplx dual_factor = static_cast<double>(eps) * delta_bar * delta_bar;
  cplx sum = 0.0;
  for (std::int64_t n = 1; n <= n_terms; ++n) {
    const double c = lambda_[n];
    if (c == 0.0) continue;
    const double nn = static_cast<double>(n);
    const cplx term = special::gamma_tail(a, nn * delta / q_scale_) +
                      dual_factor * special::gamma_tail(a_dual, nn * delta_bar / q_scale_);
    sum += c * std::sqrt(nn) * term;
  }
  // delta^{s+1/2} e^{phi t} = e^{i phi (sigma + 1/2)}
  return std::polar(1.0 / std::sqrt(q_scale_), phi * (s.real() + 0.5)) * sum;
}

cplx LFunction::completed_split(cplx s, double phi, int eps, double tol) const {
  const double grow = phi * s.imag();
  return split_sum(s, phi, eps, tol * std::exp(grow)) * std::exp(-grow);
}

int LFunction::fitted_sign(double* residual) const {
  // only the true sign makes Lambda independent of where the Mellin integral is split
  const cplx s{0.6, 0.8};
  double best = HUGE_VAL, other = HUGE_VAL;
  int sign = 0;
  for (int e : {1, -1}) {
    const double r = std::abs(completed_split(s, 0.0, e, 1e-13) - completed_split(s, 0.35, e, 1e-13));
    if (r < best) {
      other = best;
      best = r;
      sign = e;
    } else {
      other = std::min(other, r);
    }
  }
  if (residual) *residual = best;
  if (!(best < 1e-3 * other)) fail(ErrorKind::Numerical, "functional-equation sign fit is inconclusive");
  return sign;
}

cplx LFunction::completed(cplx s, double tol) const {
  const double t = std::abs(s.imag());
  const double grow = rotation(t) * t;
  return rescaled(s, tol * std::exp(grow)) * std::exp(-grow);
}

double LFunction::hardy_z(double t, double tol) const {
  const cplx v = rescaled({0.5, t}, tol);
  return eps() > 0 ? v.real() : v.imag();
}

cplx LFunction::completed_direct(cplx s, std::int64_t terms) const {
  if (terms > horizon()) fail(ErrorKind::Capacity, "requires N = " + std::to_string(terms));
  cplx sum = 0.0;
  for (std::int64_t n = terms; n >= 1; --n) sum += lambda_[n] * std::exp(-s * std::log(static_cast<double>(n)));
  return std::exp(s * std::log(q_scale_) + special::log_gamma(s + 0.5)) * sum;
}

cplx completed_lambda(const modsym::NewformData& f, cplx s, double tol) {
  return LFunction(f).completed(s, tol);
}

namespace {

// argument change of Lambda along the segment z0 -> z1
double track_arg(const LFunction& L, cplx z0, cplx z1, cplx v0, cplx v1, int depth) {
  const cplx zm = 0.5 * (z0 + z1);
  const cplx vm = L.rescaled(zm);
  const double d = std::arg(v1 / v0), d1 = std::arg(vm / v0), d2 = std::arg(v1 / vm);
  if (std::abs(d) < kPi / 3 && std::abs(d1 + d2 - d) < 1e-9) return d;
  if (std::abs(z1 - z0) < 1e-7 || depth > 60) throw NearZero{};
  return track_arg(L, z0, zm, v0, vm, depth + 1) + track_arg(L, zm, z1, vm, v1, depth + 1);
}

double edge_arg(const LFunction& L, cplx z0, cplx z1) {
  // coarse pieces first so the recursion starts from a sane resolution
  const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(z1 - z0) / 0.25)));
  double total = 0;
  cplx prev = z0, v_prev = L.rescaled(z0);
  for (int i = 1; i <= pieces; ++i) {
    const cplx z = z0 + (z1 - z0) * (static_cast<double>(i) / pieces);
    const cplx v = L.rescaled(z);
    total += track_arg(L, prev, z, v_prev, v, 0);
    prev = z;
    v_prev = v;
  }
  return total;
}

struct BoxCount {
  int count;
  double t1, t2;
};

BoxCount contour_count_nudged(const LFunction& L, double s0, double s1, double t1, double t2) {
  for (int attempt = 0; attempt < 4; ++attempt) {
    const double shift = attempt == 0 ? 0.0 : 1e-4 * attempt;
    const double b = t1 - shift, top = t2 + shift;
    const double left = attempt == 0 ? s0 : s0 - shift;
    try {
      const cplx c00{left, b}, c10{s1, b}, c11{s1, top}, c01{left, top};
      const double total = edge_arg(L, c00, c10) + edge_arg(L, c10, c11) + edge_arg(L, c11, c01) +
                           edge_arg(L, c01, c00);
      const double winding = total / (2 * kPi);
      const double rounded = std::round(winding);
      if (std::abs(winding - rounded) > 0.05) continue;
      return {static_cast<int>(rounded), b, top};
    } catch (const NearZero&) {
      continue;
    }
  }
  fail(ErrorKind::Numerical, "argument-principle contour did not converge after perturbation");
}

}  // namespace

int contour_count(const LFunction& L, double sigma0, double sigma1, double t1, double t2) {
  if (!(sigma0 < sigma1) || !(t1 < t2)) fail(ErrorKind::Usage, "contour needs a nondegenerate rectangle");
  return contour_count_nudged(L, sigma0, sigma1, t1, t2).count;
}

int count_zeros_box(const LFunction& L, double alpha, double t1, double t2) {
  if (!(alpha > 0.5 && alpha <= 1.0)) fail(ErrorKind::Usage, "alpha must lie in (1/2, 1]");
  if (!(t1 < t2)) fail(ErrorKind::Usage, "need t1 < t2");
  // Lambda has no zeros with Re s > 1, so the right edge sits at 5/4
  return contour_count(L, alpha, 1.25, t1, t2);
}

RankResult analytic_rank(const LFunction& L) {
  const int parity = L.eps() > 0 ? 0 : 1;
  constexpr int kMaxOrder = 8;
  auto attempt = [&](int points, double radius, double tol, bool& ambiguous) {
    std::vector<cplx> values(points);
    for (int j = 0; j < points; ++j) {
      values[j] = L.completed(0.5 + std::polar(radius, 2 * kPi * j / points), tol);
    }
    RankResult out;
    out.points = points;
    for (int k = 0; k <= kMaxOrder + 2; ++k) {
      cplx c = 0.0;
      for (int j = 0; j < points; ++j) c += values[j] * std::polar(1.0, -2 * kPi * j * k / points);
      out.taylor.push_back(std::abs(c) / points / std::pow(radius, k));
    }
    ambiguous = false;
    out.rank = -1;
    for (int k = parity; k <= kMaxOrder; k += 2) {
      const double floor = 1e-6 * std::max(1.0, out.taylor[k + 2]);
      if (out.taylor[k] >= 10 * floor) {
        out.rank = k;
        break;
      }
      if (out.taylor[k] > floor / 10) {
        ambiguous = true;
        break;
      }
    }
    double odd_max = 0;
    for (int k = 1 - parity; k <= kMaxOrder; k += 2) odd_max = std::max(odd_max, out.taylor[k]);
    out.parity_ok = odd_max < 1e-8;
    return out;
  };
  bool ambiguous = false;
  RankResult r = attempt(32, 0.5, 1e-12, ambiguous);
  if (ambiguous || r.rank < 0) r = attempt(64, 0.4, 1e-14, ambiguous);
  if (ambiguous || r.rank < 0) {
    fail(ErrorKind::Numerical, "unresolved analytic rank for q = " + std::to_string(L.form().level) +
                                   " form " + std::to_string(L.form().index));
  }
  return r;
}

namespace {

struct Scan {
  std::vector<std::pair<double, double>> brackets;
};

Scan scan_interval(const LFunction& L, double lo, double hi, double step, const ScanOptions& opt) {
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  std::vector<double> grid(n + 1), z(n + 1);
  for (std::size_t i = 0; i <= n; ++i) grid[i] = std::min(hi, lo + static_cast<double>(i) * step);
  parallel_for(n + 1, opt.jobs, [&](std::size_t i) { z[i] = L.hardy_z(grid[i], opt.eval_tol); });

  Scan out;
  auto sign_changes = [&](double a, double b, double za, double zb, auto& self, int depth) -> void {
    if ((za < 0) != (zb < 0)) {
      out.brackets.emplace_back(a, b);
      return;
    }
    if (depth == 0) return;
    // a dip in |Z| without a sign change may hide a close pair
    const int sub = 8;
    double prev_t = a, prev_z = za;
    for (int k = 1; k <= sub; ++k) {
      const double t = a + (b - a) * k / sub;
      const double zt = k == sub ? zb : L.hardy_z(t, opt.eval_tol);
      self(prev_t, t, prev_z, zt, self, depth - 1);
      prev_t = t;
      prev_z = zt;
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    const bool dip = i > 0 && i + 1 < n && (z[i] < 0) == (z[i + 1] < 0) &&
                     std::abs(z[i]) < std::abs(z[i - 1]) && std::abs(z[i + 1]) < std::abs(z[i + 2]);
    sign_changes(grid[i], grid[i + 1], z[i], z[i + 1], sign_changes, dip ? 1 : 0);
  }

  parallel_for(out.brackets.size(), opt.jobs, [&](std::size_t k) {
    auto& [a, b] = out.brackets[k];
    // Illinois regula falsi; the bracket keeps a certified sign change throughout
    double za = L.hardy_z(a, opt.eval_tol), zb = L.hardy_z(b, opt.eval_tol);
    int side = 0;
    for (int it = 0; b - a > opt.refine_tol; ++it) {
      double m = (a * zb - b * za) / (zb - za);
      const double guard = 0.01 * (b - a);
      if (it >= 40 || !(m > a + guard && m < b - guard)) m = 0.5 * (a + b);
      const double zm = L.hardy_z(m, opt.eval_tol);
      if (zm == 0.0) {
        a = b = m;
        break;
      }
      if ((zm < 0) == (za < 0)) {
        a = m;
        za = zm;
        if (side == -1) zb *= 0.5;
        side = -1;
      } else {
        b = m;
        zb = zm;
        if (side == 1) za *= 0.5;
        side = 1;
      }
    }
  });
  return out;
}

}  // namespace

ZeroList find_zeros(const LFunction& L, double height, const ScanOptions& opt) {
  if (!(height >= 1.0)) fail(ErrorKind::Usage, "zero scan needs T >= 1");
  const auto& f = L.form();
  ZeroList out;
  out.level = f.level;
  out.index = f.index;
  out.height = height;
  out.central_order = analytic_rank(L).rank;

  const double step = 0.5 * kPi / std::log(static_cast<double>(f.level) * std::max(height, 3.0));
  const double t_start = 0.02, t_box = 0.01;
  // scan past T so a nudged contour top never outruns the scan
  const double scan_top = height + 0.1;
  Scan scan = scan_interval(L, t_start, scan_top, step, opt);

  auto found_in = [&](double a, double b) {
    return static_cast<int>(std::count_if(scan.brackets.begin(), scan.brackets.end(), [&](const auto& br) {
      const double g = 0.5 * (br.first + br.second);
      return g > a && g <= b;
    }));
  };
  BoxCount total = contour_count_nudged(L, -0.25, 1.25, t_box, height);
  if (total.count != found_in(total.t1, total.t2)) {
    // localise the discrepancy and rescan it finely
    const int pieces = 8;
    const double width = (height - t_box) / pieces;
    for (int k = 0; k < pieces; ++k) {
      const double a = t_box + k * width, b = a + width;
      const BoxCount part = contour_count_nudged(L, -0.25, 1.25, a, b);
      if (part.count == found_in(part.t1, part.t2)) continue;
      Scan fine = scan_interval(L, std::max(part.t1, t_start), part.t2, step / 16, opt);
      scan.brackets.erase(std::remove_if(scan.brackets.begin(), scan.brackets.end(),
                                         [&](const auto& br) {
                                           const double g = 0.5 * (br.first + br.second);
                                           return g > part.t1 && g <= part.t2;
                                         }),
                          scan.brackets.end());
      for (const auto& br : fine.brackets) {
        const double g = 0.5 * (br.first + br.second);
        if (g > part.t1 && g <= part.t2) scan.brackets.push_back(br);
      }
      std::sort(scan.brackets.begin(), scan.brackets.end());
      if (part.count != found_in(part.t1, part.t2)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "missing zero in t in [%.6f, %.6f]: contour count %d, sign changes %d",
                      part.t1, part.t2, part.count, found_in(part.t1, part.t2));
        fail(ErrorKind::Numerical, buf);
      }
    }
    total = contour_count_nudged(L, -0.25, 1.25, t_box, height);
    if (total.count != found_in(total.t1, total.t2)) {
      fail(ErrorKind::Numerical, "zero count mismatch on [0, " + std::to_string(height) + "]");
    }
  }
  out.contour_count = found_in(t_box, height);

  std::vector<double> positive;
  for (const auto& br : scan.brackets) {
    const double g = 0.5 * (br.first + br.second);
    if (g <= height) {
      positive.push_back(g);
      out.brackets.push_back(br);
    }
  }
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) out.ordinates.push_back(-*it);
  out.ordinates.insert(out.ordinates.end(), out.central_order, 0.0);
  out.ordinates.insert(out.ordinates.end(), positive.begin(), positive.end());
  return out;
}

std::string zeros_csv(const std::vector<ZeroList>& lists) {
  std::ostringstream os;
  os << "q,index,gamma\n";
  char buf[64];
  for (const auto& z : lists) {
    for (double g : z.ordinates) {
      std::snprintf(buf, sizeof buf, "%.10g", g);
      os << z.level << ',' << z.index << ',' << buf << '\n';
    }
  }
  return os.str();
}

}  // namespace j0rank::lfunc
