#include "j0rank/petersson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "j0rank/error.hpp"
#include "j0rank/parallel.hpp"
#include "j0rank/special.hpp"

namespace j0rank::petersson {

namespace {

constexpr double kPi = std::numbers::pi;

double tau_sum_tail(double c) {
  // sum_{k > c} tau(k) k^{-3/2} <= 3 (log c + 3) / sqrt c
  return 3.0 * (std::log(c) + 3.0) / std::sqrt(c);
}

}  // namespace

double bessel_j1(double x) { return special::bessel_j1(x); }

double tail_bound(std::int64_t m, std::int64_t n, std::int64_t q, std::int64_t c_max) {
  if (c_max < 1) fail(ErrorKind::Usage, "c_max must be >= 1");
  const double g = static_cast<double>(arith::gcd(m, n));
  const double qd = static_cast<double>(q);
  // tau(cq) <= 2 tau(c) for prime q
  return 8 * kPi * kPi * std::sqrt(static_cast<double>(m) * n * g) / (qd * std::sqrt(qd)) *
         tau_sum_tail(static_cast<double>(c_max));
}

std::int64_t c_max_for(std::int64_t m, std::int64_t n, std::int64_t q, double target, std::int64_t cap) {
  if (tail_bound(m, n, q, cap) > target) return cap;
  std::int64_t lo = 1, hi = cap;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (tail_bound(m, n, q, mid) <= target) hi = mid;
    else lo = mid + 1;
  }
  return lo;
}

KloostermanSeries::KloostermanSeries(std::int64_t q, std::int64_t c_max) : q_(q), c_max_(c_max) {
  if (q < 1 || !arith::is_prime(q)) fail(ErrorKind::Usage, "level must be prime");
  if (c_max < 1) fail(ErrorKind::Usage, "c_max must be >= 1");
  factors_.resize(static_cast<std::size_t>(c_max) + 1);
  for (std::int64_t c = 1; c <= c_max; ++c) {
    const std::int64_t modulus = c * q;
    auto& list = factors_[static_cast<std::size_t>(c)];
    for (auto [p, e] : arith::factorize(modulus)) {
      std::int64_t r = 1;
      for (int i = 0; i < e; ++i) r *= p;
      auto& slot = tables_[r];
      if (!slot) slot = std::make_unique<arith::KloostermanTable>(r);
      const std::int64_t rest = modulus / r;
      list.push_back({slot.get(), rest == 1 ? 1 : arith::inverse_mod(rest % r, r)});
    }
  }
}

double KloostermanSeries::kloosterman(std::int64_t m, std::int64_t n, std::int64_t c) const {
  if (c < 1 || c > c_max_) fail(ErrorKind::Usage, "modulus outside the precomputed range");
  double s = 1;
  for (const auto& f : factors_[static_cast<std::size_t>(c)]) {
    const std::int64_t r = f.table->modulus();
    const auto mm = static_cast<std::int64_t>(static_cast<__int128>(arith::mod(m, r)) * f.twist % r);
    const auto nn = static_cast<std::int64_t>(static_cast<__int128>(arith::mod(n, r)) * f.twist % r);
    s *= f.table->value(mm, nn);
  }
  return s;
}

PeterssonRHS KloostermanSeries::rhs(std::int64_t m, std::int64_t n) const {
  if (m < 1 || n < 1) fail(ErrorKind::Usage, "Petersson indices must be >= 1");
  PeterssonRHS r;
  r.m = m;
  r.n = n;
  r.q = q_;
  r.c_max = c_max_;
  r.delta = m == n ? 1.0 : 0.0;
  const double root = std::sqrt(static_cast<double>(m) * static_cast<double>(n));
  double sum = 0;
  for (std::int64_t c = c_max_; c >= 1; --c) {
    const double cq = static_cast<double>(c * q_);
    sum += kloosterman(m, n, c) / cq * special::bessel_j1(4 * kPi * root / cq);
  }
  r.kloosterman_sum_value = -2 * kPi * sum;
  r.value = r.delta + r.kloosterman_sum_value;
  r.tail_bound = tail_bound(m, n, q_, c_max_);
  return r;
}

PeterssonRHS petersson_rhs(std::int64_t m, std::int64_t n, std::int64_t q, std::int64_t c_max) {
  return KloostermanSeries(q, c_max).rhs(m, n);
}

std::vector<std::pair<std::int64_t, std::int64_t>> default_pairs(std::int64_t q, std::size_t count) {
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  for (std::int64_t n = 1; pairs.size() < count; ++n) {
    if (n % q != 0 && arith::is_squarefree(n)) pairs.emplace_back(1, n);
  }
  return pairs;
}

HarmonicWeights recover_harmonic_weights(const std::vector<modsym::NewformData>& forms,
                                         const WeightOptions& options) {
  if (forms.empty()) fail(ErrorKind::Usage, "no forms to weight");
  const std::size_t count = std::max<std::size_t>(3, options.pairs_per_form * forms.size());
  return recover_harmonic_weights(forms, default_pairs(forms.front().level, count), options);
}

HarmonicWeights recover_harmonic_weights(const std::vector<modsym::NewformData>& forms,
                                         std::vector<std::pair<std::int64_t, std::int64_t>> pairs,
                                         const WeightOptions& options) {
  if (forms.empty()) fail(ErrorKind::Usage, "no forms to weight");
  const std::int64_t q = forms.front().level;
  const std::size_t dim = forms.size();
  if (pairs.size() < dim) fail(ErrorKind::Usage, "pair set smaller than the number of forms");
  std::int64_t worst_m = 1, worst_n = 1;
  for (auto [m, n] : pairs) {
    if (m < 1 || n < 1 || m % q == 0 || n % q == 0) fail(ErrorKind::Usage, "pairs must be coprime to the level");
    if (m * n * arith::gcd(m, n) > worst_m * worst_n * arith::gcd(worst_m, worst_n)) worst_m = m, worst_n = n;
  }

  HarmonicWeights w;
  w.q = q;
  w.pairs = pairs;
  w.c_max = options.c_max > 0 ? options.c_max : c_max_for(worst_m, worst_n, q, kTailTarget, options.c_cap);

  const KloostermanSeries series(q, w.c_max);
  std::vector<PeterssonRHS> rhs(pairs.size());
  parallel_for(pairs.size(), options.jobs, [&](std::size_t i) { rhs[i] = series.rhs(pairs[i].first, pairs[i].second); });

  Eigen::MatrixXd A(pairs.size(), dim);
  Eigen::VectorXd b(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) A(i, j) = forms[j].lambda(pairs[i].first) * forms[j].lambda(pairs[i].second);
    b(i) = rhs[i].value;
    w.tail_bound = std::max(w.tail_bound, rhs[i].tail_bound);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  w.condition = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (!(w.condition < 1e8)) {
    std::ostringstream msg;
    msg << "ill-conditioned weight system at q=" << q << " (condition " << w.condition
        << "); enlarge the pair set";
    fail(ErrorKind::Invariant, msg.str());
  }
  const Eigen::VectorXd omega = svd.solve(b);
  w.omega.assign(omega.data(), omega.data() + omega.size());
  w.residual = (A * omega - b).cwiseAbs().maxCoeff();
  w.positive = std::all_of(w.omega.begin(), w.omega.end(), [](double x) { return x > 0; });
  return w;
}

void attach_weights(std::vector<modsym::NewformData>& forms, const HarmonicWeights& w) {
  if (forms.size() != w.omega.size()) fail(ErrorKind::Usage, "weight table does not match the forms");
  for (std::size_t i = 0; i < forms.size(); ++i) forms[i].weight_harmonic = w.omega[i];
}

std::vector<HeldOutCheck> held_out_checks(const std::vector<modsym::NewformData>& forms, const HarmonicWeights& w,
                                          std::int64_t limit) {
  const KloostermanSeries series(w.q, w.c_max);
  std::vector<HeldOutCheck> out;
  for (std::int64_t m = 1; m <= limit; ++m) {
    for (std::int64_t n = m; n <= limit; ++n) {
      if (m % w.q == 0 || n % w.q == 0) continue;
      if (std::find(w.pairs.begin(), w.pairs.end(), std::make_pair(m, n)) != w.pairs.end()) continue;
      HeldOutCheck h;
      h.m = m;
      h.n = n;
      for (std::size_t j = 0; j < forms.size(); ++j) h.lhs += w.omega[j] * forms[j].lambda(m) * forms[j].lambda(n);
      const auto r = series.rhs(m, n);
      h.rhs = r.value;
      h.tail_bound = r.tail_bound;
      h.passed = std::abs(h.lhs - h.rhs) <= r.tail_bound + w.residual;
      out.push_back(h);
    }
  }
  return out;
}

MeasureCheck check_probability_measure(const HarmonicWeights& w, double constant) {
  MeasureCheck c;
  c.q = w.q;
  for (double x : w.omega) c.total += x;
  c.deviation = std::abs(c.total - 1);
  const double q32 = std::pow(static_cast<double>(w.q), 1.5);
  c.scaled = c.deviation * q32;
  c.constant = constant;
  c.passed = c.deviation <= constant / q32;
  return c;
}

double off_diagonal_ratio(const PeterssonRHS& r) {
  const double g = static_cast<double>(arith::gcd(arith::gcd(r.m, r.n), r.q));
  const double shape = static_cast<double>(arith::tau(r.q)) * std::sqrt(g) *
                       std::sqrt(static_cast<double>(r.m) * static_cast<double>(r.n)) /
                       std::pow(static_cast<double>(r.q), 1.5);
  return std::abs(r.value - r.delta) / shape;
}

TraceCheck brumer_trace_check(std::int64_t q, std::int64_t p, double constant) {
  if (!arith::is_prime(q) || !arith::is_prime(p) || p == q) fail(ErrorKind::Usage, "need distinct primes p, q");
  TraceCheck t;
  t.q = q;
  t.p = p;
  t.trace = modsym::trace_Tn(q, p);
  const double sp = std::sqrt(static_cast<double>(p));
  t.lambda_sum = t.trace.get_d() / sp;
  const double tq = static_cast<double>(arith::tau(q));
  const double lg = std::log(static_cast<double>(p) * static_cast<double>(q));
  t.envelope = tq * tq * tq * lg * lg * (sp + std::sqrt(static_cast<double>(q)));
  t.ratio = std::abs(t.lambda_sum) / t.envelope;
  t.passed = t.ratio <= constant;
  return t;
}

std::string weights_csv(const std::vector<HarmonicWeights>& tables) {
  std::ostringstream out;
  out << "q,index,omega,residual\n";
  char buf[64];
  for (const auto& w : tables) {
    for (std::size_t i = 0; i < w.omega.size(); ++i) {
      out << w.q << ',' << i << ',';
      std::snprintf(buf, sizeof buf, "%.12g,%.3g", w.omega[i], w.residual);
      out << buf << '\n';
    }
  }
  return out.str();
}

}  // namespace j0rank::petersson
