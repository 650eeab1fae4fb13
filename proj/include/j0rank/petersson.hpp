#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "j0rank/arith.hpp"
#include "j0rank/modsym.hpp"

namespace j0rank::petersson {

double bessel_j1(double x);

struct PeterssonRHS {
  std::int64_t m = 0, n = 0, q = 0, c_max = 0;
  double delta = 0;
  /// -2 pi sum_{c <= c_max} S(m,n;cq)/(cq) J1(4 pi sqrt(mn)/(cq))
  double kloosterman_sum_value = 0;
  double value = 0;
  double tail_bound = 0;
};

/// Bound for the terms c > c_max, from |S(m,n;c)| <= tau(c) (m,n,c)^{1/2} c^{1/2},
/// J1(x) <= x/2 and sum_{c <= x} tau(c) <= x (1 + log x).
double tail_bound(std::int64_t m, std::int64_t n, std::int64_t q, std::int64_t c_max);

/// Smallest c_max whose tail bound is <= target, or `cap` if that is larger.
std::int64_t c_max_for(std::int64_t m, std::int64_t n, std::int64_t q, double target, std::int64_t cap);

inline constexpr double kTailTarget = 1e-8;
inline constexpr std::int64_t kDefaultCap = 3000;

/// The Kloosterman side for one level with prime-power tables shared
/// across (m, n).
class KloostermanSeries {
 public:
  KloostermanSeries(std::int64_t q, std::int64_t c_max);

  std::int64_t level() const noexcept { return q_; }
  std::int64_t c_max() const noexcept { return c_max_; }
  /// S(m, n; c q)
  double kloosterman(std::int64_t m, std::int64_t n, std::int64_t c) const;
  PeterssonRHS rhs(std::int64_t m, std::int64_t n) const;

 private:
  struct Factor {
    const arith::KloostermanTable* table;
    std::int64_t twist;
  };

  std::int64_t q_, c_max_;
  std::map<std::int64_t, std::unique_ptr<arith::KloostermanTable>> tables_;
  std::vector<std::vector<Factor>> factors_;  // index c
};

PeterssonRHS petersson_rhs(std::int64_t m, std::int64_t n, std::int64_t q, std::int64_t c_max);

/// (1, n) for squarefree n coprime to q, ascending, starting at n = 1.
std::vector<std::pair<std::int64_t, std::int64_t>> default_pairs(std::int64_t q, std::size_t count);

struct HarmonicWeights {
  std::int64_t q = 0;
  std::vector<double> omega;  // by form index
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  std::int64_t c_max = 0;
  double residual = 0;    // max |sum_f omega_f lambda_f(m) lambda_f(n) - rhs| over the pairs
  double tail_bound = 0;  // max certified tail over the pairs
  double condition = 0;
  bool positive = false;
};

struct WeightOptions {
  std::size_t pairs_per_form = 3;
  std::int64_t c_max = 0;  // 0: from the tail target, capped
  std::int64_t c_cap = kDefaultCap;
  int jobs = 1;
};

/// Least squares for the weights against the Petersson right-hand side.
/// Throws Invariant when the eigenvalue columns are nearly dependent.
HarmonicWeights recover_harmonic_weights(const std::vector<modsym::NewformData>& forms,
                                         const WeightOptions& options = {});
HarmonicWeights recover_harmonic_weights(const std::vector<modsym::NewformData>& forms,
                                         std::vector<std::pair<std::int64_t, std::int64_t>> pairs,
                                         const WeightOptions& options);

/// Sets weight_harmonic on each form.
void attach_weights(std::vector<modsym::NewformData>& forms, const HarmonicWeights& w);

struct HeldOutCheck {
  std::int64_t m = 0, n = 0;
  double lhs = 0, rhs = 0, tail_bound = 0;
  bool passed = false;
};

/// Every (m, n) with m <= n <= limit coprime to q that the fit did not use.
std::vector<HeldOutCheck> held_out_checks(const std::vector<modsym::NewformData>& forms, const HarmonicWeights& w,
                                          std::int64_t limit = 20);

struct MeasureCheck {
  std::int64_t q = 0;
  double total = 0;
  double deviation = 0;
  double scaled = 0;  // deviation q^{3/2}
  double constant = 0;
  bool passed = false;
};

inline constexpr double kMeasureConstant = 20.0;

MeasureCheck check_probability_measure(const HarmonicWeights& w, double constant = kMeasureConstant);

/// |value - delta| / (tau(q) (m,n,q)^{1/2} (mn)^{1/2} q^{-3/2})
double off_diagonal_ratio(const PeterssonRHS& r);

/// Envelope constant for off_diagonal_ratio, fitted on q <= 101, m, n <= 20
/// (observed maximum 45.8).
inline constexpr double kOffDiagonalConstant = 50.0;

struct TraceCheck {
  std::int64_t q = 0, p = 0;
  mpq_class trace;
  double lambda_sum = 0;  // trace / sqrt p
  double envelope = 0;    // tau(q)^3 log^2(pq) (sqrt p + sqrt q)
  double ratio = 0;
  bool passed = false;
};

/// Ratio constant for the trace envelope, fitted on q <= 101, p <= 500
/// (observed maximum 0.0039 at q = 11, p = 2).
inline constexpr double kTraceConstant = 0.005;

TraceCheck brumer_trace_check(std::int64_t q, std::int64_t p, double constant = kTraceConstant);

std::string weights_csv(const std::vector<HarmonicWeights>& tables);

}  // namespace j0rank::petersson
