#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "j0rank/explicit.hpp"
#include "j0rank/lfunc.hpp"
#include "j0rank/modsym.hpp"
#include "j0rank/petersson.hpp"

namespace j0rank::bounds {

/// Everything the pipelines read for one level: forms, zeros to height T,
/// measured ranks and harmonic weights.
struct LevelData {
  std::int64_t q = 0;
  double height = 0;
  std::vector<modsym::NewformData> forms;
  std::vector<lfunc::ZeroList> zeros;
  std::vector<int> ranks;
  /// zeros off the line with |Im| <= height, from the argument-principle counts
  std::vector<int> off_line;
  std::optional<petersson::HarmonicWeights> weights;
};

struct LevelOptions {
  std::int64_t pmax = 10000;
  double height = 0;  // 0: log^3 q
  bool weights = true;
  int jobs = 1;
};

double default_height(std::int64_t q);
LevelData prepare_level(std::int64_t q, const LevelOptions& options = {});
/// Same, reusing forms already at hand.
LevelData prepare_level(std::vector<modsym::NewformData> forms, const LevelOptions& options = {});

struct FormTerms {
  int index = 0;
  double weight = 1;
  int rank = 0;
  int eps = 0;
  double log_q = 0;  // F(0) log q
  double s1 = 0, s2 = 0;
  double archimedean = 0;
  double off_line = 0;
  double bound = 0;  // this form's rank bound
};

struct RouteCheck {
  double direct = 0;     // from the recovered weights
  double petersson = 0;  // from the Petersson right-hand side
  double tolerance = 0;
  bool agreed = false;
};

struct RankBoundReport {
  std::int64_t q = 0;
  std::string mode;     // unconditional, harmonic, grh
  std::string variant;  // pp or measured for unconditional, empty otherwise
  std::string test_function;
  double lambda = 0;
  double height = 0;
  double transform_at_zero = 0;
  // weighted sums over the forms; bound = (log_q + gamma_shift - 2 s1 - 2 s2
  // - 2 archimedean + off_line + off_line_tail) / transform_at_zero
  double log_q = 0;
  double gamma_shift = 0;
  double s1 = 0, s2 = 0;
  double s2_higher = 0, s2_higher_envelope = 0;
  double archimedean = 0;
  double off_line = 0;
  double off_line_tail = 0;
  double quadrature_tol = 0;
  double bound = 0;
  double measured = 0;
  double slack = 0;
  std::vector<FormTerms> forms;
  std::optional<RouteCheck> s1_routes;
  std::optional<RouteCheck> s2_square_routes;
  double s2_square_main = 0;  // -sum_p F(2 log p) log p / p, harmonic n = 2 leading part
  double grh_verified_height = 0;
  double reference = 0;  // asymptotic target, grh mode only
  std::vector<std::string> notes;
};

/// Unconditional pipeline. A test function with verified strip positivity
/// runs in pp mode; anything else falls back to the Fejer kernel of width
/// lambda with the off-line zeros measured.
RankBoundReport unconditional_bound(const LevelData& level, double lambda, const weil::TestFunction* pp = nullptr);

/// Harmonic pipeline; `weights` overrides the recovered ones.
RankBoundReport harmonic_bound(const LevelData& level, double lambda, const weil::TestFunction* pp = nullptr,
                               const std::vector<double>* weights = nullptr);

double default_grh_lambda(std::int64_t q);
RankBoundReport grh_bound(const LevelData& level, double lambda);

struct SignBound {
  std::int64_t q = 0;
  int odd = 0;
  int dim = 0;
  int lower_bound = 0;
  double ratio = 0;
};

SignBound sign_lower_bound(const std::vector<modsym::NewformData>& forms);

struct DensityRow {
  std::int64_t q = 0;
  double alpha = 0, t1 = 0, t2 = 0;
  int count = 0;
  double harmonic_count = 0;
  double envelope = 0;
};

struct DensityOptions {
  double B = 4;
  double c = 0.5;
  std::int64_t pmax = 400;
  int jobs = 1;
};

/// T^B q^{1 - c (alpha - 1/2)} (t2 - t1) log q with T = max(1, |t1|, |t2|).
double density_envelope(std::int64_t q, double alpha, double t1, double t2, double B, double c);

std::vector<DensityRow> density_tabulate(const std::vector<std::int64_t>& levels, const std::vector<double>& alphas,
                                         const std::vector<std::pair<double, double>>& boxes,
                                         const DensityOptions& options = {});

struct SigmaPrime {
  double value = 0;
  double envelope = 0;
  double ratio = 0;
};

inline constexpr double kVaughanEpsilon = 0.05;
/// Fitted on q <= 101, c in {1,2,3,5,10}, x <= 10^4 (observed maximum 0.152).
inline constexpr double kVaughanConstant = 0.2;

/// sum_{n <= x} Lambda(n) S(1, n; c q) against
/// (cq)^eps (x + (cq)^{5/8} x^{3/4} + cq x^{1/2}).
SigmaPrime vaughan_sigma_prime(double x, std::int64_t c, std::int64_t q);

struct KloostermanRoute {
  double value = 0;  // sum over c <= C
  double tail_bound = 0;
  std::int64_t cut = 0;
  std::optional<RouteCheck> reconciliation;
};

/// Harmonic S1 for the Fejer kernel of width lambda through the Kloosterman
/// expansion, exact up to c <= C; reconciled with the weights when given.
KloostermanRoute s1_kloosterman_route(std::int64_t q, double lambda, std::int64_t C,
                                      const LevelData* level = nullptr);

std::string to_json(const RankBoundReport& r);
std::string density_csv(const std::vector<DensityRow>& rows);

}  // namespace j0rank::bounds
