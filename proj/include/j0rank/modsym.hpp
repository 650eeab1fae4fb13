#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "j0rank/exact.hpp"

namespace j0rank::modsym {

using exact::QMatrix;
using exact::QPoly;
using exact::Rational;

struct P1Point {
  std::int64_t c;
  std::int64_t d;
};

/// Canonical representatives of P^1(Z/q): (i:1) for 0 <= i < q, then (1:0).
std::vector<P1Point> p1_list(std::int64_t q);

struct IntMatrix2 {
  std::int64_t a, b, c, d;
};

/// Cremona's continued-fraction Heilbronn matrices of determinant p.
std::vector<IntMatrix2> heilbronn_cremona(std::int64_t p);
/// Merel's set of determinant n.
std::vector<IntMatrix2> heilbronn_merel(std::int64_t n);

std::int64_t genus_x0(std::int64_t q);

enum class Quotient { Full, Plus };

/// Weight-2 Manin symbols for Gamma_0(q), q prime, modulo the 2- and 3-term
/// relations (and the star involution for the plus quotient).
class ManinSymbolSpace {
 public:
  ManinSymbolSpace(std::int64_t q, Quotient quotient);

  std::int64_t level() const noexcept { return q_; }
  Quotient quotient() const noexcept { return quotient_; }
  std::size_t dimension() const noexcept { return reps_.size(); }
  std::size_t cuspidal_dimension() const noexcept { return cusp_.cols(); }

  std::int64_t p1_index(std::int64_t c, std::int64_t d) const;
  /// Coordinates of the symbol with P^1 index i in the quotient basis.
  const std::vector<std::pair<std::size_t, Rational>>& coordinates(std::size_t i) const {
    return coords_[i];
  }
  /// P^1 index of the symbol chosen to represent basis vector b.
  std::size_t representative(std::size_t b) const { return reps_[b]; }

  const QMatrix& boundary() const noexcept { return boundary_; }
  /// Columns span the cuspidal subspace, in quotient coordinates.
  const QMatrix& cuspidal_basis() const noexcept { return cusp_; }

  /// T_p (p != q) or U_q applied to one symbol, in quotient coordinates.
  std::vector<Rational> hecke_image(std::int64_t p, std::size_t symbol) const;
  /// Image of an integer combination of symbols, one Heilbronn pass.
  std::vector<Rational> hecke_image(
      std::int64_t p, const std::vector<std::pair<std::size_t, long>>& symbols) const;
  /// Hecke operator on the whole quotient; column b is the image of basis b.
  QMatrix hecke_full(std::int64_t p) const;
  /// Hecke operator restricted to the cuspidal subspace.
  QMatrix hecke_matrix(std::int64_t p) const;

 private:
  std::int64_t q_;
  Quotient quotient_;
  std::vector<std::int64_t> inverse_;
  std::vector<std::vector<std::pair<std::size_t, Rational>>> coords_;
  std::vector<std::size_t> reps_;
  QMatrix boundary_;
  QMatrix cusp_;
};

ManinSymbolSpace cuspidal_space(std::int64_t q);

/// Matrix of m on the column span of basis, assuming the span is invariant.
QMatrix restrict_to(const QMatrix& m, const QMatrix& basis);

/// An algebraic integer given exactly: either a rational or the k-th real root
/// (0-based, ascending among distinct real roots) of a squarefree integer
/// polynomial.
struct AlgebraicValue {
  std::optional<Rational> rational;
  QPoly poly;
  int root = 0;

  static AlgebraicValue from_integer(std::int64_t v);
  double value() const;
  std::string to_string() const;
  static AlgebraicValue parse(const std::string& text);
  bool operator==(const AlgebraicValue& o) const {
    return rational == o.rational && poly == o.poly && root == o.root;
  }
};

/// Real root k of a squarefree polynomial, as a sign-certified double.
double root_value(const QPoly& poly, int k);

struct NewformData {
  std::int64_t level = 0;
  int index = 0;
  int eps = 0;
  int a_q = 0;
  std::vector<std::int64_t> primes;
  std::vector<AlgebraicValue> exact;
  std::vector<double> a_p;
  std::optional<double> weight_harmonic;

  std::int64_t pmax() const { return primes.empty() ? 0 : primes.back(); }
  /// Classical a_p; Capacity error beyond the stored horizon.
  double ap(std::int64_t p) const;
  /// Hecke-normalized lambda(n) = a_n / sqrt(n), by multiplicativity.
  double lambda(std::int64_t n) const;
  /// lambda(1..n_max); entry 0 unused.
  std::vector<double> lambda_table(std::int64_t n_max) const;

  bool operator==(const NewformData& o) const;
};

/// lambda(p^k) from the Hecke recursion; lambda(q^k) = lambda(q)^k.
double satake_extend(const NewformData& f, std::int64_t p, int k);
/// alpha^k + conj(alpha)^k with lambda(p) = alpha + conj(alpha), |alpha| = 1;
/// lambda(q)^k at p = q.
double satake_power_sum(const NewformData& f, std::int64_t p, int k);

int sign(const NewformData& f);

/// Eigen-decomposition of the plus cuspidal space. A cyclic vector supported
/// on few symbols makes every Hecke operator a polynomial in one separating
/// operator T.
class HeckeDecomposition {
 public:
  explicit HeckeDecomposition(std::int64_t q, std::int64_t max_separating_prime = 50);

  std::int64_t level() const noexcept { return space_.level(); }
  std::size_t genus() const noexcept { return space_.cuspidal_dimension(); }
  const ManinSymbolSpace& space() const noexcept { return space_; }
  /// Characteristic polynomial of T on the cuspidal subspace.
  const QPoly& separating_charpoly() const noexcept { return chi_; }
  /// r with T_p = r(T) on the plus space.
  QPoly hecke_polynomial(std::int64_t p) const;
  /// T_p on the cuspidal subspace, exactly.
  QMatrix cusp_hecke(std::int64_t p) const;
  /// r(T) on the cuspidal subspace.
  QMatrix on_cusp(const QPoly& r) const;
  /// Trace of T_n on S_2(q), (n, q) = 1 or not.
  Rational trace(std::int64_t n) const;

  std::vector<NewformData> newforms(std::int64_t pmax, int jobs = 1) const;

 private:
  ManinSymbolSpace space_;
  QMatrix t_cusp_;
  QPoly chi_;
  std::vector<std::pair<std::size_t, long>> cyclic_;
  QMatrix krylov_inverse_;
  Rational eisenstein_theta_;
  std::vector<std::pair<Rational, Rational>> theta_;
};

std::vector<NewformData> decompose(std::int64_t q, std::int64_t pmax, int jobs = 1);

/// Eichler-Selberg trace of T_n on S_2(Gamma_0(q)), q prime, (n, q) = 1.
Rational trace_Tn(std::int64_t q, std::int64_t n);

std::vector<NewformData> ingest(const std::string& path);
void export_records(const std::vector<NewformData>& forms, const std::string& path);
std::vector<NewformData> parse_records(const std::string& text);
std::string format_records(const std::vector<NewformData>& forms);

/// Cached decomposition under <cache>/eigen/q=<q>.txt; recomputes and
/// atomically replaces when missing or shorter than pmax.
std::optional<std::vector<NewformData>> cache_get(const std::string& cache_dir,
                                                  std::int64_t q, std::int64_t pmax);
void cache_put(const std::string& cache_dir, const std::vector<NewformData>& forms,
               std::int64_t q, std::int64_t pmax);
std::vector<NewformData> load_or_compute(const std::string& cache_dir, std::int64_t q,
                                         std::int64_t pmax, int jobs = 1);

}  // namespace j0rank::modsym
