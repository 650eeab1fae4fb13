#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace j0rank::arith {

using Factorization = std::vector<std::pair<std::int64_t, int>>;

/// Sieve of Eratosthenes with a smallest-prime-factor table, so any n up to
/// `limit` factors in O(log n).
class PrimeTable {
 public:
  /// Largest limit accepted before a capacity error is raised.
  static constexpr std::int64_t kMaxLimit = 100'000'000;

  explicit PrimeTable(std::int64_t limit);

  std::int64_t limit() const noexcept { return limit_; }
  const std::vector<std::int64_t>& primes() const noexcept { return primes_; }
  bool is_prime(std::int64_t n) const;
  std::int64_t smallest_factor(std::int64_t n) const;
  Factorization factor(std::int64_t n) const;
  /// Lambda(n) from the table; capacity error beyond the limit.
  double von_mangoldt(std::int64_t n) const;

 private:
  void check_range(std::int64_t n) const;

  std::int64_t limit_;
  std::vector<std::int64_t> primes_;
  std::vector<std::uint32_t> spf_;
};

/// Shared table for callers that do not manage their own; grows on demand.
const PrimeTable& shared_primes(std::int64_t at_least);

bool is_prime(std::int64_t n);
Factorization factorize(std::int64_t n);
std::int64_t gcd(std::int64_t a, std::int64_t b);
std::int64_t mod(std::int64_t a, std::int64_t m);
std::int64_t inverse_mod(std::int64_t a, std::int64_t m);
std::int64_t pow_mod(std::int64_t base, std::int64_t exp, std::int64_t m);

double von_mangoldt(std::int64_t n);
std::int64_t tau(std::int64_t n);
int mobius(std::int64_t n);
std::int64_t euler_phi(std::int64_t n);
std::int64_t sigma1(std::int64_t n);
bool is_squarefree(std::int64_t n);

/// S(m,n;c) by enumeration over x mod c with a precomputed inverse table.
double kloosterman(std::int64_t m, std::int64_t n, std::int64_t c);

/// S(m,n;c) through twisted multiplicativity over the prime-power split of c;
/// each prime-power factor is still enumerated directly.
double kloosterman_crt(std::int64_t m, std::int64_t n, std::int64_t c);

/// All Kloosterman sums S(m, n; c) for one modulus. Inverses and the cosine
/// table are built once; value() is one pass over the unit group.
class KloostermanTable {
 public:
  explicit KloostermanTable(std::int64_t c);

  std::int64_t modulus() const noexcept { return c_; }
  double value(std::int64_t m, std::int64_t n) const;

 private:
  std::int64_t c_;
  std::vector<std::int64_t> units_;
  std::vector<std::int64_t> inverses_;
  std::vector<double> cos_table_;
};

/// A Dirichlet character mod c. Values are stored exactly as exponents k of
/// e(k / order); the complex embedding is produced on demand.
class DirichletCharacter {
 public:
  DirichletCharacter(std::int64_t modulus, std::int64_t order,
                     std::vector<std::int64_t> exponents,
                     std::int64_t conductor);

  std::int64_t modulus() const noexcept { return modulus_; }
  std::int64_t order() const noexcept { return order_; }
  std::int64_t conductor() const noexcept { return conductor_; }
  bool is_primitive() const noexcept { return conductor_ == modulus_; }
  bool is_principal() const;

  /// Exponent k with chi(a) = e(k/order), or -1 when gcd(a, c) > 1.
  std::int64_t exponent(std::int64_t a) const;
  std::complex<double> operator()(std::int64_t a) const;

 private:
  std::int64_t modulus_;
  std::int64_t order_;
  std::vector<std::int64_t> exponents_;
  std::int64_t conductor_;
};

/// The full character group mod c, assembled by CRT from prime-power parts.
std::vector<DirichletCharacter> characters_mod(std::int64_t c);

std::complex<double> gauss_sum(const DirichletCharacter& chi);

/// sum_{a mod c, (a,c)=1} S(1,a;c) chi(a) by direct double enumeration.
std::complex<double> twisted_kloosterman_sum(const DirichletCharacter& chi,
                                             std::int64_t c);

double psi_chebyshev(double x, const PrimeTable& table);
std::complex<double> psi_chi(double x, const DirichletCharacter& chi,
                             const PrimeTable& table);

/// Weighted count of primitive reduced forms of discriminant -d
/// (d > 0, d = 0,3 mod 4), with weight 1/2 on a(x^2+y^2), 1/3 on
/// a(x^2+xy+y^2).
mpq_class weighted_class_number(std::int64_t d);

/// Hurwitz class number H(n); H(0) = -1/12, zero when n = 1,2 mod 4.
mpq_class hurwitz_class_number(std::int64_t n);

}  // namespace j0rank::arith
