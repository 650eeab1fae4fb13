#include "j0rank/arith.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

#include "j0rank/error.hpp"

namespace j0rank::arith {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

PrimeTable::PrimeTable(std::int64_t limit) : limit_(limit) {
  if (limit < 2) fail(ErrorKind::Usage, "prime table limit must be >= 2");
  if (limit > kMaxLimit)
    fail(ErrorKind::Capacity, "prime table limit " + std::to_string(limit) +
                                  " exceeds cap " + std::to_string(kMaxLimit));
  spf_.assign(static_cast<std::size_t>(limit) + 1, 0);
  for (std::int64_t i = 2; i <= limit; ++i) {
    if (spf_[i] == 0) {
      primes_.push_back(i);
      for (std::int64_t j = i; j <= limit; j += i)
        if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
    }
  }
}

void PrimeTable::check_range(std::int64_t n) const {
  if (n < 1) fail(ErrorKind::Usage, "argument must be >= 1");
  if (n > limit_)
    fail(ErrorKind::Capacity, std::to_string(n) + " exceeds sieve limit " +
                                  std::to_string(limit_));
}

bool PrimeTable::is_prime(std::int64_t n) const {
  check_range(n);
  return n >= 2 && spf_[n] == n;
}

std::int64_t PrimeTable::smallest_factor(std::int64_t n) const {
  check_range(n);
  return n == 1 ? 1 : spf_[n];
}

Factorization PrimeTable::factor(std::int64_t n) const {
  check_range(n);
  Factorization out;
  while (n > 1) {
    std::int64_t p = spf_[n];
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  return out;
}

double PrimeTable::von_mangoldt(std::int64_t n) const {
  check_range(n);
  if (n == 1) return 0.0;
  std::int64_t p = spf_[n];
  while (n % p == 0) n /= p;
  return n == 1 ? std::log(static_cast<double>(p)) : 0.0;
}

const PrimeTable& shared_primes(std::int64_t at_least) {
  static std::mutex mu;
  static std::shared_ptr<const PrimeTable> table;
  std::lock_guard lock(mu);
  if (!table || table->limit() < at_least) {
    std::int64_t limit = std::max<std::int64_t>(at_least, 1 << 16);
    if (table) limit = std::max(limit, 2 * table->limit());
    limit = std::min(limit, PrimeTable::kMaxLimit);
    if (limit < at_least) limit = at_least;  // lets the constructor reject it
    // Old tables are intentionally leaked so references stay valid.
    static std::vector<std::shared_ptr<const PrimeTable>> retired;
    if (table) retired.push_back(table);
    table = std::make_shared<const PrimeTable>(limit);
  }
  return *table;
}

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::int64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

Factorization factorize(std::int64_t n) {
  if (n < 1) fail(ErrorKind::Usage, "factorize: n must be >= 1");
  Factorization out;
  for (std::int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

std::int64_t gcd(std::int64_t a, std::int64_t b) {
  return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b);
}

std::int64_t mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t m) {
  if (m == 1) return 0;
  std::int64_t r0 = m, r1 = mod(a, m), s0 = 0, s1 = 1;
  while (r1 != 0) {
    std::int64_t qt = r0 / r1;
    std::int64_t r2 = r0 - qt * r1;
    r0 = r1;
    r1 = r2;
    std::int64_t s2 = s0 - qt * s1;
    s0 = s1;
    s1 = s2;
  }
  if (r0 != 1)
    fail(ErrorKind::Usage, std::to_string(a) + " not invertible mod " +
                               std::to_string(m));
  return mod(s0, m);
}

std::int64_t pow_mod(std::int64_t base, std::int64_t exp, std::int64_t m) {
  __int128 result = 1 % m, b = mod(base, m);
  while (exp > 0) {
    if (exp & 1) result = result * b % m;
    b = b * b % m;
    exp >>= 1;
  }
  return static_cast<std::int64_t>(result);
}

double von_mangoldt(std::int64_t n) {
  if (n < 1) fail(ErrorKind::Usage, "von_mangoldt: n must be >= 1");
  auto f = factorize(n);
  return f.size() == 1 ? std::log(static_cast<double>(f[0].first)) : 0.0;
}

std::int64_t tau(std::int64_t n) {
  std::int64_t t = 1;
  for (auto [p, e] : factorize(n)) t *= e + 1;
  return t;
}

int mobius(std::int64_t n) {
  int mu = 1;
  for (auto [p, e] : factorize(n)) {
    if (e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

std::int64_t euler_phi(std::int64_t n) {
  std::int64_t phi = n;
  for (auto [p, e] : factorize(n)) phi = phi / p * (p - 1);
  return phi;
}

std::int64_t sigma1(std::int64_t n) {
  std::int64_t s = 1;
  for (auto [p, e] : factorize(n)) {
    std::int64_t term = 1, pk = 1;
    for (int i = 0; i < e; ++i) {
      pk *= p;
      term += pk;
    }
    s *= term;
  }
  return s;
}

bool is_squarefree(std::int64_t n) { return mobius(n) != 0; }

KloostermanTable::KloostermanTable(std::int64_t c) : c_(c) {
  if (c < 1) fail(ErrorKind::Usage, "Kloosterman modulus must be >= 1");
  cos_table_.resize(static_cast<std::size_t>(c));
  for (std::int64_t k = 0; k < c; ++k)
    cos_table_[k] = std::cos(kTwoPi * static_cast<double>(k) / c);
  for (std::int64_t x = 0; x < c; ++x) {
    if (gcd(x, c) != 1) continue;
    units_.push_back(x);
    inverses_.push_back(inverse_mod(x, c));
  }
}

double KloostermanTable::value(std::int64_t m, std::int64_t n) const {
  const std::int64_t mm = mod(m, c_), nn = mod(n, c_);
  double s = 0.0;
  for (std::size_t i = 0; i < units_.size(); ++i) {
    const std::int64_t k = (mm * units_[i] + nn * inverses_[i]) % c_;
    s += cos_table_[k];
  }
  return s;
}

double kloosterman(std::int64_t m, std::int64_t n, std::int64_t c) {
  return KloostermanTable(c).value(m, n);
}

double kloosterman_crt(std::int64_t m, std::int64_t n, std::int64_t c) {
  if (c < 1) fail(ErrorKind::Usage, "Kloosterman modulus must be >= 1");
  double product = 1.0;
  std::int64_t rest = c;
  for (auto [p, e] : factorize(c)) {
    std::int64_t r = 1;
    for (int i = 0; i < e; ++i) r *= p;
    const std::int64_t s = rest / r;
    // S(m,n; r s) = S(m sbar, n sbar; r) * S(m rbar, n rbar; s)
    const std::int64_t sbar = inverse_mod(s, r);
    product *= KloostermanTable(r).value(
        static_cast<std::int64_t>(static_cast<__int128>(mod(m, r)) * sbar % r),
        static_cast<std::int64_t>(static_cast<__int128>(mod(n, r)) * sbar % r));
    if (s == 1) break;
    const std::int64_t rbar = inverse_mod(r, s);
    m = static_cast<std::int64_t>(static_cast<__int128>(mod(m, s)) * rbar % s);
    n = static_cast<std::int64_t>(static_cast<__int128>(mod(n, s)) * rbar % s);
    rest = s;
  }
  return product;
}

DirichletCharacter::DirichletCharacter(std::int64_t modulus, std::int64_t order,
                                       std::vector<std::int64_t> exponents,
                                       std::int64_t conductor)
    : modulus_(modulus),
      order_(order),
      exponents_(std::move(exponents)),
      conductor_(conductor) {}

bool DirichletCharacter::is_principal() const {
  for (auto e : exponents_)
    if (e > 0) return false;
  return true;
}

std::int64_t DirichletCharacter::exponent(std::int64_t a) const {
  return exponents_[static_cast<std::size_t>(mod(a, modulus_))];
}

std::complex<double> DirichletCharacter::operator()(std::int64_t a) const {
  const std::int64_t e = exponent(a);
  if (e < 0) return {0.0, 0.0};
  if (e == 0) return {1.0, 0.0};
  return std::polar(1.0, kTwoPi * static_cast<double>(e) / order_);
}

namespace {

// Characters of (Z/p^k)^*: an exponent table (entry -1 off the unit group)
// per character, all over the common denominator `order`.
struct LocalGroup {
  std::int64_t modulus;
  std::int64_t order;
  std::vector<std::vector<std::int64_t>> chars;
  std::vector<std::int64_t> conductors;
};

std::int64_t local_conductor(const std::vector<std::int64_t>& exps,
                             std::int64_t p, int k) {
  std::int64_t pe = 1;
  const std::int64_t pk = static_cast<std::int64_t>(exps.size());
  for (int e = 0; e <= k; ++e) {
    bool trivial = true;
    // trivial on the units congruent to 1 mod p^e
    for (std::int64_t a = 1; a < pk && trivial; a += pe)
      if (a % p != 0 && exps[a] != 0) trivial = false;
    if (trivial) return pe;
    pe *= p;
  }
  return pk;
}

LocalGroup local_characters(std::int64_t p, int k) {
  std::int64_t pk = 1;
  for (int i = 0; i < k; ++i) pk *= p;
  LocalGroup g{pk, 1, {}, {}};
  // gens: list of (generator element, its order) for a basis of the group,
  // logs: per unit, its coordinates in that basis.
  std::vector<std::pair<std::int64_t, std::int64_t>> gens;
  if (p == 2 && k >= 3) {
    gens = {{pk - 1, 2}, {5, pk / 4}};
  } else if (p == 2 && k == 2) {
    gens = {{3, 2}};
  } else if (p == 2) {
    gens = {};
  } else {
    const std::int64_t phi = pk / p * (p - 1);
    std::int64_t gen = 2;
    for (;; ++gen) {
      if (gen % p == 0) continue;
      bool ok = true;
      std::int64_t n = phi;
      for (auto [r, e] : factorize(phi)) {
        (void)e;
        if (pow_mod(gen, n / r, pk) == 1) ok = false;
      }
      if (ok) break;
    }
    gens = {{gen, phi}};
  }
  std::int64_t order = 1;
  for (auto [gen, ord] : gens) order = std::lcm(order, ord);
  g.order = order;

  // coordinates of every unit in the generator basis
  std::vector<std::vector<std::int64_t>> coords(
      static_cast<std::size_t>(pk), std::vector<std::int64_t>(gens.size(), -1));
  if (gens.empty()) {
    coords[1 % pk] = {};
  } else if (gens.size() == 1) {
    std::int64_t x = 1;
    for (std::int64_t i = 0; i < gens[0].second; ++i) {
      coords[x] = {i};
      x = x * gens[0].first % pk;
    }
  } else {
    std::int64_t sgn = 1;
    for (std::int64_t s = 0; s < 2; ++s) {
      std::int64_t x = sgn;
      for (std::int64_t e = 0; e < gens[1].second; ++e) {
        coords[x] = {s, e};
        x = x * 5 % pk;
      }
      sgn = pk - 1;
    }
  }

  // enumerate characters as tuples j with chi(gen_i) = e(j_i / ord_i)
  std::int64_t count = 1;
  for (auto [gen, ord] : gens) count *= ord;
  for (std::int64_t idx = 0; idx < count; ++idx) {
    std::vector<std::int64_t> js(gens.size());
    std::int64_t rest = idx;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      js[i] = rest % gens[i].second;
      rest /= gens[i].second;
    }
    std::vector<std::int64_t> exps(static_cast<std::size_t>(pk), -1);
    for (std::int64_t a = 0; a < pk; ++a) {
      if (gcd(a, pk) != 1) continue;
      std::int64_t e = 0;
      for (std::size_t i = 0; i < gens.size(); ++i)
        e += js[i] * coords[a][i] * (order / gens[i].second);
      exps[a] = mod(e, order);
    }
    if (pk == 1) exps[0] = 0;
    g.conductors.push_back(local_conductor(exps, p, k));
    g.chars.push_back(std::move(exps));
  }
  return g;
}

}  // namespace

std::vector<DirichletCharacter> characters_mod(std::int64_t c) {
  if (c < 1) fail(ErrorKind::Usage, "character modulus must be >= 1");
  if (c == 1) return {DirichletCharacter(1, 1, {0}, 1)};
  std::vector<LocalGroup> locals;
  std::int64_t order = 1;
  for (auto [p, e] : factorize(c)) {
    locals.push_back(local_characters(p, e));
    order = std::lcm(order, locals.back().order);
  }
  std::int64_t count = 1;
  for (const auto& g : locals) count *= static_cast<std::int64_t>(g.chars.size());

  std::vector<DirichletCharacter> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t idx = 0; idx < count; ++idx) {
    std::vector<std::int64_t> exps(static_cast<std::size_t>(c), -1);
    std::int64_t conductor = 1, rest = idx;
    std::vector<std::size_t> pick(locals.size());
    for (std::size_t i = 0; i < locals.size(); ++i) {
      pick[i] = static_cast<std::size_t>(
          rest % static_cast<std::int64_t>(locals[i].chars.size()));
      rest /= static_cast<std::int64_t>(locals[i].chars.size());
      conductor *= locals[i].conductors[pick[i]];
    }
    for (std::int64_t a = 0; a < c; ++a) {
      if (gcd(a, c) != 1) continue;
      std::int64_t e = 0;
      for (std::size_t i = 0; i < locals.size(); ++i)
        e += locals[i].chars[pick[i]][a % locals[i].modulus] *
             (order / locals[i].order);
      exps[a] = mod(e, order);
    }
    out.emplace_back(c, order, std::move(exps), conductor);
  }
  return out;
}

std::complex<double> gauss_sum(const DirichletCharacter& chi) {
  const std::int64_t c = chi.modulus();
  std::complex<double> g{0.0, 0.0};
  for (std::int64_t b = 0; b < c; ++b) {
    const std::int64_t e = chi.exponent(b);
    if (e < 0) continue;
    // chi(b) e(b/c) = e(e/order + b/c), combined before embedding
    const double angle = kTwoPi * (static_cast<double>(e) / chi.order() +
                                   static_cast<double>(b) / c);
    g += std::polar(1.0, angle);
  }
  return g;
}

std::complex<double> twisted_kloosterman_sum(const DirichletCharacter& chi,
                                             std::int64_t c) {
  if (chi.modulus() != c)
    fail(ErrorKind::Usage, "character modulus must equal c");
  KloostermanTable table(c);
  std::complex<double> s{0.0, 0.0};
  for (std::int64_t a = 0; a < c; ++a) {
    if (gcd(a, c) != 1) continue;
    s += table.value(1, a) * chi(a);
  }
  return s;
}

double psi_chebyshev(double x, const PrimeTable& table) {
  if (x < 1) fail(ErrorKind::Usage, "psi: x must be >= 1");
  const auto n_max = static_cast<std::int64_t>(std::floor(x));
  if (n_max > table.limit())
    fail(ErrorKind::Capacity, "psi: x exceeds sieve limit");
  double s = 0.0;
  for (std::int64_t p : table.primes()) {
    if (p > n_max) break;
    const double lp = std::log(static_cast<double>(p));
    for (std::int64_t pk = p; pk <= n_max; pk *= p) {
      s += lp;
      if (pk > n_max / p) break;
    }
  }
  return s;
}

std::complex<double> psi_chi(double x, const DirichletCharacter& chi,
                             const PrimeTable& table) {
  if (x < 1) fail(ErrorKind::Usage, "psi: x must be >= 1");
  const auto n_max = static_cast<std::int64_t>(std::floor(x));
  if (n_max > table.limit())
    fail(ErrorKind::Capacity, "psi: x exceeds sieve limit");
  std::complex<double> s{0.0, 0.0};
  for (std::int64_t p : table.primes()) {
    if (p > n_max) break;
    const double lp = std::log(static_cast<double>(p));
    for (std::int64_t pk = p; pk <= n_max; pk *= p) {
      s += lp * chi(pk);
      if (pk > n_max / p) break;
    }
  }
  return s;
}

namespace {

mpq_class reduced_form_count(std::int64_t d, bool primitive_only) {
  mpq_class total = 0;
  // b^2 - 4ac = -d with |b| <= a <= c, b >= 0 when |b| = a or a = c
  for (std::int64_t a = 1; 3 * a * a <= d; ++a) {
    for (std::int64_t b = -a + 1; b <= a; ++b) {
      const std::int64_t num = b * b + d;
      if (num % (4 * a) != 0) continue;
      const std::int64_t c = num / (4 * a);
      if (c < a) continue;
      if (c == a && b < 0) continue;
      if (primitive_only && gcd(gcd(a, b), c) != 1) continue;
      if (b == 0 && a == c)
        total += mpq_class(1, 2);
      else if (b == a && a == c)
        total += mpq_class(1, 3);
      else
        total += 1;
    }
  }
  return total;
}

}  // namespace

mpq_class weighted_class_number(std::int64_t d) {
  if (d <= 0 || (d % 4 != 0 && d % 4 != 3)) return 0;
  return reduced_form_count(d, true);
}

mpq_class hurwitz_class_number(std::int64_t n) {
  if (n == 0) return mpq_class(-1, 12);
  if (n < 0 || (n % 4 != 0 && n % 4 != 3)) return 0;
  return reduced_form_count(n, false);
}

}  // namespace j0rank::arith
