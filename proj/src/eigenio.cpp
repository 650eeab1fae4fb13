#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "j0rank/arith.hpp"
#include "j0rank/error.hpp"
#include "j0rank/modsym.hpp"

namespace j0rank::modsym {

namespace fs = std::filesystem;

double root_value(const QPoly& poly, int k) {
  const auto roots = exact::real_root_values(poly);
  if (k < 0 || static_cast<std::size_t>(k) >= roots.size())
    fail(ErrorKind::Parse, "root index " + std::to_string(k) + " out of range for poly " +
                               poly.to_string());
  return roots[static_cast<std::size_t>(k)];
}

AlgebraicValue AlgebraicValue::from_integer(std::int64_t v) {
  AlgebraicValue out;
  out.rational = Rational(static_cast<long>(v));
  return out;
}

double AlgebraicValue::value() const {
  if (rational) return rational->get_d();
  return root_value(poly, root);
}

namespace {

bool terminating(mpz_class den) {
  for (long p : {2L, 5L})
    while (den % p == 0) den /= p;
  return den == 1;
}

std::string decimal(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  mpz_class scale = 1;
  int digits = 0;
  while (Rational(r * scale).get_den() != 1) {
    scale *= 10;
    ++digits;
  }
  mpz_class n = abs(Rational(r * scale).get_num());
  std::string s = n.get_str();
  if (static_cast<int>(s.size()) <= digits) s.insert(0, digits - s.size() + 1, '0');
  s.insert(s.size() - digits, ".");
  return (r < 0 ? "-" : "") + s;
}

Rational parse_decimal(const std::string& text) {
  std::size_t i = 0;
  bool neg = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) neg = text[i++] == '-';
  mpz_class num = 0, den = 1;
  bool any = false, dot = false;
  for (; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == '.' && !dot) {
      dot = true;
      continue;
    }
    if (ch < '0' || ch > '9') throw std::invalid_argument("bad decimal '" + text + "'");
    num = num * 10 + (ch - '0');
    if (dot) den *= 10;
    any = true;
  }
  if (!any) throw std::invalid_argument("bad decimal '" + text + "'");
  Rational r(num, den);
  r.canonicalize();
  return neg ? Rational(-r) : r;
}

}  // namespace

std::string AlgebraicValue::to_string() const {
  if (rational) {
    if (terminating(rational->get_den())) return decimal(*rational);
    return "poly:" + mpz_class(-rational->get_num()).get_str() + "," + rational->get_den().get_str() +
           "/root:0";
  }
  return "poly:" + poly.to_string() + "/root:" + std::to_string(root);
}

AlgebraicValue AlgebraicValue::parse(const std::string& text) {
  AlgebraicValue out;
  if (text.rfind("poly:", 0) != 0) {
    out.rational = parse_decimal(text);
    return out;
  }
  const auto slash = text.find("/root:");
  if (slash == std::string::npos) throw std::invalid_argument("missing /root: in '" + text + "'");
  std::vector<Rational> coeffs;
  std::stringstream ss(text.substr(5, slash - 5));
  for (std::string c; std::getline(ss, c, ',');) {
    const Rational v = parse_decimal(c);
    if (v.get_den() != 1) throw std::invalid_argument("non-integer coefficient in '" + text + "'");
    coeffs.push_back(v);
  }
  out.poly = QPoly(coeffs);
  out.root = std::stoi(text.substr(slash + 6));
  if (out.poly.degree() < 1) throw std::invalid_argument("constant polynomial in '" + text + "'");
  if (exact::gcd(out.poly, out.poly.derivative()).degree() != 0)
    throw std::invalid_argument("polynomial not squarefree in '" + text + "'");
  if (out.poly.degree() == 1) {
    out.rational = -out.poly.coeff(0) / out.poly.coeff(1);
    out.poly = QPoly();
    out.root = 0;
  }
  return out;
}

std::string format_records(const std::vector<NewformData>& forms) {
  std::ostringstream os;
  for (const auto& f : forms) {
    os << f.level << ' ' << f.index << ' ' << f.eps << ' ' << f.a_q << ' ' << f.primes.size();
    for (std::size_t i = 0; i < f.primes.size(); ++i)
      os << ' ' << f.primes[i] << ':' << f.exact[i].to_string();
    os << '\n';
  }
  return os.str();
}

std::vector<NewformData> parse_records(const std::string& text) {
  std::vector<NewformData> out;
  std::istringstream in(text);
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    auto bad = [&](const std::string& why) -> void {
      fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": " + why);
    };
    if (tok.size() < 5) bad("expected 'q index eps a_q k p:a ...'");
    NewformData f;
    std::int64_t k = 0;
    try {
      f.level = std::stoll(tok[0]);
      f.index = std::stoi(tok[1]);
      f.eps = std::stoi(tok[2]);
      f.a_q = std::stoi(tok[3]);
      k = std::stoll(tok[4]);
    } catch (const std::exception&) {
      bad("malformed header fields");
    }
    if (!arith::is_prime(f.level)) bad("level is not prime");
    if (std::abs(f.eps) != 1 || std::abs(f.a_q) != 1) bad("eps and a_q must be +1 or -1");
    if (k != static_cast<std::int64_t>(tok.size()) - 5) bad("pair count does not match k");
    for (std::size_t i = 5; i < tok.size(); ++i) {
      const auto colon = tok[i].find(':');
      if (colon == std::string::npos) bad("pair without ':' in '" + tok[i] + "'");
      std::int64_t p = 0;
      AlgebraicValue v;
      try {
        p = std::stoll(tok[i].substr(0, colon));
        v = AlgebraicValue::parse(tok[i].substr(colon + 1));
      } catch (const Error& e) {
        bad(e.what());
      } catch (const std::exception& e) {
        bad(e.what());
      }
      if (!arith::is_prime(p)) bad(std::to_string(p) + " is not prime");
      if (!f.primes.empty() && p <= f.primes.back()) bad("primes not strictly increasing");
      double value = 0;
      try {
        value = v.value();
      } catch (const Error& e) {
        bad(e.what());
      }
      if (p == f.level) {
        if (!v.rational || *v.rational != f.a_q) bad("a_q entry disagrees with the a_q field");
      } else if (value * value > 4.0 * static_cast<double>(p) * (1 + 1e-12)) {
        fail(ErrorKind::Invariant, "line " + std::to_string(lineno) + ": rejected a_" +
                                       std::to_string(p) + " = " + tok[i].substr(colon + 1) +
                                       " exceeds 2 sqrt(p)");
      }
      f.primes.push_back(p);
      f.exact.push_back(std::move(v));
      f.a_p.push_back(value);
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<NewformData> ingest(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_records(ss.str());
}

namespace {

void write_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ostringstream suffix;
  suffix << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.'
         << std::random_device{}();
  const fs::path tmp = path.string() + suffix.str();
  {
    std::ofstream out(tmp);
    if (!out) fail(ErrorKind::Io, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) fail(ErrorKind::Io, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::Io, "cannot replace " + path.string());
  }
}

fs::path cache_file(const std::string& cache_dir, std::int64_t q) {
  return fs::path(cache_dir) / "eigen" / ("q=" + std::to_string(q) + ".txt");
}

}  // namespace

void export_records(const std::vector<NewformData>& forms, const std::string& path) {
  write_atomic(path, format_records(forms));
}

std::optional<std::vector<NewformData>> cache_get(const std::string& cache_dir, std::int64_t q,
                                                  std::int64_t pmax) {
  const auto path = cache_file(cache_dir, q);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string first;
  std::getline(in, first);
  std::int64_t stored = -1;
  if (first.rfind("# pmax=", 0) == 0) stored = std::stoll(first.substr(7));
  if (stored < pmax) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  auto forms = parse_records(ss.str());
  for (auto& f : forms) {
    std::size_t keep = 0;
    while (keep < f.primes.size() && f.primes[keep] <= pmax) ++keep;
    f.primes.resize(keep);
    f.exact.resize(keep);
    f.a_p.resize(keep);
  }
  return forms;
}

void cache_put(const std::string& cache_dir, const std::vector<NewformData>& forms,
               std::int64_t q, std::int64_t pmax) {
  write_atomic(cache_file(cache_dir, q),
               "# pmax=" + std::to_string(pmax) + "\n" + format_records(forms));
}

std::vector<NewformData> load_or_compute(const std::string& cache_dir, std::int64_t q,
                                         std::int64_t pmax, int jobs) {
  if (!cache_dir.empty())
    if (auto hit = cache_get(cache_dir, q, pmax)) return *hit;
  auto forms = decompose(q, pmax, jobs);
  if (!cache_dir.empty()) cache_put(cache_dir, forms, q, pmax);
  return forms;
}

}  // namespace j0rank::modsym
