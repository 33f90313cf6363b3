#pragma once

#include <gmpxx.h>

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace qsl2r {

// Indeterminates: u = q^{1/2}, va = q^a, vb = q^b, z = q^c, L = lambda.
enum class Var : int { u = 0, va = 1, vb = 2, z = 3, L = 4 };
inline constexpr int kNumVars = 5;

class PoleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gaussian rational re + i*im.
struct GaussQ {
  mpq_class re{0};
  mpq_class im{0};

  GaussQ() = default;
  GaussQ(long r) : re(r) {}
  GaussQ(mpq_class r, mpq_class i = 0) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_one() const { return re == 1 && sgn(im) == 0; }
  GaussQ conj() const { return GaussQ(re, -im); }
  GaussQ inverse() const;

  friend GaussQ operator+(const GaussQ& a, const GaussQ& b) { return {a.re + b.re, a.im + b.im}; }
  friend GaussQ operator-(const GaussQ& a, const GaussQ& b) { return {a.re - b.re, a.im - b.im}; }
  friend GaussQ operator-(const GaussQ& a) { return {-a.re, -a.im}; }
  friend GaussQ operator*(const GaussQ& a, const GaussQ& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend GaussQ operator/(const GaussQ& a, const GaussQ& b) { return a * b.inverse(); }
  friend bool operator==(const GaussQ& a, const GaussQ& b) { return a.re == b.re && a.im == b.im; }
  GaussQ& operator+=(const GaussQ& b) { re += b.re; im += b.im; return *this; }
  GaussQ& operator-=(const GaussQ& b) { re -= b.re; im -= b.im; return *this; }
  GaussQ& operator*=(const GaussQ& b) { *this = *this * b; return *this; }

  static GaussQ i() { return GaussQ(0, 1); }
};

using Exps = std::array<int32_t, kNumVars>;

// Graded order: total degree first, then lexicographic in (u, va, vb, z, L).
// Used both for rendering (descending) and for leading terms.
struct MonoGreater {
  bool operator()(const Exps& a, const Exps& b) const {
    long da = 0, db = 0;
    for (int k = 0; k < kNumVars; ++k) { da += a[k]; db += b[k]; }
    if (da != db) return da > db;
    return a > b;
  }
};

// Laurent polynomial over Q(i).
class LPoly {
 public:
  using Terms = std::map<Exps, GaussQ, MonoGreater>;

  LPoly() = default;
  LPoly(const GaussQ& c);
  static LPoly monomial(const Exps& e, const GaussQ& c = GaussQ(1));
  static LPoly var(Var v, int power = 1);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_monomial() const { return terms_.size() == 1; }
  const Exps& lead_exps() const { return terms_.begin()->first; }
  const GaussQ& lead_coeff() const { return terms_.begin()->second; }

  Exps min_exps() const;
  Exps max_exps() const;
  int degree(Var v) const;
  bool involves(Var v) const;

  LPoly conj() const;
  LPoly shift(const Exps& e) const;                  // multiply by monomial
  LPoly scale(const GaussQ& c) const;
  LPoly scale_var(Var v, const Exps& m) const;       // v -> m * v
  std::complex<double> eval(const std::array<std::complex<double>, kNumVars>& values) const;
  double abs_sum(const std::array<std::complex<double>, kNumVars>& values) const;

  void add_term(const Exps& e, const GaussQ& c);

  friend LPoly operator+(const LPoly& a, const LPoly& b);
  friend LPoly operator-(const LPoly& a, const LPoly& b);
  friend LPoly operator-(const LPoly& a);
  friend LPoly operator*(const LPoly& a, const LPoly& b);
  friend bool operator==(const LPoly& a, const LPoly& b) { return a.terms_ == b.terms_; }

  std::string str() const;

 private:
  Terms terms_;
};

// Exact polynomial division; throws if b does not divide a. Both must be
// genuine polynomials (nonnegative exponents).
LPoly exact_divide(const LPoly& a, const LPoly& b);
// gcd of Laurent polynomials up to units; result is a polynomial with no
// monomial factor and leading coefficient 1.
LPoly poly_gcd(const LPoly& a, const LPoly& b);

// Exponent c = half/2 + ka*a + kb*b + kc*c, with q^c = u^half va^ka vb^kb z^kc.
struct QExp {
  int half = 0;
  int ka = 0;
  int kb = 0;
  int kc = 0;

  static QExp integer(int n) { return {2 * n, 0, 0, 0}; }
  static QExp halves(int h) { return {h, 0, 0, 0}; }
  static QExp a(int k = 1) { return {0, k, 0, 0}; }
  static QExp b(int k = 1) { return {0, 0, k, 0}; }
  static QExp c(int k = 1) { return {0, 0, 0, k}; }

  friend QExp operator+(QExp x, QExp y) { return {x.half + y.half, x.ka + y.ka, x.kb + y.kb, x.kc + y.kc}; }
  friend QExp operator-(QExp x, QExp y) { return {x.half - y.half, x.ka - y.ka, x.kb - y.kb, x.kc - y.kc}; }
  friend QExp operator-(QExp x) { return {-x.half, -x.ka, -x.kb, -x.kc}; }
  friend QExp operator*(int n, QExp x) { return {n * x.half, n * x.ka, n * x.kb, n * x.kc}; }
  Exps exps() const { return {half, ka, kb, kc, 0}; }
};

struct Assignment {
  double q = 0.5;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double lambda = 0.0;
};

// Exact rational function num/den in canonical form: den is a polynomial
// without monomial factors whose leading coefficient is 1, and
// gcd(num, den) = 1. Equality is structural.
class Scalar {
 public:
  Scalar() : num_(), den_(GaussQ(1)) {}
  Scalar(long n) : Scalar(GaussQ(n)) {}
  Scalar(const GaussQ& c) : num_(c), den_(GaussQ(1)) {}
  Scalar(const LPoly& p) : num_(p), den_(GaussQ(1)) {}
  static Scalar fraction(const LPoly& num, const LPoly& den);
  static Scalar rational(long n, long d) { return Scalar(GaussQ(mpq_class(n, d))); }
  static Scalar i() { return Scalar(GaussQ::i()); }
  static Scalar var(Var v, int power = 1) { return Scalar(LPoly::var(v, power)); }
  static Scalar qpow(const QExp& e) { return Scalar(LPoly::monomial(e.exps())); }

  const LPoly& num() const { return num_; }
  const LPoly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const;
  bool is_polynomial() const { return den_.is_constant(); }

  Scalar conj() const;
  Scalar inverse() const;
  Scalar scale_var(Var v, const Exps& m) const;

  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a);
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  friend Scalar operator/(const Scalar& a, const Scalar& b);
  friend bool operator==(const Scalar& a, const Scalar& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  Scalar& operator+=(const Scalar& b) { return *this = *this + b; }
  Scalar& operator-=(const Scalar& b) { return *this = *this - b; }
  Scalar& operator*=(const Scalar& b) { return *this = *this * b; }

  std::string str() const;

 private:
  Scalar(LPoly num, LPoly den, bool) : num_(std::move(num)), den_(std::move(den)) {}
  void canonicalize();

  LPoly num_;
  LPoly den_;
};

using FloatScalar = std::complex<double>;

std::array<std::complex<double>, kNumVars> variable_values(const Assignment& as);
FloatScalar evaluate(const Scalar& s, const Assignment& as);
// Exact specialization at rational values of (u, va, vb, z, L).
GaussQ evaluate_exact(const Scalar& s, const std::array<mpq_class, kNumVars>& point);

// [c] = (q^{-c} - q^c)/(q^{-1} - q)
Scalar qnum(const QExp& c);
// [[c]] = q^c - q^{-c}
Scalar qbrack(const QExp& c);
// <c> = q^c + q^{-c}
Scalar qang(const QExp& c);

// q = u^2 and t = [[a]].
Scalar q_scalar(int power = 1);
Scalar t_scalar();

// Parses an exponent expression such as "1", "1/2", "a", "-a+1", "2a-3/2",
// "b", "c+1". Throws std::invalid_argument on unsupported shapes.
QExp parse_qexp(const std::string& text);

std::string format_double(double x);

}  // namespace qsl2r
