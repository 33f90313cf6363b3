#include "qsl2r/scalar.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace qsl2r {

GaussQ GaussQ::inverse() const {
  mpq_class n = re * re + im * im;
  if (sgn(n) == 0) throw PoleError("division by zero Gaussian rational");
  return GaussQ(re / n, -im / n);
}

// ---------------------------------------------------------------- LPoly

LPoly::LPoly(const GaussQ& c) {
  if (!c.is_zero()) terms_.emplace(Exps{}, c);
}

LPoly LPoly::monomial(const Exps& e, const GaussQ& c) {
  LPoly p;
  if (!c.is_zero()) p.terms_.emplace(e, c);
  return p;
}

LPoly LPoly::var(Var v, int power) {
  Exps e{};
  e[static_cast<int>(v)] = power;
  return monomial(e);
}

bool LPoly::is_constant() const {
  if (terms_.empty()) return true;
  return terms_.size() == 1 && terms_.begin()->first == Exps{};
}

Exps LPoly::min_exps() const {
  Exps m{};
  bool first = true;
  for (const auto& [e, c] : terms_) {
    for (int k = 0; k < kNumVars; ++k) m[k] = first ? e[k] : std::min(m[k], e[k]);
    first = false;
  }
  return m;
}

Exps LPoly::max_exps() const {
  Exps m{};
  bool first = true;
  for (const auto& [e, c] : terms_) {
    for (int k = 0; k < kNumVars; ++k) m[k] = first ? e[k] : std::max(m[k], e[k]);
    first = false;
  }
  return m;
}

int LPoly::degree(Var v) const {
  if (terms_.empty()) return 0;
  return max_exps()[static_cast<int>(v)];
}

bool LPoly::involves(Var v) const {
  int k = static_cast<int>(v);
  for (const auto& [e, c] : terms_)
    if (e[k] != 0) return true;
  return false;
}

void LPoly::add_term(const Exps& e, const GaussQ& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

LPoly LPoly::conj() const {
  LPoly r;
  for (const auto& [e, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), e, c.conj());
  return r;
}

LPoly LPoly::shift(const Exps& s) const {
  LPoly r;
  for (const auto& [e, c] : terms_) {
    Exps f = e;
    for (int k = 0; k < kNumVars; ++k) f[k] += s[k];
    r.terms_.emplace_hint(r.terms_.end(), f, c);
  }
  return r;
}

LPoly LPoly::scale(const GaussQ& s) const {
  if (s.is_zero()) return {};
  LPoly r;
  for (const auto& [e, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), e, c * s);
  return r;
}

LPoly LPoly::scale_var(Var v, const Exps& m) const {
  int k = static_cast<int>(v);
  LPoly r;
  for (const auto& [e, c] : terms_) {
    Exps f = e;
    for (int j = 0; j < kNumVars; ++j) f[j] += e[k] * m[j];
    r.add_term(f, c);
  }
  return r;
}

namespace {

std::complex<double> to_complex(const GaussQ& c) { return {c.re.get_d(), c.im.get_d()}; }

double mono_value(const Exps& e, const std::array<std::complex<double>, kNumVars>& values) {
  double m = 1.0;
  for (int k = 0; k < kNumVars; ++k)
    if (e[k] != 0) m *= std::pow(values[k].real(), e[k]);
  return m;
}

}  // namespace

std::complex<double> LPoly::eval(const std::array<std::complex<double>, kNumVars>& values) const {
  std::complex<double> s = 0.0;
  for (const auto& [e, c] : terms_) s += to_complex(c) * mono_value(e, values);
  return s;
}

double LPoly::abs_sum(const std::array<std::complex<double>, kNumVars>& values) const {
  double s = 0.0;
  for (const auto& [e, c] : terms_) s += std::abs(to_complex(c) * mono_value(e, values));
  return s;
}

LPoly operator+(const LPoly& a, const LPoly& b) {
  LPoly r = a;
  for (const auto& [e, c] : b.terms_) r.add_term(e, c);
  return r;
}

LPoly operator-(const LPoly& a) {
  LPoly r;
  for (const auto& [e, c] : a.terms_) r.terms_.emplace_hint(r.terms_.end(), e, -c);
  return r;
}

LPoly operator-(const LPoly& a, const LPoly& b) {
  LPoly r = a;
  for (const auto& [e, c] : b.terms_) r.add_term(e, -c);
  return r;
}

LPoly operator*(const LPoly& a, const LPoly& b) {
  LPoly r;
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      Exps f;
      for (int k = 0; k < kNumVars; ++k) f[k] = ea[k] + eb[k];
      r.add_term(f, ca * cb);
    }
  return r;
}

namespace {

const char* kVarNames[kNumVars] = {"u", "va", "vb", "z", "L"};

std::string rational_str(const mpq_class& x) { return x.get_str(); }

// Renders a Gaussian rational; sets `negated` when a leading minus was
// extracted so the caller can join with " - ".
std::string coeff_str(const GaussQ& c, bool& negated) {
  negated = false;
  if (sgn(c.im) == 0) {
    mpq_class r = c.re;
    if (sgn(r) < 0) { negated = true; r = -r; }
    return rational_str(r);
  }
  if (sgn(c.re) == 0) {
    mpq_class m = c.im;
    if (sgn(m) < 0) { negated = true; m = -m; }
    if (m == 1) return "i";
    if (m.get_den() == 1) return rational_str(m) + "i";
    return "(" + rational_str(m) + ")i";
  }
  std::string s = "(" + rational_str(c.re);
  mpq_class m = c.im;
  s += sgn(m) < 0 ? "-" : "+";
  if (sgn(m) < 0) m = -m;
  if (m == 1) s += "i";
  else if (m.get_den() == 1) s += rational_str(m) + "i";
  else s += "(" + rational_str(m) + ")i";
  return s + ")";
}

std::string mono_str(const Exps& e) {
  std::string s;
  for (int k = 0; k < kNumVars; ++k) {
    if (e[k] == 0) continue;
    if (!s.empty()) s += "*";
    s += kVarNames[k];
    if (e[k] != 1) s += "^" + std::to_string(e[k]);
  }
  return s;
}

}  // namespace

std::string LPoly::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    bool neg = false;
    std::string cs = coeff_str(c, neg);
    std::string ms = mono_str(e);
    std::string body;
    if (ms.empty()) body = cs;
    else if (cs == "1") body = ms;
    else body = cs + "*" + ms;
    if (first) out += (neg ? "-" : "") + body;
    else out += (neg ? " - " : " + ") + body;
    first = false;
  }
  return out;
}

// ---------------------------------------------------------------- gcd

namespace {

bool nonnegative(const Exps& e) {
  for (int k = 0; k < kNumVars; ++k)
    if (e[k] < 0) return false;
  return true;
}

LPoly strip_monomial(const LPoly& p) {
  if (p.is_zero()) return p;
  Exps m = p.min_exps();
  if (m == Exps{}) return p;
  for (auto& x : m) x = -x;
  return p.shift(m);
}

LPoly monic(const LPoly& p) {
  if (p.is_zero() || p.lead_coeff().is_one()) return p;
  return p.scale(p.lead_coeff().inverse());
}

std::map<int, LPoly> coeffs_in(const LPoly& p, Var v) {
  int k = static_cast<int>(v);
  std::map<int, LPoly> out;
  for (const auto& [e, c] : p.terms()) {
    Exps f = e;
    f[k] = 0;
    out[e[k]].add_term(f, c);
  }
  return out;
}

LPoly lead_coeff_in(const LPoly& p, Var v, int& deg) {
  auto cs = coeffs_in(p, v);
  deg = cs.rbegin()->first;
  return cs.rbegin()->second;
}

LPoly gcd_poly(const LPoly& a0, const LPoly& b0);

LPoly content_in(const LPoly& p, Var v) {
  LPoly g;
  for (const auto& [d, c] : coeffs_in(p, v)) {
    g = gcd_poly(g, c);
    if (g.is_constant()) return LPoly(GaussQ(1));
  }
  return g;
}

// Pseudo-remainder lc_v(b)^(deg a - deg b + 1) * a mod b with respect to v.
LPoly prem(LPoly a, const LPoly& b, Var v) {
  int nb = 0;
  LPoly lb = lead_coeff_in(b, v, nb);
  int na0 = a.degree(v);
  int steps = 0;
  while (!a.is_zero()) {
    int na = 0;
    LPoly la = lead_coeff_in(a, v, na);
    if (na < nb) break;
    Exps s{};
    s[static_cast<int>(v)] = na - nb;
    a = lb * a - (la * b).shift(s);
    ++steps;
  }
  for (int k = steps; k < na0 - nb + 1; ++k) a = lb * a;
  return a;
}

LPoly power(const LPoly& p, int n) {
  LPoly r(GaussQ(1));
  for (int k = 0; k < n; ++k) r = r * p;
  return r;
}

// Arithmetic modulo a prime p = 1 (mod 4) with a fixed square root of -1,
// used to certify coprimality through univariate images.
constexpr uint64_t kPrime = 2305843009213693921ULL;
constexpr uint64_t kSqrtMinusOne = 583529827753931384ULL;

uint64_t mulmod(uint64_t a, uint64_t b) {
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % kPrime);
}
uint64_t addmod(uint64_t a, uint64_t b) { uint64_t s = a + b; return s >= kPrime ? s - kPrime : s; }
uint64_t submod(uint64_t a, uint64_t b) { return a >= b ? a - b : a + kPrime - b; }
uint64_t powmod(uint64_t a, uint64_t e) {
  uint64_t r = 1;
  while (e) {
    if (e & 1) r = mulmod(r, a);
    a = mulmod(a, a);
    e >>= 1;
  }
  return r;
}
uint64_t invmod(uint64_t a) { return powmod(a, kPrime - 2); }

bool rational_mod(const mpq_class& x, uint64_t& out) {
  uint64_t d = mpz_fdiv_ui(x.get_den_mpz_t(), kPrime);
  if (d == 0) return false;
  out = mulmod(mpz_fdiv_ui(x.get_num_mpz_t(), kPrime), invmod(d));
  return true;
}

bool gauss_mod(const GaussQ& c, uint64_t& out) {
  uint64_t r = 0, i = 0;
  if (!rational_mod(c.re, r) || !rational_mod(c.im, i)) return false;
  out = addmod(r, mulmod(i, kSqrtMinusOne));
  return true;
}

using ModPoly = std::vector<uint64_t>;

void trim(ModPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

// Image of p in F_p[v] after substituting `point` for the other variables.
bool mod_image(const LPoly& p, Var v, const std::array<uint64_t, kNumVars>& point, ModPoly& out) {
  int kv = static_cast<int>(v);
  out.assign(p.degree(v) + 1, 0);
  for (const auto& [e, c] : p.terms()) {
    uint64_t m = 0;
    if (!gauss_mod(c, m)) return false;
    for (int k = 0; k < kNumVars; ++k)
      if (k != kv && e[k] != 0) m = mulmod(m, powmod(point[k], static_cast<uint64_t>(e[k])));
    out[e[kv]] = addmod(out[e[kv]], m);
  }
  return true;
}

int mod_gcd_degree(ModPoly a, ModPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    uint64_t inv = invmod(b.back());
    while (a.size() >= b.size()) {
      uint64_t f = mulmod(a.back(), inv);
      size_t off = a.size() - b.size();
      for (size_t k = 0; k < b.size(); ++k) a[off + k] = submod(a[off + k], mulmod(f, b[k]));
      trim(a);
      if (a.empty()) break;
    }
    std::swap(a, b);
  }
  return static_cast<int>(a.size()) - 1;
}

// True when the gcd of a and b provably has degree 0 in v.
bool coprime_in(const LPoly& a, const LPoly& b, Var v) {
  int da = a.degree(v), db = b.degree(v);
  uint64_t seed = 0x9E3779B97F4A7C15ULL;
  for (int attempt = 0; attempt < 3; ++attempt) {
    std::array<uint64_t, kNumVars> point{};
    for (int k = 0; k < kNumVars; ++k) {
      seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
      point[k] = (seed >> 3) % (kPrime - 2) + 2;
    }
    ModPoly ia, ib;
    if (!mod_image(a, v, point, ia) || !mod_image(b, v, point, ib)) return false;
    if (static_cast<int>(ia.size()) - 1 != da || ia.back() == 0) continue;
    if (static_cast<int>(ib.size()) - 1 != db || ib.back() == 0) continue;
    return mod_gcd_degree(ia, ib) == 0;
  }
  return false;
}

// gcd of all coefficients of a and b with respect to v.
LPoly gcd_of_coeffs(const LPoly& a, const LPoly& b, Var v) {
  LPoly g;
  for (const LPoly* p : {&a, &b})
    for (const auto& [d, c] : coeffs_in(*p, v)) {
      g = gcd_poly(g, c);
      if (g.is_constant()) return LPoly(GaussQ(1));
    }
  return g;
}

// Subresultant remainder sequence; a, b primitive in v with deg a >= deg b.
LPoly subresultant_gcd(LPoly a, LPoly b, Var v) {
  LPoly g(GaussQ(1)), h(GaussQ(1));
  while (true) {
    int delta = a.degree(v) - b.degree(v);
    LPoly r = prem(a, b, v);
    if (r.is_zero()) break;
    if (!r.involves(v)) return LPoly(GaussQ(1));
    a = b;
    b = exact_divide(r, g * power(h, delta));
    int dg = 0;
    g = lead_coeff_in(a, v, dg);
    if (delta == 1) h = g;
    else if (delta > 1) h = exact_divide(power(g, delta), power(h, delta - 1));
  }
  LPoly cb = content_in(b, v);
  return cb.is_constant() ? b : exact_divide(b, cb);
}

LPoly gcd_poly(const LPoly& a0, const LPoly& b0) {
  if (a0.is_zero()) return monic(strip_monomial(b0));
  if (b0.is_zero()) return monic(strip_monomial(a0));
  LPoly a = strip_monomial(a0);
  LPoly b = strip_monomial(b0);
  if (a.is_constant() || b.is_constant()) return LPoly(GaussQ(1));
  if (a == b) return monic(a);

  // A variable present in only one argument divides out via contents.
  for (int k = 0; k < kNumVars; ++k) {
    Var v = static_cast<Var>(k);
    bool ia = a.involves(v), ib = b.involves(v);
    if (ia == ib) continue;
    const LPoly& with = ia ? a : b;
    LPoly g = ia ? b : a;
    for (const auto& [d, c] : coeffs_in(with, v)) {
      g = gcd_poly(g, c);
      if (g.is_constant()) return LPoly(GaussQ(1));
    }
    return g;
  }

  // If the gcd is free of some variable it divides every coefficient.
  Var main = Var::u;
  int best = -1;
  for (int k = 0; k < kNumVars; ++k) {
    Var w = static_cast<Var>(k);
    if (!a.involves(w)) continue;
    if (coprime_in(a, b, w)) return monic(strip_monomial(gcd_of_coeffs(a, b, w)));
    int d = std::max(a.degree(w), b.degree(w));
    if (best < 0 || d < best) { best = d; main = w; }
  }

  LPoly ca = content_in(a, main), cb = content_in(b, main);
  LPoly pa = ca.is_constant() ? a : exact_divide(a, ca);
  LPoly pb = cb.is_constant() ? b : exact_divide(b, cb);
  LPoly c = gcd_poly(ca, cb);
  if (pa.degree(main) < pb.degree(main)) std::swap(pa, pb);
  LPoly g = c * subresultant_gcd(pa, pb, main);
  return monic(strip_monomial(g));
}

}  // namespace

LPoly exact_divide(const LPoly& a, const LPoly& b) {
  if (b.is_zero()) throw PoleError("division by zero polynomial");
  LPoly q, r = a;
  const Exps& lb = b.lead_exps();
  GaussQ lbinv = b.lead_coeff().inverse();
  while (!r.is_zero()) {
    Exps d;
    const Exps& lr = r.lead_exps();
    for (int k = 0; k < kNumVars; ++k) d[k] = lr[k] - lb[k];
    if (!nonnegative(d)) throw std::logic_error("exact_divide: not divisible");
    GaussQ c = r.lead_coeff() * lbinv;
    q.add_term(d, c);
    r = r - b.shift(d).scale(c);
  }
  return q;
}

LPoly poly_gcd(const LPoly& a, const LPoly& b) { return gcd_poly(a, b); }

// ---------------------------------------------------------------- Scalar

Scalar Scalar::fraction(const LPoly& num, const LPoly& den) {
  if (den.is_zero()) throw PoleError("zero denominator");
  Scalar s(num, den, true);
  s.canonicalize();
  return s;
}

void Scalar::canonicalize() {
  if (num_.is_zero()) {
    den_ = LPoly(GaussQ(1));
    return;
  }
  Exps mn = num_.min_exps(), md = den_.min_exps();
  Exps shift_back;
  for (int k = 0; k < kNumVars; ++k) shift_back[k] = mn[k] - md[k];
  LPoly n = strip_monomial(num_);
  LPoly d = strip_monomial(den_);
  if (!d.is_constant()) {
    LPoly g = gcd_poly(n, d);
    if (!g.is_constant()) {
      n = exact_divide(n, g);
      d = exact_divide(d, g);
    }
  }
  const GaussQ& lc = d.lead_coeff();
  if (!lc.is_one()) {
    GaussQ inv = lc.inverse();
    n = n.scale(inv);
    d = d.scale(inv);
  }
  num_ = n.shift(shift_back);
  den_ = std::move(d);
}

bool Scalar::is_one() const { return den_.is_constant() && num_ == den_; }

// The leading coefficient of den is 1, so conjugation preserves canonical form.
Scalar Scalar::conj() const { return Scalar(num_.conj(), den_.conj(), true); }

Scalar Scalar::inverse() const {
  if (num_.is_zero()) throw PoleError("inverse of zero");
  return fraction(den_, num_);
}

Scalar Scalar::scale_var(Var v, const Exps& m) const {
  return fraction(num_.scale_var(v, m), den_.scale_var(v, m));
}

Scalar operator+(const Scalar& a, const Scalar& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den_.is_constant() && b.den_.is_constant()) return Scalar(a.num_ + b.num_, a.den_, true);
  if (a.den_ == b.den_) return Scalar::fraction(a.num_ + b.num_, a.den_);
  LPoly g = gcd_poly(a.den_, b.den_);
  LPoly ad = g.is_constant() ? a.den_ : exact_divide(a.den_, g);
  LPoly bd = g.is_constant() ? b.den_ : exact_divide(b.den_, g);
  return Scalar::fraction(a.num_ * bd + b.num_ * ad, a.den_ * bd);
}

Scalar operator-(const Scalar& a) { return Scalar(-a.num_, a.den_, true); }

Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }

Scalar operator*(const Scalar& a, const Scalar& b) {
  if (a.is_zero() || b.is_zero()) return Scalar();
  if (a.den_.is_constant() && b.den_.is_constant()) return Scalar(a.num_ * b.num_, a.den_, true);
  // Cross-cancel to keep the final gcd small.
  LPoly an = a.num_, ad = a.den_, bn = b.num_, bd = b.den_;
  Exps ma = an.min_exps(), mb = bn.min_exps();
  an = strip_monomial(an);
  bn = strip_monomial(bn);
  if (!bd.is_constant()) {
    LPoly g = gcd_poly(an, bd);
    if (!g.is_constant()) { an = exact_divide(an, g); bd = exact_divide(bd, g); }
  }
  if (!ad.is_constant()) {
    LPoly g = gcd_poly(bn, ad);
    if (!g.is_constant()) { bn = exact_divide(bn, g); ad = exact_divide(ad, g); }
  }
  Exps m;
  for (int k = 0; k < kNumVars; ++k) m[k] = ma[k] + mb[k];
  LPoly n = (an * bn).shift(m);
  LPoly d = ad * bd;
  const GaussQ& lc = d.lead_coeff();
  if (!lc.is_one()) {
    GaussQ inv = lc.inverse();
    n = n.scale(inv);
    d = d.scale(inv);
  }
  return Scalar(std::move(n), std::move(d), true);
}

Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inverse(); }

std::string Scalar::str() const {
  std::string n = num_.str();
  if (den_.is_constant()) return n;
  std::string d = den_.str();
  if (num_.terms().size() > 1) n = "(" + n + ")";
  if (den_.terms().size() > 1) d = "(" + d + ")";
  return n + "/" + d;
}

std::array<std::complex<double>, kNumVars> variable_values(const Assignment& as) {
  return {std::complex<double>(std::sqrt(as.q)), std::pow(as.q, as.a), std::pow(as.q, as.b),
          std::pow(as.q, as.c), as.lambda};
}

FloatScalar evaluate(const Scalar& s, const Assignment& as) {
  if (!(as.q > 0.0 && as.q < 1.0)) throw std::invalid_argument("q must lie in (0,1)");
  auto vals = variable_values(as);
  std::complex<double> d = s.den().eval(vals);
  double scale = s.den().abs_sum(vals);
  if (std::abs(d) <= 1e-14 * scale) throw PoleError("denominator vanishes at assignment");
  return s.num().eval(vals) / d;
}

namespace {

GaussQ eval_exact_poly(const LPoly& p, const std::array<mpq_class, kNumVars>& point) {
  GaussQ s;
  for (const auto& [e, c] : p.terms()) {
    mpq_class m = 1;
    for (int k = 0; k < kNumVars; ++k) {
      if (e[k] == 0) continue;
      mpq_class base = e[k] > 0 ? point[k] : mpq_class(1) / point[k];
      for (int j = 0; j < std::abs(e[k]); ++j) m *= base;
    }
    s += c * GaussQ(m);
  }
  return s;
}

}  // namespace

GaussQ evaluate_exact(const Scalar& s, const std::array<mpq_class, kNumVars>& point) {
  GaussQ d = eval_exact_poly(s.den(), point);
  if (d.is_zero()) throw PoleError("denominator vanishes at rational point");
  return eval_exact_poly(s.num(), point) / d;
}

Scalar qbrack(const QExp& c) { return Scalar::qpow(c) - Scalar::qpow(-c); }

Scalar qang(const QExp& c) { return Scalar::qpow(c) + Scalar::qpow(-c); }

Scalar qnum(const QExp& c) {
  return (Scalar::qpow(-c) - Scalar::qpow(c)) / (q_scalar(-1) - q_scalar(1));
}

Scalar q_scalar(int power) { return Scalar::var(Var::u, 2 * power); }

Scalar t_scalar() { return qbrack(QExp::a()); }

QExp parse_qexp(const std::string& text) {
  QExp out;
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw std::invalid_argument("empty exponent");
  size_t i = 0;
  bool any = false;
  while (i < s.size()) {
    int sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      if (s[i] == '-') sign = -1;
      ++i;
    } else if (any) {
      throw std::invalid_argument("malformed exponent: " + text);
    }
    long num = 1, den = 1;
    bool has_num = false;
    if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      num = std::stol(s.substr(i, j - i));
      i = j;
      has_num = true;
      if (i < s.size() && s[i] == '/') {
        ++i;
        size_t k = i;
        while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
        if (k == i) throw std::invalid_argument("malformed fraction in exponent: " + text);
        den = std::stol(s.substr(i, k - i));
        i = k;
      }
      if (i < s.size() && s[i] == '*') ++i;
    }
    char v = 0;
    if (i < s.size() && (s[i] == 'a' || s[i] == 'b' || s[i] == 'c')) v = s[i++];
    if (!has_num && v == 0) throw std::invalid_argument("malformed exponent: " + text);
    if (v == 0) {
      if (den != 1 && den != 2) throw std::invalid_argument("only integer or half-integer constants: " + text);
      long halves = den == 1 ? 2 * num : num;
      out.half += sign * static_cast<int>(halves);
    } else {
      if (den != 1) throw std::invalid_argument("parameter coefficients must be integers: " + text);
      int k = sign * static_cast<int>(num);
      if (v == 'a') out.ka += k;
      else if (v == 'b') out.kb += k;
      else out.kc += k;
    }
    any = true;
  }
  return out;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace qsl2r
