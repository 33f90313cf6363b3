#include "qsl2r/modules.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <future>
#include <iomanip>
#include <sstream>

namespace qsl2r {

namespace {

using cd = std::complex<double>;
const cd I(0, 1);
constexpr double kInf = std::numeric_limits<double>::infinity();

bool near(double x, double y, double tol) { return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)}); }

// Snaps x to 0 when it is within tol of zero relative to the scale of its terms.
double snap(double x, double scale, double tol) { return std::abs(x) <= tol * std::max(1.0, scale) ? 0.0 : x; }

// s<x> - lambda, or 0 if it vanishes to tolerance.
double ang_minus(double q, double x, double lambda, int s, double tol) {
  double v = s * ang(q, x);
  return snap(v - lambda, std::max(std::abs(v), std::abs(lambda)), tol);
}

bool is_integer(double x, double tol) { return std::abs(x - std::round(x)) <= tol; }

std::vector<cd> apply_tri(const Tridiagonal& t, const std::vector<cd>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<cd> out(n, 0.0);
  for (int k = 0; k < n; ++k) {
    if (v[k] == 0.0) continue;
    out[k] += t.mid[k] * v[k];
    if (k + 1 < n) out[k + 1] += t.hi[k] * v[k];
    if (k > 0) out[k - 1] += t.lo[k] * v[k];
  }
  return out;
}

std::vector<double> apply_tri_abs(const Tridiagonal& t, const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> out(n, 0.0);
  for (int k = 0; k < n; ++k) {
    out[k] += std::abs(t.mid[k]) * v[k];
    if (k + 1 < n) out[k + 1] += std::abs(t.hi[k]) * v[k];
    if (k > 0) out[k - 1] += std::abs(t.lo[k]) * v[k];
  }
  return out;
}

CMatrix tri_matrix(const Tridiagonal& t) {
  const int n = static_cast<int>(t.mid.size());
  CMatrix m = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    m(k, k) = t.mid[k];
    if (k + 1 < n) m(k + 1, k) = t.hi[k];
    if (k > 0) m(k - 1, k) = t.lo[k];
  }
  return m;
}

Eigen::MatrixXd tri_abs_matrix(const Tridiagonal& t) {
  const int n = static_cast<int>(t.mid.size());
  auto get = [](const std::vector<double>& m, const std::vector<std::complex<double>>& v, int k) {
    return m.empty() ? std::abs(v[k]) : m[k];
  };
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    m(k, k) = get(t.mid_abs, t.mid, k);
    if (k + 1 < n) m(k + 1, k) = get(t.hi_abs, t.hi, k);
    if (k > 0) m(k - 1, k) = get(t.lo_abs, t.lo, k);
  }
  return m;
}

// Coefficients of X, Z, Y on e_c from T^+ e_c = tp e_{c+2}, A e_c = lambda e_c,
// T^- e_c = tm e_{c-2}, by inverting the (T^+ + t, A, T^- + t) system.
void fill_generators(ModuleWindow& w) {
  const double q = w.p.q, lam = w.p.lambda, t = dif(q, w.p.a), a1 = ang(q, 1);
  const int n = w.size();
  for (Tridiagonal* g : {&w.X, &w.Y, &w.Z}) {
    g->lo.assign(n, 0.0);
    g->mid.assign(n, 0.0);
    g->hi.assign(n, 0.0);
    g->lo_abs.assign(n, 0.0);
    g->mid_abs.assign(n, 0.0);
    g->hi_abs.assign(n, 0.0);
  }
  w.B.assign(n, 0.0);
  for (int k = 0; k < n; ++k) {
    const double c = w.c[k], qc = std::pow(q, c);
    const double am = ang(q, c - 1), a0 = ang(q, c), ap = ang(q, c + 1);
    // The inversion factor 1/(<c-1><c><c+1>) cancelled against each term and
    // applied by successive division, so no intermediate overflows at large |c|.
    const double hi = 1.0 / a0 / ap, mid = 1.0 / am / ap, lo = 1.0 / am / a0;
    const double tp = w.tplus[k], tm = w.tminus[k];
    const double tph = tp / a0 / ap, tml = tm / am / a0;  // T factors grow like <c>
    w.X.hi[k] = -I * (qc * q) * tph;
    w.X.mid[k] = -I * (qc * q) * (t * hi) - I * a1 * (lam * mid) + I * (q / qc) * (t * lo);
    w.X.lo[k] = I * (q / qc) * tml;
    w.Z.hi[k] = -tph;
    w.Z.mid[k] = -(t * hi) + (qc - 1 / qc) * (lam * mid) - (t * lo);
    w.Z.lo[k] = -tml;
    w.Y.hi[k] = -I * tph / (qc * q);
    w.Y.mid[k] = -I * (t * hi) / (qc * q) + I * a1 * (lam * mid) + I * (qc / q) * (t * lo);
    w.Y.lo[k] = I * (qc / q) * tml;
    w.B[k] = -I * qnumber(q, c);
    const double at = std::abs(t), al = std::abs(lam);
    w.X.hi_abs[k] = qc * q * std::abs(tph);
    w.X.mid_abs[k] = qc * q * (at * hi) + a1 * (al * mid) + q / qc * (at * lo);
    w.X.lo_abs[k] = q / qc * std::abs(tml);
    w.Z.hi_abs[k] = std::abs(tph);
    w.Z.mid_abs[k] = at * hi + std::abs(qc - 1 / qc) * (al * mid) + at * lo;
    w.Z.lo_abs[k] = std::abs(tml);
    w.Y.hi_abs[k] = std::abs(tph) / (qc * q);
    w.Y.mid_abs[k] = (at * hi) / (qc * q) + a1 * (al * mid) + qc / q * (at * lo);
    w.Y.lo_abs[k] = qc / q * std::abs(tml);
  }
}

// r_{c+2} = <c>/<c+2> (tm_{c+2} / tp_c) r_c upward from the centre, mirrored below.
void fill_form(ModuleWindow& w, int centre) {
  const double q = w.p.q;
  const int n = w.size();
  w.r.assign(n, 0.0);
  w.r[centre] = 1;
  for (int k = centre; k + 1 < n; ++k) {
    if (w.tplus[k] == 0) return w.r.clear();
    w.r[k + 1] = ang(q, w.c[k]) / ang(q, w.c[k + 1]) * w.tminus[k + 1] / w.tplus[k] * w.r[k];
  }
  for (int k = centre; k > 0; --k) {
    if (w.tminus[k] == 0) return w.r.clear();
    w.r[k - 1] = ang(q, w.c[k]) / ang(q, w.c[k - 1]) * w.tplus[k - 1] / w.tminus[k] * w.r[k];
  }
}

void check_q(double q) {
  if (!(q > 0 && q < 1)) throw std::invalid_argument("q must lie in (0, 1)");
}

ModuleWindow window_skeleton(const ModuleParams& p, ModuleFamily f, int W) {
  check_q(p.q);
  if (W < 1) throw std::invalid_argument("window half-width must be >= 1");
  ModuleWindow w;
  w.p = p;
  w.family = f;
  w.W = W;
  for (int k = -W; k <= W; ++k) w.c.push_back(p.b + 2 * k);
  w.tplus.assign(w.size(), 0.0);
  w.tminus.assign(w.size(), 0.0);
  return w;
}

// Factors of the canonical module. Above b: T^+ = 1, T^- = f_minus; below b:
// T^- = 1, T^+ = f_plus.
double canonical_tminus(const ModuleParams& p, double c, double tol) {
  return ang_minus(p.q, p.a - c + 1, p.lambda, 1, tol) * -ang_minus(p.q, p.a + c - 1, p.lambda, -1, tol);
}
double canonical_tplus(const ModuleParams& p, double c, double tol) {
  return ang_minus(p.q, p.a - c - 1, p.lambda, 1, tol) * -ang_minus(p.q, p.a + c + 1, p.lambda, -1, tol);
}

void mark_generic(ModuleWindow& w) {
  w.generic = true;
  for (int k = 0; k < w.size(); ++k)
    if ((k + 1 < w.size() && w.tplus[k] == 0) || (k > 0 && w.tminus[k] == 0)) w.generic = false;
}

// A window operator with the rounding scale of each entry.
struct Op {
  CMatrix v;
  Eigen::MatrixXd m;
};

Op op_of(const ModuleWindow& w, const std::string& g) {
  if (g == "X") return {tri_matrix(w.X), tri_abs_matrix(w.X)};
  if (g == "Y") return {tri_matrix(w.Y), tri_abs_matrix(w.Y)};
  if (g == "Z") return {tri_matrix(w.Z), tri_abs_matrix(w.Z)};
  CMatrix b = w.matrix("B");
  return {b, b.cwiseAbs()};
}

// Relation residual: entrywise |L - R| over the summed rounding scale of all
// terms, on the checked columns.
struct Term {
  cd coef;
  const Op* m1;
  const Op* m2;  // nullptr for a single factor, both nullptr for identity
};

double relation_check(const std::vector<Term>& lhs, const std::vector<Term>& rhs, int n, int margin) {
  CMatrix val = CMatrix::Zero(n, n);
  Eigen::MatrixXd mag = Eigen::MatrixXd::Zero(n, n);
  auto add = [&](const Term& t, double sgn) {
    if (!t.m1) {
      val += sgn * t.coef * CMatrix::Identity(n, n);
      mag += std::abs(t.coef) * Eigen::MatrixXd::Identity(n, n);
    } else if (!t.m2) {
      val += sgn * t.coef * t.m1->v;
      mag += std::abs(t.coef) * t.m1->m;
    } else {
      val += sgn * t.coef * (t.m1->v * t.m2->v);
      mag += std::abs(t.coef) * (t.m1->m * t.m2->m);
    }
  };
  for (const Term& t : lhs) add(t, 1);
  for (const Term& t : rhs) add(t, -1);
  double worst = 0;
  for (int k = margin; k < n - margin; ++k)
    for (int j = 0; j < n; ++j)
      if (mag(j, k) > 0) worst = std::max(worst, std::abs(val(j, k)) / mag(j, k));
  return worst;
}

}  // namespace

double ang(double q, double x) { return std::pow(q, x) + std::pow(q, -x); }
double dif(double q, double x) { return std::pow(q, x) - std::pow(q, -x); }
double qnumber(double q, double x) { return (std::pow(q, -x) - std::pow(q, x)) / (1 / q - q); }

namespace {

double parse_real(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) return parse_real(s.substr(0, slash)) / parse_real(s.substr(slash + 1));
  double v = 0;
  const char* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, v);
  if (s.empty() || res.ec != std::errc() || res.ptr != end) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

}  // namespace

double parse_lambda(const std::string& token, double q) {
  static const std::string qa = "qang:", nqa = "neg-qang:";
  if (token.rfind(nqa, 0) == 0) return -ang(q, parse_real(token.substr(nqa.size())));
  if (token.rfind(qa, 0) == 0) return ang(q, parse_real(token.substr(qa.size())));
  return parse_real(token);
}

double normalize_b(double a, double b, double tol) {
  double x = (b - a) / 2;
  double k = is_integer(x, tol) ? std::round(x) : std::ceil(x);
  return b - 2 * k;
}

double normalize_bprime(double a, double b, double tol) { return normalize_b(-a, b, tol); }

std::string to_string(ModuleFamily f) {
  switch (f) {
    case ModuleFamily::Canonical: return "M";
    case ModuleFamily::Vplus: return "Vplus";
    case ModuleFamily::Vminus: return "Vminus";
    case ModuleFamily::FiniteQuotient: return "finite";
  }
  return "?";
}

int ModuleWindow::index_of(double weight, double tol) const {
  for (int k = 0; k < size(); ++k)
    if (std::abs(c[k] - weight) <= tol) return k;
  return -1;
}

CMatrix ModuleWindow::matrix(const std::string& g) const {
  if (g == "X") return tri_matrix(X);
  if (g == "Y") return tri_matrix(Y);
  if (g == "Z") return tri_matrix(Z);
  if (g == "B") {
    CMatrix m = CMatrix::Zero(size(), size());
    for (int k = 0; k < size(); ++k) m(k, k) = B[k];
    return m;
  }
  if (g == "Omega") {
    const double q = p.q;
    return I / q * matrix("X") + (q - 1 / q) * I * (matrix("Z") * matrix("B")) - I * q * matrix("Y");
  }
  throw std::invalid_argument("unknown generator '" + g + "'");
}

CMatrix ModuleWindow::element(const std::string& which, double weight) const {
  const double q = p.q, qc = std::pow(q, weight), t = dif(q, p.a), a1 = ang(q, 1);
  CMatrix x = matrix("X"), y = matrix("Y"), z = matrix("Z"), id = CMatrix::Identity(size(), size());
  if (which == "T+") return I * qc * x - a1 * z + I / qc * y - t * id;
  if (which == "A") return I / q * x + (qc - 1 / qc) * z - I * q * y;
  if (which == "T-") return -I / qc * x - a1 * z - I * qc * y - t * id;
  throw std::invalid_argument("unknown element '" + which + "'");
}

ModuleWindow canonical_module(const ModuleParams& p, int W, double tol) {
  ModuleWindow w = window_skeleton(p, ModuleFamily::Canonical, W);
  const double q = p.q;
  for (int k = 0; k < w.size(); ++k) {
    const double c = w.c[k];
    w.tplus[k] = k >= W ? 1.0 : canonical_tplus(p, c, tol);
    w.tminus[k] = k <= W ? 1.0 : canonical_tminus(p, c, tol);
  }
  w.r.assign(w.size(), 0.0);
  w.r[W] = 1;
  for (int k = W; k + 1 < w.size(); ++k) {
    const double c = w.c[k];
    double f = -ang_minus(q, p.a + c + 1, p.lambda, -1, tol) * ang_minus(q, p.a - c - 1, p.lambda, 1, tol);
    w.r[k + 1] = ang(q, c) / ang(q, c + 2) * f * w.r[k];
  }
  for (int k = W; k > 0; --k) {
    const double c = w.c[k];
    double f = -ang_minus(q, p.a + c - 1, p.lambda, -1, tol) * ang_minus(q, p.a - c + 1, p.lambda, 1, tol);
    w.r[k - 1] = ang(q, c) / ang(q, c - 2) * f * w.r[k];
  }
  fill_generators(w);
  mark_generic(w);
  return w;
}

ModuleWindow admissible_family(const ModuleParams& p, int sign, int W, double tol) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  ModuleWindow w = window_skeleton(p, sign > 0 ? ModuleFamily::Vplus : ModuleFamily::Vminus, W);
  const double q = p.q, a = p.a, lam = p.lambda;
  for (int k = 0; k < w.size(); ++k) {
    const double c = w.c[k];
    if (sign > 0) {
      w.tplus[k] = -ang_minus(q, a + c + 1, lam, -1, tol);
      w.tminus[k] = ang_minus(q, a - c + 1, lam, 1, tol);
    } else {
      w.tplus[k] = ang_minus(q, a - c - 1, lam, 1, tol);
      w.tminus[k] = -ang_minus(q, a + c - 1, lam, -1, tol);
    }
  }
  fill_generators(w);
  mark_generic(w);
  fill_form(w, W);
  return w;
}

ModuleWindow finite_quotient(const ModuleParams& p, int N) {
  check_q(p.q);
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  ModuleWindow w;
  w.p = p;
  w.family = ModuleFamily::FiniteQuotient;
  w.W = N;
  w.margin = 0;
  for (int m = 0; m < N; ++m) w.c.push_back(p.b + 2 * m);
  w.tplus.assign(N, 1.0);
  w.tminus.assign(N, 1.0);
  for (int m = 1; m < N; ++m) w.tminus[m] = canonical_tminus(p, w.c[m], kDefaultTol);
  // The quotient kills e_{b-2} and e_{b+2N}.
  w.tplus[N - 1] = 0;
  w.tminus[0] = 0;
  fill_generators(w);
  w.r.assign(N, 0.0);
  w.r[0] = 1;
  for (int m = 0; m + 1 < N; ++m)
    w.r[m + 1] = ang(p.q, w.c[m]) / ang(p.q, w.c[m + 1]) * w.tminus[m + 1] * w.r[m];
  mark_generic(w);
  return w;
}

double relation_residual(const ModuleWindow& w) {
  const int n = w.size();
  const double q = w.p.q, t = dif(q, w.p.a), a1 = ang(q, 1);
  const Op X = op_of(w, "X"), Y = op_of(w, "Y"), Z = op_of(w, "Z"), B = op_of(w, "B");
  const int m = w.margin;
  double worst = 0;
  auto chk = [&](std::vector<Term> l, std::vector<Term> r) { worst = std::max(worst, relation_check(l, r, n, m)); };
  chk({{1, &Z, &X}}, {{1 / (q * q), &X, &Z}});
  chk({{1, &Z, &Y}}, {{q * q, &Y, &Z}});
  chk({{1, &X, &Y}}, {{1, nullptr, nullptr}, {-q * t, &Z, nullptr}, {-q * q, &Z, &Z}});
  chk({{1, &Y, &X}}, {{1, nullptr, nullptr}, {-t / q, &Z, nullptr}, {-1 / (q * q), &Z, &Z}});
  chk({{1, &B, &X}}, {{q * q, &X, &B}, {q * a1, &Z, nullptr}, {q * t, nullptr, nullptr}});
  chk({{1, &B, &Y}}, {{1 / (q * q), &Y, &B}, {a1 / q, &Z, nullptr}, {t / q, nullptr, nullptr}});
  chk({{1, &B, &Z}}, {{1, &Z, &B}, {-1, &X, nullptr}, {-1, &Y, nullptr}});
  return worst;
}

double casimir_residual(const ModuleWindow& w) {
  const int n = w.size();
  const double q = w.p.q;
  const Op X = op_of(w, "X"), Y = op_of(w, "Y"), Z = op_of(w, "Z"), B = op_of(w, "B");
  return relation_check({{I / q, &X, nullptr}, {(q - 1 / q) * I, &Z, &B}, {-I * q, &Y, nullptr}},
                        {{w.p.lambda, nullptr, nullptr}}, n, std::max(w.margin - 1, 0));
}

double eigen_residual(const ModuleWindow& w) {
  double worst = 0;
  const double q = w.p.q;
  for (int k = 0; k < w.size(); ++k) {
    const double c = w.c[k], qc = std::pow(q, c);
    cd diag = I / q * w.X.mid[k] + (qc - 1 / qc) * w.Z.mid[k] - I * q * w.Y.mid[k];
    double mag = std::abs(I / q * w.X.mid[k]) + std::abs((qc - 1 / qc) * w.Z.mid[k]) + std::abs(q * w.Y.mid[k]);
    worst = std::max(worst, std::abs(diag - w.p.lambda) / std::max(mag, std::abs(w.p.lambda)));
    for (auto [x, z, y] : {std::tuple{w.X.hi[k], w.Z.hi[k], w.Y.hi[k]}, std::tuple{w.X.lo[k], w.Z.lo[k], w.Y.lo[k]}}) {
      cd off = I / q * x + (qc - 1 / qc) * z - I * q * y;
      double m = std::abs(x) / q + std::abs((qc - 1 / qc) * z) + q * std::abs(y);
      if (m > 0) worst = std::max(worst, std::abs(off) / m);
    }
  }
  return worst;
}

double star_residual(const ModuleWindow& w) {
  if (w.r.size() != w.c.size()) throw std::invalid_argument("window carries no invariant form");
  const int n = w.size();
  const CMatrix X = w.matrix("X"), Y = w.matrix("Y"), Z = w.matrix("Z"), B = w.matrix("B");
  double worst = 0;
  auto pair = [&](const CMatrix& g, const CMatrix& gstar, double sgn) {
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        cd l = w.r[j] * g(j, k), rr = sgn * w.r[k] * std::conj(gstar(k, j));
        double mag = std::abs(l) + std::abs(rr);
        if (mag > 0) worst = std::max(worst, std::abs(l - rr) / mag);
      }
  };
  pair(X, Y, 1);
  pair(Y, X, 1);
  pair(Z, Z, 1);
  pair(B, B, -1);
  return worst;
}

double coefficient_sup(const ModuleWindow& w) {
  double s = 0;
  for (const Tridiagonal* g : {&w.X, &w.Y, &w.Z})
    for (const auto* v : {&g->lo, &g->mid, &g->hi})
      for (cd x : *v) s = std::max(s, std::abs(x));
  return s;
}

GramReport gram_oracle(const ModuleWindow& w) {
  const int Wa = w.family == ModuleFamily::FiniteQuotient ? w.W : 2 * w.W + 2;
  ModuleWindow aux;
  switch (w.family) {
    case ModuleFamily::Canonical: aux = canonical_module(w.p, Wa); break;
    case ModuleFamily::Vplus: aux = admissible_family(w.p, 1, Wa); break;
    case ModuleFamily::Vminus: aux = admissible_family(w.p, -1, Wa); break;
    case ModuleFamily::FiniteQuotient: aux = w; break;
  }
  const int shift = w.family == ModuleFamily::FiniteQuotient ? 0 : Wa - w.W;
  const int centre = w.family == ModuleFamily::FiniteQuotient ? 0 : w.W + shift;
  const int na = aux.size(), n = w.size();
  const double q = w.p.q, t = dif(q, w.p.a), a1 = ang(q, 1);

  // s T^{+-}_c with c = aux.c[k], applied to (value, magnitude) vectors.
  auto apply_T = [&](int sgn, int k, double s, std::vector<cd>& v, std::vector<double>& m) {
    if (!std::isfinite(s)) throw std::invalid_argument("Gram oracle needs nonzero T coefficients along the paths");
    const double qc = std::pow(q, aux.c[k]);
    cd cx = sgn > 0 ? I * qc : -I / qc, cy = sgn > 0 ? I / qc : -I * qc;
    std::vector<cd> x = apply_tri(aux.X, v), y = apply_tri(aux.Y, v), z = apply_tri(aux.Z, v);
    std::vector<double> xm = apply_tri_abs(aux.X, m), ym = apply_tri_abs(aux.Y, m), zm = apply_tri_abs(aux.Z, m);
    for (int j = 0; j < na; ++j) {
      v[j] = s * (cx * x[j] - a1 * z[j] + cy * y[j] - t * v[j]);
      m[j] = std::abs(s) * (std::abs(cx) * xm[j] + a1 * zm[j] + std::abs(cy) * ym[j] + std::abs(t) * m[j]);
    }
  };
  // P_k e_b, P_k = prod (T^+_c / tplus_c) above the centre, (T^-_c / tminus_c) below.
  auto forward = [&](int k, std::vector<cd>& v, std::vector<double>& m) {
    v.assign(na, 0.0);
    m.assign(na, 0.0);
    v[centre] = 1;
    m[centre] = 1;
    for (int j = centre; j < k; ++j) apply_T(1, j, 1 / aux.tplus[j], v, m);
    for (int j = centre; j > k; --j) apply_T(-1, j, 1 / aux.tminus[j], v, m);
  };
  // P_k^*: adjoint letters in reverse order, (T^+_c)^* = T^-_c; scalars are real.
  auto backward = [&](int k, std::vector<cd>& v, std::vector<double>& m) {
    for (int j = k - 1; j >= centre; --j) apply_T(-1, j, 1 / aux.tplus[j], v, m);
    for (int j = k + 1; j <= centre; ++j) apply_T(1, j, 1 / aux.tminus[j], v, m);
  };

  GramReport rep;
  rep.gram = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd mag = Eigen::MatrixXd::Zero(n, n);
  std::vector<cd> v;
  std::vector<double> m;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      forward(k + shift, v, m);
      backward(j + shift, v, m);
      cd g = v[centre];
      if (std::abs(g.imag()) > 1e-12 * std::max(m[centre], 1e-300))
        throw InternalConsistencyError("Gram oracle produced a non-real entry");
      rep.gram(j, k) = g.real();
      mag(j, k) = m[centre];
    }
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const double g = rep.gram(j, k);
      if (j == k) {
        double want = w.r.empty() ? std::nan("") : w.r[k];
        double err = want != 0 ? std::abs(g - want) / std::abs(want) : (mag(j, k) > 0 ? std::abs(g) / mag(j, k) : 0);
        rep.diag_residual = std::max(rep.diag_residual, err);
      } else if (mag(j, k) > 0) {
        rep.offdiag_residual = std::max(rep.offdiag_residual, std::abs(g) / mag(j, k));
      }
    }
  return rep;
}

std::string to_string(Support s) {
  switch (s) {
    case Support::TwoSided: return "two-sided";
    case Support::LowerBounded: return "lower-bounded";
    case Support::UpperBounded: return "upper-bounded";
    case Support::Finite: return "finite";
  }
  return "?";
}

namespace {

Support support_from(double lo, double hi) {
  bool l = std::isfinite(lo), h = std::isfinite(hi);
  if (l && h) return Support::Finite;
  if (l) return Support::LowerBounded;
  if (h) return Support::UpperBounded;
  return Support::TwoSided;
}

// Upward factor at c (r_{c+2} / r_c up to <c>/<c+2>) and downward factor at c.
struct Factors {
  double f1, f2;
  bool zero() const { return f1 == 0 || f2 == 0; }
  int sign() const { return (f1 > 0) == (f2 > 0) ? 1 : -1; }
};
Factors up_factor(const ModuleParams& p, double c, double tol) {
  return {-ang_minus(p.q, p.a + c + 1, p.lambda, -1, tol), ang_minus(p.q, p.a - c - 1, p.lambda, 1, tol)};
}
Factors down_factor(const ModuleParams& p, double c, double tol) {
  return {-ang_minus(p.q, p.a + c - 1, p.lambda, -1, tol), ang_minus(p.q, p.a - c + 1, p.lambda, 1, tol)};
}

// Solutions x of s<x> = lambda (x >= 0; the other is -x), empty if none.
std::vector<double> ang_roots(double q, double lambda, int s, double tol) {
  double v = s * lambda;
  if (v < 2 - tol * std::max(1.0, v)) return {};
  double y = v <= 2 ? 0 : std::acosh(v / 2) / std::abs(std::log(q));
  return {y, -y};
}

// Smallest m >= 0 with factor(b + dir*2m) vanishing, from the roots of the
// vanishing conditions. cand(x) maps a root x to the weight c it forces.
double first_zero(const ModuleParams& p, int dir, double tol) {
  std::vector<double> cands;
  const double q = p.q, a = p.a, lam = p.lambda;
  for (double y : ang_roots(q, lam, 1, tol)) cands.push_back(dir > 0 ? a - 1 - y : a + 1 - y);
  for (double y : ang_roots(q, lam, -1, tol)) cands.push_back(dir > 0 ? -a - 1 + y : -a + 1 + y);
  double best = kInf;
  for (double c : cands) {
    double m0 = std::round(dir * (c - p.b) / 2);
    for (double m : {m0 - 1, m0, m0 + 1}) {
      if (m < 0) continue;
      double cc = p.b + dir * 2 * m;
      Factors f = dir > 0 ? up_factor(p, cc, tol) : down_factor(p, cc, tol);
      if (f.zero() && m < best) best = m;
    }
  }
  return std::isfinite(best) ? p.b + dir * 2 * best : dir * kInf;
}

}  // namespace

bool same_verdict(const UnitarityVerdict& x, const UnitarityVerdict& y, double tol) {
  if (x.unitary != y.unitary) return false;
  if (!x.unitary) return true;
  auto eq = [&](double u, double v) { return (std::isinf(u) && u == v) || std::abs(u - v) <= 1e3 * tol; };
  return x.case_no == y.case_no && x.support == y.support && eq(x.c_min, y.c_min) && eq(x.c_max, y.c_max);
}

UnitarityVerdict unitarity_closed_form(const ModuleParams& p, double tol) {
  check_q(p.q);
  const double q = p.q, a = p.a, lam = p.lambda;
  UnitarityVerdict v;
  v.b_reduced = normalize_b(a, p.b, tol);
  v.b_prime = normalize_bprime(a, p.b, tol);
  v.c_max = first_zero(p, 1, tol);
  v.c_min = first_zero(p, -1, tol);
  v.support = support_from(v.c_min, v.c_max);
  auto eq = [&](double x, double y) { return near(x, y, tol); };
  auto gt = [&](double x, double y) { return x > y + tol; };
  switch (v.support) {
    case Support::TwoSided:
      v.case_no = (-ang(q, a + v.b_prime + 1) < lam && lam < ang(q, a - v.b_reduced - 1)) ? 1 : 0;
      break;
    case Support::LowerBounded: {
      const double b = v.c_min;
      v.case_no = ((gt(b, -a) && eq(lam, -ang(q, a + b - 1))) || (gt(b, a) && eq(lam, ang(q, a - b + 1)))) ? 2 : 0;
      break;
    }
    case Support::UpperBounded: {
      const double b = v.c_max;
      v.case_no = ((gt(-a, b) && eq(lam, -ang(q, a + b + 1))) || (gt(a, b) && eq(lam, ang(q, a - b - 1)))) ? 3 : 0;
      break;
    }
    case Support::Finite: {
      const double b = v.c_min;
      bool single = std::abs(v.c_max - v.c_min) <= 1e3 * tol;
      v.case_no = single && ((std::abs(b + a) <= 1e3 * tol && eq(lam, -ang(q, 1))) ||
                             (std::abs(b - a) <= 1e3 * tol && eq(lam, ang(q, 1))))
                      ? 4
                      : 0;
      break;
    }
  }
  v.unitary = v.case_no != 0;
  return v;
}

UnitarityVerdict unitarity_sign_scan(const ModuleParams& p, double tol, int horizon) {
  check_q(p.q);
  UnitarityVerdict v;
  v.b_reduced = normalize_b(p.a, p.b, tol);
  v.b_prime = normalize_bprime(p.a, p.b, tol);
  bool positive = true;
  for (int dir : {1, -1}) {
    int sign = 1;
    for (int m = 0; m <= horizon; ++m) {
      const double c = p.b + dir * 2 * m;
      Factors f = dir > 0 ? up_factor(p, c, tol) : down_factor(p, c, tol);
      if (f.zero()) {
        (dir > 0 ? v.c_max : v.c_min) = c;
        break;
      }
      sign *= f.sign();
      if (sign < 0) positive = false;
    }
  }
  v.support = support_from(v.c_min, v.c_max);
  v.unitary = positive;
  if (positive) {
    switch (v.support) {
      case Support::TwoSided: v.case_no = 1; break;
      case Support::LowerBounded: v.case_no = 2; break;
      case Support::UpperBounded: v.case_no = 3; break;
      case Support::Finite: v.case_no = std::abs(v.c_max - v.c_min) <= 1e3 * tol ? 4 : 0; break;
    }
  }
  return v;
}

UnitarityVerdict unitarity_test(const ModuleParams& p, double tol) {
  UnitarityVerdict closed = unitarity_closed_form(p, tol);
  UnitarityVerdict scan = unitarity_sign_scan(p, tol);
  if (!same_verdict(closed, scan, tol)) {
    std::ostringstream os;
    os << std::setprecision(17) << "unitarity closed form (case " << closed.case_no << ", " << to_string(closed.support)
       << ") disagrees with sign scan (case " << scan.case_no << ", " << to_string(scan.support)
       << ", unitary=" << scan.unitary << ") at q=" << p.q << " a=" << p.a << " lambda=" << p.lambda << " b=" << p.b;
    throw InternalConsistencyError(os.str());
  }
  return closed;
}

std::string to_string(Family f) {
  switch (f) {
    case Family::Lplus: return "L+";
    case Family::Lminus: return "L-";
    case Family::Dplus: return "D+";
    case Family::Dminus: return "D-";
    case Family::Eplus: return "E+";
    case Family::Eminus: return "E-";
    case Family::Trivial: return "I";
    case Family::OneDimC: return "C";
    case Family::VplusN: return "V+";
    case Family::VminusN: return "V-";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  for (Family f : {Family::Lplus, Family::Lminus, Family::Dplus, Family::Dminus, Family::Eplus, Family::Eminus,
                   Family::Trivial, Family::OneDimC, Family::VplusN, Family::VminusN})
    if (to_string(f) == s) return f;
  throw std::invalid_argument("unknown family '" + s + "'");
}

bool Interval::contains(double x, double tol) const {
  bool above = lo_closed ? x >= lo - tol : x > lo + tol;
  bool below = hi_closed ? x <= hi + tol : x < hi - tol;
  return above && below;
}

std::string ClassEntry::label() const {
  switch (family) {
    case Family::Dplus: case Family::Dminus: case Family::Eplus: case Family::Eminus:
    case Family::VplusN: case Family::VminusN:
      return to_string(family) + "_" + std::to_string(n);
    default: return to_string(family);
  }
}

namespace {

nlohmann::json interval_json(const Interval& i) {
  return {{"lo", i.lo}, {"hi", i.hi}, {"lo_closed", i.lo_closed}, {"hi_closed", i.hi_closed}};
}
Interval interval_from(const nlohmann::json& j) {
  return {j.at("lo").get<double>(), j.at("hi").get<double>(), j.at("lo_closed").get<bool>(),
          j.at("hi_closed").get<bool>()};
}
Support support_from_string(const std::string& s) {
  for (Support x : {Support::TwoSided, Support::LowerBounded, Support::UpperBounded, Support::Finite})
    if (to_string(x) == s) return x;
  throw std::invalid_argument("unknown support '" + s + "'");
}

}  // namespace

nlohmann::json to_json(const ClassEntry& e) {
  nlohmann::json j;
  j["family"] = to_string(e.family);
  j["label"] = e.label();
  j["sector"] = e.sector;
  j["lambda"] = e.lambda ? nlohmann::json(*e.lambda) : nlohmann::json(nullptr);
  j["b"] = e.b;
  j["n"] = e.n;
  j["support"] = to_string(e.support);
  j["admissible"] = e.admissible;
  if (e.range) j["range"] = interval_json(*e.range);
  if (e.principal) j["principal"] = interval_json(*e.principal);
  nlohmann::json comp = nlohmann::json::array();
  for (const Interval& i : e.complementary) comp.push_back(interval_json(i));
  j["complementary"] = comp;
  return j;
}

ClassEntry class_entry_from_json(const nlohmann::json& j) {
  ClassEntry e;
  e.family = family_from_string(j.at("family").get<std::string>());
  e.sector = j.at("sector").get<std::string>();
  if (!j.at("lambda").is_null()) e.lambda = j.at("lambda").get<double>();
  e.b = j.at("b").get<double>();
  e.n = j.at("n").get<int>();
  e.support = support_from_string(j.at("support").get<std::string>());
  e.admissible = j.at("admissible").get<bool>();
  if (j.contains("range")) e.range = interval_from(j.at("range"));
  if (j.contains("principal")) e.principal = interval_from(j.at("principal"));
  for (const auto& i : j.at("complementary")) e.complementary.push_back(interval_from(i));
  return e;
}

nlohmann::json classification_json(double q, double a, const std::vector<ClassEntry>& entries) {
  nlohmann::json out = {{"schema_version", kClassSchemaVersion}, {"q", q}, {"a", a}};
  nlohmann::json list = nlohmann::json::array();
  for (const ClassEntry& e : entries) list.push_back(to_json(e));
  out["entries"] = list;
  return out;
}

std::vector<ClassEntry> classification_from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != kClassSchemaVersion)
    throw std::invalid_argument("unsupported classification schema version");
  std::vector<ClassEntry> out;
  for (const auto& e : j.at("entries")) out.push_back(class_entry_from_json(e));
  return out;
}

std::string sector_of(double a, double b, double tol) {
  double d = b - a;
  if (!is_integer(d, tol)) return "none";
  return static_cast<long long>(std::llround(d)) % 2 == 0 ? "even" : "odd";
}

std::vector<ClassEntry> classify(double q, double a, int nmax, double tol) {
  check_q(q);
  std::vector<ClassEntry> out;
  auto confirm = [&](const ClassEntry& e, double lambda, int want_case) {
    UnitarityVerdict v = unitarity_test({q, a, lambda, e.b}, tol);
    if (!v.unitary || v.case_no != want_case || v.support != e.support)
      throw InternalConsistencyError(e.label() + " fails unitarity_test at lambda=" + std::to_string(lambda));
  };

  for (int odd : {0, 1}) {
    ClassEntry e;
    e.family = odd ? Family::Lminus : Family::Lplus;
    e.b = a - odd;
    e.sector = odd ? "odd" : "even";
    e.support = Support::TwoSided;
    const double bp = normalize_bprime(a, e.b, tol);
    const double lo = -ang(q, a + bp + 1), hi = ang(q, a - e.b - 1);
    // The same bound through s in [0,1) with a + s in Z (resp. 1/2 + Z).
    const double s = std::ceil(a - 0.5 * odd - tol) - (a - 0.5 * odd);
    if (!near(lo, -ang(q, 1 - 2 * s), tol)) throw InternalConsistencyError("continuous-series bounds disagree");
    e.range = Interval{lo, hi, false, false};
    if (lo < hi) {
      e.principal = Interval{std::max(lo, -2.0), std::min(hi, 2.0), lo < -2, hi > 2};
      if (lo < -2) e.complementary.push_back({lo, -2, false, false});
      if (hi > 2) e.complementary.push_back({2, hi, false, false});
      for (int k = 1; k < 8; ++k) confirm(e, lo + (hi - lo) * k / 8, 1);
      out.push_back(e);
    }
  }

  auto discrete = [&](Family f, int n0, auto lambda_of, auto b_of, Support sup, int case_no) {
    for (int n = n0; n < n0 + nmax; ++n) {
      ClassEntry e;
      e.family = f;
      e.n = n;
      e.lambda = lambda_of(n);
      e.b = b_of(n);
      e.sector = sector_of(a, e.b, tol);
      e.support = sup;
      confirm(e, *e.lambda, case_no);
      out.push_back(e);
    }
  };
  discrete(Family::Dplus, 1, [&](int n) { return ang(q, n - 1); }, [&](int n) { return a + n; },
           Support::LowerBounded, 2);
  discrete(Family::Eplus, static_cast<int>(std::floor(-2 * a + tol)) + 1,
           [&](int n) { return -ang(q, 2 * a + n - 1); }, [&](int n) { return a + n; }, Support::LowerBounded, 2);
  discrete(Family::Dminus, 1, [&](int n) { return ang(q, n - 1); }, [&](int n) { return a - n; },
           Support::UpperBounded, 3);
  discrete(Family::Eminus, static_cast<int>(std::floor(2 * a + tol)) + 1,
           [&](int n) { return -ang(q, -2 * a + n - 1); }, [&](int n) { return a - n; }, Support::UpperBounded, 3);

  ClassEntry triv;
  triv.family = Family::Trivial;
  triv.lambda = ang(q, 1);
  triv.b = a;
  triv.sector = "even";
  triv.support = Support::Finite;
  triv.n = 1;
  confirm(triv, *triv.lambda, 4);
  out.push_back(triv);
  if (is_integer(2 * a, tol)) {
    ClassEntry c;
    c.family = Family::OneDimC;
    c.lambda = -ang(q, 1);
    c.b = 0.0 - a;
    c.sector = sector_of(a, -a, tol);
    c.support = Support::Finite;
    c.n = 1;
    confirm(c, *c.lambda, 4);
    out.push_back(c);
  }
  return out;
}

bool covered_by(const std::vector<ClassEntry>& entries, const ModuleParams& p, const UnitarityVerdict& v, double tol) {
  if (!v.unitary) return false;
  const std::string sector = sector_of(p.a, p.b, tol);
  for (const ClassEntry& e : entries) {
    if (e.sector != sector) continue;
    switch (v.case_no) {
      case 1:
        if (e.range && e.range->contains(p.lambda)) return true;
        break;
      case 2:
        if ((e.family == Family::Dplus || e.family == Family::Eplus) && near(*e.lambda, p.lambda, tol) &&
            std::abs(e.b - v.c_min) <= 1e3 * tol)
          return true;
        break;
      case 3:
        if ((e.family == Family::Dminus || e.family == Family::Eminus) && near(*e.lambda, p.lambda, tol) &&
            std::abs(e.b - v.c_max) <= 1e3 * tol)
          return true;
        break;
      case 4:
        if ((e.family == Family::Trivial || e.family == Family::OneDimC) && near(*e.lambda, p.lambda, tol) &&
            std::abs(e.b - v.c_min) <= 1e3 * tol)
          return true;
        break;
    }
  }
  return false;
}

std::vector<FiniteDimModule> finite_dim_classify(double q, double a, int N) {
  check_q(q);
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  std::vector<FiniteDimModule> out;
  for (int sign : {1, -1}) {
    FiniteDimModule m;
    m.entry.family = sign > 0 ? Family::VplusN : Family::VminusN;
    m.entry.n = N;
    m.entry.lambda = sign * ang(q, N);
    m.entry.b = sign > 0 ? a - N + 1 : -a - N + 1;
    m.entry.sector = sector_of(a, m.entry.b);
    m.entry.support = Support::Finite;
    m.entry.admissible = sign > 0 || is_integer(2 * a, kDefaultTol);
    ModuleParams p{q, a, *m.entry.lambda, m.entry.b};
    m.window = finite_quotient(p, N);
    const ModuleWindow& w = m.window;
    const double top = w.c.back(), bottom = w.c.front();
    // e_{b-2} and e_{b+2N} span a submodule of M_{lambda,b} iff these vanish.
    double leak_lo = canonical_tplus(p, bottom - 2, 0), leak_hi = canonical_tminus(p, top + 2, 0);
    double scale = std::pow(ang(q, N) + std::max(ang(q, a + top + 1), ang(q, a - bottom + 1)), 2);
    m.submodule_residual = std::max(std::abs(leak_lo), std::abs(leak_hi)) / scale;
    auto residual = [&](const std::string& which, int k) {
      CMatrix T = w.element(which, w.c[k]);
      double mag = T.col(k).cwiseAbs().sum() + 1;
      return T.col(k).cwiseAbs().maxCoeff() / mag;
    };
    m.top_residual = residual("T+", N - 1);
    m.bottom_residual = residual("T-", 0);
    m.casimir = casimir_residual(w);
    m.relations = relation_residual(w);
    out.push_back(std::move(m));
  }
  return out;
}

SubquotientReport subquotient_identify(double q, double a, double lambda, double chi, int sign, double tol) {
  check_q(q);
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  SubquotientReport rep;
  const double br = normalize_b(a, chi, tol);
  double lp = kInf, lm = kInf;
  for (int k = -kScanHorizon; k <= kScanHorizon; ++k) {
    const double c = br + 2 * k;
    lp = std::min(lp, ang(q, a - (c + 1)));
    lm = std::min(lm, ang(q, a + (c + 1)));
  }
  auto add = [&](Constituent c) {
    c.verdict = unitarity_test({q, a, c.lambda, c.b}, tol);
    if (!c.verdict.unitary || c.verdict.case_no != c.case_no)
      throw InternalConsistencyError("subquotient constituent fails unitarity_test: " + c.description);
    rep.constituents.push_back(std::move(c));
  };
  auto in_chi = [&](double c) { return is_integer((c - chi) / 2, 1e-7); };
  // b in chi with s<x(b)> = lambda, where x(b) = off + slope * b.
  auto solve = [&](int s, double off, double slope) {
    std::vector<double> bs;
    for (double y : ang_roots(q, lambda, s, tol)) {
      double b = (y - off) / slope;
      double k = std::round((b - chi) / 2);
      double bb = chi + 2 * k;
      if (near(s * ang(q, off + slope * bb), lambda, tol) && in_chi(bb) &&
          std::none_of(bs.begin(), bs.end(), [&](double x) { return std::abs(x - bb) < 1e-9; }))
        bs.push_back(bb);
    }
    return bs;
  };

  if (-lm < lambda && lambda < lp) {
    if (!near(lp, ang(q, a - br - 1), tol)) throw InternalConsistencyError("lambda_chi^+ is not attained at b");
    rep.irreducible = true;
    Constituent c{1, lambda, br, Support::TwoSided, -kInf, kInf, "V is irreducible, isomorphic to L_{lambda,b}", {}};
    add(c);
    return rep;
  }
  // Lower cut: T^-_b xi_b = 0.
  for (double b : sign > 0 ? solve(1, a + 1, -1) : solve(-1, a - 1, 1))
    if (sign > 0 ? b > a + tol : b > -a + tol)
      add({2, lambda, b, Support::LowerBounded, b, kInf, "submodule generated by xi_{b+2n}, n >= 0", {}});
  // Upper cut: T^+_b xi_b = 0.
  for (double b : sign > 0 ? solve(-1, a + 1, 1) : solve(1, a - 1, -1))
    if (sign > 0 ? b < -a - tol : b < a - tol)
      add({3, lambda, b, Support::UpperBounded, -kInf, b, "submodule generated by xi_{b-2n}, n >= 0", {}});
  if (near(lambda, ang(q, 1), tol) && in_chi(a)) {
    Constituent c{4, lambda, a, Support::Finite, sign > 0 ? a : -kInf, sign > 0 ? kInf : a,
                  "one-dimensional quotient of span{xi_{a+-2n}} by span{xi_{a+-2n}, n > 0}", {}};
    add(c);
  }
  if (near(lambda, -ang(q, 1), tol) && in_chi(-a)) {
    Constituent c{4, lambda, -a, Support::Finite, sign > 0 ? -kInf : -a, sign > 0 ? -a : kInf,
                  "one-dimensional quotient of span{xi_{-a-+2n}} by span{xi_{-a-+2n}, n > 0}", {}};
    add(c);
  }
  return rep;
}

ScanResult scan_lambda(double q, double a, double b, double lo, double hi, int count, double tol) {
  check_q(q);
  if (count < 1) throw std::invalid_argument("grid count must be >= 1");
  ScanResult res;
  for (int i = 0; i < count; ++i) res.grid.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  res.verdicts.resize(count);
  const int chunks = 4;
  std::vector<std::future<void>> jobs;
  for (int ch = 0; ch < chunks; ++ch)
    jobs.push_back(std::async(std::launch::async, [&, ch] {
      for (int i = ch; i < count; i += chunks) res.verdicts[i] = unitarity_test({q, a, res.grid[i], b}, tol);
    }));
  for (auto& j : jobs) j.get();
  // Refinement snaps only rounding-level factors, so transitions converge to
  // the exact zero of the norm factor rather than the edge of the tol band.
  const double fine = 64 * std::numeric_limits<double>::epsilon();
  auto unitary_at = [&](double l) { return unitarity_sign_scan({q, a, l, b}, fine).unitary; };
  for (int i = 0; i + 1 < count; ++i) {
    if (res.verdicts[i].unitary == res.verdicts[i + 1].unitary) continue;
    double x = res.grid[i], y = res.grid[i + 1];
    const bool ux = res.verdicts[i].unitary;
    for (int it = 0; it < 200 && y - x > fine * std::max(1.0, std::abs(x)); ++it) {
      double mid = 0.5 * (x + y);
      (unitary_at(mid) == ux ? x : y) = mid;
    }
    res.boundaries.push_back(0.5 * (x + y));
  }
  res.closed_form_bounds = {-ang(q, a + normalize_bprime(a, b, tol) + 1), ang(q, a - normalize_b(a, b, tol) - 1)};
  return res;
}

std::string window_csv(const ModuleWindow& w) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17);
  os << "c,r_c,iX_lo,iX_mid,iX_hi,Z_lo,Z_mid,Z_hi,iY_lo,iY_mid,iY_hi,iB\n";
  for (int k = 0; k < w.size(); ++k) {
    os << w.c[k] << ',';
    if (w.r.empty()) os << "nan";
    else os << w.r[k];
    auto put = [&](cd x) { os << ',' << x.real() + 0.0; };  // + 0.0 clears signed zero
    for (cd x : {I * w.X.lo[k], I * w.X.mid[k], I * w.X.hi[k]}) put(x);
    for (cd x : {w.Z.lo[k], w.Z.mid[k], w.Z.hi[k]}) put(x);
    for (cd x : {I * w.Y.lo[k], I * w.Y.mid[k], I * w.Y.hi[k]}) put(x);
    put(I * w.B[k]);
    os << '\n';
  }
  return os.str();
}

}  // namespace qsl2r
