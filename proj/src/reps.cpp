#include "qsl2r/reps.hpp"

#include <gmpxx.h>

#include <cmath>
#include <limits>
#include <sstream>

namespace qsl2r {

int parse_spin(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  size_t slash = s.find('/');
  try {
    size_t used = 0;
    if (slash == std::string::npos) {
      int j = std::stoi(s, &used);
      if (used == s.size() && j >= 0) return 2 * j;
    } else if (s.substr(slash + 1) == "2") {
      int n = std::stoi(s.substr(0, slash), &used);
      if (used == slash && n >= 0) return n;
    }
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("invalid spin '" + text + "': expected a nonnegative integer or half-integer");
}

std::string spin_str(int n) { return n % 2 == 0 ? std::to_string(n / 2) : std::to_string(n) + "/2"; }

namespace {

void check_inputs(int n, const Assignment& as) {
  if (n < 0) throw std::invalid_argument("invalid spin: n must be >= 0");
  if (!(as.q > 0.0 && as.q < 1.0)) throw std::invalid_argument("q must lie in (0,1)");
}

// [x]_q for real x.
double qnum_d(double q, double x) { return (std::pow(q, -x) - std::pow(q, x)) / (1.0 / q - q); }

struct Gens {
  CMatrix e, f, k, kinv;
};

Gens orthonormal(int n, double q) {
  const int d = n + 1;
  Gens g{CMatrix::Zero(d, d), CMatrix::Zero(d, d), CMatrix::Zero(d, d), CMatrix::Zero(d, d)};
  const double s = 1.0 / q - q;
  for (int p = 0; p <= n; ++p) {
    g.k(p, p) = std::pow(q, n - 2 * p);
    g.kinv(p, p) = std::pow(q, 2 * p - n);
    if (p >= 1)
      g.e(p - 1, p) = std::sqrt((std::pow(q, -n + p - 1) - std::pow(q, n - p + 1)) * (std::pow(q, -p) - std::pow(q, p))) *
                      std::pow(q, 0.5 * n - p + 1) / s;
    if (p < n)
      g.f(p + 1, p) = std::sqrt((std::pow(q, -n + p) - std::pow(q, n - p)) * (std::pow(q, -p - 1) - std::pow(q, p + 1))) *
                      std::pow(q, -0.5 * n + p) / s;
  }
  return g;
}

CMatrix omega_of(const Gens& g, double q) {
  const int d = static_cast<int>(g.k.rows());
  const double s = 1.0 / q - q;
  return g.e * g.f + (g.k / q + q * g.kinv - (q + 1.0 / q) * CMatrix::Identity(d, d)) / (s * s);
}

CMatrix big_omega_of(const Gens& g, double q) {
  const int d = static_cast<int>(g.k.rows());
  const double s = 1.0 / q - q;
  return s * s * omega_of(g, q) + (1.0 / q + q) * CMatrix::Identity(d, d);
}

ScalarMatrix jacobi_exact(int n) {
  ScalarMatrix J(n + 1, std::vector<Scalar>(n + 1));
  Scalar one(1);
  Scalar va2 = Scalar::var(Var::va, -2);
  for (int p = 0; p <= n; ++p) {
    J[p][p] = (one - va2) * Scalar::var(Var::u, 4 * n - 4 * p);
    if (p < n) J[p][p + 1] = one;
    if (p > 0)
      J[p][p - 1] = -(va2 * Scalar::var(Var::u, 4 * n)) * (one - Scalar::var(Var::u, -4 * p)) *
                    (one - Scalar::var(Var::u, -4 * p + 4 * n + 4));
  }
  return J;
}

}  // namespace

RepMatrix rep_matrix(int n, const std::string& generator, Gauge gauge, const Assignment& as) {
  RepMatrix r;
  r.n = n;
  r.gauge = gauge;
  if (gauge == Gauge::Rational) {
    if (n < 0) throw std::invalid_argument("invalid spin: n must be >= 0");
    if (generator == "k") {
      r.exact.assign(n + 1, std::vector<Scalar>(n + 1));
      for (int p = 0; p <= n; ++p) r.exact[p][p] = q_scalar(n - 2 * p);
    } else if (generator == "J") {
      r.exact = jacobi_exact(n);
    } else {
      throw std::invalid_argument("rational gauge supports only 'k' and 'J', not '" + generator + "'");
    }
    return r;
  }
  check_inputs(n, as);
  const double q = as.q;
  Gens g = orthonormal(n, q);
  const double pre = (1.0 / q - q) / std::sqrt(q);
  if (generator == "e") r.numeric = g.e;
  else if (generator == "f") r.numeric = g.f;
  else if (generator == "k") r.numeric = g.k;
  else if (generator == "kinv") r.numeric = g.kinv;
  else if (generator == "X") r.numeric = pre * g.f * g.k;
  else if (generator == "Y") r.numeric = pre * g.e;
  else if (generator == "omega") r.numeric = omega_of(g, q);
  else if (generator == "Omega") r.numeric = big_omega_of(g, q);
  else throw std::invalid_argument("unknown generator '" + generator + "'");
  return r;
}

CMatrix ib_matrix(int n, const Assignment& as) {
  check_inputs(n, as);
  const double q = as.q;
  Gens g = orthonormal(n, q);
  const double t = std::pow(q, as.a) - std::pow(q, -as.a);
  const std::complex<double> I(0, 1);
  return I / std::sqrt(q) * (g.e - g.f * g.k) + (t / (q - 1.0 / q)) * g.k;
}

Scalar determinant(ScalarMatrix m) {
  const size_t d = m.size();
  Scalar det(1);
  for (size_t c = 0; c < d; ++c) {
    size_t piv = c;
    while (piv < d && m[piv][c].is_zero()) ++piv;
    if (piv == d) return Scalar(0);
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    Scalar inv = m[c][c].inverse();
    for (size_t r = c + 1; r < d; ++r) {
      if (m[r][c].is_zero()) continue;
      Scalar f = m[r][c] * inv;
      for (size_t k = c; k < d; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

ExactSpectrumReport spectrum_exact(int n) {
  if (n < 0 || n > 12) throw std::invalid_argument("spectrum_exact requires 0 <= n <= 12");
  ExactSpectrumReport rep;
  rep.n = n;
  rep.jacobi = jacobi_exact(n);
  const Scalar mu = Scalar::var(Var::L);
  // Continuant: D_{p+1} = (mu - J_pp) D_p - J_{p,p-1} J_{p-1,p} D_{p-1}.
  Scalar prev(0), cur(1);
  for (int p = 0; p <= n; ++p) {
    Scalar next = (mu - rep.jacobi[p][p]) * cur;
    if (p > 0) next -= rep.jacobi[p][p - 1] * rep.jacobi[p - 1][p] * prev;
    prev = cur;
    cur = next;
  }
  rep.charpoly = cur;
  rep.product = Scalar(1);
  for (int p = 0; p <= n; ++p)
    rep.product *= mu - Scalar::var(Var::u, 4 * n - 4 * p) + Scalar::var(Var::va, -2) * Scalar::var(Var::u, 4 * p);
  rep.residual = rep.charpoly - rep.product;
  rep.ok = rep.residual.is_zero();
  return rep;
}

std::vector<LabelledEigenvalue> spectrum_numeric(int n, const Assignment& as) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(ib_matrix(n, as), Eigen::EigenvaluesOnly);
  const double tol = 1e-8 * std::max(1.0, std::abs(qnum_d(as.q, as.a + n)));
  std::vector<LabelledEigenvalue> out;
  for (int m = 0; m <= n; ++m) {
    LabelledEigenvalue ev;
    ev.p = n - m;
    ev.c = as.a + n - 2 * ev.p;
    ev.value = es.eigenvalues()(m);
    ev.expected = qnum_d(as.q, ev.c);
    ev.residual = std::abs(ev.value - ev.expected);
    if (ev.residual > tol) {
      std::ostringstream os;
      os << "eigenvalue " << format_double(ev.value) << " does not match [" << format_double(ev.c)
         << "] = " << format_double(ev.expected) << " (residual " << ev.residual << ")";
      throw SpectralMismatch(os.str());
    }
    out.push_back(ev);
  }
  return out;
}

namespace {

// Number of eigenvalues below x of the symmetric tridiagonal (d, e) with
// e2 = e^2, by the signs of the LDL^T pivots.
int sturm_count(const std::vector<mpf_class>& d, const std::vector<mpf_class>& e2, const mpf_class& x,
                const mpf_class& tiny) {
  int count = 0;
  mpf_class piv(0, d[0].get_prec());
  for (size_t i = 0; i < d.size(); ++i) {
    piv = i == 0 ? mpf_class(d[0] - x) : mpf_class(d[i] - x - e2[i - 1] / piv);
    if (piv == 0) piv = tiny;
    if (piv < 0) ++count;
  }
  return count;
}

}  // namespace

std::vector<LabelledEigenvalue> spectrum_graded(int n, const Assignment& as) {
  check_inputs(n, as);
  CMatrix H = ib_matrix(n, as);
  const unsigned bits = 320;
  std::vector<mpf_class> d, e2;
  double radius = 0;
  for (int k = 0; k <= n; ++k) {
    for (int j = k + 2; j <= n; ++j)
      if (H(k, j) != 0.0) throw std::logic_error("pi(iB_t) is not tridiagonal");
    d.emplace_back(H(k, k).real(), bits);
    radius = std::max(radius, std::abs(H(k, k)));
    if (k < n) {
      mpf_class e(std::abs(H(k, k + 1)), bits);
      e2.push_back(e * e);
      radius = std::max(radius, std::abs(H(k, k + 1)));
    }
  }
  const mpf_class tiny(1e-300, bits);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H, Eigen::EigenvaluesOnly);
  std::vector<LabelledEigenvalue> out;
  for (int m = 0; m <= n; ++m) {
    // Bracket the m-th smallest eigenvalue around the dense estimate, widening
    // until the Sturm counts confirm it.
    double w = 64 * std::numeric_limits<double>::epsilon() * (n + 1) * std::max(radius, 1e-300);
    mpf_class lo(es.eigenvalues()(m) - w, bits), hi(es.eigenvalues()(m) + w, bits);
    for (int grow = 0; grow < 200 && !(sturm_count(d, e2, lo, tiny) <= m && sturm_count(d, e2, hi, tiny) > m);
         ++grow) {
      w *= 4;
      lo = es.eigenvalues()(m) - w;
      hi = es.eigenvalues()(m) + w;
    }
    for (int it = 0; it < 1000; ++it) {
      mpf_class mid = (lo + hi) / 2;
      if (sturm_count(d, e2, mid, tiny) > m) hi = mid;
      else lo = mid;
      mpf_class width = hi - lo, scale = abs(mid);
      if (width <= scale * 1e-17 || width < 1e-290) break;
    }
    LabelledEigenvalue ev;
    ev.p = n - m;
    ev.c = as.a + n - 2 * ev.p;
    ev.value = mpf_class((lo + hi) / 2).get_d();
    ev.expected = qnum_d(as.q, ev.c);
    ev.residual = std::abs(ev.value - ev.expected);
    out.push_back(ev);
  }
  return out;
}

CVector eigenvector_at(int n, int p, const Assignment& as) {
  if (p < 0 || p > n) throw std::invalid_argument("eigenvector label p out of range");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(ib_matrix(n, as));
  CVector v = es.eigenvectors().col(n - p).normalized();
  for (int k = 0; k <= n; ++k)
    if (std::abs(v(k)) > 1e-10) {
      v *= std::conj(v(k)) / std::abs(v(k));
      v(k) = std::abs(v(k));
      break;
    }
  return v;
}

SphericalVector spherical_vector(int n, const Assignment& as) {
  check_inputs(n, as);
  if (n % 2 != 0) throw NoSphericalVector("no spherical vector in V_" + spin_str(n) + ": n must be even");
  SphericalVector s;
  s.n = n;
  s.v = eigenvector_at(n, n / 2, as);
  s.eigenvalue = qnum_d(as.q, as.a);
  s.residual = (ib_matrix(n, as) * s.v - s.eigenvalue * s.v).norm();
  return s;
}

int eigenspace_dimension(int n, double value, const Assignment& as, double tol) {
  CMatrix m = ib_matrix(n, as) - value * CMatrix::Identity(n + 1, n + 1);
  Eigen::JacobiSVD<CMatrix> svd(m);
  int dim = 0;
  for (int k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()(k) < tol) ++dim;
  return dim;
}

double relation_residual(int n, const Assignment& as) {
  check_inputs(n, as);
  const double q = as.q;
  Gens g = orthonormal(n, q);
  const int d = n + 1;
  CMatrix I = CMatrix::Identity(d, d);
  CMatrix X = rep_matrix(n, "X", Gauge::Orthonormal, as).numeric;
  CMatrix Y = rep_matrix(n, "Y", Gauge::Orthonormal, as).numeric;
  CMatrix W = big_omega_of(g, q);
  auto mag = [](const CMatrix& m) { return m.cwiseAbs().maxCoeff(); };
  // Each relation as (lhs, rhs); residual is relative to the larger side.
  std::vector<std::pair<CMatrix, CMatrix>> rel = {
      {g.k * g.e, q * q * g.e * g.k},
      {g.k * g.f, g.f * g.k / (q * q)},
      {g.e * g.f - g.f * g.e, (g.k - g.kinv) / (q - 1.0 / q)},
      {g.k * g.kinv, I},
      {X * g.k, q * q * g.k * X},
      {Y * g.k, g.k * Y / (q * q)},
      {X * Y, -I + q * W * g.k - q * q * g.k * g.k},
      {Y * X, -I + W * g.k / q - g.k * g.k / (q * q)},
      {X.adjoint(), Y},
      {W * g.e, g.e * W},
      {W * g.f, g.f * W},
  };
  double worst = 0;
  for (const auto& [l, r] : rel) worst = std::max(worst, mag(l - r) / std::max({1.0, mag(l), mag(r)}));
  return worst;
}

nlohmann::json spectrum_json(int n, const Assignment& as, const std::vector<LabelledEigenvalue>& eig) {
  nlohmann::json j;
  j["spin"] = n / 2.0;
  j["q"] = as.q;
  j["a"] = as.a;
  j["eigenvalues"] = nlohmann::json::array();
  for (const auto& e : eig) j["eigenvalues"].push_back({{"c", e.c}, {"value", e.value}, {"residual", e.residual}});
  return j;
}

nlohmann::json spherical_json(const SphericalVector& s, const Assignment& as) {
  nlohmann::json j;
  j["spin"] = s.n / 2.0;
  j["q"] = as.q;
  j["a"] = as.a;
  j["eigenvalue"] = s.eigenvalue;
  j["residual"] = s.residual;
  j["vector"] = nlohmann::json::array();
  for (int k = 0; k < s.v.size(); ++k) j["vector"].push_back({s.v(k).real(), s.v(k).imag()});
  return j;
}

}  // namespace qsl2r
