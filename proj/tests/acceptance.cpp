// Acceptance run: one PASS/FAIL line per criterion; exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qsl2r/modules.hpp"
#include "qsl2r/reps.hpp"
#include "qsl2r/suite.hpp"

using namespace qsl2r;

namespace {

// Pinned tolerances.
constexpr double kVerifySeconds = 60;
constexpr double kSpectrumTol = 1e-8;
constexpr double kFixtureTol = 1e-12;
constexpr double kSphericalTol = 1e-9;
constexpr double kModuleTol = 1e-10;
constexpr double kClassTol = 1e-9;
constexpr double kFiniteTol = 1e-10;
constexpr double kBoundedTol = 1e-9;

const std::complex<double> I(0, 1);

struct Outcome {
  bool ok = true;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Outcome criterion_verify() {
  auto t0 = std::chrono::steady_clock::now();
  VerifyReport r = run_verify(VerifyOptions{});
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::set<std::string> have;
  for (const SuiteSection& s : r.sections) have.insert(s.name);
  Outcome o;
  for (const char* need : {"confluence", "star", "casimir", "att relations", "xyzt inversion", "orthogonality"})
    if (!have.count(need)) {
      o.ok = false;
      o.detail = std::string("missing section ") + need;
      return o;
    }
  o.ok = r.ok && secs < kVerifySeconds;
  o.detail = r.ok ? std::to_string(r.sections.size()) + " sections exact, " + fmt(secs) + " s"
                  : "first failure: " + r.first_failure;
  return o;
}

Outcome criterion_spectrum() {
  Outcome o;
  for (int n = 0; n <= 8; ++n)
    if (!spectrum_exact(n).ok) return {false, "exact identity fails at n = " + std::to_string(n)};
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> qd(0.05, 0.95), ad(-3, 3);
  double dense = 0, graded = 0;
  for (int i = 0; i < 10; ++i) {
    Assignment as;
    as.q = qd(rng);
    as.a = ad(rng);
    for (int n = 0; n <= 40; ++n) {
      std::vector<LabelledEigenvalue> ev;
      try {
        ev = spectrum_numeric(n, as);
      } catch (const SpectralMismatch& e) {
        return {false, e.what()};
      }
      double top = 1;
      for (const auto& e : ev) top = std::max(top, std::abs(e.expected));
      for (const auto& e : ev) dense = std::max(dense, e.residual / top);
      for (const auto& e : spectrum_graded(n, as))
        graded = std::max(graded, e.residual / std::max(std::abs(e.expected), 1e-280));
    }
  }
  o.ok = dense <= kSpectrumTol && graded <= kSpectrumTol;
  o.detail = "exact n<=8; n<=40: dense " + fmt(dense) + " (rel. spectral radius), graded " + fmt(graded) +
             " (rel. per eigenvalue)";
  return o;
}

double qn(double q, double x) { return (std::pow(q, -x) - std::pow(q, x)) / (1 / q - q); }

Outcome criterion_fixture() {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> qd(0.05, 0.95), ad(-3, 3);
  double mat = 0, sph = 0;
  for (int i = 0; i < 5; ++i) {
    Assignment as;
    as.q = qd(rng);
    as.a = ad(rng);
    const double q = as.q, a = as.a, s = std::sqrt(q + 1 / q), t = std::pow(q, a) - std::pow(q, -a);
    CMatrix want(3, 3);
    want << q * q * qn(q, a), I * std::sqrt(q) * s, 0.0, -I * std::sqrt(q) * s, qn(q, a), I / std::sqrt(q) * s, 0.0,
        -I / std::sqrt(q) * s, qn(q, a) / (q * q);
    mat = std::max(mat, (ib_matrix(2, as) - want).cwiseAbs().maxCoeff());
    CVector xi(3);
    xi << 1 / std::sqrt(q), I * t / s, std::sqrt(q);
    CVector v = spherical_vector(2, as).v;
    // Distance of the unit vector v from the line through xi.
    CVector u = xi.normalized();
    sph = std::max(sph, (v - u * u.dot(v)).norm() / v.norm());
  }
  return {mat <= kFixtureTol && sph <= kSphericalTol,
          "pi_1(iB_t) entrywise " + fmt(mat) + ", spherical vector off-line " + fmt(sph)};
}

Outcome criterion_modules() {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> qd(0.05, 0.95), ad(-3, 3), ld(-6, 6), bd(-3, 3);
  double rel = 0, gram = 0, off = 0, cas = 0;
  for (int i = 0; i < 20; ++i) {
    ModuleParams p{qd(rng), ad(rng), ld(rng), bd(rng)};
    ModuleWindow w = canonical_module(p, 12);
    GramReport g = gram_oracle(w);
    rel = std::max(rel, relation_residual(w));
    gram = std::max(gram, g.diag_residual);
    off = std::max(off, g.offdiag_residual);
    cas = std::max(cas, casimir_residual(w));
  }
  return {rel <= kModuleTol && gram <= kModuleTol && off <= kModuleTol && cas <= kModuleTol,
          "W=12: relations " + fmt(rel) + ", Gram diag " + fmt(gram) + " offdiag " + fmt(off) + ", Casimir " +
              fmt(cas)};
}

Outcome criterion_classification() {
  const double q = 0.5;
  auto ang_ = [&](double x) { return ang(q, x); };
  std::ostringstream bad;
  for (double a : {0.0, 0.25, 0.5}) {
    std::vector<ClassEntry> es = classify(q, a);
    // One-dimensional families per sector.
    std::map<std::string, std::set<std::string>> one_dim;
    for (const ClassEntry& e : es)
      if (e.family == Family::Trivial || e.family == Family::OneDimC) one_dim[e.sector].insert(to_string(e.family));
    std::set<std::string> even_want = {"I"}, odd_want;
    if (a == 0.0) even_want.insert("C");
    if (a == 0.5) odd_want.insert("C");
    if (one_dim["even"] != even_want || one_dim["odd"] != odd_want) bad << "a=" << a << ": one-dim entries; ";
    // Continuous ranges: even (-<2a-1>, <1>), odd (-<2a>, <0>).
    for (const ClassEntry& e : es) {
      if (!e.range) continue;
      double lo = e.sector == "even" ? -ang_(2 * a - 1) : -ang_(2 * a);
      double hi = e.sector == "even" ? ang_(1) : ang_(0);
      if (std::abs(e.range->lo - lo) > kClassTol || std::abs(e.range->hi - hi) > kClassTol)
        bad << "a=" << a << ": " << e.label() << " range; ";
    }
    // First four members of each discrete family.
    for (Family f : {Family::Dplus, Family::Dminus, Family::Eplus, Family::Eminus}) {
      std::vector<const ClassEntry*> m;
      for (const ClassEntry& e : es)
        if (e.family == f) m.push_back(&e);
      std::sort(m.begin(), m.end(), [](auto x, auto y) { return x->n < y->n; });
      if (m.size() < 4) {
        bad << "a=" << a << ": fewer than four " << to_string(f) << "; ";
        continue;
      }
      for (int k = 0; k < 4; ++k) {
        const int n = m[k]->n;
        double want = f == Family::Dplus || f == Family::Dminus ? ang_(n - 1)
                      : f == Family::Eplus                      ? -ang_(2 * a + n - 1)
                                                                : -ang_(-2 * a + n - 1);
        if (k > 0 && n != m[k - 1]->n + 1) bad << "a=" << a << ": " << to_string(f) << " not consecutive; ";
        if (std::abs(*m[k]->lambda - want) > kClassTol) bad << m[k]->label() << " lambda; ";
      }
    }
  }
  std::string b = bad.str();
  return {b.empty(), b.empty() ? "a in {0, 1/4, 1/2}: one-dim entries, range endpoints, first four D/E" : b};
}

Outcome criterion_unitarity() {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> qd(0.1, 0.9), ad(-3, 3), bd(-4, 4);
  long grid_points = 0, grid_bad = 0, special_points = 0, special_bad = 0, unitary = 0;
  for (int i = 0; i < 20; ++i) {
    const double q = qd(rng), a = ad(rng);
    const double b = i % 2 ? a + std::round(bd(rng)) : bd(rng);
    auto check = [&](double lambda, long& points, long& badc) {
      ModuleParams p{q, a, lambda, b};
      UnitarityVerdict cf = unitarity_closed_form(p), sc = unitarity_sign_scan(p);
      ++points;
      unitary += cf.unitary;
      if (!same_verdict(cf, sc)) ++badc;
    };
    for (int k = 0; k < 400; ++k) check(-8 + 16.0 * k / 399, grid_points, grid_bad);
    // Truncation values, where the discrete series sit.
    for (int k = -6; k <= 6; ++k) {
      const double c = b + 2 * k;
      for (double x : {a - c + 1, a - c - 1, a + c + 1, a + c - 1})
        for (double s : {1.0, -1.0}) check(s * ang(q, x), special_points, special_bad);
    }
  }
  return {grid_bad == 0 && special_bad == 0,
          std::to_string(grid_bad) + " disagreements on " + std::to_string(grid_points) + " grid points, " +
              std::to_string(special_bad) + " on " + std::to_string(special_points) + " truncation values (" +
              std::to_string(unitary) + " unitary)"};
}

Outcome criterion_finite() {
  double worst = 0;
  std::ostringstream bad;
  for (double a : {0.0, 0.25, 0.5, 1.5, 0.3})
    for (int N = 1; N <= 16; ++N) {
      std::vector<FiniteDimModule> ms = finite_dim_classify(0.5, a, N);
      if (ms.size() != 2) {
        bad << "a=" << a << " N=" << N << ": " << ms.size() << " modules; ";
        continue;
      }
      for (int s = 0; s < 2; ++s) {
        const FiniteDimModule& m = ms[s];
        const double want = (s == 0 ? 1 : -1) * ang(0.5, N);
        const double lam_err = std::abs(*m.entry.lambda - want) / std::abs(want);
        for (double r : {m.top_residual, m.bottom_residual, m.casimir, lam_err}) worst = std::max(worst, r);
        if (m.window.size() != N) bad << "a=" << a << " N=" << N << ": dimension; ";
      }
      const bool half = std::abs(2 * a - std::round(2 * a)) < 1e-12;
      if (ms[1].entry.admissible != half) bad << "a=" << a << ": V- admissibility flag; ";
      if (!ms[0].entry.admissible) bad << "a=" << a << ": V+ admissibility flag; ";
    }
  std::string b = bad.str();
  return {b.empty() && worst <= kFiniteTol,
          b.empty() ? "N<=16, 5 values of a: truncation/Casimir " + fmt(worst) + ", admissibility flags match" : b};
}

Outcome criterion_bounded() {
  std::mt19937 rng(8);
  // Coefficient tails converge like q^{2|k|}; the sample keeps W = 10
  // converged to below the tolerance.
  std::uniform_real_distribution<double> qd(0.1, 0.7), ad(-3, 3), ld(-6, 6), bd(-3, 3);
  std::vector<ModuleParams> ps = {{0.5, 0.3, 0.7, 0.1}};
  for (int i = 0; i < 20; ++i) ps.push_back({qd(rng), ad(rng), ld(rng), bd(rng)});
  double worst = 0, largest = 0;
  for (const ModuleParams& p : ps)
    for (int sign : {1, -1}) {
      const double s10 = coefficient_sup(admissible_family(p, sign, 10));
      const double s40 = coefficient_sup(admissible_family(p, sign, 40));
      if (!std::isfinite(s10) || !std::isfinite(s40)) return {false, "non-finite coefficient sup"};
      worst = std::max(worst, std::abs(s40 - s10));
      largest = std::max(largest, s40);
    }
  return {worst < kBoundedTol,
          std::to_string(2 * ps.size()) + " windows: |sup_40 - sup_10| <= " + fmt(worst) + " (sup up to " +
              fmt(largest) + ")"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"exact verification suite", criterion_verify},
      {"spectrum of iB_t", criterion_spectrum},
      {"fixture match", criterion_fixture},
      {"module consistency", criterion_modules},
      {"classification reproduction", criterion_classification},
      {"unitarity cross-validation", criterion_unitarity},
      {"finite-dimensional modules", criterion_finite},
      {"boundedness", criterion_bounded},
  };
  int failed = 0, k = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.ok) ++failed;
    std::printf("[%s] %d. %s: %s\n", o.ok ? "PASS" : "FAIL", ++k, name.c_str(), o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
