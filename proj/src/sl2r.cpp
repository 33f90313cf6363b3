#include "qsl2r/sl2r.hpp"

#include <cmath>

namespace qsl2r {

namespace {

Scalar qc(int k = 1) { return Scalar::qpow(QExp::c(k)); }
Scalar ang_c(int shift) { return qang(QExp::c() + QExp::integer(shift)); }

void expect_zero(CheckReport& rep, const std::string& label, const NCPoly& residual) {
  if (residual.is_zero()) rep.pass(label);
  else rep.fail(label + ": residual " + residual.str());
}

}  // namespace

SpectralElements build_spectral_elements(const PresentationPtr& p) {
  NCPoly X = p->gen("X"), Y = p->gen("Y"), Z = p->gen("Z");
  Scalar i = Scalar::i(), q = q_scalar(1), qi = q_scalar(-1), t = t_scalar();
  NCPoly one = p->one();
  SpectralElements s;
  s.Tplus = i * qc() * X - (qi + q) * Z + i * qc(-1) * Y - t * one;
  s.A = i * qi * X + (qc() - qc(-1)) * Z - i * q * Y;
  s.Tminus = -i * qc(-1) * X - (qi + q) * Z - i * qc() * Y - t * one;
  return s;
}

NCPoly shift_c(const NCPoly& x, int k) {
  Exps m{};
  m[static_cast<int>(Var::u)] = 2 * k;
  return x.scale_var(Var::z, m);
}

NCPoly casimir(const PresentationPtr& p) {
  Scalar i = Scalar::i(), q = q_scalar(1), qi = q_scalar(-1);
  return i * qi * p->gen("X") + (q - qi) * i * (p->gen("Z") * p->gen("B")) - i * q * p->gen("Y");
}

CheckReport verify_xyzt_inversion(const PresentationPtr& p) {
  CheckReport rep;
  SpectralElements s = build_spectral_elements(p);
  Scalar i = Scalar::i(), q = q_scalar(1), qi = q_scalar(-1), t = t_scalar();
  Scalar am = ang_c(-1), a0 = ang_c(0), ap = ang_c(1);
  Scalar inv = (am * a0 * ap).inverse();
  NCPoly v1 = am * (s.Tplus + t * p->one()), v2 = a0 * s.A, v3 = ap * (s.Tminus + t * p->one());
  NCPoly X = inv * (-i * qc() * q * v1 - i * (qi + q) * v2 + i * qc(-1) * q * v3);
  NCPoly Z = inv * (-v1 + (qc() - qc(-1)) * v2 - v3);
  NCPoly Y = inv * (-i * qc(-1) * qi * v1 + i * (qi + q) * v2 + i * qc() * qi * v3);
  expect_zero(rep, "X row of the inverse matrix", X - p->gen("X"));
  expect_zero(rep, "Z row of the inverse matrix", Z - p->gen("Z"));
  expect_zero(rep, "Y row of the inverse matrix", Y - p->gen("Y"));
  bool units = true;
  for (double qv : {0.1, 0.3, 0.5, 0.7, 0.95}) {
    Assignment as;
    as.q = qv;
    as.c = 0.37 - qv;
    for (const Scalar& d : {am, a0, ap})
      if (evaluate(d, as).real() < 2.0 - 1e-12) units = false;
  }
  if (units) rep.pass("<c-1>, <c>, <c+1> >= 2 at sample assignments");
  else rep.fail("a denominator <c+k> dropped below 2");
  return rep;
}

CheckReport verify_att_relations(const PresentationPtr& p) {
  CheckReport rep;
  SpectralElements s = build_spectral_elements(p);
  Scalar q = q_scalar(1), qi = q_scalar(-1), t = t_scalar();
  Scalar va = Scalar::var(Var::va), vai = Scalar::var(Var::va, -1);
  NCPoly one = p->one(), A = s.A;
  // (q^{c-a+s} + q^{-c+a-s} - A)(q^{c+a+s} + q^{-c-a-s} + A) with s = +-1.
  auto factored = [&](const Scalar& qs, const Scalar& qsi) {
    NCPoly f1 = (qc() * vai * qs + qc(-1) * va * qsi) * one - A;
    NCPoly f2 = (qc() * va * qs + qc(-1) * vai * qsi) * one + A;
    return f1 * f2;
  };
  auto expanded = [&](const Scalar& qs, const Scalar& qsi) {
    Scalar m = qc(-1) * qsi, pcoef = qc() * qs;
    return -(A * A) + t * (m - pcoef) * A + (t * t + (m + pcoef) * (m + pcoef)) * one;
  };
  NCPoly lhs1 = shift_c(s.Tminus, 2) * s.Tplus;
  expect_zero(rep, "T-_{c+2} T+_c factored form", lhs1 - factored(q, qi));
  expect_zero(rep, "T-_{c+2} T+_c expanded form", lhs1 - expanded(q, qi));
  expect_zero(rep, "A_{c+2} T+_c = T+_c A_c", shift_c(A, 2) * s.Tplus - s.Tplus * A);
  expect_zero(rep, "A_{c-2} T-_c = T-_c A_c", shift_c(A, -2) * s.Tminus - s.Tminus * A);
  NCPoly lhs4 = shift_c(s.Tplus, -2) * s.Tminus;
  expect_zero(rep, "T+_{c-2} T-_c factored form", lhs4 - factored(qi, q));
  expect_zero(rep, "T+_{c-2} T-_c expanded form", lhs4 - expanded(qi, q));
  expect_zero(rep, "star(T+) = T-", s.Tplus.star() - s.Tminus);
  return rep;
}

CheckReport verify_casimir(const PresentationPtr& p) {
  CheckReport rep;
  NCPoly W = casimir(p);
  for (const std::string g : {"X", "Y", "Z", "B"}) expect_zero(rep, "[Omega_t, " + g + "] = 0", commutator(W, p->gen(g)));
  expect_zero(rep, "star(Omega_t) = Omega_t", W.star() - W);
  SpectralElements s = build_spectral_elements(p);
  Scalar i = Scalar::i(), q = q_scalar(1), qi = q_scalar(-1);
  NCPoly shifted = p->gen("B") + i * qnum(QExp::c()) * p->one();
  expect_zero(rep, "Omega_t = A_c + (q - q^-1) i Z (B + i[c])", W - s.A - (q - qi) * i * (p->gen("Z") * shifted));
  return rep;
}

CheckReport verify_bxy(const PresentationPtr& p) {
  CheckReport rep;
  Scalar q = q_scalar(1), qi = q_scalar(-1);
  NCPoly B = p->gen("B"), X = p->gen("X"), Y = p->gen("Y");
  expect_zero(rep, "B(qY - q^-1 X) = (q^-1 Y - qX)B", B * (q * Y - qi * X) - (qi * Y - q * X) * B);
  return rep;
}

}  // namespace qsl2r
