#include <gtest/gtest.h>

#include "qsl2r/sl2r.hpp"

using namespace qsl2r;

namespace {

const PresentationPtr& pod() {
  static PresentationPtr p = make_podles();
  return p;
}
const PresentationPtr& qs() {
  static PresentationPtr p = make_qsl2r();
  return p;
}

void expect_all_ok(const CheckReport& r) {
  EXPECT_TRUE(r.ok);
  for (const auto& l : r.lines) EXPECT_EQ(l.rfind("ok", 0), 0u) << l;
}

// Coefficientwise float comparison of two polynomials.
double float_distance(const NCPoly& a, const NCPoly& b, const Assignment& as) {
  double worst = 0;
  NCPoly d = a - b;
  for (const auto& [w, c] : d.terms()) worst = std::max(worst, std::abs(evaluate(c, as)));
  return worst;
}

}  // namespace

TEST(Sl2r, SpectralElementCoefficients) {
  SpectralElements s = build_spectral_elements(pod());
  Word x{static_cast<uint8_t>(pod()->generator_index("X"))};
  EXPECT_EQ(s.A.coeff(x), Scalar::i() * q_scalar(-1));
  EXPECT_EQ(s.Tplus.coeff(x), Scalar::i() * Scalar::qpow(QExp::c()));
  EXPECT_EQ(s.Tminus.coeff({}), -t_scalar());
  EXPECT_EQ(s.Tplus.star(), s.Tminus);
}

TEST(Sl2r, ShiftSubstitution) {
  NCPoly z = Scalar::qpow(QExp::c()) * pod()->gen("Z");
  EXPECT_EQ(shift_c(z, 2), q_scalar(2) * z);
  EXPECT_EQ(shift_c(shift_c(z, 2), -2), z);
}

TEST(Sl2r, XYZTInversion) { expect_all_ok(verify_xyzt_inversion(pod())); }

TEST(Sl2r, ATTRelations) {
  expect_all_ok(verify_att_relations(pod()));
  // The same identities hold inside QSL2R.
  expect_all_ok(verify_att_relations(qs()));
}

TEST(Sl2r, ATTFourthIdentityNumerically) {
  SpectralElements s = build_spectral_elements(pod());
  Assignment as;
  as.q = 0.5;
  as.a = 0;
  as.c = 0;
  NCPoly lhs = shift_c(s.Tplus, -2) * s.Tminus;
  NCPoly A = s.A, one = pod()->one();
  // a = c = 0: (q + q^-1 - A)(q^-1 + q + A) at q = 1/2 with exact Scalars only via A.
  Scalar k = Scalar::rational(5, 2);
  NCPoly rhs = (k * one - A) * (k * one + A);
  EXPECT_LT(float_distance(lhs, rhs, as), 1e-12);
  // Off the diagonal the parameters matter.
  as.c = 0.3;
  EXPECT_GT(float_distance(lhs, rhs, as), 1e-3);
}

TEST(Sl2r, CasimirCentralSelfAdjoint) {
  expect_all_ok(verify_casimir(qs()));
  NCPoly W = casimir(qs());
  EXPECT_TRUE(commutator(W, qs()->gen("B")).is_zero());
  EXPECT_EQ(W.star(), W);
  EXPECT_FALSE(commutator(qs()->gen("X"), qs()->gen("B")).is_zero());
}

TEST(Sl2r, BXYCommutation) { expect_all_ok(verify_bxy(qs())); }

TEST(Sl2r, CorruptedRelationIsCaught) {
  auto p = make_qsl2r();
  Word bz{static_cast<uint8_t>(p->generator_index("B")), static_cast<uint8_t>(p->generator_index("Z"))};
  Word zb{bz[1], bz[0]};
  p->replace_rule(bz, word_term(zb));
  EXPECT_FALSE(verify_casimir(p).ok);
}
