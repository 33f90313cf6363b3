#include <gtest/gtest.h>

#include <random>

#include "qsl2r/scalar.hpp"

using namespace qsl2r;

namespace {

LPoly random_poly(std::mt19937& rng, int max_terms, std::initializer_list<Var> vars) {
  std::uniform_int_distribution<int> nterms(1, max_terms), coef(-3, 3), ex(-1, 2);
  LPoly p;
  int n = nterms(rng);
  for (int t = 0; t < n; ++t) {
    Exps e{};
    for (Var v : vars) e[static_cast<int>(v)] = ex(rng);
    p.add_term(e, GaussQ(coef(rng), coef(rng)));
  }
  if (p.is_zero()) p = LPoly(GaussQ(1));
  return p;
}

Scalar random_scalar(std::mt19937& rng) {
  auto vars = {Var::u, Var::va, Var::z, Var::L};
  LPoly n = random_poly(rng, 3, vars);
  LPoly d = random_poly(rng, 2, vars);
  return Scalar::fraction(n, d);
}

double rel_err(FloatScalar x, FloatScalar y) {
  return std::abs(x - y) / std::max(1.0, std::max(std::abs(x), std::abs(y)));
}

}  // namespace

TEST(Scalar, QNumberValues) {
  EXPECT_TRUE(qnum(QExp::integer(0)).is_zero());
  EXPECT_TRUE(qnum(QExp::integer(1)).is_one());
  Assignment as{0.5, 0, 0, 0, 0};
  EXPECT_NEAR(evaluate(qnum(QExp::integer(2)), as).real(), 2.5, 1e-15);
  EXPECT_EQ(qang(QExp::integer(0)), Scalar(2));
  Assignment bs{0.6, 0.25, 0, 0, 0};
  // 0.6^{1/4} - 0.6^{-1/4} evaluated independently.
  EXPECT_NEAR(evaluate(qbrack(QExp::a()), bs).real(), -0.25610762967410594, 1e-14);
  Assignment cs{0.5, 0, 0, 1, 0};
  EXPECT_NEAR(evaluate(qang(QExp::c()), cs).real(), 2.5, 1e-15);
  EXPECT_EQ(qang(QExp::integer(1)), q_scalar(1) + q_scalar(-1));
}

TEST(Scalar, QNumberSymmetries) {
  for (QExp c : {QExp::integer(3), QExp::a(), QExp::a() + QExp::halves(1), QExp::b(2) - QExp::c()}) {
    EXPECT_EQ(qnum(-c), -qnum(c));
    EXPECT_EQ(qang(-c), qang(c));
    EXPECT_EQ(qbrack(c), -(q_scalar(-1) - q_scalar(1)) * qnum(c));
    EXPECT_EQ(qang(c) * qang(c) - qbrack(c) * qbrack(c), Scalar(4));
  }
}

TEST(Scalar, CanonicalFormCancels) {
  Scalar u = Scalar::var(Var::u);
  Scalar x = (u * u - Scalar(1)) / (u - Scalar(1));
  EXPECT_EQ(x, u + Scalar(1));
  EXPECT_TRUE(x.is_polynomial());
  Scalar y = Scalar(1) / (u * u + Scalar(1)) + Scalar(1) / (u * u - Scalar(1));
  Scalar expect = Scalar(2) * u * u / (u * u * u * u - Scalar(1));
  EXPECT_EQ(y, expect);
  EXPECT_EQ(y.den().lead_coeff(), GaussQ(1));
}

TEST(Scalar, MultivariateGcd) {
  Scalar u = Scalar::var(Var::u), z = Scalar::var(Var::z), va = Scalar::var(Var::va);
  Scalar f = u * z + va * Scalar::i() - Scalar(3);
  Scalar g = z * z * va + u;
  Scalar h = u * u * z + Scalar(2) * va;
  EXPECT_EQ((f * g) / (f * h), g / h);
  LPoly gg = poly_gcd((f * g).num(), (f * h).num());
  EXPECT_EQ(Scalar::fraction(f.num(), gg).num().is_constant(), true);
}

TEST(Scalar, RenderingFormat) {
  Scalar u = Scalar::var(Var::u), va = Scalar::var(Var::va);
  Scalar s = (Scalar(GaussQ(1, 1)) * u * u / va + Scalar(2)) / (u * u * u * u - Scalar(1));
  EXPECT_EQ(s.str(), "((1+i)*u^2*va^-1 + 2)/(u^4 - 1)");
  EXPECT_EQ(Scalar(0).str(), "0");
  EXPECT_EQ((-Scalar::i() * u).str(), "-i*u");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(Scalar, PoleErrors) {
  Scalar u = Scalar::var(Var::u);
  EXPECT_THROW(Scalar(1) / (u * u - u * u), PoleError);
  Scalar s = Scalar(1) / (u * u - Scalar::rational(1, 2));
  EXPECT_THROW(evaluate(s, Assignment{0.5, 0, 0, 0, 0}), PoleError);
  EXPECT_EQ(evaluate(Scalar(1), Assignment{}), FloatScalar(1.0));
}

TEST(Scalar, Conjugation) {
  std::mt19937 rng(7);
  for (int k = 0; k < 50; ++k) {
    Scalar s = random_scalar(rng), t = random_scalar(rng);
    EXPECT_EQ(s.conj().conj(), s);
    EXPECT_EQ((s * t).conj(), s.conj() * t.conj());
    Assignment as{0.37, 0.3, 0.1, -0.7, 1.3};
    EXPECT_LT(std::abs(evaluate(s.conj(), as) - std::conj(evaluate(s, as))), 1e-9 * (1 + std::abs(evaluate(s, as))));
  }
}

TEST(Scalar, FieldAxioms) {
  std::mt19937 rng(11);
  for (int k = 0; k < 40; ++k) {
    Scalar a = random_scalar(rng), b = random_scalar(rng), c = random_scalar(rng);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ(a * b, b * a);
    EXPECT_TRUE((a - a).is_zero());
    if (!a.is_zero()) EXPECT_TRUE((a * a.inverse()).is_one());
  }
}

TEST(Scalar, EvaluationIsRingHomomorphism) {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> uq(0.1, 0.9), ur(-1.5, 1.5);
  std::vector<Assignment> pts;
  for (int k = 0; k < 5; ++k) pts.push_back({uq(rng), ur(rng), ur(rng), ur(rng), ur(rng)});
  int checked = 0;
  for (int k = 0; k < 200; ++k) {
    Scalar s = random_scalar(rng), t = random_scalar(rng);
    Scalar st = s * t, sp = s + t;
    for (const auto& as : pts) {
      FloatScalar es, et;
      try {
        es = evaluate(s, as);
        et = evaluate(t, as);
      } catch (const PoleError&) {
        continue;
      }
      EXPECT_LT(rel_err(evaluate(st, as), es * et), 1e-12);
      EXPECT_LT(rel_err(evaluate(sp, as), es + et), 1e-12);
      ++checked;
    }
  }
  EXPECT_GT(checked, 900);
}

TEST(Scalar, ShiftSubstitution) {
  // z -> q^2 z maps <c> to <c+2>.
  Exps q2{};
  q2[static_cast<int>(Var::u)] = 4;
  EXPECT_EQ(qang(QExp::c()).scale_var(Var::z, q2), qang(QExp::c() + QExp::integer(2)));
}

TEST(Scalar, ParseExponent) {
  QExp e = parse_qexp("2a-3/2");
  EXPECT_EQ(e.ka, 2);
  EXPECT_EQ(e.half, -3);
  QExp f = parse_qexp("-c+1");
  EXPECT_EQ(f.kc, -1);
  EXPECT_EQ(f.half, 2);
  EXPECT_THROW(parse_qexp("1/3"), std::invalid_argument);
  EXPECT_THROW(parse_qexp("x"), std::invalid_argument);
}
