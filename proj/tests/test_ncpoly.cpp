#include <gtest/gtest.h>

#include <future>
#include <random>

#include "qsl2r/ncpoly.hpp"

using namespace qsl2r;

namespace {

struct Fixture {
  PresentationPtr uq = make_uqsu2();
  PresentationPtr oq = make_oqsu2();
  PresentationPtr pod = make_podles();
  PresentationPtr qs = make_qsl2r();
};

const Fixture& fx() {
  static Fixture f;
  return f;
}

Scalar random_coeff(std::mt19937& rng) {
  std::uniform_int_distribution<int> small(-3, 3), pw(-2, 2);
  Scalar c = Scalar(GaussQ(mpq_class(small(rng)), mpq_class(small(rng))));
  return c * Scalar::var(Var::u, pw(rng)) * Scalar::var(Var::va, pw(rng) % 2);
}

NCPoly random_poly(const PresentationPtr& p, std::mt19937& rng, int max_len, int terms = 3) {
  std::vector<Word> words = p->normal_words(max_len);
  std::uniform_int_distribution<size_t> pick(0, words.size() - 1);
  Terms t;
  for (int k = 0; k < terms; ++k) add_term(t, words[pick(rng)], random_coeff(rng));
  return NCPoly(p, t);
}

}  // namespace

TEST(NCPoly, UqRelationsNormalForm) {
  const auto& uq = fx().uq;
  Scalar q = q_scalar(1), qi = q_scalar(-1);
  NCPoly e = uq->gen("e"), f = uq->gen("f"), k = uq->gen("k"), ki = uq->gen("kinv");
  EXPECT_EQ(e * f, f * e + (q - qi).inverse() * (k - ki));
  EXPECT_EQ(e * k, qi * qi * (k * e));
  EXPECT_EQ(k * ki, uq->one());
  EXPECT_EQ(ki * k, uq->one());
  EXPECT_EQ(e * f - f * e, uq->parse("(u^2 - u^-2)^-1*(k - kinv)"));
}

TEST(NCPoly, QSL2RRelationsNormalForm) {
  const auto& qs = fx().qs;
  NCPoly B = qs->gen("B"), X = qs->gen("X"), Y = qs->gen("Y"), Z = qs->gen("Z");
  EXPECT_EQ(B * Z, Z * B - X - Y);
  Scalar q = q_scalar(1), qi = q_scalar(-1), t = t_scalar();
  EXPECT_EQ(B * X, q * q * (X * B) + q * ((q + qi) * Z + t * qs->one()));
  EXPECT_EQ(B * Y, qi * qi * (Y * B) + qi * ((qi + q) * Z + t * qs->one()));
}

TEST(NCPoly, GeneratorsAreNormal) {
  for (const auto& p : {fx().uq, fx().oq, fx().pod, fx().qs})
    for (const auto& g : p->generators()) {
      NCPoly x = p->gen(g);
      EXPECT_EQ(x.terms().size(), 1u);
      EXPECT_EQ(p->make(x.terms()), x);
      EXPECT_EQ(p->one() * x, x);
    }
}

TEST(NCPoly, StarValues) {
  EXPECT_EQ(fx().qs->gen("X").star(), fx().qs->gen("Y"));
  EXPECT_EQ(fx().qs->gen("B").star(), -fx().qs->gen("B"));
  EXPECT_EQ(fx().uq->gen("e").star(), fx().uq->gen("f") * fx().uq->gen("k"));
  EXPECT_EQ(fx().oq->gen("beta").star(), -q_scalar(1) * fx().oq->gen("gamma"));
}

TEST(NCPoly, StarIsConjugateLinearAntiInvolution) {
  std::mt19937 rng(11);
  for (const auto& p : {fx().uq, fx().oq, fx().pod, fx().qs})
    for (int n = 0; n < 100; ++n) {
      NCPoly a = random_poly(p, rng, 3), b = random_poly(p, rng, 3);
      ASSERT_EQ(a.star().star(), a) << p->name();
      ASSERT_EQ((a * b).star(), b.star() * a.star()) << p->name();
      ASSERT_EQ((Scalar::i() * a).star(), -Scalar::i() * a.star()) << p->name();
    }
}

TEST(NCPoly, ConfluenceOfBundledPresentations) {
  for (const auto& p : {fx().uq, fx().oq, fx().pod, fx().qs}) {
    ConfluenceReport r = confluence_check(*p);
    EXPECT_TRUE(r.ok) << p->name() << ": " << r.failure;
    EXPECT_FALSE(r.checked.empty());
    std::string why;
    EXPECT_TRUE(rules_decreasing(*p, &why)) << why;
  }
  ConfluenceReport r = confluence_check(*fx().uq);
  EXPECT_NE(std::find(r.checked.begin(), r.checked.end(), "e*k*f"), r.checked.end());
}

TEST(NCPoly, CorruptedRuleFailsConfluence) {
  auto p = make_podles();
  Word xy{static_cast<uint8_t>(p->generator_index("X")), static_cast<uint8_t>(p->generator_index("Y"))};
  p->replace_rule(xy, word_term(Word{}));
  ConfluenceReport r = confluence_check(*p);
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.failure.find("overlap"), std::string::npos);
}

TEST(NCPoly, NonTerminatingRulesAreDiagnosed) {
  auto p = std::make_shared<Presentation>("LOOP", std::vector<std::string>{"a", "b"}, std::vector<int>{1, 1});
  p->add_rule({1, 0}, word_term({0, 1}));
  p->add_rule({0, 1}, word_term({1, 0}));
  std::string why;
  EXPECT_FALSE(rules_decreasing(*p, &why));
  EXPECT_THROW(p->reduce_word({1, 0}), std::runtime_error);
}

TEST(NCPoly, NormalWordCounts) {
  // PODLES basis X^m Z^k, Y^m Z^k: 1 + 2*(1+2+...) pattern.
  EXPECT_EQ(fx().pod->normal_words(4).size(), 25u);
  EXPECT_EQ(fx().pod->normal_words(1).size(), 4u);
  // PBW monomials Y^i Z^j X^k B^m with no XY or YX factor.
  EXPECT_EQ(fx().qs->normal_words(1).size(), 5u);
}

TEST(NCPoly, CoproductValues) {
  const auto& uq = fx().uq;
  NCPoly k = uq->gen("k");
  TensorTerms dk = k.coproduct();
  ASSERT_EQ(dk.size(), 1u);
  Word wk{static_cast<uint8_t>(uq->generator_index("k"))};
  EXPECT_EQ(dk.begin()->first, TensorKey(wk, wk));
  TensorTerms d1 = uq->one().coproduct();
  ASSERT_EQ(d1.size(), 1u);
  EXPECT_EQ(d1.begin()->first, TensorKey({}, {}));
  EXPECT_THROW(fx().pod->gen("X").coproduct(), std::logic_error);
}

TEST(NCPoly, CoproductMultiplicativeAndCounital) {
  std::mt19937 rng(5);
  for (const auto& p : {fx().uq, fx().oq})
    for (int n = 0; n < 20; ++n) {
      NCPoly a = random_poly(p, rng, 2), b = random_poly(p, rng, 2);
      EXPECT_EQ((a * b).coproduct(), tensor_multiply(*p, a.coproduct(), b.coproduct())) << p->name();
      NCPoly c = random_poly(p, rng, 4);
      Terms left, right;
      for (const auto& [key, s] : c.coproduct()) {
        add_terms(left, p->reduce_word(key.second), s * counit_of(*p, word_term(key.first)));
        add_terms(right, p->reduce_word(key.first), s * counit_of(*p, word_term(key.second)));
      }
      EXPECT_EQ(left, c.terms());
      EXPECT_EQ(right, c.terms());
    }
}

TEST(NCPoly, HopfStructureVerified) {
  for (const auto& p : {fx().uq, fx().oq, fx().pod, fx().qs}) {
    CheckReport r = verify_hopf_structure(p);
    EXPECT_TRUE(r.ok) << p->name();
  }
  const auto& oq = fx().oq;
  EXPECT_EQ(oq->gen("beta").antipode(), -q_scalar(-1) * oq->gen("beta"));
  EXPECT_EQ(oq->gen("gamma").antipode(), -q_scalar(1) * oq->gen("gamma"));
  const auto& uq = fx().uq;
  EXPECT_EQ(uq->gen("e").antipode(), -(uq->gen("kinv") * uq->gen("e")));
  EXPECT_EQ(uq->gen("f").antipode(), -(uq->gen("f") * uq->gen("k")));
}

TEST(NCPoly, DumpLoadRoundTrip) {
  for (const auto& p : {fx().uq, fx().oq, fx().pod, fx().qs}) {
    std::string text = p->dump();
    auto back = Presentation::load(text);
    EXPECT_EQ(back->dump(), text);
    EXPECT_EQ(back->generators(), p->generators());
    EXPECT_EQ(back->rules().size(), p->rules().size());
  }
  EXPECT_THROW(Presentation::load("name BAD\ngenerators a\nweights 1\n[rules]\na -> \n"), std::invalid_argument);
}

TEST(NCPoly, ParserErrors) {
  const auto& uq = fx().uq;
  EXPECT_THROW(uq->parse("e/f"), std::invalid_argument);
  EXPECT_THROW(uq->parse("e^-1"), std::invalid_argument);
  EXPECT_THROW(uq->parse("foo"), std::invalid_argument);
  EXPECT_EQ(uq->parse("2 e f"), Scalar(2) * (uq->gen("e") * uq->gen("f")));
}

TEST(Pairing, SeedValues) {
  Pairing P(fx().oq, fx().uq);
  const auto& oq = fx().oq;
  const auto& uq = fx().uq;
  EXPECT_EQ(P.pair(oq->gen("alpha"), uq->gen("k")), q_scalar(1));
  EXPECT_EQ(P.pair(oq->gen("delta"), uq->gen("k")), q_scalar(-1));
  EXPECT_EQ(P.pair(oq->gen("beta"), uq->gen("e")), Scalar::var(Var::u));
  EXPECT_EQ(P.pair(oq->gen("gamma"), uq->gen("f")), Scalar::var(Var::u, -1));
  EXPECT_TRUE(P.pair(oq->one(), uq->gen("e") * uq->gen("f")).is_zero());
  EXPECT_TRUE(P.pair(oq->one(), uq->one()).is_one());
  EXPECT_TRUE(P.pair(oq->gen("alpha"), uq->one()).is_one());
}

TEST(Pairing, DegreeBoundRefused) {
  Pairing P(fx().oq, fx().uq, 2);
  NCPoly a = fx().oq->gen("alpha");
  EXPECT_THROW(P.pair(a * a * a, fx().uq->gen("k")), std::length_error);
}

TEST(Pairing, HopfPairingAxioms) {
  Pairing P(fx().oq, fx().uq);
  CheckReport r = verify_pairing_axioms(P, 4);
  EXPECT_TRUE(r.ok);
  for (const auto& l : r.lines) EXPECT_EQ(l.rfind("ok", 0), 0u) << l;
}

TEST(Pairing, ConcurrentCallsMatchSerial) {
  auto oq = fx().oq;
  auto uq = fx().uq;
  std::vector<Word> xs = oq->normal_words(3), hs = uq->normal_words(2);
  Pairing serial(oq, uq), shared(oq, uq);
  std::vector<Scalar> expect;
  for (const Word& x : xs)
    for (const Word& h : hs) expect.push_back(serial.pair_words(x, h));
  auto job = [&](size_t offset) {
    std::vector<Scalar> out;
    for (size_t k = 0; k < xs.size(); ++k) {
      const Word& x = xs[(k + offset) % xs.size()];
      for (const Word& h : hs) out.push_back(shared.pair_words(x, h));
    }
    return out;
  };
  auto f1 = std::async(std::launch::async, job, 0);
  auto f2 = std::async(std::launch::async, job, xs.size() / 2);
  std::vector<Scalar> r1 = f1.get(), r2 = f2.get();
  EXPECT_EQ(r1, expect);
  size_t half = xs.size() / 2;
  for (size_t k = 0; k < xs.size(); ++k)
    for (size_t j = 0; j < hs.size(); ++j)
      ASSERT_EQ(r2[k * hs.size() + j], expect[((k + half) % xs.size()) * hs.size() + j]);
}

TEST(Et, EntriesFromMatrixProduct) {
  const auto& oq = fx().oq;
  EtImages et = build_et(oq);
  NCPoly a = oq->gen("alpha"), g = oq->gen("gamma");
  Scalar t = t_scalar(), q = q_scalar(1);
  // X_t = -i alpha^2 - i q gamma^2 - t alpha gamma
  EXPECT_EQ(et.X, -Scalar::i() * (a * a) - Scalar::i() * q * (g * g) - t * (a * g));
  EXPECT_EQ(et.Y, et.X.star());
  EXPECT_EQ(et.Z, q * et.E11);
}

TEST(Et, PodlesImagesAndRank) {
  CheckReport r = verify_et_images(fx().oq, fx().pod, 4);
  EXPECT_TRUE(r.ok);
  for (const auto& l : r.lines) EXPECT_EQ(l.rfind("ok", 0), 0u) << l;
}

TEST(Et, OrthogonalityToCoideal) {
  Pairing P(fx().oq, fx().uq);
  CheckReport r = verify_orthogonality(P, fx().pod, 3);
  EXPECT_TRUE(r.ok);
  for (const auto& l : r.lines) EXPECT_EQ(l.rfind("ok", 0), 0u) << l;
  NCPoly bt = make_bt(fx().uq);
  EXPECT_EQ(bt.counit(), -Scalar::i() * t_scalar() / (q_scalar(1) - q_scalar(-1)));
}
