#include <array>
#include <sstream>
#include <stdexcept>

#include "qsl2r/ncpoly.hpp"

namespace qsl2r {

namespace {

Word tail(const Word& w) { return Word(w.begin() + 1, w.end()); }

}  // namespace

Pairing::Pairing(PresentationPtr oq, PresentationPtr uq, int degree_bound)
    : oq_(std::move(oq)), uq_(std::move(uq)), bound_(degree_bound) {
  // pi_{1/2} on the basis (xi_0, xi_1); U_{ij} pairs to the (i,j) entry.
  Scalar u = Scalar::var(Var::u);
  Scalar q = q_scalar(1), qi = q_scalar(-1);
  std::map<std::string, std::array<Scalar, 4>> pi = {
      {"e", {Scalar(0), u, Scalar(0), Scalar(0)}},
      {"f", {Scalar(0), Scalar(0), u.inverse(), Scalar(0)}},
      {"k", {q, Scalar(0), Scalar(0), qi}},
      {"kinv", {qi, Scalar(0), Scalar(0), q}},
  };
  std::map<std::string, int> entry = {{"alpha", 0}, {"beta", 1}, {"gamma", 2}, {"delta", 3}};
  seed_.assign(oq_->num_generators(), std::vector<Scalar>(uq_->num_generators()));
  for (int a = 0; a < oq_->num_generators(); ++a)
    for (int h = 0; h < uq_->num_generators(); ++h)
      seed_[a][h] = pi.at(uq_->generators()[h])[entry.at(oq_->generators()[a])];
}

Scalar Pairing::pair_words(const Word& x, const Word& h) const {
  if (static_cast<int>(x.size()) > bound_ || static_cast<int>(h.size()) > bound_) {
    std::ostringstream os;
    os << "pairing degree bound " << bound_ << " exceeded (degrees " << x.size() << ", " << h.size() << ")";
    throw std::length_error(os.str());
  }
  return pair_rec(x, h);
}

Scalar Pairing::pair_rec(const Word& x, const Word& h) const {
  if (x.empty()) return counit_of(*uq_, word_term(h));
  if (h.empty()) return counit_of(*oq_, word_term(x));
  if (x.size() == 1 && h.size() == 1) return seed_[x[0]][h[0]];
  auto key = std::make_pair(x, h);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  Scalar s;
  if (x.size() >= 2) {
    // pair(g x', h) = sum pair(g, h_(1)) pair(x', h_(2))
    Word g{x[0]}, rest = tail(x);
    for (const auto& [k, c] : coproduct_of_word(*uq_, h)) {
      Scalar p1 = pair_rec(g, k.first);
      if (p1.is_zero()) continue;
      s += c * p1 * pair_rec(rest, k.second);
    }
  } else {
    // pair(g, h0 h') = sum pair(g_(1), h0) pair(g_(2), h')
    Word h0{h[0]}, rest = tail(h);
    for (const auto& [k, c] : oq_->coproduct_images()[x[0]]) {
      Scalar p1 = pair_rec(k.first, h0);
      if (p1.is_zero()) continue;
      s += c * p1 * pair_rec(k.second, rest);
    }
  }
  std::lock_guard<std::mutex> lock(mutex_);
  memo_.emplace(key, s);
  return s;
}

Scalar Pairing::pair(const NCPoly& x, const NCPoly& h) const {
  Scalar s;
  for (const auto& [wx, cx] : x.terms())
    for (const auto& [wh, ch] : h.terms()) s += cx * ch * pair_words(wx, wh);
  return s;
}

NCPoly Pairing::left_contract(const NCPoly& x, const NCPoly& h) const {
  Terms out;
  for (const auto& [w, c] : x.terms())
    for (const auto& [k, d] : coproduct_of_word(*oq_, w)) {
      Scalar p;
      for (const auto& [wh, ch] : h.terms()) p += ch * pair_words(k.first, wh);
      if (!p.is_zero()) add_term(out, k.second, c * d * p);
    }
  return NCPoly(oq_, std::move(out));
}

// ---------------------------------------------------------------- checks

namespace {

using Triple = std::array<Word, 3>;

std::map<Triple, Scalar> coassoc_left(const Presentation& p, const TensorTerms& d) {
  std::map<Triple, Scalar> out;
  for (const auto& [k, c] : d)
    for (const auto& [k2, c2] : coproduct_of_word(p, k.first)) {
      Scalar& slot = out[{k2.first, k2.second, k.second}];
      slot += c * c2;
    }
  for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

std::map<Triple, Scalar> coassoc_right(const Presentation& p, const TensorTerms& d) {
  std::map<Triple, Scalar> out;
  for (const auto& [k, c] : d)
    for (const auto& [k2, c2] : coproduct_of_word(p, k.second)) {
      Scalar& slot = out[{k.first, k2.first, k2.second}];
      slot += c * c2;
    }
  for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

}  // namespace

CheckReport verify_hopf_structure(const PresentationPtr& pp) {
  const Presentation& p = *pp;
  CheckReport rep;
  const int n = p.num_generators();
  if (!p.star_images().empty()) {
    bool ok = true;
    for (const auto& r : p.rules())
      if (star_of(p, word_term(r.head)) != star_of(p, r.rhs)) {
        rep.fail("star does not respect rule " + p.word_str(r.head));
        ok = false;
      }
    for (int g = 0; g < n; ++g)
      if (star_of(p, star_of(p, word_term(Word{static_cast<uint8_t>(g)}))) != p.reduce_word(Word{static_cast<uint8_t>(g)})) {
        rep.fail("star is not involutive on " + p.generators()[g]);
        ok = false;
      }
    if (ok) rep.pass(p.name() + ": star well defined and involutive");
  }
  if (p.has_coproduct()) {
    bool ok = true;
    for (const auto& r : p.rules())
      if (coproduct_of(p, word_term(r.head)) != coproduct_of(p, r.rhs)) {
        rep.fail("coproduct does not respect rule " + p.word_str(r.head));
        ok = false;
      }
    for (int g = 0; g < n; ++g) {
      const TensorTerms& d = p.coproduct_images()[g];
      if (coassoc_left(p, d) != coassoc_right(p, d)) {
        rep.fail("coproduct not coassociative on " + p.generators()[g]);
        ok = false;
      }
      if (!p.star_images().empty()) {
        TensorTerms lhs = coproduct_of(p, p.star_images()[g]), rhs;
        for (const auto& [k, c] : d) {
          Terms a = star_of(p, word_term(k.first)), b = star_of(p, word_term(k.second));
          for (const auto& [wa, ca] : a)
            for (const auto& [wb, cb] : b) add_term(rhs, {wa, wb}, c.conj() * ca * cb);
        }
        if (lhs != rhs) {
          rep.fail("coproduct not a *-map on " + p.generators()[g]);
          ok = false;
        }
      }
    }
    if (ok) rep.pass(p.name() + ": coproduct multiplicative, coassociative, *-compatible");
  }
  if (p.has_counit()) {
    bool ok = true;
    for (const auto& r : p.rules())
      if (counit_of(p, word_term(r.head)) != counit_of(p, r.rhs)) {
        rep.fail("counit does not respect rule " + p.word_str(r.head));
        ok = false;
      }
    if (p.has_coproduct())
      for (int g = 0; g < n; ++g) {
        Terms left, right;
        for (const auto& [k, c] : p.coproduct_images()[g]) {
          add_terms(left, p.reduce_word(k.second), c * counit_of(p, word_term(k.first)));
          add_terms(right, p.reduce_word(k.first), c * counit_of(p, word_term(k.second)));
        }
        Terms id = p.reduce_word(Word{static_cast<uint8_t>(g)});
        if (left != id || right != id) {
          rep.fail("counit axiom fails on " + p.generators()[g]);
          ok = false;
        }
      }
    if (ok) rep.pass(p.name() + ": counit multiplicative and counital");
  }
  if (p.has_antipode() && p.has_coproduct() && p.has_counit()) {
    bool ok = true;
    for (const auto& r : p.rules())
      if (antipode_of(p, word_term(r.head)) != antipode_of(p, r.rhs)) {
        rep.fail("antipode does not respect rule " + p.word_str(r.head));
        ok = false;
      }
    for (int g = 0; g < n; ++g) {
      Terms left, right;
      for (const auto& [k, c] : p.coproduct_images()[g]) {
        add_terms(left, multiply(p, antipode_of(p, word_term(k.first)), p.reduce_word(k.second)), c);
        add_terms(right, multiply(p, p.reduce_word(k.first), antipode_of(p, word_term(k.second))), c);
      }
      Terms unit = word_term(Word{}, p.counit_values()[g]);
      if (left != unit || right != unit) {
        rep.fail("antipode axiom m(S(x)y)=eps fails on " + p.generators()[g]);
        ok = false;
      }
    }
    if (ok) rep.pass(p.name() + ": antipode satisfies m(S x id)D = m(id x S)D = eps");
  }
  return rep;
}

namespace {

NCPoly podles_image(const EtImages& et, const Presentation& podles, const Word& w) {
  NCPoly acc = et.X.presentation()->one();
  for (uint8_t g : w) {
    const std::string& name = podles.generators()[g];
    acc = acc * (name == "X" ? et.X : name == "Y" ? et.Y : et.Z);
  }
  return acc;
}

NCPoly podles_image(const EtImages& et, const Presentation& podles, const Terms& t) {
  NCPoly acc = et.X.presentation()->scalar(Scalar(0));
  for (const auto& [w, c] : t) acc = acc + c * podles_image(et, podles, w);
  return acc;
}

// Rank of a matrix over Q(i) by Gaussian elimination.
int exact_rank(std::vector<std::vector<GaussQ>> m) {
  int rows = static_cast<int>(m.size());
  if (rows == 0) return 0;
  int cols = static_cast<int>(m[0].size());
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int piv = -1;
    for (int r = rank; r < rows; ++r)
      if (!m[r][c].is_zero()) { piv = r; break; }
    if (piv < 0) continue;
    std::swap(m[piv], m[rank]);
    GaussQ inv = m[rank][c].inverse();
    for (int r = rank + 1; r < rows; ++r) {
      if (m[r][c].is_zero()) continue;
      GaussQ f = m[r][c] * inv;
      for (int k = c; k < cols; ++k) m[r][k] -= f * m[rank][k];
    }
    ++rank;
  }
  return rank;
}

}  // namespace

CheckReport verify_et_images(const PresentationPtr& oq, const PresentationPtr& podles, int max_degree) {
  CheckReport rep;
  EtImages et = build_et(oq);
  NCPoly e22 = -(t_scalar() * oq->one()) - q_scalar(1) * et.Z;
  if (et.E22 == e22) rep.pass("E_t(2,2) = -t - qZ");
  else rep.fail("E_t(2,2) = " + et.E22.str() + " differs from -t - qZ");
  if (et.X.star() == et.Y && et.Z.star() == et.Z) rep.pass("X* = Y and Z* = Z in O_q(SU(2))");
  else rep.fail("star relations of E_t entries");
  for (const auto& r : podles->rules()) {
    NCPoly lhs = podles_image(et, *podles, r.head), rhs = podles_image(et, *podles, r.rhs);
    if (lhs == rhs) rep.pass("image satisfies " + podles->word_str(r.head) + " -> " + podles->terms_str(r.rhs));
    else rep.fail("image violates " + podles->word_str(r.head) + ": residual " + (lhs - rhs).str());
  }
  std::vector<Word> words = podles->normal_words(max_degree);
  std::vector<NCPoly> imgs;
  std::map<Word, int, WordLess> column;
  for (const Word& w : words) {
    imgs.push_back(podles_image(et, *podles, w));
    for (const auto& [ow, c] : imgs.back().terms()) column.emplace(ow, 0);
  }
  int idx = 0;
  for (auto& [w, k] : column) k = idx++;
  std::array<mpq_class, kNumVars> point = {mpq_class(3, 7), mpq_class(5, 11), mpq_class(2, 13), mpq_class(7, 17),
                                           mpq_class(1, 3)};
  std::vector<std::vector<GaussQ>> mat(imgs.size(), std::vector<GaussQ>(column.size()));
  for (size_t r = 0; r < imgs.size(); ++r)
    for (const auto& [ow, c] : imgs[r].terms()) mat[r][column[ow]] = evaluate_exact(c, point);
  int rank = exact_rank(mat);
  std::ostringstream os;
  os << "rank of PODLES -> OQSU2 on " << words.size() << " normal monomials of degree <= " << max_degree << ": "
     << rank;
  if (rank == static_cast<int>(words.size())) rep.pass(os.str());
  else rep.fail(os.str());
  return rep;
}

CheckReport verify_orthogonality(const Pairing& pairing, const PresentationPtr& podles, int degree) {
  CheckReport rep;
  const PresentationPtr& oq = pairing.oq();
  EtImages et = build_et(oq);
  NCPoly bt = make_bt(pairing.uq());
  Scalar eps = bt.counit();
  Scalar L[2][2] = {{Scalar(0), Scalar::i()}, {-Scalar::i(), -t_scalar()}};
  const NCPoly* E[2][2] = {{&et.E11, &et.E12}, {&et.E21, &et.E22}};
  bool ok = true;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      Scalar res = pairing.pair(*E[r][c], bt) - eps * L[r][c];
      if (!res.is_zero()) {
        ok = false;
        rep.fail("entry (" + std::to_string(r + 1) + "," + std::to_string(c + 1) + ") residual " + res.str());
      }
    }
  if (ok) rep.pass("(id x pair(-,B_t))(U^*(L_t x 1)U) = eps(B_t) L_t");
  for (const Word& w : podles->normal_words(degree)) {
    NCPoly x = podles_image(et, *podles, w);
    NCPoly res = pairing.left_contract(x, bt) - eps * x;
    if (res.is_zero()) rep.pass("coideal orthogonality for " + podles->word_str(w));
    else rep.fail("coideal orthogonality for " + podles->word_str(w) + ": residual " + res.str());
  }
  return rep;
}

CheckReport verify_pairing_axioms(const Pairing& pairing, int max_degree) {
  CheckReport rep;
  const Presentation& oq = *pairing.oq();
  const Presentation& uq = *pairing.uq();
  int d = std::max(1, max_degree);
  std::vector<Word> ow = oq.normal_words(d), uw = uq.normal_words(d);
  bool ok = true;
  // Relations of each side pair to zero against the other side.
  for (const auto& r : oq.rules())
    for (const Word& h : uq.normal_words(std::max(1, d - 1))) {
      Scalar s = pairing.pair_words(r.head, h);
      for (const auto& [w, c] : r.rhs) s -= c * pairing.pair_words(w, h);
      if (!s.is_zero()) {
        ok = false;
        rep.fail("OQSU2 rule " + oq.word_str(r.head) + " not annihilated by " + uq.word_str(h));
      }
    }
  for (const auto& r : uq.rules())
    for (const Word& x : oq.normal_words(std::max(1, d - 1))) {
      Scalar s = pairing.pair_words(x, r.head);
      for (const auto& [w, c] : r.rhs) s -= c * pairing.pair_words(x, w);
      if (!s.is_zero()) {
        ok = false;
        rep.fail("UQSU2 rule " + uq.word_str(r.head) + " not annihilated by " + oq.word_str(x));
      }
    }
  if (ok) rep.pass("pairing annihilates all defining relations");
  ok = true;
  int half = std::max(1, d / 2);
  for (const Word& x : oq.normal_words(half))
    for (const Word& y : oq.normal_words(half))
      for (const Word& h : uq.normal_words(half)) {
        Scalar lhs;
        for (const auto& [w, c] : oq.reduce_word([&] { Word v = x; v.insert(v.end(), y.begin(), y.end()); return v; }()))
          lhs += c * pairing.pair_words(w, h);
        Scalar rhs;
        for (const auto& [k, c] : coproduct_of_word(uq, h))
          rhs += c * pairing.pair_words(x, k.first) * pairing.pair_words(y, k.second);
        if (lhs != rhs) {
          ok = false;
          rep.fail("pair(xy,h) split fails for " + oq.word_str(x) + "," + oq.word_str(y) + "," + uq.word_str(h));
        }
      }
  for (const Word& x : oq.normal_words(half))
    for (const Word& h : uq.normal_words(half))
      for (const Word& k : uq.normal_words(half)) {
        Scalar lhs;
        for (const auto& [w, c] : uq.reduce_word([&] { Word v = h; v.insert(v.end(), k.begin(), k.end()); return v; }()))
          lhs += c * pairing.pair_words(x, w);
        Scalar rhs;
        for (const auto& [kk, c] : coproduct_of_word(oq, x))
          rhs += c * pairing.pair_words(kk.first, h) * pairing.pair_words(kk.second, k);
        if (lhs != rhs) {
          ok = false;
          rep.fail("pair(x,hk) split fails for " + oq.word_str(x) + "," + uq.word_str(h) + "," + uq.word_str(k));
        }
      }
  if (ok) rep.pass("pairing is a Hopf pairing on words of degree <= " + std::to_string(half));
  ok = true;
  for (int a = 0; a < oq.num_generators(); ++a)
    for (int h = 0; h < uq.num_generators(); ++h) {
      Word wa{static_cast<uint8_t>(a)}, wh{static_cast<uint8_t>(h)};
      NCPoly xa(pairing.oq(), oq.reduce_word(wa)), hh(pairing.uq(), uq.reduce_word(wh));
      Scalar lhs = pairing.pair(xa.star(), hh);
      Scalar rhs = pairing.pair(xa, hh.antipode().star()).conj();
      if (lhs != rhs) {
        ok = false;
        rep.fail("unitarity fails for " + oq.generators()[a] + "," + uq.generators()[h]);
      }
    }
  if (ok) rep.pass("pair(x*,h) = conj(pair(x,S(h)*)) on generators");
  return rep;
}

}  // namespace qsl2r
