#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsl2r/scalar.hpp"

namespace qsl2r {

using Word = std::vector<uint8_t>;

// Storage order for terms: shorter words first, then lexicographic in
// generator index. The rewriting order is separate (Presentation::word_less).
struct WordLess {
  bool operator()(const Word& a, const Word& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

using Terms = std::map<Word, Scalar, WordLess>;
using TensorKey = std::pair<Word, Word>;
using TensorTerms = std::map<TensorKey, Scalar>;

void add_term(Terms& t, const Word& w, const Scalar& c);
void add_terms(Terms& t, const Terms& s, const Scalar& c);
void add_term(TensorTerms& t, const TensorKey& k, const Scalar& c);
Terms word_term(const Word& w, const Scalar& c = Scalar(1));

class NCPoly;

struct RewriteRule {
  Word head;  // two letters
  Terms rhs;  // normal form
};

class Presentation : public std::enable_shared_from_this<Presentation> {
 public:
  Presentation(std::string name, std::vector<std::string> generators, std::vector<int> weights);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& generators() const { return gens_; }
  const std::vector<int>& weights() const { return weights_; }
  const std::vector<RewriteRule>& rules() const { return rules_; }
  int num_generators() const { return static_cast<int>(gens_.size()); }
  int generator_index(const std::string& name) const;  // throws if unknown

  // Weighted degree, then length, then lexicographic in generator order.
  bool word_less(const Word& a, const Word& b) const;
  int weighted_degree(const Word& w) const;

  void add_rule(const Word& head, const Terms& rhs);
  // Replaces the right-hand side of an existing rule; used by test hooks.
  void replace_rule(const Word& head, const Terms& rhs);
  const RewriteRule* rule_for(uint8_t a, uint8_t b) const;

  void set_star(std::vector<Terms> images) { star_ = std::move(images); }
  void set_coproduct(std::vector<TensorTerms> images) { coproduct_ = std::move(images); }
  void set_counit(std::vector<Scalar> values) { counit_ = std::move(values); }
  void set_antipode(std::vector<Terms> images) { antipode_ = std::move(images); }

  const std::vector<Terms>& star_images() const { return star_; }
  bool has_coproduct() const { return !coproduct_.empty(); }
  bool has_counit() const { return !counit_.empty(); }
  bool has_antipode() const { return !antipode_.empty(); }
  const std::vector<TensorTerms>& coproduct_images() const { return coproduct_; }
  const std::vector<Scalar>& counit_values() const { return counit_; }
  const std::vector<Terms>& antipode_images() const { return antipode_; }

  // Normal form of a single word (memoized; the reference stays valid for
  // the lifetime of the presentation).
  const Terms& reduce_word(const Word& w) const;
  Terms reduce(const Terms& t) const;
  bool is_normal(const Word& w) const;

  // All normal words of length <= n, in storage order.
  std::vector<Word> normal_words(int max_length) const;

  NCPoly gen(const std::string& name) const;
  NCPoly one() const;
  NCPoly scalar(const Scalar& s) const;
  NCPoly make(const Terms& raw) const;  // normal-forms raw free-algebra terms
  NCPoly parse(const std::string& text) const;

  std::string word_str(const Word& w) const;
  std::string terms_str(const Terms& t) const;
  std::string tensor_str(const TensorTerms& t) const;

  std::string dump() const;
  static std::shared_ptr<Presentation> load(const std::string& text);

 private:
  const Terms& reduce_cached(const Word& w, int depth) const;
  void rebuild_index();

  std::string name_;
  std::vector<std::string> gens_;
  std::vector<int> weights_;
  std::vector<RewriteRule> rules_;
  std::vector<int> rule_index_;  // n*n table, -1 if no rule
  std::vector<Terms> star_;
  std::vector<TensorTerms> coproduct_;
  std::vector<Scalar> counit_;
  std::vector<Terms> antipode_;

  mutable std::recursive_mutex memo_mutex_;
  mutable std::map<Word, Terms> memo_;
};

using PresentationPtr = std::shared_ptr<const Presentation>;

class NCPoly {
 public:
  NCPoly() = default;
  NCPoly(PresentationPtr p, Terms t) : pres_(std::move(p)), terms_(std::move(t)) {}

  const PresentationPtr& presentation() const { return pres_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;

  NCPoly star() const;
  NCPoly antipode() const;
  Scalar counit() const;
  TensorTerms coproduct() const;
  // Applies v -> m*v to every coefficient.
  NCPoly scale_var(Var v, const Exps& m) const;
  Scalar coeff(const Word& w) const;

  friend NCPoly operator+(const NCPoly& a, const NCPoly& b);
  friend NCPoly operator-(const NCPoly& a, const NCPoly& b);
  friend NCPoly operator-(const NCPoly& a);
  friend NCPoly operator*(const NCPoly& a, const NCPoly& b);
  friend NCPoly operator*(const Scalar& s, const NCPoly& a);
  friend bool operator==(const NCPoly& a, const NCPoly& b) { return a.terms_ == b.terms_; }

  std::string str() const;

 private:
  PresentationPtr pres_;
  Terms terms_;
};

NCPoly commutator(const NCPoly& a, const NCPoly& b);

// Tensor-square arithmetic in a presentation.
TensorTerms tensor_multiply(const Presentation& p, const TensorTerms& a, const TensorTerms& b);
TensorTerms coproduct_of_word(const Presentation& p, const Word& w);
TensorTerms coproduct_of(const Presentation& p, const Terms& t);
Scalar counit_of(const Presentation& p, const Terms& t);
Terms antipode_of(const Presentation& p, const Terms& t);
Terms star_of(const Presentation& p, const Terms& t);
Terms multiply(const Presentation& p, const Terms& a, const Terms& b);

// Free-algebra parser: sums and products of scalars and generator symbols.
// Scalar atoms: integers, i, u, va, vb, z, L; operators + - * / ^ (integer
// exponents on scalars) and parentheses. Division is only by scalars.
Terms parse_free(const std::string& text, const std::vector<std::string>& generators);
Scalar parse_scalar(const std::string& text);

struct ConfluenceReport {
  bool ok = true;
  std::vector<std::string> checked;  // overlap words
  std::string failure;               // divergent pair description
};

ConfluenceReport confluence_check(const Presentation& p);
// Every rule's right-hand side is strictly below its head in word_less and
// already normal.
bool rules_decreasing(const Presentation& p, std::string* why = nullptr);

// Bundled presentations.
std::shared_ptr<Presentation> make_uqsu2();
std::shared_ptr<Presentation> make_oqsu2();
std::shared_ptr<Presentation> make_podles();
std::shared_ptr<Presentation> make_qsl2r();

// B_t = q^{-1/2}(e - fk) - i(q-q^{-1})^{-1} t k in U_q(su(2)).
NCPoly make_bt(const PresentationPtr& uq);

// Hopf pairing between O_q(SU(2)) and U_q(su(2)) seeded by pi_{1/2}.
class Pairing {
 public:
  Pairing(PresentationPtr oq, PresentationPtr uq, int degree_bound = 6);

  Scalar pair(const NCPoly& x, const NCPoly& h) const;
  Scalar pair_words(const Word& x, const Word& h) const;
  // sum pair(x_(1), h) x_(2)
  NCPoly left_contract(const NCPoly& x, const NCPoly& h) const;
  int degree_bound() const { return bound_; }
  const PresentationPtr& oq() const { return oq_; }
  const PresentationPtr& uq() const { return uq_; }

 private:
  Scalar pair_rec(const Word& x, const Word& h) const;

  PresentationPtr oq_, uq_;
  int bound_;
  std::vector<std::vector<Scalar>> seed_;  // [oq generator][uq generator]
  mutable std::mutex mutex_;
  mutable std::map<std::pair<Word, Word>, Scalar> memo_;
};

// The map O_q(S_t^2) -> O_q(SU(2)) given by the entries of E_t = U^* L_t U.
struct EtImages {
  NCPoly X, Y, Z;
  NCPoly E11, E12, E21, E22;
};
EtImages build_et(const PresentationPtr& oq);

struct CheckReport {
  bool ok = true;
  std::vector<std::string> lines;
  void fail(const std::string& s) { ok = false; lines.push_back("FAIL " + s); }
  void pass(const std::string& s) { lines.push_back("ok   " + s); }
};

CheckReport verify_hopf_structure(const PresentationPtr& p);
CheckReport verify_et_images(const PresentationPtr& oq, const PresentationPtr& podles, int max_degree = 4);
CheckReport verify_orthogonality(const Pairing& pairing, const PresentationPtr& podles, int degree);
CheckReport verify_pairing_axioms(const Pairing& pairing, int max_degree);

}  // namespace qsl2r
