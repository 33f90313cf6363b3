#include "qsl2r/ncpoly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace qsl2r {

void add_term(Terms& t, const Word& w, const Scalar& c) {
  if (c.is_zero()) return;
  auto it = t.find(w);
  if (it == t.end()) {
    t.emplace(w, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) t.erase(it);
}

void add_terms(Terms& t, const Terms& s, const Scalar& c) {
  if (c.is_zero()) return;
  for (const auto& [w, d] : s) add_term(t, w, c.is_one() ? d : c * d);
}

void add_term(TensorTerms& t, const TensorKey& k, const Scalar& c) {
  if (c.is_zero()) return;
  auto it = t.find(k);
  if (it == t.end()) {
    t.emplace(k, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) t.erase(it);
}

Terms word_term(const Word& w, const Scalar& c) {
  Terms t;
  add_term(t, w, c);
  return t;
}

namespace {

Word concat(const Word& a, const Word& b) {
  Word w = a;
  w.insert(w.end(), b.begin(), b.end());
  return w;
}

}  // namespace

// ---------------------------------------------------------------- Presentation

Presentation::Presentation(std::string name, std::vector<std::string> generators, std::vector<int> weights)
    : name_(std::move(name)), gens_(std::move(generators)), weights_(std::move(weights)) {
  if (weights_.empty()) weights_.assign(gens_.size(), 1);
  if (weights_.size() != gens_.size()) throw std::invalid_argument("weights/generators size mismatch");
  if (gens_.size() > 200) throw std::invalid_argument("too many generators");
  rebuild_index();
}

void Presentation::rebuild_index() {
  size_t n = gens_.size();
  rule_index_.assign(n * n, -1);
  for (size_t k = 0; k < rules_.size(); ++k)
    rule_index_[rules_[k].head[0] * n + rules_[k].head[1]] = static_cast<int>(k);
  std::lock_guard<std::recursive_mutex> lock(memo_mutex_);
  memo_.clear();
}

int Presentation::generator_index(const std::string& name) const {
  for (size_t k = 0; k < gens_.size(); ++k)
    if (gens_[k] == name) return static_cast<int>(k);
  throw std::invalid_argument("unknown generator '" + name + "' in " + name_);
}

int Presentation::weighted_degree(const Word& w) const {
  int d = 0;
  for (uint8_t g : w) d += weights_[g];
  return d;
}

bool Presentation::word_less(const Word& a, const Word& b) const {
  int da = weighted_degree(a), db = weighted_degree(b);
  if (da != db) return da < db;
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

void Presentation::add_rule(const Word& head, const Terms& rhs) {
  if (head.size() != 2) throw std::invalid_argument("rule heads must have two letters");
  if (rule_for(head[0], head[1])) throw std::invalid_argument("duplicate rule head " + word_str(head));
  rules_.push_back({head, rhs});
  rebuild_index();
}

void Presentation::replace_rule(const Word& head, const Terms& rhs) {
  for (auto& r : rules_)
    if (r.head == head) {
      r.rhs = rhs;
      rebuild_index();
      return;
    }
  throw std::invalid_argument("no rule with head " + word_str(head));
}

const RewriteRule* Presentation::rule_for(uint8_t a, uint8_t b) const {
  int k = rule_index_[a * gens_.size() + b];
  return k < 0 ? nullptr : &rules_[k];
}

bool Presentation::is_normal(const Word& w) const {
  for (size_t i = 0; i + 1 < w.size(); ++i)
    if (rule_for(w[i], w[i + 1])) return false;
  return true;
}

const Terms& Presentation::reduce_word(const Word& w) const {
  std::lock_guard<std::recursive_mutex> lock(memo_mutex_);
  return reduce_cached(w, 0);
}

const Terms& Presentation::reduce_cached(const Word& w, int depth) const {
  auto it = memo_.find(w);
  if (it != memo_.end()) return it->second;
  if (depth > 4000) throw std::runtime_error("rewriting does not terminate in " + name_ + " at " + word_str(w));
  Terms out;
  size_t pos = w.size();
  const RewriteRule* rule = nullptr;
  for (size_t i = 0; i + 1 < w.size(); ++i)
    if ((rule = rule_for(w[i], w[i + 1]))) {
      pos = i;
      break;
    }
  if (!rule) {
    out.emplace(w, Scalar(1));
  } else {
    Word prefix(w.begin(), w.begin() + pos), suffix(w.begin() + pos + 2, w.end());
    for (const auto& [rw, c] : rule->rhs) {
      Word nw = concat(concat(prefix, rw), suffix);
      add_terms(out, reduce_cached(nw, depth + 1), c);
    }
  }
  return memo_.emplace(w, std::move(out)).first->second;
}

Terms Presentation::reduce(const Terms& t) const {
  Terms out;
  for (const auto& [w, c] : t) add_terms(out, reduce_word(w), c);
  return out;
}

std::vector<Word> Presentation::normal_words(int max_length) const {
  std::vector<Word> out{Word{}};
  std::vector<Word> layer{Word{}};
  for (int len = 1; len <= max_length; ++len) {
    std::vector<Word> next;
    for (const Word& w : layer)
      for (int g = 0; g < num_generators(); ++g) {
        if (!w.empty() && rule_for(w.back(), static_cast<uint8_t>(g))) continue;
        Word x = w;
        x.push_back(static_cast<uint8_t>(g));
        next.push_back(x);
      }
    std::sort(next.begin(), next.end(), WordLess{});
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

NCPoly Presentation::gen(const std::string& name) const {
  Word w{static_cast<uint8_t>(generator_index(name))};
  return NCPoly(shared_from_this(), reduce_word(w));
}

NCPoly Presentation::one() const { return NCPoly(shared_from_this(), word_term(Word{})); }

NCPoly Presentation::scalar(const Scalar& s) const { return NCPoly(shared_from_this(), word_term(Word{}, s)); }

NCPoly Presentation::make(const Terms& raw) const { return NCPoly(shared_from_this(), reduce(raw)); }

NCPoly Presentation::parse(const std::string& text) const { return make(parse_free(text, gens_)); }

std::string Presentation::word_str(const Word& w) const {
  if (w.empty()) return "1";
  std::string s;
  for (size_t k = 0; k < w.size(); ++k) {
    if (k) s += "*";
    s += gens_[w[k]];
  }
  return s;
}

std::string Presentation::terms_str(const Terms& t) const {
  if (t.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [w, c] : t) {
    if (!first) s += " + ";
    first = false;
    if (w.empty()) s += "(" + c.str() + ")";
    else if (c.is_one()) s += word_str(w);
    else s += "(" + c.str() + ")*" + word_str(w);
  }
  return s;
}

std::string Presentation::tensor_str(const TensorTerms& t) const {
  if (t.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [k, c] : t) {
    if (!first) s += " + ";
    first = false;
    if (!c.is_one()) s += "(" + c.str() + ")*";
    s += "[" + word_str(k.first) + " | " + word_str(k.second) + "]";
  }
  return s;
}

// ---------------------------------------------------------------- NCPoly

int NCPoly::degree() const {
  int d = 0;
  for (const auto& [w, c] : terms_) d = std::max<int>(d, static_cast<int>(w.size()));
  return d;
}

Scalar NCPoly::coeff(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? Scalar() : it->second;
}

namespace {

const PresentationPtr& pick(const NCPoly& a, const NCPoly& b) {
  if (a.presentation() && b.presentation() && a.presentation() != b.presentation())
    throw std::invalid_argument("mixing polynomials of different presentations");
  return a.presentation() ? a.presentation() : b.presentation();
}

}  // namespace

NCPoly operator+(const NCPoly& a, const NCPoly& b) {
  Terms t = a.terms_;
  add_terms(t, b.terms_, Scalar(1));
  return NCPoly(pick(a, b), std::move(t));
}

NCPoly operator-(const NCPoly& a) {
  Terms t;
  for (const auto& [w, c] : a.terms_) t.emplace(w, -c);
  return NCPoly(a.pres_, std::move(t));
}

NCPoly operator-(const NCPoly& a, const NCPoly& b) { return a + (-b); }

NCPoly operator*(const NCPoly& a, const NCPoly& b) {
  const PresentationPtr& p = pick(a, b);
  if (!p) return NCPoly();
  return NCPoly(p, multiply(*p, a.terms_, b.terms_));
}

NCPoly operator*(const Scalar& s, const NCPoly& a) {
  Terms t;
  add_terms(t, a.terms_, s);
  return NCPoly(a.pres_, std::move(t));
}

NCPoly commutator(const NCPoly& a, const NCPoly& b) { return a * b - b * a; }

NCPoly NCPoly::star() const { return NCPoly(pres_, star_of(*pres_, terms_)); }

NCPoly NCPoly::antipode() const { return NCPoly(pres_, antipode_of(*pres_, terms_)); }

Scalar NCPoly::counit() const { return counit_of(*pres_, terms_); }

TensorTerms NCPoly::coproduct() const { return coproduct_of(*pres_, terms_); }

NCPoly NCPoly::scale_var(Var v, const Exps& m) const {
  Terms t;
  for (const auto& [w, c] : terms_) add_term(t, w, c.scale_var(v, m));
  return NCPoly(pres_, std::move(t));
}

std::string NCPoly::str() const { return pres_ ? pres_->terms_str(terms_) : "0"; }

Terms multiply(const Presentation& p, const Terms& a, const Terms& b) {
  Terms out;
  for (const auto& [wa, ca] : a)
    for (const auto& [wb, cb] : b) add_terms(out, p.reduce_word(concat(wa, wb)), ca * cb);
  return out;
}

Terms star_of(const Presentation& p, const Terms& t) {
  if (p.star_images().empty()) throw std::logic_error(p.name() + " has no star structure");
  Terms out;
  for (const auto& [w, c] : t) {
    Terms acc = word_term(Word{});
    for (auto it = w.rbegin(); it != w.rend(); ++it) acc = multiply(p, acc, p.star_images()[*it]);
    add_terms(out, acc, c.conj());
  }
  return out;
}

Terms antipode_of(const Presentation& p, const Terms& t) {
  if (!p.has_antipode()) throw std::logic_error(p.name() + " has no antipode");
  Terms out;
  for (const auto& [w, c] : t) {
    Terms acc = word_term(Word{});
    for (auto it = w.rbegin(); it != w.rend(); ++it) acc = multiply(p, acc, p.antipode_images()[*it]);
    add_terms(out, acc, c);
  }
  return out;
}

Scalar counit_of(const Presentation& p, const Terms& t) {
  if (!p.has_counit()) throw std::logic_error(p.name() + " has no counit");
  Scalar s;
  for (const auto& [w, c] : t) {
    Scalar m = c;
    for (uint8_t g : w) {
      m *= p.counit_values()[g];
      if (m.is_zero()) break;
    }
    s += m;
  }
  return s;
}

TensorTerms tensor_multiply(const Presentation& p, const TensorTerms& a, const TensorTerms& b) {
  TensorTerms out;
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b) {
      const Terms& left = p.reduce_word(concat(ka.first, kb.first));
      const Terms& right = p.reduce_word(concat(ka.second, kb.second));
      Scalar c = ca * cb;
      for (const auto& [wl, cl] : left)
        for (const auto& [wr, cr] : right) add_term(out, {wl, wr}, c * cl * cr);
    }
  return out;
}

TensorTerms coproduct_of_word(const Presentation& p, const Word& w) {
  if (!p.has_coproduct()) throw std::logic_error(p.name() + " has no coproduct");
  TensorTerms acc;
  acc.emplace(TensorKey{Word{}, Word{}}, Scalar(1));
  for (uint8_t g : w) acc = tensor_multiply(p, acc, p.coproduct_images()[g]);
  return acc;
}

TensorTerms coproduct_of(const Presentation& p, const Terms& t) {
  TensorTerms out;
  for (const auto& [w, c] : t)
    for (const auto& [k, d] : coproduct_of_word(p, w)) add_term(out, k, c * d);
  return out;
}

// ---------------------------------------------------------------- confluence

bool rules_decreasing(const Presentation& p, std::string* why) {
  for (const auto& r : p.rules())
    for (const auto& [w, c] : r.rhs) {
      if (!p.word_less(w, r.head)) {
        if (why) *why = "rule " + p.word_str(r.head) + " -> ... contains non-smaller word " + p.word_str(w);
        return false;
      }
      if (!p.is_normal(w)) {
        if (why) *why = "rule " + p.word_str(r.head) + " has non-normal right-hand word " + p.word_str(w);
        return false;
      }
    }
  return true;
}

ConfluenceReport confluence_check(const Presentation& p) {
  ConfluenceReport rep;
  std::string why;
  if (!rules_decreasing(p, &why)) {
    rep.ok = false;
    rep.failure = why;
    return rep;
  }
  for (const auto& r1 : p.rules())
    for (const auto& r2 : p.rules()) {
      if (r1.head[1] != r2.head[0]) continue;
      Word overlap{r1.head[0], r1.head[1], r2.head[1]};
      Terms left, right;
      for (const auto& [w, c] : r1.rhs) add_terms(left, p.reduce_word(concat(w, Word{r2.head[1]})), c);
      for (const auto& [w, c] : r2.rhs) add_terms(right, p.reduce_word(concat(Word{r1.head[0]}, w)), c);
      rep.checked.push_back(p.word_str(overlap));
      if (left != right) {
        rep.ok = false;
        if (rep.failure.empty())
          rep.failure = "overlap " + p.word_str(overlap) + ": " + p.terms_str(left) + "  !=  " + p.terms_str(right);
      }
    }
  return rep;
}

// ---------------------------------------------------------------- parser

namespace {

struct Token {
  enum Kind { Num, Ident, Op, End } kind;
  std::string text;
};

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < s.size()) {
    char ch = s[i];
    if (std::isspace(static_cast<unsigned char>(ch))) { ++i; continue; }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Token::Num, s.substr(i, j - i)});
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Token::Ident, s.substr(i, j - i)});
      i = j;
    } else if (std::string("+-*/^()").find(ch) != std::string::npos) {
      out.push_back({Token::Op, std::string(1, ch)});
      ++i;
    } else {
      throw std::invalid_argument(std::string("unexpected character '") + ch + "' in expression");
    }
  }
  out.push_back({Token::End, ""});
  return out;
}

bool scalar_only(const Terms& t) {
  for (const auto& [w, c] : t)
    if (!w.empty()) return false;
  return true;
}

Terms free_multiply(const Terms& a, const Terms& b) {
  Terms out;
  for (const auto& [wa, ca] : a)
    for (const auto& [wb, cb] : b) add_term(out, concat(wa, wb), ca * cb);
  return out;
}

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& gens) : toks_(tokenize(text)), gens_(gens) {}

  Terms parse_all() {
    Terms t = expr();
    if (peek().kind != Token::End) throw std::invalid_argument("trailing input near '" + peek().text + "'");
    return t;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool is_op(const char* op) const { return peek().kind == Token::Op && peek().text == op; }
  void expect(const char* op) {
    if (!is_op(op)) throw std::invalid_argument(std::string("expected '") + op + "'");
    ++pos_;
  }

  Terms expr() {
    Terms t;
    bool neg = false;
    if (is_op("+")) ++pos_;
    else if (is_op("-")) { neg = true; ++pos_; }
    add_terms(t, term(), Scalar(neg ? -1 : 1));
    while (is_op("+") || is_op("-")) {
      bool minus = peek().text == "-";
      ++pos_;
      add_terms(t, term(), Scalar(minus ? -1 : 1));
    }
    return t;
  }

  bool starts_atom() const {
    return peek().kind == Token::Num || peek().kind == Token::Ident || is_op("(");
  }

  Terms term() {
    Terms t = power();
    while (true) {
      if (is_op("*")) {
        ++pos_;
        t = free_multiply(t, power());
      } else if (is_op("/")) {
        ++pos_;
        Terms d = power();
        if (!scalar_only(d) || d.empty()) throw std::invalid_argument("division by a non-scalar or zero");
        Scalar inv = d.begin()->second.inverse();
        Terms r;
        add_terms(r, t, inv);
        t = r;
      } else if (starts_atom()) {
        t = free_multiply(t, power());
      } else {
        return t;
      }
    }
  }

  Terms power() {
    Terms base = atom();
    if (!is_op("^")) return base;
    ++pos_;
    bool neg = false;
    if (is_op("-")) { neg = true; ++pos_; }
    if (peek().kind != Token::Num) throw std::invalid_argument("exponent must be an integer");
    int n = std::stoi(peek().text);
    ++pos_;
    if (neg) {
      if (!scalar_only(base) || base.empty()) throw std::invalid_argument("negative power of a non-scalar");
      Scalar inv = base.begin()->second.inverse();
      base = word_term(Word{}, inv);
    }
    Terms r = word_term(Word{});
    for (int k = 0; k < n; ++k) r = free_multiply(r, base);
    return r;
  }

  Terms atom() {
    const Token& tk = peek();
    if (tk.kind == Token::Num) {
      ++pos_;
      return word_term(Word{}, Scalar(GaussQ(mpq_class(tk.text))));
    }
    if (tk.kind == Token::Ident) {
      ++pos_;
      static const std::vector<std::pair<std::string, Var>> vars = {
          {"u", Var::u}, {"va", Var::va}, {"vb", Var::vb}, {"z", Var::z}, {"L", Var::L}};
      if (tk.text == "i") return word_term(Word{}, Scalar::i());
      for (size_t g = 0; g < gens_.size(); ++g)
        if (gens_[g] == tk.text) return word_term(Word{static_cast<uint8_t>(g)});
      for (const auto& [name, v] : vars)
        if (name == tk.text) return word_term(Word{}, Scalar::var(v));
      throw std::invalid_argument("unknown symbol '" + tk.text + "'");
    }
    if (is_op("(")) {
      ++pos_;
      Terms t = expr();
      expect(")");
      return t;
    }
    throw std::invalid_argument("unexpected token '" + tk.text + "'");
  }

  std::vector<Token> toks_;
  const std::vector<std::string>& gens_;
  size_t pos_ = 0;
};

}  // namespace

Terms parse_free(const std::string& text, const std::vector<std::string>& generators) {
  return Parser(text, generators).parse_all();
}

Scalar parse_scalar(const std::string& text) {
  static const std::vector<std::string> none;
  Terms t = parse_free(text, none);
  if (t.empty()) return Scalar();
  return t.begin()->second;
}

// ---------------------------------------------------------------- dump/load

std::string Presentation::dump() const {
  std::ostringstream os;
  os << "name " << name_ << "\n";
  os << "generators";
  for (const auto& g : gens_) os << " " << g;
  os << "\nweights";
  for (int w : weights_) os << " " << w;
  os << "\n[rules]\n";
  for (const auto& r : rules_) os << word_str(r.head) << " -> " << terms_str(r.rhs) << "\n";
  if (!star_.empty()) {
    os << "[star]\n";
    for (size_t g = 0; g < gens_.size(); ++g) os << gens_[g] << " -> " << terms_str(star_[g]) << "\n";
  }
  if (!coproduct_.empty()) {
    os << "[coproduct]\n";
    for (size_t g = 0; g < gens_.size(); ++g)
      for (const auto& [k, c] : coproduct_[g]) {
        std::string left = c.is_one() ? word_str(k.first) : "(" + c.str() + ")*" + word_str(k.first);
        os << gens_[g] << " -> " << left << " | " << word_str(k.second) << "\n";
      }
  }
  if (!counit_.empty()) {
    os << "[counit]\n";
    for (size_t g = 0; g < gens_.size(); ++g) os << gens_[g] << " -> " << counit_[g].str() << "\n";
  }
  if (!antipode_.empty()) {
    os << "[antipode]\n";
    for (size_t g = 0; g < gens_.size(); ++g) os << gens_[g] << " -> " << terms_str(antipode_[g]) << "\n";
  }
  os << "[end]\n";
  return os.str();
}

namespace {

std::string trim_ws(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::pair<std::string, std::string> split_arrow(const std::string& line) {
  size_t p = line.find("->");
  if (p == std::string::npos) throw std::invalid_argument("expected '->' in line: " + line);
  return {trim_ws(line.substr(0, p)), trim_ws(line.substr(p + 2))};
}

}  // namespace

std::shared_ptr<Presentation> Presentation::load(const std::string& text) {
  std::istringstream is(text);
  std::string line, name, section;
  std::vector<std::string> gens;
  std::vector<int> weights;
  std::shared_ptr<Presentation> p;
  std::vector<Terms> star;
  std::vector<TensorTerms> cop;
  std::vector<Scalar> counit;
  std::vector<Terms> antipode;
  auto ensure = [&]() {
    if (!p) {
      if (gens.empty()) throw std::invalid_argument("generators must precede sections");
      p = std::make_shared<Presentation>(name, gens, weights);
      star.assign(gens.size(), Terms{});
      cop.assign(gens.size(), TensorTerms{});
      counit.assign(gens.size(), Scalar());
      antipode.assign(gens.size(), Terms{});
    }
  };
  bool has_star = false, has_cop = false, has_counit = false, has_antipode = false;
  while (std::getline(is, line)) {
    line = trim_ws(line);
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '[') {
      section = line;
      ensure();
      if (section == "[end]") break;
      continue;
    }
    if (section.empty()) {
      std::istringstream ls(line);
      std::string key;
      ls >> key;
      if (key == "name") ls >> name;
      else if (key == "generators") { std::string g; while (ls >> g) gens.push_back(g); }
      else if (key == "weights") { int w; while (ls >> w) weights.push_back(w); }
      else throw std::invalid_argument("unknown header key: " + key);
      continue;
    }
    auto [lhs, rhs] = split_arrow(line);
    if (section == "[rules]") {
      Terms head = parse_free(lhs, gens);
      if (head.size() != 1 || !head.begin()->second.is_one()) throw std::invalid_argument("rule head must be a word");
      p->add_rule(head.begin()->first, parse_free(rhs, gens));
    } else if (section == "[star]") {
      star[p->generator_index(lhs)] = parse_free(rhs, gens);
      has_star = true;
    } else if (section == "[coproduct]") {
      size_t bar = rhs.find('|');
      if (bar == std::string::npos) throw std::invalid_argument("coproduct line needs 'left | right'");
      Terms l = parse_free(trim_ws(rhs.substr(0, bar)), gens);
      Terms r = parse_free(trim_ws(rhs.substr(bar + 1)), gens);
      auto& slot = cop[p->generator_index(lhs)];
      for (const auto& [wl, cl] : l)
        for (const auto& [wr, cr] : r) add_term(slot, {wl, wr}, cl * cr);
      has_cop = true;
    } else if (section == "[counit]") {
      counit[p->generator_index(lhs)] = parse_scalar(rhs);
      has_counit = true;
    } else if (section == "[antipode]") {
      antipode[p->generator_index(lhs)] = parse_free(rhs, gens);
      has_antipode = true;
    } else {
      throw std::invalid_argument("unknown section " + section);
    }
  }
  ensure();
  if (has_star) p->set_star(star);
  if (has_cop) p->set_coproduct(cop);
  if (has_counit) p->set_counit(counit);
  if (has_antipode) p->set_antipode(antipode);
  return p;
}

}  // namespace qsl2r
