#include "qsl2r/suite.hpp"

#include <chrono>
#include <random>
#include <sstream>
#include <stdexcept>

#include "qsl2r/reps.hpp"
#include "qsl2r/sl2r.hpp"

namespace qsl2r {

namespace {

Scalar random_coeff(std::mt19937& rng) {
  std::uniform_int_distribution<int> small(-3, 3), pw(-2, 2);
  Scalar c = Scalar(GaussQ(mpq_class(small(rng)), mpq_class(small(rng))));
  return c * Scalar::var(Var::u, pw(rng)) * Scalar::var(Var::va, pw(rng) % 2);
}

NCPoly random_poly(const PresentationPtr& p, std::mt19937& rng, int max_len) {
  std::vector<Word> words = p->normal_words(max_len);
  std::uniform_int_distribution<size_t> pick(0, words.size() - 1);
  Terms t;
  for (int k = 0; k < 3; ++k) add_term(t, words[pick(rng)], random_coeff(rng));
  return NCPoly(p, t);
}

template <class F>
void timed(VerifyReport& out, const std::string& name, F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  SuiteSection s{name, f(), 0};
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!s.report.ok && out.ok) {
    out.ok = false;
    for (const std::string& l : s.report.lines)
      if (l.rfind("FAIL", 0) == 0) {
        out.first_failure = name + ": " + l.substr(5);
        break;
      }
  }
  out.sections.push_back(std::move(s));
}

CheckReport spectrum_suite(int nmax) {
  CheckReport rep;
  for (int n = 0; n <= nmax; ++n) {
    ExactSpectrumReport r = spectrum_exact(n);
    if (r.ok) rep.pass("det(mu - J) = prod_p (mu - q^{n-a}[[a+n-2p]]) at n = " + std::to_string(n));
    else rep.fail("spectrum identity at n = " + std::to_string(n) + ": residual " + r.residual.str());
  }
  return rep;
}

void merge(CheckReport& into, const CheckReport& r) {
  into.ok = into.ok && r.ok;
  into.lines.insert(into.lines.end(), r.lines.begin(), r.lines.end());
}

}  // namespace

CheckReport verify_confluence(const PresentationPtr& p) {
  CheckReport rep;
  ConfluenceReport c = confluence_check(*p);
  std::string why;
  if (!rules_decreasing(*p, &why)) rep.fail(p->name() + " rules not decreasing: " + why);
  if (c.ok) rep.pass(p->name() + " confluent (" + std::to_string(c.checked.size()) + " overlaps)");
  else rep.fail(p->name() + " " + c.failure);
  return rep;
}

CheckReport verify_star_antiautomorphism(const PresentationPtr& p, int pairs, unsigned seed) {
  CheckReport rep;
  std::mt19937 rng(seed);
  for (int n = 0; n < pairs; ++n) {
    NCPoly a = random_poly(p, rng, 3), b = random_poly(p, rng, 3);
    NCPoly res = (a * b).star() - b.star() * a.star();
    if (!res.is_zero()) {
      rep.fail(p->name() + " star(ab) != star(b)star(a) for a = " + a.str() + ", b = " + b.str());
      return rep;
    }
    if (!(a.star().star() == a)) {
      rep.fail(p->name() + " star is not an involution on " + a.str());
      return rep;
    }
  }
  rep.pass(p->name() + " star anti-automorphism on " + std::to_string(pairs) + " random pairs");
  return rep;
}

VerifyReport run_verify(const VerifyOptions& opt) {
  const std::string& which = opt.presentation;
  if (which != "all" && which != "uqsu2" && which != "oqsu2" && which != "podles" && which != "qsl2r")
    throw std::invalid_argument("unknown presentation '" + which + "'");
  auto want = [&](const std::string& n) { return which == "all" || which == n; };

  PresentationPtr uq = make_uqsu2(), oq = make_oqsu2(), qs = make_qsl2r();
  std::shared_ptr<Presentation> pod_mut = make_podles();
  if (opt.corrupt) {
    Word xy{static_cast<uint8_t>(pod_mut->generator_index("X")), static_cast<uint8_t>(pod_mut->generator_index("Y"))};
    pod_mut->replace_rule(xy, word_term(Word{}));
  }
  PresentationPtr pod = pod_mut;
  VerifyReport out;

  if (opt.orthogonality_only_degree > 0) {
    Pairing P(oq, uq);
    timed(out, "orthogonality", [&] { return verify_orthogonality(P, pod, opt.orthogonality_only_degree); });
    return out;
  }

  if (!opt.loaded_text.empty()) {
    PresentationPtr p = Presentation::load(opt.loaded_text);
    timed(out, "confluence", [&] { return verify_confluence(p); });
    if (!p->star_images().empty())
      timed(out, "star", [&] { return verify_star_antiautomorphism(p, opt.star_pairs, opt.seed); });
    if (p->has_coproduct()) timed(out, "hopf", [&] { return verify_hopf_structure(p); });
    return out;
  }

  std::vector<PresentationPtr> ps;
  for (const auto& [n, p] : std::vector<std::pair<std::string, PresentationPtr>>{
           {"uqsu2", uq}, {"oqsu2", oq}, {"podles", pod}, {"qsl2r", qs}})
    if (want(n)) ps.push_back(p);

  timed(out, "confluence", [&] {
    CheckReport r;
    for (const auto& p : ps) merge(r, verify_confluence(p));
    return r;
  });
  timed(out, "dump/load round trip", [&] {
    CheckReport r;
    for (const auto& p : ps) {
      std::string text = p->dump();
      if (Presentation::load(text)->dump() == text) r.pass(p->name() + " dump reloads identically");
      else r.fail(p->name() + " dump does not reload identically");
    }
    return r;
  });
  timed(out, "star", [&] {
    CheckReport r;
    unsigned s = opt.seed;
    for (const auto& p : ps) merge(r, verify_star_antiautomorphism(p, opt.star_pairs, s++));
    return r;
  });
  if (want("uqsu2") || want("oqsu2"))
    timed(out, "hopf", [&] {
      CheckReport r;
      if (want("uqsu2")) merge(r, verify_hopf_structure(uq));
      if (want("oqsu2")) merge(r, verify_hopf_structure(oq));
      return r;
    });
  if (want("qsl2r")) {
    timed(out, "casimir", [&] { return verify_casimir(qs); });
    timed(out, "att relations", [&] { return verify_att_relations(qs); });
    timed(out, "xyzt inversion", [&] { return verify_xyzt_inversion(qs); });
    timed(out, "bxy commutation", [&] { return verify_bxy(qs); });
  }
  if (want("podles") || want("oqsu2")) {
    timed(out, "et images", [&] { return verify_et_images(oq, pod, 4); });
    Pairing P(oq, uq);
    timed(out, "orthogonality", [&] { return verify_orthogonality(P, pod, opt.orthogonality_degree); });
    timed(out, "pairing axioms", [&] { return verify_pairing_axioms(P, 4); });
  }
  if (which == "all") timed(out, "spectrum identity", [&] { return spectrum_suite(opt.spectrum_nmax); });
  return out;
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json j = {{"ok", ok}, {"first_failure", first_failure}};
  nlohmann::json secs = nlohmann::json::array();
  for (const SuiteSection& s : sections)
    secs.push_back({{"name", s.name}, {"ok", s.report.ok}, {"seconds", s.seconds}, {"lines", s.report.lines}});
  j["sections"] = secs;
  return j;
}

std::string VerifyReport::text() const {
  std::ostringstream os;
  for (const SuiteSection& s : sections) {
    os << "[" << (s.report.ok ? "PASS" : "FAIL") << "] " << s.name << "\n";
    for (const std::string& l : s.report.lines) os << "  " << l << "\n";
  }
  os << (ok ? "all checks passed" : "FAILED: " + first_failure) << "\n";
  return os.str();
}

}  // namespace qsl2r
