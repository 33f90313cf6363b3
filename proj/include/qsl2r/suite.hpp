#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "qsl2r/ncpoly.hpp"

namespace qsl2r {

struct VerifyOptions {
  // "all" or one of uqsu2, oqsu2, podles, qsl2r.
  std::string presentation = "all";
  // Replace the PODLES rule XY by XY -> 1 before checking.
  bool corrupt = false;
  // > 0: run only coideal orthogonality up to this degree.
  int orthogonality_only_degree = 0;
  int orthogonality_degree = 3;
  int star_pairs = 100;
  int spectrum_nmax = 8;
  unsigned seed = 20240611;
  // Presentation dump to check instead of a bundled one (confluence, star).
  std::string loaded_text;
};

struct SuiteSection {
  std::string name;
  CheckReport report;
  double seconds = 0;
};

struct VerifyReport {
  bool ok = true;
  std::vector<SuiteSection> sections;
  std::string first_failure;  // "section: line"; empty when ok

  nlohmann::json to_json() const;
  std::string text() const;
};

// Throws std::invalid_argument for an unknown presentation name.
VerifyReport run_verify(const VerifyOptions& opt);

// star(ab) = star(b) star(a) on `pairs` random pairs of normal polynomials.
CheckReport verify_star_antiautomorphism(const PresentationPtr& p, int pairs, unsigned seed);
CheckReport verify_confluence(const PresentationPtr& p);

}  // namespace qsl2r
