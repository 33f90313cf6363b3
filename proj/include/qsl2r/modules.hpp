#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsl2r {

constexpr double kDefaultTol = 1e-9;
constexpr int kNmax = 16;
constexpr int kScanHorizon = 60;
constexpr int kClassSchemaVersion = 1;

class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// <x> = q^x + q^-x, [[x]] = q^x - q^-x, [x] = (q^-x - q^x)/(q^-1 - q).
double ang(double q, double x);
double dif(double q, double x);
double qnumber(double q, double x);

// Plain number, "qang:x" for <x> or "neg-qang:x" for -<x>; x may be "p/r".
double parse_lambda(const std::string& token, double q);

// Representative of b + 2Z in (a-2, a]; b' is the one of b + 2Z in (-a-2, -a].
double normalize_b(double a, double b, double tol = kDefaultTol);
double normalize_bprime(double a, double b, double tol = kDefaultTol);

struct ModuleParams {
  double q = 0.5;
  double a = 0;
  double lambda = 0;
  double b = 0;
};

enum class ModuleFamily { Canonical, Vplus, Vminus, FiniteQuotient };
std::string to_string(ModuleFamily f);

// g e_c = lo[k] e_{c-2} + mid[k] e_c + hi[k] e_{c+2} at c = c[k].
// *_abs bound the rounding scale of each coefficient (sum of |terms|).
struct Tridiagonal {
  std::vector<std::complex<double>> lo, mid, hi;
  std::vector<double> lo_abs, mid_abs, hi_abs;
};

using CMatrix = Eigen::MatrixXcd;

struct ModuleWindow {
  ModuleParams p;
  ModuleFamily family = ModuleFamily::Canonical;
  int W = 0;
  // Columns closer than `margin` to either end may reference dropped indices;
  // checks skip them. 0 for exact finite-dimensional quotients.
  int margin = 2;
  std::vector<double> c;
  std::vector<double> r;       // invariant form on the basis; empty if undefined
  std::vector<double> tplus;   // T_c^+ e_c = tplus e_{c+2}
  std::vector<double> tminus;  // T_c^- e_c = tminus e_{c-2}
  Tridiagonal X, Y, Z;
  std::vector<std::complex<double>> B;
  bool generic = true;  // no T^+- coefficient vanishes inside the window

  int size() const { return static_cast<int>(c.size()); }
  int index_of(double weight, double tol = 1e-9) const;  // -1 if absent
  // "X", "Y", "Z", "B", "Omega": column k is the image of e_{c[k]}.
  CMatrix matrix(const std::string& g) const;
  // T_c^+, A_c, T_c^- with the parameter c fixed to `weight`.
  CMatrix element(const std::string& which, double weight) const;
};

// Canonical lambda-basic module M_{lambda,b}; weights b + 2k, |k| <= W.
// Factors within tol of zero are set to 0, so r_c vanishes exactly past a
// truncation point.
ModuleWindow canonical_module(const ModuleParams& p, int W, double tol = kDefaultTol);

// V^{+-}_{lambda, b+2Z}; sign is +1 or -1.
ModuleWindow admissible_family(const ModuleParams& p, int sign, int W, double tol = kDefaultTol);

// N-dimensional quotient of M_{lambda,b} on weights b, ..., b + 2N - 2.
ModuleWindow finite_quotient(const ModuleParams& p, int N);

// Largest relative residual of the QSL2R relations on checked columns.
double relation_residual(const ModuleWindow& w);
// max |Omega - lambda| relative, on checked columns.
double casimir_residual(const ModuleWindow& w);
// max over c of |A_c e_c - lambda e_c| relative.
double eigen_residual(const ModuleWindow& w);
// <xi, X eta> = <Y xi, eta>, <xi, Z eta> = <Z xi, eta>, <xi, B eta> = -<B xi, eta>
// against diag(r); requires r.
double star_residual(const ModuleWindow& w);
// Largest |coefficient| of X, Y, Z over the window.
double coefficient_sup(const ModuleWindow& w);

// Brute-force form on the canonical module: <e_c', e_c> = coefficient of e_b
// in P_c'^* P_c e_b, where P_c is the T-word with P_c e_b = e_c and * is the
// algebra involution. Evaluated on an auxiliary window wide enough that no
// truncation enters.
struct GramReport {
  Eigen::MatrixXd gram;  // indexed like the window
  double diag_residual = 0;     // max |G_cc - r_c| / max(|r_c|, tiny)
  double offdiag_residual = 0;  // max |G_cc'| over its rounding scale
};
GramReport gram_oracle(const ModuleWindow& canonical);

enum class Support { TwoSided, LowerBounded, UpperBounded, Finite };
std::string to_string(Support s);

struct UnitarityVerdict {
  bool unitary = false;
  int case_no = 0;  // 1-4 when unitary
  Support support = Support::TwoSided;
  double c_min = -std::numeric_limits<double>::infinity();
  double c_max = std::numeric_limits<double>::infinity();
  double b_reduced = 0;
  double b_prime = 0;
};

bool same_verdict(const UnitarityVerdict& x, const UnitarityVerdict& y, double tol = kDefaultTol);

// Case analysis of the unitarity classification, support from solving the
// vanishing conditions of the norm factors analytically.
UnitarityVerdict unitarity_closed_form(const ModuleParams& p, double tol = kDefaultTol);
// Signs of the partial products of the norm factors up to n = horizon.
UnitarityVerdict unitarity_sign_scan(const ModuleParams& p, double tol = kDefaultTol,
                                     int horizon = kScanHorizon);
// Closed form, cross-validated by the scan; throws InternalConsistencyError.
UnitarityVerdict unitarity_test(const ModuleParams& p, double tol = kDefaultTol);

enum class Family { Lplus, Lminus, Dplus, Dminus, Eplus, Eminus, Trivial, OneDimC, VplusN, VminusN };
std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct Interval {
  double lo = 0, hi = 0;
  bool lo_closed = false, hi_closed = false;
  bool contains(double x, double tol = 0) const;
};

struct ClassEntry {
  Family family = Family::Lplus;
  std::string sector;  // "even", "odd" (parity of b - a), "none"
  std::optional<double> lambda;
  double b = 0;
  int n = 0;  // index n of D/E, dimension N of V_N
  Support support = Support::TwoSided;
  std::optional<Interval> range;  // continuous families
  std::optional<Interval> principal;
  std::vector<Interval> complementary;
  bool admissible = true;  // SL(2,R)_t-admissible

  std::string label() const;
};

nlohmann::json to_json(const ClassEntry& e);
ClassEntry class_entry_from_json(const nlohmann::json& j);
nlohmann::json classification_json(double q, double a, const std::vector<ClassEntry>& entries);
std::vector<ClassEntry> classification_from_json(const nlohmann::json& j);

std::string sector_of(double a, double b, double tol = kDefaultTol);

// The admissible irreducible *-representations for t = [[a]]; discrete
// families list their first nmax members. Every entry is checked against
// unitarity_test (throws InternalConsistencyError).
std::vector<ClassEntry> classify(double q, double a, int nmax = kNmax, double tol = kDefaultTol);

// True if the unitary module L_{lambda,b} is equivalent to some entry.
bool covered_by(const std::vector<ClassEntry>& entries, const ModuleParams& p, const UnitarityVerdict& v,
                double tol = kDefaultTol);

struct FiniteDimModule {
  ClassEntry entry;
  ModuleWindow window;
  double top_residual = 0;     // |T^+ e_top|
  double bottom_residual = 0;  // |T^- e_bottom|
  double submodule_residual = 0;  // coefficients leaking into the quotient
  double casimir = 0;          // max |Omega - lambda| relative
  double relations = 0;
};

// V_N^+ and V_N^-.
std::vector<FiniteDimModule> finite_dim_classify(double q, double a, int N);

struct Constituent {
  int case_no = 0;
  double lambda = 0;
  double b = 0;
  Support support = Support::TwoSided;
  // Submodule of V spanned by xi_c, c in b + 2Z between these (inclusive).
  double span_lo = -std::numeric_limits<double>::infinity();
  double span_hi = std::numeric_limits<double>::infinity();
  std::string description;
  UnitarityVerdict verdict;
};

struct SubquotientReport {
  bool irreducible = false;
  std::vector<Constituent> constituents;
};

// Unitary subquotients of V^{sign}_{lambda, chi}, chi = b + 2Z.
SubquotientReport subquotient_identify(double q, double a, double lambda, double chi, int sign,
                                       double tol = kDefaultTol);

struct ScanResult {
  std::vector<double> grid;
  std::vector<UnitarityVerdict> verdicts;
  std::vector<double> boundaries;           // refined sign-scan transitions
  std::vector<double> closed_form_bounds;   // closed-form interval ends for (a, b)
};

// Sign-scan verdicts on lo:hi:count, transitions refined by bisection.
ScanResult scan_lambda(double q, double a, double b, double lo, double hi, int count, double tol = kDefaultTol);

// CSV: c, r_c, iX/Z/iY lo mid hi, iB (iX, iY, Z and iB are real).
std::string window_csv(const ModuleWindow& w);

}  // namespace qsl2r
