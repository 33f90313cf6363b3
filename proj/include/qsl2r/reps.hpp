#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

#include "qsl2r/scalar.hpp"

namespace qsl2r {

// Spins are carried as n = 2j.
int parse_spin(const std::string& text);
std::string spin_str(int n);

class SpectralMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoSphericalVector : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Gauge { Orthonormal, Rational };

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using ScalarMatrix = std::vector<std::vector<Scalar>>;

struct RepMatrix {
  int n = 0;
  Gauge gauge = Gauge::Orthonormal;
  CMatrix numeric;     // orthonormal gauge
  ScalarMatrix exact;  // rational gauge
};

// Orthonormal gauge: e, f, k, kinv, X, Y, omega, Omega.
// Rational gauge: k and J, the tridiagonal operator of the P_p recurrence
// (acting in the variable mu = q^{n-a} lambda).
RepMatrix rep_matrix(int n, const std::string& generator, Gauge gauge, const Assignment& as = {});

// pi_{n/2}(i B_t) with t = [[a]], orthonormal basis xi_0..xi_n.
CMatrix ib_matrix(int n, const Assignment& as);

struct ExactSpectrumReport {
  bool ok = false;
  int n = 0;
  ScalarMatrix jacobi;
  Scalar charpoly;  // det(L - J), L standing for mu
  Scalar product;   // prod_p (L - q^{n-a}[[a+n-2p]])
  Scalar residual;
};

// Exact identity det(mu - J) = prod_p (mu - q^{2n-2p} + q^{-2a+2p}); n <= 12.
ExactSpectrumReport spectrum_exact(int n);
// Determinant of a square Scalar matrix by fraction-free elimination.
Scalar determinant(ScalarMatrix m);

struct LabelledEigenvalue {
  int p = 0;         // label c = a + n - 2p
  double c = 0;
  double value = 0;
  double expected = 0;
  double residual = 0;
};

// Ascending; throws SpectralMismatch past 1e-8 * max(1, |[a+n]|).
std::vector<LabelledEigenvalue> spectrum_numeric(int n, const Assignment& as);
// Same labelling, each eigenvalue refined to relative accuracy by bisection on
// Sturm counts in 320-bit arithmetic (the dense solver is only accurate
// relative to the spectral radius). No mismatch check; residual is absolute.
std::vector<LabelledEigenvalue> spectrum_graded(int n, const Assignment& as);

struct SphericalVector {
  int n = 0;
  CVector v;
  double eigenvalue = 0;  // [a]
  double residual = 0;
};

// Unit eigenvector of pi_{n/2}(iB_t) at [a+n-2p], first nonzero entry real positive.
CVector eigenvector_at(int n, int p, const Assignment& as);
// Requires n even; throws NoSphericalVector otherwise.
SphericalVector spherical_vector(int n, const Assignment& as);
// Dimension of ker(pi_{n/2}(iB_t) - value) by singular values below tol.
int eigenspace_dimension(int n, double value, const Assignment& as, double tol = 1e-7);

// Largest relative residual |lhs - rhs| / max(1, |lhs|, |rhs|) (max-entry
// norm) of the U_q(su(2)) relations in the e,f,k and X,Y,k,Omega forms.
double relation_residual(int n, const Assignment& as);

nlohmann::json spectrum_json(int n, const Assignment& as, const std::vector<LabelledEigenvalue>& eig);
nlohmann::json spherical_json(const SphericalVector& s, const Assignment& as);

}  // namespace qsl2r
