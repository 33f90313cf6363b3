#pragma once

#include "qsl2r/ncpoly.hpp"

namespace qsl2r {

// T_c^+, A_c, T_c^- as polynomials in X, Y, Z with z = q^c symbolic. Works in
// any presentation that has generators X, Y, Z (PODLES or QSL2R).
struct SpectralElements {
  NCPoly Tplus, A, Tminus;
};

SpectralElements build_spectral_elements(const PresentationPtr& p);

// c -> c + k, i.e. z -> q^k z.
NCPoly shift_c(const NCPoly& x, int k);

// Omega_t = i q^-1 X + (q - q^-1) i Z B - i q Y in QSL2R.
NCPoly casimir(const PresentationPtr& qsl2r);

CheckReport verify_xyzt_inversion(const PresentationPtr& p);
CheckReport verify_att_relations(const PresentationPtr& p);
CheckReport verify_casimir(const PresentationPtr& qsl2r);
// B(qY - q^-1 X) = (q^-1 Y - qX)B.
CheckReport verify_bxy(const PresentationPtr& qsl2r);

}  // namespace qsl2r
