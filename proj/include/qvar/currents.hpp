#pragma once

#include "qvar/forms.hpp"
#include "qvar/minors.hpp"
#include "qvar/qsheet_field.hpp"

namespace qvar {

// <T_{u,Omega}, omega> for an m-form omega on R^{m+n}: cellwise sum over
// sheets of sigma_alpha * coeff(x, u_i) * M_{alpha beta}(Du_i), with exact
// quadrature for polynomial coefficients.
double pair_graph(const QSheetField& u, const DifferentialForm& omega,
                  int points_per_axis = 0);

// <T_{u, boundary}, omega> for an (m-1)-form: sum over the 2m faces with the
// outward-normal induced orientation, faces ordered (-x1, +x1, ..., -xm, +xm).
double pair_boundary(const QSheetField& u, const DifferentialForm& omega,
                     int points_per_axis = 0);

// <T_u, d omega> - <T_{u, boundary}, omega>; vanishes to quadrature precision
// for piecewise-affine fields and polynomial forms.
double stokes_residual(const QSheetField& u, const DifferentialForm& omega,
                       int points_per_axis = 0);

// integral over the domain of sum_i P(Dw1_i) minus the same for w2; the
// boundary traces must agree within 1e-9 in sup-G.
double null_lagrangian_gap(const PolyaffineFn& P, const QSheetField& w1, const QSheetField& w2);

// integral over the domain of sum_i P(Du_i) (cellwise exact)
double polyaffine_energy(const PolyaffineFn& P, const QSheetField& u);

}  // namespace qvar
