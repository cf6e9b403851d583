#pragma once

#include "qvar/affine_qmap.hpp"
#include "qvar/forms.hpp"
#include "qvar/integrand.hpp"
#include "qvar/minors.hpp"
#include "qvar/qsheet_field.hpp"
#include "qvar/rng.hpp"

namespace qvar {

// Deterministic builders for randomized experiment batteries.

QPoint random_qpoint(CounterRng& rng, int n, int q, double scale = 1.0);

// Distinct random centers, random slopes.
AffineQMap random_affine_qmap(CounterRng& rng, int m, int n,
                              const std::vector<int>& multiplicities, double scale = 1.0);

// Random quadratic form (symmetric (nm)x(nm), entries ~ scale * N(0,1)).
QuadraticIntegrand random_quadratic_form(CounterRng& rng, int n, int m, double scale = 1.0);

// Valid Q-field from continuous selections: affine parts plus piecewise bumps
// plus optional vertex noise and crossing pairs; entry order is randomly
// relabeled per vertex so matchings are exercised.
struct RandomFieldSpec {
    int m = 2, n = 1, q = 2;
    int cells_per_side = 4;
    double scale = 1.0;
    double noise = 0.0;       // per-vertex jitter amplitude
    bool crossing_pair = false;  // sheets 0 and 1 mirror across a hyperplane (branching)
    CubeDomain domain = CubeDomain::unit(2);
};
QSheetField random_field(CounterRng& rng, const RandomFieldSpec& spec);

// Boundary-pinned competitor for the group (mult, a, L): trace mult[[a + Lx]]
// on the unit cube, random interior perturbation.
QSheetField random_pinned_competitor(CounterRng& rng, int mult, const Eigen::VectorXd& a,
                                     const Eigen::MatrixXd& L, int cells_per_side,
                                     double amplitude);

// Random polynomial of bounded total degree in `vars` variables.
Polynomial random_polynomial(CounterRng& rng, int vars, int max_degree, int terms,
                             double scale = 1.0);

// Random polynomial-coefficient form of the given degree on R^{m+n}.
DifferentialForm random_form(CounterRng& rng, int m, int n, int degree, int coeff_degree,
                             int terms, double scale = 1.0);

PolyaffineFn random_polyaffine(CounterRng& rng, int m, int n, double scale = 1.0);

}  // namespace qvar
