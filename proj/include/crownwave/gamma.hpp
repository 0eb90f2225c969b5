#pragma once

#include "crownwave/common.hpp"

namespace crownwave {

// Gamma function via the Lanczos approximation (g = 7, 9 coefficients),
// reflection for Re z < 1/2. Good to ~1e-13 relative on the parameter
// ranges used here. Poles at nonpositive integers return inf/nan.
cplx gamma_fn(cplx z);

// Digamma: reflection into Re z >= 1/2, recurrence up to Re z >= 12,
// then the standard asymptotic series with Bernoulli coefficients.
// See DLMF 5.11.2 / 5.5.2 / 5.5.4.
cplx digamma_fn(cplx z);

// true when z is within tol of a nonpositive integer (gamma pole)
bool near_gamma_pole(cplx z, double tol = 1e-12);

}  // namespace crownwave
