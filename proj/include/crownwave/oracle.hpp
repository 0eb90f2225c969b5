#pragma once

#include <string>

#include "crownwave/common.hpp"

namespace crownwave {

// Reference values computed in 256-bit arithmetic (MPFR), independent of
// the double-precision evaluation paths. Used to freeze expected values.

struct OracleResult {
  cplx value;
  long terms;
  bool converged;
  std::string provenance;  // human-readable description of the computation
};

// Gauss series sum_{k} (a)_k (b)_k / ((c)_k k!) z^k in 256-bit precision.
// Stops when |term| < 1e-65 |sum| holds three times in a row (k > 10);
// gives up past 200000 terms. Callers must keep |z| < 1.
OracleResult oracle_2f1(cplx a, cplx b, cplx c, cplx z);

// real-axis gamma/digamma references via mpfr_gamma / mpfr_digamma
double oracle_gamma_real(double x);
double oracle_digamma_real(double x);

}  // namespace crownwave
