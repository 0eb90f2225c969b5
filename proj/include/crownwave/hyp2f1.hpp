#pragma once

#include <stdexcept>
#include <string>

#include "crownwave/common.hpp"

namespace crownwave {

// z landed on the branch cut [1, inf) without a side being specified
struct OnCut : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonConvergent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// which side of the cut: z = x + i0 (Plus) or z = x - i0 (Minus)
enum class Side { Plus, Minus };

struct HypTriple {
  cplx a, b, c;
};

// spectral parameter of the kernel family on the n-dimensional model;
// admissible values are lambda in i[0,inf) union [0, (n-1)/2)
struct SpectralParam {
  int n;
  cplx lambda;
  SpectralParam(int n_, cplx lambda_);
  double rho() const { return 0.5 * (n - 1); }
  cplx mass_squared() const { return rho() * rho() - lambda * lambda; }
};

// (a, b, c) = (rho + lambda, rho - lambda, n/2)
HypTriple kernel_triple(const SpectralParam& sp);

struct EvalResult {
  cplx value;
  std::string method;  // series | pfaff | connection_noninteger |
                       // connection_logseries | reciprocal | continuation
  double err_est;
};

// Gauss hypergeometric function, principal branch on C \ [1, inf).
// Throws OnCut within 1e-13 of the cut and NonConvergent when no
// evaluation path settles.
EvalResult gauss_2f1(cplx a, cplx b, cplx c, cplx z);

// one-sided limits F(x + i0), F(x - i0) on the cut; requires x > 1 + 1e-10
cplx boundary_2f1(const SpectralParam& sp, double x, Side side);

// F(x - i0) - F(x + i0), closed form for 1 < x < 2
cplx jump_2f1(const SpectralParam& sp, double x);

// leading singular term at z = 1; requires 0 < |1-z| < 0.1
cplx near_one_expansion(const SpectralParam& sp, cplx z);

}  // namespace crownwave
