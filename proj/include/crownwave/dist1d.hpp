#pragma once

#include <functional>
#include <string>
#include <vector>

#include "crownwave/common.hpp"
#include "crownwave/hyp2f1.hpp"  // Side

namespace crownwave {

// Smooth compactly supported test function on the line:
//   phi(x) = x^k * exp(-1/(1-s^2)),  s = (x - center)/halfwidth, |s| < 1
// k = 0 gives the plain mollifier. Derivatives are exact (symbolic
// profile derivatives plus Leibniz), available to order 12.
struct TestFn1D {
  int monomial_k;
  double center, halfwidth;
  TestFn1D(int k, double c, double h);
  double lo() const { return center - halfwidth; }
  double hi() const { return center + halfwidth; }
  double value(double x) const;
  double derivative(int order, double x) const;
};

// bump profile exp(-1/(1-s^2)) and its exact derivatives in s
double mollifier_profile(double s);
double mollifier_profile_deriv(int order, double s);

enum class DistKind {
  XPlusPow,   // x_+^lambda
  XMinusPow,  // x_-^lambda
  I0Pow,      // (x + side*i0)^lambda
  LogI0,      // ln(x + side*i0)
  DeltaDeriv, // delta^{(k)}
  Heaviside,  // H(x)
  ExpInv,     // exp(-1/x) H(x)
  PvPow,      // principal value x^{-k}
};

struct ModelDist1D {
  DistKind kind;
  cplx lambda = 0.0;       // power families
  Side side = Side::Plus;  // I0Pow, LogI0
  int k = 0;               // DeltaDeriv order / PvPow power

  static ModelDist1D x_plus_pow(cplx lam);
  static ModelDist1D x_minus_pow(cplx lam);
  static ModelDist1D i0_pow(cplx lam, Side s);
  static ModelDist1D log_i0(Side s);
  static ModelDist1D delta_deriv(int k);
  static ModelDist1D heaviside();
  static ModelDist1D exp_inv();
  static ModelDist1D pv_pow(int k);
};

struct PairingResult {
  cplx value;
  double err_est;
  std::string method;  // direct | regularized | exact
};

// Low-level pairing target: values anywhere, exact derivatives at 0 (for
// subtraction terms), support bounds, and a radius within which the
// order-12 Taylor polynomial at 0 is accurate (cancellation control).
struct Fn1D {
  std::function<cplx(double)> value;
  std::vector<cplx> derivs0;  // derivative j at 0, j = 0..12
  double lo = 0.0, hi = 0.0;
  double taylor_radius = 0.0;  // |x| below which the order-12 Taylor is used
  double panel_cap = 1e9;      // max quadrature panel width (oscillation)
  double subtract_extent = 1e9;  // cap on the Taylor-subtraction interval
};

Fn1D to_fn(const TestFn1D& phi);

PairingResult pair_1d(const ModelDist1D& dist, const TestFn1D& phi);
PairingResult pair_1d_fn(const ModelDist1D& dist, const Fn1D& f);

// decomposition of (x +/- i0)^lambda into model distributions
std::vector<std::pair<cplx, ModelDist1D>> i0_decompose(cplx lambda, Side side);

cplx log_i0_pair(Side side, const TestFn1D& phi);

struct DecayTable {
  std::vector<double> tau;        // positive, ascending
  std::vector<double> mag_plus;   // |F(+tau)|
  std::vector<double> mag_minus;  // |F(-tau)|
  double slope_plus, slope_minus; // fitted algebraic exponents (top octave)
};

DecayTable windowed_fourier(const ModelDist1D& dist, const TestFn1D& window,
                            const std::vector<double>& taus);
DecayTable windowed_fourier_fn(const std::function<cplx(double)>& f, double lo,
                               double hi, const TestFn1D& window,
                               const std::vector<double>& taus);

// least squares of log|F| against log tau over the top octave
double decay_exponent_fit(const std::vector<double>& tau,
                          const std::vector<double>& mag);
inline bool rapid_decay(double fitted_exponent) { return fitted_exponent <= -6.0; }

}  // namespace crownwave
