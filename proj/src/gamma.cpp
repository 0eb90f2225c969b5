#include "crownwave/gamma.hpp"

#include <cmath>

namespace crownwave {

namespace {

// Lanczos coefficients, g = 7
const double kLanczos[9] = {
    0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
    771.32342877765313,       -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};

cplx gamma_core(cplx z) {
  // requires Re z >= 0.5
  z -= 1.0;
  cplx x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + double(i));
  const cplx t = z + 7.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

cplx digamma_asym(cplx z) {
  // requires |z| large, Re z > 0
  static const double B[7] = {1.0 / 12.0,  -1.0 / 120.0,     1.0 / 252.0,
                              -1.0 / 240.0, 1.0 / 132.0,     691.0 / 32760.0,
                              -1.0 / 12.0};
  const cplx u = 1.0 / (z * z);
  cplx tail = 0.0;
  for (int k = 6; k >= 0; --k) tail = u * (B[k] + tail);
  return std::log(z) - 0.5 / z - tail;
}

}  // namespace

cplx gamma_fn(cplx z) {
  if (z.real() < 0.5) {
    // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return kPi / (std::sin(kPi * z) * gamma_core(1.0 - z));
  }
  return gamma_core(z);
}

cplx digamma_fn(cplx z) {
  if (z.real() < 0.5) {
    // psi(1-z) - psi(z) = pi cot(pi z)
    return digamma_fn(1.0 - z) - kPi * std::cos(kPi * z) / std::sin(kPi * z);
  }
  cplx acc = 0.0;
  while (z.real() < 12.0) {
    acc -= 1.0 / z;
    z += 1.0;
  }
  return digamma_asym(z) + acc;
}

bool near_gamma_pole(cplx z, double tol) {
  if (std::fabs(z.imag()) > tol) return false;
  const double r = z.real();
  if (r > 0.5) return false;
  return std::fabs(r - std::round(r)) <= tol;
}

}  // namespace crownwave
