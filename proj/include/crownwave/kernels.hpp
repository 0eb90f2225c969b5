#pragma once
// Kernels on the crown domains and their boundary values on dS^n: the
// hypergeometric kernel Psi and the power kernel Phi at crown points,
// spherical eigendistributions obtained as approach-path limits, pairings
// with radial test functions by two independent routes, eigenvalue and
// recursion residuals in normal coordinates, and Gram positivity.
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crownwave/common.hpp"
#include "crownwave/dist1d.hpp"
#include "crownwave/hyp2f1.hpp"
#include "crownwave/lorentz.hpp"

namespace crownwave {

// evaluation point is within cone tolerance of the basepoint's lightcone
struct OnConeSingularity : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// dimension and spectral parameter; the eigenvalue is kept in mass form
// m^2 = rho^2 - lambda^2 with rho = (n-1)/2.
struct KernelParams {
  ModelDims dims;
  cplx lambda;
  KernelParams(int n, cplx lam);
  cplx msq() const;
  SpectralParam spectral() const { return SpectralParam(dims.n, lambda); }
};

enum class SphKind { Psi, PsiTilde, PhiPow, PhiTildePow, Difference };

// A spherical distribution on dS^n attached to a basepoint: boundary value
// of Psi (Forward approach), PsiTilde (Backward), the power kernel Phi or
// its conjugate with exponent phipow_exponent, or the difference
// Psi - PsiTilde at the same basepoint.
struct SphericalDist {
  SphKind kind;
  DeSitterPoint basepoint;
  KernelParams params;
  cplx phipow_exponent;  // Phi kinds only; (2 - n)/2 by default
  SphericalDist(SphKind k, const DeSitterPoint& x, const KernelParams& p);
};

// Radial mollifier in normal coordinates: profile(|v|) in the chart at
// chart_base, supported strictly inside the chart (radius < 0.5). When
// pre is set the function evaluates at pre . y instead of y, which is how
// group-transformed test functions are represented.
struct TestFnDS {
  DeSitterPoint chart_base;
  double radius;
  TestFn1D profile;
  Chart chart;
  std::optional<Isometry> pre;
  TestFnDS(const DeSitterPoint& base, double rad);
  double value(const DeSitterPoint& y) const;
  TestFnDS composed(const Isometry& g) const;  // y -> value(g . y)
  bool radial_at(const DeSitterPoint& x) const;
};

// t-grid of crown approach points z_t, strictly increasing in (1, pi/2),
// and the Richardson order used to extrapolate in s = cos t.
// Default grid suits smooth approaches (support away from the cone). For
// bumps straddling the cone the s-expansion coefficients grow with n and
// the Cauchy gate needs a deeper grid and order 3.
struct ApproachProtocol {
  std::vector<double> t_grid{1.2, 1.35, 1.45, 1.52, 1.55};
  int order = 2;
};

// Psi(z, w) = 2F1(rho + lambda, rho - lambda; n/2; (1 + [z, conj w])/2).
// Both points must lie on the same branch.
cplx psi_kernel(const SpectralParam& sp, const CrownPoint& z, const CrownPoint& w);

// Phi(z, w; mu) = ((1 - [z, conj w])/2)^mu, principal power.
cplx phi_kernel(const CrownPoint& z, const CrownPoint& w, cplx mu);

// Kernel of dist at a complexified point z against a real quadric point y.
cplx kernel_at_real(const SphericalDist& dist, const CVec& z, const DeSitterPoint& y);

struct PointEval {
  cplx value;
  CausalTag tag;
};

// Boundary value of the distribution at a point off the basepoint's cone.
// Throws OnConeSingularity within |[y-x, y-x]| <= 1e-8 (1 + |y|^2).
PointEval eval_pointwise(const SphericalDist& dist, const DeSitterPoint& y);

struct KernelPairing {
  cplx value;             // primary route: approach-path extrapolation
  double err;             // gap between the last two extrapolants
  std::vector<cplx> per_t;
  bool has_secondary = false;
  cplx secondary{0.0, 0.0};
  double secondary_err = 0.0;
  std::string secondary_method = "none";  // outside-direct | cone-split |
                                          // coarea-dist1d | none
};

// Pairing <dist, phi>. Primary route: chart quadrature of the kernel at
// z_t over a fixed mesh, then Richardson in s = cos t; throws NonConvergent
// when successive extrapolants are not Cauchy at 1e-4. Secondary route,
// when available: direct quadrature of eval_pointwise with cone-split
// graded meshes, or the 1-D pullback pairing for the even-dimensional
// power kernel. Both results are recorded.
KernelPairing pairing(const SphericalDist& dist, const TestFnDS& phi,
                      const ApproachProtocol& protocol = {});

// |(box - m^2)(eval o Exp_y)(0)| / |value| by central differences with
// step h in the chart at y; the caller keeps y at distance >= 10 h from
// the cone. Phi kinds use the eigenvalue (n/2)((n-2)/2).
double eigen_residual(const SphericalDist& dist, const DeSitterPoint& y, double h);

// max over the y-grid of |(box + (p+1)(p+n)) Phi^{p+1} - (p+1)(p+n/2) Phi^p|
// at a crown point z, second derivatives by central differences.
double recursion_check(const CrownPoint& z, double lambda_p,
                       const std::vector<DeSitterPoint>& ygrid, double h);

struct GramResult {
  std::vector<double> eigs;  // spectrum of the real symmetric embedding
  double min_eig = 0.0, max_eig = 0.0;
  double herm_defect = 0.0;  // max |G_ij - conj(G_ji)|
};

// Gram matrix G_ij = Psi(z_i, z_j) at crown points: Hermitian defect and
// the spectrum via cyclic Jacobi on [[A, -B], [B, A]] where G = A + iB.
GramResult gram_psd(const std::vector<CrownPoint>& pts, const SpectralParam& sp);

// One-sided boundary value split into analytic pieces near the cone:
//   value(w, future) = regular(w) + coef(w) * sfactor(w, future)
// with w = (1 - [x, y])/2 and `future` the time side of y relative to the
// basepoint. regular and coef are analytic on |w| < 1, so they can be
// tabulated across the cone; the singular factor (a sided power, or a
// sided log for n = 2) is exact. Agrees with eval_pointwise off the cone.
// Not available for the difference kind or for even n >= 4.
struct BoundarySplit {
  SphKind kind;
  int n;
  cplx exponent;           // power factor exponent (ignored when log_factor)
  bool log_factor = false; // sfactor = ln w, sided
  bool pure_power = false; // regular = 0, coef = 1
  cplx k_regular{0.0, 0.0}, k_singular{0.0, 0.0};
  HypTriple tr{};
  std::vector<cplx> reg_series, coef_series;  // n = 2 log expansions in w

  cplx regular(double w) const;
  cplx coef(double w) const;
  cplx sfactor(double w, bool future) const;
  cplx value(double w, bool future) const;
};

BoundarySplit boundary_split(const SphericalDist& dist);

}  // namespace crownwave
