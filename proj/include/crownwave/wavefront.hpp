#pragma once
// Analytic-wavefront predictor for the spherical boundary distributions
// and a numerical direction-decay probe.
//
// Everything is phrased in the normal chart at the distribution basepoint
// x: a cotangent element is (v, xi) with v the chart coordinates of the
// base point (time first) and xi a chart covector. The predicted sets are
// built from three rules: the characteristic set of the wave operator,
// the pullback of the 1-D model wavefront of the kernel boundary value
// through f(v) = (1 + C([v,v]))/2, and propagation of the along-cone
// pieces into the apex along the Hamiltonian flow of p(xi) = xi_0^2 -
// sum_i xi_i^2. Ambient covectors are exported through the closed-form
// chart codifferential.
#include <string>
#include <vector>

#include "crownwave/common.hpp"
#include "crownwave/kernels.hpp"
#include "crownwave/lorentz.hpp"

namespace crownwave {

// single tolerance for all set-membership predicates (scale-free where
// the quantity has a scale; absolute on chart coordinates)
inline constexpr double kAngularTol = 1e-9;

// cotangent element in the basepoint chart; xi is normalized on entry
struct CotangentDir {
  RVec v, xi;
  CotangentDir(RVec base, RVec dir);  // rejects dir = 0
};

// principal symbol p(xi) = xi_0^2 - sum_{i>=1} xi_i^2
double principal_symbol(const RVec& xi);
// |p(xi)| <= tol |xi|^2; conic by construction
bool char_membership(const RVec& v, const RVec& xi, double tol = kAngularTol);

// null bicharacteristic: v(t) = v0 + t (2 xi_0, -2 xi_1, ...), xi constant
struct GeodesicStrip {
  RVec v0, xi0;
  double T = 0.0;
  double rk4_dev = 0.0;  // max closed form vs RK4 gap over [0, T]
  RVec v_at(double t) const;
  RVec xi_at(double t) const;
};

// Throws std::invalid_argument off the characteristic set. The closed
// form is cross-checked against an RK4 integration of the Hamilton
// equations with finite-difference gradients of principal_symbol; a
// deviation above 1e-10 throws (it would mean a sign convention slipped).
GeodesicStrip hamiltonian_flow(const RVec& v0, const RVec& xi0, double T);

// gradient of the pullback phase f(v) = (1 + C([v,v]))/2:
//   df_v = (-S([v,v])/4) * (-2 v_0, 2 v_1, ..., 2 v_{n-1})
// vanishes on the chart only at v = 0.
RVec df_pullback(const RVec& v);

enum class WfKind { PsiSpec, PsiTildeSpec, PhiSpec, PhiTildeSpec, UnionSpec };

struct WfSpec {
  WfKind kind;
  DeSitterPoint basepoint;
};

WfSpec predicted_wf(WfKind kind, const DeSitterPoint& basepoint);

// Membership of (v, xi), conic in xi. PsiSpec: v null nonzero with
// xi along (-v_0, v) for v_0 > 0, along (v_0, -v) for v_0 < 0; or the
// apex v = 0 with xi null and xi_0 < 0. PsiTildeSpec is the antipode
// xi -> -xi; the Phi kinds coincide with the Psi kinds; UnionSpec is
// PsiSpec or PsiTildeSpec.
bool wf_contains(const WfSpec& spec, const RVec& v, const RVec& xi,
                 double tol = kAngularTol);
bool wf_contains(const WfSpec& spec, const CotangentDir& cd,
                 double tol = kAngularTol);

// 1-D model wavefront of the kernel boundary value at its singular point:
// {(1, tau > 0)} for the upper-side limit, {(1, tau < 0)} for the lower
enum class ModelWfSide { TauPositive, TauNegative };
// chart half-space for the pullback step; the whole chart is rejected
// because df vanishes at v = 0 (the apex is handled by propagation)
enum class ChartRegion { PositiveTime, NegativeTime, WholeChart };

// along-cone piece: {(v, tau_sign * tau * df_v): v null in the region}
struct ConePiece {
  ModelWfSide side;
  ChartRegion region;
  bool contains(const RVec& v, const RVec& xi, double tol = kAngularTol) const;
};

ConePiece pullback_wf(ModelWfSide side, ChartRegion region);

// apex piece collected by flowing along-cone elements to v = 0;
// xi0_sign = 0 encodes the empty piece
struct ApexPiece {
  int xi0_sign = 0;
  bool contains(const RVec& v, const RVec& xi, double tol = kAngularTol) const;
};

// flows random elements of each piece to the apex along hamiltonian_flow
// and collects the limiting covectors; their time signs must agree
ApexPiece apex_closure(const std::vector<ConePiece>& pieces, int n,
                       int samples = 64, unsigned seed = 7u);

// two half-space pullback pieces plus the propagated apex piece
struct AssembledWf {
  std::vector<ConePiece> pieces;
  std::vector<ApexPiece> apexes;
  bool contains(const RVec& v, const RVec& xi, double tol = kAngularTol) const;
};

AssembledWf assemble_wf(WfKind kind, int n);

// chart codifferential, closed form: chart covector of an ambient one at
// (x, v), its minimal-norm ambient representative, and the isometry
// action eta g eta on ambient covectors
RVec chart_covector(const DeSitterPoint& x, const RVec& vchart,
                    const RVec& xi_ambient);
RVec ambient_covector(const DeSitterPoint& x, const RVec& vchart,
                      const RVec& xi_chart);
RVec isometry_covector(const Isometry& g, const RVec& xi_ambient);

struct DirectionDecay {
  RVec xi;                  // unit covector in the chart at the probe base
  std::vector<double> mag;  // |F(tau)| per tau
  double exponent = 0.0;    // log-log slope over the top octave
  double floor_est = 0.0;   // quadrature noise floor for the magnitudes
  bool singular = false;    // exponent >= -6 and magnitude above the floor
};

struct DecayReport {
  DeSitterPoint base;
  std::vector<double> tau;
  std::vector<DirectionDecay> dirs;
};

std::vector<double> default_probe_taus();  // {32, 64, 128, 256}
inline constexpr double kProbeWindow = 0.15;  // window halfwidth, chart units

// Windowed oscillatory pairing <dist, chi e^{-2 pi i tau <., xi>}> in the
// chart at base_pt, chi a product bump of halfwidth kProbeWindow per
// coordinate. The kernel factor is evaluated through boundary_split with
// the analytic parts interpolated from a table, so nodes may sit
// arbitrarily close to the cone; the time axis is integrated innermost
// with panels split at the cone crossings and a root-absorbing
// substitution on each side. Directions are chart covectors at base_pt.
DecayReport decay_probe(const SphericalDist& dist, const DeSitterPoint& base_pt,
                        const std::vector<RVec>& directions,
                        const std::vector<double>& taus = default_probe_taus());

std::string report_csv(const DecayReport& rep);

// random members of a spec set (for export / plotting)
std::vector<CotangentDir> spec_samples(const WfSpec& spec, int count,
                                       unsigned seed);
// mixed test elements around the cone geometry: members, antipodes,
// non-conormal null directions, and generic off-set directions
std::vector<CotangentDir> conic_samples(int n, int count, unsigned seed);

}  // namespace crownwave
