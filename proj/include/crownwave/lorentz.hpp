#pragma once
// Lorentzian linear algebra on R^{1,n} and its complexification, the
// de Sitter quadric [x,x] = 1, normal-coordinate charts, crown-domain
// membership, isometries of the identity component, and causal tags.
//
// Conventions used throughout:
//   [z,w] = -z_0 w_0 + sum_{j>=1} z_j w_j     (bilinear, never conjugating)
//   chart at x: Exp_x(v) = C([v,v]) x + S([v,v]) v with C(z) = cos sqrt z,
//   S(z) = sin sqrt z / sqrt z (entire); chart domain U_x = {[v,v] < pi/2}
//   (a config switch widens this to (pi/2)^2).
//   Cone side of y relative to x: sign of (y_0 - x_0).
#include "crownwave/common.hpp"
#include <optional>
#include <string>
#include <vector>

namespace crownwave {

using RVec = std::vector<double>;
using CVec = std::vector<cplx>;

struct ModelDims {
  int n;  // dS^n; ambient dimension n+1
  explicit ModelDims(int n_);
  int ambient() const { return n + 1; }
  double rho() const { return 0.5 * (n - 1); }
};

double mform(const RVec& z, const RVec& w);
cplx mform(const CVec& z, const CVec& w);
cplx mform(const CVec& z, const RVec& w);

RVec basis_vec(int ambient, int i);
RVec add(const RVec& a, const RVec& b);
RVec sub(const RVec& a, const RVec& b);
RVec scale(double c, const RVec& a);
CVec to_complex(const RVec& a);

// C(z) = cos sqrt z and S(z) = sin sqrt z / sqrt z, entire in z.
double cs_c(double z);
double cs_c_minus1(double z);  // C(z) - 1 without cancellation near 0
double cs_s(double z);
cplx cs_c(cplx z);
cplx cs_s(cplx z);

inline constexpr double kQuadricTol = 1e-9;

// Chart bound on [v,v]; the paper-literal value. See chart_bound().
inline constexpr double kChartBoundLiteral = kPi / 2.0;
// Config switch: when true, U_x = {[v,v] < (pi/2)^2} instead.
void set_chart_bound_squared(bool on);
double chart_bound();

struct DeSitterPoint {
  RVec p;
  explicit DeSitterPoint(RVec coords);                 // rejects off-quadric input
  static DeSitterPoint renormalized(const RVec& c);    // rescale onto the quadric
  int n() const { return int(p.size()) - 1; }
};

struct TangentVector {
  DeSitterPoint base;
  RVec v;  // ambient components with [base, v] = 0 (to tolerance)
  TangentVector(DeSitterPoint b, RVec vv);
};

enum class Branch { Forward, Backward };

struct CrownPoint {
  RVec u, v;      // point is u + iv (Forward) or u - iv (Backward); v_0 > 0
  Branch branch;
  CVec point() const;
};

struct Isometry {
  std::vector<RVec> m;  // rows of the matrix
  explicit Isometry(std::vector<RVec> rows);  // validates the group conditions
  int dim() const { return int(m.size()); }
  RVec operator()(const RVec& x) const;
  CVec operator()(const CVec& z) const;
  Isometry operator*(const Isometry& o) const;
  static Isometry identity(int ambient);
};

enum class CausalTag { Outside, FuturePlus, PastMinus, OnCone };

struct NotInChart : std::runtime_error {
  explicit NotInChart(const std::string& w) : std::runtime_error(w) {}
};

DeSitterPoint exp_map(const DeSitterPoint& x, const RVec& v);
// Inverse chart via the 2-plane reduction; throws NotInChart outside U_x.
RVec log_map(const DeSitterPoint& x, const DeSitterPoint& y);

CausalTag classify_causal(const DeSitterPoint& x, const DeSitterPoint& y,
                          double tol = kQuadricTol);

// Decompose z = u +/- iv and test the four tuboid conditions; on failure
// *reject_reason names the first violated condition.
std::optional<CrownPoint> crown_membership(const CVec& z,
                                           std::string* reject_reason = nullptr);

// g . (i cos t e_0 + sin t e_n), conjugated for the Backward branch.
CVec approach_point(const Isometry& g, double t, Branch br);

Isometry make_boost(int n, double t, int axis = -1);  // axis default n
Isometry make_rotation(int n, int i, int j, double theta);

// Apply an isometry to a quadric point and renormalize (drift control).
DeSitterPoint apply_ds(const Isometry& g, const DeSitterPoint& x);

// sqrt|det g| of the chart-pullback metric at chart coordinates v (length n),
// by central differences of exp_map with step 1e-5.
double metric_density(const DeSitterPoint& x, const RVec& vchart);

// Closed form of the same density: S([v,v])^{n-1}. Cross-checked against
// metric_density in tests; used in quadrature inner loops.
double metric_density_closed(int n, double q);

// Lorentz-orthonormal frame spanning T_x: b[0] timelike ([b0,b0] = -1),
// b[1..n-1] spacelike, built deterministically by projecting e_0, e_1, ...
// For x = e_n this is exactly (e_0, ..., e_{n-1}).
struct Chart {
  DeSitterPoint x;
  std::vector<RVec> b;
  explicit Chart(const DeSitterPoint& base);
  RVec ambient_of(const RVec& vchart) const;
  RVec chart_of(const RVec& vambient) const;  // Lorentz pairing coordinates
  DeSitterPoint point(const RVec& vchart) const;
};

}  // namespace crownwave
