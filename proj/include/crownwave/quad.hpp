#pragma once
// Quadrature toolbox: fixed Gauss panels, adaptive bisection with a
// Gauss-Kronrod-style error estimate (panel value vs sum of halves),
// graded axis meshes for endpoint/interface singularities, and tensor
// integration over 2-D panel meshes. All summation orders are fixed
// (pairwise trees) so results are bit-reproducible.
#include "crownwave/common.hpp"
#include <functional>
#include <vector>

namespace crownwave::quad {

const double* gauss_x(int g);  // g in {6,7,8,10}
const double* gauss_w(int g);

struct QResult {
  cplx value{0.0, 0.0};
  double err = 0.0;
  std::size_t evals = 0;
};

// Fixed g-point Gauss on [a,b].
cplx gauss_panel(const std::function<cplx(double)>& f, double a, double b, int g);

// Adaptive bisection: panel accepted when |G7(panel) - G7(left)-G7(right)|
// <= tol_panel; the refined value is kept. Deterministic recursion order.
QResult adaptive(const std::function<cplx(double)>& f, double a, double b,
                 double tol_panel = 1e-11, int max_depth = 48);

// Sorted breakpoints of a 1-D panel mesh.
struct Axis {
  std::vector<double> brk;
  std::size_t panels() const { return brk.size() < 2 ? 0 : brk.size() - 1; }
};

// Mesh on [lo,hi] with base panel width <= h0 and geometric refinement
// (given ratio, `levels` steps) toward each grade point that lies in the
// interval. Grade points land exactly on breakpoints, so integrable
// singularities sit on panel boundaries and Gauss nodes stay interior.
Axis graded_axis(double lo, double hi, const std::vector<double>& grade_pts,
                 double h0, int levels, double ratio = 0.5);

// Integrate f over all panels of the axis with g-point Gauss per panel.
cplx integrate_axis(const Axis& ax, int g, const std::function<cplx(double)>& f);

// Tensor product integration: f(x, y) over mesh A x B, g-point Gauss per
// axis per cell, pairwise summation over the flattened cell index.
cplx integrate_tensor2(const Axis& A, const Axis& B, int g,
                       const std::function<cplx(double, double)>& f);

// Visit every tensor node once: fn(x, y, weight). Used to build cached
// node tables for integrands with an expensive reusable factor.
void for_each_node2(const Axis& A, const Axis& B, int g,
                    const std::function<void(double, double, double)>& fn);

}  // namespace crownwave::quad
