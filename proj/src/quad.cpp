#include "crownwave/quad.hpp"
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crownwave::quad {

namespace {

const double g6x[] = {-9.32469514203152050e-01, -6.61209386466264482e-01,
                      -2.38619186083196932e-01, 2.38619186083196932e-01,
                      6.61209386466264482e-01,  9.32469514203152050e-01};
const double g6w[] = {1.71324492379169746e-01, 3.60761573048138939e-01,
                      4.67913934572691370e-01, 4.67913934572691370e-01,
                      3.60761573048138939e-01, 1.71324492379169746e-01};

const double g7x[] = {-9.49107912342758486e-01, -7.41531185599394460e-01,
                      -4.05845151377397184e-01, 0.0,
                      4.05845151377397184e-01,  7.41531185599394460e-01,
                      9.49107912342758486e-01};
const double g7w[] = {1.29484966168870647e-01, 2.79705391489276589e-01,
                      3.81830050505118312e-01, 4.17959183673468959e-01,
                      3.81830050505118312e-01, 2.79705391489276589e-01,
                      1.29484966168870647e-01};

const double g8x[] = {-9.60289856497536176e-01, -7.96666477413626728e-01,
                      -5.25532409916328991e-01, -1.83434642495649780e-01,
                      1.83434642495649780e-01,  5.25532409916328991e-01,
                      7.96666477413626728e-01,  9.60289856497536176e-01};
const double g8w[] = {1.01228536290376689e-01, 2.22381034453374343e-01,
                      3.13706645877887047e-01, 3.62683783378361768e-01,
                      3.62683783378361768e-01, 3.13706645877887047e-01,
                      2.22381034453374343e-01, 1.01228536290376689e-01};

const double g10x[] = {-9.73906528517171743e-01, -8.65063366688984536e-01,
                       -6.79409568299024436e-01, -4.33395394129247213e-01,
                       -1.48874338981631216e-01, 1.48874338981631216e-01,
                       4.33395394129247213e-01,  6.79409568299024436e-01,
                       8.65063366688984536e-01,  9.73906528517171743e-01};
const double g10w[] = {6.66713443086880686e-02, 1.49451349150580365e-01,
                       2.19086362515982014e-01, 2.69266719309996516e-01,
                       2.95524224714752981e-01, 2.95524224714752981e-01,
                       2.69266719309996516e-01, 2.19086362515982014e-01,
                       1.49451349150580365e-01, 6.66713443086880686e-02};

struct AdaptState {
  const std::function<cplx(double)>* f;
  double tol;
  int max_depth;
  cplx sum{0.0, 0.0};
  double err = 0.0;
  std::size_t evals = 0;
};

cplx g7_panel(AdaptState& st, double a, double b) {
  const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
  cplx s{0.0, 0.0};
  for (int i = 0; i < 7; ++i) s += g7w[i] * (*st.f)(mid + hw * g7x[i]);
  st.evals += 7;
  return s * hw;
}

void adapt_rec(AdaptState& st, double a, double b, cplx whole, int depth) {
  const double m = 0.5 * (a + b);
  const cplx left = g7_panel(st, a, m), right = g7_panel(st, m, b);
  const double delta = std::abs(left + right - whole);
  if (delta <= st.tol || depth >= st.max_depth) {
    st.sum += left + right;
    st.err += delta;
    return;
  }
  adapt_rec(st, a, m, left, depth + 1);
  adapt_rec(st, m, b, right, depth + 1);
}

}  // namespace

const double* gauss_x(int g) {
  switch (g) {
    case 6: return g6x;
    case 7: return g7x;
    case 8: return g8x;
    case 10: return g10x;
  }
  throw std::invalid_argument("gauss_x: unsupported order");
}

const double* gauss_w(int g) {
  switch (g) {
    case 6: return g6w;
    case 7: return g7w;
    case 8: return g8w;
    case 10: return g10w;
  }
  throw std::invalid_argument("gauss_w: unsupported order");
}

cplx gauss_panel(const std::function<cplx(double)>& f, double a, double b, int g) {
  const double* gx = gauss_x(g);
  const double* gw = gauss_w(g);
  const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
  cplx s{0.0, 0.0};
  for (int i = 0; i < g; ++i) s += gw[i] * f(mid + hw * gx[i]);
  return s * hw;
}

QResult adaptive(const std::function<cplx(double)>& f, double a, double b,
                 double tol_panel, int max_depth) {
  AdaptState st;
  st.f = &f;
  st.tol = tol_panel;
  st.max_depth = max_depth;
  const cplx whole = g7_panel(st, a, b);
  adapt_rec(st, a, b, whole, 0);
  return {st.sum, st.err, st.evals};
}

Axis graded_axis(double lo, double hi, const std::vector<double>& grade_pts,
                 double h0, int levels, double ratio) {
  if (!(hi > lo)) throw std::invalid_argument("graded_axis: empty interval");
  if (!(h0 > 0.0)) throw std::invalid_argument("graded_axis: h0 <= 0");
  std::vector<double> pts = {lo, hi};
  double fine = h0;
  for (double p : grade_pts) {
    if (p < lo - h0 || p > hi + h0) continue;
    if (p > lo && p < hi) pts.push_back(p);
    double step = h0;
    for (int k = 0; k <= levels; ++k) {
      const double dl = p - step, dr = p + step;
      if (dl > lo && dl < hi) pts.push_back(dl);
      if (dr > lo && dr < hi) pts.push_back(dr);
      step *= ratio;
      fine = std::min(fine, step);
    }
  }
  // uniform fill so no panel exceeds h0
  int nfill = int(std::ceil((hi - lo) / h0));
  for (int i = 1; i < nfill; ++i) pts.push_back(lo + (hi - lo) * double(i) / nfill);
  std::sort(pts.begin(), pts.end());
  Axis ax;
  const double merge = 0.25 * fine;
  for (double x : pts)
    if (ax.brk.empty() || x - ax.brk.back() > merge) ax.brk.push_back(x);
  if (ax.brk.back() < hi) ax.brk.push_back(hi);
  return ax;
}

cplx integrate_axis(const Axis& ax, int g, const std::function<cplx(double)>& f) {
  std::vector<cplx> parts(ax.panels());
  for (std::size_t i = 0; i + 1 < ax.brk.size(); ++i)
    parts[i] = gauss_panel(f, ax.brk[i], ax.brk[i + 1], g);
  return pairwise_sum(parts);
}

cplx integrate_tensor2(const Axis& A, const Axis& B, int g,
                       const std::function<cplx(double, double)>& f) {
  const double* gx = gauss_x(g);
  const double* gw = gauss_w(g);
  std::vector<cplx> parts;
  parts.reserve(A.panels() * B.panels());
  for (std::size_t i = 0; i + 1 < A.brk.size(); ++i) {
    const double am = 0.5 * (A.brk[i] + A.brk[i + 1]);
    const double ah = 0.5 * (A.brk[i + 1] - A.brk[i]);
    for (std::size_t j = 0; j + 1 < B.brk.size(); ++j) {
      const double bm = 0.5 * (B.brk[j] + B.brk[j + 1]);
      const double bh = 0.5 * (B.brk[j + 1] - B.brk[j]);
      cplx cell{0.0, 0.0};
      for (int p = 0; p < g; ++p) {
        const double x = am + ah * gx[p];
        cplx row{0.0, 0.0};
        for (int q = 0; q < g; ++q) row += gw[q] * f(x, bm + bh * gx[q]);
        cell += gw[p] * row;
      }
      parts.push_back(cell * (ah * bh));
    }
  }
  return pairwise_sum(parts);
}

void for_each_node2(const Axis& A, const Axis& B, int g,
                    const std::function<void(double, double, double)>& fn) {
  const double* gx = gauss_x(g);
  const double* gw = gauss_w(g);
  for (std::size_t i = 0; i + 1 < A.brk.size(); ++i) {
    const double am = 0.5 * (A.brk[i] + A.brk[i + 1]);
    const double ah = 0.5 * (A.brk[i + 1] - A.brk[i]);
    for (std::size_t j = 0; j + 1 < B.brk.size(); ++j) {
      const double bm = 0.5 * (B.brk[j] + B.brk[j + 1]);
      const double bh = 0.5 * (B.brk[j + 1] - B.brk[j]);
      for (int p = 0; p < g; ++p)
        for (int q = 0; q < g; ++q)
          fn(am + ah * gx[p], bm + bh * gx[q], gw[p] * gw[q] * ah * bh);
    }
  }
}

}  // namespace crownwave::quad
