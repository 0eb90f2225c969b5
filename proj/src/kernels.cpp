// Crown-domain kernels and their boundary values on dS^n.
//
// Geometry used by the pairing routes: for a basepoint x with chart frame
// (b_0, ..., b_{n-1}) the approach path is z_t = i cos t b_0 + sin t x
// (Forward branch; the tilde kinds use the Backward conjugate). Against a
// real quadric point y,
//   [z_t, y] = sin t [x, y] + i cos t [b_0, y],
// so every kernel argument is affine in the two cached pairings
//   A = [x, y],  B = [b_0, y].
// Quadrature caches store (A - 1, B, W) per node with W = weight * phi *
// density; A - 1 rather than A because nodes sit arbitrarily close to the
// cone A = 1 where the boundary kernels are singular, and the radial route
// computes A - 1 = cos(sqrt q) - 1 stably from q. The kernel factor is
// re-evaluated per t. On the boundary t -> pi/2 the argument lands on the
// cut and the side is read off sign(B): for the hypergeometric argument
// w = (1 + A)/2, Im w_t = cos t B / 2, so B < 0 (the future component)
// gives the lower side for Psi. Group-transformed test functions
// phi(g . y) are paired by moving g onto the kernel data,
// [z_t, g^{-1} u] = [g z_t, u], which keeps the mesh on phi's own chart.
#include "crownwave/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "crownwave/gamma.hpp"
#include "crownwave/quad.hpp"

namespace crownwave {

namespace {

double sqnorm(const RVec& a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return s;
}

// surface area of the unit sphere S^k in R^{k+1}
double unit_sphere_area(int k) {
  return 2.0 * std::pow(kPi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

// within this distance of the cut the kernel is replaced by its leading
// singular term; the regular part is dropped (node weights there are
// below 1e-8, so the neglected piece is far under the route tolerances)
constexpr double kNearCut = 1e-9;

// (1 - z)^s at z = x + i0 (side +1), x - i0 (side -1), or real x < 1 (0),
// taking xm1 = x - 1
cplx sided_one_minus_pow(double xm1, cplx s, int side) {
  if (side == 0) return std::pow(cplx(-xm1, 0.0), s);
  const cplx phase = std::exp(cplx(0.0, side > 0 ? -kPi : kPi) * s);
  return std::pow(cplx(xm1, 0.0), s) * phase;
}

// leading behavior of 2F1(a, b; c; z) at z = 1 on the given side
cplx boundary_leading(const SpectralParam& sp, const HypTriple& tr, double xm1,
                      int side) {
  if (near_gamma_pole(tr.a) || near_gamma_pole(tr.b)) return cplx(0.0, 0.0);
  const cplx ga = gamma_fn(tr.a) * gamma_fn(tr.b);
  if (sp.n == 2) {
    // log case: ln(1 - z) = ln|x - 1| -+ i pi on the upper/lower side
    cplx lg(std::log(std::fabs(xm1)), 0.0);
    if (side > 0) lg -= cplx(0.0, kPi);
    if (side < 0) lg += cplx(0.0, kPi);
    return -lg / ga;
  }
  const cplx K = gamma_fn(0.5 * sp.n) * gamma_fn(0.5 * (sp.n - 2.0)) / ga;
  return K * sided_one_minus_pow(xm1, tr.c - tr.a - tr.b, side);
}

// kernel evaluator for one distribution: finite-t values from the cached
// pairings and one-sided boundary values at the limit
struct KindEval {
  SphKind kind;
  SpectralParam sp;
  HypTriple tr;
  cplx mu;
  bool pow_fast = false;  // 2F1 collapses to (1 - z)^(-e) when a or b = c
  cplx pow_exp{0.0, 0.0};

  explicit KindEval(const SphericalDist& d)
      : kind(d.kind),
        sp(d.params.spectral()),
        tr(kernel_triple(sp)),
        mu(d.phipow_exponent) {
    if (std::abs(tr.a - tr.c) < 1e-14) {
      pow_fast = true;
      pow_exp = tr.b;
    } else if (std::abs(tr.b - tr.c) < 1e-14) {
      pow_fast = true;
      pow_exp = tr.a;
    }
  }

  cplx hyp(cplx z) const {
    if (pow_fast) return std::pow(1.0 - z, -pow_exp);
    return gauss_2f1(tr.a, tr.b, tr.c, z).value;
  }

  cplx at_t(double am1, double B, double st, double ct) const {
    const double A = 1.0 + am1;
    switch (kind) {
      case SphKind::Psi:
        return hyp(cplx(0.5 * (1.0 + st * A), 0.5 * ct * B));
      case SphKind::PsiTilde:
        return std::conj(hyp(cplx(0.5 * (1.0 + st * A), 0.5 * ct * B)));
      case SphKind::Difference: {
        const cplx F = hyp(cplx(0.5 * (1.0 + st * A), 0.5 * ct * B));
        return F - std::conj(F);
      }
      case SphKind::PhiPow:
        return std::pow(cplx(0.5 * (1.0 - st * A), -0.5 * ct * B), mu);
      case SphKind::PhiTildePow:
        return std::pow(cplx(0.5 * (1.0 - st * A), 0.5 * ct * B), mu);
    }
    return cplx(0.0, 0.0);
  }

  // kernel value at an explicitly complexified point, [z, y] given
  cplx at_pairing(cplx zy) const {
    switch (kind) {
      case SphKind::Psi:
      case SphKind::PsiTilde:
        return hyp(0.5 * (1.0 + zy));
      case SphKind::Difference: {
        const cplx F = hyp(0.5 * (1.0 + zy));
        return F - std::conj(F);
      }
      case SphKind::PhiPow:
      case SphKind::PhiTildePow:
        return std::pow(0.5 * (1.0 - zy), mu);
    }
    return cplx(0.0, 0.0);
  }

  // boundary value at the limit t = pi/2; the side comes from sign(B)
  cplx at_limit(double am1, double B) const {
    const double xm1 = 0.5 * am1;  // x - 1 for the hypergeometric argument
    switch (kind) {
      case SphKind::Psi:
      case SphKind::PsiTilde: {
        const bool future = (B < 0.0);
        if (xm1 < 0.0) {
          if (-xm1 < kNearCut) return boundary_leading(sp, tr, xm1, 0);
          return hyp(cplx(1.0 + xm1, 0.0));
        }
        // Psi takes the lower side on the future component, PsiTilde the
        // upper; mirrored on the past component
        const bool lower = (kind == SphKind::Psi) == future;
        if (xm1 < kNearCut)
          return boundary_leading(sp, tr, xm1, lower ? -1 : +1);
        if (pow_fast)
          return sided_one_minus_pow(xm1, -pow_exp, lower ? -1 : +1);
        return boundary_2f1(sp, 1.0 + xm1, lower ? Side::Minus : Side::Plus);
      }
      case SphKind::Difference: {
        if (xm1 < 0.0) return cplx(0.0, 0.0);
        const double sgn = (B < 0.0) ? 1.0 : -1.0;  // future: Minus - Plus
        if (xm1 < kNearCut)
          return sgn * (boundary_leading(sp, tr, xm1, -1) -
                        boundary_leading(sp, tr, xm1, +1));
        return sgn * jump_2f1(sp, 1.0 + xm1);
      }
      case SphKind::PhiPow:
      case SphKind::PhiTildePow: {
        const double u = -xm1;
        if (u > 0.0) return std::pow(cplx(u, 0.0), mu);
        const bool future = (B < 0.0);
        const bool upper = (kind == SphKind::PhiPow) == future;
        return std::pow(cplx(-u, 0.0), mu) *
               std::exp(cplx(0.0, upper ? kPi : -kPi) * mu);
      }
    }
    return cplx(0.0, 0.0);
  }
};

struct NodeCache {
  std::vector<double> am1, B, W;  // am1 = [x, y] - 1
  void push(double a, double b, double w) {
    am1.push_back(a);
    B.push_back(b);
    W.push_back(w);
  }
};

cplx sum_cache_t(const NodeCache& c, const KindEval& ke, double st, double ct) {
  std::vector<cplx> parts(c.am1.size());
  for (std::size_t i = 0; i < c.am1.size(); ++i)
    parts[i] = c.W[i] * ke.at_t(c.am1[i], c.B[i], st, ct);
  return pairwise_sum(parts);
}

cplx sum_cache_limit(const NodeCache& c, const KindEval& ke) {
  std::vector<cplx> parts(c.am1.size());
  for (std::size_t i = 0; i < c.am1.size(); ++i)
    parts[i] = c.W[i] * ke.at_limit(c.am1[i], c.B[i]);
  return pairwise_sum(parts);
}

struct MeshLevel {
  double outer_div, inner_div;
  int outer_lv, inner_lv, g;
};

constexpr MeshLevel kAxiFine{8.0, 10.0, 12, 14, 10};
constexpr MeshLevel kAxiCoarse{6.0, 8.0, 10, 10, 8};

// Radial test function at the basepoint: everything depends on (v_0, r)
// with r = |vec v|, so the angular directions integrate to the sphere
// area, d^n v = omega r^{n-2} dv_0 dr. The boundary kernels are singular
// on the cone r = |v_0|; each side of the crossing is parametrized as
// r = |v_0| -+ xi^2, which turns the |q|^s endpoint behavior into a
// smooth integrand and the even-n logarithm into xi log xi.
NodeCache build_axisym(int n, const TestFnDS& phi, const MeshLevel& mp) {
  const double R = phi.radius;
  const double omega = unit_sphere_area(n - 2);
  const double* gx = quad::gauss_x(mp.g);
  const double* gw = quad::gauss_w(mp.g);
  NodeCache c;
  const quad::Axis outer =
      quad::graded_axis(-R, R, {0.0}, R / mp.outer_div, mp.outer_lv);
  struct Seg {
    double base, dir, len;  // r = base + dir xi^2, xi in [0, len]
  };
  for (std::size_t i = 0; i + 1 < outer.brk.size(); ++i) {
    const double om = 0.5 * (outer.brk[i] + outer.brk[i + 1]);
    const double oh = 0.5 * (outer.brk[i + 1] - outer.brk[i]);
    for (int p = 0; p < mp.g; ++p) {
      const double v0 = om + oh * gx[p];
      const double wout = gw[p] * oh;
      const double r2max = R * R - v0 * v0;
      if (!(r2max > 1e-14)) continue;
      const double rmax = std::sqrt(r2max), av = std::fabs(v0);
      std::vector<Seg> segs;
      if (av < rmax) {
        segs.push_back({av, -1.0, std::sqrt(av)});
        segs.push_back({av, +1.0, std::sqrt(rmax - av)});
      } else {
        segs.push_back({0.0, +1.0, std::sqrt(rmax)});
      }
      for (const Seg& sg : segs) {
        if (!(sg.len > 1e-14)) continue;
        const quad::Axis inner = quad::graded_axis(
            0.0, sg.len, {0.0}, sg.len / mp.inner_div, mp.inner_lv);
        for (std::size_t j = 0; j + 1 < inner.brk.size(); ++j) {
          const double im = 0.5 * (inner.brk[j] + inner.brk[j + 1]);
          const double ih = 0.5 * (inner.brk[j + 1] - inner.brk[j]);
          for (int k = 0; k < mp.g; ++k) {
            const double xi = im + ih * gx[k];
            const double r = sg.base + sg.dir * xi * xi;
            if (!(r > 0.0)) continue;
            const double f = phi.profile.value(std::sqrt(r * r + v0 * v0));
            if (f == 0.0) continue;
            // q = (r - |v_0|)(r + |v_0|) with the first factor taken from
            // xi, exact arbitrarily close to the cone
            const double rminus = (sg.base - av) + sg.dir * xi * xi;
            const double qq = rminus * (r + av);
            const double w = wout * gw[k] * ih * 2.0 * xi * omega *
                             std::pow(r, double(n - 2)) * f *
                             metric_density_closed(n, qq);
            c.push(cs_c_minus1(qq), -cs_s(qq) * v0, w);
          }
        }
      }
    }
  }
  return c;
}

// sign-change scan plus bisection; f is the cone gap along one column
std::vector<double> cone_crossings(const std::function<double(double)>& f,
                                   double lo, double hi) {
  const int S = 80;
  std::vector<double> roots;
  double prev = f(lo);
  for (int i = 1; i <= S; ++i) {
    const double x = lo + (hi - lo) * double(i) / S;
    const double cur = f(x);
    if ((prev < 0.0) != (cur < 0.0)) {
      double a = lo + (hi - lo) * double(i - 1) / S, b = x, fa = prev;
      for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (a + b), fm = f(m);
        if ((fa < 0.0) != (fm < 0.0)) {
          b = m;
        } else {
          a = m;
          fa = fm;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev = cur;
  }
  return roots;
}

// General route for test functions that are not radial at the basepoint
// (different chart base, or group-transformed). Mesh in phi's own chart;
// the inner v_0 axis of each spatial column is graded at the crossings of
// the effective basepoint's cone, found by bisection per column.
NodeCache build_general(const SphericalDist& dist, const TestFnDS& phi,
                        bool fine) {
  const int n = dist.params.dims.n;
  if (n > 3)
    throw std::invalid_argument(
        "pairing: test functions away from the basepoint need n <= 3");
  RVec pa = dist.basepoint.p;
  RVec pc = Chart(dist.basepoint).b[0];
  if (phi.pre) {
    pa = (*phi.pre)(pa);
    pc = (*phi.pre)(pc);
  }
  const double R = phi.radius;
  const Chart& ch = phi.chart;
  NodeCache c;
  auto add_column = [&](const RVec& vsp, double wsp, int g, int lv) {
    // vsp: spatial chart coordinates (v_1, ..), weight already included
    double rr2 = 0.0;
    for (double s : vsp) rr2 += s * s;
    const double bnd2 = R * R - rr2;
    if (!(bnd2 > 1e-14)) return;
    const double bnd = std::sqrt(bnd2);
    RVec vcol(std::size_t(n), 0.0);
    for (std::size_t k = 0; k < vsp.size(); ++k) vcol[k + 1] = vsp[k];
    const auto gap = [&](double v0) {
      vcol[0] = v0;
      return mform(pa, ch.point(vcol).p) - 1.0;
    };
    const std::vector<double> gp = cone_crossings(gap, -bnd, bnd);
    const quad::Axis ax =
        quad::graded_axis(-bnd, bnd, gp, 2.0 * bnd / (fine ? 10.0 : 8.0), lv);
    const double* gx = quad::gauss_x(g);
    const double* gw = quad::gauss_w(g);
    RVec v(std::size_t(n), 0.0);
    for (std::size_t k = 0; k < vsp.size(); ++k) v[k + 1] = vsp[k];
    for (std::size_t j = 0; j + 1 < ax.brk.size(); ++j) {
      const double im = 0.5 * (ax.brk[j] + ax.brk[j + 1]);
      const double ih = 0.5 * (ax.brk[j + 1] - ax.brk[j]);
      for (int q = 0; q < g; ++q) {
        const double v0 = im + ih * gx[q];
        v[0] = v0;
        const double f = phi.profile.value(std::sqrt(rr2 + v0 * v0));
        if (f == 0.0) continue;
        const double qq = rr2 - v0 * v0;
        const DeSitterPoint y = ch.point(v);
        c.push(mform(pa, y.p) - 1.0, mform(pc, y.p),
               wsp * gw[q] * ih * f * metric_density_closed(n, qq));
      }
    }
  };
  if (n == 2) {
    const int g = fine ? 8 : 6, lv = fine ? 18 : 12;
    const quad::Axis sp = quad::graded_axis(-R, R, {0.0}, R / (fine ? 8.0 : 6.0),
                                            fine ? 10 : 8);
    const double* gx = quad::gauss_x(g);
    const double* gw = quad::gauss_w(g);
    for (std::size_t i = 0; i + 1 < sp.brk.size(); ++i) {
      const double sm = 0.5 * (sp.brk[i] + sp.brk[i + 1]);
      const double sh = 0.5 * (sp.brk[i + 1] - sp.brk[i]);
      for (int p = 0; p < g; ++p)
        add_column({sm + sh * gx[p]}, gw[p] * sh, g, lv);
    }
  } else {
    const int g = 6, lv = fine ? 12 : 9;
    const quad::Axis sp = quad::graded_axis(-R, R, {0.0}, R / (fine ? 5.0 : 4.0),
                                            fine ? 7 : 5);
    quad::for_each_node2(sp, sp, g, [&](double v1, double v2, double w12) {
      add_column({v1, v2}, w12, g, lv);
    });
  }
  return c;
}

// co-area weight for the even-dimensional power kernel: one v_0 sign of
//   omega/2 integral phi density r^{n-3} dv_0  on the level set
//   (1 - [x, y])/2 = u, times dq/du = 4 / S(q)
struct CoareaWeight {
  const TestFnDS* phi;
  int n;

  double q_of_u(double u) const {
    if (u > 0.0) {
      const double th = std::acos(1.0 - 2.0 * u);
      return th * th;
    }
    if (u < 0.0) {
      const double th = std::acosh(1.0 - 2.0 * u);
      return -th * th;
    }
    return 0.0;
  }

  cplx operator()(double u) const {
    const double R = phi->radius;
    const double q = q_of_u(u);
    if (q >= R * R) return cplx(0.0, 0.0);
    const double v0lo = q < 0.0 ? std::sqrt(-q) : 0.0;
    const double v0hi = std::sqrt(0.5 * (R * R - q));
    if (!(v0hi > v0lo)) return cplx(0.0, 0.0);
    const double dens = metric_density_closed(n, q);
    const auto f = [&](double v0) {
      const double r2 = q + v0 * v0;
      if (!(r2 > 0.0)) return cplx(0.0, 0.0);
      return cplx(phi->profile.value(std::sqrt(r2 + v0 * v0)) *
                      std::pow(r2, 0.5 * (n - 3)),
                  0.0);
    };
    const quad::Axis ax = quad::graded_axis(v0lo, v0hi, {v0lo},
                                            (v0hi - v0lo) / 10.0, 12);
    const cplx I = quad::integrate_axis(ax, 8, f);
    return 0.5 * unit_sphere_area(n - 2) * dens * (4.0 / cs_s(q)) * I;
  }
};

}  // namespace

KernelParams::KernelParams(int n, cplx lam) : dims(n), lambda(lam) {
  SpectralParam(n, lam);  // admissibility check
}

cplx KernelParams::msq() const {
  const double r = dims.rho();
  return r * r - lambda * lambda;
}

SphericalDist::SphericalDist(SphKind k, const DeSitterPoint& x,
                             const KernelParams& p)
    : kind(k),
      basepoint(x),
      params(p),
      phipow_exponent(0.5 * (2.0 - p.dims.n), 0.0) {
  if (int(x.p.size()) != p.dims.ambient())
    throw std::invalid_argument("SphericalDist: dimension mismatch");
}

TestFnDS::TestFnDS(const DeSitterPoint& base, double rad)
    : chart_base(base), radius(rad), profile(0, 0.0, rad), chart(base) {
  if (!(rad > 0.0 && rad < 0.5))
    throw std::invalid_argument("TestFnDS: radius must lie in (0, 0.5)");
}

double TestFnDS::value(const DeSitterPoint& y) const {
  RVec py = pre ? (*pre)(y.p) : y.p;
  RVec vamb;
  try {
    vamb = log_map(chart_base, DeSitterPoint::renormalized(py));
  } catch (const NotInChart&) {
    return 0.0;
  }
  const RVec v = chart.chart_of(vamb);
  const double s = std::sqrt(sqnorm(v));
  if (s >= radius) return 0.0;
  return profile.value(s);
}

TestFnDS TestFnDS::composed(const Isometry& g) const {
  TestFnDS out = *this;
  out.pre = pre ? std::optional<Isometry>((*pre) * g) : std::optional<Isometry>(g);
  return out;
}

bool TestFnDS::radial_at(const DeSitterPoint& x) const {
  if (pre) return false;
  if (x.p.size() != chart_base.p.size()) return false;
  double d = 0.0;
  for (std::size_t i = 0; i < x.p.size(); ++i)
    d = std::max(d, std::fabs(x.p[i] - chart_base.p[i]));
  return d <= 1e-12;
}

cplx psi_kernel(const SpectralParam& sp, const CrownPoint& z, const CrownPoint& w) {
  if (z.branch != w.branch)
    throw std::invalid_argument("psi_kernel: points on different branches");
  CVec zc = z.point(), wc = w.point();
  for (auto& e : wc) e = std::conj(e);
  const cplx arg = 0.5 * (1.0 + mform(zc, wc));
  const HypTriple tr = kernel_triple(sp);
  return gauss_2f1(tr.a, tr.b, tr.c, arg).value;
}

cplx phi_kernel(const CrownPoint& z, const CrownPoint& w, cplx mu) {
  CVec zc = z.point(), wc = w.point();
  for (auto& e : wc) e = std::conj(e);
  const cplx arg = 0.5 * (1.0 - mform(zc, wc));
  if (arg.real() <= 0.0 && std::fabs(arg.imag()) <= 1e-14 * (1.0 + std::abs(arg)))
    throw std::domain_error("phi_kernel: argument on the closed negative ray");
  return std::pow(arg, mu);
}

cplx kernel_at_real(const SphericalDist& dist, const CVec& z, const DeSitterPoint& y) {
  if (z.size() != y.p.size())
    throw std::invalid_argument("kernel_at_real: dimension mismatch");
  return KindEval(dist).at_pairing(mform(z, y.p));
}

PointEval eval_pointwise(const SphericalDist& dist, const DeSitterPoint& y) {
  const DeSitterPoint& x = dist.basepoint;
  if (x.p.size() != y.p.size())
    throw std::invalid_argument("eval_pointwise: dimension mismatch");
  const double A = mform(x.p, y.p);
  const double Q = 2.0 * (1.0 - A);  // [y - x, y - x]
  if (std::fabs(Q) <= 1e-8 * (1.0 + sqnorm(y.p)))
    throw OnConeSingularity("eval_pointwise: point within cone tolerance");
  CausalTag tag;
  if (Q > 0.0)
    tag = CausalTag::Outside;
  else
    tag = (y.p[0] - x.p[0] > 0.0) ? CausalTag::FuturePlus : CausalTag::PastMinus;
  // sign(B) at the limit is -sign(y_0 - x_0)
  const double B = (tag == CausalTag::FuturePlus) ? -1.0 : 1.0;
  const KindEval ke(dist);
  return {ke.at_limit(A - 1.0, B), tag};
}

KernelPairing pairing(const SphericalDist& dist, const TestFnDS& phi,
                      const ApproachProtocol& protocol) {
  const int n = dist.params.dims.n;
  if (int(phi.chart_base.p.size()) != n + 1)
    throw std::invalid_argument("pairing: dimension mismatch");
  if (protocol.order < 1)
    throw std::invalid_argument("pairing: order must be >= 1");
  if (int(protocol.t_grid.size()) < protocol.order + 2)
    throw std::invalid_argument("pairing: t-grid too short for the order");
  for (std::size_t i = 0; i < protocol.t_grid.size(); ++i) {
    const double t = protocol.t_grid[i];
    if (!(t > 1.0 && t < kPi / 2.0))
      throw std::invalid_argument("pairing: t-grid must lie in (1, pi/2)");
    if (i > 0 && !(t > protocol.t_grid[i - 1]))
      throw std::invalid_argument("pairing: t-grid must increase strictly");
  }

  const bool radial = phi.radial_at(dist.basepoint);
  const KindEval ke(dist);
  const NodeCache cache =
      radial ? build_axisym(n, phi, kAxiFine) : build_general(dist, phi, true);

  KernelPairing out;
  std::vector<double> svals;
  for (double t : protocol.t_grid) {
    out.per_t.push_back(sum_cache_t(cache, ke, std::sin(t), std::cos(t)));
    svals.push_back(std::cos(t));
  }
  const auto est = richardson_to_zero(svals, out.per_t, protocol.order);
  out.value = est.back();
  out.err = std::abs(est.back() - est[est.size() - 2]);
  if (!(out.err <= 1e-4 * (1.0 + std::abs(out.value))))
    throw NonConvergent("pairing: approach extrapolation not Cauchy at 1e-4");

  // secondary route: direct quadrature of the boundary values
  double min_gap = 1e300;  // min of 1 - [x, y] over the support nodes
  for (double a : cache.am1) min_gap = std::min(min_gap, -a);
  if (min_gap > 1e-3 && n <= 3) {
    out.secondary = sum_cache_limit(cache, ke);
    const NodeCache coarse = radial ? build_axisym(n, phi, kAxiCoarse)
                                    : build_general(dist, phi, false);
    out.secondary_err = std::abs(out.secondary - sum_cache_limit(coarse, ke));
    out.secondary_method = "outside-direct";
    out.has_secondary = true;
  } else if (radial && (n == 2 || n == 3)) {
    out.secondary = sum_cache_limit(cache, ke);
    const NodeCache coarse = build_axisym(n, phi, kAxiCoarse);
    out.secondary_err = std::abs(out.secondary - sum_cache_limit(coarse, ke));
    out.secondary_method = "cone-split";
    out.has_secondary = true;
  } else if (radial && n == 4 &&
             (dist.kind == SphKind::PhiPow || dist.kind == SphKind::PhiTildePow) &&
             std::abs(dist.phipow_exponent + 1.0) < 1e-12) {
    // pull the pairing back along u = (1 - [x, y])/2 and hand the 1-D
    // distribution (u +- i0)^{-1}, delta term included, to the 1-D engine
    const CoareaWeight wf{&phi, n};
    Fn1D f;
    f.value = [wf](double u) { return wf(u); };
    f.derivs0.assign(13, cplx(0.0, 0.0));
    f.derivs0[0] = wf(0.0);
    f.lo = 0.5 * (1.0 - std::cosh(phi.radius));
    f.hi = 0.5 * (1.0 - std::cos(phi.radius));
    f.taylor_radius = 0.0;
    cplx total(0.0, 0.0);
    double err = 0.0;
    // future component carries one side, past the other; radial phi gives
    // the same weight function on both
    const Side fut = (dist.kind == SphKind::PhiPow) ? Side::Plus : Side::Minus;
    const Side pas = (fut == Side::Plus) ? Side::Minus : Side::Plus;
    for (Side s : {fut, pas}) {
      for (const auto& term : i0_decompose(dist.phipow_exponent, s)) {
        const PairingResult pr = pair_1d_fn(term.second, f);
        total += term.first * pr.value;
        err += std::abs(term.first) * pr.err_est;
      }
    }
    out.secondary = total;
    out.secondary_err = err;
    out.secondary_method = "coarea-dist1d";
    out.has_secondary = true;
  }
  return out;
}

double eigen_residual(const SphericalDist& dist, const DeSitterPoint& y, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("eigen_residual: h <= 0");
  const Chart ch(y);
  const int n = y.n();
  auto F = [&](const RVec& v) { return eval_pointwise(dist, ch.point(v)).value; };
  const cplx f0 = F(RVec(std::size_t(n), 0.0));
  cplx box(0.0, 0.0);
  for (int j = 0; j < n; ++j) {
    RVec vp(std::size_t(n), 0.0), vm(std::size_t(n), 0.0);
    vp[j] = h;
    vm[j] = -h;
    const cplx d2 = (F(vp) - 2.0 * f0 + F(vm)) / (h * h);
    box += (j == 0) ? -d2 : d2;
  }
  const bool phik =
      dist.kind == SphKind::PhiPow || dist.kind == SphKind::PhiTildePow;
  const cplx m2 = phik ? cplx(0.25 * dist.params.dims.n * (dist.params.dims.n - 2), 0.0)
                       : dist.params.msq();
  return std::abs(box - m2 * f0) / std::max(std::abs(f0), 1e-300);
}

double recursion_check(const CrownPoint& z, double lambda_p,
                       const std::vector<DeSitterPoint>& ygrid, double h) {
  if (ygrid.empty()) throw std::invalid_argument("recursion_check: empty y-grid");
  if (!(h > 0.0)) throw std::invalid_argument("recursion_check: h <= 0");
  const CVec zc = z.point();
  const double p = lambda_p;
  double worst = 0.0;
  for (const DeSitterPoint& y : ygrid) {
    if (zc.size() != y.p.size())
      throw std::invalid_argument("recursion_check: dimension mismatch");
    const Chart ch(y);
    const int n = y.n();
    auto Phi = [&](const RVec& v, double mup) {
      const cplx arg = 0.5 * (1.0 - mform(zc, ch.point(v).p));
      if (arg.real() <= 0.0 && std::fabs(arg.imag()) <= 1e-14)
        throw std::domain_error("recursion_check: power argument on the negative ray");
      return std::pow(arg, mup);
    };
    const RVec zero(std::size_t(n), 0.0);
    const cplx f0 = Phi(zero, p + 1.0);
    cplx box(0.0, 0.0);
    for (int j = 0; j < n; ++j) {
      RVec vp = zero, vm = zero;
      vp[j] = h;
      vm[j] = -h;
      const cplx d2 = (Phi(vp, p + 1.0) - 2.0 * f0 + Phi(vm, p + 1.0)) / (h * h);
      box += (j == 0) ? -d2 : d2;
    }
    const cplx resid = box + (p + 1.0) * (p + double(n)) * f0 -
                       (p + 1.0) * (p + 0.5 * n) * Phi(zero, p);
    worst = std::max(worst, std::abs(resid));
  }
  return worst;
}

GramResult gram_psd(const std::vector<CrownPoint>& pts, const SpectralParam& sp) {
  const int m = int(pts.size());
  if (m == 0) throw std::invalid_argument("gram_psd: empty point set");
  std::vector<std::vector<cplx>> G(m, std::vector<cplx>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) G[i][j] = psi_kernel(sp, pts[i], pts[j]);
  GramResult out;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      out.herm_defect =
          std::max(out.herm_defect, std::abs(G[i][j] - std::conj(G[j][i])));
  // real symmetric embedding [[A, -B], [B, A]] of the Hermitian average
  const int N = 2 * m;
  std::vector<std::vector<double>> M(N, std::vector<double>(N, 0.0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const cplx H = 0.5 * (G[i][j] + std::conj(G[j][i]));
      M[i][j] = H.real();
      M[i][j + m] = -H.imag();
      M[i + m][j] = H.imag();
      M[i + m][j + m] = H.real();
    }
  // cyclic Jacobi sweeps
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (int i = 0; i < N; ++i) {
      diag = std::max(diag, std::fabs(M[i][i]));
      for (int j = i + 1; j < N; ++j) off = std::max(off, std::fabs(M[i][j]));
    }
    if (off <= 1e-14 * (1.0 + diag)) break;
    for (int p = 0; p < N - 1; ++p)
      for (int q = p + 1; q < N; ++q) {
        const double apq = M[p][q];
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (M[q][q] - M[p][p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double cr = 1.0 / std::sqrt(t * t + 1.0), sr = t * cr;
        for (int k = 0; k < N; ++k) {
          const double mkp = M[k][p], mkq = M[k][q];
          M[k][p] = cr * mkp - sr * mkq;
          M[k][q] = sr * mkp + cr * mkq;
        }
        for (int k = 0; k < N; ++k) {
          const double mpk = M[p][k], mqk = M[q][k];
          M[p][k] = cr * mpk - sr * mqk;
          M[q][k] = sr * mpk + cr * mqk;
        }
      }
  }
  out.eigs.resize(N);
  for (int i = 0; i < N; ++i) out.eigs[i] = M[i][i];
  std::sort(out.eigs.begin(), out.eigs.end());
  out.min_eig = out.eigs.front();
  out.max_eig = out.eigs.back();
  return out;
}

cplx BoundarySplit::regular(double w) const {
  if (pure_power) return cplx(0.0, 0.0);
  if (log_factor) {
    cplx s(0.0, 0.0);
    for (size_t k = reg_series.size(); k-- > 0;) s = s * w + reg_series[k];
    return s;
  }
  return k_regular * gauss_2f1(tr.a, tr.b, tr.a + tr.b - tr.c + 1.0, w).value;
}

cplx BoundarySplit::coef(double w) const {
  if (pure_power) return cplx(1.0, 0.0);
  if (log_factor) {
    cplx s(0.0, 0.0);
    for (size_t k = coef_series.size(); k-- > 0;) s = s * w + coef_series[k];
    return s;
  }
  return k_singular *
         gauss_2f1(tr.c - tr.a, tr.c - tr.b, tr.c - tr.a - tr.b + 1.0, w).value;
}

cplx BoundarySplit::sfactor(double w, bool future) const {
  // the limit takes the lower side on the future component for Psi and
  // PhiPow, the upper for the conjugate kinds; mirrored on the past
  const int side =
      ((kind == SphKind::Psi || kind == SphKind::PhiPow) == future) ? -1 : +1;
  if (log_factor) {
    if (w > 0.0) return cplx(std::log(w), 0.0);
    return cplx(std::log(-w), -side * kPi);
  }
  if (w > 0.0) return std::pow(cplx(w, 0.0), exponent);
  return sided_one_minus_pow(-w, exponent, side);
}

cplx BoundarySplit::value(double w, bool future) const {
  return regular(w) + coef(w) * sfactor(w, future);
}

BoundarySplit boundary_split(const SphericalDist& dist) {
  BoundarySplit bs;
  bs.kind = dist.kind;
  bs.n = dist.params.dims.n;
  if (dist.kind == SphKind::Difference)
    throw std::invalid_argument("boundary_split: no split for the difference kind");
  if (dist.kind == SphKind::PhiPow || dist.kind == SphKind::PhiTildePow) {
    bs.pure_power = true;
    bs.exponent = dist.phipow_exponent;
    return bs;
  }
  const KindEval ke(dist);
  bs.tr = ke.tr;
  if (ke.pow_fast) {
    bs.pure_power = true;
    bs.exponent = -ke.pow_exp;
    return bs;
  }
  if (near_gamma_pole(bs.tr.a) || near_gamma_pole(bs.tr.b))
    throw std::invalid_argument("boundary_split: spectral parameter at a gamma pole");
  if (bs.n == 2) {
    // c = a + b: logarithmic connection. With w = 1 - z,
    //   F = G(c)/(G(a)G(b)) sum_k c_k [h_k - ln w] w^k,
    //   c_k = (a)_k (b)_k / (k!)^2, h_k = 2 psi(k+1) - psi(a+k) - psi(b+k).
    bs.log_factor = true;
    const cplx pref = gamma_fn(bs.tr.c) / (gamma_fn(bs.tr.a) * gamma_fn(bs.tr.b));
    const int K = 160;
    bs.reg_series.resize(K);
    bs.coef_series.resize(K);
    cplx ck(1.0, 0.0);
    for (int k = 0; k < K; ++k) {
      const cplx hk = 2.0 * digamma_fn(cplx(k + 1.0, 0.0)) -
                      digamma_fn(bs.tr.a + double(k)) -
                      digamma_fn(bs.tr.b + double(k));
      bs.reg_series[k] = pref * ck * hk;
      bs.coef_series[k] = -pref * ck;
      ck *= (bs.tr.a + double(k)) * (bs.tr.b + double(k)) /
            ((k + 1.0) * (k + 1.0));
    }
    return bs;
  }
  if (bs.n % 2 == 0)
    throw std::invalid_argument("boundary_split: even n >= 4 not supported");
  const cplx sg = bs.tr.c - bs.tr.a - bs.tr.b;  // (2 - n)/2, half-integer
  bs.exponent = sg;
  bs.k_regular = gamma_fn(bs.tr.c) * gamma_fn(sg) /
                 (gamma_fn(bs.tr.c - bs.tr.a) * gamma_fn(bs.tr.c - bs.tr.b));
  bs.k_singular =
      gamma_fn(bs.tr.c) * gamma_fn(-sg) / (gamma_fn(bs.tr.a) * gamma_fn(bs.tr.b));
  return bs;
}

}  // namespace crownwave
