#include "doctest.h"

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "crownwave/common.hpp"
#include "crownwave/hyp2f1.hpp"
#include "crownwave/kernels.hpp"
#include "crownwave/lorentz.hpp"
#include "crownwave/quad.hpp"

using namespace crownwave;

namespace {

double rel(cplx got, cplx want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

DeSitterPoint pole(int n) { return DeSitterPoint(basis_vec(n + 1, n)); }

CrownPoint crown_at(const Isometry& g, double t,
                    Branch br = Branch::Forward) {
  auto m = crown_membership(approach_point(g, t, br));
  REQUIRE(m.has_value());
  return *m;
}

Isometry random_g(int n, Rng& rng) {
  Isometry g = Isometry::identity(n + 1);
  for (int ax = 1; ax <= n; ++ax)
    g = make_boost(n, rng.uniform(-0.45, 0.45), ax) * g;
  if (n >= 2) g = make_rotation(n, 1, n, rng.uniform(0.0, 2.0 * kPi)) * g;
  return g;
}

// cone-straddling supports need the deeper grid; the default one only
// passes the Cauchy gate for supports away from the cone
ApproachProtocol deep_protocol() {
  ApproachProtocol pr;
  pr.t_grid = {1.2, 1.35, 1.45, 1.52, 1.55, 1.5625, 1.5658};
  pr.order = 3;
  return pr;
}

}  // namespace

TEST_CASE("kernel params: mass form and admissibility") {
  CHECK(rel(KernelParams(3, cplx(0.5, 0.0)).msq(), cplx(0.75, 0.0)) < 1e-14);
  CHECK(rel(KernelParams(2, cplx(0.0, 0.7)).msq(), cplx(0.74, 0.0)) < 1e-14);
  CHECK(rel(KernelParams(5, cplx(0.0, 0.0)).msq(), cplx(4.0, 0.0)) < 1e-14);
  CHECK_THROWS_AS(KernelParams(3, cplx(1.5, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(KernelParams(3, cplx(0.3, 0.4)), std::invalid_argument);
  CHECK_THROWS_AS(TestFnDS(pole(2), 0.6), std::invalid_argument);
  CHECK_THROWS_AS(TestFnDS(pole(2), 0.0), std::invalid_argument);
}

TEST_CASE("test functions: radial profile, support cutoff, composition") {
  const TestFnDS phi(pole(2), 0.3);
  const Chart ch(pole(2));
  const DeSitterPoint y1 = ch.point({0.1, -0.2});
  CHECK(std::fabs(phi.value(y1) -
                  phi.profile.value(std::sqrt(0.01 + 0.04))) < 1e-13);
  CHECK(phi.value(ch.point({0.31, 0.0})) == 0.0);
  CHECK(phi.value(DeSitterPoint({std::sinh(2.0), 0.0, std::cosh(2.0)})) == 0.0);
  CHECK(phi.radial_at(pole(2)));

  const Isometry g = make_boost(2, 0.3, 2);
  const TestFnDS phig = phi.composed(g);
  CHECK_FALSE(phig.radial_at(pole(2)));
  const DeSitterPoint y2 = apply_ds(make_boost(2, -0.3, 2), ch.point({0.05, 0.1}));
  CHECK(std::fabs(phig.value(y2) - phi.value(apply_ds(g, y2))) < 1e-13);
}

TEST_CASE("psi kernel: normalization and boost profile at the distinguished point") {
  for (int n : {2, 3, 4, 5}) {
    const SpectralParam sp(n, cplx(0.3, 0.0));
    // the distinguished point i e_0 sits at the t -> 0 end of the curve
    CVec ie0(std::size_t(n + 1), cplx(0.0, 0.0));
    ie0[0] = cplx(0.0, 1.0);
    auto m0 = crown_membership(ie0);
    REQUIRE(m0.has_value());
    const CrownPoint w0 = *m0;
    CHECK(rel(psi_kernel(sp, w0, w0), cplx(1.0, 0.0)) < 1e-13);
    const HypTriple tr = kernel_triple(sp);
    for (double th : {0.4, 1.1}) {
      const Isometry gb = make_boost(n, th, 1);
      auto mz = crown_membership(gb(ie0));
      REQUIRE(mz.has_value());
      const cplx want =
          gauss_2f1(tr.a, tr.b, tr.c,
                    cplx(-std::pow(std::sinh(0.5 * th), 2), 0.0)).value;
      CHECK(rel(psi_kernel(sp, *mz, w0), want) < 1e-12);
    }
    // imaginary spectral parameter at the same points
    const SpectralParam spi(n, cplx(0.0, 0.8));
    CHECK(rel(psi_kernel(spi, w0, w0), cplx(1.0, 0.0)) < 1e-13);
  }
  // points on different branches do not pair
  const SpectralParam sp2(2, cplx(0.3, 0.0));
  const CrownPoint zf = crown_at(Isometry::identity(3), 0.4, Branch::Forward);
  const CrownPoint zb = crown_at(Isometry::identity(3), 0.4, Branch::Backward);
  CHECK_THROWS_AS(psi_kernel(sp2, zf, zb), std::invalid_argument);
}

TEST_CASE("psi kernel: half-integer parameter collapses to the power kernel") {
  const SpectralParam sp(3, cplx(0.5, 0.0));
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const Branch br = (i % 3 == 0) ? Branch::Backward : Branch::Forward;
    const CrownPoint z = crown_at(random_g(3, rng), rng.uniform(0.2, 1.5), br);
    const CrownPoint w = crown_at(random_g(3, rng), rng.uniform(0.2, 1.5), br);
    const cplx ps = psi_kernel(sp, z, w);
    const cplx ph = phi_kernel(z, w, cplx(-0.5, 0.0));
    CHECK(rel(ps, ph) < 1e-10);
  }
}

TEST_CASE("phi kernel: principal powers") {
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const CrownPoint z = crown_at(random_g(2, rng), rng.uniform(0.2, 1.5));
    const CrownPoint w = crown_at(random_g(2, rng), rng.uniform(0.2, 1.5));
    CHECK(rel(phi_kernel(z, w, cplx(0.0, 0.0)), cplx(1.0, 0.0)) < 1e-14);
    const cplx mu(rng.uniform(-1.5, 1.5), rng.uniform(-1.0, 1.0));
    const cplx prod = phi_kernel(z, w, mu) * phi_kernel(z, w, -mu);
    CHECK(rel(prod, cplx(1.0, 0.0)) < 1e-12);
  }
}

TEST_CASE("pointwise boundary values: reflection, conjugation, difference") {
  const KernelParams kp(2, cplx(0.35, 0.0));
  const DeSitterPoint x = pole(2);
  const Chart ch(x);
  const SphericalDist dpsi(SphKind::Psi, x, kp);
  const SphericalDist dtil(SphKind::PsiTilde, x, kp);
  const SphericalDist ddif(SphKind::Difference, x, kp);

  // spacelike separation: both boundary values are the same real number
  const DeSitterPoint yout = ch.point({0.0, 0.4});
  const PointEval po = eval_pointwise(dpsi, yout);
  const PointEval pt = eval_pointwise(dtil, yout);
  CHECK(po.tag == CausalTag::Outside);
  CHECK(std::abs(po.value - pt.value) < 1e-14);
  CHECK(std::fabs(po.value.imag()) < 1e-13);
  CHECK(eval_pointwise(ddif, yout).value == cplx(0.0, 0.0));

  // future timelike separation: conjugate pair with a genuine jump
  const DeSitterPoint yin = ch.point({0.5, 0.0});
  const PointEval fo = eval_pointwise(dpsi, yin);
  const PointEval ft = eval_pointwise(dtil, yin);
  const PointEval fd = eval_pointwise(ddif, yin);
  CHECK(fo.tag == CausalTag::FuturePlus);
  CHECK(std::abs(ft.value - std::conj(fo.value)) <
        1e-12 * (1.0 + std::abs(fo.value)));
  CHECK(std::fabs(fo.value.imag()) > 1e-3);
  CHECK(std::abs(fo.value - ft.value - fd.value) <
        1e-12 * (1.0 + std::abs(fd.value)));
  const double warg = 0.5 * (1.0 + std::cosh(0.5));
  CHECK(std::abs(fd.value - jump_2f1(kp.spectral(), warg)) <
        1e-12 * (1.0 + std::abs(fd.value)));

  // past point at the same invariant: the jump flips sign
  const PointEval pd = eval_pointwise(ddif, ch.point({-0.5, 0.0}));
  CHECK(pd.tag == CausalTag::PastMinus);
  CHECK(std::abs(pd.value + fd.value) < 1e-12 * (1.0 + std::abs(fd.value)));

  // on the cone of the basepoint
  CHECK_THROWS_AS(eval_pointwise(dpsi, DeSitterPoint({0.3, 0.3, 1.0})),
                  OnConeSingularity);
}

TEST_CASE("pointwise boundary values: half-integer power law") {
  // n = 3, lambda = 1/2: the hypergeometric kernel IS the power kernel,
  // so the two side conventions must produce the same boundary value
  const KernelParams kp(3, cplx(0.5, 0.0));
  const DeSitterPoint x = pole(3);
  const Chart ch(x);
  const SphericalDist dpsi(SphKind::Psi, x, kp);
  const SphericalDist dpow(SphKind::PhiPow, x, kp);  // exponent -1/2
  const SphericalDist dtil(SphKind::PsiTilde, x, kp);

  const DeSitterPoint yfut = ch.point({0.6, 0.0, 0.0});
  const double warg = 0.5 * (1.0 + std::cosh(0.6));
  const cplx want = cplx(0.0, -1.0) * std::pow(warg - 1.0, -0.5);
  const cplx vpsi = eval_pointwise(dpsi, yfut).value;
  CHECK(rel(vpsi, want) < 1e-12);
  CHECK(rel(eval_pointwise(dpow, yfut).value, want) < 1e-12);
  CHECK(rel(eval_pointwise(dtil, yfut).value, std::conj(want)) < 1e-12);

  const DeSitterPoint ypast = ch.point({-0.6, 0.0, 0.0});
  CHECK(rel(eval_pointwise(dpsi, ypast).value, std::conj(want)) < 1e-12);

  // n = 4 power kernel with exponent -1: real 1/u on both components
  const KernelParams kp4(4, cplx(0.0, 0.0));
  const DeSitterPoint x4 = pole(4);
  const SphericalDist d4(SphKind::PhiPow, x4, kp4);
  const SphericalDist d4t(SphKind::PhiTildePow, x4, kp4);
  const DeSitterPoint y4 = Chart(x4).point({0.6, 0.0, 0.0, 0.0});
  const double u = 0.5 * (1.0 - std::cosh(0.6));
  CHECK(rel(eval_pointwise(d4, y4).value, cplx(1.0 / u, 0.0)) < 1e-12);
  CHECK(rel(eval_pointwise(d4t, y4).value, cplx(1.0 / u, 0.0)) < 1e-12);
}

TEST_CASE("boundary split: analytic parts plus sided factor match pointwise values") {
  Rng rng(42);
  std::vector<SphericalDist> dists;
  dists.emplace_back(SphKind::Psi, pole(2), KernelParams(2, cplx(0.0, 0.3)));
  dists.emplace_back(SphKind::PsiTilde, pole(2), KernelParams(2, cplx(0.0, 0.3)));
  dists.emplace_back(SphKind::Psi, pole(3), KernelParams(3, cplx(0.7, 0.0)));
  dists.emplace_back(SphKind::PsiTilde, pole(3), KernelParams(3, cplx(0.7, 0.0)));
  dists.emplace_back(SphKind::Psi, pole(3), KernelParams(3, cplx(0.5, 0.0)));
  dists.emplace_back(SphKind::PhiPow, pole(3), KernelParams(3, cplx(0.0, 0.4)));
  dists.emplace_back(SphKind::PhiTildePow, pole(5), KernelParams(5, cplx(0.9, 0.0)));

  for (const auto& d : dists) {
    const BoundarySplit bs = boundary_split(d);
    const Chart ch(d.basepoint);
    const int n = d.params.dims.n;
    for (int trial = 0; trial < 40; ++trial) {
      RVec v(std::size_t(n), 0.0);
      for (auto& c : v) c = rng.uniform(-0.45, 0.45);
      const DeSitterPoint y = ch.point(v);
      const double w = 0.5 * (1.0 - mform(d.basepoint.p, y.p));
      if (std::fabs(w) < 1e-6) continue;
      const bool future = v[0] > 0.0;
      cplx direct;
      try {
        direct = eval_pointwise(d, y).value;
      } catch (const OnConeSingularity&) {
        continue;
      }
      CHECK(rel(bs.value(w, future), direct) < 1e-10);
    }
    // the analytic parts stay bounded across the cone
    for (double w : {-1e-6, 0.0, 1e-6, -0.3, 0.3}) {
      CHECK(std::isfinite(std::abs(bs.regular(w))));
      CHECK(std::isfinite(std::abs(bs.coef(w))));
    }
  }

  const SphericalDist dd(SphKind::Difference, pole(2), KernelParams(2, cplx(0.3, 0.0)));
  CHECK_THROWS_AS(boundary_split(dd), std::invalid_argument);
  const SphericalDist d4(SphKind::Psi, pole(4), KernelParams(4, cplx(0.0, 1.2)));
  CHECK_THROWS_AS(boundary_split(d4), std::invalid_argument);
}

TEST_CASE("crown kernel converges to the boundary value") {
  const KernelParams kp(2, cplx(0.35, 0.0));
  const DeSitterPoint x = pole(2);
  const Chart ch(x);
  const SphericalDist dpsi(SphKind::Psi, x, kp);
  const Isometry id = Isometry::identity(3);
  // pointwise limits tolerate a later grid and one more elimination than
  // the pairing default
  const std::vector<double> tg{1.2, 1.35, 1.45, 1.52, 1.55, 1.5625, 1.5658};

  for (const RVec& v : {RVec{0.1, 0.45}, RVec{0.5, 0.1}, RVec{-0.45, 0.2}}) {
    const DeSitterPoint y = ch.point(v);
    std::vector<double> svals;
    std::vector<cplx> vals;
    for (double t : tg) {
      vals.push_back(kernel_at_real(dpsi, approach_point(id, t, Branch::Forward), y));
      svals.push_back(std::cos(t));
    }
    const auto est = richardson_to_zero(svals, vals, 4);
    const cplx bv = eval_pointwise(dpsi, y).value;
    CHECK(std::abs(est.back() - bv) < 1e-6 * (1.0 + std::abs(bv)));
  }
}

TEST_CASE("pairing: outside support, dual routes and linear independence") {
  const KernelParams kp(2, cplx(0.35, 0.0));
  const SphericalDist dpsi(SphKind::Psi, pole(2), kp);
  const SphericalDist dtil(SphKind::PsiTilde, pole(2), kp);
  const SphericalDist ddif(SphKind::Difference, pole(2), kp);

  // bump in the spacelike region of the basepoint; the 1e-8 dual-route
  // agreement needs the deep grid's truncation
  const ApproachProtocol pr = deep_protocol();
  const TestFnDS phi_out(DeSitterPoint({0.0, std::sin(0.9), std::cos(0.9)}), 0.28);
  const KernelPairing a = pairing(dpsi, phi_out, pr);
  CHECK(a.has_secondary);
  CHECK(a.secondary_method == "outside-direct");
  CHECK(std::abs(a.value - a.secondary) < 1e-8 * (1.0 + std::abs(a.value)));
  const KernelPairing c = pairing(dtil, phi_out, pr);
  CHECK(std::abs(c.value - a.value) < 1e-8 * (1.0 + std::abs(a.value)));
  CHECK(std::abs(pairing(ddif, phi_out, pr).value) < 1e-8);

  // bump inside the future cone of the basepoint
  const TestFnDS phi_in(DeSitterPoint({std::sinh(0.5), 0.0, std::cosh(0.5)}), 0.2);
  const KernelPairing b = pairing(dpsi, phi_in);
  const KernelPairing d = pairing(dtil, phi_in);
  CHECK(std::abs(d.value - std::conj(b.value)) <
        1e-6 * (1.0 + std::abs(b.value)));
  CHECK(std::fabs(b.value.imag()) > 1e-4);
  // 2x2 pairing matrix against {phi_out, phi_in} is nonsingular
  const cplx det = a.value * d.value - b.value * c.value;
  CHECK(std::abs(det) > 1e-5);
}

TEST_CASE("pairing: cone-straddling radial bump, split secondary route") {
  const KernelParams kp(2, cplx(0.35, 0.0));
  const TestFnDS phi(pole(2), 0.3);
  const SphericalDist dpsi(SphKind::Psi, pole(2), kp);
  const SphericalDist dtil(SphKind::PsiTilde, pole(2), kp);
  const SphericalDist ddif(SphKind::Difference, pole(2), kp);

  const ApproachProtocol pr = deep_protocol();
  const KernelPairing p = pairing(dpsi, phi, pr);
  CHECK(p.has_secondary);
  CHECK(p.secondary_method == "cone-split");
  CHECK(std::abs(p.value - p.secondary) < 1e-4 * (1.0 + std::abs(p.value)));

  const KernelPairing q = pairing(dtil, phi, pr);
  CHECK(std::abs(q.value - std::conj(p.value)) <
        1e-6 * (1.0 + std::abs(p.value)));

  const KernelPairing r = pairing(ddif, phi, pr);
  CHECK(std::abs(r.value - (p.value - q.value)) <
        3e-4 * (1.0 + std::abs(r.value)));
  // the three limit quadratures share one mesh, so they cancel exactly
  CHECK(std::abs(r.secondary - (p.secondary - q.secondary)) <
        1e-9 * (1.0 + std::abs(r.secondary)));

  // n = 3 with the half-integer fast path
  const KernelParams kp3(3, cplx(0.5, 0.0));
  const SphericalDist d3(SphKind::Psi, pole(3), kp3);
  const KernelPairing p3 = pairing(d3, TestFnDS(pole(3), 0.3), pr);
  CHECK(p3.secondary_method == "cone-split");
  CHECK(std::abs(p3.value - p3.secondary) < 1e-4 * (1.0 + std::abs(p3.value)));
}

TEST_CASE("pairing: moved basepoint matches group-transformed test function") {
  const KernelParams kp(2, cplx(0.35, 0.0));
  const Isometry g = make_boost(2, 0.25, 2);
  const DeSitterPoint x2 = apply_ds(g, pole(2));
  const TestFnDS phi(pole(2), 0.3);

  const ApproachProtocol pr = deep_protocol();
  const KernelPairing lhs =
      pairing(SphericalDist(SphKind::Psi, x2, kp), phi, pr);
  const KernelPairing rhs =
      pairing(SphericalDist(SphKind::Psi, pole(2), kp), phi.composed(g), pr);
  CHECK(std::abs(lhs.value - rhs.value) < 1e-5 * (1.0 + std::abs(lhs.value)));
}

TEST_CASE("pairing: invariance under the basepoint stabilizer") {
  const ApproachProtocol pr = deep_protocol();
  // boost fixing the basepoint, n = 2
  const KernelParams kp(2, cplx(0.35, 0.0));
  const SphericalDist dpsi(SphKind::Psi, pole(2), kp);
  const TestFnDS phi(pole(2), 0.3);
  const KernelPairing base = pairing(dpsi, phi, pr);
  const KernelPairing moved =
      pairing(dpsi, phi.composed(make_boost(2, 0.3, 1)), pr);
  CHECK(std::abs(moved.value - base.value) <
        1e-4 * (1.0 + std::abs(base.value)));

  // spatial rotation fixing the basepoint, n = 3
  const KernelParams kp3(3, cplx(0.5, 0.0));
  const SphericalDist d3(SphKind::Psi, pole(3), kp3);
  const TestFnDS phi3(pole(3), 0.3);
  const KernelPairing base3 = pairing(d3, phi3, pr);
  const KernelPairing rot3 =
      pairing(d3, phi3.composed(make_rotation(3, 1, 2, 0.7)), pr);
  CHECK(std::abs(rot3.value - base3.value) <
        1e-4 * (1.0 + std::abs(base3.value)));
}

TEST_CASE("pairing: even-dimensional power kernel via the 1-D pullback") {
  const ApproachProtocol pr = deep_protocol();
  const KernelParams kp(4, cplx(0.0, 0.0));
  const TestFnDS phi(pole(4), 0.3);
  const SphericalDist dpow(SphKind::PhiPow, pole(4), kp);
  const KernelPairing p = pairing(dpow, phi, pr);
  CHECK(p.has_secondary);
  CHECK(p.secondary_method == "coarea-dist1d");
  CHECK(std::abs(p.value - p.secondary) < 1e-4 * (1.0 + std::abs(p.value)));

  const SphericalDist dtil(SphKind::PhiTildePow, pole(4), kp);
  const KernelPairing q = pairing(dtil, phi, pr);
  CHECK(std::abs(q.value - std::conj(p.value)) <
        1e-6 * (1.0 + std::abs(p.value)));
}

TEST_CASE("pairing: flat kernel reproduces the chart volume integral") {
  // exponent 0 makes the power kernel identically 1, so the pairing is the
  // integral of phi against the chart volume density
  const KernelParams kp(2, cplx(0.0, 0.0));
  const TestFnDS phi(pole(2), 0.3);
  SphericalDist flat(SphKind::PhiPow, pole(2), kp);  // exponent (2-n)/2 = 0
  const KernelPairing p = pairing(flat, phi);
  for (const cplx& v : p.per_t)
    CHECK(std::abs(v - p.per_t[0]) < 1e-12 * (1.0 + std::abs(v)));

  const double R = phi.radius;
  const quad::Axis ax = quad::graded_axis(-R, R, {0.0}, R / 8.0, 8);
  std::vector<double> parts;
  quad::for_each_node2(ax, ax, 10, [&](double v0, double v1, double w) {
    const double s = std::sqrt(v0 * v0 + v1 * v1);
    if (s >= R) return;
    parts.push_back(w * phi.profile.value(s) *
                    metric_density_closed(2, v1 * v1 - v0 * v0));
  });
  const double mass = pairwise_sum(parts);
  CHECK(std::abs(p.value - mass) < 1e-8 * mass);

  // n = 3 against a plain tensor quadrature
  const KernelParams kp3(3, cplx(0.0, 0.0));
  const TestFnDS phi3(pole(3), 0.3);
  SphericalDist flat3(SphKind::PhiPow, pole(3), kp3);
  flat3.phipow_exponent = cplx(0.0, 0.0);
  const KernelPairing p3 = pairing(flat3, phi3);
  const quad::Axis a3 = quad::graded_axis(-R, R, {0.0}, R / 6.0, 8);
  std::vector<double> parts3;
  for (std::size_t i = 0; i + 1 < a3.brk.size(); ++i) {
    const double m0 = 0.5 * (a3.brk[i] + a3.brk[i + 1]);
    const double h0 = 0.5 * (a3.brk[i + 1] - a3.brk[i]);
    const double* gx = quad::gauss_x(6);
    const double* gw = quad::gauss_w(6);
    for (int k = 0; k < 6; ++k) {
      const double v0 = m0 + h0 * gx[k];
      quad::for_each_node2(a3, a3, 6, [&](double v1, double v2, double w) {
        const double rr = v1 * v1 + v2 * v2;
        const double s = std::sqrt(rr + v0 * v0);
        if (s >= R) return;
        parts3.push_back(w * gw[k] * h0 * phi3.profile.value(s) *
                         metric_density_closed(3, rr - v0 * v0));
      });
    }
  }
  const double mass3 = pairwise_sum(parts3);
  CHECK(std::abs(p3.value - mass3) < 1e-7 * mass3);
}

TEST_CASE("pairing: protocol validation") {
  const KernelParams kp(2, cplx(0.35, 0.0));
  const SphericalDist dpsi(SphKind::Psi, pole(2), kp);
  const TestFnDS phi(pole(2), 0.3);
  ApproachProtocol bad;
  bad.t_grid = {0.9, 1.2, 1.3, 1.4, 1.5};
  CHECK_THROWS_AS(pairing(dpsi, phi, bad), std::invalid_argument);
  bad.t_grid = {1.2, 1.3};
  CHECK_THROWS_AS(pairing(dpsi, phi, bad), std::invalid_argument);
  bad.t_grid = {1.2, 1.3, 1.3, 1.4, 1.5};
  CHECK_THROWS_AS(pairing(dpsi, phi, bad), std::invalid_argument);
  ApproachProtocol bad2;
  bad2.order = 0;
  CHECK_THROWS_AS(pairing(dpsi, phi, bad2), std::invalid_argument);
}

TEST_CASE("eigen residual: quadratic step law") {
  const KernelParams kp(2, cplx(0.35, 0.0));
  const DeSitterPoint x = pole(2);
  const Chart ch(x);
  const SphericalDist dpsi(SphKind::Psi, x, kp);

  for (const RVec& v : {RVec{0.0, 0.45}, RVec{0.5, 0.0}}) {
    const DeSitterPoint y = ch.point(v);
    const double r1 = eigen_residual(dpsi, y, 1e-2);
    const double r2 = eigen_residual(dpsi, y, 5e-3);
    const double r4 = eigen_residual(dpsi, y, 2.5e-3);
    CHECK(r1 / r2 > 3.0);
    CHECK(r1 / r2 < 5.3);
    CHECK(r2 / r4 > 3.0);
    CHECK(r2 / r4 < 5.3);
    const std::vector<double> hs{1e-2, 5e-3, 2.5e-3}, rs{r1, r2, r4};
    const auto est = richardson_to_zero(hs, rs, std::vector<double>{2.0, 4.0});
    CHECK(std::fabs(est.back()) < 1e-5);
  }

  // power kernel in n = 4 carries eigenvalue n(n-2)/4 = 2; keep the point
  // well away from the cone, the exponent -1 pole amplifies the stencil
  const KernelParams kp4(4, cplx(0.0, 0.0));
  const SphericalDist d4(SphKind::PhiPow, pole(4), kp4);
  const DeSitterPoint y4 = Chart(pole(4)).point({0.0, 0.9, 0.0, 0.0});
  const double s1 = eigen_residual(d4, y4, 1e-2);
  const double s2 = eigen_residual(d4, y4, 5e-3);
  CHECK(s1 < 2e-3);
  CHECK(s1 / s2 > 3.0);
  CHECK(s1 / s2 < 5.3);

  // constant kernel: exponent 0 in n = 2, mass 0, residual vanishes
  const SphericalDist flat(SphKind::PhiPow, pole(2), KernelParams(2, cplx(0.0, 0.0)));
  CHECK(eigen_residual(flat, ch.point({0.0, 0.4}), 1e-2) < 1e-14);
}

TEST_CASE("recursion ladder at a crown point") {
  const CrownPoint z = crown_at(Isometry::identity(4), 1.2);
  const Chart ch(pole(3));
  const std::vector<DeSitterPoint> grid = {
      ch.point({0.0, 0.3, 0.0}), ch.point({0.2, 0.0, 0.1}),
      ch.point({-0.15, 0.2, 0.1}), ch.point({0.0, 0.0, 0.45}),
      ch.point({0.3, 0.1, 0.0})};

  // exponent 0 rung: the ladder identity closes exactly, residual is pure
  // finite-difference error
  CHECK(recursion_check(z, 0.0, grid, 1e-3) < 5e-6);

  const double r1 = recursion_check(z, 0.7, grid, 1e-2);
  const double r2 = recursion_check(z, 0.7, grid, 5e-3);
  CHECK(r1 / r2 > 3.2);
  CHECK(r1 / r2 < 4.9);
}

TEST_CASE("gram matrix: positivity, hermiticity, invariance") {
  for (const cplx lam : {cplx(0.0, 0.6), cplx(0.35, 0.0)}) {
    const SpectralParam sp(2, lam);
    Rng rng(lam.imag() > 0 ? 21 : 22);
    std::vector<Isometry> gs;
    std::vector<double> ts;
    std::vector<CrownPoint> pts;
    for (int k = 0; k < 20; ++k) {
      gs.push_back(random_g(2, rng));
      ts.push_back(rng.uniform(1.0, 1.5));
      pts.push_back(crown_at(gs.back(), ts.back()));
    }
    const GramResult gr = gram_psd(pts, sp);
    CHECK(gr.herm_defect < 1e-10);
    CHECK(gr.min_eig >= -1e-8 * gr.max_eig);
    // trace consistency: the real embedding doubles the spectrum
    double tr2 = 0.0;
    for (const CrownPoint& p : pts) tr2 += 2.0 * psi_kernel(sp, p, p).real();
    double se = 0.0;
    for (double e : gr.eigs) se += e;
    CHECK(std::fabs(se - tr2) < 1e-9 * (1.0 + std::fabs(tr2)));

    // moving every point by one isometry leaves the kernel matrix unchanged
    const Isometry g0 = make_boost(2, 0.2, 1) * make_rotation(2, 1, 2, 0.5);
    std::vector<CrownPoint> moved;
    for (int k = 0; k < 20; ++k) moved.push_back(crown_at(g0 * gs[k], ts[k]));
    for (int i = 0; i < 20; i += 3)
      for (int j = 0; j < 20; j += 3) {
        const cplx gij = psi_kernel(sp, pts[i], pts[j]);
        const cplx mij = psi_kernel(sp, moved[i], moved[j]);
        CHECK(std::abs(gij - mij) < 1e-10 * (1.0 + std::abs(gij)));
      }
  }
}
