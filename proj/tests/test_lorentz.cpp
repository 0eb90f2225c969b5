#include "doctest.h"

#include <cmath>

#include "crownwave/common.hpp"
#include "crownwave/lorentz.hpp"

using namespace crownwave;

namespace {

// random isometry from a handful of boosts and rotations
Isometry random_isometry(int n, Rng& rng) {
  Isometry g = Isometry::identity(n + 1);
  for (int k = 0; k < 3; ++k) {
    const int axis = 1 + rng.index(n);
    g = g * make_boost(n, rng.uniform(-1.0, 1.0), axis);
    int i = 1 + rng.index(n - 1);
    int j = i + 1 + rng.index(n - i);
    g = g * make_rotation(n, i, j, rng.uniform(0.0, 2.0 * kPi));
  }
  return g;
}

RVec random_tangent_chart(const Chart& ch, int n, Rng& rng, double qlo, double qhi) {
  // draw direction, then rescale so [v,v] hits a target in [qlo, qhi]
  for (;;) {
    RVec c(n);
    for (int i = 0; i < n; ++i) c[i] = rng.uniform(-1.0, 1.0);
    RVec v = ch.ambient_of(c);
    const double q = mform(v, v);
    if (std::fabs(q) < 1e-6) continue;
    const double target = rng.uniform(qlo, qhi);
    if (q * target <= 0.0) continue;
    return scale(std::sqrt(target / q), v);
  }
}

}  // namespace

TEST_CASE("minkowski form basics") {
  const int n = 4;
  const RVec e0 = basis_vec(n + 1, 0), en = basis_vec(n + 1, n);
  CHECK(mform(e0, e0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(mform(en, en) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mform(e0, en) == 0.0);
  Rng rng(11);
  for (int k = 0; k < 20; ++k) {
    RVec a(n + 1), b(n + 1);
    for (int i = 0; i <= n; ++i) {
      a[i] = rng.uniform(-2.0, 2.0);
      b[i] = rng.uniform(-2.0, 2.0);
    }
    CHECK(mform(a, b) == doctest::Approx(mform(b, a)).epsilon(1e-14));
  }
}

TEST_CASE("entire cosine/sinc pair") {
  CHECK(cs_c(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cs_s(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  const double q = kPi * kPi / 4.0;
  CHECK(std::fabs(cs_c(q)) < 1e-15);
  CHECK(cs_s(q) == doctest::Approx(std::sin(kPi / 2.0) / (kPi / 2.0)).epsilon(1e-14));
  CHECK(cs_c(-1.0) == doctest::Approx(std::cosh(1.0)).epsilon(1e-14));
  CHECK(cs_s(-1.0) == doctest::Approx(std::sinh(1.0)).epsilon(1e-14));
  // series/closed-form agreement near the switch point
  for (double z : {9e-5, -9e-5, 1.2e-4, -1.2e-4}) {
    const double r = std::sqrt(std::fabs(z));
    const double cref = z > 0 ? std::cos(r) : std::cosh(r);
    const double sref = z > 0 ? std::sin(r) / r : std::sinh(r) / r;
    CHECK(cs_c(z) == doctest::Approx(cref).epsilon(1e-14));
    CHECK(cs_s(z) == doctest::Approx(sref).epsilon(1e-14));
  }
  // complex arguments agree with real ones on the real axis
  CHECK(std::abs(cs_c(cplx(0.7, 0.0)) - cs_c(0.7)) < 1e-15);
  CHECK(std::abs(cs_s(cplx(-0.7, 0.0)) - cs_s(-0.7)) < 1e-15);
}

TEST_CASE("exp_map closed forms") {
  const int n = 3;
  const DeSitterPoint x(basis_vec(n + 1, n));
  // timelike geodesic through e_n in the e_0 direction
  const double th = 0.8;
  RVec v = scale(th, basis_vec(n + 1, 0));
  DeSitterPoint y = exp_map(x, v);
  CHECK(y.p[0] == doctest::Approx(std::sinh(th)).epsilon(1e-14));
  CHECK(y.p[n] == doctest::Approx(std::cosh(th)).epsilon(1e-14));
  // spacelike geodesic
  v = scale(th, basis_vec(n + 1, 1));
  y = exp_map(x, v);
  CHECK(y.p[1] == doctest::Approx(std::sin(th)).epsilon(1e-14));
  CHECK(y.p[n] == doctest::Approx(std::cos(th)).epsilon(1e-14));
}

TEST_CASE("null geodesics are affine lines") {
  const int n = 4;
  const DeSitterPoint x(basis_vec(n + 1, n));
  for (double a : {1e-3, 0.3, 1.0, 7.5}) {
    RVec v(n + 1, 0.0);
    v[0] = a;
    v[1] = a;  // null and tangent at e_n
    const DeSitterPoint y = exp_map(x, v);
    for (int i = 0; i <= n; ++i) {
      const double want = x.p[i] + v[i];
      CHECK(std::fabs(y.p[i] - want) <= 1e-14 * (1.0 + std::fabs(want)));
    }
  }
}

TEST_CASE("log_map inverts exp_map inside the chart") {
  const int n = 3;
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const Isometry g = random_isometry(n, rng);
    const DeSitterPoint x = apply_ds(g, DeSitterPoint(basis_vec(n + 1, n)));
    const Chart ch(x);
    const bool spacelike = (trial % 2 == 0);
    const RVec v = spacelike
                       ? random_tangent_chart(ch, n, rng, 0.01, 0.9 * chart_bound())
                       : random_tangent_chart(ch, n, rng, -4.0, -0.01);
    const DeSitterPoint y = exp_map(x, v);
    const RVec w = log_map(x, y);
    for (int i = 0; i <= n; ++i)
      CHECK(std::fabs(w[i] - v[i]) < 1e-9 * (1.0 + std::fabs(v[i])));
  }
  // the base point itself maps to zero
  const DeSitterPoint x(basis_vec(n + 1, n));
  const RVec z = log_map(x, x);
  for (double c : z) CHECK(std::fabs(c) < 1e-14);
}

TEST_CASE("log_map rejects points beyond the chart bound") {
  const int n = 3;
  const DeSitterPoint x(basis_vec(n + 1, n));
  const double th = 1.3;  // th^2 = 1.69 >= pi/2
  RVec y(n + 1, 0.0);
  y[1] = std::sin(th);
  y[n] = std::cos(th);
  CHECK_THROWS_AS((void)log_map(x, DeSitterPoint(y)), NotInChart);
  // antipode is far outside
  RVec a(n + 1, 0.0);
  a[n] = -1.0;
  CHECK_THROWS_AS((void)log_map(x, DeSitterPoint(a)), NotInChart);
}

TEST_CASE("causal classification around a base point") {
  const int n = 3;
  const DeSitterPoint x(basis_vec(n + 1, n));
  auto shoot = [&](double a0, double a1) {
    RVec v(n + 1, 0.0);
    v[0] = a0;
    v[1] = a1;
    return exp_map(x, v);
  };
  CHECK(classify_causal(x, shoot(0.5, 0.0)) == CausalTag::FuturePlus);
  CHECK(classify_causal(x, shoot(-0.5, 0.0)) == CausalTag::PastMinus);
  CHECK(classify_causal(x, shoot(0.0, 0.5)) == CausalTag::Outside);
  CHECK(classify_causal(x, x) == CausalTag::OnCone);
  CHECK(classify_causal(x, shoot(0.4, 0.4)) == CausalTag::OnCone);
  CHECK(classify_causal(x, shoot(-0.3, 0.3)) == CausalTag::OnCone);
}

TEST_CASE("isometry construction and validation") {
  const int n = 4;
  const double t = 0.7;
  const Isometry a = make_boost(n, t);
  RVec img = a(basis_vec(n + 1, n));
  CHECK(img[0] == doctest::Approx(std::sinh(t)).epsilon(1e-14));
  CHECK(img[n] == doctest::Approx(std::cosh(t)).epsilon(1e-14));
  // boosts along axis < n fix e_n
  img = make_boost(n, t, 1)(basis_vec(n + 1, n));
  CHECK(img[n] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::fabs(img[0]) < 1e-15);
  // rotations fix e_0, and fix e_n iff the plane avoids it
  img = make_rotation(n, 1, 2, 0.9)(basis_vec(n + 1, 0));
  CHECK(img[0] == doctest::Approx(1.0).epsilon(1e-15));
  img = make_rotation(n, 1, 2, 0.9)(basis_vec(n + 1, n));
  CHECK(img[n] == doctest::Approx(1.0).epsilon(1e-15));
  img = make_rotation(n, 1, n, 0.9)(basis_vec(n + 1, n));
  CHECK(img[n] == doctest::Approx(std::cos(0.9)).epsilon(1e-14));

  // form preservation under random products
  Rng rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const Isometry g = random_isometry(n, rng);
    RVec u(n + 1), w(n + 1);
    for (int i = 0; i <= n; ++i) {
      u[i] = rng.uniform(-1.0, 1.0);
      w[i] = rng.uniform(-1.0, 1.0);
    }
    CHECK(mform(g(u), g(w)) == doctest::Approx(mform(u, w)).epsilon(1e-12));
  }

  // rejects reflections and time reversal
  std::vector<RVec> refl(n + 1, RVec(n + 1, 0.0));
  for (int i = 0; i <= n; ++i) refl[i][i] = 1.0;
  refl[1][1] = -1.0;
  CHECK_THROWS_AS(Isometry{refl}, std::invalid_argument);
  std::vector<RVec> trev(n + 1, RVec(n + 1, 0.0));
  for (int i = 0; i <= n; ++i) trev[i][i] = 1.0;
  trev[0][0] = -1.0;
  CHECK_THROWS_AS(Isometry{trev}, std::invalid_argument);
}

TEST_CASE("crown membership and approach points") {
  const int n = 3;
  const Isometry id = Isometry::identity(n + 1);
  const double t = 0.8;
  const CVec z = approach_point(id, t, Branch::Forward);
  CHECK(std::abs(z[0] - cplx(0.0, std::cos(t))) < 1e-15);
  CHECK(std::abs(z[n] - cplx(std::sin(t), 0.0)) < 1e-15);
  auto mem = crown_membership(z);
  REQUIRE(mem.has_value());
  CHECK(mem->branch == Branch::Forward);
  CHECK(mem->v[0] == doctest::Approx(std::cos(t)).epsilon(1e-14));
  CHECK(mem->u[n] == doctest::Approx(std::sin(t)).epsilon(1e-14));

  const CVec zb = approach_point(id, t, Branch::Backward);
  auto memb = crown_membership(zb);
  REQUIRE(memb.has_value());
  CHECK(memb->branch == Branch::Backward);
  CHECK(memb->v[0] == doctest::Approx(std::cos(t)).epsilon(1e-14));

  // boosted approach points stay inside
  const Isometry g = make_boost(n, 1.1) * make_rotation(n, 1, 2, 0.4);
  for (double tt : {0.2, 0.8, 1.4}) {
    auto m2 = crown_membership(approach_point(g, tt, Branch::Forward));
    CHECK(m2.has_value());
  }

  // real points are rejected at the [v,v]<0 check
  std::string why;
  CHECK(!crown_membership(to_complex(basis_vec(n + 1, n)), &why).has_value());
  CHECK(why == "[v,v]<0 violated");
  // broken quadric
  CVec bad = z;
  for (auto& c : bad) c *= 1.1;
  CHECK(!crown_membership(bad, &why).has_value());
  CHECK(why == "[u,u]-[v,v]=1 violated");

  CHECK_THROWS_AS((void)approach_point(id, 0.0, Branch::Forward), std::invalid_argument);
  CHECK_THROWS_AS((void)approach_point(id, kPi / 2.0, Branch::Forward),
                  std::invalid_argument);
}

TEST_CASE("quadric constraint enforced over many samples") {
  const int n = 2;
  Rng rng(99);
  const DeSitterPoint x(basis_vec(n + 1, n));
  const Chart ch(x);
  int count = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const bool spacelike = (trial % 2 == 0);
    const RVec v = spacelike
                       ? random_tangent_chart(ch, n, rng, 0.0001, 0.95 * chart_bound())
                       : random_tangent_chart(ch, n, rng, -2.5, -0.0001);
    const DeSitterPoint y = exp_map(x, v);  // ctor re-checks the quadric
    const double err = std::fabs(mform(y.p, y.p) - 1.0);
    CHECK(err < 1e-12);
    const RVec w = log_map(x, y);
    double diff = 0.0;
    for (int i = 0; i <= n; ++i) diff = std::max(diff, std::fabs(w[i] - v[i]));
    CHECK(diff < 1e-8);
    ++count;
  }
  CHECK(count == 10000);
}

TEST_CASE("chart frame is Lorentz-orthonormal") {
  const int n = 4;
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Isometry g = random_isometry(n, rng);
    const DeSitterPoint x = apply_ds(g, DeSitterPoint(basis_vec(n + 1, n)));
    const Chart ch(x);
    REQUIRE(int(ch.b.size()) == n);
    for (int i = 0; i < n; ++i) {
      CHECK(std::fabs(mform(ch.b[i], x.p)) < 1e-11);
      for (int j = i; j < n; ++j) {
        const double want = (i != j) ? 0.0 : (i == 0 ? -1.0 : 1.0);
        CHECK(mform(ch.b[i], ch.b[j]) == doctest::Approx(want).epsilon(1e-11));
      }
    }
    // chart_of inverts ambient_of
    RVec c(n);
    for (int i = 0; i < n; ++i) c[i] = rng.uniform(-0.5, 0.5);
    const RVec back = ch.chart_of(ch.ambient_of(c));
    for (int i = 0; i < n; ++i) CHECK(back[i] == doctest::Approx(c[i]).epsilon(1e-12));
  }
  // at e_n the frame is the coordinate one
  const Chart ch(DeSitterPoint(basis_vec(n + 1, n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= n; ++j)
      CHECK(ch.b[i][j] == doctest::Approx(j == i ? 1.0 : 0.0).epsilon(1e-15));
}

TEST_CASE("metric density in normal coordinates") {
  const int n = 3;
  const DeSitterPoint x(basis_vec(n + 1, n));
  CHECK(metric_density(x, RVec(n, 0.0)) == doctest::Approx(1.0).epsilon(1e-9));
  Rng rng(17);
  const Chart ch(x);
  for (int trial = 0; trial < 30; ++trial) {
    const bool spacelike = (trial % 2 == 0);
    const RVec v = spacelike
                       ? random_tangent_chart(ch, n, rng, 0.01, 0.9 * chart_bound())
                       : random_tangent_chart(ch, n, rng, -2.0, -0.01);
    const double q = mform(v, v);
    const double fd = metric_density(x, ch.chart_of(v));
    const double cf = metric_density_closed(n, q);
    CHECK(fd == doctest::Approx(cf).epsilon(1e-8));
  }
  // density is an invariant of [v,v] only
  const double q0 = 0.437;
  RVec v1 = scale(std::sqrt(q0), basis_vec(n + 1, 1));
  RVec v2 = ch.ambient_of(RVec{0.3, 0.0, 0.0});
  v2 = scale(std::sqrt(q0 / mform(v2, v2)), v2);
  (void)v1;
  // same q along different timelike/spacelike mixes
  RVec c3{0.4, 0.5, 0.2};
  RVec v3 = ch.ambient_of(c3);
  const double q3 = mform(v3, v3);
  CHECK(metric_density(x, c3) ==
        doctest::Approx(metric_density_closed(n, q3)).epsilon(1e-8));
  // boosted base point gives the same density profile
  const DeSitterPoint xb = apply_ds(make_boost(n, 0.9), x);
  const Chart chb(xb);
  CHECK(metric_density(xb, c3) ==
        doctest::Approx(metric_density(x, c3)).epsilon(1e-7));
  CHECK_THROWS_AS((void)metric_density(x, RVec{0.0, 1.3, 0.0}), NotInChart);
}

TEST_CASE("chart bound configuration switch") {
  const int n = 2;
  const DeSitterPoint x(basis_vec(n + 1, n));
  const double th = 1.35;  // th^2 = 1.8225: beyond pi/2, inside (pi/2)^2
  RVec y(n + 1, 0.0);
  y[1] = std::sin(th);
  y[n] = std::cos(th);
  const DeSitterPoint yp(y);
  CHECK_THROWS_AS((void)log_map(x, yp), NotInChart);
  set_chart_bound_squared(true);
  CHECK(chart_bound() == doctest::Approx((kPi / 2.0) * (kPi / 2.0)));
  const RVec v = log_map(x, yp);
  CHECK(std::sqrt(mform(v, v)) == doctest::Approx(th).epsilon(1e-12));
  set_chart_bound_squared(false);
  CHECK(chart_bound() == doctest::Approx(kPi / 2.0));
}
