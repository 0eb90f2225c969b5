#include "crownwave/lorentz.hpp"
#include <algorithm>
#include <cmath>

namespace crownwave {

namespace {

double euclid2(const RVec& a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return s;
}

// determinant by Gaussian elimination with partial pivoting (tiny matrices)
double det_small(std::vector<RVec> m) {
  const int n = int(m.size());
  double det = 1.0;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int r = k + 1; r < n; ++r)
      if (std::fabs(m[r][k]) > std::fabs(m[piv][k])) piv = r;
    if (piv != k) {
      std::swap(m[piv], m[k]);
      det = -det;
    }
    if (m[k][k] == 0.0) return 0.0;
    det *= m[k][k];
    for (int r = k + 1; r < n; ++r) {
      const double f = m[r][k] / m[k][k];
      for (int c = k; c < n; ++c) m[r][c] -= f * m[k][c];
    }
  }
  return det;
}

bool g_chart_bound_squared = false;

}  // namespace

void set_chart_bound_squared(bool on) { g_chart_bound_squared = on; }
double chart_bound() {
  return g_chart_bound_squared ? (kPi / 2.0) * (kPi / 2.0) : kPi / 2.0;
}

ModelDims::ModelDims(int n_) : n(n_) {
  if (n < 2 || n > 9) throw std::invalid_argument("ModelDims: need 2 <= n <= 9");
}

double mform(const RVec& z, const RVec& w) {
  if (z.size() != w.size()) throw std::invalid_argument("mform: dimension mismatch");
  double s = -z[0] * w[0];
  for (std::size_t j = 1; j < z.size(); ++j) s += z[j] * w[j];
  return s;
}

cplx mform(const CVec& z, const CVec& w) {
  if (z.size() != w.size()) throw std::invalid_argument("mform: dimension mismatch");
  cplx s = -z[0] * w[0];
  for (std::size_t j = 1; j < z.size(); ++j) s += z[j] * w[j];
  return s;
}

cplx mform(const CVec& z, const RVec& w) {
  if (z.size() != w.size()) throw std::invalid_argument("mform: dimension mismatch");
  cplx s = -z[0] * w[0];
  for (std::size_t j = 1; j < z.size(); ++j) s += z[j] * w[j];
  return s;
}

RVec basis_vec(int ambient, int i) {
  RVec e(ambient, 0.0);
  e.at(i) = 1.0;
  return e;
}

RVec add(const RVec& a, const RVec& b) {
  RVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

RVec sub(const RVec& a, const RVec& b) {
  RVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

RVec scale(double c, const RVec& a) {
  RVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

CVec to_complex(const RVec& a) {
  CVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = cplx(a[i], 0.0);
  return r;
}

double cs_c(double z) {
  if (std::fabs(z) < 1e-4)
    return 1.0 + z * (-0.5 + z * (1.0 / 24.0 + z * (-1.0 / 720.0)));
  if (z > 0.0) return std::cos(std::sqrt(z));
  return std::cosh(std::sqrt(-z));
}

double cs_c_minus1(double z) {
  if (z >= 0.0) {
    const double h = 0.5 * std::sqrt(z);
    return -2.0 * std::sin(h) * std::sin(h);
  }
  const double h = 0.5 * std::sqrt(-z);
  return 2.0 * std::sinh(h) * std::sinh(h);
}

double cs_s(double z) {
  if (std::fabs(z) < 1e-4)
    return 1.0 + z * (-1.0 / 6.0 + z * (1.0 / 120.0 + z * (-1.0 / 5040.0)));
  if (z > 0.0) {
    const double r = std::sqrt(z);
    return std::sin(r) / r;
  }
  const double r = std::sqrt(-z);
  return std::sinh(r) / r;
}

cplx cs_c(cplx z) {
  if (std::abs(z) < 1e-4)
    return 1.0 + z * (-0.5 + z * (1.0 / 24.0 + z * (-1.0 / 720.0)));
  return std::cos(std::sqrt(z));  // even in sqrt: branch-free
}

cplx cs_s(cplx z) {
  if (std::abs(z) < 1e-4)
    return 1.0 + z * (-1.0 / 6.0 + z * (1.0 / 120.0 + z * (-1.0 / 5040.0)));
  const cplx r = std::sqrt(z);
  return std::sin(r) / r;
}

DeSitterPoint::DeSitterPoint(RVec coords) : p(std::move(coords)) {
  if (p.size() < 3) throw std::invalid_argument("DeSitterPoint: ambient dim < 3");
  const double scale = 1.0 + euclid2(p);
  if (std::fabs(mform(p, p) - 1.0) > kQuadricTol * scale)
    throw std::invalid_argument("DeSitterPoint: not on the quadric [p,p] = 1");
}

DeSitterPoint DeSitterPoint::renormalized(const RVec& c) {
  const double s = mform(c, c);
  if (!(s > 0.0))
    throw std::invalid_argument("DeSitterPoint::renormalized: [p,p] <= 0");
  return DeSitterPoint(scale(1.0 / std::sqrt(s), c));
}

TangentVector::TangentVector(DeSitterPoint b, RVec vv)
    : base(std::move(b)), v(std::move(vv)) {
  if (v.size() != base.p.size())
    throw std::invalid_argument("TangentVector: dimension mismatch");
  const double scale = 1.0 + euclid2(v);
  if (std::fabs(mform(base.p, v)) > kQuadricTol * scale)
    throw std::invalid_argument("TangentVector: [base, v] != 0");
}

CVec CrownPoint::point() const {
  CVec z(u.size());
  const double s = (branch == Branch::Forward) ? 1.0 : -1.0;
  for (std::size_t i = 0; i < u.size(); ++i) z[i] = cplx(u[i], s * v[i]);
  return z;
}

Isometry::Isometry(std::vector<RVec> rows) : m(std::move(rows)) {
  const int d = int(m.size());
  if (d < 3) throw std::invalid_argument("Isometry: ambient dim < 3");
  double maxabs = 0.0;
  for (auto& r : m) {
    if (int(r.size()) != d) throw std::invalid_argument("Isometry: not square");
    for (double x : r) maxabs = std::max(maxabs, std::fabs(x));
  }
  const double tol = kQuadricTol * std::max(1.0, maxabs * maxabs) * d;
  // columns must be an orthonormal Lorentz frame: [col_i, col_j] = eta_ij
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      double form = -m[0][i] * m[0][j];
      for (int r = 1; r < d; ++r) form += m[r][i] * m[r][j];
      const double want = (i != j) ? 0.0 : (i == 0 ? -1.0 : 1.0);
      if (std::fabs(form - want) > tol)
        throw std::invalid_argument("Isometry: form not preserved");
    }
  }
  if (std::fabs(det_small(m) - 1.0) > 1e-7 * std::max(1.0, maxabs))
    throw std::invalid_argument("Isometry: det != 1");
  if (!(m[0][0] > 0.0))
    throw std::invalid_argument("Isometry: not in the identity component");
}

RVec Isometry::operator()(const RVec& x) const {
  if (int(x.size()) != dim()) throw std::invalid_argument("Isometry: dim mismatch");
  RVec y(x.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) y[i] += m[i][j] * x[j];
  return y;
}

CVec Isometry::operator()(const CVec& z) const {
  if (int(z.size()) != dim()) throw std::invalid_argument("Isometry: dim mismatch");
  CVec y(z.size(), cplx(0.0, 0.0));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) y[i] += m[i][j] * z[j];
  return y;
}

Isometry Isometry::operator*(const Isometry& o) const {
  const int d = dim();
  if (d != o.dim()) throw std::invalid_argument("Isometry: dim mismatch");
  std::vector<RVec> r(d, RVec(d, 0.0));
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k)
      for (int j = 0; j < d; ++j) r[i][j] += m[i][k] * o.m[k][j];
  return Isometry(std::move(r));
}

Isometry Isometry::identity(int ambient) {
  std::vector<RVec> r(ambient, RVec(ambient, 0.0));
  for (int i = 0; i < ambient; ++i) r[i][i] = 1.0;
  return Isometry(std::move(r));
}

DeSitterPoint exp_map(const DeSitterPoint& x, const RVec& v) {
  if (v.size() != x.p.size()) throw std::invalid_argument("exp_map: dim mismatch");
  const double q = mform(v, v);
  const double C = cs_c(q), S = cs_s(q);
  RVec y(x.p.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = C * x.p[i] + S * v[i];
  return DeSitterPoint::renormalized(y);
}

RVec log_map(const DeSitterPoint& x, const DeSitterPoint& y) {
  // 2-plane reduction: with c = [x,y], w = y - c x lies in T_x and
  // [w,w] = 1 - c^2; the geodesic parameter follows from c alone.
  const double c = mform(x.p, y.p);
  double mult;
  const double d = c - 1.0;
  if (std::fabs(d) < 1e-5) {
    mult = 1.0 + d * (-1.0 / 3.0 + d * (2.0 / 15.0 + d * (-2.0 / 35.0)));
  } else if (c > 1.0) {  // timelike separation, always inside the chart
    const double th = std::acosh(c);
    mult = th / std::sinh(th);
  } else {  // spacelike: need theta^2 < chart bound
    const double cc = std::max(c, -1.0);
    const double th = std::acos(cc);
    if (th * th >= chart_bound())
      throw NotInChart("log_map: target beyond the chart bound on [v,v]");
    mult = th / std::sin(th);
  }
  RVec v(x.p.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = mult * (y.p[i] - c * x.p[i]);
  return v;
}

CausalTag classify_causal(const DeSitterPoint& x, const DeSitterPoint& y,
                          double tol) {
  const RVec d = sub(y.p, x.p);
  const double Q = mform(d, d);
  const double scale = 1.0 + euclid2(x.p) + euclid2(y.p);
  if (std::fabs(Q) <= tol * scale) return CausalTag::OnCone;
  if (Q > 0.0) return CausalTag::Outside;
  return (y.p[0] - x.p[0] > 0.0) ? CausalTag::FuturePlus : CausalTag::PastMinus;
}

std::optional<CrownPoint> crown_membership(const CVec& z, std::string* reject_reason) {
  auto fail = [&](const char* why) -> std::optional<CrownPoint> {
    if (reject_reason) *reject_reason = why;
    return std::nullopt;
  };
  RVec u(z.size()), w(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    u[i] = z[i].real();
    w[i] = z[i].imag();
  }
  const double uu = mform(u, u), ww = mform(w, w), uw = mform(u, w);
  const double sc = 1.0 + euclid2(u) + euclid2(w);
  if (std::fabs(uu - ww - 1.0) > kQuadricTol * sc)
    return fail("[u,u]-[v,v]=1 violated");
  if (std::fabs(uw) > kQuadricTol * sc) return fail("[u,v]=0 violated");
  if (!(ww < 0.0)) return fail("[v,v]<0 violated");
  if (w[0] > 0.0) return CrownPoint{u, w, Branch::Forward};
  if (w[0] < 0.0) return CrownPoint{u, scale(-1.0, w), Branch::Backward};
  return fail("v_0>0 violated");
}

CVec approach_point(const Isometry& g, double t, Branch br) {
  if (!(t > 0.0 && t < kPi / 2.0))
    throw std::invalid_argument("approach_point: t must lie in (0, pi/2)");
  const int d = g.dim();
  CVec z(d, cplx(0.0, 0.0));
  const double s = (br == Branch::Forward) ? 1.0 : -1.0;
  z[0] = cplx(0.0, s * std::cos(t));
  z[d - 1] = cplx(std::sin(t), 0.0);
  return g(z);
}

Isometry make_boost(int n, double t, int axis) {
  if (axis < 0) axis = n;
  if (axis < 1 || axis > n) throw std::invalid_argument("make_boost: bad axis");
  std::vector<RVec> r(n + 1, RVec(n + 1, 0.0));
  for (int i = 0; i <= n; ++i) r[i][i] = 1.0;
  r[0][0] = std::cosh(t);
  r[0][axis] = std::sinh(t);
  r[axis][0] = std::sinh(t);
  r[axis][axis] = std::cosh(t);
  return Isometry(std::move(r));
}

Isometry make_rotation(int n, int i, int j, double theta) {
  if (!(1 <= i && i < j && j <= n))
    throw std::invalid_argument("make_rotation: need 1 <= i < j <= n");
  std::vector<RVec> r(n + 1, RVec(n + 1, 0.0));
  for (int k = 0; k <= n; ++k) r[k][k] = 1.0;
  r[i][i] = std::cos(theta);
  r[i][j] = -std::sin(theta);
  r[j][i] = std::sin(theta);
  r[j][j] = std::cos(theta);
  return Isometry(std::move(r));
}

DeSitterPoint apply_ds(const Isometry& g, const DeSitterPoint& x) {
  return DeSitterPoint::renormalized(g(x.p));
}

Chart::Chart(const DeSitterPoint& base) : x(base) {
  const int dim = int(x.p.size());
  // timelike leg first: project e_0 onto T_x (always timelike there)
  RVec b0 = basis_vec(dim, 0);
  {
    const double c = mform(b0, x.p);
    b0 = sub(b0, scale(c, x.p));
    const double nrm = mform(b0, b0);  // = -(1 + x_0^2) < 0
    b0 = scale(1.0 / std::sqrt(-nrm), b0);
  }
  b.push_back(b0);
  for (int j = 1; j < dim && int(b.size()) < dim - 1; ++j) {
    RVec w = basis_vec(dim, j);
    w = sub(w, scale(mform(w, x.p), x.p));      // project onto T_x
    w = add(w, scale(mform(w, b0), b0));        // remove timelike leg
    for (std::size_t k = 1; k < b.size(); ++k)  // remove earlier spacelike legs
      w = sub(w, scale(mform(w, b[k]), b[k]));
    const double nrm = mform(w, w);
    if (nrm < 1e-12) continue;  // dependent candidate
    b.push_back(scale(1.0 / std::sqrt(nrm), w));
  }
  if (int(b.size()) != dim - 1)
    throw std::runtime_error("Chart: frame construction failed");
}

RVec Chart::ambient_of(const RVec& vchart) const {
  if (vchart.size() != b.size())
    throw std::invalid_argument("Chart::ambient_of: need n chart coords");
  RVec v(x.p.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) v[j] += vchart[i] * b[i][j];
  return v;
}

RVec Chart::chart_of(const RVec& vambient) const {
  RVec c(b.size());
  c[0] = -mform(vambient, b[0]);
  for (std::size_t i = 1; i < b.size(); ++i) c[i] = mform(vambient, b[i]);
  return c;
}

DeSitterPoint Chart::point(const RVec& vchart) const {
  return exp_map(x, ambient_of(vchart));
}

double metric_density(const DeSitterPoint& x, const RVec& vchart) {
  const Chart ch(x);
  const int n = int(vchart.size());
  if (n != x.n()) throw std::invalid_argument("metric_density: need n chart coords");
  {
    const RVec va = ch.ambient_of(vchart);
    if (mform(va, va) >= chart_bound()) throw NotInChart("metric_density: chart boundary");
  }
  const double h = 1e-5;
  std::vector<RVec> tang(n);
  for (int i = 0; i < n; ++i) {
    RVec vp = vchart, vm = vchart;
    vp[i] += h;
    vm[i] -= h;
    tang[i] = scale(1.0 / (2.0 * h), sub(ch.point(vp).p, ch.point(vm).p));
  }
  std::vector<RVec> gmat(n, RVec(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gmat[i][j] = mform(tang[i], tang[j]);
  const double det = det_small(gmat);
  return std::sqrt(std::fabs(det));
}

double metric_density_closed(int n, double q) {
  return std::pow(cs_s(q), n - 1);
}

}  // namespace crownwave
