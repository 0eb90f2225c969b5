#include "crownwave/dist1d.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "crownwave/quad.hpp"

namespace crownwave {

namespace {

constexpr int kMaxOrder = 12;

// ---------------------------------------------------------------- profile

// f(s) = exp(-1/(1-s^2)) on |s|<1. Derivatives have the closed form
//   f^(k)(s) = f(s) * P_k(s) / (1-s^2)^(2k)
// with polynomial recursion P_{k+1} = (1-s^2)^2 P_k' + 4ks(1-s^2) P_k - 2s P_k.
// Coefficients kept in long double: they grow like 4^k k!.
using Poly = std::vector<long double>;

Poly poly_deriv(const Poly& p) {
  Poly d(p.size() > 1 ? p.size() - 1 : 1, 0.0L);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * (long double)i;
  return d;
}

void poly_acc(Poly& acc, const Poly& p, long double c, int shift) {
  if (acc.size() < p.size() + shift) acc.resize(p.size() + shift, 0.0L);
  for (std::size_t i = 0; i < p.size(); ++i) acc[i + shift] += c * p[i];
}

const std::vector<Poly>& profile_polys() {
  static const std::vector<Poly> table = [] {
    std::vector<Poly> t;
    t.push_back(Poly{1.0L});
    for (int k = 0; k < kMaxOrder; ++k) {
      const Poly& p = t.back();
      Poly dp = poly_deriv(p);
      Poly nx;
      // (1 - 2s^2 + s^4) * p'
      poly_acc(nx, dp, 1.0L, 0);
      poly_acc(nx, dp, -2.0L, 2);
      poly_acc(nx, dp, 1.0L, 4);
      // 4k (s - s^3) * p
      poly_acc(nx, p, 4.0L * k, 1);
      poly_acc(nx, p, -4.0L * k, 3);
      // -2s * p
      poly_acc(nx, p, -2.0L, 1);
      t.push_back(std::move(nx));
    }
    return t;
  }();
  return table;
}

long double poly_eval(const Poly& p, long double s) {
  long double v = 0.0L;
  for (std::size_t i = p.size(); i-- > 0;) v = v * s + p[i];
  return v;
}

double binom(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return v;
}

const double* inv_fact() {
  static double t[kMaxOrder + 1];
  static const bool init = [] {
    double f = 1.0;
    t[0] = 1.0;
    for (int i = 1; i <= kMaxOrder; ++i) { f *= i; t[i] = 1.0 / f; }
    return true;
  }();
  (void)init;
  return t;
}

bool neg_int_lambda(cplx lam, long* k_out) {
  if (std::abs(lam.imag()) > 1e-10) return false;
  const double r = std::round(lam.real());
  if (std::abs(lam.real() - r) > 1e-10) return false;
  if (r > -0.5) return false;
  if (k_out) *k_out = (long)(-r);
  return true;
}

// ------------------------------------------------------- pairing helpers

cplx taylor_from(const Fn1D& f, double x, int jstart) {
  cplx acc = 0.0;
  for (int j = kMaxOrder; j >= jstart; --j)
    acc = acc * x + f.derivs0[j] * inv_fact()[j];
  for (int j = 0; j < jstart; ++j) acc *= x;
  return acc;
}

// phi(x) - sum_{j<m} phi^(j)(0) x^j / j!, cancellation-safe near 0
cplx reg_phi(const Fn1D& f, double x, int m) {
  if (m == 0) return f.value(x);
  if (std::abs(x) < f.taylor_radius) return taylor_from(f, x, m);
  cplx head = 0.0;
  for (int j = m - 1; j >= 0; --j) head = head * x + f.derivs0[j] * inv_fact()[j];
  return f.value(x) - head;
}

double base_h(const Fn1D& f, double width) {
  double h = width / 24.0;
  if (h > f.panel_cap) h = f.panel_cap;
  return h;
}

cplx axis_int(const quad::Axis& ax, const std::function<cplx(double)>& g,
              double* err) {
  const cplx v10 = quad::integrate_axis(ax, 10, g);
  const cplx v8 = quad::integrate_axis(ax, 8, g);
  if (err) *err = std::abs(v10 - v8) + 1e-18;
  return v10;
}

double smallest_positive_brk(const quad::Axis& ax) {
  for (double b : ax.brk)
    if (b > 0.0) return b;
  return 0.0;
}

PairingResult xplus_core(cplx lam, const Fn1D& f) {
  if (neg_int_lambda(lam, nullptr))
    throw std::invalid_argument("x_+^lambda undefined at negative integer lambda");
  if (lam.real() <= -5.5)
    throw std::invalid_argument("x_+^lambda: Re lambda too negative for order-12 subtraction data");
  if (f.hi <= 0.0) return {0.0, 0.0, "exact"};

  const double a = std::max(0.0, f.lo);
  const double h0 = base_h(f, f.hi - a);
  double qerr = 0.0;

  if (f.lo > 0.0) {
    quad::Axis ax = quad::graded_axis(a, f.hi, {}, h0, 0);
    auto g = [&](double x) { return std::pow(cplx(x, 0.0), lam) * f.value(x); };
    cplx val = axis_int(ax, g, &qerr);
    return {val, qerr, "direct"};
  }

  // Cutoff regularization: subtract the order-J Taylor polynomial on
  // (0, d] and add its x^lam moments back analytically. Equal to the
  // minimal-subtraction value by analytic continuation in lambda, and
  // convergent for every admissible lambda, including Re lambda at a
  // negative integer with Im lambda != 0. d is capped where the Taylor
  // polynomial stays O(1) (oscillatory targets) and snapped to a mesh
  // breakpoint so no panel straddles the switch.
  const int m = std::max(0, (int)std::ceil(-lam.real()) - 1);
  const int J = m + 4;
  quad::Axis ax = quad::graded_axis(0.0, f.hi, {0.0}, h0, 44);
  const double d_want = std::min(f.hi, f.subtract_extent);
  double d = smallest_positive_brk(ax);
  for (double b : ax.brk)
    if (b > 0.0 && b <= d_want) d = b;
  auto g = [&](double x) {
    return std::pow(cplx(x, 0.0), lam) * (x <= d ? reg_phi(f, x, J + 1) : f.value(x));
  };
  cplx val = axis_int(ax, g, &qerr);
  double sum_abs = 0.0;
  for (int j = 0; j <= J; ++j) {
    const cplx term = f.derivs0[j] * inv_fact()[j] *
                      std::pow(cplx(d, 0.0), lam + (double)(j + 1)) /
                      (lam + (double)(j + 1));
    val += term;
    sum_abs += std::abs(term);
  }
  return {val, qerr + 1e-15 * sum_abs, m > 0 ? "regularized" : "direct"};
}

Fn1D reflect(const Fn1D& f) {
  Fn1D r;
  auto v = f.value;
  r.value = [v](double x) { return v(-x); };
  r.derivs0.resize(kMaxOrder + 1);
  for (int j = 0; j <= kMaxOrder; ++j)
    r.derivs0[j] = (j % 2 ? -f.derivs0[j] : f.derivs0[j]);
  r.lo = -f.hi;
  r.hi = -f.lo;
  r.taylor_radius = f.taylor_radius;
  r.panel_cap = f.panel_cap;
  r.subtract_extent = f.subtract_extent;
  return r;
}

PairingResult pv_core(int k, const Fn1D& f) {
  if (k < 1 || k > 10) throw std::invalid_argument("pv x^-k: k out of range");
  const bool even = (k % 2 == 0);
  const bool off_origin = f.lo > 0.0 || f.hi < 0.0;
  const double X = std::max(f.hi, -f.lo);
  if (X <= 0.0) return {0.0, 0.0, "exact"};
  const double h0 = base_h(f, std::min(X, f.hi - f.lo));

  auto sym = [&](double x) -> cplx {
    if (x < f.taylor_radius) {
      // parity-matched Taylor tail of the symmetrized integrand, already
      // divided by x^k: sum over j >= k of 2 d0[j]/j! x^(j-k)
      cplx acc = 0.0;
      for (int j = kMaxOrder; j >= k; --j) {
        acc *= x;
        if ((j % 2 == 0) == even) acc += 2.0 * f.derivs0[j] * inv_fact()[j];
      }
      return acc;
    }
    cplx s = even ? f.value(x) + f.value(-x) : f.value(x) - f.value(-x);
    for (int j = k - 2; j >= 0; j -= 2)
      s -= 2.0 * f.derivs0[j] * inv_fact()[j] * std::pow(x, (double)j);
    return s / std::pow(x, (double)k);
  };

  quad::Axis ax = quad::graded_axis(0.0, X, {0.0}, h0, 30);
  double qerr = 0.0;
  cplx val = axis_int(ax, sym, &qerr);
  // [0, t_min]: integrand is 2 d0[k]/k! + O(x) there
  const double t = smallest_positive_brk(ax);
  if (t > 0.0 && !off_origin) val += 2.0 * f.derivs0[k] * inv_fact()[k] * t;
  // subtraction terms continued beyond [0, X]; j - k + 1 <= -1 throughout
  for (int j = k - 2; j >= 0; j -= 2)
    val += 2.0 * f.derivs0[j] * inv_fact()[j] * std::pow(X, (double)(j - k + 1)) /
           (double)(j - k + 1);
  return {val, qerr, off_origin ? "direct" : "regularized"};
}

// integral of log(x) g(x) over [max(0,a), b] with the singular tail below
// the innermost breakpoint restored from Taylor data (g0, g1 at 0)
cplx log_half_line(double a, double b, const std::function<cplx(double)>& g,
                   cplx g0, cplx g1, double h0, double* err) {
  if (!(b > 0.0)) { if (err) *err = 0.0; return 0.0; }
  const double lo = std::max(0.0, a);
  cplx val;
  if (lo > 0.0) {
    quad::Axis ax = quad::graded_axis(lo, b, {}, h0, 0);
    val = axis_int(ax, [&](double x) { return std::log(x) * g(x); }, err);
  } else {
    quad::Axis ax = quad::graded_axis(0.0, b, {0.0}, h0, 44);
    val = axis_int(ax, [&](double x) { return std::log(x) * g(x); }, err);
    const double t = smallest_positive_brk(ax);
    if (t > 0.0)
      val += g0 * (t * std::log(t) - t) + g1 * 0.5 * t * t * (std::log(t) - 0.5);
  }
  return val;
}

PairingResult log_core(Side side, const Fn1D& f) {
  const double sgn = side == Side::Plus ? 1.0 : -1.0;
  const double h0 = base_h(f, f.hi - f.lo);
  cplx val = 0.0;
  double err = 0.0, qerr = 0.0;
  if (f.hi > 0.0) {
    val += log_half_line(f.lo, f.hi, f.value, f.derivs0[0], f.derivs0[1], h0, &qerr);
    err += qerr;
  }
  if (f.lo < 0.0) {
    auto neg = [&](double x) { return f.value(-x); };
    val += log_half_line(-f.hi, -f.lo, neg, f.derivs0[0], -f.derivs0[1], h0, &qerr);
    err += qerr;
    const double a = std::max(0.0, -f.hi);
    quad::Axis axp = quad::graded_axis(a, -f.lo, {}, h0, 0);
    val += cplx(0.0, sgn * kPi) * axis_int(axp, neg, &qerr);
    err += qerr;
  }
  const bool straddles = f.lo < 0.0 && f.hi > 0.0;
  return {val, err + 1e-18, straddles ? "regularized" : "direct"};
}

PairingResult heaviside_core(const Fn1D& f) {
  if (f.hi <= 0.0) return {0.0, 0.0, "exact"};
  const double a = std::max(0.0, f.lo);
  quad::Axis ax = quad::graded_axis(a, f.hi, {}, base_h(f, f.hi - a), 0);
  double qerr = 0.0;
  cplx val = axis_int(ax, f.value, &qerr);
  return {val, qerr, "direct"};
}

PairingResult expinv_core(const Fn1D& f) {
  if (f.hi <= 0.0) return {0.0, 0.0, "exact"};
  const double a = std::max(0.0, f.lo);
  quad::Axis ax = quad::graded_axis(a, f.hi, {0.0}, base_h(f, f.hi - a), 20);
  auto g = [&](double x) -> cplx {
    if (x <= 0.0) return 0.0;
    const double e = -1.0 / x;
    return e < -700.0 ? cplx(0.0) : std::exp(e) * f.value(x);
  };
  double qerr = 0.0;
  cplx val = axis_int(ax, g, &qerr);
  return {val, qerr, "direct"};
}

PairingResult delta_core(int k, const Fn1D& f) {
  if (k < 0 || k > kMaxOrder)
    throw std::invalid_argument("delta^(k): order out of range");
  const cplx v = (k % 2 ? -1.0 : 1.0) * f.derivs0[k];
  return {v, 0.0, "exact"};
}

}  // namespace

// ------------------------------------------------------------- TestFn1D

TestFn1D::TestFn1D(int k, double c, double h) : monomial_k(k), center(c), halfwidth(h) {
  if (k < 0 || k > 6) throw std::invalid_argument("TestFn1D: monomial power out of range");
  if (!(h > 0.0)) throw std::invalid_argument("TestFn1D: halfwidth must be positive");
}

double mollifier_profile(double s) {
  const double d = 1.0 - s * s;
  if (d <= 0.0) return 0.0;
  const double e = -1.0 / d;
  return e < -700.0 ? 0.0 : std::exp(e);
}

double mollifier_profile_deriv(int order, double s) {
  if (order < 0 || order > kMaxOrder)
    throw std::invalid_argument("mollifier_profile_deriv: order out of range");
  const double f = mollifier_profile(s);
  if (f == 0.0) return 0.0;
  const long double d = 1.0L - (long double)s * s;
  const long double p = poly_eval(profile_polys()[order], s);
  return (double)((long double)f * p / std::pow(d, 2.0L * order));
}

double TestFn1D::value(double x) const {
  const double s = (x - center) / halfwidth;
  const double f = mollifier_profile(s);
  if (f == 0.0) return 0.0;
  return std::pow(x, (double)monomial_k) * f;
}

double TestFn1D::derivative(int order, double x) const {
  if (order < 0 || order > kMaxOrder)
    throw std::invalid_argument("TestFn1D::derivative: order out of range");
  const double s = (x - center) / halfwidth;
  double acc = 0.0;
  for (int i = 0; i <= std::min(order, monomial_k); ++i) {
    // (d/dx)^i x^k = k!/(k-i)! x^(k-i)
    double mono = 1.0;
    for (int j = 0; j < i; ++j) mono *= (monomial_k - j);
    mono *= std::pow(x, (double)(monomial_k - i));
    const double g = mollifier_profile_deriv(order - i, s) /
                     std::pow(halfwidth, (double)(order - i));
    acc += binom(order, i) * mono * g;
  }
  return acc;
}

Fn1D to_fn(const TestFn1D& phi) {
  Fn1D f;
  f.value = [phi](double x) { return cplx(phi.value(x), 0.0); };
  f.derivs0.resize(kMaxOrder + 1);
  for (int j = 0; j <= kMaxOrder; ++j) f.derivs0[j] = phi.derivative(j, 0.0);
  f.lo = phi.lo();
  f.hi = phi.hi();
  const double s0 = std::abs(phi.center) / phi.halfwidth;
  f.taylor_radius = s0 < 1.0 ? 0.05 * phi.halfwidth * (1.0 - s0) : 0.0;
  return f;
}

// ------------------------------------------------------------ factories

ModelDist1D ModelDist1D::x_plus_pow(cplx lam) { return {DistKind::XPlusPow, lam, Side::Plus, 0}; }
ModelDist1D ModelDist1D::x_minus_pow(cplx lam) { return {DistKind::XMinusPow, lam, Side::Plus, 0}; }
ModelDist1D ModelDist1D::i0_pow(cplx lam, Side s) { return {DistKind::I0Pow, lam, s, 0}; }
ModelDist1D ModelDist1D::log_i0(Side s) { return {DistKind::LogI0, 0.0, s, 0}; }
ModelDist1D ModelDist1D::delta_deriv(int k) { return {DistKind::DeltaDeriv, 0.0, Side::Plus, k}; }
ModelDist1D ModelDist1D::heaviside() { return {DistKind::Heaviside, 0.0, Side::Plus, 0}; }
ModelDist1D ModelDist1D::exp_inv() { return {DistKind::ExpInv, 0.0, Side::Plus, 0}; }
ModelDist1D ModelDist1D::pv_pow(int k) { return {DistKind::PvPow, 0.0, Side::Plus, k}; }

// -------------------------------------------------------------- pairing

PairingResult pair_1d_fn(const ModelDist1D& dist, const Fn1D& f) {
  switch (dist.kind) {
    case DistKind::XPlusPow: return xplus_core(dist.lambda, f);
    case DistKind::XMinusPow: return xplus_core(dist.lambda, reflect(f));
    case DistKind::PvPow: return pv_core(dist.k, f);
    case DistKind::LogI0: return log_core(dist.side, f);
    case DistKind::Heaviside: return heaviside_core(f);
    case DistKind::ExpInv: return expinv_core(f);
    case DistKind::DeltaDeriv: return delta_core(dist.k, f);
    case DistKind::I0Pow: {
      cplx val = 0.0;
      double err = 0.0;
      for (const auto& [c, d] : i0_decompose(dist.lambda, dist.side)) {
        PairingResult p = pair_1d_fn(d, f);
        val += c * p.value;
        err += std::abs(c) * p.err_est;
      }
      return {val, err, "regularized"};
    }
  }
  throw std::logic_error("pair_1d_fn: unhandled kind");
}

PairingResult pair_1d(const ModelDist1D& dist, const TestFn1D& phi) {
  return pair_1d_fn(dist, to_fn(phi));
}

std::vector<std::pair<cplx, ModelDist1D>> i0_decompose(cplx lambda, Side side) {
  const double sgn = side == Side::Plus ? 1.0 : -1.0;
  long k = 0;
  if (neg_int_lambda(lambda, &k)) {
    // (x +/- i0)^{-k} = pv x^{-k} -/+ i pi (-1)^{k-1}/(k-1)! delta^{(k-1)}
    double fac = 1.0;
    for (long j = 2; j < k; ++j) fac *= j;
    const cplx cd = cplx(0.0, -sgn * kPi) * ((k % 2 == 1) ? 1.0 : -1.0) / fac;
    return {{1.0, ModelDist1D::pv_pow((int)k)},
            {cd, ModelDist1D::delta_deriv((int)k - 1)}};
  }
  const cplx phase = std::exp(cplx(0.0, sgn * kPi) * lambda);
  return {{1.0, ModelDist1D::x_plus_pow(lambda)},
          {phase, ModelDist1D::x_minus_pow(lambda)}};
}

cplx log_i0_pair(Side side, const TestFn1D& phi) {
  return log_core(side, to_fn(phi)).value;
}

// ------------------------------------------------------ windowed Fourier

namespace {

Fn1D windowed_target(const TestFn1D& w, double tau) {
  Fn1D f;
  const double om = -2.0 * kPi * tau;
  f.value = [w, om](double x) {
    const double v = w.value(x);
    return v == 0.0 ? cplx(0.0) : v * std::exp(cplx(0.0, om * x));
  };
  f.derivs0.resize(kMaxOrder + 1);
  std::vector<double> wd(kMaxOrder + 1);
  for (int j = 0; j <= kMaxOrder; ++j) wd[j] = w.derivative(j, 0.0);
  for (int j = 0; j <= kMaxOrder; ++j) {
    cplx acc = 0.0;
    cplx epow = 1.0;
    for (int i = j; i >= 0; --i) {
      acc += binom(j, i) * wd[i] * epow;
      epow *= cplx(0.0, om);
    }
    f.derivs0[j] = acc;
  }
  f.lo = w.lo();
  f.hi = w.hi();
  const double s0 = std::abs(w.center) / w.halfwidth;
  f.taylor_radius = s0 < 1.0 ? 0.05 * w.halfwidth * (1.0 - s0) : 0.0;
  const double osc_r = 0.4 / (std::abs(om) + 1e-300);
  if (osc_r < f.taylor_radius) f.taylor_radius = osc_r;
  f.panel_cap = 0.25 / (std::abs(tau) + 1e-300);  // half period of exp(2 pi i x tau)
  f.subtract_extent = 1.0 / (std::abs(om) + 1e-300);
  return f;
}

}  // namespace

double decay_exponent_fit(const std::vector<double>& tau,
                          const std::vector<double>& mag) {
  if (tau.size() != mag.size() || tau.size() < 2)
    throw std::invalid_argument("decay_exponent_fit: need matching grids, >= 2 points");
  std::vector<double> lx, ly;
  const double cut = 0.5 * tau.back() * (1.0 - 1e-12);
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (tau[i] < cut) continue;
    lx.push_back(std::log(tau[i]));
    ly.push_back(std::log(std::max(mag[i], 1e-300)));
  }
  if (lx.size() < 2) {
    lx = {std::log(tau[tau.size() - 2]), std::log(tau.back())};
    ly = {std::log(std::max(mag[mag.size() - 2], 1e-300)),
          std::log(std::max(mag.back(), 1e-300))};
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) { mx += lx[i]; my += ly[i]; }
  mx /= lx.size();
  my /= lx.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  return num / den;
}

DecayTable windowed_fourier(const ModelDist1D& dist, const TestFn1D& window,
                            const std::vector<double>& taus) {
  DecayTable out;
  out.tau = taus;
  for (double t : taus) {
    if (!(t > 0.0)) throw std::invalid_argument("windowed_fourier: tau grid must be positive");
    out.mag_plus.push_back(std::abs(pair_1d_fn(dist, windowed_target(window, t)).value));
    out.mag_minus.push_back(std::abs(pair_1d_fn(dist, windowed_target(window, -t)).value));
  }
  out.slope_plus = decay_exponent_fit(out.tau, out.mag_plus);
  out.slope_minus = decay_exponent_fit(out.tau, out.mag_minus);
  return out;
}

DecayTable windowed_fourier_fn(const std::function<cplx(double)>& f, double lo,
                               double hi, const TestFn1D& window,
                               const std::vector<double>& taus) {
  DecayTable out;
  out.tau = taus;
  const double a = std::max(lo, window.lo());
  const double b = std::min(hi, window.hi());
  if (!(b > a)) throw std::invalid_argument("windowed_fourier_fn: empty overlap");
  for (double t : taus) {
    if (!(t > 0.0)) throw std::invalid_argument("windowed_fourier_fn: tau grid must be positive");
    auto one = [&](double tau) {
      const double h0 = std::min((b - a) / 24.0, 0.25 / std::abs(tau));
      // breakpoint at 0: sampled inputs are allowed a kink or jump there
      quad::Axis ax = quad::graded_axis(a, b, {0.0}, h0, 12);
      return std::abs(quad::integrate_axis(ax, 10, [&](double x) {
        return f(x) * window.value(x) * std::exp(cplx(0.0, -2.0 * kPi * tau * x));
      }));
    };
    out.mag_plus.push_back(one(t));
    out.mag_minus.push_back(one(-t));
  }
  out.slope_plus = decay_exponent_fit(out.tau, out.mag_plus);
  out.slope_minus = decay_exponent_fit(out.tau, out.mag_minus);
  return out;
}

}  // namespace crownwave
