#include "crownwave/hyp2f1.hpp"

#include <cmath>
#include <vector>

#include "crownwave/gamma.hpp"

namespace crownwave {

namespace {

bool near_int(cplx z, double tol = 1e-8) {
  return std::fabs(z.imag()) <= tol &&
         std::fabs(z.real() - std::round(z.real())) <= tol;
}

// plain Gauss series; requires |z| < 1 safely inside
cplx series_2f1(cplx a, cplx b, cplx c, cplx z, double* err = nullptr,
                long max_terms = 10000) {
  cplx term = 1.0, sum = 1.0;
  int small = 0;
  for (long k = 0; k < max_terms; ++k) {
    term *= (a + double(k)) * (b + double(k)) /
            ((c + double(k)) * double(k + 1)) * z;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) {
      if (++small >= 2) {
        if (err) *err = std::abs(term) / std::max(1e-300, std::abs(sum));
        return sum;
      }
    } else {
      small = 0;
    }
  }
  throw NonConvergent("gauss series did not settle within 10^4 terms");
}

cplx pochhammer(cplx a, int k) {
  cplx p = 1.0;
  for (int i = 0; i < k; ++i) p *= a + double(i);
  return p;
}

// coefficient Gamma(c) Gamma(top) / (Gamma(d1) Gamma(d2)); zero when a
// denominator gamma sits at a pole
cplx gamma_ratio(cplx c, cplx top, cplx d1, cplx d2) {
  if (near_gamma_pole(d1) || near_gamma_pole(d2)) return 0.0;
  return gamma_fn(c) * gamma_fn(top) / (gamma_fn(d1) * gamma_fn(d2));
}

// DLMF 15.8.4-style connection in 1-z, c-a-b not an integer
cplx connection_noninteger(cplx a, cplx b, cplx c, cplx z, double* err) {
  const cplx s = c - a - b;
  const cplx omz = 1.0 - z;
  double e1 = 0.0, e2 = 0.0;
  const cplx co1 = gamma_ratio(c, s, c - a, c - b);
  const cplx co2 = gamma_ratio(c, -s, a, b);
  cplx t1 = 0.0, t2 = 0.0;
  if (co1 != 0.0) t1 = co1 * series_2f1(a, b, a + b - c + 1.0, omz, &e1);
  if (co2 != 0.0)
    t2 = co2 * std::pow(omz, s) * series_2f1(c - a, c - b, s + 1.0, omz, &e2);
  if (err) *err = (std::abs(t1) * e1 + std::abs(t2) * e2 + 1e-15) /
                  std::max(1e-300, std::abs(t1 + t2));
  return t1 + t2;
}

// A&S 15.3.12-style expansion for c = a + b - m, m a nonnegative integer;
// log is the principal branch, valid off the cut and one-sided on it
cplx connection_logseries(cplx a, cplx b, cplx c, cplx z, cplx log_omz,
                          double* err) {
  const int m = int(std::lround((a + b - c).real()));
  const cplx omz = 1.0 - z;
  cplx finite = 0.0;
  if (m > 0) {
    cplx s = 0.0;
    for (int k = 0; k < m; ++k)
      s += pochhammer(a - double(m), k) * pochhammer(b - double(m), k) /
           (pochhammer(1.0 - double(m), k) * std::tgamma(double(k + 1))) *
           std::pow(omz, k);
    finite = gamma_fn(double(m)) * gamma_fn(c) / (gamma_fn(a) * gamma_fn(b)) *
             std::pow(omz, -double(m)) * s;
  }
  cplx logpart = 0.0;
  double etail = 0.0;
  if (!near_gamma_pole(a - double(m)) && !near_gamma_pole(b - double(m))) {
    const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
    const cplx co = -sgn * gamma_fn(c) /
                    (gamma_fn(a - double(m)) * gamma_fn(b - double(m)));
    cplx pa = digamma_fn(a), pb = digamma_fn(b);
    // psi(k+1) and psi(k+m+1), advanced by recurrence from psi(1) = -gamma
    double psi_k1 = -0.57721566490153286;
    double psi_km = psi_k1;
    for (int i = 1; i <= m; ++i) psi_km += 1.0 / double(i);
    // pref = (a)_k (b)_k / (k! (k+m)!) (1-z)^k, started at k = 0
    cplx pref = 1.0 / std::tgamma(double(m + 1));
    cplx sum = 0.0;
    int small = 0;
    for (int k = 0; k < 10000; ++k) {
      const cplx bracket = log_omz - psi_k1 - psi_km + pa + pb;
      const cplx inc = pref * bracket;
      sum += inc;
      if (std::abs(inc) < 1e-17 * std::abs(sum) && k > 2) {
        if (++small >= 2) break;
      } else {
        small = 0;
      }
      if (k == 9999)
        throw NonConvergent("log-series connection did not settle");
      // advance k -> k+1
      pref *= (a + double(k)) * (b + double(k)) * omz /
              (double(k + 1) * double(k + 1 + m));
      pa += 1.0 / (a + double(k));
      pb += 1.0 / (b + double(k));
      psi_k1 += 1.0 / double(k + 1);
      psi_km += 1.0 / double(k + 1 + m);
    }
    logpart = co * sum;
    etail = 1e-15 * std::abs(co * sum);
  }
  const cplx total = finite + logpart;
  if (err) *err = (etail + 1e-15 * std::abs(finite)) /
                  std::max(1e-300, std::abs(total));
  return total;
}

// DLMF 15.8.2-style 1/z connection; b - a not an integer. pow_mz_ma and
// pow_mz_mb are (-z)^{-a}, (-z)^{-b} on the caller's branch.
cplx reciprocal_conn(cplx a, cplx b, cplx c, cplx z, cplx pow_mz_ma,
                     cplx pow_mz_mb, double* err) {
  const cplx iz = 1.0 / z;
  double e1 = 0.0, e2 = 0.0;
  const cplx co1 = gamma_ratio(c, b - a, b, c - a);
  const cplx co2 = gamma_ratio(c, a - b, a, c - b);
  cplx t1 = 0.0, t2 = 0.0;
  if (co1 != 0.0)
    t1 = co1 * pow_mz_ma * series_2f1(a, a - c + 1.0, a - b + 1.0, iz, &e1);
  if (co2 != 0.0)
    t2 = co2 * pow_mz_mb * series_2f1(b, b - c + 1.0, b - a + 1.0, iz, &e2);
  if (err) *err = (std::abs(t1) * e1 + std::abs(t2) * e2 + 1e-15) /
                  std::max(1e-300, std::abs(t1 + t2));
  return t1 + t2;
}

// ---- Taylor continuation along a polyline ------------------------------

struct TaylorState {
  cplx z, f, fp;
};

// advance (f, f') from state.z by h using the hypergeometric ODE
void taylor_step(TaylorState& st, cplx h, cplx a, cplx b, cplx c) {
  const cplx zc = st.z;
  const cplx A = zc * (1.0 - zc);
  const cplx B1 = 1.0 - 2.0 * zc;
  const cplx B0 = c - (a + b + 1.0) * zc;
  cplx Tk = st.f, Tk1 = st.fp;  // T_k, T_{k+1} rolling pair
  cplx f = Tk + Tk1 * h;
  cplx fp = Tk1;
  cplx hp = h;  // h^{k+1} while at order k
  int small = 0;
  for (int k = 0; k < 700; ++k) {
    const cplx Tk2 = ((a + double(k)) * (b + double(k)) * Tk -
                      double(k + 1) * (B1 * double(k) + B0) * Tk1) /
                     (A * double(k + 2) * double(k + 1));
    hp *= h;  // now h^{k+2}
    const cplx incf = Tk2 * hp;
    f += incf;
    fp += double(k + 2) * Tk2 * hp / h;
    Tk = Tk1;
    Tk1 = Tk2;
    if (std::abs(incf) < 1e-18 * std::abs(f) && k > 6) {
      if (++small >= 3) break;
    } else {
      small = 0;
    }
    if (k == 699) throw NonConvergent("taylor step did not settle");
  }
  st.z = zc + h;
  st.f = f;
  st.fp = fp;
}

double dist_to_one(cplx p) { return std::abs(p - 1.0); }

// walk from st.z to target along a straight segment
void taylor_walk(TaylorState& st, cplx target, cplx a, cplx b, cplx c,
                 int* steps_left) {
  while (std::abs(target - st.z) > 0.0) {
    if (--(*steps_left) < 0)
      throw NonConvergent("continuation exceeded step budget");
    const double radius = std::min(std::abs(st.z), dist_to_one(st.z));
    const double want = std::abs(target - st.z);
    const double len = std::min(0.35 * radius, want);
    const cplx h = (target - st.z) * (len / want);
    taylor_step(st, h, a, b, c);
    if (len == want) break;
  }
}

double segment_dist_to_one(cplx p, cplx q) {
  const cplx d = q - p;
  const double L2 = std::norm(d);
  if (L2 == 0.0) return std::abs(p - 1.0);
  double t = ((1.0 - p.real()) * d.real() + (0.0 - p.imag()) * d.imag()) / L2;
  t = std::min(1.0, std::max(0.0, t));
  return std::abs(p + t * d - 1.0);
}

// continuation to an off-cut target, or one-sided onto the cut when
// on_cut_side is set (then target is real with Re >= 1)
cplx continuation(cplx a, cplx b, cplx c, cplx target, const Side* on_cut_side,
                  double* err) {
  double sgn;
  if (on_cut_side)
    sgn = (*on_cut_side == Side::Plus) ? 1.0 : -1.0;
  else
    sgn = (target.imag() >= 0.0) ? 1.0 : -1.0;
  // anchor inside the plain series disk, biased to the target's side
  cplx dir = target / std::abs(target);
  if (std::fabs(dir.imag()) < 0.35)
    dir = cplx(std::sqrt(1.0 - 0.35 * 0.35) * (dir.real() >= 0 ? 1.0 : -1.0),
               0.35 * sgn);
  const cplx z0 = 0.3 * dir;
  TaylorState st;
  st.z = z0;
  st.f = series_2f1(a, b, c, z0);
  st.fp = a * b / c * series_2f1(a + 1.0, b + 1.0, c + 1.0, z0);
  int budget = 500;
  if (on_cut_side) {
    const cplx w1 = cplx(1.0, 1.2 * sgn);
    const cplx w2 = cplx(target.real(), 1.2 * sgn);
    taylor_walk(st, w1, a, b, c, &budget);
    taylor_walk(st, w2, a, b, c, &budget);
    taylor_walk(st, target, a, b, c, &budget);
  } else {
    if (segment_dist_to_one(z0, target) < 0.35) {
      taylor_walk(st, cplx(1.0, 1.0 * sgn), a, b, c, &budget);
    }
    taylor_walk(st, target, a, b, c, &budget);
  }
  if (err) *err = 1e-13;
  return st.f;
}

}  // namespace

SpectralParam::SpectralParam(int n_, cplx lambda_) : n(n_), lambda(lambda_) {
  if (n < 2 || n > 9) throw std::invalid_argument("SpectralParam: need 2 <= n <= 9");
  const double tol = 1e-12;
  const bool imag_ray =
      std::fabs(lambda.real()) <= tol && lambda.imag() >= -tol;
  const bool real_seg = std::fabs(lambda.imag()) <= tol &&
                        lambda.real() >= -tol && lambda.real() < rho();
  if (!imag_ray && !real_seg)
    throw std::invalid_argument(
        "SpectralParam: lambda must lie in i[0,inf) or [0,(n-1)/2)");
}

HypTriple kernel_triple(const SpectralParam& sp) {
  const double rho = sp.rho();
  return HypTriple{rho + sp.lambda, rho - sp.lambda, cplx(0.5 * sp.n, 0.0)};
}

EvalResult gauss_2f1(cplx a, cplx b, cplx c, cplx z) {
  if (near_int(c) && c.real() < 0.5)
    throw std::invalid_argument("gauss_2f1: c at a nonpositive integer");
  if (std::fabs(z.imag()) <= 1e-13 && z.real() >= 1.0 - 1e-13)
    throw OnCut("gauss_2f1: z on the cut [1,inf); use boundary_2f1");

  EvalResult r;
  r.err_est = 0.0;
  if (std::abs(z) <= 0.5) {
    r.value = series_2f1(a, b, c, z, &r.err_est);
    r.method = "series";
    return r;
  }
  if (z.real() <= 0.4 && std::abs(z / (z - 1.0)) <= 0.75) {
    double e = 0.0;
    r.value = std::pow(1.0 - z, -a) *
              series_2f1(a, c - b, c, z / (z - 1.0), &e);
    r.method = "pfaff";
    r.err_est = e + 1e-15;
    return r;
  }
  if (std::abs(1.0 - z) <= 0.75) {
    const cplx s = c - a - b;
    if (near_int(s)) {
      const int m = int(std::lround((a + b - c).real()));
      if (m >= 0) {
        r.value = connection_logseries(a, b, c, z, std::log(1.0 - z), &r.err_est);
        r.method = "connection_logseries";
        return r;
      }
      // c - a - b a positive integer: fall through to continuation
    } else {
      r.value = connection_noninteger(a, b, c, z, &r.err_est);
      r.method = "connection_noninteger";
      return r;
    }
  }
  if (std::abs(z) >= 2.0 && !near_int(b - a)) {
    r.value = reciprocal_conn(a, b, c, z, std::pow(-z, -a), std::pow(-z, -b),
                              &r.err_est);
    r.method = "reciprocal";
    return r;
  }
  r.value = continuation(a, b, c, z, nullptr, &r.err_est);
  r.method = "continuation";
  return r;
}

cplx boundary_2f1(const SpectralParam& sp, double x, Side side) {
  if (!(x > 1.0 + 1e-10))
    throw std::invalid_argument("boundary_2f1: requires x > 1 + 1e-10");
  const HypTriple t = kernel_triple(sp);
  const cplx a = t.a, b = t.b, c = t.c;
  const double sgn = (side == Side::Plus) ? 1.0 : -1.0;  // sign of Im z

  if (x < 2.0) {
    if (sp.n % 2 == 1) {
      // two-term connection on the cut: (1-z)^s = (x-1)^s e^{s * i pi * (-sgn)}
      const cplx s = c - a - b;  // (2-n)/2, half-integer
      const cplx co_reg = gamma_ratio(c, s, c - a, c - b);
      const cplx co_sing = gamma_ratio(c, -s, a, b);
      cplx t1 = 0.0, t2 = 0.0;
      if (co_reg != 0.0)
        t1 = co_reg * series_2f1(a, b, a + b - c + 1.0, 1.0 - x);
      if (co_sing != 0.0) {
        const cplx phase = std::exp(cplx(0.0, -sgn * kPi) * s);
        t2 = co_sing * std::pow(x - 1.0, s) * phase *
             series_2f1(c - a, c - b, s + 1.0, 1.0 - x);
      }
      return t1 + t2;
    }
    // even n: log expansion with ln(1-z) = ln(x-1) - sgn * i pi
    const cplx log_omz = cplx(std::log(x - 1.0), -sgn * kPi);
    double e = 0.0;
    return connection_logseries(a, b, c, cplx(x, 0.0), log_omz, &e);
  }

  // x >= 2: reciprocal connection with explicit side, else continuation
  if (!near_int(b - a)) {
    // (-z)^{-a} at z = x + sgn*i0: arg(-z) = -sgn*pi
    const cplx pa = std::pow(x, -a) * std::exp(cplx(0.0, sgn * kPi) * a);
    const cplx pb = std::pow(x, -b) * std::exp(cplx(0.0, sgn * kPi) * b);
    double e = 0.0;
    return reciprocal_conn(a, b, c, cplx(x, 0.0), pa, pb, &e);
  }
  double e = 0.0;
  return continuation(a, b, c, cplx(x, 0.0), &side, &e);
}

cplx jump_2f1(const SpectralParam& sp, double x) {
  if (!(x > 1.0 + 1e-10))
    throw std::invalid_argument("jump_2f1: requires x > 1 + 1e-10");
  const HypTriple t = kernel_triple(sp);
  const cplx a = t.a, b = t.b, c = t.c;
  if (x >= 2.0)
    return boundary_2f1(sp, x, Side::Minus) - boundary_2f1(sp, x, Side::Plus);
  if (sp.n % 2 == 1) {
    const cplx s = c - a - b;
    const cplx co_sing = gamma_ratio(c, -s, a, b);
    if (co_sing == 0.0) return 0.0;
    return 2.0 * cplx(0.0, 1.0) * std::sin(kPi * s.real()) * co_sing *
           std::pow(x - 1.0, s) *
           series_2f1(c - a, c - b, s + 1.0, 1.0 - x);
  }
  const int m = int(std::lround((a + b - c).real()));
  if (near_gamma_pole(a - double(m)) || near_gamma_pole(b - double(m)))
    return 0.0;
  const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
  const cplx co =
      -sgn * gamma_fn(c) / (gamma_fn(a - double(m)) * gamma_fn(b - double(m)));
  cplx pref = 1.0 / std::tgamma(double(m + 1));
  cplx sum = 0.0;
  int small = 0;
  for (int k = 0; k < 10000; ++k) {
    sum += pref;
    if (std::abs(pref) < 1e-17 * std::abs(sum) && k > 2) {
      if (++small >= 2) break;
    } else {
      small = 0;
    }
    if (k == 9999) throw NonConvergent("jump series did not settle");
    pref *= (a + double(k)) * (b + double(k)) * (1.0 - x) /
            (double(k + 1) * double(k + 1 + m));
  }
  // ln(1-z) jumps by 2 pi i from Plus to Minus; everything else cancels
  return co * sum * cplx(0.0, 2.0 * kPi);
}

cplx near_one_expansion(const SpectralParam& sp, cplx z) {
  const double d = std::abs(1.0 - z);
  if (!(d > 0.0 && d < 0.1))
    throw std::invalid_argument("near_one_expansion: need 0 < |1-z| < 0.1");
  const double rho = sp.rho();
  const cplx ga = gamma_fn(rho + sp.lambda) * gamma_fn(rho - sp.lambda);
  if (sp.n == 2) return -std::log(1.0 - z) / ga;
  const cplx K =
      gamma_fn(0.5 * sp.n) * gamma_fn(0.5 * (sp.n - 2.0)) / ga;
  return K * std::pow(1.0 - z, cplx(0.5 * (2.0 - sp.n), 0.0));
}

}  // namespace crownwave
