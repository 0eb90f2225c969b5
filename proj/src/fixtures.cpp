#include "crownwave/fixtures.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "crownwave/dist1d.hpp"
#include "crownwave/hyp2f1.hpp"
#include "crownwave/kernels.hpp"
#include "crownwave/lorentz.hpp"
#include "crownwave/oracle.hpp"
#include "crownwave/quad.hpp"

namespace crownwave {

const std::string* Record::find(const std::string& key) const {
  for (const auto& p : kv)
    if (p.first == key) return &p.second;
  return nullptr;
}

std::string Record::get(const std::string& key) const {
  const std::string* v = find(key);
  if (!v) throw std::runtime_error("fixture record missing key: " + key);
  return *v;
}

double Record::get_d(const std::string& key) const {
  return std::strtod(get(key).c_str(), nullptr);
}

cplx Record::get_c(const std::string& key) const { return parse_c(get(key)); }

void Record::set(const std::string& key, const std::string& v) {
  kv.emplace_back(key, v);
}

void Record::set_d(const std::string& key, double v) { set(key, format_d(v)); }

void Record::set_c(const std::string& key, cplx v) { set(key, format_c(v)); }

std::string format_d(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_c(cplx v) {
  return format_d(v.real()) + "," + format_d(v.imag());
}

cplx parse_c(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw std::runtime_error("bad complex fixture value: " + s);
  return cplx(std::strtod(s.substr(0, comma).c_str(), nullptr),
              std::strtod(s.substr(comma + 1).c_str(), nullptr));
}

FixtureFile FixtureFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fixture file: " + path);
  FixtureFile ff;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    Record rec;
    size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && line[i] == ' ') ++i;
      if (i >= line.size()) break;
      const size_t eq = line.find('=', i);
      if (eq == std::string::npos)
        throw std::runtime_error("bad fixture token in: " + path);
      const std::string key = line.substr(i, eq - i);
      i = eq + 1;
      std::string val;
      if (i < line.size() && line[i] == '"') {
        const size_t close = line.find('"', i + 1);
        if (close == std::string::npos)
          throw std::runtime_error("unterminated quote in: " + path);
        val = line.substr(i + 1, close - i - 1);
        i = close + 1;
      } else {
        size_t end = line.find(' ', i);
        if (end == std::string::npos) end = line.size();
        val = line.substr(i, end - i);
        i = end;
      }
      rec.kv.emplace_back(key, val);
    }
    if (!rec.kv.empty()) ff.recs.push_back(std::move(rec));
  }
  return ff;
}

void FixtureFile::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write fixture file: " + path);
  for (const auto& rec : recs) {
    bool first = true;
    for (const auto& p : rec.kv) {
      if (!first) out << ' ';
      first = false;
      const bool quote =
          p.second.find(' ') != std::string::npos || p.second.empty();
      out << p.first << '=';
      if (quote)
        out << '"' << p.second << '"';
      else
        out << p.second;
    }
    out << '\n';
  }
}

std::string fixtures_dir() {
  const char* env = std::getenv("CROWNWAVE_FIXTURES");
  if (env && *env) return env;
  return "fixtures";
}

namespace {

struct ParamSet {
  int n;
  cplx lambda;
};

const ParamSet kSets[4] = {{2, cplx(0.0, 0.3)},
                           {3, cplx(0.5, 0.0)},
                           {4, cplx(0.0, 1.2)},
                           {5, cplx(0.7, 0.0)}};

int generate_hyp2f1_oracle(const std::string& dir) {
  FixtureFile ff;
  for (int s = 0; s < 4; ++s) {
    const SpectralParam sp(kSets[s].n, kSets[s].lambda);
    const HypTriple t = kernel_triple(sp);
    Rng rng(20260814u + uint64_t(s));
    int made = 0;
    while (made < 200) {
      const double r = 0.9 * std::sqrt(rng.uniform());
      const double th = rng.uniform(0.0, 2.0 * kPi);
      const cplx z = std::polar(r, th);
      if (std::abs(z - 1.0) < 0.1) continue;
      const OracleResult res = oracle_2f1(t.a, t.b, t.c, z);
      if (!res.converged)
        throw std::runtime_error("oracle did not converge during generation");
      Record rec;
      rec.set("type", "value_2f1");
      rec.set("set", std::to_string(s));
      rec.set("n", std::to_string(sp.n));
      rec.set_c("lambda", sp.lambda);
      rec.set_c("z", z);
      rec.set_c("value", res.value);
      rec.set("terms", std::to_string(res.terms));
      rec.set("provenance", res.provenance + ", generated 2026-08-14");
      ff.recs.push_back(std::move(rec));
      ++made;
    }
  }
  ff.save(dir + "/hyp2f1_oracle.fix");
  return int(ff.recs.size());
}

int generate_boundary_ref(const std::string& dir) {
  FixtureFile ff;
  const std::vector<double> eps = {1e-2, 1e-3, 1e-4, 1e-5};
  for (int s = 0; s < 4; ++s) {
    const SpectralParam sp(kSets[s].n, kSets[s].lambda);
    const HypTriple t = kernel_triple(sp);
    for (double x : {1.1, 1.5, 1.9}) {
      for (int side = 0; side < 2; ++side) {
        const Side sd = side == 0 ? Side::Plus : Side::Minus;
        const double sgn = side == 0 ? 1.0 : -1.0;
        std::vector<cplx> vals;
        for (double e : eps)
          vals.push_back(gauss_2f1(t.a, t.b, t.c, cplx(x, sgn * e)).value);
        const cplx extrap = richardson_to_zero(eps, vals, 3).back();
        const cplx closed = boundary_2f1(sp, x, sd);
        Record rec;
        rec.set("type", "boundary_2f1");
        rec.set("set", std::to_string(s));
        rec.set("n", std::to_string(sp.n));
        rec.set_c("lambda", sp.lambda);
        rec.set_d("x", x);
        rec.set("side", side == 0 ? "plus" : "minus");
        rec.set_c("value_closed", closed);
        rec.set_c("value_extrap", extrap);
        rec.set_d("route_diff", std::abs(closed - extrap));
        rec.set("provenance",
                "closed: on-cut connection tables; extrap: Richardson "
                "orders 1..3 over off-cut evaluations at eps=1e-2..1e-5, "
                "generated 2026-08-14");
        ff.recs.push_back(std::move(rec));
      }
    }
  }
  ff.save(dir + "/boundary_ref.fix");
  return int(ff.recs.size());
}

int generate_jump_ref(const std::string& dir) {
  FixtureFile ff;
  std::vector<ParamSet> sets(kSets, kSets + 4);
  sets.push_back(ParamSet{3, cplx(0.4, 0.0)});
  for (const auto& ps : sets) {
    const SpectralParam sp(ps.n, ps.lambda);
    for (double x : {1.2, 1.5, 1.9}) {
      const cplx closed = jump_2f1(sp, x);
      const cplx diff =
          boundary_2f1(sp, x, Side::Minus) - boundary_2f1(sp, x, Side::Plus);
      Record rec;
      rec.set("type", "jump_2f1");
      rec.set("n", std::to_string(sp.n));
      rec.set_c("lambda", sp.lambda);
      rec.set_d("x", x);
      rec.set_c("value_closed", closed);
      rec.set_c("value_sided_diff", diff);
      rec.set_d("route_diff", std::abs(closed - diff));
      rec.set("provenance",
              "closed-form cut jump; normalization cross-checked against "
              "the one-sided difference route, generated 2026-08-14");
      ff.recs.push_back(std::move(rec));
    }
  }
  ff.save(dir + "/jump_ref.fix");
  return int(ff.recs.size());
}

std::string orders_note(cplx lam) {
  long k = 0;
  if (std::abs(lam.imag()) < 1e-12 &&
      std::abs(lam.real() - std::round(lam.real())) < 1e-12 &&
      (k = long(-std::round(lam.real()))) >= 1) {
    // pv x^-k: parity-matched Taylor orders below k-1
    std::string s = "pv symmetrization, subtraction orders {";
    bool first = true;
    for (long j = (k % 2 == 0) ? 0 : 1; j <= k - 2; j += 2) {
      if (!first) s += ",";
      s += std::to_string(j);
      first = false;
    }
    return s + "} plus delta term of order " + std::to_string(k - 1);
  }
  const int m = std::max(0, (int)std::ceil(-lam.real()) - 1);
  std::string s = "power-family subtraction orders {";
  for (int j = 0; j < m; ++j) s += (j ? "," : "") + std::to_string(j);
  return s + "}";
}

int generate_dist1d_ref(const std::string& dir) {
  FixtureFile ff;
  const TestFn1D even(0, 0.0, 0.7);
  const std::vector<double> eps = {1e-2, 1e-3, 1e-4, 1e-5};
  struct Case {
    cplx lam;
    std::vector<double> expo;
  };
  // an even bump kills the odd-order Taylor data, so the surviving
  // anomalous epsilon-exponent for half-integer powers is 3/2
  const std::vector<Case> cases = {
      {{-0.5, 0.0}, {1.0, 1.5, 2.0}},
      {{-1.5, 0.0}, {1.0, 1.5, 2.0}},
      {{-1.0, 0.0}, {1.0, 2.0, 3.0}},
      {{-2.0, 0.0}, {1.0, 2.0, 3.0}},
  };
  for (const auto& cs : cases) {
    for (int side = 0; side < 2; ++side) {
      const Side sd = side == 0 ? Side::Plus : Side::Minus;
      const double sgn = side == 0 ? 1.0 : -1.0;
      std::vector<cplx> vals;
      for (double e : eps)
        vals.push_back(quad::adaptive(
                           [&](double x) {
                             return std::pow(cplx(x, sgn * e), cs.lam) * even.value(x);
                           },
                           even.lo(), even.hi(), 1e-13)
                           .value);
      const cplx extrap = richardson_to_zero(eps, vals, cs.expo).back();
      cplx dec = 0.0;
      for (const auto& [c, d] : i0_decompose(cs.lam, sd))
        dec += c * pair_1d(d, even).value;
      Record rec;
      rec.set("type", "dist1d_i0");
      rec.set_c("lambda", cs.lam);
      rec.set("side", side == 0 ? "plus" : "minus");
      rec.set_d("bump_center", 0.0);
      rec.set_d("bump_halfwidth", 0.7);
      rec.set_c("value_decomposed", dec);
      rec.set_c("value_extrap", extrap);
      rec.set_d("route_diff", std::abs(dec - extrap));
      std::string expo = "{";
      for (std::size_t i = 0; i < cs.expo.size(); ++i)
        expo += (i ? "," : "") + format_d(cs.expo[i]);
      rec.set("eps_exponents", expo + "}");
      rec.set("provenance",
              orders_note(cs.lam) +
                  "; extrap: Neville over eps=1e-2..1e-5, generated 2026-08-14");
      ff.recs.push_back(std::move(rec));
    }
  }
  // Sokhotski-Plemelj jump record
  {
    const cplx plus = [&] {
      cplx v = 0.0;
      for (const auto& [c, d] : i0_decompose(-1.0, Side::Plus))
        v += c * pair_1d(d, even).value;
      return v;
    }();
    const cplx minus = [&] {
      cplx v = 0.0;
      for (const auto& [c, d] : i0_decompose(-1.0, Side::Minus))
        v += c * pair_1d(d, even).value;
      return v;
    }();
    Record rec;
    rec.set("type", "dist1d_sp_jump");
    rec.set_c("value_jump", plus - minus);
    rec.set_c("value_expected", cplx(0.0, -2.0 * kPi) * even.value(0.0));
    rec.set_d("route_diff",
              std::abs(plus - minus - cplx(0.0, -2.0 * kPi) * even.value(0.0)));
    rec.set("provenance",
            "plemelj jump via pv/delta decomposition, generated 2026-08-14");
    ff.recs.push_back(std::move(rec));
  }
  // windowed Fourier signatures used by the wavefront acceptance checks
  {
    const TestFn1D window(0, 0.0, 0.3);
    const std::vector<double> taus = {16, 24, 32, 48, 64, 96, 128, 192, 256};
    struct Sig {
      const char* name;
      ModelDist1D dist;
    };
    const Sig sigs[] = {
        {"delta", ModelDist1D::delta_deriv(0)},
        {"heaviside", ModelDist1D::heaviside()},
        {"i0pow_plus", ModelDist1D::i0_pow(-0.5, Side::Plus)},
    };
    for (const auto& sg : sigs) {
      DecayTable dt = windowed_fourier(sg.dist, window, taus);
      Record rec;
      rec.set("type", "dist1d_decay");
      rec.set("model", sg.name);
      rec.set_d("slope_plus", dt.slope_plus);
      rec.set_d("slope_minus", dt.slope_minus);
      rec.set_d("mag_plus_max_tau", dt.mag_plus.back());
      rec.set_d("mag_minus_max_tau", dt.mag_minus.back());
      rec.set("rapid_plus", rapid_decay(dt.slope_plus) ? "yes" : "no");
      rec.set("rapid_minus", rapid_decay(dt.slope_minus) ? "yes" : "no");
      rec.set("provenance",
              "windowed Fourier magnitudes, window halfwidth 0.3 at 0, "
              "tau=16..256, generated 2026-08-14");
      ff.recs.push_back(std::move(rec));
    }
  }
  ff.save(dir + "/dist1d_ref.fix");
  return int(ff.recs.size());
}

}  // namespace

// The ladder identity has two candidate constant pairings: the operator
// constant could be the shifted (p+1)(p+n) or the unshifted p(p-1+n).
// Both are evaluated on the same stencil; the record keeps the residuals
// so the surviving pairing (the shifted one) is pinned by data.
int generate_kernels_ref(const std::string& dir) {
  FixtureFile ff;
  for (int n : {2, 3}) {
    const CVec zc =
        approach_point(Isometry::identity(n + 1), 0.8, Branch::Forward);
    auto zm = crown_membership(zc);
    if (!zm) throw std::runtime_error("kernels_ref: crown point rejected");
    std::vector<DeSitterPoint> ygrid;
    const Chart ch{DeSitterPoint(basis_vec(n + 1, n))};
    ygrid.push_back(ch.point(RVec(std::size_t(n), 0.0)));
    RVec v1(std::size_t(n), 0.0);
    v1[0] = 0.15;
    v1[1] = -0.2;
    ygrid.push_back(ch.point(v1));
    const double h = 1e-3;
    for (double lp : {0.0, 0.7}) {
      const double good = recursion_check(*zm, lp, ygrid, h);
      // same stencil, unshifted operator constant
      double bad = 0.0;
      for (const DeSitterPoint& y : ygrid) {
        const Chart cy(y);
        auto Phi = [&](const RVec& v, double mup) {
          return std::pow(0.5 * (1.0 - mform(zc, cy.point(v).p)), mup);
        };
        const RVec zero(std::size_t(n), 0.0);
        const cplx f0 = Phi(zero, lp + 1.0);
        cplx box(0.0, 0.0);
        for (int j = 0; j < n; ++j) {
          RVec vp = zero, vm = zero;
          vp[j] = h;
          vm[j] = -h;
          const cplx d2 =
              (Phi(vp, lp + 1.0) - 2.0 * f0 + Phi(vm, lp + 1.0)) / (h * h);
          box += (j == 0) ? -d2 : d2;
        }
        const cplx resid = box + lp * (lp - 1.0 + double(n)) * f0 -
                           (lp + 1.0) * (lp + 0.5 * n) * Phi(zero, lp);
        bad = std::max(bad, std::abs(resid));
      }
      Record rec;
      rec.set("type", "kernel_ladder");
      rec.set("n", std::to_string(n));
      rec.set_d("lambda_p", lp);
      rec.set_d("h", h);
      rec.set("operator_constant", "(p+1)(p+n)");
      rec.set("rhs_factor", "(p+1)(p+n/2)");
      rec.set_d("residual_shifted", good);
      rec.set_d("residual_unshifted", bad);
      rec.set("provenance",
              "finite-difference ladder-constant validation at a crown "
              "point, generated 2026-08-14");
      ff.recs.push_back(std::move(rec));
    }
  }
  ff.save(dir + "/kernels_ref.fix");
  return int(ff.recs.size());
}

int generate_all_fixtures(const std::string& dir) {
  std::filesystem::create_directories(dir);
  int count = 0;
  count += generate_hyp2f1_oracle(dir);
  count += generate_boundary_ref(dir);
  count += generate_jump_ref(dir);
  count += generate_dist1d_ref(dir);
  count += generate_kernels_ref(dir);
  return count;
}

}  // namespace crownwave
