#pragma once
// Shared small utilities: complex alias, deterministic RNG, pairwise
// summation, and polynomial/Richardson extrapolation to zero.
#include <complex>
#include <cstdint>
#include <vector>
#include <cmath>
#include <stdexcept>

namespace crownwave {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// splitmix64: tiny deterministic generator, identical across platforms.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() {  // in [0,1)
    return double(next() >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int index(int m) { return int(next() % std::uint64_t(m)); }  // 0..m-1
};

// Deterministic pairwise (tree) summation in index order.
template <class T>
T pairwise_sum(const std::vector<T>& xs) {
  if (xs.empty()) return T{};
  std::vector<T> cur = xs;
  while (cur.size() > 1) {
    std::vector<T> nxt;
    nxt.reserve((cur.size() + 1) / 2);
    for (size_t i = 0; i + 1 < cur.size(); i += 2) nxt.push_back(cur[i] + cur[i + 1]);
    if (cur.size() % 2) nxt.push_back(cur.back());
    cur.swap(nxt);
  }
  return cur[0];
}

// Generalized Richardson extrapolation to h = 0, assuming
//   y(h) = y0 + sum_k c_k h^{p_k} + smaller.
// Nodes h must be positive and strictly decreasing. Each window of
// consecutive nodes determines y0 by solving the small collocation system
// in the basis {1, h^{p_1}, ...}; sequential pairwise elimination is only
// exact on geometric grids, so it is not used here. Returns one estimate
// per window (last = finest = best).
template <class T>
std::vector<T> richardson_to_zero(const std::vector<double>& h,
                                  const std::vector<T>& y,
                                  const std::vector<double>& exponents) {
  const size_t k = exponents.size();
  if (h.size() != y.size() || h.size() < k + 1)
    throw std::invalid_argument("richardson_to_zero: need more nodes than exponents");
  for (size_t i = 0; i < h.size(); ++i)
    if (!(h[i] > 0.0) || (i > 0 && !(h[i] < h[i - 1])))
      throw std::invalid_argument("richardson_to_zero: nodes must decrease to 0");
  std::vector<T> out;
  for (size_t w0 = 0; w0 + k < h.size(); ++w0) {
    // columns scaled by the window's largest node to keep entries in [0, 1]
    std::vector<std::vector<double>> m(k + 1, std::vector<double>(k + 1));
    std::vector<T> r(k + 1);
    for (size_t i = 0; i <= k; ++i) {
      m[i][0] = 1.0;
      for (size_t j = 0; j < k; ++j)
        m[i][j + 1] = std::pow(h[w0 + i] / h[w0], exponents[j]);
      r[i] = y[w0 + i];
    }
    for (size_t c = 0; c <= k; ++c) {  // elimination with partial pivoting
      size_t piv = c;
      for (size_t i = c + 1; i <= k; ++i)
        if (std::fabs(m[i][c]) > std::fabs(m[piv][c])) piv = i;
      std::swap(m[c], m[piv]);
      std::swap(r[c], r[piv]);
      for (size_t i = c + 1; i <= k; ++i) {
        const double f = m[i][c] / m[c][c];
        for (size_t j = c; j <= k; ++j) m[i][j] -= f * m[c][j];
        r[i] -= f * r[c];
      }
    }
    std::vector<T> a(k + 1);
    for (size_t ci = k + 1; ci-- > 0;) {
      T s = r[ci];
      for (size_t j = ci + 1; j <= k; ++j) s -= m[ci][j] * a[j];
      a[ci] = s / m[ci][ci];
    }
    out.push_back(a[0]);
  }
  return out;
}

// Convenience: order-k Richardson with integer exponents {1..k}.
template <class T>
std::vector<T> richardson_to_zero(const std::vector<double>& h,
                                  const std::vector<T>& y, int order) {
  std::vector<double> expo;
  for (int k = 1; k <= order; ++k) expo.push_back(double(k));
  return richardson_to_zero(h, y, expo);
}

}  // namespace crownwave
