#pragma once

// Brute-force reference computations used by the tests. Nothing here calls
// into the library's search, reduction or entropy code; inputs are plain
// integer matrices and point lists.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "latsec/rational.hpp"

namespace oracle {

using latsec::Rational;
using IVec = std::vector<std::int64_t>;
using RVec = std::vector<Rational>;

inline std::int64_t mod_p(std::int64_t v, std::int64_t p) { return ((v % p) + p) % p; }

// Calls f(z) for every z in {lo..hi}^n, lexicographically.
template <class F>
void for_each_box(std::size_t n, std::int64_t lo, std::int64_t hi, F&& f) {
  IVec z(n, lo);
  if (n == 0) {
    f(z);
    return;
  }
  while (true) {
    f(z);
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (z[i] < hi) {
        ++z[i];
        break;
      }
      z[i] = lo;
      if (i == 0) return;
    }
  }
}

inline IVec mat_vec(const IVec& m, std::size_t rows, std::size_t cols, const IVec& v) {
  IVec out(rows, 0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out[r] += m[r * cols + c] * v[c];
  return out;
}

inline std::int64_t norm_sq(const IVec& v) {
  std::int64_t s = 0;
  for (auto x : v) s += x * x;
  return s;
}

// Representative of v modulo the lattice p*G'*Z^n: the residual of least
// norm over a box of coarse coefficients, ties to the lexicographically
// smallest residual. `radius` bounds |w_i|.
inline IVec reduce_brute(const IVec& v, std::int64_t p, const IVec& gprime, std::size_t n,
                         std::int64_t radius) {
  IVec best;
  std::int64_t best_norm = std::numeric_limits<std::int64_t>::max();
  for_each_box(n, -radius, radius, [&](const IVec& w) {
    IVec r = v;
    const IVec gw = mat_vec(gprime, n, n, w);
    for (std::size_t i = 0; i < n; ++i) r[i] -= p * gw[i];
    const auto d = norm_sq(r);
    if (d < best_norm || (d == best_norm && r < best)) {
      best_norm = d;
      best = r;
    }
  });
  return best;
}

// Codebook numerators (units scale/p) of the nested pair built from
// G (n x k) and G' (n x n), by reducing every G' G z, z in GF(p)^k.
inline std::set<IVec> codebook_brute(std::int64_t p, std::size_t k, std::size_t n, const IVec& g,
                                     const IVec& gprime, std::int64_t radius = 3) {
  std::set<IVec> out;
  for_each_box(k, 0, p - 1, [&](const IVec& z) {
    IVec gz = mat_vec(g, n, k, z);
    for (auto& x : gz) x = mod_p(x, p);
    out.insert(reduce_brute(mat_vec(gprime, n, n, gz), p, gprime, n, radius));
  });
  return out;
}

inline RVec to_rational(const IVec& v, const Rational& unit) {
  RVec out;
  for (auto x : v) out.push_back(unit * Rational(x));
  return out;
}

inline RVec add(const RVec& a, const RVec& b) {
  RVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline std::set<RVec> minkowski_brute(const std::vector<RVec>& a, const std::vector<RVec>& b) {
  std::set<RVec> out;
  for (const auto& x : a)
    for (const auto& y : b) out.insert(add(x, y));
  return out;
}

template <class Key>
double entropy_of(const std::map<Key, std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (const auto& [_, c] : counts) total += c;
  long double h = 0;
  for (const auto& [_, c] : counts) {
    const long double q = static_cast<long double>(c) / static_cast<long double>(total);
    h -= q * std::log2(q);
  }
  return static_cast<double>(h);
}

// I(X1; X1 + X2) for X1, X2 uniform over the listed points (repeats count).
inline double mutual_info_brute(const std::vector<RVec>& c1, const std::vector<RVec>& c2) {
  std::map<RVec, std::uint64_t> sums, x2;
  for (const auto& a : c1)
    for (const auto& b : c2) ++sums[add(a, b)];
  for (const auto& b : c2) ++x2[b];
  return entropy_of(sums) - entropy_of(x2);
}

// I(W; X1 + X2) where slot i of c1 belongs to bin bin_of[i], all slots and
// all c2 entries equally likely.
inline double binned_leak_brute(const std::vector<RVec>& c1, const std::vector<std::size_t>& bin_of,
                                const std::vector<RVec>& c2) {
  std::map<std::size_t, std::uint64_t> w;
  std::map<RVec, std::uint64_t> s;
  std::map<std::pair<std::size_t, RVec>, std::uint64_t> ws;
  for (std::size_t i = 0; i < c1.size(); ++i)
    for (const auto& b : c2) {
      const auto sum = add(c1[i], b);
      ++w[bin_of[i]];
      ++s[sum];
      ++ws[{bin_of[i], sum}];
    }
  return entropy_of(w) + entropy_of(s) - entropy_of(ws);
}

}  // namespace oracle
