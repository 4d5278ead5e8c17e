#include "latsec/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "latsec/error.hpp"

namespace latsec {
namespace {

std::int64_t mod_p(std::int64_t v, std::int64_t p) {
  const std::int64_t r = v % p;
  return r < 0 ? r + p : r;
}

std::int64_t pow_mod(std::int64_t base, std::int64_t exp, std::int64_t p) {
  int128 result = 1;
  int128 b = mod_p(base, p);
  while (exp > 0) {
    if (exp & 1) result = result * b % p;
    b = b * b % p;
    exp >>= 1;
  }
  return static_cast<std::int64_t>(result);
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t p) { return pow_mod(a, p - 2, p); }

// In-place reduced row echelon form over GF(p); returns pivot columns.
std::vector<std::size_t> row_reduce(std::vector<std::int64_t>& m, std::size_t rows,
                                    std::size_t cols, std::int64_t p) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t sel = row;
    while (sel < rows && m[sel * cols + col] == 0) ++sel;
    if (sel == rows) continue;
    if (sel != row) {
      for (std::size_t c = 0; c < cols; ++c) std::swap(m[sel * cols + c], m[row * cols + c]);
    }
    const std::int64_t inv = inverse_mod(m[row * cols + col], p);
    for (std::size_t c = 0; c < cols; ++c) {
      m[row * cols + c] = static_cast<std::int64_t>(static_cast<int128>(m[row * cols + c]) * inv % p);
    }
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == row || m[r * cols + col] == 0) continue;
      const std::int64_t factor = m[r * cols + col];
      for (std::size_t c = 0; c < cols; ++c) {
        m[r * cols + c] = mod_p(m[r * cols + c] - static_cast<std::int64_t>(
                                                     static_cast<int128>(factor) * m[row * cols + c] % p),
                                p);
      }
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

std::int64_t narrow(int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw Error(ErrorCode::Overflow, "integer overflow");
  return static_cast<std::int64_t>(v);
}

// Row-major n x n integer product with a vector.
IntVec mat_vec(const std::vector<std::int64_t>& m, std::size_t n,
               std::span<const std::int64_t> v) {
  IntVec out(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    int128 acc = 0;
    for (std::size_t c = 0; c < n; ++c) acc += static_cast<int128>(m[r * n + c]) * v[c];
    out[r] = narrow(acc);
  }
  return out;
}

std::vector<double> to_double(const std::vector<std::int64_t>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

bool is_prime(std::int64_t p) noexcept {
  if (p < 2) return false;
  for (std::int64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// ---------------------------------------------------------------- FieldMatrix

FieldMatrix::FieldMatrix(std::int64_t p, std::size_t rows, std::size_t cols,
                         std::vector<std::int64_t> entries)
    : p_(p), rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (!is_prime(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
  if (entries_.size() != rows * cols) {
    throw Error(ErrorCode::InvalidArgument, "generator entry count does not match its shape");
  }
  for (const auto e : entries_) {
    if (e < 0 || e >= p) throw Error(ErrorCode::InvalidArgument, "generator entry outside [0, p)");
  }
}

std::size_t FieldMatrix::rank() const {
  auto copy = entries_;
  return row_reduce(copy, rows_, cols_, p_).size();
}

bool FieldMatrix::spans(std::span<const std::int64_t> v) const {
  if (v.size() != rows_) throw Error(ErrorCode::DimensionMismatch, "vector length != rows");
  std::vector<std::int64_t> aug(rows_ * (cols_ + 1));
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) aug[r * (cols_ + 1) + c] = at(r, c);
    aug[r * (cols_ + 1) + cols_] = mod_p(v[r], p_);
  }
  return row_reduce(aug, rows_, cols_ + 1, p_).size() == rank();
}

FieldMatrix FieldMatrix::leading_columns(std::size_t count) const {
  if (count > cols_) throw Error(ErrorCode::InvalidArgument, "more columns requested than available");
  std::vector<std::int64_t> out(rows_ * count);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < count; ++c) out[r * count + c] = at(r, c);
  return FieldMatrix(p_, rows_, count, std::move(out));
}

std::vector<std::int64_t> FieldMatrix::lattice_basis() const {
  // Rows of the RREF of G^T generate the code with identity on the pivot
  // coordinates; adding p*e_j for the free coordinates completes a basis.
  std::vector<std::int64_t> gt(cols_ * rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) gt[c * rows_ + r] = at(r, c);
  const auto pivots = row_reduce(gt, cols_, rows_, p_);
  if (pivots.size() != cols_) throw Error(ErrorCode::RankDeficientG, "generator is rank deficient");

  const std::size_t n = rows_;
  std::vector<std::int64_t> basis(n * n, 0);
  std::size_t next_pivot = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (next_pivot < pivots.size() && pivots[next_pivot] == j) {
      for (std::size_t r = 0; r < n; ++r) basis[r * n + j] = gt[next_pivot * rows_ + r];
      ++next_pivot;
    } else {
      basis[j * n + j] = p_;
    }
  }
  return basis;
}

// ----------------------------------------------------------- UnimodularMatrix

UnimodularMatrix UnimodularMatrix::identity(std::size_t n) {
  std::vector<std::int64_t> e(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1;
  return UnimodularMatrix(n, std::move(e));
}

UnimodularMatrix::UnimodularMatrix(std::size_t n, std::vector<std::int64_t> entries)
    : n_(n), entries_(std::move(entries)), det_(0) {
  if (n == 0 || entries_.size() != n * n) {
    throw Error(ErrorCode::NotUnimodular, "transform must be a non-empty square matrix");
  }
  // Fraction-free Bareiss elimination for the determinant.
  std::vector<int128> m(entries_.begin(), entries_.end());
  int128 prev = 1;
  int sign = 1;
  bool singular = false;
  for (std::size_t k = 0; k + 1 < n && !singular; ++k) {
    if (m[k * n + k] == 0) {
      std::size_t sel = k + 1;
      while (sel < n && m[sel * n + k] == 0) ++sel;
      if (sel == n) {
        singular = true;
        break;
      }
      for (std::size_t c = 0; c < n; ++c) std::swap(m[k * n + c], m[sel * n + c]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i * n + j] = (m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j]) / prev;
      }
    }
    prev = m[k * n + k];
  }
  const int128 det = singular ? 0 : sign * m[n * n - 1];
  if (det != 1 && det != -1) {
    throw Error(ErrorCode::NotUnimodular, "transform determinant must be +-1");
  }
  det_ = static_cast<std::int64_t>(det);

  // Gauss-Jordan over the rationals; the result must be integral.
  std::vector<Rational> a(n * 2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) a[r * 2 * n + c] = Rational(entries_[r * n + c]);
    a[r * 2 * n + n + r] = Rational(1);
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t sel = col;
    while (a[sel * 2 * n + col].is_zero()) ++sel;
    if (sel != col) {
      for (std::size_t c = 0; c < 2 * n; ++c) std::swap(a[sel * 2 * n + c], a[col * 2 * n + c]);
    }
    const Rational pivot = a[col * 2 * n + col];
    for (std::size_t c = 0; c < 2 * n; ++c) a[col * 2 * n + c] /= pivot;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r * 2 * n + col].is_zero()) continue;
      const Rational f = a[r * 2 * n + col];
      for (std::size_t c = 0; c < 2 * n; ++c) a[r * 2 * n + c] -= f * a[col * 2 * n + c];
    }
  }
  inverse_.resize(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const Rational& v = a[r * 2 * n + n + c];
      if (!v.is_integer()) throw Error(ErrorCode::NotUnimodular, "inverse is not integral");
      inverse_[r * n + c] = v.num();
    }
  }
}

IntVec UnimodularMatrix::apply(std::span<const std::int64_t> v) const {
  return mat_vec(entries_, n_, v);
}

IntVec UnimodularMatrix::apply_inverse(std::span<const std::int64_t> v) const {
  return mat_vec(inverse_, n_, v);
}

// --------------------------------------------------------------- LatticePoint

Rational LatticePoint::coordinate(std::size_t i) const {
  return scale * Rational(numerators.at(i), denominator);
}

RealVec LatticePoint::coordinates() const {
  RealVec out(numerators.size());
  for (std::size_t i = 0; i < numerators.size(); ++i) out[i] = coordinate(i).to_double();
  return out;
}

bool operator==(const LatticePoint& a, const LatticePoint& b) {
  if (a.dim() != b.dim()) return false;
  for (std::size_t i = 0; i < a.dim(); ++i)
    if (a.coordinate(i) != b.coordinate(i)) return false;
  return true;
}

// ------------------------------------------------------- ConstructionALattice

ConstructionALattice::ConstructionALattice(std::int64_t p, std::size_t k, std::size_t n,
                                           FieldMatrix g, UnimodularMatrix gprime,
                                           Rational scale)
    : p_(p), k_(k), n_(n), g_(std::move(g)), gprime_(std::move(gprime)), scale_(scale) {
  coarse_basis_.resize(n * n);
  for (std::size_t i = 0; i < n * n; ++i) coarse_basis_[i] = p * gprime_.entries()[i];

  const auto code_basis = g_.lattice_basis();
  fine_basis_.assign(n * n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      int128 acc = 0;
      for (std::size_t m = 0; m < n; ++m)
        acc += static_cast<int128>(gprime_.at(r, m)) * code_basis[m * n + c];
      fine_basis_[r * n + c] = narrow(acc);
    }
  }
  coarse_search_ = std::make_shared<ClosestPointSearch>(n, to_double(coarse_basis_));
  fine_search_ = std::make_shared<ClosestPointSearch>(n, to_double(fine_basis_));
}

ConstructionALattice ConstructionALattice::with_scale(const Rational& scale) const {
  if (scale.sign() <= 0) throw Error(ErrorCode::NonPositiveScale, "scale must be positive");
  ConstructionALattice copy = *this;
  copy.scale_ = scale;
  return copy;
}

IntVec ConstructionALattice::fine_numerators(std::span<const std::int64_t> z,
                                             std::span<const std::int64_t> w) const {
  if (z.size() != k_ || w.size() != n_) {
    throw Error(ErrorCode::DimensionMismatch, "fine_numerators: bad z or w length");
  }
  IntVec inner(n_, 0);
  for (std::size_t r = 0; r < n_; ++r) {
    int128 acc = static_cast<int128>(p_) * w[r];
    for (std::size_t c = 0; c < k_; ++c) acc += static_cast<int128>(g_.at(r, c)) * z[c];
    inner[r] = narrow(acc);
  }
  return gprime_.apply(inner);
}

LatticePoint ConstructionALattice::point(IntVec numerators) const {
  return LatticePoint{std::move(numerators), p_, scale_};
}

RealVec ConstructionALattice::real_point(std::span<const std::int64_t> numerators) const {
  const double u = unit().to_double();
  RealVec out(numerators.size());
  for (std::size_t i = 0; i < numerators.size(); ++i) out[i] = u * static_cast<double>(numerators[i]);
  return out;
}

IntVec ConstructionALattice::coarse_coefficients(std::span<const std::int64_t> numerators,
                                                 std::int64_t extra_den) const {
  if (numerators.size() != n_) throw Error(ErrorCode::DimensionMismatch, "point dimension mismatch");
  RealVec x(n_);
  for (std::size_t i = 0; i < n_; ++i)
    x[i] = static_cast<double>(numerators[i]) / static_cast<double>(extra_den);

  const auto candidates = coarse_search_->nearest_candidates(x);
  IntVec best_w;
  IntVec best_res;
  int128 best_norm = -1;
  IntVec residual(n_);
  for (const auto& w : candidates) {
    const IntVec image = mat_vec(coarse_basis_, n_, w);
    int128 norm = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      residual[i] = narrow(static_cast<int128>(numerators[i]) -
                           static_cast<int128>(extra_den) * image[i]);
      norm += static_cast<int128>(residual[i]) * residual[i];
    }
    if (best_norm < 0 || norm < best_norm || (norm == best_norm && residual < best_res)) {
      best_norm = norm;
      best_w = w;
      best_res = residual;
    }
  }
  return best_w;
}

IntVec ConstructionALattice::reduce(std::span<const std::int64_t> numerators) const {
  const IntVec w = coarse_coefficients(numerators);
  const IntVec image = mat_vec(coarse_basis_, n_, w);
  IntVec out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = numerators[i] - image[i];
  return out;
}

ConstructionALattice build_lattice(std::int64_t p, std::size_t k, std::size_t n,
                                   const FieldMatrix& g, const UnimodularMatrix& gprime,
                                   Rational scale) {
  if (!is_prime(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
  if (k < 1 || k > n) throw Error(ErrorCode::InvalidArgument, "need 1 <= k <= n");
  if (g.modulus() != p || g.rows() != n || g.cols() != k) {
    throw Error(ErrorCode::InvalidArgument, "G must be an n x k matrix over GF(p)");
  }
  if (g.rank() != k) {
    throw Error(ErrorCode::RankDeficientG, "G has rank " + std::to_string(g.rank()) +
                                               " over GF(" + std::to_string(p) + "), need " +
                                               std::to_string(k));
  }
  if (gprime.dim() != n) throw Error(ErrorCode::NotUnimodular, "G' must be n x n");
  if (scale.sign() <= 0) throw Error(ErrorCode::NonPositiveScale, "scale must be positive");
  return ConstructionALattice(p, k, n, g, gprime, scale);
}

// ------------------------------------------------------------ free operations

namespace {

// Coarse coefficients for a real point, distances measured in real
// coordinates; near-equal distances count as ties.
IntVec coarse_coefficients_real(std::span<const double> x, const ConstructionALattice& lat) {
  const std::size_t n = lat.n();
  if (x.size() != n) throw Error(ErrorCode::DimensionMismatch, "point dimension mismatch");
  const double unit = lat.unit().to_double();
  const double s = lat.scale().to_double();
  RealVec in_units(n);
  for (std::size_t i = 0; i < n; ++i) in_units[i] = x[i] / unit;

  const auto candidates = lat.coarse_search().nearest_candidates(in_units);
  IntVec best_w;
  RealVec best_res;
  double best = -1.0;
  RealVec residual(n);
  for (const auto& w : candidates) {
    const IntVec gw = lat.transform().apply(w);
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      residual[i] = x[i] - s * static_cast<double>(gw[i]);
      d += residual[i] * residual[i];
    }
    const double tol = 1e-12 * std::max(1.0, best);
    const bool tie = best >= 0.0 && std::fabs(d - best) <= tol;
    if (best < 0.0 || (!tie && d < best) || (tie && residual < best_res)) {
      best = d;
      best_w = w;
      best_res = residual;
    }
  }
  return best_w;
}

}  // namespace

LatticePoint quantize_coarse(std::span<const double> x, const ConstructionALattice& lat) {
  const IntVec w = coarse_coefficients_real(x, lat);
  IntVec num = lat.transform().apply(w);
  for (auto& v : num) v *= lat.p();
  return lat.point(std::move(num));
}

RealVec mod_coarse(std::span<const double> x, const ConstructionALattice& lat) {
  const IntVec w = coarse_coefficients_real(x, lat);
  const IntVec gw = lat.transform().apply(w);
  const double s = lat.scale().to_double();
  RealVec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - s * static_cast<double>(gw[i]);
  return out;
}

namespace {

// Expresses x in lattice units as numerators / extra_den.
std::pair<IntVec, std::int64_t> to_lattice_units(const LatticePoint& x,
                                                 const ConstructionALattice& lat) {
  if (x.dim() != lat.n()) throw Error(ErrorCode::DimensionMismatch, "point dimension mismatch");
  const Rational ratio = x.scale * Rational(lat.p()) / (Rational(x.denominator) * lat.scale());
  IntVec scaled(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    scaled[i] = narrow(static_cast<int128>(ratio.num()) * x.numerators[i]);
  }
  return {std::move(scaled), ratio.den()};
}

}  // namespace

LatticePoint quantize_coarse(const LatticePoint& x, const ConstructionALattice& lat) {
  const auto [num, den] = to_lattice_units(x, lat);
  const IntVec w = lat.coarse_coefficients(num, den);
  IntVec out = lat.transform().apply(w);
  for (auto& v : out) v *= lat.p();
  return lat.point(std::move(out));
}

LatticePoint mod_coarse(const LatticePoint& x, const ConstructionALattice& lat) {
  const auto [num, den] = to_lattice_units(x, lat);
  const IntVec w = lat.coarse_coefficients(num, den);
  const IntVec gw = lat.transform().apply(w);
  IntVec residual(num.size());
  for (std::size_t i = 0; i < num.size(); ++i) {
    residual[i] = narrow(static_cast<int128>(num[i]) -
                         static_cast<int128>(den) * lat.p() * gw[i]);
  }
  return LatticePoint{std::move(residual), narrow(static_cast<int128>(den) * lat.p()),
                      lat.scale()};
}

bool is_in_fine(const LatticePoint& x, const ConstructionALattice& lat) {
  const auto [num, den] = to_lattice_units(x, lat);
  IntVec u(num.size());
  for (std::size_t i = 0; i < num.size(); ++i) {
    if (num[i] % den != 0) return false;  // not even in (scale/p) Z^n
    u[i] = num[i] / den;
  }
  const IntVec v = lat.transform().apply_inverse(u);
  return lat.generator().spans(v);
}

IntVec nearest_fine(std::span<const double> x, const ConstructionALattice& lat) {
  const std::size_t n = lat.n();
  if (x.size() != n) throw Error(ErrorCode::DimensionMismatch, "point dimension mismatch");
  const double unit = lat.unit().to_double();
  RealVec in_units(n);
  for (std::size_t i = 0; i < n; ++i) in_units[i] = x[i] / unit;
  const auto candidates = lat.fine_search().nearest_candidates(in_units);
  const IntVec* best = nullptr;
  double best_d = 0.0;
  for (const auto& w : candidates) {
    const RealVec image = lat.fine_search().apply(w);
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) d += (in_units[i] - image[i]) * (in_units[i] - image[i]);
    if (best == nullptr || d < best_d) {
      best = &w;
      best_d = d;
    }
  }
  return mat_vec(lat.fine_basis(), n, *best);
}

RealVec sample_voronoi(const ConstructionALattice& lat, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const std::size_t n = lat.n();
  RealVec u(n);
  for (auto& v : u) v = uniform(rng);
  const double s = lat.scale().to_double();
  RealVec x(n, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) x[r] += s * static_cast<double>(lat.transform().at(r, c)) * u[c];
  return mod_coarse(x, lat);
}

double voronoi_second_moment(const ConstructionALattice& lat, std::size_t samples,
                             std::uint64_t seed) {
  if (samples == 0) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  std::mt19937_64 rng(seed);
  double acc = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    for (const double v : sample_voronoi(lat, rng)) acc += v * v;
  }
  return acc / static_cast<double>(samples * lat.n());
}

FieldMatrix random_full_rank(std::int64_t p, std::size_t n, std::size_t k, std::mt19937_64& rng) {
  if (!is_prime(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
  if (k < 1 || k > n) throw Error(ErrorCode::InvalidArgument, "need 1 <= k <= n");
  std::uniform_int_distribution<std::int64_t> digit(0, p - 1);
  for (;;) {
    std::vector<std::int64_t> entries(n * k);
    for (auto& e : entries) e = digit(rng);
    FieldMatrix g(p, n, k, std::move(entries));
    if (g.rank() == k) return g;
  }
}

UnimodularMatrix random_unimodular(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::int64_t> m(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1;
  if (n >= 2) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t step = 0; step < 2 * n; ++step) {
      const std::size_t i = pick(rng);
      std::size_t j = pick(rng);
      if (i == j) j = (j + 1) % n;
      if (coin(rng)) {
        for (std::size_t c = 0; c < n; ++c) std::swap(m[i * n + c], m[j * n + c]);
      } else {
        const std::int64_t sign = coin(rng) ? 1 : -1;
        for (std::size_t c = 0; c < n; ++c) m[i * n + c] += sign * m[j * n + c];
      }
    }
  }
  return UnimodularMatrix(n, std::move(m));
}

}  // namespace latsec
