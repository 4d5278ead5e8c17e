#include "latsec/closest_point.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "latsec/error.hpp"

namespace latsec {

struct ClosestPointSearch::Factor {
  Eigen::MatrixXd basis;
  Eigen::MatrixXd inverse;
  Eigen::MatrixXd q;  // orthogonal factor
  Eigen::MatrixXd r;  // upper triangular factor
};

ClosestPointSearch::ClosestPointSearch(std::size_t n, std::span<const double> basis)
    : n_(n) {
  if (basis.size() != n * n) {
    throw Error(ErrorCode::DimensionMismatch, "basis must be n*n");
  }
  auto f = std::make_shared<Factor>();
  const auto dim = static_cast<Eigen::Index>(n);
  f->basis.resize(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) f->basis(r, c) = basis[r * dim + c];

  Eigen::FullPivLU<Eigen::MatrixXd> lu(f->basis);
  if (!lu.isInvertible()) throw Error(ErrorCode::InvalidArgument, "singular lattice basis");
  f->inverse = lu.inverse();

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(f->basis);
  f->q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
  f->r = qr.matrixQR().triangularView<Eigen::Upper>();
  factor_ = std::move(f);
}

IntVec ClosestPointSearch::round_off(std::span<const double> x) const {
  const auto dim = static_cast<Eigen::Index>(n_);
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), dim);
  const Eigen::VectorXd t = factor_->inverse * xv;
  IntVec w(n_);
  for (std::size_t i = 0; i < n_; ++i) w[i] = std::llround(t(static_cast<Eigen::Index>(i)));
  return w;
}

RealVec ClosestPointSearch::apply(std::span<const std::int64_t> w) const {
  RealVec out(n_, 0.0);
  for (std::size_t r = 0; r < n_; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < n_; ++c) {
      acc += factor_->basis(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *
             static_cast<double>(w[c]);
    }
    out[r] = acc;
  }
  return out;
}

std::vector<IntVec> ClosestPointSearch::enumerate(std::span<const double> x,
                                                  double radius_sq) const {
  const auto dim = static_cast<Eigen::Index>(n_);
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), dim);
  const Eigen::VectorXd y = factor_->q.transpose() * xv;
  const Eigen::MatrixXd& r = factor_->r;
  const double bound = radius_sq * (1.0 + 1e-9) + 1e-12;

  std::vector<IntVec> found;
  IntVec w(n_, 0);

  // Depth-first over levels n-1 .. 0; `partial` is the squared distance
  // contributed by the levels already fixed.
  auto descend = [&](auto&& self, Eigen::Index level, double partial) -> void {
    if (level < 0) {
      found.push_back(w);
      return;
    }
    double center = y(level);
    for (Eigen::Index j = level + 1; j < dim; ++j) center -= r(level, j) * static_cast<double>(w[j]);
    const double diag = r(level, level);
    center /= diag;
    const double remaining = bound - partial;
    if (remaining < 0.0) return;
    const double half = std::sqrt(remaining) / std::fabs(diag);
    const auto lo = static_cast<std::int64_t>(std::ceil(center - half - 1e-9));
    const auto hi = static_cast<std::int64_t>(std::floor(center + half + 1e-9));
    for (std::int64_t v = lo; v <= hi; ++v) {
      const double delta = diag * (center - static_cast<double>(v));
      const double dist = partial + delta * delta;
      if (dist > bound) continue;
      w[static_cast<std::size_t>(level)] = v;
      self(self, level - 1, dist);
    }
  };
  descend(descend, dim - 1, 0.0);
  return found;
}

std::vector<IntVec> ClosestPointSearch::nearest_candidates(std::span<const double> x) const {
  const IntVec start = round_off(x);
  const RealVec image = apply(start);
  double d0 = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double diff = x[i] - image[i];
    d0 += diff * diff;
  }
  auto out = enumerate(x, d0);
  if (out.empty()) out.push_back(start);
  return out;
}

}  // namespace latsec
