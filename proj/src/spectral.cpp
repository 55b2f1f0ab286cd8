#include "mktcorr/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mktcorr/errors.hpp"

namespace mktcorr {

namespace {

void orient(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  for (Eigen::Index j = 1; j < v.size(); ++j) {
    if (std::abs(v(j)) > std::abs(v(arg))) arg = j;
  }
  if (v(arg) < 0.0) v = -v;
}

void check_k(std::size_t k, std::size_t n) {
  if (k < 1 || k > n) {
    throw UsageError("component index " + std::to_string(k) + " outside 1.." + std::to_string(n));
  }
}

}  // namespace

SpectralSummary::SpectralSummary(Date window_end_date, Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenvectors)
    : end_date_(window_end_date),
      eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      total_variance_(eigenvalues_.sum()) {
  if (eigenvectors_.rows() != eigenvalues_.size() || eigenvectors_.cols() != eigenvalues_.size()) {
    throw ConsistencyError("eigenvector matrix does not match the eigenvalue count");
  }
}

bool SpectralSummary::degenerate(std::size_t k) const {
  check_k(k, size());
  const auto i = static_cast<Eigen::Index>(k - 1);
  const bool below = i + 1 < eigenvalues_.size() && std::abs(eigenvalues_(i) - eigenvalues_(i + 1)) < kDegenerateGap;
  const bool above = i > 0 && std::abs(eigenvalues_(i - 1) - eigenvalues_(i)) < kDegenerateGap;
  return below || above;
}

SpectralSummary decompose(const CorrelationMatrix& c) {
  const std::string where = " for window ending " + format_date(c.window_end_date());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c.values(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw ConsistencyError("eigensolver did not converge" + where);

  const Eigen::Index n = c.values().rows();
  Eigen::MatrixXd vectors = solver.eigenvectors();
  for (Eigen::Index k = 0; k < n; ++k) orient(vectors.col(k));
  const Eigen::VectorXd& values = solver.eigenvalues();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (values(a) != values(b)) return values(a) > values(b);
    const auto va = vectors.col(a);
    const auto vb = vectors.col(b);
    return std::lexicographical_compare(va.begin(), va.end(), vb.begin(), vb.end());
  });

  Eigen::VectorXd sorted_values(n);
  Eigen::MatrixXd sorted_vectors(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    sorted_values(k) = values(order[static_cast<std::size_t>(k)]);
    sorted_vectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }

  const double dim = static_cast<double>(n);
  if (!(std::abs(sorted_values.sum() - dim) <= 1e-8 * dim)) {
    throw ConsistencyError("eigenvalue sum " + std::to_string(sorted_values.sum()) + " differs from N = " +
                           std::to_string(n) + where);
  }
  if (n > 0 && !(sorted_values(n - 1) >= -1e-8 * dim)) {
    throw ConsistencyError("matrix is not positive semi-definite (smallest eigenvalue " +
                           std::to_string(sorted_values(n - 1)) + ")" + where);
  }
  return SpectralSummary(c.window_end_date(), std::move(sorted_values), std::move(sorted_vectors));
}

double reconstruction_error(const SpectralSummary& s, const CorrelationMatrix& c) {
  const auto& v = s.eigenvectors();
  const Eigen::MatrixXd rebuilt = v * s.eigenvalues().asDiagonal() * v.transpose();
  return (rebuilt - c.values()).cwiseAbs().maxCoeff();
}

double crf(const SpectralSummary& s, std::size_t k) {
  check_k(k, s.size());
  return s.eigenvalues().head(static_cast<Eigen::Index>(k)).sum() / s.total_variance();
}

double ipr(const Eigen::Ref<const Eigen::VectorXd>& v) { return v.array().square().square().sum(); }

double ipr(const SpectralSummary& s, std::size_t k) {
  check_k(k, s.size());
  return ipr(s.eigenvectors().col(static_cast<Eigen::Index>(k - 1)));
}

std::vector<double> first_difference(std::span<const double> x) {
  if (x.size() < 2) throw UsageError("a change series needs at least 2 values");
  std::vector<double> out(x.size() - 1);
  for (std::size_t t = 0; t + 1 < x.size(); ++t) out[t] = x[t + 1] - x[t];
  return out;
}

IndicatorSeries first_difference(const IndicatorSeries& series) {
  if (series.dates.size() != series.values.size()) throw UsageError("series dates and values differ in length");
  IndicatorSeries out;
  out.values = first_difference(std::span<const double>(series.values));
  out.dates.assign(series.dates.begin() + 1, series.dates.end());
  return out;
}

}  // namespace mktcorr
