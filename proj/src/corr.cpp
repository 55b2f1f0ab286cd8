#include "mktcorr/corr.hpp"

#include <cmath>
#include <string>

#include "mktcorr/errors.hpp"

namespace mktcorr {

void RollingSpec::validate() const {
  if (window_length < 2) throw UsageError("window length must be at least 2 (got " + std::to_string(window_length) + ")");
  if (stride < 1) throw UsageError("stride must be at least 1");
}

std::size_t window_count(std::size_t rows, const RollingSpec& spec) {
  if (rows < spec.window_length || spec.stride == 0) return 0;
  return (rows - spec.window_length) / spec.stride + 1;
}

CorrelationMatrix::CorrelationMatrix(Date window_end_date, AssetList assets, Eigen::MatrixXd values)
    : end_date_(window_end_date), assets_(std::move(assets)), values_(std::move(values)) {
  const std::string where = " in correlation matrix ending " + format_date(end_date_);
  if (!assets_ || values_.rows() != values_.cols() || static_cast<std::size_t>(values_.rows()) != assets_->size()) {
    throw ConsistencyError("shape mismatch" + where);
  }
  const Eigen::Index n = values_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(std::abs(values_(i, i) - 1.0) < 1e-10)) {
      throw ConsistencyError("diagonal element " + std::to_string(i) + " is " + std::to_string(values_(i, i)) + where);
    }
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = values_(i, j);
      if (!(std::abs(v - values_(j, i)) < 1e-12)) {
        throw ConsistencyError("asymmetric element (" + std::to_string(i) + "," + std::to_string(j) + ")" + where);
      }
      if (!(v >= -1.0 - 1e-10 && v <= 1.0 + 1e-10)) {
        throw ConsistencyError("element (" + std::to_string(i) + "," + std::to_string(j) + ") = " +
                               std::to_string(v) + " outside [-1, 1]" + where);
      }
    }
  }
}

CorrelationMatrix correlation_matrix(const ReturnPanel& returns, std::size_t start, const RollingSpec& spec) {
  spec.validate();
  if (start + spec.window_length > returns.rows()) {
    throw DataError("window length " + std::to_string(spec.window_length) + " starting at row " +
                    std::to_string(start) + " exceeds the " + std::to_string(returns.rows()) +
                    " available return rows");
  }
  const Eigen::MatrixXd m = normalize_window(returns, start, spec.window_length);
  const Eigen::Index n = m.cols();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  c.selfadjointView<Eigen::Lower>().rankUpdate(m.transpose(), 1.0 / static_cast<double>(spec.window_length));
  c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
  return CorrelationMatrix(returns.dates()[start + spec.window_length - 1], returns.asset_list(), std::move(c));
}

std::vector<CorrelationMatrix> rolling_correlations(const ReturnPanel& returns, const RollingSpec& spec,
                                                    unsigned workers) {
  spec.validate();
  if (returns.rows() < spec.window_length) {
    throw DataError("window length " + std::to_string(spec.window_length) + " exceeds the " +
                    std::to_string(returns.rows()) + " available return rows");
  }
  return map_windows(returns, spec, workers, [](std::size_t, CorrelationMatrix c) { return c; });
}

double mean_offdiagonal(const Eigen::MatrixXd& c) {
  const Eigen::Index n = c.rows();
  if (n < 2) throw UsageError("off-diagonal mean needs at least 2 assets");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) sum += c(i, j);
  }
  return 2.0 * sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double mean_offdiagonal(const CorrelationMatrix& c) { return mean_offdiagonal(c.values()); }

double mean_negative_offdiagonal(const Eigen::MatrixXd& c) {
  const Eigen::Index n = c.rows();
  if (n < 2) throw UsageError("off-diagonal mean needs at least 2 assets");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      if (c(i, j) < 0.0) sum += c(i, j);
    }
  }
  return 2.0 * sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double mean_negative_offdiagonal(const CorrelationMatrix& c) { return mean_negative_offdiagonal(c.values()); }

}  // namespace mktcorr
