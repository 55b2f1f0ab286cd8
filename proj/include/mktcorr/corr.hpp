#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "mktcorr/date.hpp"
#include "mktcorr/panel.hpp"
#include "mktcorr/parallel.hpp"

namespace mktcorr {

/// Rolling-window geometry in return rows.
struct RollingSpec {
  std::size_t window_length = 400;
  std::size_t stride = 1;

  /// Throws UsageError unless window_length >= 2 and stride >= 1.
  void validate() const;
};

/// Number of window positions 0, stride, 2*stride, ... that fit in `rows`; 0 if none.
std::size_t window_count(std::size_t rows, const RollingSpec& spec);

/**
 * Equal-time correlation matrix of one window, labeled with the window's last date.
 *
 * Construction checks symmetry (1e-12), unit diagonal (1e-10) and the
 * [-1, 1] bound (1e-10 slack) and throws ConsistencyError on violation.
 * Values are never clamped. Positive semi-definiteness is checked by
 * decompose(), which already has the spectrum.
 */
class CorrelationMatrix {
 public:
  CorrelationMatrix(Date window_end_date, AssetList assets, Eigen::MatrixXd values);

  const Date& window_end_date() const noexcept { return end_date_; }
  const std::vector<std::string>& assets() const noexcept { return *assets_; }
  const AssetList& asset_list() const noexcept { return assets_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.rows()); }

 private:
  Date end_date_;
  AssetList assets_;
  Eigen::MatrixXd values_;
};

/// Window average of m_i(t) m_j(t) over normalized returns of rows [start, start + window_length).
CorrelationMatrix correlation_matrix(const ReturnPanel& returns, std::size_t start, const RollingSpec& spec);

/// One matrix per window position. Memory grows as windows x N^2; prefer map_windows for large panels.
std::vector<CorrelationMatrix> rolling_correlations(const ReturnPanel& returns, const RollingSpec& spec,
                                                    unsigned workers = 1);

/**
 * Builds each window's correlation matrix and passes it to fn, returning the
 * results in window order. Windows run on up to `workers` threads.
 */
template <class Fn>
auto map_windows(const ReturnPanel& returns, const RollingSpec& spec, unsigned workers, Fn fn) {
  spec.validate();
  const std::size_t count = window_count(returns.rows(), spec);
  return parallel_map(count, workers, [&](std::size_t w) {
    return fn(w, correlation_matrix(returns, w * spec.stride, spec));
  });
}

/// 2 / (N(N-1)) times the sum of the strictly lower triangle.
double mean_offdiagonal(const Eigen::MatrixXd& c);
double mean_offdiagonal(const CorrelationMatrix& c);

/// Sum of negative lower-triangle elements over the total pair count N(N-1)/2 (not the negative count).
double mean_negative_offdiagonal(const Eigen::MatrixXd& c);
double mean_negative_offdiagonal(const CorrelationMatrix& c);

}  // namespace mktcorr
