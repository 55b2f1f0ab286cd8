#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "mktcorr/corr.hpp"
#include "mktcorr/date.hpp"

namespace mktcorr {

/**
 * Eigendecomposition of one correlation matrix.
 *
 * Eigenvalues are sorted descending; ties are broken by comparing the
 * (sign-normalized) eigenvectors lexicographically so repeated runs agree
 * bit for bit. Each eigenvector is oriented so its largest-magnitude
 * component is positive (first such index on ties). Column k of
 * eigenvectors() pairs with eigenvalues()(k).
 */
class SpectralSummary {
 public:
  SpectralSummary(Date window_end_date, Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenvectors);

  const Date& window_end_date() const noexcept { return end_date_; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const noexcept { return eigenvectors_; }
  /// Omega: the sum of all eigenvalues.
  double total_variance() const noexcept { return total_variance_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues_.size()); }

  /// True when eigenvalue k (1-based) is within 1e-10 of a neighbour; its eigenvector is then basis-dependent.
  bool degenerate(std::size_t k) const;

 private:
  Date end_date_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  double total_variance_;
};

/// Gap below which adjacent eigenvalues are treated as degenerate.
inline constexpr double kDegenerateGap = 1e-10;

/**
 * Symmetric eigendecomposition with ordering and sign conventions applied.
 * Throws ConsistencyError if the solver fails to converge, the trace differs
 * from N by more than 1e-8 N, or an eigenvalue is below -1e-8 N.
 */
SpectralSummary decompose(const CorrelationMatrix& c);

/// Largest absolute entry of (sum_k lambda_k v_k v_k^T) - c.
double reconstruction_error(const SpectralSummary& s, const CorrelationMatrix& c);

/// Cumulative risk fraction g_k = (lambda_1 + ... + lambda_k) / Omega, k is 1-based.
double crf(const SpectralSummary& s, std::size_t k);

/// Inverse participation ratio of eigenvector k (1-based): sum_j v_j^4.
double ipr(const SpectralSummary& s, std::size_t k);

/// IPR of an arbitrary vector; equals the eigenvector IPR when v has unit norm.
double ipr(const Eigen::Ref<const Eigen::VectorXd>& v);

/// A dated scalar indicator, one value per window.
struct IndicatorSeries {
  std::vector<Date> dates;
  std::vector<double> values;
};

/// out[t] = x[t+1] - x[t]. Needs at least 2 values.
std::vector<double> first_difference(std::span<const double> x);

/// Differenced series dated by the later window (the date the change becomes observable).
IndicatorSeries first_difference(const IndicatorSeries& series);

/// change_k(t) = g_k(t+1) - g_k(t).
inline IndicatorSeries crf_change(const IndicatorSeries& g) { return first_difference(g); }

/// Same differencing contract as crf_change, applied to an IPR series.
inline IndicatorSeries ipr_change(const IndicatorSeries& ipr_series) { return first_difference(ipr_series); }

}  // namespace mktcorr
