#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace mktcorr {

/// Marchenko-Pastur parameters for an N-asset, T-row window: Q = T/N and the support [lambda-, lambda+].
struct MpParams {
  double q;
  double lambda_minus;
  double lambda_plus;
};

/// lambda± = 1 + 1/Q ± 2 sqrt(1/Q). Throws UsageError unless window_length > n_assets.
MpParams mp_params(std::size_t n_assets, std::size_t window_length);

/// Same bounds from Q directly; Q must exceed 1.
MpParams mp_params_from_q(double q);

/// (Q / 2 pi) sqrt((lambda+ - x)(x - lambda-)) / x inside the support, 0 elsewhere (including the endpoints).
double mp_density(const MpParams& params, double lambda);

struct EigenHistogram {
  std::vector<double> bin_edges;  ///< bins + 1 strictly increasing edges
  std::vector<double> densities;  ///< count / (binned total * width)
  std::size_t count = 0;          ///< eigenvalues that fell inside the range

  double bin_center(std::size_t b) const { return 0.5 * (bin_edges[b] + bin_edges[b + 1]); }
  double bin_width(std::size_t b) const { return bin_edges[b + 1] - bin_edges[b]; }
};

/**
 * Density-normalized histogram over [lo, hi] (default [0, max eigenvalue]).
 * A value on an interior edge goes to the upper bin; the final edge belongs
 * to the last bin. Values outside the range are not counted.
 */
EigenHistogram eigen_histogram(std::span<const double> eigenvalues, std::size_t bins,
                               std::optional<std::pair<double, double>> range = std::nullopt);

struct BoundCounts {
  std::size_t below = 0;  ///< strictly below lambda-
  std::size_t above = 0;  ///< strictly above lambda+

  bool operator==(const BoundCounts&) const = default;
};

BoundCounts count_outside_bounds(std::span<const double> eigenvalues, const MpParams& params);

}  // namespace mktcorr
