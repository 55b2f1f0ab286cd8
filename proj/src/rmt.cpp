#include "mktcorr/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mktcorr/errors.hpp"

namespace mktcorr {

MpParams mp_params_from_q(double q) {
  if (!(q > 1.0) || !std::isfinite(q)) {
    throw UsageError("Marchenko-Pastur density form requires Q = T/N > 1 (got Q = " + std::to_string(q) +
                     "); use a window longer than the number of assets");
  }
  const double inv = 1.0 / q;
  const double spread = 2.0 * std::sqrt(inv);
  return {q, 1.0 + inv - spread, 1.0 + inv + spread};
}

MpParams mp_params(std::size_t n_assets, std::size_t window_length) {
  if (n_assets == 0) throw UsageError("Marchenko-Pastur bounds need at least one asset");
  if (window_length <= n_assets) {
    throw UsageError("Marchenko-Pastur density form requires Q = T/N > 1, but window length " +
                     std::to_string(window_length) + " does not exceed asset count " + std::to_string(n_assets));
  }
  return mp_params_from_q(static_cast<double>(window_length) / static_cast<double>(n_assets));
}

double mp_density(const MpParams& params, double lambda) {
  if (!(lambda > params.lambda_minus && lambda < params.lambda_plus)) return 0.0;
  const double root = std::sqrt((params.lambda_plus - lambda) * (lambda - params.lambda_minus));
  return params.q / (2.0 * std::numbers::pi) * root / lambda;
}

EigenHistogram eigen_histogram(std::span<const double> eigenvalues, std::size_t bins,
                               std::optional<std::pair<double, double>> range) {
  if (eigenvalues.empty()) throw UsageError("histogram needs at least one eigenvalue");
  if (bins < 1) throw UsageError("histogram needs at least one bin");
  const auto [lo, hi] = range.value_or(std::pair{0.0, *std::max_element(eigenvalues.begin(), eigenvalues.end())});
  if (!(hi > lo)) {
    throw UsageError("degenerate histogram range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }

  EigenHistogram h;
  h.bin_edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b) h.bin_edges[b] = lo + width * static_cast<double>(b);
  h.bin_edges[bins] = hi;

  std::vector<std::size_t> counts(bins, 0);
  for (double x : eigenvalues) {
    if (!(x >= lo && x <= hi)) continue;
    // upper_bound: index of the first edge strictly greater than x, so x on an edge lands in the upper bin.
    auto it = std::upper_bound(h.bin_edges.begin(), h.bin_edges.end(), x);
    std::size_t b = static_cast<std::size_t>(it - h.bin_edges.begin());
    b = std::min(b, bins) - 1;
    ++counts[b];
    ++h.count;
  }
  if (h.count == 0) throw UsageError("no eigenvalues fall inside the histogram range");

  h.densities.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    h.densities[b] = static_cast<double>(counts[b]) / (static_cast<double>(h.count) * h.bin_width(b));
  }
  return h;
}

BoundCounts count_outside_bounds(std::span<const double> eigenvalues, const MpParams& params) {
  BoundCounts out;
  for (double x : eigenvalues) {
    if (x < params.lambda_minus) ++out.below;
    if (x > params.lambda_plus) ++out.above;
  }
  return out;
}

}  // namespace mktcorr
