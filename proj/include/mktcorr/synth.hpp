#pragma once

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mktcorr/panel.hpp"

namespace mktcorr {

/**
 * Standard normal variates from a seeded mt19937_64 via the Box-Muller
 * transform. Each pair of 64-bit draws yields exactly two variates, so the
 * stream is a fixed function of the seed on every platform.
 */
class NormalGenerator {
 public:
  explicit NormalGenerator(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Piecewise-constant coupling regime of a one-factor model.
struct FactorSegment {
  std::size_t length = 0;
  double beta_mean = 0.0;
  double beta_spread = 0.0;
  double idio_sigma = 1.0;
};

struct FactorScenario {
  std::size_t n_assets = 0;
  std::size_t n_days = 0;
  std::vector<FactorSegment> segments;
  std::uint64_t seed = 0;

  /// Throws UsageError if segment lengths do not sum to n_days, idio_sigma <= 0 or beta_mean < 0.
  void validate() const;
};

FactorScenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const FactorScenario& s);

/// Synthetic trading calendar used for generated panels: weekdays from 2000-01-03.
std::vector<Date> synthetic_dates(std::size_t n_days);

/// Identifiers S000, S001, ... (at least three digits).
std::vector<std::string> synthetic_asset_names(std::size_t n_assets);

/// n_days x n_assets i.i.d. standard normal returns, filled row by row.
ReturnPanel generate_iid_panel(std::size_t n_assets, std::size_t n_days, std::uint64_t seed);

/**
 * r_i(t) = beta_i(t) f(t) + idio_sigma * eps_i(t) with f, eps i.i.d. N(0, 1).
 * At the start of each segment every asset draws a beta uniformly from
 * [beta_mean - beta_spread, beta_mean + beta_spread], held for the segment.
 */
ReturnPanel generate_factor_panel(const FactorScenario& scenario);

/// Prices starting at 100 whose log returns are `returns`, with an extra leading date one weekday earlier.
PricePanel synthetic_prices(const ReturnPanel& returns);

}  // namespace mktcorr
