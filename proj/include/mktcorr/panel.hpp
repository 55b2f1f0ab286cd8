#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mktcorr/date.hpp"

namespace mktcorr {

using AssetList = std::shared_ptr<const std::vector<std::string>>;

/**
 * Aligned date x asset matrix of closing prices.
 *
 * Rows are trading dates (strictly increasing), columns are assets (unique
 * identifiers). Every cell is populated and strictly positive; the
 * constructor enforces this and throws DataError otherwise.
 */
class PricePanel {
 public:
  PricePanel(std::vector<Date> dates, std::vector<std::string> assets, Eigen::MatrixXd prices);

  const std::vector<Date>& dates() const noexcept { return dates_; }
  const std::vector<std::string>& assets() const noexcept { return *assets_; }
  const AssetList& asset_list() const noexcept { return assets_; }
  const Eigen::MatrixXd& prices() const noexcept { return prices_; }

  std::size_t rows() const noexcept { return dates_.size(); }
  std::size_t cols() const noexcept { return assets_->size(); }

  bool operator==(const PricePanel& other) const;

 private:
  std::vector<Date> dates_;
  AssetList assets_;
  Eigen::MatrixXd prices_;
};

/**
 * Date x asset matrix of log returns. Row t is dated by the later of the two
 * prices it differences. Values are finite but otherwise unconstrained.
 */
class ReturnPanel {
 public:
  ReturnPanel(std::vector<Date> dates, AssetList assets, Eigen::MatrixXd returns);
  ReturnPanel(std::vector<Date> dates, std::vector<std::string> assets, Eigen::MatrixXd returns);

  const std::vector<Date>& dates() const noexcept { return dates_; }
  const std::vector<std::string>& assets() const noexcept { return *assets_; }
  const AssetList& asset_list() const noexcept { return assets_; }
  const Eigen::MatrixXd& returns() const noexcept { return returns_; }

  std::size_t rows() const noexcept { return dates_.size(); }
  std::size_t cols() const noexcept { return assets_->size(); }

  /// Copy with the given column indices removed (order of the rest preserved).
  ReturnPanel without_assets(std::span<const std::size_t> drop) const;

  bool operator==(const ReturnPanel& other) const;

 private:
  std::vector<Date> dates_;
  AssetList assets_;
  Eigen::MatrixXd returns_;
};

enum class InputFormat { Auto, Long, Wide };

struct PriceRecord {
  Date date;
  std::string asset;
  double close;
};

struct DroppedAsset {
  std::string asset;
  std::size_t missing_count;

  bool operator==(const DroppedAsset&) const = default;
};

struct IngestOptions {
  /// Assets missing more than this fraction of the union of dates are dropped.
  double max_missing_fraction = 0.0;
};

struct IngestResult {
  PricePanel panel;
  std::vector<DroppedAsset> dropped;
};

/**
 * Assembles price records into an aligned panel.
 *
 * Assets are ordered by identifier, so the result does not depend on record
 * order. After dropping assets that miss too many dates, the retained dates
 * are those present for every retained asset. Repeated (date, asset) records
 * are accepted only if they carry the same close.
 */
IngestResult ingest_prices(std::span<const PriceRecord> records, const IngestOptions& options = {});

/// r[t][i] = ln p[t+1][i] - ln p[t][i]; output has one row fewer than the input.
ReturnPanel log_returns(const PricePanel& panel);

/// Inverse of log_returns given the first row of prices.
PricePanel prices_from_returns(const ReturnPanel& returns, const Date& first_date,
                               const Eigen::RowVectorXd& first_prices);

/// Where the mean and standard deviation used to standardize a window come from.
enum class MomentScope {
  Window,      ///< moments over exactly the window rows
  FullSeries,  ///< moments over every row of the panel
};

/**
 * Standardizes `length` rows starting at `start`: each column becomes
 * (r - mean) / std using population moments. Throws ZeroVarianceError naming
 * the first asset whose returns are constant over the moment range.
 */
Eigen::MatrixXd normalize_window(const ReturnPanel& returns, std::size_t start, std::size_t length,
                                 MomentScope scope = MomentScope::Window);

/// Indices of assets that are constant over at least one window of the given geometry.
std::vector<std::size_t> zero_variance_assets(const ReturnPanel& returns, std::size_t window_length,
                                              std::size_t stride);

}  // namespace mktcorr
