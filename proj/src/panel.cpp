#include "mktcorr/panel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "mktcorr/errors.hpp"

namespace mktcorr {

namespace {

void check_dates(const std::vector<Date>& dates) {
  for (std::size_t t = 1; t < dates.size(); ++t) {
    if (!(dates[t - 1] < dates[t])) {
      throw DataError("dates must be strictly increasing (" + format_date(dates[t - 1]) + " then " +
                      format_date(dates[t]) + ")");
    }
  }
}

void check_assets(const std::vector<std::string>& assets) {
  std::set<std::string> seen;
  for (const auto& a : assets) {
    if (!seen.insert(a).second) throw DataError("duplicate asset identifier '" + a + "'");
  }
}

void check_shape(const Eigen::MatrixXd& m, std::size_t rows, std::size_t cols) {
  if (static_cast<std::size_t>(m.rows()) != rows || static_cast<std::size_t>(m.cols()) != cols) {
    throw DataError("panel matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                    " but has " + std::to_string(rows) + " dates and " + std::to_string(cols) + " assets");
  }
}

// Constant columns leave rounding residue after centering, so "zero" is relative to magnitude.
bool degenerate_spread(double stddev, double max_abs) { return stddev <= 1e-12 * max_abs || stddev == 0.0; }

}  // namespace

PricePanel::PricePanel(std::vector<Date> dates, std::vector<std::string> assets, Eigen::MatrixXd prices)
    : dates_(std::move(dates)),
      assets_(std::make_shared<const std::vector<std::string>>(std::move(assets))),
      prices_(std::move(prices)) {
  check_dates(dates_);
  check_assets(*assets_);
  check_shape(prices_, dates_.size(), assets_->size());
  for (Eigen::Index j = 0; j < prices_.cols(); ++j) {
    for (Eigen::Index t = 0; t < prices_.rows(); ++t) {
      const double p = prices_(t, j);
      if (!std::isfinite(p) || p <= 0.0) {
        throw DataError("non-positive price " + std::to_string(p) + " for asset '" + (*assets_)[j] +
                        "' on " + format_date(dates_[t]));
      }
    }
  }
}

bool PricePanel::operator==(const PricePanel& other) const {
  return dates_ == other.dates_ && *assets_ == *other.assets_ && prices_ == other.prices_;
}

ReturnPanel::ReturnPanel(std::vector<Date> dates, AssetList assets, Eigen::MatrixXd returns)
    : dates_(std::move(dates)), assets_(std::move(assets)), returns_(std::move(returns)) {
  if (!assets_) throw DataError("return panel requires an asset list");
  check_dates(dates_);
  check_assets(*assets_);
  check_shape(returns_, dates_.size(), assets_->size());
  if (!returns_.allFinite()) throw DataError("return panel contains non-finite values");
}

ReturnPanel::ReturnPanel(std::vector<Date> dates, std::vector<std::string> assets, Eigen::MatrixXd returns)
    : ReturnPanel(std::move(dates), std::make_shared<const std::vector<std::string>>(std::move(assets)),
                  std::move(returns)) {}

ReturnPanel ReturnPanel::without_assets(std::span<const std::size_t> drop) const {
  std::set<std::size_t> removed(drop.begin(), drop.end());
  std::vector<std::string> kept_names;
  std::vector<Eigen::Index> kept;
  for (std::size_t j = 0; j < cols(); ++j) {
    if (!removed.contains(j)) {
      kept.push_back(static_cast<Eigen::Index>(j));
      kept_names.push_back((*assets_)[j]);
    }
  }
  Eigen::MatrixXd m(returns_.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) m.col(static_cast<Eigen::Index>(c)) = returns_.col(kept[c]);
  return ReturnPanel(dates_, std::move(kept_names), std::move(m));
}

bool ReturnPanel::operator==(const ReturnPanel& other) const {
  return dates_ == other.dates_ && *assets_ == *other.assets_ && returns_ == other.returns_;
}

IngestResult ingest_prices(std::span<const PriceRecord> records, const IngestOptions& options) {
  if (records.empty()) throw DataError("no price records in input");
  if (!(options.max_missing_fraction >= 0.0 && options.max_missing_fraction <= 1.0)) {
    throw UsageError("missing-date threshold must lie in [0, 1]");
  }

  // asset -> (date -> close); std::map gives record-order independence.
  std::map<std::string, std::map<Date, double>> series;
  std::set<Date> all_dates;
  for (const auto& rec : records) {
    if (!std::isfinite(rec.close) || rec.close <= 0.0) {
      throw DataError("non-positive price " + std::to_string(rec.close) + " for asset '" + rec.asset + "' on " +
                      format_date(rec.date));
    }
    auto [it, inserted] = series[rec.asset].emplace(rec.date, rec.close);
    if (!inserted && it->second != rec.close) {
      throw DataError("conflicting duplicate records for asset '" + rec.asset + "' on " + format_date(rec.date));
    }
    all_dates.insert(rec.date);
  }

  const double total = static_cast<double>(all_dates.size());
  std::vector<DroppedAsset> dropped;
  std::vector<const std::string*> kept;
  for (const auto& [asset, by_date] : series) {
    const std::size_t missing = all_dates.size() - by_date.size();
    if (static_cast<double>(missing) / total > options.max_missing_fraction) {
      dropped.push_back({asset, missing});
    } else {
      kept.push_back(&asset);
    }
  }

  std::vector<Date> dates;
  for (const auto& d : all_dates) {
    const bool everywhere =
        std::all_of(kept.begin(), kept.end(), [&](const std::string* a) { return series[*a].contains(d); });
    if (everywhere) dates.push_back(d);
  }
  if (kept.size() < 2 || dates.size() < 2) {
    throw DataError("after alignment only " + std::to_string(dates.size()) + " dates and " +
                    std::to_string(kept.size()) + " assets remain; need at least 2 of each");
  }

  Eigen::MatrixXd prices(static_cast<Eigen::Index>(dates.size()), static_cast<Eigen::Index>(kept.size()));
  std::vector<std::string> names;
  for (std::size_t j = 0; j < kept.size(); ++j) {
    const auto& by_date = series[*kept[j]];
    for (std::size_t t = 0; t < dates.size(); ++t) {
      prices(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = by_date.at(dates[t]);
    }
    names.push_back(*kept[j]);
  }
  return {PricePanel(std::move(dates), std::move(names), std::move(prices)), std::move(dropped)};
}

ReturnPanel log_returns(const PricePanel& panel) {
  if (panel.rows() < 2) throw DataError("log returns need at least 2 dates");
  const Eigen::MatrixXd logp = panel.prices().array().log().matrix();
  const Eigen::Index n = logp.rows() - 1;
  Eigen::MatrixXd r = logp.bottomRows(n) - logp.topRows(n);
  std::vector<Date> dates(panel.dates().begin() + 1, panel.dates().end());
  return ReturnPanel(std::move(dates), panel.asset_list(), std::move(r));
}

PricePanel prices_from_returns(const ReturnPanel& returns, const Date& first_date,
                               const Eigen::RowVectorXd& first_prices) {
  if (static_cast<std::size_t>(first_prices.size()) != returns.cols()) {
    throw UsageError("initial price row does not match the asset count");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(returns.rows()) + 1;
  Eigen::MatrixXd logp(rows, first_prices.size());
  logp.row(0) = first_prices.array().log().matrix();
  for (Eigen::Index t = 1; t < rows; ++t) logp.row(t) = logp.row(t - 1) + returns.returns().row(t - 1);
  std::vector<Date> dates;
  dates.reserve(static_cast<std::size_t>(rows));
  dates.push_back(first_date);
  dates.insert(dates.end(), returns.dates().begin(), returns.dates().end());
  return PricePanel(std::move(dates), returns.assets(), logp.array().exp().matrix());
}

Eigen::MatrixXd normalize_window(const ReturnPanel& returns, std::size_t start, std::size_t length,
                                 MomentScope scope) {
  if (length < 2) throw UsageError("normalization window needs at least 2 rows");
  if (start + length > returns.rows()) {
    throw DataError("window [" + std::to_string(start) + ", " + std::to_string(start + length) +
                    ") exceeds the " + std::to_string(returns.rows()) + " available return rows");
  }
  const auto& r = returns.returns();
  const auto window = r.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(length));
  const auto moments_rows = scope == MomentScope::Window
                                ? window
                                : r.middleRows(0, r.rows());

  const Eigen::RowVectorXd mean = moments_rows.colwise().mean();
  const Eigen::MatrixXd centered = moments_rows.rowwise() - mean;
  const Eigen::RowVectorXd stddev =
      (centered.colwise().squaredNorm() / static_cast<double>(moments_rows.rows())).cwiseSqrt();
  const Eigen::RowVectorXd max_abs = moments_rows.cwiseAbs().colwise().maxCoeff();

  for (Eigen::Index j = 0; j < stddev.size(); ++j) {
    if (degenerate_spread(stddev(j), max_abs(j))) {
      const auto& asset = returns.assets()[static_cast<std::size_t>(j)];
      throw ZeroVarianceError(asset, start,
                              "asset '" + asset + "' has zero return variance in the window starting at row " +
                                  std::to_string(start) + " (ending " +
                                  format_date(returns.dates()[start + length - 1]) + ")");
    }
  }
  Eigen::MatrixXd out = window.rowwise() - mean;
  out.array().rowwise() /= stddev.array();
  return out;
}

std::vector<std::size_t> zero_variance_assets(const ReturnPanel& returns, std::size_t window_length,
                                              std::size_t stride) {
  std::vector<std::size_t> flagged;
  if (window_length < 2 || stride < 1 || returns.rows() < window_length) return flagged;
  const auto& r = returns.returns();
  const auto len = static_cast<Eigen::Index>(window_length);
  for (Eigen::Index j = 0; j < r.cols(); ++j) {
    for (std::size_t start = 0; start + window_length <= returns.rows(); start += stride) {
      const auto col = r.col(j).segment(static_cast<Eigen::Index>(start), len);
      const double mean = col.mean();
      const double sd = std::sqrt((col.array() - mean).square().sum() / static_cast<double>(len));
      if (degenerate_spread(sd, col.cwiseAbs().maxCoeff())) {
        flagged.push_back(static_cast<std::size_t>(j));
        break;
      }
    }
  }
  return flagged;
}

}  // namespace mktcorr
