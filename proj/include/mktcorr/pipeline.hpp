#pragma once

#include "json.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mktcorr/corr.hpp"
#include "mktcorr/panel.hpp"
#include "mktcorr/rmt.hpp"

namespace mktcorr {

enum class ZeroVariancePolicy { Abort, Drop };

/// Which window feeds the eigenvalue histogram and the IPR-vs-eigenvalue table.
struct RmtSelector {
  enum class Mode { Last, Date, Pool };
  Mode mode = Mode::Last;
  Date date{};

  /// "last", "pool" or an ISO date.
  static RmtSelector parse(const std::string& text);
  std::string to_string() const;
};

struct RunConfig {
  std::filesystem::path input;
  InputFormat input_format = InputFormat::Auto;
  double missing_threshold = 0.0;
  RollingSpec rolling;
  std::vector<std::size_t> crf_k{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::size_t> ipr_k{1};
  std::size_t bins = 50;
  RmtSelector rmt_window;
  std::filesystem::path out_dir = "out";
  ZeroVariancePolicy zero_variance = ZeroVariancePolicy::Abort;
  unsigned workers = 1;
  bool dump_matrices = false;

  /// Throws UsageError on an invalid field.
  void validate() const;
};

/// Overlays the fields present in `j` onto `base`. Unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

InputFormat parse_input_format(const std::string& text);
ZeroVariancePolicy parse_zero_variance_policy(const std::string& text);

struct RunReport {
  std::size_t window_count = 0;
  std::size_t n_assets = 0;
  std::size_t n_return_rows = 0;
  std::vector<DroppedAsset> dropped_missing;
  std::vector<std::string> dropped_zero_variance;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

/// Per-window quantities retained by the rolling pipeline.
struct WindowResult {
  Date end_date;
  double mean_offdiagonal = 0.0;
  double mean_negative_offdiagonal = 0.0;
  std::vector<double> crf;   ///< one per configured k
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd ipr;       ///< IPR of every eigenvector, in eigenvalue order
};

/// Applies the zero-variance policy; returns the panel to analyze and the names removed.
ReturnPanel screen_zero_variance(const ReturnPanel& returns, const RollingSpec& spec, ZeroVariancePolicy policy,
                                 std::vector<std::string>& removed);

/// Correlation, spectrum, CRF and IPR for every window of an already-screened panel.
std::vector<WindowResult> rolling_windows(const ReturnPanel& returns, const RunConfig& config);

struct RmtComparison {
  std::string window_label;  ///< end date of the selected window, or "pool"
  std::vector<double> eigenvalues;
  EigenHistogram histogram;
  std::optional<MpParams> params;  ///< absent when the window is not longer than the asset count
  BoundCounts outside;
};

RmtComparison compare_to_mp(std::vector<double> eigenvalues, std::string label, std::size_t n_assets,
                            std::size_t window_length, std::size_t bins);

/// Writes eigen_histogram.csv and mp_bounds.json.
void write_rmt_outputs(const std::filesystem::path& dir, const RmtComparison& cmp);

/// Full analysis of an in-memory return panel, writing every output file into config.out_dir.
RunReport analyze_panel(const ReturnPanel& returns, const RunConfig& config,
                        std::vector<DroppedAsset> dropped_missing = {});

/// Ingests config.input, then analyze_panel.
RunReport run_pipeline(const RunConfig& config);

/// Reads and aligns config.input into a return panel, recording dropped assets.
ReturnPanel load_returns(const RunConfig& config, std::vector<DroppedAsset>& dropped);

/// Histogram and MP bounds only, for the selected window or the pooled windows.
RunReport rmt_compare(const ReturnPanel& returns, const RunConfig& config,
                      std::vector<DroppedAsset> dropped_missing = {});

}  // namespace mktcorr
