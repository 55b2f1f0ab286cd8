#include "mktcorr/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

#include "mktcorr/csv_io.hpp"
#include "mktcorr/errors.hpp"
#include "mktcorr/spectral.hpp"

namespace mktcorr {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void check_ks(const std::vector<std::size_t>& ks, std::size_t n, const char* what) {
  for (auto k : ks) {
    if (k > n) {
      throw DataError(std::string(what) + " component " + std::to_string(k) + " exceeds the " + std::to_string(n) +
                      " assets in the panel");
    }
  }
}

unsigned resolve_workers(unsigned workers) {
  if (workers != 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

void require_windows(const ReturnPanel& returns, const RollingSpec& spec) {
  if (returns.rows() < spec.window_length) {
    throw DataError("window length " + std::to_string(spec.window_length) + " exceeds the " +
                    std::to_string(returns.rows()) + " available return rows");
  }
}

std::vector<Date> window_end_dates(const ReturnPanel& returns, const RollingSpec& spec) {
  std::vector<Date> ends;
  const std::size_t count = window_count(returns.rows(), spec);
  for (std::size_t w = 0; w < count; ++w) ends.push_back(returns.dates()[w * spec.stride + spec.window_length - 1]);
  return ends;
}

std::size_t find_window(const std::vector<Date>& ends, const Date& date) {
  const auto it = std::lower_bound(ends.begin(), ends.end(), date);
  if (it != ends.end() && *it == date) return static_cast<std::size_t>(it - ends.begin());
  const auto pos = static_cast<std::ptrdiff_t>(it - ends.begin());
  const auto lo = std::max<std::ptrdiff_t>(0, pos - 2);
  const auto hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(ends.size()), pos + 2);
  std::string nearest;
  for (auto i = lo; i < hi; ++i) nearest += (nearest.empty() ? "" : ", ") + format_date(ends[static_cast<std::size_t>(i)]);
  throw DataError("no window ends on " + format_date(date) + "; nearest window end dates: " + nearest);
}

std::size_t selected_window(const RmtSelector& sel, const std::vector<Date>& ends) {
  if (sel.mode == RmtSelector::Mode::Date) return find_window(ends, sel.date);
  return ends.size() - 1;
}

bool degenerate_at(const Eigen::VectorXd& ev, Eigen::Index k) {
  return (k + 1 < ev.size() && std::abs(ev(k) - ev(k + 1)) < kDegenerateGap) ||
         (k > 0 && std::abs(ev(k - 1) - ev(k)) < kDegenerateGap);
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void write_multi_series(const fs::path& path, const std::string& date_header, const std::string& prefix,
                        const std::vector<std::size_t>& ks, const std::vector<Date>& dates,
                        const std::vector<std::vector<double>>& columns) {
  auto out = open_output(path);
  out << date_header;
  for (auto k : ks) out << ',' << prefix << k;
  out << '\n';
  for (std::size_t t = 0; t < dates.size(); ++t) {
    out << format_date(dates[t]);
    for (const auto& col : columns) out << ',' << format_value(col[t]);
    out << '\n';
  }
}

void write_matrix(const fs::path& path, const CorrelationMatrix& c) {
  auto out = open_output(path);
  out << "asset";
  for (const auto& a : c.assets()) out << ',' << csv_escape(a);
  out << '\n';
  const auto& v = c.values();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    out << csv_escape(c.assets()[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < v.cols(); ++j) out << ',' << format_value(v(i, j));
    out << '\n';
  }
}

// Differences each column; fewer than two windows yields empty columns.
std::vector<std::vector<double>> difference_columns(const std::vector<std::vector<double>>& columns) {
  std::vector<std::vector<double>> out;
  for (const auto& c : columns) out.push_back(c.size() < 2 ? std::vector<double>{} : first_difference(c));
  return out;
}

}  // namespace

RmtSelector RmtSelector::parse(const std::string& text) {
  if (text == "last") return {};
  if (text == "pool") return {Mode::Pool, {}};
  try {
    return {Mode::Date, parse_date(text)};
  } catch (const DataError&) {
    throw UsageError("rmt window must be 'last', 'pool' or a YYYY-MM-DD date (got '" + text + "')");
  }
}

std::string RmtSelector::to_string() const {
  switch (mode) {
    case Mode::Last: return "last";
    case Mode::Pool: return "pool";
    case Mode::Date: return format_date(date);
  }
  return "last";
}

void RunConfig::validate() const {
  rolling.validate();
  if (crf_k.empty()) throw UsageError("crf k list must not be empty");
  if (ipr_k.empty()) throw UsageError("ipr k list must not be empty");
  for (auto k : crf_k) {
    if (k < 1) throw UsageError("crf k values must be at least 1");
  }
  for (auto k : ipr_k) {
    if (k < 1) throw UsageError("ipr k values must be at least 1");
  }
  if (bins < 1) throw UsageError("histogram bins must be at least 1");
  if (!(missing_threshold >= 0.0 && missing_threshold <= 1.0)) {
    throw UsageError("missing-date threshold must lie in [0, 1]");
  }
  if (out_dir.empty()) throw UsageError("output directory must be set");
}

InputFormat parse_input_format(const std::string& text) {
  if (text == "auto") return InputFormat::Auto;
  if (text == "long") return InputFormat::Long;
  if (text == "wide") return InputFormat::Wide;
  throw UsageError("input format must be auto, long or wide (got '" + text + "')");
}

ZeroVariancePolicy parse_zero_variance_policy(const std::string& text) {
  if (text == "abort") return ZeroVariancePolicy::Abort;
  if (text == "drop") return ZeroVariancePolicy::Drop;
  throw UsageError("zero-variance policy must be abort or drop (got '" + text + "')");
}

RunConfig config_from_json(const nlohmann::json& j, RunConfig base) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  static const std::vector<std::string> known{
      "input",  "input_format", "missing_threshold", "window_length", "stride",  "crf_k",        "ipr_k",
      "bins",   "rmt_window",   "out_dir",           "zero_variance_policy",     "workers",      "dump_matrices"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw UsageError("unknown config key '" + key + "'");
  }
  try {
    if (j.contains("input")) base.input = j["input"].get<std::string>();
    if (j.contains("input_format")) base.input_format = parse_input_format(j["input_format"].get<std::string>());
    if (j.contains("missing_threshold")) base.missing_threshold = j["missing_threshold"].get<double>();
    if (j.contains("window_length")) base.rolling.window_length = j["window_length"].get<std::size_t>();
    if (j.contains("stride")) base.rolling.stride = j["stride"].get<std::size_t>();
    if (j.contains("crf_k")) base.crf_k = j["crf_k"].get<std::vector<std::size_t>>();
    if (j.contains("ipr_k")) base.ipr_k = j["ipr_k"].get<std::vector<std::size_t>>();
    if (j.contains("bins")) base.bins = j["bins"].get<std::size_t>();
    if (j.contains("rmt_window")) base.rmt_window = RmtSelector::parse(j["rmt_window"].get<std::string>());
    if (j.contains("out_dir")) base.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("zero_variance_policy")) {
      base.zero_variance = parse_zero_variance_policy(j["zero_variance_policy"].get<std::string>());
    }
    if (j.contains("workers")) base.workers = j["workers"].get<unsigned>();
    if (j.contains("dump_matrices")) base.dump_matrices = j["dump_matrices"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("invalid config: ") + e.what());
  }
  return base;
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json dropped = nlohmann::json::array();
  for (const auto& d : dropped_missing) dropped.push_back({{"asset", d.asset}, {"missing_count", d.missing_count}});
  return {{"window_count", window_count},
          {"n_assets", n_assets},
          {"n_return_rows", n_return_rows},
          {"dropped_missing", dropped},
          {"dropped_zero_variance", dropped_zero_variance},
          {"warnings", warnings}};
}

ReturnPanel screen_zero_variance(const ReturnPanel& returns, const RollingSpec& spec, ZeroVariancePolicy policy,
                                 std::vector<std::string>& removed) {
  if (policy == ZeroVariancePolicy::Abort) return returns;
  const auto flagged = zero_variance_assets(returns, spec.window_length, spec.stride);
  if (flagged.empty()) return returns;
  for (auto j : flagged) removed.push_back(returns.assets()[j]);
  if (returns.cols() - flagged.size() < 2) {
    throw DataError("fewer than 2 assets remain after dropping zero-variance assets");
  }
  return returns.without_assets(flagged);
}

std::vector<WindowResult> rolling_windows(const ReturnPanel& returns, const RunConfig& config) {
  check_ks(config.crf_k, returns.cols(), "CRF");
  require_windows(returns, config.rolling);
  return map_windows(returns, config.rolling, resolve_workers(config.workers),
                     [&](std::size_t, const CorrelationMatrix& c) {
                       const auto s = decompose(c);
                       WindowResult r;
                       r.end_date = c.window_end_date();
                       r.mean_offdiagonal = mean_offdiagonal(c);
                       r.mean_negative_offdiagonal = mean_negative_offdiagonal(c);
                       for (auto k : config.crf_k) r.crf.push_back(crf(s, k));
                       r.eigenvalues = s.eigenvalues();
                       r.ipr = s.eigenvectors().array().square().square().colwise().sum().transpose();
                       return r;
                     });
}

RmtComparison compare_to_mp(std::vector<double> eigenvalues, std::string label, std::size_t n_assets,
                            std::size_t window_length, std::size_t bins) {
  RmtComparison cmp;
  cmp.window_label = std::move(label);
  cmp.histogram = eigen_histogram(eigenvalues, bins);
  if (window_length > n_assets) {
    cmp.params = mp_params(n_assets, window_length);
    cmp.outside = count_outside_bounds(eigenvalues, *cmp.params);
  }
  cmp.eigenvalues = std::move(eigenvalues);
  return cmp;
}

void write_rmt_outputs(const fs::path& dir, const RmtComparison& cmp) {
  {
    auto out = open_output(dir / "eigen_histogram.csv");
    out << "bin_left,bin_right,empirical_density,mp_density\n";
    const auto& h = cmp.histogram;
    for (std::size_t b = 0; b < h.densities.size(); ++b) {
      const double theory = cmp.params ? mp_density(*cmp.params, h.bin_center(b)) : 0.0;
      out << format_value(h.bin_edges[b]) << ',' << format_value(h.bin_edges[b + 1]) << ','
          << format_value(h.densities[b]) << ',' << format_value(theory) << '\n';
    }
  }
  nlohmann::json bounds;
  if (cmp.params) {
    bounds = {{"q", cmp.params->q},
              {"lambda_minus", cmp.params->lambda_minus},
              {"lambda_plus", cmp.params->lambda_plus},
              {"n_below", cmp.outside.below},
              {"n_above", cmp.outside.above}};
  } else {
    bounds = {{"q", nullptr}, {"lambda_minus", nullptr}, {"lambda_plus", nullptr}, {"n_below", nullptr}, {"n_above", nullptr}};
  }
  bounds["window"] = cmp.window_label;
  auto out = open_output(dir / "mp_bounds.json");
  out << bounds.dump(2) << '\n';
}

ReturnPanel load_returns(const RunConfig& config, std::vector<DroppedAsset>& dropped) {
  std::ifstream in(config.input, std::ios::binary);
  if (!in) throw DataError("cannot read input file " + config.input.string());
  auto ingested = ingest_prices(in, config.input_format, {config.missing_threshold});
  dropped = std::move(ingested.dropped);
  return log_returns(ingested.panel);
}

RunReport analyze_panel(const ReturnPanel& input, const RunConfig& config, std::vector<DroppedAsset> dropped_missing) {
  config.validate();
  RunReport report;
  report.dropped_missing = std::move(dropped_missing);
  require_windows(input, config.rolling);
  const ReturnPanel returns =
      screen_zero_variance(input, config.rolling, config.zero_variance, report.dropped_zero_variance);
  check_ks(config.ipr_k, returns.cols(), "IPR");

  const auto windows = rolling_windows(returns, config);
  report.window_count = windows.size();
  report.n_assets = returns.cols();
  report.n_return_rows = returns.rows();

  std::vector<Date> ends;
  for (const auto& w : windows) ends.push_back(w.end_date);
  const std::size_t selected =
      config.rmt_window.mode == RmtSelector::Mode::Pool ? ends.size() - 1 : selected_window(config.rmt_window, ends);

  fs::create_directories(config.out_dir);
  const auto& dir = config.out_dir;

  std::vector<double> offdiag, negative;
  for (const auto& w : windows) {
    offdiag.push_back(w.mean_offdiagonal);
    negative.push_back(w.mean_negative_offdiagonal);
  }
  {
    auto out = open_output(dir / "offdiag.csv");
    write_series_csv(out, "value", ends, offdiag);
  }
  {
    auto out = open_output(dir / "offdiag_negative.csv");
    write_series_csv(out, "value", ends, negative);
  }

  std::vector<Date> change_dates(ends.size() > 1 ? ends.begin() + 1 : ends.end(), ends.end());
  if (windows.size() < 2) report.warnings.push_back("only one window; change series are empty");

  std::vector<std::vector<double>> g(config.crf_k.size());
  for (const auto& w : windows) {
    for (std::size_t i = 0; i < g.size(); ++i) g[i].push_back(w.crf[i]);
  }
  write_multi_series(dir / "crf.csv", "window_end_date", "g_", config.crf_k, ends, g);
  write_multi_series(dir / "crf_change.csv", "date", "change_", config.crf_k, change_dates, difference_columns(g));

  std::vector<std::vector<double>> iprs(config.ipr_k.size());
  for (std::size_t i = 0; i < config.ipr_k.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(config.ipr_k[i] - 1);
    std::size_t degenerate = 0;
    std::string first;
    for (const auto& w : windows) {
      iprs[i].push_back(w.ipr(k));
      if (degenerate_at(w.eigenvalues, k) && degenerate++ == 0) first = format_date(w.end_date);
    }
    if (degenerate > 0) {
      report.warnings.push_back("IPR_" + std::to_string(config.ipr_k[i]) + " eigenvalue is degenerate in " +
                                std::to_string(degenerate) + " window(s), first ending " + first +
                                "; its IPR is basis-dependent there");
    }
  }
  write_multi_series(dir / "ipr_timeseries.csv", "window_end_date", "ipr_", config.ipr_k, ends, iprs);
  write_multi_series(dir / "ipr_change.csv", "date", "change_", config.ipr_k, change_dates,
                     difference_columns(iprs));

  {
    const auto& w = windows[selected];
    auto out = open_output(dir / "ipr_by_eigenvalue.csv");
    out << "window_end_date,k,eigenvalue,ipr,degenerate\n";
    const auto& ev = w.eigenvalues;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
      const bool flat = degenerate_at(ev, k);
      out << format_date(w.end_date) << ',' << (k + 1) << ',' << format_value(ev(k)) << ',' << format_value(w.ipr(k))
          << ',' << (flat ? 1 : 0) << '\n';
    }
  }

  std::vector<double> pooled;
  std::string label;
  if (config.rmt_window.mode == RmtSelector::Mode::Pool) {
    for (const auto& w : windows) pooled.insert(pooled.end(), w.eigenvalues.begin(), w.eigenvalues.end());
    label = "pool";
  } else {
    pooled = to_std(windows[selected].eigenvalues);
    label = format_date(windows[selected].end_date);
  }
  const auto cmp = compare_to_mp(std::move(pooled), label, returns.cols(), config.rolling.window_length, config.bins);
  if (!cmp.params) {
    report.warnings.push_back("window length does not exceed the asset count; Marchenko-Pastur comparison omitted");
  }
  write_rmt_outputs(dir, cmp);

  if (config.dump_matrices) {
    fs::create_directories(dir / "matrices");
    for (std::size_t w = 0; w < windows.size(); ++w) {
      const auto c = correlation_matrix(returns, w * config.rolling.stride, config.rolling);
      write_matrix(dir / "matrices" / ("corr_" + format_date(c.window_end_date()) + ".csv"), c);
    }
  }

  auto out = open_output(dir / "run_report.json");
  out << report.to_json().dump(2) << '\n';
  return report;
}

RunReport run_pipeline(const RunConfig& config) {
  config.validate();
  std::vector<DroppedAsset> dropped;
  const auto returns = load_returns(config, dropped);
  return analyze_panel(returns, config, std::move(dropped));
}

RunReport rmt_compare(const ReturnPanel& input, const RunConfig& config, std::vector<DroppedAsset> dropped_missing) {
  config.validate();
  RunReport report;
  report.dropped_missing = std::move(dropped_missing);
  require_windows(input, config.rolling);
  const ReturnPanel returns =
      screen_zero_variance(input, config.rolling, config.zero_variance, report.dropped_zero_variance);
  report.n_assets = returns.cols();
  report.n_return_rows = returns.rows();

  std::vector<double> eigenvalues;
  std::string label;
  if (config.rmt_window.mode == RmtSelector::Mode::Pool) {
    const auto spectra = map_windows(returns, config.rolling, resolve_workers(config.workers),
                                     [](std::size_t, const CorrelationMatrix& c) { return decompose(c).eigenvalues(); });
    for (const auto& ev : spectra) eigenvalues.insert(eigenvalues.end(), ev.begin(), ev.end());
    report.window_count = spectra.size();
    label = "pool";
  } else {
    const auto ends = window_end_dates(returns, config.rolling);
    const std::size_t w = selected_window(config.rmt_window, ends);
    const auto c = correlation_matrix(returns, w * config.rolling.stride, config.rolling);
    eigenvalues = to_std(decompose(c).eigenvalues());
    report.window_count = 1;
    label = format_date(c.window_end_date());
  }
  const auto cmp = compare_to_mp(std::move(eigenvalues), label, returns.cols(), config.rolling.window_length, config.bins);
  if (!cmp.params) {
    report.warnings.push_back("window length does not exceed the asset count; Marchenko-Pastur comparison omitted");
  }
  fs::create_directories(config.out_dir);
  write_rmt_outputs(config.out_dir, cmp);
  return report;
}

}  // namespace mktcorr
