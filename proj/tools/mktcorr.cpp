// mktcorr: rolling cross-correlation instability indicators from price panels.
//
//   mktcorr ingest      --input prices.csv --out-dir data/
//   mktcorr synth       --scenario scenario.json --output panel.csv
//   mktcorr analyze     --input panel.csv --out-dir results/ [--config run.json]
//   mktcorr rmt-compare --input panel.csv --rmt-window 2008-10-15 --out-dir rmt/
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal consistency error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mktcorr/csv_io.hpp"
#include "mktcorr/errors.hpp"
#include "mktcorr/pipeline.hpp"
#include "mktcorr/synth.hpp"

namespace fs = std::filesystem;
using namespace mktcorr;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

// Raw flag values; only the ones actually given on the command line override the config file.
struct RunFlags {
  std::string config;
  std::string input;
  std::string input_format;
  double missing_threshold = 0.0;
  std::size_t window_length = 0;
  std::size_t stride = 0;
  std::vector<std::size_t> crf_k;
  std::vector<std::size_t> ipr_k;
  std::size_t bins = 0;
  std::string rmt_window;
  std::string out_dir;
  std::string zero_variance_policy;
  unsigned workers = 1;
  bool dump_matrices = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool analysis) {
  cmd->add_option("--config", f.config, "JSON config file; flags override its values")->check(CLI::ExistingFile);
  cmd->add_option("--input", f.input, "price CSV (long or wide)");
  cmd->add_option("--input-format", f.input_format, "auto | long | wide");
  cmd->add_option("--missing-threshold", f.missing_threshold, "max fraction of missing dates before an asset is dropped");
  cmd->add_option("--window-length", f.window_length, "rolling window length in return rows (default 400)");
  cmd->add_option("--stride", f.stride, "rows the window advances per step (default 1)");
  cmd->add_option("--bins", f.bins, "eigenvalue histogram bins (default 50)");
  cmd->add_option("--rmt-window", f.rmt_window, "last | pool | YYYY-MM-DD window end date");
  cmd->add_option("--out-dir", f.out_dir, "output directory");
  cmd->add_option("--zero-variance-policy", f.zero_variance_policy, "abort | drop");
  cmd->add_option("--workers", f.workers, "worker threads, 0 = all cores (output is identical for any value)");
  if (analysis) {
    cmd->add_option("--crf-k", f.crf_k, "CRF component counts (default 1..10)")->delimiter(',');
    cmd->add_option("--ipr-k", f.ipr_k, "eigenvector indices for the IPR series (default 1)")->delimiter(',');
    cmd->add_flag("--dump-matrices", f.dump_matrices, "write every window's correlation matrix");
  }
}

RunConfig resolve_config(const CLI::App* cmd, const RunFlags& f) {
  RunConfig cfg;
  if (!f.config.empty()) cfg = config_from_json(read_json_file(f.config));
  auto given = [&](const char* name) { return cmd->count(name) > 0; };
  if (given("--input")) cfg.input = f.input;
  if (given("--input-format")) cfg.input_format = parse_input_format(f.input_format);
  if (given("--missing-threshold")) cfg.missing_threshold = f.missing_threshold;
  if (given("--window-length")) cfg.rolling.window_length = f.window_length;
  if (given("--stride")) cfg.rolling.stride = f.stride;
  if (given("--bins")) cfg.bins = f.bins;
  if (given("--rmt-window")) cfg.rmt_window = RmtSelector::parse(f.rmt_window);
  if (given("--out-dir")) cfg.out_dir = f.out_dir;
  if (given("--zero-variance-policy")) cfg.zero_variance = parse_zero_variance_policy(f.zero_variance_policy);
  if (given("--workers")) cfg.workers = f.workers;
  if (cmd->get_option_no_throw("--crf-k") && given("--crf-k")) cfg.crf_k = f.crf_k;
  if (cmd->get_option_no_throw("--ipr-k") && given("--ipr-k")) cfg.ipr_k = f.ipr_k;
  if (cmd->get_option_no_throw("--dump-matrices") && given("--dump-matrices")) cfg.dump_matrices = f.dump_matrices;
  if (cfg.input.empty()) throw UsageError("no input file: pass --input or set \"input\" in the config");
  cfg.validate();
  return cfg;
}

void print_report(const char* command, const RunReport& r) {
  std::cerr << command << ": " << r.window_count << " window(s), " << r.n_assets << " assets, " << r.n_return_rows
            << " return rows\n";
  for (const auto& d : r.dropped_missing) {
    std::cerr << "  dropped " << d.asset << " (" << d.missing_count << " missing dates)\n";
  }
  for (const auto& a : r.dropped_zero_variance) std::cerr << "  dropped " << a << " (zero variance in a window)\n";
  for (const auto& w : r.warnings) std::cerr << "  warning: " << w << '\n';
}

int run_ingest(const std::string& input, const std::string& format, double threshold, const fs::path& out_dir) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw DataError("cannot read input file " + input);
  const auto result = ingest_prices(in, parse_input_format(format), {threshold});
  fs::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "prices.csv", std::ios::binary);
    if (!out) throw DataError("cannot write " + (out_dir / "prices.csv").string());
    write_wide_csv(out, result.panel);
  }
  nlohmann::json report = nlohmann::json::array();
  for (const auto& d : result.dropped) report.push_back({{"asset", d.asset}, {"missing_count", d.missing_count}});
  std::ofstream out(out_dir / "drop_report.json", std::ios::binary);
  if (!out) throw DataError("cannot write " + (out_dir / "drop_report.json").string());
  out << report.dump(2) << '\n';
  std::cerr << "ingest: " << result.panel.rows() << " dates x " << result.panel.cols() << " assets, "
            << result.dropped.size() << " dropped\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rolling cross-correlation, cumulative risk fraction and Marchenko-Pastur diagnostics"};
  app.require_subcommand(1);

  std::string ingest_input, ingest_format = "auto", ingest_out = "out";
  double ingest_threshold = 0.0;
  auto* ingest = app.add_subcommand("ingest", "validate and align a price CSV into a wide panel plus drop report");
  ingest->add_option("--input", ingest_input, "price CSV (long or wide)")->required();
  ingest->add_option("--input-format", ingest_format, "auto | long | wide");
  ingest->add_option("--missing-threshold", ingest_threshold, "max fraction of missing dates before an asset is dropped");
  ingest->add_option("--out-dir", ingest_out, "writes prices.csv and drop_report.json here");

  std::string scenario_path, synth_output;
  bool synth_iid = false;
  std::size_t synth_assets = 50, synth_days = 1000;
  std::uint64_t synth_seed = 1;
  auto* synth = app.add_subcommand("synth", "generate a synthetic price panel (wide CSV)");
  synth->add_option("--scenario", scenario_path, "factor scenario JSON")->check(CLI::ExistingFile);
  synth->add_flag("--iid", synth_iid, "i.i.d. standard normal returns instead of a factor scenario");
  synth->add_option("--n-assets", synth_assets, "assets for --iid");
  synth->add_option("--n-days", synth_days, "return rows for --iid");
  synth->add_option("--seed", synth_seed, "seed for --iid");
  synth->add_option("--output", synth_output, "wide CSV path")->required();

  RunFlags analyze_flags, rmt_flags;
  auto* analyze = app.add_subcommand("analyze", "rolling pipeline: writes all indicator and spectrum files");
  add_run_flags(analyze, analyze_flags, true);
  auto* rmt = app.add_subcommand("rmt-compare", "eigenvalue histogram and Marchenko-Pastur bounds for one window or the pool");
  add_run_flags(rmt, rmt_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*ingest) return run_ingest(ingest_input, ingest_format, ingest_threshold, ingest_out);

    if (*synth) {
      ReturnPanel returns = [&] {
        if (synth_iid) return generate_iid_panel(synth_assets, synth_days, synth_seed);
        if (scenario_path.empty()) throw UsageError("synth needs --scenario or --iid");
        return generate_factor_panel(scenario_from_json(read_json_file(scenario_path)));
      }();
      const auto parent = fs::path(synth_output).parent_path();
      if (!parent.empty()) fs::create_directories(parent);
      std::ofstream out(synth_output, std::ios::binary);
      if (!out) throw DataError("cannot write " + synth_output);
      write_wide_csv(out, synthetic_prices(returns));
      std::cerr << "synth: " << returns.rows() + 1 << " dates x " << returns.cols() << " assets\n";
      return kOk;
    }

    if (*analyze) {
      const auto cfg = resolve_config(analyze, analyze_flags);
      print_report("analyze", run_pipeline(cfg));
      return kOk;
    }

    if (*rmt) {
      const auto cfg = resolve_config(rmt, rmt_flags);
      std::vector<DroppedAsset> dropped;
      const auto returns = load_returns(cfg, dropped);
      print_report("rmt-compare", rmt_compare(returns, cfg, std::move(dropped)));
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const ConsistencyError& e) {
    std::cerr << "internal consistency error: " << e.what() << '\n';
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
