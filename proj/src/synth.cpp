#include "mktcorr/synth.hpp"

#include <cmath>
#include <algorithm>
#include <numbers>
#include <string>

#include "mktcorr/errors.hpp"

namespace mktcorr {

double NormalGenerator::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double NormalGenerator::normal() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

void FactorScenario::validate() const {
  if (n_assets < 2) throw UsageError("scenario needs at least 2 assets");
  if (n_days < 2) throw UsageError("scenario needs at least 2 days");
  if (segments.empty()) throw UsageError("scenario needs at least one segment");
  std::size_t total = 0;
  for (const auto& s : segments) {
    if (s.length == 0) throw UsageError("scenario segments must be non-empty");
    if (!(s.idio_sigma > 0.0)) throw UsageError("segment idio_sigma must be positive");
    if (!(s.beta_mean >= 0.0)) throw UsageError("segment beta_mean must be non-negative");
    if (!(s.beta_spread >= 0.0)) throw UsageError("segment beta_spread must be non-negative");
    total += s.length;
  }
  if (total != n_days) {
    throw UsageError("segment lengths sum to " + std::to_string(total) + " but n_days is " + std::to_string(n_days));
  }
}

FactorScenario scenario_from_json(const nlohmann::json& j) {
  try {
    FactorScenario s;
    s.n_assets = j.at("n_assets").get<std::size_t>();
    s.n_days = j.at("n_days").get<std::size_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& seg : j.at("segments")) {
      s.segments.push_back({seg.at("length").get<std::size_t>(), seg.at("beta_mean").get<double>(),
                            seg.value("beta_spread", 0.0), seg.value("idio_sigma", 1.0)});
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("invalid scenario: ") + e.what());
  }
}

nlohmann::json scenario_to_json(const FactorScenario& s) {
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& seg : s.segments) {
    segments.push_back({{"length", seg.length},
                        {"beta_mean", seg.beta_mean},
                        {"beta_spread", seg.beta_spread},
                        {"idio_sigma", seg.idio_sigma}});
  }
  return {{"n_assets", s.n_assets}, {"n_days", s.n_days}, {"seed", s.seed}, {"segments", segments}};
}

std::vector<Date> synthetic_dates(std::size_t n_days) {
  using namespace std::chrono;
  auto all = weekday_calendar(Date{year{2000}, January, day{3}}, n_days + 1);
  all.erase(all.begin());
  return all;
}

std::vector<std::string> synthetic_asset_names(std::size_t n_assets) {
  std::size_t width = 3;
  for (std::size_t n = n_assets > 0 ? n_assets - 1 : 0; n >= 1000; n /= 10) ++width;
  std::vector<std::string> names;
  names.reserve(n_assets);
  for (std::size_t i = 0; i < n_assets; ++i) {
    const auto digits = std::to_string(i);
    names.push_back("S" + std::string(static_cast<std::size_t>(width) - std::min<std::size_t>(digits.size(), width), '0') + digits);
  }
  return names;
}

ReturnPanel generate_iid_panel(std::size_t n_assets, std::size_t n_days, std::uint64_t seed) {
  if (n_assets < 2 || n_days < 2) throw UsageError("i.i.d. panel needs at least 2 assets and 2 days");
  NormalGenerator gen(seed);
  Eigen::MatrixXd r(static_cast<Eigen::Index>(n_days), static_cast<Eigen::Index>(n_assets));
  for (Eigen::Index t = 0; t < r.rows(); ++t) {
    for (Eigen::Index i = 0; i < r.cols(); ++i) r(t, i) = gen.normal();
  }
  return ReturnPanel(synthetic_dates(n_days), synthetic_asset_names(n_assets), std::move(r));
}

ReturnPanel generate_factor_panel(const FactorScenario& scenario) {
  scenario.validate();
  NormalGenerator gen(scenario.seed);
  const auto n = static_cast<Eigen::Index>(scenario.n_assets);
  Eigen::MatrixXd r(static_cast<Eigen::Index>(scenario.n_days), n);
  Eigen::VectorXd beta(n);
  Eigen::Index t = 0;
  for (const auto& seg : scenario.segments) {
    for (Eigen::Index i = 0; i < n; ++i) {
      beta(i) = seg.beta_mean + seg.beta_spread * (2.0 * gen.uniform() - 1.0);
    }
    for (std::size_t day = 0; day < seg.length; ++day, ++t) {
      const double f = gen.normal();
      for (Eigen::Index i = 0; i < n; ++i) r(t, i) = beta(i) * f + seg.idio_sigma * gen.normal();
    }
  }
  return ReturnPanel(synthetic_dates(scenario.n_days), synthetic_asset_names(scenario.n_assets), std::move(r));
}

PricePanel synthetic_prices(const ReturnPanel& returns) {
  using namespace std::chrono;
  if (returns.rows() == 0) throw UsageError("cannot build prices from an empty return panel");
  sys_days first{returns.dates().front()};
  do {
    first -= days{1};
  } while (weekday{first} == Saturday || weekday{first} == Sunday);
  return prices_from_returns(returns, Date{first},
                             Eigen::RowVectorXd::Constant(static_cast<Eigen::Index>(returns.cols()), 100.0));
}

}  // namespace mktcorr
