#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mktcorr/panel.hpp"

namespace mktcorr {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads comma-separated text with a header row. Double-quoted fields may contain commas and "" escapes.
CsvTable read_csv(std::istream& in);

/// Long format needs header date,asset,close; anything else whose first column is "date" is wide.
InputFormat detect_format(const std::vector<std::string>& header);

/// Converts a parsed table into price records. Empty or NA cells in wide format mean "missing".
std::vector<PriceRecord> price_records(const CsvTable& table, InputFormat format);

IngestResult ingest_prices(std::istream& in, InputFormat format, const IngestOptions& options = {});

/// Shortest text that is exact to 17 significant digits ("%.17g").
std::string format_value(double v);

void write_wide_csv(std::ostream& out, const PricePanel& panel);

/// Writes `date,<name>` rows, one per date.
void write_series_csv(std::ostream& out, std::string_view value_header, std::span<const Date> dates,
                      std::span<const double> values);

std::string csv_escape(std::string_view field);

}  // namespace mktcorr
