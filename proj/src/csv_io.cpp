#include "mktcorr/csv_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

#include "mktcorr/errors.hpp"

namespace mktcorr {

namespace {

std::vector<std::string> split_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  if (quoted) throw DataError("unterminated quote on line " + std::to_string(line_no));
  fields.push_back(std::move(field));
  return fields;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_price(const std::string& text, std::size_t line_no) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw DataError("unparseable number '" + text + "' on line " + std::to_string(line_no));
  }
  return v;
}

bool is_missing(const std::string& cell) {
  const auto l = lower(cell);
  return l.empty() || l == "na" || l == "nan" || l == "null";
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split_line(line, line_no);
    for (auto& f : fields) f = trim(f);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw DataError("line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw DataError("empty input: no header row");
  return table;
}

InputFormat detect_format(const std::vector<std::string>& header) {
  if (header.size() == 3 && lower(header[0]) == "date" && lower(header[1]) == "asset" &&
      lower(header[2]) == "close") {
    return InputFormat::Long;
  }
  if (header.size() >= 2 && lower(header[0]) == "date") return InputFormat::Wide;
  throw DataError("unrecognized header: expected date,asset,close or date,<asset1>,<asset2>,...");
}

std::vector<PriceRecord> price_records(const CsvTable& table, InputFormat format) {
  if (format == InputFormat::Auto) format = detect_format(table.header);
  std::vector<PriceRecord> records;
  // Data rows start on line 2 (blank lines aside); used only in messages.
  if (format == InputFormat::Long) {
    if (table.header.size() != 3) throw DataError("long format requires exactly the columns date,asset,close");
    records.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& row = table.rows[i];
      if (row[1].empty()) throw DataError("empty asset identifier on data row " + std::to_string(i + 1));
      records.push_back({parse_date(row[0]), row[1], parse_price(row[2], i + 2)});
    }
  } else {
    if (table.header.size() < 2 || lower(table.header[0]) != "date") {
      throw DataError("wide format requires a leading date column");
    }
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& row = table.rows[i];
      const Date d = parse_date(row[0]);
      for (std::size_t j = 1; j < row.size(); ++j) {
        if (is_missing(row[j])) continue;
        records.push_back({d, table.header[j], parse_price(row[j], i + 2)});
      }
    }
  }
  return records;
}

IngestResult ingest_prices(std::istream& in, InputFormat format, const IngestOptions& options) {
  const auto table = read_csv(in);
  const auto records = price_records(table, format);
  return ingest_prices(records, options);
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

void write_wide_csv(std::ostream& out, const PricePanel& panel) {
  out << "date";
  for (const auto& a : panel.assets()) out << ',' << csv_escape(a);
  out << '\n';
  const auto& p = panel.prices();
  for (std::size_t t = 0; t < panel.rows(); ++t) {
    out << format_date(panel.dates()[t]);
    for (Eigen::Index j = 0; j < p.cols(); ++j) out << ',' << format_value(p(static_cast<Eigen::Index>(t), j));
    out << '\n';
  }
}

void write_series_csv(std::ostream& out, std::string_view value_header, std::span<const Date> dates,
                      std::span<const double> values) {
  if (dates.size() != values.size()) throw UsageError("series dates and values differ in length");
  out << "window_end_date," << value_header << '\n';
  for (std::size_t i = 0; i < dates.size(); ++i) out << format_date(dates[i]) << ',' << format_value(values[i]) << '\n';
}

}  // namespace mktcorr
