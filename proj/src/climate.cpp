#include "t2bfa/climate.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <vector>

#include "t2bfa/error.hpp"
#include "t2bfa/text.hpp"

namespace t2bfa::climate {

std::string_view factor_name(Factor f) noexcept {
  return f == Factor::Temperature ? "temperature" : "insolation";
}

namespace {

void validate_record(const MonthlyClimateRecord& r, std::optional<std::size_t> line) {
  if (r.month < 1 || r.month > 12) {
    throw Error(ErrorCode::MonthOutOfRange, "month index " + std::to_string(r.month) + " is not in 1..12",
                line);
  }
  const std::string where = "month " + std::to_string(r.month);
  if (!(r.temp_min <= r.temp_avg && r.temp_avg <= r.temp_max)) {
    throw Error(ErrorCode::OrderViolation, where + ": temperature requires min <= avg <= max", line);
  }
  if (!(r.insol_min <= r.insol_avg && r.insol_avg <= r.insol_max)) {
    throw Error(ErrorCode::OrderViolation, where + ": insolation requires min <= avg <= max", line);
  }
  if (!(r.temp_min > 0.0)) {
    throw Error(ErrorCode::InvalidValue, where + ": temperatures must be positive kelvin", line);
  }
  if (!(r.insol_min >= 0.0)) {
    throw Error(ErrorCode::InvalidValue, where + ": insolation must be non-negative", line);
  }
}

std::array<MonthlyClimateRecord, 12> sorted_and_checked(std::array<MonthlyClimateRecord, 12> records) {
  std::array<bool, 13> seen{};
  for (const auto& r : records) {
    validate_record(r, std::nullopt);
    if (seen[static_cast<std::size_t>(r.month)]) {
      throw Error(ErrorCode::MissingMonth, "month " + std::to_string(r.month) + " appears twice");
    }
    seen[static_cast<std::size_t>(r.month)] = true;
  }
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.month < b.month; });
  return records;
}

}  // namespace

ClimateTable::ClimateTable(const std::array<MonthlyClimateRecord, 12>& records)
    : records_(sorted_and_checked(records)) {}

const MonthlyClimateRecord& ClimateTable::month(int m) const {
  if (m < 1 || m > 12) {
    throw Error(ErrorCode::MonthOutOfRange, "month " + std::to_string(m) + " is not in 1..12");
  }
  return records_[static_cast<std::size_t>(m - 1)];
}

ClimateTable parse_climate_csv(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<MonthlyClimateRecord> rows;
  std::array<std::size_t, 13> month_line{};

  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty()) continue;
    if (!have_header) {
      std::string normalized;
      for (const auto field : text::split_csv_line(line)) {
        if (!normalized.empty()) normalized += ',';
        normalized += field;
      }
      if (normalized != kClimateHeader) {
        throw Error(ErrorCode::SchemaMismatch,
                    "expected header '" + std::string(kClimateHeader) + "'", line_no);
      }
      have_header = true;
      continue;
    }
    const auto fields = text::split_csv_line(line);
    if (fields.size() != 7) {
      throw Error(ErrorCode::SchemaMismatch,
                  "expected 7 columns, found " + std::to_string(fields.size()), line_no);
    }
    std::array<double, 7> v{};
    for (std::size_t i = 0; i < 7; ++i) {
      const auto parsed = text::parse_decimal(fields[i], 6);
      if (!parsed) {
        throw Error(ErrorCode::MalformedNumber, "cannot parse '" + std::string(fields[i]) + "'", line_no);
      }
      v[i] = *parsed;
    }
    if (v[0] != static_cast<double>(static_cast<int>(v[0]))) {
      throw Error(ErrorCode::MalformedNumber, "month index must be an integer", line_no);
    }
    MonthlyClimateRecord r{static_cast<int>(v[0]), v[1], v[2], v[3], v[4], v[5], v[6]};
    validate_record(r, line_no);
    if (month_line[static_cast<std::size_t>(r.month)] != 0) {
      throw Error(ErrorCode::MissingMonth,
                  "month " + std::to_string(r.month) + " repeats line " +
                      std::to_string(month_line[static_cast<std::size_t>(r.month)]),
                  line_no);
    }
    month_line[static_cast<std::size_t>(r.month)] = line_no;
    rows.push_back(r);
  }
  if (!have_header) throw Error(ErrorCode::SchemaMismatch, "empty input, header row missing");
  if (rows.size() != 12) {
    throw Error(ErrorCode::MissingMonth, "expected 12 monthly rows, found " + std::to_string(rows.size()));
  }
  std::array<MonthlyClimateRecord, 12> records{};
  std::copy(rows.begin(), rows.end(), records.begin());
  return ClimateTable(records);
}

ClimateTable parse_climate_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_climate_csv(in);
}

ClimateTable load_climate_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open climate file '" + path + "'");
  try {
    return parse_climate_csv(in);
  } catch (const Error& e) {
    std::string where = path;
    if (e.line()) where += ":" + std::to_string(*e.line());
    throw Error(e.code(), where + ": " + e.detail(), e.line());
  }
}

std::string serialize_climate_csv(const ClimateTable& table) {
  std::string out{kClimateHeader};
  out += '\n';
  for (const auto& r : table.records()) {
    out += std::to_string(r.month);
    for (const double v : {r.temp_max, r.temp_min, r.temp_avg, r.insol_max, r.insol_min, r.insol_avg}) {
      out += ',';
      out += text::format_decimal6(v);
    }
    out += '\n';
  }
  return out;
}

Extrema annual_extrema(const ClimateTable& table, Factor factor) {
  Extrema e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& r : table.records()) {
    const auto m = monthly_interval(table, r.month, factor);
    e.min = std::min(e.min, m.min);
    e.max = std::max(e.max, m.max);
  }
  return e;
}

Extrema monthly_interval(const ClimateTable& table, int month, Factor factor) {
  const auto& r = table.month(month);
  if (factor == Factor::Temperature) return {r.temp_min, r.temp_max};
  return {r.insol_min, r.insol_max};
}

}  // namespace t2bfa::climate
