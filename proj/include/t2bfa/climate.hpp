#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>

namespace t2bfa::climate {

enum class Factor { Temperature, Insolation };

std::string_view factor_name(Factor f) noexcept;

/// One month of ambient temperature (K) and insolation (W/m^2) statistics.
struct MonthlyClimateRecord {
  int month = 0;  // 1..12
  double temp_max = 0.0;
  double temp_min = 0.0;
  double temp_avg = 0.0;
  double insol_max = 0.0;
  double insol_min = 0.0;
  double insol_avg = 0.0;

  friend bool operator==(const MonthlyClimateRecord&, const MonthlyClimateRecord&) = default;
};

struct Extrema {
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const Extrema&, const Extrema&) = default;
};

/// Twelve validated months, stored in month order regardless of input order.
class ClimateTable {
 public:
  /// Validates every record and the month permutation; throws t2bfa::Error.
  explicit ClimateTable(const std::array<MonthlyClimateRecord, 12>& records);

  [[nodiscard]] const std::array<MonthlyClimateRecord, 12>& records() const noexcept { return records_; }
  [[nodiscard]] const MonthlyClimateRecord& month(int m) const;

  friend bool operator==(const ClimateTable&, const ClimateTable&) = default;

 private:
  std::array<MonthlyClimateRecord, 12> records_;
};

inline constexpr std::string_view kClimateHeader =
    "month,temp_max,temp_min,temp_avg,insol_max,insol_min,insol_avg";

/// Reads the `climate.csv` format. Blank lines and surrounding whitespace are ignored.
/// Errors carry the 1-based line number where one applies.
ClimateTable parse_climate_csv(std::istream& in);
ClimateTable parse_climate_csv(std::string_view text);
ClimateTable load_climate_csv(const std::string& path);

/// Writes the table in month order using at most six fractional digits per value.
std::string serialize_climate_csv(const ClimateTable& table);

/// Minimum of the monthly minima and maximum of the monthly maxima.
Extrema annual_extrema(const ClimateTable& table, Factor factor);

/// The (min, max) pair of one month. Throws MonthOutOfRange outside 1..12.
Extrema monthly_interval(const ClimateTable& table, int month, Factor factor);

}  // namespace t2bfa::climate
