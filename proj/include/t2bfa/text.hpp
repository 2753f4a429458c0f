#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Locale-independent number and CSV text helpers shared by the readers and writers.
namespace t2bfa::text {

std::string_view trim(std::string_view s) noexcept;

/// Splits one CSV line on commas. No quoting support; none of the formats here need it.
std::vector<std::string_view> split_csv_line(std::string_view line);

/// Strict decimal: optional sign, digits, optional fraction of at most `max_fraction_digits`.
/// No exponent, no thousands separators. Returns nullopt on any deviation.
std::optional<double> parse_decimal(std::string_view s, int max_fraction_digits = 6);

/// Any finite double in the shortest round-trip notation (from_chars general format).
std::optional<double> parse_double(std::string_view s);

std::optional<std::uint64_t> parse_u64(std::string_view s);

/// Fixed notation with at most six fractional digits, trailing zeros stripped.
std::string format_decimal6(double v);

/// Shortest text that parses back to the identical double.
std::string format_roundtrip(double v);

}  // namespace t2bfa::text
