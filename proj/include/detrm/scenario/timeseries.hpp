#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace detrm::scenario {

struct TimeSeriesRow {
  std::uint64_t epoch = 0;
  std::string subject;
  std::string metric;
  double value = 0.0;

  bool operator==(const TimeSeriesRow&) const = default;
};

struct TimeSeries {
  std::vector<TimeSeriesRow> rows;

  /// Values of one (subject, metric) curve, in epoch order.
  std::vector<double> curve(std::string_view subject, std::string_view metric) const;
  std::optional<double> at(std::uint64_t epoch, std::string_view subject, std::string_view metric) const;
};

/// Header `epoch,subject,metric,value`; values use the shortest
/// round-trip decimal form.
void write_csv(std::ostream& out, const TimeSeries& series);
/// Throws Error(IoFailure).
void export_csv(const TimeSeries& series, const std::filesystem::path& path);

}  // namespace detrm::scenario
