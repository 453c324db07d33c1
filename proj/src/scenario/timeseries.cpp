#include "detrm/scenario/timeseries.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

#include "detrm/error.hpp"

namespace detrm::scenario {

std::vector<double> TimeSeries::curve(std::string_view subject, std::string_view metric) const {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.subject == subject && r.metric == metric) out.push_back(r.value);
  }
  return out;
}

std::optional<double> TimeSeries::at(std::uint64_t epoch, std::string_view subject, std::string_view metric) const {
  for (const auto& r : rows) {
    if (r.epoch == epoch && r.subject == subject && r.metric == metric) return r.value;
  }
  return std::nullopt;
}

void write_csv(std::ostream& out, const TimeSeries& series) {
  out << "epoch,subject,metric,value\n";
  char buf[64];
  for (const auto& r : series.rows) {
    const auto res = std::to_chars(buf, buf + sizeof buf, r.value);
    out << r.epoch << ',' << r.subject << ',' << r.metric << ',' << std::string_view(buf, res.ptr - buf) << '\n';
  }
}

void export_csv(const TimeSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot open " + path.string());
  write_csv(out, series);
  out.flush();
  if (!out) throw Error(Errc::IoFailure, "write failed for " + path.string());
}

}  // namespace detrm::scenario
