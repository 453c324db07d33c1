#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace detrm::ledger {

enum class EventKind : std::uint8_t {
  alert,
  commodity_trust,
  participant_trust,
  endorsement,
  reputation,
};

std::string_view to_string(EventKind kind) noexcept;

/// Score change or alert emitted by a contract handler. For alerts the
/// value fields are unused and the offending readings are listed.
struct Event {
  std::string subject;
  EventKind kind = EventKind::alert;
  double old_value = 0.0;
  double new_value = 0.0;
  std::uint64_t epoch = 0;
  std::string tx_id;
  std::vector<std::string> sensor_ids;
  std::vector<double> readings;
};

}  // namespace detrm::ledger
