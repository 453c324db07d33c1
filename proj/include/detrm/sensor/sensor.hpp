#pragma once

// Sensor simulation: ground-truth temperature per location, per-node
// gaussian noise and confidence, fault injection, and gateway batching.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "detrm/trm/engine.hpp"

namespace detrm::sensor {

inline constexpr std::string_view kDefaultModality = "tti-temperature";

enum class FaultKind { stuck_at, offset, noisy };

std::string_view to_string(FaultKind kind) noexcept;
std::optional<FaultKind> fault_kind_from_string(std::string_view name) noexcept;

/// stuck_at: report `param` verbatim. offset: add `param`. noisy: add
/// gaussian noise with std `param` on top of the base noise.
struct FaultModel {
  FaultKind kind = FaultKind::stuck_at;
  double param = 15.0;
  std::uint64_t start_epoch = 0;
  double confidence_penalty = 0.5;

  bool active(std::uint64_t epoch) const noexcept { return epoch >= start_epoch; }
};

struct SensorNode {
  std::string key;
  std::string modality{kDefaultModality};
  std::string owner;
  std::string location_id;
  std::string stream;  // noise stream label; empty means `key`
  std::optional<FaultModel> fault;
};

struct Segment {
  std::uint64_t from = 0;  // first epoch this level applies to
  double celsius = 0.0;
};

/// Piecewise-constant trajectory, segments sorted by `from`.
struct Trajectory {
  std::vector<Segment> segments;

  double at(std::uint64_t epoch) const;
};

struct Environment {
  std::map<std::string, Trajectory, std::less<>> locations;
  std::uint64_t horizon = 0;  // last defined epoch
  double base_std = 0.0;
  double confidence_lo = 0.9;
  double confidence_hi = 1.0;

  /// Throws UndefinedEpoch past the horizon or for an unknown location.
  double truth(std::string_view location_id, std::uint64_t epoch) const;
};

/// Deterministic in (sensor stream, epoch, seed). Noise and confidence
/// are always drawn, so a fault only rewrites an otherwise healthy draw.
trm::Observation sample(const SensorNode& sensor, const Environment& env, std::uint64_t epoch,
                        std::uint64_t seed);

/// One observation per sensor, in input order. Throws LocationMismatch,
/// ModalityMismatch, InsufficientRedundancy.
std::vector<trm::Observation> gateway_collect(std::string_view location_id, std::span<const SensorNode> sensors,
                                              const Environment& env, std::uint64_t epoch, std::uint64_t seed,
                                              std::size_t y_min_sensors);

}  // namespace detrm::sensor
