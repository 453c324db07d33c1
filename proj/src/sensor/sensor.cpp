#include "detrm/sensor/sensor.hpp"

#include <cmath>
#include <random>

#include "detrm/error.hpp"

namespace detrm::sensor {

std::string_view to_string(FaultKind kind) noexcept {
  switch (kind) {
    case FaultKind::stuck_at: return "stuck_at";
    case FaultKind::offset: return "offset";
    case FaultKind::noisy: return "noisy";
  }
  return "unknown";
}

std::optional<FaultKind> fault_kind_from_string(std::string_view name) noexcept {
  if (name == "stuck_at") return FaultKind::stuck_at;
  if (name == "offset") return FaultKind::offset;
  if (name == "noisy") return FaultKind::noisy;
  return std::nullopt;
}

double Trajectory::at(std::uint64_t epoch) const {
  const Segment* current = nullptr;
  for (const auto& s : segments) {
    if (s.from > epoch) break;
    current = &s;
  }
  if (!current) throw Error(Errc::UndefinedEpoch, "trajectory starts after epoch " + std::to_string(epoch));
  return current->celsius;
}

double Environment::truth(std::string_view location_id, std::uint64_t epoch) const {
  if (epoch > horizon) {
    throw Error(Errc::UndefinedEpoch, "epoch " + std::to_string(epoch) + " past horizon " + std::to_string(horizon));
  }
  auto it = locations.find(location_id);
  if (it == locations.end()) throw Error(Errc::UndefinedEpoch, "no trajectory for " + std::string(location_id));
  return it->second.at(epoch);
}

namespace {

// FNV-1a; std::hash is not stable across implementations.
std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Box-Muller and a 53-bit uniform so the stream does not depend on the
// standard library's distribution implementations.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double gaussian(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
}

}  // namespace

trm::Observation sample(const SensorNode& sensor, const Environment& env, std::uint64_t epoch,
                        std::uint64_t seed) {
  const double truth = env.truth(sensor.location_id, epoch);
  const std::string_view stream = sensor.stream.empty() ? std::string_view(sensor.key) : sensor.stream;
  std::mt19937_64 rng(splitmix(splitmix(seed) ^ fnv1a(stream)) ^ splitmix(epoch));

  const double noise = gaussian(rng);
  const double u = uniform01(rng);
  const double extra = gaussian(rng);

  trm::Observation obs;
  obs.sensor_id = sensor.key;
  obs.epoch = epoch;
  obs.location_id = sensor.location_id;
  obs.value = truth + env.base_std * noise;
  obs.confidence = env.confidence_lo + (env.confidence_hi - env.confidence_lo) * u;

  if (sensor.fault && sensor.fault->active(epoch)) {
    const auto& f = *sensor.fault;
    switch (f.kind) {
      case FaultKind::stuck_at: obs.value = f.param; break;
      case FaultKind::offset: obs.value += f.param; break;
      case FaultKind::noisy: obs.value += f.param * extra; break;
    }
    obs.confidence = 1.0 - f.confidence_penalty;
  }
  return obs;
}

std::vector<trm::Observation> gateway_collect(std::string_view location_id, std::span<const SensorNode> sensors,
                                              const Environment& env, std::uint64_t epoch, std::uint64_t seed,
                                              std::size_t y_min_sensors) {
  for (const auto& s : sensors) {
    if (s.location_id != location_id) {
      throw Error(Errc::LocationMismatch, s.key + " is mapped to " + s.location_id);
    }
    if (s.modality != sensors.front().modality) {
      throw Error(Errc::ModalityMismatch, s.key + " reports " + s.modality);
    }
  }
  if (sensors.size() < y_min_sensors) {
    throw Error(Errc::InsufficientRedundancy, std::to_string(sensors.size()) + " sensors at " +
                                                  std::string(location_id) + ", need " +
                                                  std::to_string(y_min_sensors));
  }
  std::vector<trm::Observation> out;
  out.reserve(sensors.size());
  for (const auto& s : sensors) out.push_back(sample(s, env, epoch, seed));
  return out;
}

}  // namespace detrm::sensor
