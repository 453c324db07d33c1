#pragma once

#include <cstddef>

namespace detrm::trm {

/// How neighbour evidence is kept once computed. `raw` keeps the signed
/// average in [-1, 1] so refuting neighbours pull the score down;
/// `clamp_unit` clips it into [0, 1].
enum class EvidenceMode { raw, clamp_unit };

/// Reputation blend weights for (commodity trust, participant trust,
/// endorsements). Must sum to one.
struct Weights {
  double trust = 1.0 / 3.0;
  double participant = 1.0 / 3.0;
  double endorsement = 1.0 / 3.0;

  double sum() const noexcept { return trust + participant + endorsement; }
};

struct TrmParams {
  double gamma = 0.85;
  double delta_max = 1.0;
  double delta_min = 0.0;
  double t_min = 2.0;  // °C
  double t_max = 8.0;  // °C
  Weights weights{};
  std::size_t y_min_sensors = 3;
  double support_epsilon = 1.0;  // °C
  EvidenceMode evidence_mode = EvidenceMode::raw;

  /// Throws Error(InvalidParams) or Error(WeightsNotNormalized).
  void validate() const;

  /// Copy with a commodity-specific temperature band swapped in.
  TrmParams with_band(double lo, double hi) const {
    TrmParams p = *this;
    p.t_min = lo;
    p.t_max = hi;
    return p;
  }
};

inline constexpr double kWeightTolerance = 1e-12;

}  // namespace detrm::trm
