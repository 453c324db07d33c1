#pragma once

// Trust and reputation scoring: commodity trust from co-located sensor
// readings, participant trust from trade fulfilment, endorsement
// aggregation and the reputation blend. Everything here is pure.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "detrm/trm/params.hpp"

namespace detrm::trm {

struct Observation {
  std::string sensor_id;
  double value = 0.0;       // °C
  double confidence = 0.0;  // [0, 1]
  std::uint64_t epoch = 0;
  std::string location_id;

  bool operator==(const Observation&) const = default;
};

/// o x p readings: one row per epoch, one column per sensor. Rows must
/// list the same sensors in the same order.
struct ObservationMatrix {
  std::vector<std::vector<Observation>> rows;
};

struct AgreementScore {
  double score = 0.0;  // tc_j in [0, 1]
  bool fulfilled = false;
};

struct TradeOutcome {
  std::vector<AgreementScore> agreements;
};

/// Streaming commodity score. `raw` is the unclamped recurrence value;
/// `trust` is what gets reported. A fresh lot has trust 0.
struct CommodityTrust {
  double raw = 0.0;
  double trust = 0.0;
  std::uint64_t observations = 0;

  bool operator==(const CommodityTrust&) const = default;
};

/// Behaviour and endorsement state of one participant.
struct ParticipantScores {
  double participant_trust = 0.0;
  double endorsement = 0.0;
  double commodity_mean = 0.0;
  double reputation = 0.0;
  std::uint64_t trades = 0;
  std::uint64_t endorsements = 0;

  bool operator==(const ParticipantScores&) const = default;
};

struct ReputationBreakdown {
  double commodity_mean = 0.0;
  double participant_trust = 0.0;
  double endorsement = 0.0;
  double reputation = 0.0;
};

/// delta_max strictly inside (t_min, t_max), delta_min otherwise.
double delta_weight(double value, const TrmParams& params) noexcept;

/// Whether `other` corroborates `target` (|difference| <= support_epsilon).
bool supports(const Observation& other, const Observation& target, const TrmParams& params) noexcept;

/// Confidence-weighted vote of the neighbours on `target`.
/// Throws EmptyNeighbourSet.
double compute_evidence(const Observation& target, std::span<const Observation> neighbours,
                        const TrmParams& params);

/// (1/p) * sum_j delta_j * C_j * E_j for one epoch row, E_j taken against
/// the other p-1 readings. Throws InsufficientRedundancy,
/// InconsistentObservations.
double row_contribution(std::span<const Observation> row, const TrmParams& params);

double commodity_trust_batch(const ObservationMatrix& matrix, const TrmParams& params);

CommodityTrust commodity_trust_step(const CommodityTrust& prev, std::span<const Observation> row,
                                    const TrmParams& params);

/// Throws EmptyAgreementSet, InvalidTerm.
double trade_sigma(const TradeOutcome& outcome);

double participant_trust_step(double prev, double sigma, double gamma) noexcept;
double participant_trust_batch(std::span<const double> sigmas, double gamma) noexcept;

/// Throws RatingOutOfRange.
double endorsement_step(double prev, double rating, double gamma);
double endorsement_batch(std::span<const double> ratings, double gamma);

/// Weighted blend; an empty commodity set contributes 0.
/// Throws WeightsNotNormalized.
double reputation(std::span<const double> commodity_trusts, double participant_trust,
                  double endorsement, const TrmParams& params);

ReputationBreakdown reputation_breakdown(std::span<const double> commodity_trusts,
                                         double participant_trust, double endorsement,
                                         const TrmParams& params);

}  // namespace detrm::trm
