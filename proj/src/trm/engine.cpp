#include "detrm/trm/engine.hpp"

#include <algorithm>
#include <cmath>

#include "detrm/error.hpp"

namespace detrm::trm {

void TrmParams::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw Error(Errc::InvalidParams, "gamma must lie in (0, 1]");
  }
  if (!(delta_min < delta_max)) {
    throw Error(Errc::InvalidParams, "delta_min must be below delta_max");
  }
  if (!(t_min < t_max)) {
    throw Error(Errc::InvalidParams, "t_min must be below t_max");
  }
  for (double w : {weights.trust, weights.participant, weights.endorsement}) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw Error(Errc::InvalidParams, "reputation weights must lie in [0, 1]");
    }
  }
  if (std::abs(weights.sum() - 1.0) > kWeightTolerance) {
    throw Error(Errc::WeightsNotNormalized, "w_t + w_T + w_e must equal 1");
  }
  if (y_min_sensors < 2) {
    throw Error(Errc::InvalidParams, "y_min_sensors must be at least 2");
  }
  if (!(support_epsilon >= 0.0)) {
    throw Error(Errc::InvalidParams, "support_epsilon must be non-negative");
  }
}

double delta_weight(double value, const TrmParams& params) noexcept {
  return (params.t_min < value && value < params.t_max) ? params.delta_max : params.delta_min;
}

bool supports(const Observation& other, const Observation& target, const TrmParams& params) noexcept {
  return std::abs(other.value - target.value) <= params.support_epsilon;
}

double compute_evidence(const Observation& target, std::span<const Observation> neighbours,
                        const TrmParams& params) {
  if (neighbours.empty()) {
    throw Error(Errc::EmptyNeighbourSet, "sensor " + target.sensor_id + " has no neighbours");
  }
  double vote = 0.0;
  for (const auto& n : neighbours) {
    vote += (supports(n, target, params) ? 1.0 : -1.0) * n.confidence;
  }
  const double evidence = vote / static_cast<double>(neighbours.size());
  if (params.evidence_mode == EvidenceMode::clamp_unit) {
    return std::clamp(evidence, 0.0, 1.0);
  }
  return evidence;
}

namespace {

void check_row(std::span<const Observation> row, const TrmParams& params) {
  if (row.size() < params.y_min_sensors) {
    throw Error(Errc::InsufficientRedundancy, std::to_string(row.size()) + " readings, need " +
                                                  std::to_string(params.y_min_sensors));
  }
  const auto& first = row.front();
  for (const auto& obs : row) {
    if (obs.epoch != first.epoch || obs.location_id != first.location_id) {
      throw Error(Errc::InconsistentObservations, "row mixes epochs or locations");
    }
    if (!(obs.confidence >= 0.0 && obs.confidence <= 1.0)) {
      throw Error(Errc::InconsistentObservations, "confidence of " + obs.sensor_id + " outside [0, 1]");
    }
  }
}

double clamp_trust(double raw, const TrmParams& params) {
  return std::clamp(raw, params.delta_min, params.delta_max);
}

}  // namespace

double row_contribution(std::span<const Observation> row, const TrmParams& params) {
  check_row(row, params);
  std::vector<Observation> neighbours;
  neighbours.reserve(row.size() - 1);
  double sum = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    neighbours.clear();
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k != j) neighbours.push_back(row[k]);
    }
    const double evidence = compute_evidence(row[j], neighbours, params);
    sum += delta_weight(row[j].value, params) * row[j].confidence * evidence;
  }
  return sum / static_cast<double>(row.size());
}

double commodity_trust_batch(const ObservationMatrix& matrix, const TrmParams& params) {
  if (matrix.rows.empty()) return 0.0;

  const auto& head = matrix.rows.front();
  for (const auto& row : matrix.rows) {
    if (row.size() != head.size()) {
      throw Error(Errc::RaggedMatrix, "rows differ in sensor count");
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j].sensor_id != head[j].sensor_id) {
        throw Error(Errc::RaggedMatrix, "column " + std::to_string(j) + " changes sensor");
      }
    }
  }

  // Newest row carries weight gamma^0; walk backwards.
  double raw = 0.0;
  double weight = 1.0;
  for (auto it = matrix.rows.rbegin(); it != matrix.rows.rend(); ++it) {
    raw += weight * row_contribution(*it, params);
    weight *= params.gamma;
  }
  raw *= (1.0 - params.gamma);
  return clamp_trust(raw, params);
}

CommodityTrust commodity_trust_step(const CommodityTrust& prev, std::span<const Observation> row,
                                    const TrmParams& params) {
  CommodityTrust next;
  next.raw = params.gamma * prev.raw + (1.0 - params.gamma) * row_contribution(row, params);
  next.trust = clamp_trust(next.raw, params);
  next.observations = prev.observations + 1;
  return next;
}

double trade_sigma(const TradeOutcome& outcome) {
  if (outcome.agreements.empty()) {
    throw Error(Errc::EmptyAgreementSet, "trade has no agreements");
  }
  double sum = 0.0;
  for (const auto& a : outcome.agreements) {
    if (!(a.score >= 0.0 && a.score <= 1.0)) {
      throw Error(Errc::InvalidTerm, "agreement score outside [0, 1]");
    }
    sum += (a.fulfilled ? 1.0 : -1.0) * a.score;
  }
  return sum / static_cast<double>(outcome.agreements.size());
}

double participant_trust_step(double prev, double sigma, double gamma) noexcept {
  return gamma * prev + (1.0 - gamma) * sigma;
}

double participant_trust_batch(std::span<const double> sigmas, double gamma) noexcept {
  double sum = 0.0;
  double weight = 1.0;
  for (auto it = sigmas.rbegin(); it != sigmas.rend(); ++it) {
    sum += weight * *it;
    weight *= gamma;
  }
  return (1.0 - gamma) * sum;
}

double endorsement_step(double prev, double rating, double gamma) {
  if (!(rating >= 0.0 && rating <= 1.0)) {
    throw Error(Errc::RatingOutOfRange, "endorsement rating must lie in [0, 1]");
  }
  return gamma * prev + (1.0 - gamma) * rating;
}

double endorsement_batch(std::span<const double> ratings, double gamma) {
  for (double r : ratings) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw Error(Errc::RatingOutOfRange, "endorsement rating must lie in [0, 1]");
    }
  }
  return participant_trust_batch(ratings, gamma);
}

ReputationBreakdown reputation_breakdown(std::span<const double> commodity_trusts,
                                         double participant_trust, double endorsement,
                                         const TrmParams& params) {
  const auto& w = params.weights;
  if (std::abs(w.sum() - 1.0) > kWeightTolerance) {
    throw Error(Errc::WeightsNotNormalized, "w_t + w_T + w_e must equal 1");
  }
  ReputationBreakdown out;
  if (!commodity_trusts.empty()) {
    double sum = 0.0;
    for (double t : commodity_trusts) sum += t;
    out.commodity_mean = sum / static_cast<double>(commodity_trusts.size());
  }
  out.participant_trust = participant_trust;
  out.endorsement = endorsement;
  out.reputation = w.trust * out.commodity_mean + w.participant * participant_trust +
                   w.endorsement * endorsement;
  return out;
}

double reputation(std::span<const double> commodity_trusts, double participant_trust,
                  double endorsement, const TrmParams& params) {
  return reputation_breakdown(commodity_trusts, participant_trust, endorsement, params).reputation;
}

}  // namespace detrm::trm
