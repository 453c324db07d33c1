#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace detrm {

enum class Errc {
  // scoring engine
  InvalidParams,
  WeightsNotNormalized,
  EmptyNeighbourSet,
  RaggedMatrix,
  InsufficientRedundancy,
  EmptyAgreementSet,
  RatingOutOfRange,
  InconsistentObservations,

  // ledger
  MalformedTransaction,
  MissingSignature,
  UnknownSigner,
  InvalidSignature,
  HandlerRejection,
  ChainFormat,
  ChainInvalid,

  // contracts
  NotInitialised,
  GenesisAlreadyApplied,
  DuplicateId,
  DuplicateTxId,
  DuplicateLocation,
  NotAnAuthority,
  NotAProducer,
  InvalidRoles,
  MissingCounterSignature,
  InvalidThresholds,
  DuplicateContract,
  UnknownCommodityType,
  DuplicateBatchId,
  UnknownLocation,
  UnknownSource,
  UnknownAsset,
  UnknownParticipant,
  NotOwner,
  SourceConsumed,
  InsufficientQuantity,
  InvalidTerm,
  SelfTrade,
  MissingReportHash,
  UnknownSubject,

  // sensor simulation
  UndefinedEpoch,
  LocationMismatch,
  ModalityMismatch,

  // scenario runner
  ConfigError,
  IoFailure,
  FixtureMissing,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  explicit Error(Errc code) : std::runtime_error(std::string(to_string(code))), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace detrm
