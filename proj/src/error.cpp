#include "detrm/error.hpp"

namespace detrm {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::WeightsNotNormalized: return "WeightsNotNormalized";
    case Errc::EmptyNeighbourSet: return "EmptyNeighbourSet";
    case Errc::RaggedMatrix: return "RaggedMatrix";
    case Errc::InsufficientRedundancy: return "InsufficientRedundancy";
    case Errc::EmptyAgreementSet: return "EmptyAgreementSet";
    case Errc::RatingOutOfRange: return "RatingOutOfRange";
    case Errc::InconsistentObservations: return "InconsistentObservations";
    case Errc::MalformedTransaction: return "MalformedTransaction";
    case Errc::MissingSignature: return "MissingSignature";
    case Errc::UnknownSigner: return "UnknownSigner";
    case Errc::InvalidSignature: return "InvalidSignature";
    case Errc::HandlerRejection: return "HandlerRejection";
    case Errc::ChainFormat: return "ChainFormat";
    case Errc::ChainInvalid: return "ChainInvalid";
    case Errc::NotInitialised: return "NotInitialised";
    case Errc::GenesisAlreadyApplied: return "GenesisAlreadyApplied";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::DuplicateTxId: return "DuplicateTxId";
    case Errc::DuplicateLocation: return "DuplicateLocation";
    case Errc::NotAnAuthority: return "NotAnAuthority";
    case Errc::NotAProducer: return "NotAProducer";
    case Errc::InvalidRoles: return "InvalidRoles";
    case Errc::MissingCounterSignature: return "MissingCounterSignature";
    case Errc::InvalidThresholds: return "InvalidThresholds";
    case Errc::DuplicateContract: return "DuplicateContract";
    case Errc::UnknownCommodityType: return "UnknownCommodityType";
    case Errc::DuplicateBatchId: return "DuplicateBatchId";
    case Errc::UnknownLocation: return "UnknownLocation";
    case Errc::UnknownSource: return "UnknownSource";
    case Errc::UnknownAsset: return "UnknownAsset";
    case Errc::UnknownParticipant: return "UnknownParticipant";
    case Errc::NotOwner: return "NotOwner";
    case Errc::SourceConsumed: return "SourceConsumed";
    case Errc::InsufficientQuantity: return "InsufficientQuantity";
    case Errc::InvalidTerm: return "InvalidTerm";
    case Errc::SelfTrade: return "SelfTrade";
    case Errc::MissingReportHash: return "MissingReportHash";
    case Errc::UnknownSubject: return "UnknownSubject";
    case Errc::UndefinedEpoch: return "UndefinedEpoch";
    case Errc::LocationMismatch: return "LocationMismatch";
    case Errc::ModalityMismatch: return "ModalityMismatch";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoFailure: return "IoFailure";
    case Errc::FixtureMissing: return "FixtureMissing";
  }
  return "Unknown";
}

}  // namespace detrm
