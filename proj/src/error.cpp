#include "gscat/error.hpp"

namespace gscat {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::TooFewVertices: return "TooFewVertices";
    case ErrorCode::AsymmetryExceedsTolerance: return "AsymmetryExceedsTolerance";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidPermutation: return "InvalidPermutation";
    case ErrorCode::InvalidBound: return "InvalidBound";
    case ErrorCode::DisconnectedAfterPerturbation: return "DisconnectedAfterPerturbation";
    case ErrorCode::SelfLoopRequested: return "SelfLoopRequested";
    case ErrorCode::VertexOutOfRange: return "VertexOutOfRange";
    case ErrorCode::DisconnectedAfterFlip: return "DisconnectedAfterFlip";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::KernelDimensionNotOne: return "KernelDimensionNotOne";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::InvalidScaleParameter: return "InvalidScaleParameter";
    case ErrorCode::UnknownScale: return "UnknownScale";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::RepeatedEigenvalues: return "RepeatedEigenvalues";
    case ErrorCode::GapTooSmall: return "GapTooSmall";
    case ErrorCode::CannotSampleConnected: return "CannotSampleConnected";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::NonNumeric: return "NonNumeric";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::Io: return "Io";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::InvalidLabel: return "InvalidLabel";
  }
  return "Unknown";
}

}  // namespace gscat
