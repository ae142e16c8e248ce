#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gscat {

enum class ErrorCode {
  // graph_core
  NotSquare,
  TooFewVertices,
  AsymmetryExceedsTolerance,
  NegativeWeight,
  NonzeroDiagonal,
  Disconnected,
  LengthMismatch,
  InvalidPermutation,
  InvalidBound,
  DisconnectedAfterPerturbation,
  SelfLoopRequested,
  VertexOutOfRange,
  DisconnectedAfterFlip,
  // spectral / filters / scattering
  NoConvergence,
  KernelDimensionNotOne,
  DegenerateSpectrum,
  InvalidScaleParameter,
  UnknownScale,
  ShapeMismatch,
  RepeatedEigenvalues,
  // verify
  GapTooSmall,
  CannotSampleConnected,
  // datasets / io
  InvalidProbability,
  BadMagic,
  TruncatedFile,
  CountMismatch,
  RaggedRows,
  NonNumeric,
  DuplicateEdge,
  MalformedLine,
  Io,
  // learn
  KTooLarge,
  StepTooLarge,
  EmptyClass,
  InvalidLabel,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gscat
