#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pinncert {

enum class Errc {
  NonSquare,
  NotSymmetric,
  NoConvergence,
  Empty,
  RankDeficient,
  NonFinite,
  BadSize,
  QuadratureFailure,
  ModeMismatch,
  SchurFailure,
  BadEpsilon,
  ViolationFound,
  TooShort,
  ShapeMismatch,
  InvalidTrace,
  InvalidConfig,
  GridMismatch,
  EmptyBatch,
  DivergedLoss,
  NoNormalTriangle,
  AmbiguousTag,
  DegenerateTriangle,
  Parse,
  Io,
};

constexpr std::string_view to_string(Errc e) {
  switch (e) {
    case Errc::NonSquare: return "NonSquare";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::Empty: return "Empty";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::NonFinite: return "NonFinite";
    case Errc::BadSize: return "BadSize";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::ModeMismatch: return "ModeMismatch";
    case Errc::SchurFailure: return "SchurFailure";
    case Errc::BadEpsilon: return "BadEpsilon";
    case Errc::ViolationFound: return "ViolationFound";
    case Errc::TooShort: return "TooShort";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::InvalidTrace: return "InvalidTrace";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::EmptyBatch: return "EmptyBatch";
    case Errc::DivergedLoss: return "DivergedLoss";
    case Errc::NoNormalTriangle: return "NoNormalTriangle";
    case Errc::AmbiguousTag: return "AmbiguousTag";
    case Errc::DegenerateTriangle: return "DegenerateTriangle";
    case Errc::Parse: return "Parse";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  Errc code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  Errc code_;
  std::string message_;
};

}  // namespace pinncert
