#pragma once

#include <stdexcept>
#include <string>

namespace idemsum {

enum class Errc {
  NotPrime,
  ReducibleModulus,
  DegreeMismatch,
  DivisionByZero,
  FieldMismatch,
  ZeroPolynomial,
  ZeroScale,
  ShapeMismatch,
  NotSquare,
  NotMonic,
  EmptyBlockList,
  NotUnitSubdiagonalHessenberg,
  NotSimilar,
  NotNilpotent,
  SizeConstraintViolated,
  GadgetVerificationFailed,
  UnsupportedStructure,
  TraceMismatch,
  InconsistentSystem,
  NotCyclic,
  TraceNotInPrimeField,
  SizeTooSmall,
  FieldTooLarge,
  WrongCharacteristic,
  NotCoprime,
  EmptyList,
  NoRepresentation,
  NotPrimeField,
  BelowThreshold,
  RangeViolation,
  LastBlockTooSmall,
  DegreeTooSmall,
  BudgetExceeded,
  CapTooLow,
  SignPatternConflict,
  MalformedInput,
  UnknownSuite,
  Internal,
};

inline const char *errc_name(Errc c) {
  switch (c) {
    case Errc::NotPrime: return "NotPrime";
    case Errc::ReducibleModulus: return "ReducibleModulus";
    case Errc::DegreeMismatch: return "DegreeMismatch";
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::FieldMismatch: return "FieldMismatch";
    case Errc::ZeroPolynomial: return "ZeroPolynomial";
    case Errc::ZeroScale: return "ZeroScale";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NotSquare: return "NotSquare";
    case Errc::NotMonic: return "NotMonic";
    case Errc::EmptyBlockList: return "EmptyBlockList";
    case Errc::NotUnitSubdiagonalHessenberg: return "NotUnitSubdiagonalHessenberg";
    case Errc::NotSimilar: return "NotSimilar";
    case Errc::NotNilpotent: return "NotNilpotent";
    case Errc::SizeConstraintViolated: return "SizeConstraintViolated";
    case Errc::GadgetVerificationFailed: return "GadgetVerificationFailed";
    case Errc::UnsupportedStructure: return "UnsupportedStructure";
    case Errc::TraceMismatch: return "TraceMismatch";
    case Errc::InconsistentSystem: return "InconsistentSystem";
    case Errc::NotCyclic: return "NotCyclic";
    case Errc::TraceNotInPrimeField: return "TraceNotInPrimeField";
    case Errc::SizeTooSmall: return "SizeTooSmall";
    case Errc::FieldTooLarge: return "FieldTooLarge";
    case Errc::WrongCharacteristic: return "WrongCharacteristic";
    case Errc::NotCoprime: return "NotCoprime";
    case Errc::EmptyList: return "EmptyList";
    case Errc::NoRepresentation: return "NoRepresentation";
    case Errc::NotPrimeField: return "NotPrimeField";
    case Errc::BelowThreshold: return "BelowThreshold";
    case Errc::RangeViolation: return "RangeViolation";
    case Errc::LastBlockTooSmall: return "LastBlockTooSmall";
    case Errc::DegreeTooSmall: return "DegreeTooSmall";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::CapTooLow: return "CapTooLow";
    case Errc::SignPatternConflict: return "SignPatternConflict";
    case Errc::MalformedInput: return "MalformedInput";
    case Errc::UnknownSuite: return "UnknownSuite";
    case Errc::Internal: return "Internal";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string &msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string &msg) { throw Error(code, msg); }

inline void require(bool cond, Errc code, const std::string &msg) {
  if (!cond) fail(code, msg);
}

}  // namespace idemsum
