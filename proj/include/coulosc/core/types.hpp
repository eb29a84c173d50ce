#pragma once

#include "coulosc/core/precision.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace coulosc {

/// V(r) = -a/r + b r^2, either in all space or inside a hard wall at r = R.
template <typename Scalar>
struct PotentialSpec {
  Scalar a{0};
  Scalar b{0};
  std::optional<Scalar> wall;  // empty: free problem

  [[nodiscard]] bool confined() const { return wall.has_value(); }
  [[nodiscard]] const Scalar& radius() const { return *wall; }

  static PotentialSpec free(Scalar a, Scalar b) { return {std::move(a), std::move(b), std::nullopt}; }
  static PotentialSpec walled(Scalar a, Scalar b, Scalar radius) {
    return {std::move(a), std::move(b), std::move(radius)};
  }

  template <typename Other>
  [[nodiscard]] PotentialSpec<Other> cast() const {
    PotentialSpec<Other> out;
    out.a = static_cast<Other>(a);
    out.b = static_cast<Other>(b);
    if (wall) out.wall = static_cast<Other>(*wall);
    return out;
  }
};

/// Radial node count n and angular momentum l; nu = n + l + 1.
struct LevelLabel {
  int n = 0;
  int l = 0;

  [[nodiscard]] int nu() const { return n + l + 1; }
  [[nodiscard]] std::string name() const {
    static constexpr char kLetters[] = "spdfghiklmnoqrtuv";
    const char letter = l < static_cast<int>(sizeof(kLetters) - 1) ? kLetters[l] : '?';
    return std::to_string(nu()) + letter;
  }
  friend bool operator==(const LevelLabel&, const LevelLabel&) = default;
  friend auto operator<=>(const LevelLabel&, const LevelLabel&) = default;
};

/// Parses names like "3d" or "10g"; throws std::invalid_argument otherwise.
LevelLabel parse_label(const std::string& name);

enum class SolverKind { AIM, Exact, GridOracle };

inline const char* to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::AIM: return "aim";
    case SolverKind::Exact: return "exact";
    case SolverKind::GridOracle: return "oracle";
  }
  return "?";
}

template <typename Scalar>
struct EigenResult {
  Scalar energy{0};
  LevelLabel label;
  SolverKind solver = SolverKind::AIM;
  int iterations = 0;  // AIM: stabilizing N; oracle: grid refinements
  PrecisionCtx precision_used;
  std::pair<Scalar, Scalar> bracket;
};

// ---------------------------------------------------------------------------
// Errors. Every solver failure carries a stable name and a remediation hint.

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual const char* name() const noexcept { return "SolverError"; }
  [[nodiscard]] virtual const char* hint() const noexcept { return ""; }
};

#define COULOSC_DEFINE_ERROR(Type, Hint)                                         \
  class Type : public SolverError {                                              \
   public:                                                                       \
    using SolverError::SolverError;                                              \
    [[nodiscard]] const char* name() const noexcept override { return #Type; }   \
    [[nodiscard]] const char* hint() const noexcept override { return Hint; }    \
  };

COULOSC_DEFINE_ERROR(DomainError, "evaluate strictly inside (0, R)")
COULOSC_DEFINE_ERROR(OverflowError, "raise --precision-bits")
COULOSC_DEFINE_ERROR(NoRootFound, "widen the search window or raise --max-iter")
COULOSC_DEFINE_ERROR(PrecisionExhausted, "raise --precision-bits or --max-iter, or move --r0 toward the bulk of the wavefunction")
COULOSC_DEFINE_ERROR(NoSolution, "no admissible parameter set; try another fixed value")
COULOSC_DEFINE_ERROR(DegenerateInput, "the constraints force b = 0, which is not admissible")
COULOSC_DEFINE_ERROR(NotConverged, "raise the grid size or the domain length")
COULOSC_DEFINE_ERROR(NoSignChange, "widen the parameter window")

#undef COULOSC_DEFINE_ERROR

}  // namespace coulosc
