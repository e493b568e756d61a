#pragma once

#include <stdexcept>
#include <string>

namespace xmdp {

/// Error categories surfaced by the library. The CLI maps these onto
/// process exit codes (validation vs. solver failures).
enum class Errc {
    // model / input validation
    InvalidTransition,
    UnreachableGoal,
    UndefinedAttribute,
    GoalNotAbsorbing,
    LengthMismatch,
    InvalidArgument,
    ParseError,
    MissingVocabulary,
    NonconvexPenalty,
    UnknownLocation,
    DisconnectedGoal,
    NoProperPolicy,
    // solver / runtime failures
    ImproperPolicy,
    Multichain,
    AmbiguousRecovery,
    CapExceeded,
    SamplingExhausted,
    SolverFailure,
};

const char* to_string(Errc c);

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

/// True for errors that indicate a bad model or bad input rather than a
/// failure while solving a valid model.
bool is_validation_error(Errc c);

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool cond, Errc code, const std::string& message) {
    if (!cond) fail(code, message);
}

} // namespace xmdp
