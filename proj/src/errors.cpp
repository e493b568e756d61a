#include "xmdp/errors.hpp"

namespace xmdp {

const char* to_string(Errc c) {
    switch (c) {
    case Errc::InvalidTransition: return "InvalidTransition";
    case Errc::UnreachableGoal: return "UnreachableGoal";
    case Errc::UndefinedAttribute: return "UndefinedAttribute";
    case Errc::GoalNotAbsorbing: return "GoalNotAbsorbing";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ParseError: return "ParseError";
    case Errc::MissingVocabulary: return "MissingVocabulary";
    case Errc::NonconvexPenalty: return "NonconvexPenalty";
    case Errc::UnknownLocation: return "UnknownLocation";
    case Errc::DisconnectedGoal: return "DisconnectedGoal";
    case Errc::NoProperPolicy: return "NoProperPolicy";
    case Errc::ImproperPolicy: return "ImproperPolicy";
    case Errc::Multichain: return "Multichain";
    case Errc::AmbiguousRecovery: return "AmbiguousRecovery";
    case Errc::CapExceeded: return "CapExceeded";
    case Errc::SamplingExhausted: return "SamplingExhausted";
    case Errc::SolverFailure: return "SolverFailure";
    }
    return "UnknownError";
}

bool is_validation_error(Errc c) {
    switch (c) {
    case Errc::InvalidTransition:
    case Errc::UnreachableGoal:
    case Errc::UndefinedAttribute:
    case Errc::GoalNotAbsorbing:
    case Errc::LengthMismatch:
    case Errc::InvalidArgument:
    case Errc::ParseError:
    case Errc::MissingVocabulary:
    case Errc::NonconvexPenalty:
    case Errc::UnknownLocation:
    case Errc::DisconnectedGoal:
    case Errc::NoProperPolicy:
        return true;
    default:
        return false;
    }
}

} // namespace xmdp
