#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sft {

enum class Errc {
    BudgetExhausted,
    MixedGroups,
    SizeLimit,
    SupportNotCovered,
    InconsistentPeriod,
    CoverageGap,
    NotMultiEnded,
    TruncationTooSmall,
    DisjointnessFailure,
    NeedLargerPatch,
    VerificationFailed,
    LipschitzViolation,
    PathDependent,
    WordProblemUnknown,
    NotQuasiSurjective,
    NotPeriodic,
    DomainTooSmall,
    InvalidArgument,
    Parse,
};

std::string_view to_string(Errc code);

/// Every library failure is reported through this type; `code()` is stable
/// and is what the CLI maps onto exit statuses.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace sft
