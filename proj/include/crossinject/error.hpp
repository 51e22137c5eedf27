#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crossinject {

/// Fatal or contract-violation error raised by any stage.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Why a single synthesis attempt was abandoned. The pipeline resamples on
/// every one of these without touching the quota counters.
enum class RejectReason {
    TrivialPattern,
    QuotaFull,
    SourceUnreadable,
    PatternVanished,
    PatternTooSmall,
    NoPlacement,
    FilteredOut,
    SolverFailed,
    EmptyMask,
};

std::string_view to_string(RejectReason reason);

/// Reject-and-resample signal. Recoverable at the attempt level.
class Rejected : public Error {
public:
    Rejected(RejectReason reason, const std::string& what)
        : Error(what), reason_(reason) {}

    RejectReason reason() const noexcept { return reason_; }

private:
    RejectReason reason_;
};

}  // namespace crossinject
