#include "crossinject/error.hpp"

namespace crossinject {

std::string_view to_string(RejectReason reason)
{
    switch (reason) {
    case RejectReason::TrivialPattern: return "trivial_pattern";
    case RejectReason::QuotaFull: return "quota_full";
    case RejectReason::SourceUnreadable: return "source_unreadable";
    case RejectReason::PatternVanished: return "pattern_vanished";
    case RejectReason::PatternTooSmall: return "pattern_too_small";
    case RejectReason::NoPlacement: return "no_placement";
    case RejectReason::FilteredOut: return "filtered_out";
    case RejectReason::SolverFailed: return "solver_failed";
    case RejectReason::EmptyMask: return "empty_mask";
    }
    return "unknown";
}

}  // namespace crossinject
