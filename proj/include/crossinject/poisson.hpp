#pragma once

#include "crossinject/error.hpp"
#include "crossinject/imagecore.hpp"
#include "crossinject/placement.hpp"

#include <array>
#include <cstdint>
#include <string_view>
#include <optional>
#include <vector>

namespace crossinject {

/// Guidance-field choice: Normal takes source gradients only, Mixed keeps the
/// larger-magnitude of source and target gradient on every edge.
enum class PEMode { Normal, Mixed };

std::string_view to_string(PEMode mode);
std::optional<PEMode> parse_pe_mode(std::string_view name);

/// Source pixels aligned to the target raster: target pixel (r, c) reads
/// pixels.at(r - row_offset, c - col_offset). Must cover the placement box.
/// Gradients whose far end falls outside the patch are taken as zero.
struct SourcePatch {
    Image pixels;
    int row_offset = 0;
    int col_offset = 0;
};

/// Discrete Poisson system over Omega with Dirichlet values from the target.
///
/// Row p reads 4 f_p - sum_{q in N(p), q in Omega} f_q
///           = sum_{q in N(p), q on boundary} t_q + sum_{q in N(p)} v_pq.
struct PoissonSystem {
    static constexpr std::int32_t kBoundary = -1;

    int raster_height = 0;
    int raster_width = 0;
    std::vector<Location> interior;                       // row-major
    std::vector<std::array<std::int32_t, 4>> neighbors;   // up, down, left, right
    std::array<std::vector<double>, 3> rhs;
    std::vector<Location> boundary;                       // each boundary pixel once, row-major
    std::vector<std::array<double, 3>> boundary_values;

    std::size_t size() const { return interior.size(); }
    std::size_t boundary_edge_count() const;
};

PoissonSystem build_system(const Image& target, const SourcePatch& source, const Placement& placement, PEMode mode);

enum class Preconditioner { Jacobi, Multigrid };

struct SolveOptions {
    double tolerance = 1e-6;  // max-norm of the true residual
    std::size_t max_iterations = 0;  // 0 means 10 * |Omega|
    Preconditioner preconditioner = Preconditioner::Multigrid;
};

struct SolveStats {
    std::array<std::size_t, 3> iterations{};
    std::array<double, 3> residual{};
};

/// Per-channel unknowns over Omega, in system.interior order. Values are not
/// clamped. Throws SolverError when a channel misses the tolerance.
std::array<std::vector<double>, 3> solve_poisson(const PoissonSystem& system, const SolveOptions& options = {},
                                                 SolveStats* stats = nullptr);

/// Max-norm of b - A x for one channel.
double residual_max_norm(const PoissonSystem& system, int channel, const std::vector<double>& x);

class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual) : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Poisson-blended injection followed by the foreground filter: the output
/// equals the target except on Omega ∩ fg, where it takes the clamped
/// solution. Throws Rejected(FilteredOut) if Omega ∩ fg is empty.
Image inject(const Image& target, const BinaryMask& fg_mask, const Placement& placement, const SourcePatch& source,
             PEMode mode, const SolveOptions& options = {});

}  // namespace crossinject
