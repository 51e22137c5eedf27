#include "crossinject/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace crossinject {

std::string_view to_string(PEMode mode)
{
    return mode == PEMode::Normal ? "normal" : "mixed";
}

std::optional<PEMode> parse_pe_mode(std::string_view name)
{
    if (name == "normal") return PEMode::Normal;
    if (name == "mixed") return PEMode::Mixed;
    return std::nullopt;
}

std::size_t PoissonSystem::boundary_edge_count() const
{
    std::size_t n = 0;
    for (const auto& nb : neighbors)
        for (auto q : nb) n += (q == kBoundary);
    return n;
}

namespace {

constexpr int kDr[4] = {-1, 1, 0, 0};
constexpr int kDc[4] = {0, 0, -1, 1};

bool patch_contains(const SourcePatch& s, int r, int c)
{
    const int pr = r - s.row_offset, pc = c - s.col_offset;
    return pr >= 0 && pc >= 0 && pr < s.pixels.height() && pc < s.pixels.width();
}

double patch_at(const SourcePatch& s, int r, int c, int ch)
{
    return s.pixels.at(r - s.row_offset, c - s.col_offset, ch);
}

}  // namespace

PoissonSystem build_system(const Image& target, const SourcePatch& source, const Placement& placement, PEMode mode)
{
    const int h = target.height(), w = target.width();
    const BinaryMask& omega = placement.omega;
    if (omega.height() != h || omega.width() != w) throw Error("build_system: omega does not match the target");
    if (source.pixels.empty() || !patch_contains(source, placement.box.top, placement.box.left) ||
        !patch_contains(source, placement.box.bottom(), placement.box.right()))
        throw Error("build_system: source patch is not aligned with the placement box");

    PoissonSystem sys;
    sys.raster_height = h;
    sys.raster_width = w;

    std::vector<std::int32_t> index(static_cast<std::size_t>(h) * w, PoissonSystem::kBoundary);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!omega.at(r, c)) continue;
            if (r == 0 || c == 0 || r == h - 1 || c == w - 1)
                throw Error("build_system: omega touches the raster border");
            if (!patch_contains(source, r, c)) throw Error("build_system: source patch does not cover omega");
            index[static_cast<std::size_t>(r) * w + c] = static_cast<std::int32_t>(sys.interior.size());
            sys.interior.push_back({r, c});
        }
    }
    if (sys.interior.empty()) throw Error("build_system: empty omega");

    const std::size_t n = sys.interior.size();
    sys.neighbors.resize(n);
    for (auto& v : sys.rhs) v.assign(n, 0.0);

    std::vector<std::uint8_t> on_boundary(index.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [r, c] = sys.interior[i];
        for (int d = 0; d < 4; ++d) {
            const int qr = r + kDr[d], qc = c + kDc[d];
            const std::size_t q = static_cast<std::size_t>(qr) * w + qc;
            sys.neighbors[i][d] = index[q];
            const bool has_source_grad = patch_contains(source, qr, qc);
            for (int ch = 0; ch < 3; ++ch) {
                double v = has_source_grad ? patch_at(source, r, c, ch) - patch_at(source, qr, qc, ch) : 0.0;
                if (mode == PEMode::Mixed) {
                    const double vt = target.at(r, c, ch) - target.at(qr, qc, ch);
                    if (std::abs(vt) > std::abs(v)) v = vt;
                }
                if (index[q] == PoissonSystem::kBoundary) v += target.at(qr, qc, ch);
                sys.rhs[ch][i] += v;
            }
            if (index[q] == PoissonSystem::kBoundary) on_boundary[q] = 1;
        }
    }

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!on_boundary[static_cast<std::size_t>(r) * w + c]) continue;
            sys.boundary.push_back({r, c});
            sys.boundary_values.push_back({target.at(r, c, 0), target.at(r, c, 1), target.at(r, c, 2)});
        }
    }
    return sys;
}

double residual_max_norm(const PoissonSystem& system, int channel, const std::vector<double>& x)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < system.size(); ++i) {
        double ax = 4.0 * x[i];
        for (auto q : system.neighbors[i])
            if (q != PoissonSystem::kBoundary) ax -= x[static_cast<std::size_t>(q)];
        worst = std::max(worst, std::abs(system.rhs[channel][i] - ax));
    }
    return worst;
}

Image inject(const Image& target, const BinaryMask& fg_mask, const Placement& placement, const SourcePatch& source,
             PEMode mode, const SolveOptions& options)
{
    if (fg_mask.height() != target.height() || fg_mask.width() != target.width())
        throw Error("inject: foreground mask does not match the target");
    if (!mask_and(placement.omega, fg_mask).any())
        throw Rejected(RejectReason::FilteredOut, "inject: pattern lies entirely outside the foreground");

    const PoissonSystem sys = build_system(target, source, placement, mode);
    const auto solution = solve_poisson(sys, options);

    Image out = target;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        const auto [r, c] = sys.interior[i];
        if (!fg_mask.at(r, c)) continue;
        for (int ch = 0; ch < 3; ++ch) out.at(r, c, ch) = std::clamp(solution[ch][i], 0.0, 1.0);
    }
    return out;
}

}  // namespace crossinject
