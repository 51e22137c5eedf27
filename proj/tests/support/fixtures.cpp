#include "fixtures.hpp"

#include "crossinject/error.hpp"
#include "crossinject/image_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>

namespace crossinject::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag)
{
    static std::uint64_t counter = 0;
    const auto stamp = mix64(reinterpret_cast<std::uintptr_t>(this) ^ ++counter ^
                             static_cast<std::uint64_t>(std::chrono::steady_clock::now().time_since_epoch().count()));
    path_ = fs::temp_directory_path() / ("crossinject_" + tag + "_" + std::to_string(stamp % 1000000007ULL));
    fs::remove_all(path_);
    fs::create_directories(path_);
}

TempDir::~TempDir()
{
    std::error_code ec;
    fs::remove_all(path_, ec);
}

Image make_texture(int height, int width, std::uint64_t seed)
{
    Rng rng(seed);
    Image img(height, width);
    double base[3], fx[3], fy[3], ph[3];
    for (int ch = 0; ch < 3; ++ch) {
        base[ch] = rng.uniform_real(0.3, 0.7);
        fx[ch] = rng.uniform_real(0.01, 0.08);
        fy[ch] = rng.uniform_real(0.01, 0.08);
        ph[ch] = rng.uniform_real(0.0, 6.28);
    }
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            for (int ch = 0; ch < 3; ++ch) {
                const double wave = 0.08 * std::sin(fx[ch] * c + ph[ch]) + 0.06 * std::cos(fy[ch] * r - ph[ch]);
                const double noise = rng.uniform_real(-0.02, 0.02);
                img.at(r, c, ch) = std::clamp(base[ch] + wave + noise, 0.0, 1.0);
            }
    return img;
}

Image random_image(int height, int width, Rng& rng)
{
    Image img(height, width);
    for (auto& v : img.data()) v = rng.uniform_real(0.0, 1.0);
    return img;
}

BinaryMask random_region(int height, int width, std::size_t max_pixels, Rng& rng)
{
    BinaryMask m(height, width);
    std::vector<Location> frontier;
    const Location start{1 + static_cast<int>(rng.uniform_index(height - 2)),
                         1 + static_cast<int>(rng.uniform_index(width - 2))};
    m.at(start.row, start.col) = 1;
    frontier.push_back(start);
    std::size_t count = 1;
    const std::size_t goal = 1 + rng.uniform_index(max_pixels);
    while (count < goal && !frontier.empty()) {
        const std::size_t k = rng.uniform_index(frontier.size());
        const Location p = frontier[k];
        const int d = static_cast<int>(rng.uniform_index(4));
        const int dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, -1, 1};
        const Location q{p.row + dr[d], p.col + dc[d]};
        const bool outside = q.row < 1 || q.col < 1 || q.row > height - 2 || q.col > width - 2;
        if (outside || m.at(q.row, q.col)) {
            if (rng.uniform_index(8) == 0) frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(k));
            continue;
        }
        m.at(q.row, q.col) = 1;
        frontier.push_back(q);
        ++count;
    }
    return m;
}

void write_anomaly_pair(const fs::path& image_path, const fs::path& mask_path, AnomalyClass cls, int extent,
                        std::uint64_t seed)
{
    Rng rng(mix64(seed));
    const int margin = 10 + static_cast<int>(rng.uniform_index(40));
    const int side = extent + 2 * margin;
    Image img = make_texture(side, side, seed ^ 0x5bd1e995ULL);
    BinaryMask mask(side, side);

    const double cy = margin + (extent - 1) / 2.0, cx = cy;
    const double half = (extent - 1) / 2.0;
    switch (cls) {
    case AnomalyClass::Scratch:
    case AnomalyClass::Crack: {
        // Thick diagonal stroke from corner to corner of the extent box.
        const double thickness = std::max(4.0, extent / 14.0);
        const double angle = rng.uniform_real(0.6, 0.97);
        const double dy = std::sin(angle), dx = std::cos(angle);
        for (int r = margin; r < margin + extent; ++r)
            for (int c = margin; c < margin + extent; ++c) {
                const double py = r - cy, px = c - cx;
                const double dist = std::abs(py * dx - px * dy);
                const double along = std::abs(py * dy + px * dx);
                if (dist <= thickness / 2 && along <= half) mask.at(r, c) = 1;
            }
        break;
    }
    case AnomalyClass::Hole:
    case AnomalyClass::Orifice:
        for (int r = margin; r < margin + extent; ++r)
            for (int c = margin; c < margin + extent; ++c)
                if ((r - cy) * (r - cy) + (c - cx) * (c - cx) <= half * half + 0.25) mask.at(r, c) = 1;
        break;
    default: {
        const double minor = half * rng.uniform_real(0.45, 0.9);
        for (int r = margin; r < margin + extent; ++r)
            for (int c = margin; c < margin + extent; ++c) {
                const double u = (c - cx) / std::max(half, 0.5), v = (r - cy) / std::max(minor, 0.5);
                if (u * u + v * v <= 1.0) mask.at(r, c) = 1;
            }
        break;
    }
    }
    if (!mask.any()) mask.at(margin, margin) = 1;

    double tint[3];
    for (auto& t : tint) t = rng.uniform_real(-0.45, 0.25);
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) {
            if (!mask.at(r, c)) continue;
            const double grain = 0.12 * std::sin(0.7 * r) * std::cos(0.55 * c);
            for (int ch = 0; ch < 3; ++ch)
                img.at(r, c, ch) = std::clamp(img.at(r, c, ch) + tint[ch] + grain, 0.0, 1.0);
        }
    write_png(image_path, img);
    write_mask_png(mask_path, mask);
}

Corpus write_corpus(const fs::path& root, const CorpusOptions& opts)
{
    Corpus corpus;
    corpus.normal_dir = root / "normal";
    corpus.manifest = root / "manifest.jsonl";
    fs::create_directories(corpus.normal_dir);
    fs::create_directories(root / "anomalies");

    Rng rng(opts.seed);
    for (int i = 0; i < opts.normal_count; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "normal_%03d.png", i);
        write_png(corpus.normal_dir / name, make_texture(opts.normal_height, opts.normal_width, rng.next()));
    }

    static const char* kSources[] = {"collected", "mvtec", "visa"};
    std::ofstream manifest(corpus.manifest);
    for (int i = 0; i < opts.anomaly_count; ++i) {
        const AnomalyClass cls = kAllAnomalyClasses[static_cast<std::size_t>(i) % kAllAnomalyClasses.size()];
        const int extent = opts.min_extent + static_cast<int>(rng.uniform_index(opts.max_extent - opts.min_extent + 1));
        const std::string id = "a" + std::to_string(i);
        write_anomaly_pair(root / "anomalies" / (id + ".png"), root / "anomalies" / (id + "_mask.png"), cls, extent,
                           rng.next());
        nlohmann::json rec = {{"id", id},
                              {"image", "anomalies/" + id + ".png"},
                              {"mask", "anomalies/" + id + "_mask.png"},
                              {"class", std::string(to_string(cls))},
                              {"source", kSources[i % 3]}};
        manifest << rec.dump() << '\n';
    }
    return corpus;
}

std::array<std::vector<double>, 3> dense_poisson_oracle(const Image& target, const SourcePatch& source,
                                                        const BinaryMask& omega, PEMode mode)
{
    const int h = target.height(), w = target.width();
    std::vector<Location> cells;
    std::vector<int> slot(static_cast<std::size_t>(h) * w, -1);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (omega.at(r, c)) {
                slot[static_cast<std::size_t>(r) * w + c] = static_cast<int>(cells.size());
                cells.push_back({r, c});
            }
    const std::size_t n = cells.size();
    auto in_patch = [&](int r, int c) {
        const int pr = r - source.row_offset, pc = c - source.col_offset;
        return pr >= 0 && pc >= 0 && pr < source.pixels.height() && pc < source.pixels.width();
    };
    auto g = [&](int r, int c, int ch) { return source.pixels.at(r - source.row_offset, c - source.col_offset, ch); };

    std::array<std::vector<double>, 3> out;
    for (int ch = 0; ch < 3; ++ch) {
        // Augmented matrix [A | b].
        std::vector<double> a(n * (n + 1), 0.0);
        auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * (n + 1) + j]; };
        for (std::size_t i = 0; i < n; ++i) {
            const auto [r, c] = cells[i];
            A(i, i) = 4.0;
            const Location nbrs[4] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
            for (const auto& q : nbrs) {
                double v = in_patch(q.row, q.col) ? g(r, c, ch) - g(q.row, q.col, ch) : 0.0;
                const double vt = target.at(r, c, ch) - target.at(q.row, q.col, ch);
                if (mode == PEMode::Mixed && std::abs(vt) > std::abs(v)) v = vt;
                A(i, n) += v;
                const int j = slot[static_cast<std::size_t>(q.row) * w + q.col];
                if (j >= 0) A(i, static_cast<std::size_t>(j)) -= 1.0;
                else A(i, n) += target.at(q.row, q.col, ch);
            }
        }
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            for (std::size_t i = k + 1; i < n; ++i)
                if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
            if (piv != k)
                for (std::size_t j = 0; j <= n; ++j) std::swap(A(k, j), A(piv, j));
            for (std::size_t i = k + 1; i < n; ++i) {
                const double f = A(i, k) / A(k, k);
                if (f == 0.0) continue;
                for (std::size_t j = k; j <= n; ++j) A(i, j) -= f * A(k, j);
            }
        }
        out[ch].assign(n, 0.0);
        for (std::size_t i = n; i-- > 0;) {
            double s = A(i, n);
            for (std::size_t j = i + 1; j < n; ++j) s -= A(i, j) * out[ch][j];
            out[ch][i] = s / A(i, i);
        }
    }
    return out;
}

bool files_identical(const fs::path& a, const fs::path& b)
{
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    if (!fa || !fb) return false;
    return std::equal(std::istreambuf_iterator<char>(fa), std::istreambuf_iterator<char>(),
                      std::istreambuf_iterator<char>(fb), std::istreambuf_iterator<char>());
}

std::string compare_trees(const fs::path& a, const fs::path& b, const std::vector<std::string>& ignore)
{
    auto listing = [&](const fs::path& root) {
        std::vector<fs::path> files;
        for (const auto& e : fs::recursive_directory_iterator(root)) {
            if (!e.is_regular_file()) continue;
            const fs::path rel = fs::relative(e.path(), root);
            if (std::find(ignore.begin(), ignore.end(), rel.string()) != ignore.end()) continue;
            files.push_back(rel);
        }
        std::sort(files.begin(), files.end());
        return files;
    };
    const auto la = listing(a), lb = listing(b);
    if (la != lb) return "file lists differ (" + std::to_string(la.size()) + " vs " + std::to_string(lb.size()) + ")";
    for (const auto& rel : la)
        if (!files_identical(a / rel, b / rel)) return "content differs: " + rel.string();
    return {};
}

}  // namespace crossinject::testing
