#pragma once

// Test-only helpers: temporary directories, a synthetic anomaly corpus and
// an independent dense Poisson solver used as an oracle.

#include "crossinject/dataset.hpp"
#include "crossinject/imagecore.hpp"
#include "crossinject/poisson.hpp"
#include "crossinject/rng.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace crossinject::testing {

class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Smooth colored texture with mild noise.
Image make_texture(int height, int width, std::uint64_t seed);

/// Random image in [0, 1].
Image random_image(int height, int width, Rng& rng);

/// Random 4-connected-ish blob grown from a seed pixel, kept off the border.
BinaryMask random_region(int height, int width, std::size_t max_pixels, Rng& rng);

struct CorpusOptions {
    int normal_count = 3;
    int normal_height = 256;
    int normal_width = 256;
    int anomaly_count = 24;
    std::uint64_t seed = 7;
    /// Anomaly extents are drawn from [min_extent, max_extent] px.
    int min_extent = 30;
    int max_extent = 240;
};

struct Corpus {
    std::filesystem::path normal_dir;
    std::filesystem::path manifest;
};

/// Writes normal/, anomalies/ and manifest.jsonl under root. Sources are
/// tagged "collected", "mvtec" and "visa" in rotation.
Corpus write_corpus(const std::filesystem::path& root, const CorpusOptions& opts = {});

/// One source image/mask pair whose defect spans about `extent` pixels
/// along its longer bbox side.
void write_anomaly_pair(const std::filesystem::path& image_path, const std::filesystem::path& mask_path,
                        AnomalyClass cls, int extent, std::uint64_t seed);

/// Dense Gaussian elimination on the Poisson equations assembled directly
/// from the definition; returns per-channel values over omega in row-major
/// order.
std::array<std::vector<double>, 3> dense_poisson_oracle(const Image& target, const SourcePatch& source,
                                                         const BinaryMask& omega, PEMode mode);

bool files_identical(const std::filesystem::path& a, const std::filesystem::path& b);

/// Compares every regular file under the two roots, except names listed in
/// `ignore`. Returns the first difference, or an empty string.
std::string compare_trees(const std::filesystem::path& a, const std::filesystem::path& b,
                          const std::vector<std::string>& ignore = {});

}  // namespace crossinject::testing
