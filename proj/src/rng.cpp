#include "crossinject/rng.hpp"

#include "crossinject/error.hpp"

#include <cmath>

namespace crossinject {

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng Rng::child(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    std::uint64_t k = mix64(seed);
    k = mix64(k ^ mix64(a + 0x632be59bd9b4e019ULL));
    k = mix64(k ^ mix64(b + 0x8cb92ba72f3d8dd7ULL));
    return Rng(k);
}

std::uint64_t Rng::next()
{
    return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
}

std::uint64_t Rng::uniform_index(std::uint64_t n)
{
    if (n == 0) throw Error("uniform_index: empty range");
    // Lemire's multiply-shift with rejection; unbiased.
    std::uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            x = next();
            m = static_cast<__uint128_t>(x) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double Rng::uniform_real(double lo, double hi)
{
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    double v = lo + (hi - lo) * u;
    if (v >= hi) v = std::nextafter(hi, lo);
    return v;
}

}  // namespace crossinject
