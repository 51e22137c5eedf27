#include "crossinject/error.hpp"
#include "crossinject/scalematch.hpp"

#include "../support/fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace crossinject;

namespace {

BinaryMask box_mask(int h, int w, int top, int left, int bh, int bw)
{
    BinaryMask m(h, w);
    for (int r = top; r < top + bh; ++r)
        for (int c = left; c < left + bw; ++c) m.at(r, c) = 1;
    return m;
}

}  // namespace

TEST_CASE("compute_str")
{
    CHECK(compute_str(box_mask(100, 100, 5, 5, 40, 60), box_mask(256, 256, 10, 20, 200, 150)) ==
          doctest::Approx(0.3).epsilon(1e-15));
    const BinaryMask same = box_mask(50, 50, 3, 3, 20, 30);
    CHECK(compute_str(same, same) == 1.0);
    const double r = compute_str(box_mask(50, 50, 0, 0, 15, 10), box_mask(256, 256, 0, 0, 200, 200));
    CHECK(r == doctest::Approx(0.075));
    CHECK(classify_scale(r) == ScaleClass::Trivial);
    CHECK_THROWS_AS(compute_str(BinaryMask(5, 5), same), Error);
}

TEST_CASE("classify_scale thresholds")
{
    CHECK(classify_scale(0.0999) == ScaleClass::Trivial);
    CHECK(classify_scale(0.1) == ScaleClass::Small);
    CHECK(classify_scale(0.2999) == ScaleClass::Small);
    CHECK(classify_scale(0.3) == ScaleClass::Medium);
    CHECK(classify_scale(0.6999) == ScaleClass::Medium);
    CHECK(classify_scale(0.7) == ScaleClass::Large);
    CHECK(classify_scale(3.0) == ScaleClass::Large);
}

TEST_CASE("classification is invariant under uniform integer upscaling of both masks")
{
    Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const BinaryMask a = testing::random_region(24, 24, 80, rng);
        const BinaryMask f = testing::random_region(24, 24, 300, rng);
        const int k = 2 + static_cast<int>(rng.uniform_index(3));
        BinaryMask ak(24 * k, 24 * k), fk(24 * k, 24 * k);
        for (int r = 0; r < 24 * k; ++r)
            for (int c = 0; c < 24 * k; ++c) {
                ak.at(r, c) = a.at(r / k, c / k);
                fk.at(r, c) = f.at(r / k, c / k);
            }
        CHECK(compute_str(ak, fk) == doctest::Approx(compute_str(a, f)));
        CHECK(classify_scale(compute_str(ak, fk)) == classify_scale(compute_str(a, f)));
    }
}

TEST_CASE("select_synthesis_str branches")
{
    Rng rng(1);
    SUBCASE("large source fills large first")
    {
        Quota q({4, 3, 3});
        const auto plan = select_synthesis_str(0.8, q, rng);
        REQUIRE(plan);
        CHECK(plan->scale == ScaleClass::Large);
        CHECK(plan->synthesis_str >= 0.7);
        CHECK(plan->synthesis_str <= 1.0);
        CHECK(q.filled() == ScaleCounts{1, 0, 0});
    }
    SUBCASE("medium source falls back to small")
    {
        Quota q({4, 1, 3});
        q.increment(ScaleClass::Medium);
        const auto plan = select_synthesis_str(0.5, q, rng);
        REQUIRE(plan);
        CHECK(plan->scale == ScaleClass::Small);
        CHECK(plan->synthesis_str >= 0.1);
        CHECK(plan->synthesis_str < 0.3);
        CHECK(q.filled() == ScaleCounts{0, 1, 1});
    }
    SUBCASE("trivial source is discarded")
    {
        Quota q({4, 3, 3});
        CHECK(!select_synthesis_str(0.05, q, rng));
        CHECK(q.filled() == ScaleCounts{});
    }
    SUBCASE("small source with a full small quota")
    {
        Quota q({1, 1, 0});
        CHECK(!select_synthesis_str(0.2, q, rng));
    }
    SUBCASE("large source falls through to small")
    {
        Quota q({0, 0, 1});
        const auto plan = select_synthesis_str(0.8, q, rng);
        REQUIRE(plan);
        CHECK(plan->scale == ScaleClass::Small);
    }
}

TEST_CASE("plans never upscale the class and stay inside their interval")
{
    Rng rng(2);
    for (int trial = 0; trial < 2000; ++trial) {
        Quota q({static_cast<int>(rng.uniform_index(3)), static_cast<int>(rng.uniform_index(3)),
                 static_cast<int>(rng.uniform_index(3))});
        const double str = rng.uniform_real(0.01, 1.5);
        const auto plan = select_synthesis_str(str, q, rng);
        if (!plan) continue;
        CHECK(static_cast<int>(plan->scale) <= static_cast<int>(classify_scale(str)));
        CHECK(plan->scale != ScaleClass::Trivial);
        CHECK(classify_scale(plan->synthesis_str) == plan->scale);
        CHECK(classify_scale(plan->ratio * plan->str + (plan->scale == ScaleClass::Large ? 0.0 : -1e-9)) ==
              plan->scale);
        CHECK(std::abs(plan->ratio * plan->str - plan->synthesis_str) <= 1e-9);
        CHECK(q.filled()[plan->scale] <= q.targets()[plan->scale]);
    }
}

TEST_CASE("unbounded supply fills the quota exactly")
{
    Rng rng(3);
    Quota q({4, 3, 3});
    int guard = 0;
    while (!q.satisfied() && ++guard < 10000) select_synthesis_str(rng.uniform_real(0.01, 1.2), q, rng);
    CHECK(q.filled() == ScaleCounts{4, 3, 3});
}

TEST_CASE("resize_for_injection")
{
    Rng rng(4);
    SUBCASE("arithmetic")
    {
        const Image img = testing::random_image(100, 200, rng);
        const BinaryMask m = box_mask(100, 200, 10, 10, 60, 120);
        const ScalePlan plan{0.5, 0.25, 0.5, ScaleClass::Small};
        const ResizedPattern out = resize_for_injection(img, m, plan);
        CHECK(out.image.height() == 50);
        CHECK(out.image.width() == 100);
        CHECK(out.mask.height() == 50);
    }
    SUBCASE("identity")
    {
        const Image img = testing::random_image(40, 30, rng);
        const BinaryMask m = testing::random_region(40, 30, 300, rng);
        const ResizedPattern out = resize_for_injection(img, m, {0.4, 0.4, 1.0, ScaleClass::Medium});
        CHECK(out.image == img);
        CHECK(out.mask == m);
    }
    SUBCASE("too small")
    {
        const Image img = testing::random_image(100, 100, rng);
        const BinaryMask m = box_mask(100, 100, 10, 10, 20, 20);
        try {
            resize_for_injection(img, m, {0.5, 0.05, 0.1, ScaleClass::Trivial});
            FAIL("expected rejection");
        } catch (const Rejected& e) {
            CHECK(e.reason() == RejectReason::PatternTooSmall);
        }
    }
}

TEST_CASE("resized pattern re-measures to R' within one pixel of the foreground scale")
{
    // Oracle: recompute minbb of the resized mask and compare the new ratio
    // with the requested R'. Patterns are unions of solid rectangles.
    Rng rng(2025);
    const BinaryMask fg = box_mask(256, 256, 0, 0, 256, 256);
    const int s_f = 256;
    int checked = 0;
    while (checked < 100) {
        const int h = 40 + static_cast<int>(rng.uniform_index(260));
        const int w = 40 + static_cast<int>(rng.uniform_index(260));
        BinaryMask m(h, w);
        const int pieces = 1 + static_cast<int>(rng.uniform_index(3));
        for (int k = 0; k < pieces; ++k) {
            const int bh = 4 + static_cast<int>(rng.uniform_index(h - 8));
            const int bw = 4 + static_cast<int>(rng.uniform_index(w - 8));
            const int top = static_cast<int>(rng.uniform_index(h - bh));
            const int left = static_cast<int>(rng.uniform_index(w - bw));
            for (int r = top; r < top + bh; ++r)
                for (int c = left; c < left + bw; ++c) m.at(r, c) = 1;
        }
        const double str = compute_str(m, fg);
        Quota q({4, 3, 3});
        const auto plan = select_synthesis_str(str, q, rng);
        if (!plan) continue;
        const Image img(h, w, 0.5);
        try {
            const ResizedPattern out = resize_for_injection(img, m, *plan);
            CHECK(std::abs(compute_str(out.mask, fg) - plan->synthesis_str) <= 1.0 / s_f + 1e-12);
            ++checked;
        } catch (const Rejected&) {
        }
    }
}
