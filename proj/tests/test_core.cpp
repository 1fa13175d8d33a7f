#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <thread>

#include "bracketforge/core.hpp"
#include "bracketforge/rng.hpp"

using namespace bracketforge;

namespace {
Frame uniform_frame(int w, int h, float r, float g, float b) {
    Frame f(w, h);
    for (std::size_t p = 0; p < f.pixel_count(); ++p) {
        f.data[p * 3] = r;
        f.data[p * 3 + 1] = g;
        f.data[p * 3 + 2] = b;
    }
    return f;
}
}  // namespace

TEST_CASE("luminance uses Rec. 709 weights") {
    const Frame white = uniform_frame(2, 2, 1, 1, 1);
    for (float y : luminance(white)) CHECK(y == Catch::Approx(1.0).margin(1e-7));

    const Frame red = uniform_frame(1, 1, 1, 0, 0);
    CHECK(luminance(red)[0] == Catch::Approx(0.2126).margin(1e-7));

    // Dot-product oracle for an arbitrary color.
    const float r = 0.2f, g = 0.5f, b = 0.1f;
    const double expected = 0.2126 * r + 0.7152 * g + 0.0722 * b;
    const Frame mixed = uniform_frame(3, 2, r, g, b);
    for (float y : luminance(mixed)) CHECK(y == Catch::Approx(expected).margin(1e-6));
}

TEST_CASE("luminance is linear") {
    const Rng rng(11);
    Frame f1(4, 3), f2(4, 3);
    for (std::size_t i = 0; i < f1.data.size(); ++i) {
        f1.data[i] = static_cast<float>(rng.uniform(i));
        f2.data[i] = static_cast<float>(rng.uniform(1000 + i));
    }
    const double a = 0.7, b = -0.3;
    Frame combo(4, 3);
    for (std::size_t i = 0; i < combo.data.size(); ++i)
        combo.data[i] = static_cast<float>(a * f1.data[i] + b * f2.data[i]);
    const auto l1 = luminance(f1), l2 = luminance(f2), lc = luminance(combo);
    for (std::size_t p = 0; p < lc.size(); ++p)
        CHECK(lc[p] == Catch::Approx(a * l1[p] + b * l2[p]).margin(1e-6));
}

TEST_CASE("mean_luminance") {
    CHECK(mean_luminance(uniform_frame(4, 4, 0.5f, 0.5f, 0.5f)) == Catch::Approx(0.5));

    Frame half(2, 1);
    half.data = {0, 0, 0, 1, 1, 1};
    CHECK(mean_luminance(half) == Catch::Approx(0.5));

    Frame two(2, 1);
    two.data = {0.1f, 0.1f, 0.1f, 0.7f, 0.7f, 0.7f};  // gray pixels carry their luminance
    CHECK(mean_luminance(two) == Catch::Approx(0.4).margin(1e-7));

    CHECK_THROWS_AS(mean_luminance(Frame{}), std::invalid_argument);
}

TEST_CASE("counter rng is a pure function of coordinates") {
    const Rng a(42, 7), b(42, 7);
    CHECK(a.bits(0) == b.bits(0));
    CHECK(a.bits(Rng::coord(3, 100, 2, 1)) == b.bits(Rng::coord(3, 100, 2, 1)));
    CHECK(a.bits(1) != Rng(43, 7).bits(1));
    CHECK(a.bits(1) != Rng(42, 8).bits(1));
    CHECK(a.substream(1).bits(5) != a.substream(2).bits(5));
}

TEST_CASE("counter rng is traversal-order and thread-count independent") {
    const Rng rng(5, 0);
    constexpr std::size_t n = 4096;
    std::vector<double> forward(n), scattered(n);
    for (std::size_t i = 0; i < n; ++i) forward[i] = rng.normal(i);

    // Fill from competing threads over disjoint strides.
    std::vector<std::thread> pool;
    for (int t = 0; t < 8; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += 8) scattered[i] = rng.normal(i);
        });
    for (auto& th : pool) th.join();
    CHECK(forward == scattered);
}

TEST_CASE("counter rng distributions are sane") {
    const Rng rng(123);
    double sum = 0, sq = 0;
    constexpr int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal(i);
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(var == Catch::Approx(1.0).margin(0.02));

    double umin = 1, umax = 0, usum = 0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform(1000000 + i);
        umin = std::min(umin, u);
        umax = std::max(umax, u);
        usum += u;
    }
    CHECK(usum / n == Catch::Approx(0.5).margin(0.01));
    CHECK(umin >= 0.0);
    CHECK(umax < 1.0);
}

TEST_CASE("video invariants") {
    Video v;
    v.frames.push_back(Frame(2, 2));
    v.frames.push_back(Frame(2, 2));
    CHECK_NOTHROW(v.validate_dims());
    v.frames.push_back(Frame(3, 2));
    CHECK_THROWS_AS(v.validate_dims(), std::invalid_argument);
}
