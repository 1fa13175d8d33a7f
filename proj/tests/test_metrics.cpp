#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "bracketforge/metrics.hpp"
#include "bracketforge/rng.hpp"

using namespace bracketforge;

namespace {

Video single_frame_video(Frame f) {
    Video v;
    v.color_space = ColorSpace::LinearRadiance;
    v.frames.push_back(std::move(f));
    return v;
}

// Independent transliteration of the vendored PU table: the ST 2084 transfer
// with its published rational constants, rescaled to V(0.005)=0, V(100)=256.
double pu_oracle(double nits) {
    const double m1 = 2610.0 / 16384.0;
    const double m2 = 2523.0 * 128.0 / 4096.0;
    const double c1 = 3424.0 / 4096.0;
    const double c2 = 2413.0 * 32.0 / 4096.0;
    const double c3 = 2392.0 * 32.0 / 4096.0;
    auto pq = [&](double y) {
        const double z = std::pow(y / 10000.0, m1);
        return std::pow((c1 + c2 * z) / (1.0 + c3 * z), m2);
    };
    const double y = std::min(10000.0, std::max(0.005, nits));
    const double a = 256.0 / (pq(100.0) - pq(0.005));
    return a * (pq(y) - pq(0.005));
}

// Luminance whose PU value equals the target, by bisection.
double pu_inverse(double target) {
    double lo = 0.005, hi = 10000.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = std::sqrt(lo * hi);
        if (pu_encode_value(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return std::sqrt(lo * hi);
}

}  // namespace

TEST_CASE("percentile interpolation") {
    std::vector<float> v = {1, 2, 3, 4, 5};
    CHECK(percentile(v, 0) == 1.0);
    CHECK(percentile(v, 100) == 5.0);
    CHECK(percentile(v, 50) == 3.0);
    CHECK(percentile(v, 25) == 2.0);
    CHECK_THROWS_AS(percentile({}, 50), std::invalid_argument);
}

TEST_CASE("preprocess_gt scales the 99.9th percentile to 1000") {
    // Constant video: percentile is the value itself.
    Video v = single_frame_video(Frame(8, 8, 2.0f));
    const Video out = preprocess_gt(v);
    for (float x : out.frames[0].data) CHECK(x == Catch::Approx(1000.0));

    Video already = single_frame_video(Frame(8, 8, 500.0f));
    const Video out2 = preprocess_gt(already);  // scale 2
    for (float x : out2.frames[0].data) CHECK(x == Catch::Approx(1000.0));

    // Mixed content lands inside [1, 1000].
    Frame mixed(32, 32);
    const Rng rng(3);
    for (std::size_t i = 0; i < mixed.data.size(); ++i)
        mixed.data[i] = static_cast<float>(std::exp2(8.0 * rng.uniform(i) - 4.0));
    const Video out3 = preprocess_gt(single_frame_video(mixed));
    float mx = 0, mn = 1e9f;
    for (float x : out3.frames[0].data) {
        mx = std::max(mx, x);
        mn = std::min(mn, x);
    }
    CHECK(mx <= 1000.0f);
    CHECK(mn >= 1.0f);

    CHECK_THROWS_AS(preprocess_gt(single_frame_video(Frame(4, 4, 0.0f))),
                    std::invalid_argument);
}

TEST_CASE("affine_align recovers exact relations") {
    const Rng rng(11);
    Frame g(24, 24);
    for (std::size_t i = 0; i < g.data.size(); ++i)
        g.data[i] = static_cast<float>(1.0 + 900.0 * rng.uniform(i));
    const Video gt = single_frame_video(g);

    const AffineFit identity = affine_align(gt, gt);
    CHECK(identity.a == Catch::Approx(1.0).margin(1e-12));
    CHECK(identity.b == Catch::Approx(0.0).margin(1e-9));

    // pred = 2*gt + 3 -> a = 0.5, b = -1.5.
    Video pred = gt;
    for (float& v : pred.frames[0].data) v = 2.0f * v + 3.0f;
    const AffineFit fit = affine_align(pred, gt);
    CHECK(fit.a == Catch::Approx(0.5).margin(1e-9));
    CHECK(fit.b == Catch::Approx(-1.5).margin(1e-6));
    for (std::size_t i = 0; i < gt.frames[0].data.size(); ++i)
        CHECK(fit.aligned.frames[0].data[i] ==
              Catch::Approx(gt.frames[0].data[i]).epsilon(1e-6));
}

TEST_CASE("affine_align under noise") {
    const Rng rng(12);
    const double a0 = 3.0, b0 = 0.2;
    Frame p(320, 320), g(320, 320);
    for (std::size_t i = 0; i < p.data.size(); ++i) {
        const double x = rng.uniform(i);
        const double noise = 0.01 * rng.normal(1u << 20 | i);  // 1% of range
        p.data[i] = static_cast<float>(x);
        g.data[i] = static_cast<float>(a0 * x + b0 + noise);
    }
    const AffineFit fit = affine_align(single_frame_video(p), single_frame_video(g));
    CHECK(fit.a == Catch::Approx(a0).epsilon(0.01));
    CHECK(fit.b == Catch::Approx(b0).epsilon(0.05));
}

TEST_CASE("affine_align rejects degenerate masks") {
    const Video constant = single_frame_video(Frame(8, 8, 0.5f));
    Video gt = single_frame_video(Frame(8, 8, 1.0f));
    CHECK_THROWS_AS(affine_align(constant, gt), std::invalid_argument);
}

TEST_CASE("pu encoding is strictly monotone and matches the oracle") {
    double prev = -1.0;
    double max_diff = 0.0;
    for (int i = 0; i < 4096; ++i) {
        const double y =
            0.005 * std::pow(10000.0 / 0.005, static_cast<double>(i) / 4095.0);
        const double v = pu_encode_value(y);
        CHECK(v > prev);
        prev = v;
        max_diff = std::max(max_diff, std::abs(v - pu_oracle(y)));
    }
    CHECK(max_diff <= 1e-4);

    CHECK(pu_encode_value(0.005) == 0.0);  // the domain floor by construction
    CHECK(pu_encode_value(100.0) == Catch::Approx(256.0).margin(1e-9));
}

TEST_CASE("pu_psnr identical inputs is infinite") {
    Video v = single_frame_video(Frame(8, 8, 200.0f));
    CHECK(std::isinf(pu_psnr(v, v)));
}

TEST_CASE("pu_psnr uniform one-percent offset is 40 dB") {
    const double peak = pu_display_peak();
    const double v0 = pu_encode_value(50.0);
    const double y0 = 50.0;
    const double y1 = pu_inverse(v0 + 0.01 * peak);

    Video gt = single_frame_video(Frame(16, 16, static_cast<float>(y0)));
    Video pred = single_frame_video(Frame(16, 16, static_cast<float>(y1)));
    CHECK(pu_psnr(pred, gt) == Catch::Approx(40.0).margin(0.01));
}

TEST_CASE("pu_psnr matches a straight-line oracle") {
    const Rng rng(13);
    Frame p(32, 32), g(32, 32);
    for (std::size_t i = 0; i < p.data.size(); ++i) {
        const double y = std::exp2(12.0 * rng.uniform(i) - 2.0);
        g.data[i] = static_cast<float>(y);
        p.data[i] = static_cast<float>(y * (1.0 + 0.1 * rng.normal(4096 + i)));
    }
    const double got = pu_psnr(single_frame_video(p), single_frame_video(g));

    double se = 0.0;
    for (std::size_t i = 0; i < p.data.size(); ++i) {
        const double d = pu_oracle(static_cast<float>(p.data[i])) -
                         pu_oracle(static_cast<float>(g.data[i]));
        se += d * d;
    }
    const double mse = se / static_cast<double>(p.data.size());
    const double peak = pu_oracle(1000.0) - pu_oracle(0.005);
    const double expected = 10.0 * std::log10(peak * peak / mse);
    CHECK(got == Catch::Approx(expected).margin(0.01));
}

TEST_CASE("log_l1 mirrors the merger loss contract") {
    Video a = single_frame_video(Frame(4, 4, 3.0f));
    Video b = single_frame_video(Frame(4, 4, 3.0f));
    CHECK(log_l1(a, b, 5.0) == 0.0);

    const Rng rng(14);
    Frame pf(8, 8), gf(8, 8);
    for (std::size_t i = 0; i < pf.data.size(); ++i) {
        pf.data[i] = static_cast<float>(10.0 * rng.uniform(i));
        gf.data[i] = static_cast<float>(10.0 * rng.uniform(512 + i));
    }
    const Video pred = single_frame_video(pf), gt = single_frame_video(gf);
    const double s = 10.0;
    double expected = 0.0;
    for (std::size_t i = 0; i < pf.data.size(); ++i)
        expected += std::abs(std::log(static_cast<double>(pf.data[i]) / s + 1e-6) -
                             std::log(static_cast<double>(gf.data[i]) / s + 1e-6));
    expected /= static_cast<double>(pf.data.size());
    CHECK(log_l1(pred, gt, s) == Catch::Approx(expected).margin(1e-12));
}

TEST_CASE("reinhard tonemap") {
    const Video zero = single_frame_video(Frame(4, 4, 0.0f));
    for (float v : reinhard_tonemap(zero).frames[0].data) CHECK(v == 0.0f);

    // Gray at luminance 1 maps to display luminance 0.5 before gamma.
    const Video unit = single_frame_video(Frame(4, 4, 1.0f));
    const Video tm = reinhard_tonemap(unit);
    for (float v : tm.frames[0].data)
        CHECK(std::pow(static_cast<double>(v), 2.2) == Catch::Approx(0.5).margin(1e-5));

    // Bounded output, strictly below 1 for finite achromatic input.
    const Rng rng(15);
    Frame big(8, 8);
    for (std::size_t p = 0; p < big.pixel_count(); ++p) {
        const float y = static_cast<float>(std::exp2(20.0 * rng.uniform(p) - 4.0));
        big.data[p * 3] = big.data[p * 3 + 1] = big.data[p * 3 + 2] = y;
    }
    for (float v : reinhard_tonemap(single_frame_video(big)).frames[0].data) {
        CHECK(v >= 0.0f);
        CHECK(v < 1.0f);
    }

    // Saturated colors exceed the gamut under luminance-ratio preservation
    // and are clamped into [0,1].
    Frame blue(1, 1);
    blue.data = {0.0f, 0.0f, 40.0f};
    const float out = reinhard_tonemap(single_frame_video(blue)).frames[0].data[2];
    CHECK(out <= 1.0f);
    CHECK(out >= 0.0f);
}

TEST_CASE("scanline csv") {
    Frame ramp(5, 3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 5; ++x)
            for (int c = 0; c < 3; ++c) ramp.at(x, y, c) = static_cast<float>(x * (c + 1));
    const std::string csv = scanline_csv(ramp, 1);
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "column,r,g,b");
    int col;
    char comma;
    double r, g, b;
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        row >> col >> comma >> r >> comma >> g >> comma >> b;
        CHECK(col == rows);
        CHECK(r == Catch::Approx(col));
        CHECK(g == Catch::Approx(2.0 * col));
        CHECK(b == Catch::Approx(3.0 * col));
        ++rows;
    }
    CHECK(rows == 5);

    CHECK_THROWS_AS(scanline_csv(ramp, 3), std::invalid_argument);
    CHECK_THROWS_AS(scanline_csv(ramp, -1), std::invalid_argument);

    const std::string uniform = scanline_csv(Frame(4, 2, 0.25f), 0);
    std::istringstream uin(uniform);
    std::getline(uin, header);
    while (std::getline(uin, line)) {
        std::istringstream row(line);
        row >> col >> comma >> r >> comma >> g >> comma >> b;
        CHECK(r == 0.25);
        CHECK(g == 0.25);
        CHECK(b == 0.25);
    }
}
