#include <catch_amalgamated.hpp>

#include <cmath>

#include "bracketforge/bracket.hpp"
#include "bracketforge/synth.hpp"

using namespace bracketforge;

namespace {
Video uniform_radiance(int frames, int w, int h, float value) {
    Video v;
    v.color_space = ColorSpace::LinearRadiance;
    for (int i = 0; i < frames; ++i) v.frames.push_back(Frame(w, h, value));
    return v;
}
}  // namespace

TEST_CASE("make_bracket ladder") {
    const Video hdr = uniform_radiance(2, 4, 4, 2.0f);
    const ExposureBracket b = make_bracket(hdr, 0.02);
    CHECK(b.e_minus == Catch::Approx(0.00125));
    CHECK(b.e_base == 0.02);
    CHECK(b.e_plus == Catch::Approx(0.32));

    // Power-of-two ladder arithmetic is exact.
    CHECK(b.e_plus / b.e_base == 16.0);
    CHECK(b.e_base / b.e_minus == 16.0);

    CHECK(b.minus.frames[0].data[0] == Catch::Approx(0.0025).margin(1e-9));
    CHECK(b.base.frames[0].data[0] == Catch::Approx(0.04).margin(1e-9));
    CHECK(b.plus.frames[0].data[0] == Catch::Approx(0.64).margin(1e-7));

    const ExposureBracket clipped = make_bracket(uniform_radiance(1, 2, 2, 100.0f), 0.02);
    CHECK(clipped.plus.frames[0].data[0] == 1.0f);

    CHECK_THROWS_AS(make_bracket(hdr, 0.0), std::invalid_argument);
}

TEST_CASE("unclipped bracket pixels recover radiance") {
    RngSequence seq(Rng(21));
    BlobSceneOptions opt;
    opt.frames = 1;
    opt.width = 16;
    opt.height = 16;
    const Video hdr = make_blob_scene(opt, seq);
    const ExposureBracket b = make_bracket(hdr, 0.05);
    const Video* vids[3] = {&b.minus, &b.base, &b.plus};
    const double exposures[3] = {b.e_minus, b.e_base, b.e_plus};
    for (int k = 0; k < 3; ++k)
        for (std::size_t i = 0; i < hdr.frames[0].data.size(); ++i) {
            const float v = vids[k]->frames[0].data[i];
            if (v < 1.0f)
                CHECK(v / exposures[k] ==
                      Catch::Approx(hdr.frames[0].data[i]).epsilon(1e-6).margin(1e-9));
        }
}

TEST_CASE("exposure_range on a uniform frame") {
    const Frame f(8, 8, 1.0f);
    const auto [e_min, e_max] = exposure_range(f);
    // Every pixel white-clips at exactly E = 1 - 1/510.
    CHECK(e_max == Catch::Approx(1.0 - 1.0 / 510.0).epsilon(2e-4));
    // Every pixel black-clips below E = 1/510.
    CHECK(e_min == Catch::Approx(1.0 / 510.0).epsilon(2e-4));
}

TEST_CASE("exposure_range on a two-point distribution") {
    // 20% of pixels at luminance 0.001, 80% at 1.0: the black fraction stays
    // at 0.2 until E reaches 1/(510 * 0.001).
    Frame f(10, 10);
    for (std::size_t p = 0; p < f.pixel_count(); ++p) {
        const float y = p < 20 ? 0.001f : 1.0f;
        f.data[p * 3] = f.data[p * 3 + 1] = f.data[p * 3 + 2] = y;
    }
    const auto [e_min, e_max] = exposure_range(f);
    CHECK(e_min == Catch::Approx(1.0 / (510.0 * 0.001)).epsilon(2e-4));
    CHECK(e_min == Catch::Approx(1.9608).epsilon(1e-3));
    // The bright 80% cohort alone crosses the 30% white threshold.
    CHECK(e_max == Catch::Approx(1.0 - 1.0 / 510.0).epsilon(2e-4));
}

TEST_CASE("exposure_range scale covariance") {
    RngSequence seq(Rng(33));
    BlobSceneOptions opt;
    opt.frames = 1;
    opt.width = 12;
    opt.height = 12;
    const Video hdr = make_blob_scene(opt, seq);
    Frame doubled = hdr.frames[0];
    for (float& v : doubled.data) v *= 2.0f;
    const auto [lo1, hi1] = exposure_range(hdr.frames[0]);
    const auto [lo2, hi2] = exposure_range(doubled);
    CHECK(lo2 == Catch::Approx(lo1 / 2.0).epsilon(5e-4));
    CHECK(hi2 == Catch::Approx(hi1 / 2.0).epsilon(5e-4));
}

TEST_CASE("exposure_range edge cases") {
    CHECK_THROWS_AS(exposure_range(Frame(4, 4, 0.0f)), std::invalid_argument);
}

TEST_CASE("clip fractions are monotone in exposure") {
    RngSequence seq(Rng(57));
    BlobSceneOptions opt;
    opt.frames = 1;
    opt.width = 12;
    opt.height = 12;
    const Video hdr = make_blob_scene(opt, seq);
    const std::vector<float> lum = luminance(hdr.frames[0]);
    double prev_white = -1.0, prev_black = 2.0;
    for (int i = -20; i <= 20; ++i) {
        const double e = std::exp2(static_cast<double>(i) / 2.0);
        std::size_t white = 0, black = 0;
        for (float y : lum) {
            if (e * y >= kWhiteClip) ++white;
            if (e * y < kBlackClip) ++black;
        }
        const double fw = static_cast<double>(white) / lum.size();
        const double fb = static_cast<double>(black) / lum.size();
        CHECK(fw >= prev_white);
        CHECK(fb <= prev_black);
        prev_white = fw;
        prev_black = fb;
    }
}

TEST_CASE("sample_reference_exposure") {
    RngSequence seq(Rng(3));
    CHECK(sample_reference_exposure({1.0, 1.0}, seq) == 1.0);

    for (int i = 0; i < 50; ++i) {
        const double e = sample_reference_exposure({0.25, 4.0}, seq);
        CHECK(e >= 0.25);
        CHECK(e <= 4.0);
    }
    RngSequence again(Rng(3));
    (void)sample_reference_exposure({1.0, 1.0}, again);
    // Reproducible under the same seed and draw position.
    RngSequence s1(Rng(8)), s2(Rng(8));
    CHECK(sample_reference_exposure({0.5, 8.0}, s1) ==
          sample_reference_exposure({0.5, 8.0}, s2));

    CHECK_THROWS_AS(sample_reference_exposure({-1.0, 2.0}, seq), std::invalid_argument);

    // Uniform in log2: mean of log2(E) over (1, 16) is 2.
    RngSequence mc(Rng(555));
    double sum = 0;
    constexpr int kDraws = 100000;
    for (int i = 0; i < kDraws; ++i)
        sum += std::log2(sample_reference_exposure({1.0, 16.0}, mc));
    CHECK(sum / kDraws == Catch::Approx(2.0).margin(0.02));
}
