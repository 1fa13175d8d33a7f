#pragma once

// Ground-truth exposure ladders: clamp(hdr * E_k) at E0 * 2^{+/-ev}, plus the
// per-scene valid exposure range scan and the log-uniform reference draw.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <utility>

#include "bracketforge/core.hpp"
#include "bracketforge/parallel.hpp"
#include "bracketforge/rng.hpp"
#include "bracketforge/sdrsim.hpp"

namespace bracketforge {

struct ExposureBracket {
    Video minus, base, plus;  // LinearDisplay, clean (no noise/CRF/quantization)
    double e_minus = 0.0, e_base = 0.0, e_plus = 0.0;
    double ev_spacing = 4.0;

    int frame_count() const { return base.frame_count(); }
};

inline ExposureBracket make_bracket(const Video& hdr, double e0, double ev = 4.0) {
    if (!(e0 > 0.0)) throw std::invalid_argument("make_bracket: E0 must be positive");
    ExposureBracket b;
    b.ev_spacing = ev;
    b.e_base = e0;
    b.e_minus = e0 * std::exp2(-ev);
    b.e_plus = e0 * std::exp2(ev);
    const std::size_t n = hdr.frames.size();
    b.minus = scale_exposure(hdr, std::vector<double>(n, b.e_minus), /*clip=*/true);
    b.base = scale_exposure(hdr, std::vector<double>(n, b.e_base), /*clip=*/true);
    b.plus = scale_exposure(hdr, std::vector<double>(n, b.e_plus), /*clip=*/true);
    return b;
}

// 8-bit clip thresholds: a value quantizes to code 0 below 1/510 and to code
// 255 at or above 1 - 1/510.
inline constexpr double kBlackClip = 1.0 / 510.0;
inline constexpr double kWhiteClip = 1.0 - 1.0 / 510.0;

namespace detail {

inline double clipped_fraction(const std::vector<float>& lum, double exposure, bool white) {
    std::size_t clipped = 0;
    for (float y : lum) {
        const double v = exposure * static_cast<double>(y);
        if (white ? (v >= kWhiteClip) : (v < kBlackClip)) ++clipped;
    }
    return static_cast<double>(clipped) / static_cast<double>(lum.size());
}

// Smallest exposure (white) / largest exposure (black) where the clipped
// fraction crosses the threshold, bisected in log2 to 1e-4 relative.
inline double bisect_clip_exposure(const std::vector<float>& lum, double threshold, bool white) {
    double lo = std::exp2(-30.0), hi = std::exp2(30.0);
    auto crossed = [&](double e) { return clipped_fraction(lum, e, white) >= threshold; };
    if (white) {
        if (!crossed(hi)) {
            std::cerr << "bracketforge: warning: white-clip fraction never reaches "
                      << threshold << "; using upper exposure bound\n";
            return hi;
        }
        if (crossed(lo)) return lo;
    } else {
        if (crossed(hi)) {
            std::cerr << "bracketforge: warning: black-clip fraction stays above " << threshold
                      << " at every exposure; using upper exposure bound\n";
            return hi;
        }
        if (!crossed(lo)) return lo;
    }
    // Invariant: exactly one endpoint is on the crossed side.
    while (hi / lo > 1.0 + 1e-4) {
        const double mid = std::sqrt(lo * hi);
        const bool c = crossed(mid);
        if (white ? c : !c)
            hi = mid;
        else
            lo = mid;
    }
    return std::sqrt(lo * hi);
}

}  // namespace detail

// Per-scene exposure range from the first frame's luminance distribution:
// e_min clips 10% of pixels to black, e_max clips 30% to white.
inline std::pair<double, double> exposure_range(const Frame& frame) {
    const std::vector<float> lum = luminance(frame);
    bool any_positive = false;
    for (float y : lum)
        if (y > 0.0f) any_positive = true;
    if (!any_positive) throw std::invalid_argument("exposure_range: all-zero frame");

    const double e_min = detail::bisect_clip_exposure(lum, 0.10, /*white=*/false);
    const double e_max = detail::bisect_clip_exposure(lum, 0.30, /*white=*/true);
    return {e_min, e_max};
}

// Uniform in log2 between the bounds.
inline double sample_reference_exposure(std::pair<double, double> range, RngSequence& seq) {
    auto [e_min, e_max] = range;
    if (!(e_min > 0.0) || !(e_max > 0.0))
        throw std::invalid_argument("sample_reference_exposure: non-positive bounds");
    if (e_min >= e_max) {
        if (e_min > e_max)
            std::cerr << "bracketforge: warning: degenerate exposure range, using e_min\n";
        return e_min;
    }
    const double lo = std::log2(e_min), hi = std::log2(e_max);
    return std::exp2(lo + (hi - lo) * seq.uniform());
}

}  // namespace bracketforge
