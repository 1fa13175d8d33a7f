#pragma once

// Debevec-style exposure-bracket merging: per-channel triangle weights over
// the encoded values, applied to exposure-normalized radiance estimates.

#include <stdexcept>

#include "bracketforge/bracket.hpp"
#include "bracketforge/core.hpp"
#include "bracketforge/parallel.hpp"

namespace bracketforge {

inline Frame estimate_radiance(const Frame& v, double exposure) {
    if (!(exposure > 0.0)) throw std::invalid_argument("estimate_radiance: E must be positive");
    Frame r(v.width, v.height);
    const float inv = static_cast<float>(1.0 / exposure);
    parallel_for(v.data.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) r.data[i] = v.data[i] * inv;
    });
    return r;
}

// Triangle weight peaking at mid-gray, floored so fully clipped pixels still
// produce a defined merge.
inline constexpr float kWeightFloor = 1.0f / 255.0f;

inline float hat_weight(float v) {
    const float w = v <= 0.5f ? v : 1.0f - v;
    return w < kWeightFloor ? kWeightFloor : w;
}

inline Video merge_classical(const ExposureBracket& b) {
    Video out;
    out.color_space = ColorSpace::LinearRadiance;
    out.frames.reserve(b.base.frames.size());
    const double exposures[3] = {b.e_minus, b.e_base, b.e_plus};
    for (std::size_t fr = 0; fr < b.base.frames.size(); ++fr) {
        const Frame* v[3] = {&b.minus.frames[fr], &b.base.frames[fr], &b.plus.frames[fr]};
        Frame h(v[0]->width, v[0]->height);
        parallel_for(h.data.size(), [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                double num = 0.0, den = 0.0;
                for (int k = 0; k < 3; ++k) {
                    const double val = v[k]->data[i];
                    const double w = hat_weight(static_cast<float>(val));
                    num += w * (val / exposures[k]);
                    den += w;
                }
                h.data[i] = static_cast<float>(num / den);
            }
        });
        out.frames.push_back(std::move(h));
    }
    return out;
}

}  // namespace bracketforge
