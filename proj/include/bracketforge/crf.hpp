#pragma once

// Parametric camera response curve f(x) = (1+sigma) * x^n / (x^n + sigma)
// with its analytic inverse, applied per pixel over [0,1]. Parameters are
// drawn from n ~ N(0.9, 0.1), sigma ~ N(0.6, 0.1), resampled until
// n >= 0.5 and sigma >= 0.2 so every sampled curve is monotone and
// numerically invertible.

#include <cmath>
#include <stdexcept>

#include "bracketforge/core.hpp"
#include "bracketforge/parallel.hpp"
#include "bracketforge/rng.hpp"

namespace bracketforge {

struct CrfParams {
    double n = 0.9;
    double sigma = 0.6;
};

inline float crf_forward(float x, const CrfParams& p) {
    const double xn = std::pow(static_cast<double>(x), p.n);
    return static_cast<float>((1.0 + p.sigma) * xn / (xn + p.sigma));
}

inline float crf_inverse(float y, const CrfParams& p) {
    const double yd = static_cast<double>(y);
    return static_cast<float>(std::pow(p.sigma * yd / (1.0 + p.sigma - yd), 1.0 / p.n));
}

inline Video apply_crf(const Video& video, const CrfParams& p) {
    if (p.n <= 0.0 || p.sigma <= 0.0)
        throw std::invalid_argument("apply_crf: n and sigma must be positive");
    Video out;
    out.color_space = ColorSpace::CrfEncoded;
    out.frames.reserve(video.frames.size());
    for (const Frame& f : video.frames) {
        for (float v : f.data)
            if (!(v >= 0.0f && v <= 1.0f))
                throw std::invalid_argument("apply_crf: input outside [0,1]");
        Frame g(f.width, f.height);
        parallel_for(f.data.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) g.data[i] = crf_forward(f.data[i], p);
        });
        out.frames.push_back(std::move(g));
    }
    return out;
}

inline Video invert_crf(const Video& video, const CrfParams& p) {
    if (p.n <= 0.0 || p.sigma <= 0.0)
        throw std::invalid_argument("invert_crf: n and sigma must be positive");
    Video out;
    out.color_space = ColorSpace::LinearDisplay;
    out.frames.reserve(video.frames.size());
    for (const Frame& f : video.frames) {
        for (float v : f.data)
            if (!(v >= 0.0f && v <= 1.0f))
                throw std::invalid_argument("invert_crf: input outside [0,1]");
        Frame g(f.width, f.height);
        parallel_for(f.data.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) g.data[i] = crf_inverse(f.data[i], p);
        });
        out.frames.push_back(std::move(g));
    }
    return out;
}

inline CrfParams sample_crf(RngSequence& seq) {
    CrfParams p;
    do p.n = 0.9 + 0.1 * seq.normal();
    while (p.n < 0.5);
    do p.sigma = 0.6 + 0.1 * seq.normal();
    while (p.sigma < 0.2);
    return p;
}

inline CrfParams sample_crf(const Rng& rng) {
    RngSequence seq(rng.substream(0x63726600 /* "crf" */));
    return sample_crf(seq);
}

}  // namespace bracketforge
