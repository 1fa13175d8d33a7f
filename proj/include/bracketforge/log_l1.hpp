#pragma once

// Log-space L1 distance between radiance videos, normalized by the maximum
// scene radiance s:  mean |log(H/s + eps) - log(Hhat/s + eps)|.
// Used both as the merger training loss and as a standalone metric.

#include <cmath>
#include <stdexcept>

#include "bracketforge/core.hpp"

namespace bracketforge {

inline constexpr double kLogLossEps = 1e-6;

inline double log_l1_loss(const Video& h, const Video& h_ref, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("log_l1_loss: s must be positive");
    if (h.frames.size() != h_ref.frames.size())
        throw std::invalid_argument("log_l1_loss: frame count mismatch");
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t fr = 0; fr < h.frames.size(); ++fr) {
        const Frame& a = h.frames[fr];
        const Frame& b = h_ref.frames[fr];
        if (a.data.size() != b.data.size())
            throw std::invalid_argument("log_l1_loss: frame size mismatch");
        for (std::size_t i = 0; i < a.data.size(); ++i)
            sum += std::abs(std::log(a.data[i] / s + kLogLossEps) -
                            std::log(b.data[i] / s + kLogLossEps));
        count += a.data.size();
    }
    return sum / static_cast<double>(count);
}

inline double max_radiance(const Video& v) {
    double mx = 0.0;
    for (const Frame& f : v.frames)
        for (float x : f.data) mx = std::max(mx, static_cast<double>(x));
    return mx;
}

}  // namespace bracketforge
