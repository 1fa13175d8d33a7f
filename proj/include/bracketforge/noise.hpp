#pragma once

// Heteroscedastic Poisson-Gaussian sensor noise in the linear domain:
//   x' = x + sqrt(sigma_s^2 * x + sigma_r^2) * eps
// where eps is temporally correlated per pixel/channel by an AR(1) process
//   eps_i = rho * eps_{i-1} + sqrt(1 - rho^2) * u_i,   u_i ~ N(0, 1),
// with rho = 0 on the first frame so the marginal variance is 1 everywhere.
// Innovations come from the counter RNG at (frame, pixel, channel), so the
// field is reproducible under any pixel-level parallelism.

#include <cmath>
#include <stdexcept>

#include "bracketforge/core.hpp"
#include "bracketforge/parallel.hpp"
#include "bracketforge/rng.hpp"

namespace bracketforge {

struct NoiseParams {
    double sigma_s = 0.0;  // shot
    double sigma_r = 0.0;  // read
    double rho = 0.5;      // temporal correlation

    void validate() const {
        if (sigma_s < 0.0 || sigma_r < 0.0)
            throw std::invalid_argument("NoiseParams: negative sigma");
        if (!(rho >= 0.0 && rho < 1.0))
            throw std::invalid_argument("NoiseParams: rho must be in [0,1)");
    }
};

inline NoiseParams sample_noise_params(RngSequence& seq) {
    NoiseParams p;
    p.sigma_s = 0.05 * seq.uniform();
    p.sigma_r = 0.02 * seq.uniform();
    return p;
}

inline double noise_std(float x, const NoiseParams& p) {
    return std::sqrt(p.sigma_s * p.sigma_s * static_cast<double>(x) + p.sigma_r * p.sigma_r);
}

inline Video add_sensor_noise(const Video& video, const NoiseParams& p, const Rng& rng) {
    p.validate();
    for (const Frame& f : video.frames)
        for (float v : f.data)
            if (!(v >= 0.0f)) throw std::invalid_argument("add_sensor_noise: negative input");

    Video out = video;
    if (video.frames.empty()) return out;
    if (p.sigma_s == 0.0 && p.sigma_r == 0.0) return out;

    const std::size_t values = video.frames.front().data.size();
    const double carry = p.rho;
    const double innov = std::sqrt(1.0 - p.rho * p.rho);
    const Rng noise_rng = rng.substream(0x6E6F6973 /* "nois" */);

    // Parallel over pixel/channel slots; the AR scan runs over frames inside.
    parallel_for(values, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const std::uint64_t pixel = i / 3;
            const std::uint64_t channel = i % 3;
            double eps = noise_rng.normal(Rng::coord(0, pixel, channel));
            out.frames[0].data[i] +=
                static_cast<float>(noise_std(video.frames[0].data[i], p) * eps);
            for (std::size_t fr = 1; fr < video.frames.size(); ++fr) {
                const double u = noise_rng.normal(Rng::coord(fr, pixel, channel));
                eps = carry * eps + innov * u;
                out.frames[fr].data[i] +=
                    static_cast<float>(noise_std(video.frames[fr].data[i], p) * eps);
            }
        }
    });
    return out;
}

}  // namespace bracketforge
