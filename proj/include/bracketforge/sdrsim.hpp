#pragma once

// Radiance-to-SDR degradation pipeline: exposure scaling, sensor noise in the
// linear domain, clip to [0,1], parametric CRF, then clip + 8-bit quantize.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bracketforge/core.hpp"
#include "bracketforge/crf.hpp"
#include "bracketforge/noise.hpp"
#include "bracketforge/parallel.hpp"
#include "bracketforge/rng.hpp"

namespace bracketforge {

// SDR frames plus the metadata that produced them.
struct SdrVideo {
    Video video;                    // CrfEncoded, clipped and quantized
    std::vector<double> exposures;  // one per frame
    CrfParams crf;
    std::uint64_t seed = 0;
};

inline float clip01(float v) { return std::clamp(v, 0.0f, 1.0f); }

// x -> round(255 * clamp(x, 0, 1)) / 255, rounding half away from zero.
inline Video clip_quantize(const Video& video) {
    Video out = video;
    for (Frame& f : out.frames) {
        parallel_for(f.data.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i)
                f.data[i] = std::round(255.0f * clip01(f.data[i])) / 255.0f;
        });
    }
    if (out.color_space == ColorSpace::LinearRadiance)
        out.color_space = ColorSpace::LinearDisplay;
    return out;
}

inline Video scale_exposure(const Video& hdr, const std::vector<double>& exposures, bool clip) {
    if (exposures.size() != hdr.frames.size())
        throw std::invalid_argument("scale_exposure: one exposure per frame required");
    Video out;
    out.color_space = ColorSpace::LinearDisplay;
    out.frames.reserve(hdr.frames.size());
    for (std::size_t fr = 0; fr < hdr.frames.size(); ++fr) {
        const double ev = exposures[fr];
        if (!(ev > 0.0)) throw std::invalid_argument("scale_exposure: exposure must be positive");
        const Frame& src = hdr.frames[fr];
        Frame dst(src.width, src.height);
        parallel_for(src.data.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                const float v = static_cast<float>(src.data[i] * ev);
                dst.data[i] = clip ? clip01(v) : v;
            }
        });
        out.frames.push_back(std::move(dst));
    }
    return out;
}

enum class ExposureMode { Over, Under, Auto };

// Per-frame exposure protocols. Over/Under fix one exposure from the first
// frame (targets 0.70 and 0.01 mean luminance); Auto targets 0.25 per frame
// and smooths with a 3-tap uniform moving average, replicating endpoints.
inline std::vector<double> protocol_exposures(const Video& hdr, ExposureMode mode) {
    if (hdr.frames.empty()) throw std::invalid_argument("protocol_exposures: empty video");
    const int frame_count = hdr.frame_count();

    auto target_over_mean = [&](double target, const Frame& f) {
        const double mean = mean_luminance(f);
        if (!(mean > 0.0))
            throw std::invalid_argument("protocol_exposures: zero mean luminance");
        return target / mean;
    };

    std::vector<double> exposures(frame_count);
    switch (mode) {
    case ExposureMode::Over:
        std::fill(exposures.begin(), exposures.end(), target_over_mean(0.70, hdr.frames[0]));
        break;
    case ExposureMode::Under:
        std::fill(exposures.begin(), exposures.end(), target_over_mean(0.01, hdr.frames[0]));
        break;
    case ExposureMode::Auto: {
        std::vector<double> raw(frame_count);
        for (int i = 0; i < frame_count; ++i)
            raw[i] = target_over_mean(0.25, hdr.frames[i]);
        for (int i = 0; i < frame_count; ++i) {
            const double prev = raw[std::max(0, i - 1)];
            const double next = raw[std::min(frame_count - 1, i + 1)];
            exposures[i] = (prev + raw[i] + next) / 3.0;
        }
        break;
    }
    }
    return exposures;
}

inline SdrVideo simulate_sdr_input(const Video& hdr, const std::vector<double>& exposures,
                                   const CrfParams& crf, const NoiseParams& noise,
                                   const Rng& rng) {
    Video scaled = scale_exposure(hdr, exposures, /*clip=*/false);
    Video noisy = add_sensor_noise(scaled, noise, rng);
    for (Frame& f : noisy.frames)
        for (float& v : f.data) v = clip01(v);
    Video encoded = apply_crf(noisy, crf);
    SdrVideo out;
    out.video = clip_quantize(encoded);
    out.exposures = exposures;
    out.crf = crf;
    out.seed = rng.seed();
    return out;
}

inline SdrVideo simulate_sdr_input(const Video& hdr, double exposure, const CrfParams& crf,
                                   const NoiseParams& noise, const Rng& rng) {
    return simulate_sdr_input(hdr, std::vector<double>(hdr.frames.size(), exposure), crf, noise,
                              rng);
}

}  // namespace bracketforge
