#pragma once

// Toy latent space: 2x2 average pooling of RGB frames plus a constant
// channel. No autoencoder — the mechanism under test is latent-agnostic.

#include <stdexcept>
#include <vector>

#include "bracketforge/core.hpp"

namespace bracketforge {

struct LatentVideo {
    static constexpr int kChannels = 4;
    int frames = 0, height = 0, width = 0;
    std::vector<double> data;  // [frame][channel][y][x]

    LatentVideo() = default;
    LatentVideo(int f, int h, int w)
        : frames(f), height(h), width(w),
          data(static_cast<std::size_t>(f) * kChannels * h * w, 0.0) {}

    std::size_t frame_stride() const { return static_cast<std::size_t>(kChannels) * height * width; }
    std::size_t values_per_frame() const { return frame_stride(); }

    double& at(int f, int c, int y, int x) {
        return data[f * frame_stride() + (static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double at(int f, int c, int y, int x) const {
        return data[f * frame_stride() + (static_cast<std::size_t>(c) * height + y) * width + x];
    }
};

inline LatentVideo latentize(const Video& video) {
    if (video.frames.empty()) throw std::invalid_argument("latentize: empty video");
    const int w = video.width(), h = video.height();
    if (w % 2 != 0 || h % 2 != 0)
        throw std::invalid_argument("latentize: dimensions must be even");
    LatentVideo out(video.frame_count(), h / 2, w / 2);
    for (int f = 0; f < out.frames; ++f) {
        const Frame& fr = video.frames[f];
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < out.height; ++y)
                for (int x = 0; x < out.width; ++x)
                    out.at(f, c, y, x) = 0.25 * (fr.at(2 * x, 2 * y, c) + fr.at(2 * x + 1, 2 * y, c) +
                                                 fr.at(2 * x, 2 * y + 1, c) +
                                                 fr.at(2 * x + 1, 2 * y + 1, c));
        for (int y = 0; y < out.height; ++y)
            for (int x = 0; x < out.width; ++x) out.at(f, 3, y, x) = 1.0;
    }
    return out;
}

// Nearest-neighbor upsample of the color channels, for demo output.
inline Video delatentize(const LatentVideo& lat) {
    Video out;
    out.color_space = ColorSpace::LinearDisplay;
    out.frames.reserve(lat.frames);
    for (int f = 0; f < lat.frames; ++f) {
        Frame fr(lat.width * 2, lat.height * 2);
        for (int y = 0; y < fr.height; ++y)
            for (int x = 0; x < fr.width; ++x)
                for (int c = 0; c < 3; ++c)
                    fr.at(x, y, c) = static_cast<float>(lat.at(f, c, y / 2, x / 2));
        out.frames.push_back(std::move(fr));
    }
    return out;
}

}  // namespace bracketforge
