#pragma once

// Procedural training content: moving Gaussian blob scenes with known
// radiance, and the VAE-distortion proxy applied to brackets during merger
// training (smooth per-exposure gain field, 3x3 box blur, additive noise).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "bracketforge/bracket.hpp"
#include "bracketforge/core.hpp"
#include "bracketforge/rng.hpp"

namespace bracketforge {

struct BlobSceneOptions {
    int frames = 1;
    int width = 24;
    int height = 24;
    int min_blobs = 2;
    int max_blobs = 4;
};

// Background plus drifting Gaussian blobs; radiance spans roughly 4 decades
// so every exposure protocol has something to clip.
inline Video make_blob_scene(const BlobSceneOptions& opt, RngSequence& seq) {
    struct Blob {
        double cx, cy, vx, vy, sigma, amp, tint[3];
    };
    const int blob_count =
        opt.min_blobs + static_cast<int>(seq.uniform() * (opt.max_blobs - opt.min_blobs + 1));
    std::vector<Blob> blobs(blob_count);
    for (Blob& b : blobs) {
        b.cx = seq.uniform() * opt.width;
        b.cy = seq.uniform() * opt.height;
        b.vx = (seq.uniform() - 0.5) * 3.0;
        b.vy = (seq.uniform() - 0.5) * 3.0;
        b.sigma = (0.08 + 0.17 * seq.uniform()) * std::min(opt.width, opt.height);
        b.amp = std::exp2(-2.0 + 7.0 * seq.uniform());  // 0.25 .. 32
        for (double& t : b.tint) t = 0.3 + 0.7 * seq.uniform();
    }
    const double bg = 0.02 + 0.18 * seq.uniform();
    double bg_tint[3];
    for (double& t : bg_tint) t = 0.5 + 0.5 * seq.uniform();

    Video video;
    video.color_space = ColorSpace::LinearRadiance;
    video.frames.reserve(opt.frames);
    for (int f = 0; f < opt.frames; ++f) {
        Frame frame(opt.width, opt.height);
        for (int y = 0; y < opt.height; ++y) {
            for (int x = 0; x < opt.width; ++x) {
                double rgb[3] = {bg * bg_tint[0], bg * bg_tint[1], bg * bg_tint[2]};
                for (const Blob& b : blobs) {
                    const double dx = x - (b.cx + b.vx * f);
                    const double dy = y - (b.cy + b.vy * f);
                    const double g = b.amp * std::exp(-(dx * dx + dy * dy) / (2 * b.sigma * b.sigma));
                    for (int c = 0; c < 3; ++c) rgb[c] += g * b.tint[c];
                }
                for (int c = 0; c < 3; ++c) frame.at(x, y, c) = static_cast<float>(rgb[c]);
            }
        }
        video.frames.push_back(std::move(frame));
    }
    return video;
}

namespace detail {

struct GainField {
    double fx, fy, px, py;

    static GainField draw(RngSequence& seq) {
        return {0.5 + 1.5 * seq.uniform(), 0.5 + 1.5 * seq.uniform(), seq.uniform(),
                seq.uniform()};
    }

    void apply(Frame& f) const {
        for (int y = 0; y < f.height; ++y) {
            for (int x = 0; x < f.width; ++x) {
                const double g =
                    1.0 + 0.05 * std::sin(2 * std::numbers::pi * (fx * x / f.width + px)) *
                              std::sin(2 * std::numbers::pi * (fy * y / f.height + py));
                for (int c = 0; c < 3; ++c)
                    f.at(x, y, c) = static_cast<float>(f.at(x, y, c) * g);
            }
        }
    }
};

inline Frame box_blur3(const Frame& f) {
    Frame out(f.width, f.height);
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                double s = 0.0;
                for (int dy = -1; dy <= 1; ++dy) {
                    const int yy = std::clamp(y + dy, 0, f.height - 1);
                    for (int dx = -1; dx <= 1; ++dx)
                        s += f.at(std::clamp(x + dx, 0, f.width - 1), yy, c);
                }
                out.at(x, y, c) = static_cast<float>(s / 9.0);
            }
        }
    }
    return out;
}

inline void distort_video(Video& v, RngSequence& gain_seq, const Rng& noise_rng,
                          std::uint64_t exposure_slot) {
    // One gain field per exposure, shared across its frames.
    const GainField gain = GainField::draw(gain_seq);
    for (std::size_t fr = 0; fr < v.frames.size(); ++fr) {
        Frame& f = v.frames[fr];
        gain.apply(f);
        f = box_blur3(f);
        for (std::size_t i = 0; i < f.data.size(); ++i) {
            const double n = noise_rng.normal(Rng::coord(fr, i / 3, i % 3, exposure_slot));
            f.data[i] = clip01(f.data[i] + static_cast<float>(0.005 * n));
        }
    }
}

}  // namespace detail

// Stand-in for the frame-codec distortions a latent autoencoder introduces.
inline ExposureBracket distort_bracket(const ExposureBracket& b, const Rng& rng) {
    ExposureBracket out = b;
    RngSequence gain_seq(rng.substream(0x6761696E /* "gain" */));
    const Rng noise_rng = rng.substream(0x766E6F69 /* distortion noise */);
    detail::distort_video(out.minus, gain_seq, noise_rng, 0);
    detail::distort_video(out.base, gain_seq, noise_rng, 1);
    detail::distort_video(out.plus, gain_seq, noise_rng, 2);
    return out;
}

}  // namespace bracketforge
