#pragma once

// Evaluation protocol: ground-truth calibration into [1, 1000] cd/m2, affine
// least-squares alignment on mid-tone pixels, perceptually uniform encoding,
// PU-PSNR, log-L1, the Reinhard visualization tonemap, and scanline dumps.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bracketforge/core.hpp"
#include "bracketforge/log_l1.hpp"
#include "bracketforge/parallel.hpp"

namespace bracketforge {

// q in [0,100]; linear interpolation between order statistics.
inline double percentile(std::vector<float> values, double q) {
    if (values.empty()) throw std::invalid_argument("percentile: empty input");
    std::sort(values.begin(), values.end());
    const double rank = q / 100.0 * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
    const std::size_t hi = std::min(values.size() - 1, lo + 1);
    const double frac = rank - static_cast<double>(lo);
    return (1.0 - frac) * values[lo] + frac * values[hi];
}

inline std::vector<float> video_luminance(const Video& v) {
    std::vector<float> lum;
    for (const Frame& f : v.frames) {
        const std::vector<float> l = luminance(f);
        lum.insert(lum.end(), l.begin(), l.end());
    }
    return lum;
}

// Scale so the 99.9th-percentile luminance maps to 1000, then clamp values to
// [1, 1000] nits.
inline Video preprocess_gt(const Video& hdr) {
    const std::vector<float> lum = video_luminance(hdr);
    const double p = percentile(lum, 99.9);
    if (!(p > 0.0)) throw std::invalid_argument("preprocess_gt: all-zero video");
    const double scale = 1000.0 / p;
    Video out = hdr;
    for (Frame& f : out.frames)
        for (float& v : f.data)
            v = static_cast<float>(std::clamp(scale * v, 1.0, 1000.0));
    return out;
}

struct AffineFit {
    double a = 1.0;
    double b = 0.0;
    Video aligned;
};

// Least-squares a*pred + b ~= gt over all channels of pixels whose GT
// luminance lies between the 10th and 90th percentiles; the aligned output is
// clamped to >= 0.
inline AffineFit affine_align(const Video& pred, const Video& gt) {
    if (pred.frames.size() != gt.frames.size())
        throw std::invalid_argument("affine_align: frame count mismatch");
    const std::vector<float> gtl = video_luminance(gt);
    const double p10 = percentile(gtl, 10.0);
    const double p90 = percentile(gtl, 90.0);

    double sp = 0.0, sg = 0.0, spp = 0.0, spg = 0.0;
    std::size_t n = 0;
    std::size_t pixel_base = 0;
    for (std::size_t fr = 0; fr < gt.frames.size(); ++fr) {
        const Frame& pf = pred.frames[fr];
        const Frame& gf = gt.frames[fr];
        if (pf.data.size() != gf.data.size())
            throw std::invalid_argument("affine_align: frame size mismatch");
        for (std::size_t px = 0; px < gf.pixel_count(); ++px) {
            const double lum = gtl[pixel_base + px];
            if (lum < p10 || lum > p90) continue;
            for (int c = 0; c < 3; ++c) {
                const double p = pf.data[px * 3 + c];
                const double g = gf.data[px * 3 + c];
                sp += p;
                sg += g;
                spp += p * p;
                spg += p * g;
                ++n;
            }
        }
        pixel_base += gf.pixel_count();
    }
    if (n < 2) throw std::invalid_argument("affine_align: fewer than two selected values");
    const double var = spp - sp * sp / static_cast<double>(n);
    if (!(var > 0.0)) throw std::invalid_argument("affine_align: degenerate prediction (zero variance)");

    AffineFit fit;
    fit.a = (spg - sp * sg / static_cast<double>(n)) / var;
    fit.b = (sg - fit.a * sp) / static_cast<double>(n);
    fit.aligned = pred;
    for (Frame& f : fit.aligned.frames)
        for (float& v : f.data)
            v = static_cast<float>(std::max(0.0, fit.a * v + fit.b));
    return fit;
}

// Perceptually uniform luminance encoding over [0.005, 10000] cd/m2, built
// from the SMPTE ST 2084 (PQ) transfer with its exact rational constants
// (m1 = 2610/16384, m2 = 2523*128/4096, c1 = 3424/4096, c2 = 2413*32/4096,
// c3 = 2392*32/4096), affinely rescaled to the PU convention V(0.005) = 0,
// V(100) = 256.
namespace pu {

inline constexpr double kM1 = 2610.0 / 16384.0;
inline constexpr double kM2 = 2523.0 / 4096.0 * 128.0;
inline constexpr double kC1 = 3424.0 / 4096.0;
inline constexpr double kC2 = 2413.0 / 4096.0 * 32.0;
inline constexpr double kC3 = 2392.0 / 4096.0 * 32.0;
inline constexpr double kLMin = 0.005;
inline constexpr double kLMax = 10000.0;

inline double pq(double nits) {
    const double z = std::pow(nits / 10000.0, kM1);
    return std::pow((kC1 + kC2 * z) / (1.0 + kC3 * z), kM2);
}

struct Scale {
    double a, b;
};

inline const Scale& scale() {
    static const Scale s = [] {
        const double lo = pq(kLMin);
        const double hi = pq(100.0);
        const double a = 256.0 / (hi - lo);
        return Scale{a, -a * lo};
    }();
    return s;
}

}  // namespace pu

inline double pu_encode_value(double nits) {
    const double y = std::clamp(nits, pu::kLMin, pu::kLMax);
    return pu::scale().a * pu::pq(y) + pu::scale().b;
}

inline Video pu_encode(const Video& nits_video) {
    Video out = nits_video;
    for (Frame& f : out.frames) {
        parallel_for(f.data.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i)
                f.data[i] = static_cast<float>(pu_encode_value(f.data[i]));
        });
    }
    return out;
}

inline double pu_display_peak(double peak_nits = 1000.0) {
    return pu_encode_value(peak_nits) - pu_encode_value(pu::kLMin);
}

// PSNR over PU-encoded values with peak PU(1000) - PU(0.005). Identical
// inputs report +infinity.
inline double pu_psnr(const Video& pred_nits, const Video& gt_nits, double peak_nits = 1000.0) {
    const Video pe = pu_encode(pred_nits);
    const Video ge = pu_encode(gt_nits);
    double se = 0.0;
    std::size_t n = 0;
    for (std::size_t fr = 0; fr < pe.frames.size(); ++fr) {
        const Frame& a = pe.frames[fr];
        const Frame& b = ge.frames[fr];
        if (a.data.size() != b.data.size())
            throw std::invalid_argument("pu_psnr: frame size mismatch");
        se += parallel_sum(a.data.size(), [&](std::size_t i) {
            const double d = static_cast<double>(a.data[i]) - b.data[i];
            return d * d;
        });
        n += a.data.size();
    }
    const double mse = se / static_cast<double>(n);
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    const double peak = pu_display_peak(peak_nits);
    return 10.0 * std::log10(peak * peak / mse);
}

inline double log_l1(const Video& pred, const Video& gt, double s) {
    return log_l1_loss(pred, gt, s);
}

// Global Reinhard operator with color-ratio preservation and a 1/2.2 display
// gamma; output clamped to [0,1].
inline Video reinhard_tonemap(const Video& hdr) {
    Video out;
    out.color_space = ColorSpace::LinearDisplay;
    out.frames.reserve(hdr.frames.size());
    for (const Frame& f : hdr.frames) {
        Frame g(f.width, f.height);
        parallel_for(f.pixel_count(), [&](std::size_t b, std::size_t e) {
            for (std::size_t p = b; p < e; ++p) {
                const float* src = f.data.data() + p * 3;
                float* dst = g.data.data() + p * 3;
                const double lum = pixel_luminance(src[0], src[1], src[2]);
                if (lum <= 0.0) {
                    dst[0] = dst[1] = dst[2] = 0.0f;
                    continue;
                }
                const double factor = 1.0 / (1.0 + lum);  // L_d / L with L_d = L/(1+L)
                for (int c = 0; c < 3; ++c) {
                    const double v = std::clamp(src[c] * factor, 0.0, 1.0);
                    dst[c] = static_cast<float>(std::pow(v, 1.0 / 2.2));
                }
            }
        });
        out.frames.push_back(std::move(g));
    }
    return out;
}

inline std::string scanline_csv(const Frame& frame, int row) {
    if (row < 0 || row >= frame.height)
        throw std::invalid_argument("scanline: row out of range");
    std::ostringstream out;
    out << "column,r,g,b\n";
    for (int x = 0; x < frame.width; ++x)
        out << x << "," << frame.at(x, row, 0) << "," << frame.at(x, row, 1) << ","
            << frame.at(x, row, 2) << "\n";
    return out.str();
}

}  // namespace bracketforge
