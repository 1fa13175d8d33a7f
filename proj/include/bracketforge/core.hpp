#pragma once

// Frame/video containers and pixel semantics shared by the whole toolkit.
// Frames are interleaved RGB float32, row-major. Videos are immutable value
// types once built; every operation is a pure transform.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bracketforge {

enum class ColorSpace {
    LinearRadiance,  // scene-referred, >= 0, unbounded
    LinearDisplay,   // display-referred linear, [0,1]
    CrfEncoded,      // display-referred nonlinear, [0,1]
};

inline const char* to_string(ColorSpace cs) {
    switch (cs) {
    case ColorSpace::LinearRadiance: return "linear_radiance";
    case ColorSpace::LinearDisplay: return "linear_display";
    case ColorSpace::CrfEncoded: return "crf_encoded";
    }
    return "?";
}

struct Frame {
    int width = 0;
    int height = 0;
    std::vector<float> data;  // width*height*3, RGB interleaved

    Frame() = default;
    Frame(int w, int h, float fill = 0.0f)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, fill) {
        if (w <= 0 || h <= 0)
            throw std::invalid_argument("Frame: non-positive dimensions");
    }

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    std::size_t value_count() const { return data.size(); }

    float& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    float at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }

    bool all_finite() const {
        for (float v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

struct Video {
    std::vector<Frame> frames;
    ColorSpace color_space = ColorSpace::LinearRadiance;

    Video() = default;
    Video(std::vector<Frame> f, ColorSpace cs) : frames(std::move(f)), color_space(cs) {
        validate_dims();
    }

    int frame_count() const { return static_cast<int>(frames.size()); }
    int width() const { return frames.empty() ? 0 : frames.front().width; }
    int height() const { return frames.empty() ? 0 : frames.front().height; }

    void validate_dims() const {
        for (const Frame& f : frames)
            if (f.width != width() || f.height != height())
                throw std::invalid_argument("Video: frames differ in size");
    }
};

// Rec. 709 luma weights; all source content here is BT.709-linear.
inline constexpr float kLumaR = 0.2126f;
inline constexpr float kLumaG = 0.7152f;
inline constexpr float kLumaB = 0.0722f;

inline float pixel_luminance(float r, float g, float b) {
    return kLumaR * r + kLumaG * g + kLumaB * b;
}

// Per-pixel Rec. 709 luminance field.
inline std::vector<float> luminance(const Frame& frame) {
    std::vector<float> lum(frame.pixel_count());
    const float* p = frame.data.data();
    for (std::size_t i = 0; i < lum.size(); ++i, p += 3)
        lum[i] = pixel_luminance(p[0], p[1], p[2]);
    return lum;
}

inline double mean_luminance(const Frame& frame) {
    if (frame.pixel_count() == 0)
        throw std::invalid_argument("mean_luminance: empty frame");
    double sum = 0.0;
    const float* p = frame.data.data();
    for (std::size_t i = 0; i < frame.pixel_count(); ++i, p += 3)
        sum += pixel_luminance(p[0], p[1], p[2]);
    return sum / static_cast<double>(frame.pixel_count());
}

}  // namespace bracketforge
