#pragma once

// Axial rotary embedding with a gated learnable exposure offset. The head
// dimension splits into three equal thirds (frame, height, width); each third
// carries angles theta_t = pos * base^(-t/d). A learned offset built from
// sinusoidal encodings of (exposure index e, CRF indicator c, relative frame
// index r) is projected to the rotation vector and scaled by a gate that
// starts at zero, so the plain embedding is recovered exactly at init.
//
// The alternative angle form base^(-t*pos/d) is kept behind a config switch
// for comparison; it is not relative-position consistent and is off by
// default.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bracketforge/nn.hpp"

namespace bracketforge {

struct RopeConfig {
    int head_dim = 24;  // must be a multiple of 12
    double base = 10000.0;
    bool position_in_exponent = false;  // alternative angle form, see header note

    int third() const { return head_dim / 6; }
    int half() const { return head_dim / 2; }

    void validate() const {
        if (head_dim <= 0 || head_dim % 12 != 0)
            throw std::invalid_argument("RopeConfig: head_dim must be a positive multiple of 12");
    }
};

// theta(p) = [phi(p_f) | phi(p_h) | phi(p_w)], each third of length head_dim/6.
inline std::vector<double> rope_angles(const std::array<int, 3>& pos, const RopeConfig& cfg) {
    cfg.validate();
    const int d = cfg.third();
    std::vector<double> theta(static_cast<std::size_t>(cfg.half()));
    for (int axis = 0; axis < 3; ++axis) {
        for (int t = 0; t < d; ++t) {
            const double e = static_cast<double>(t) / d;
            theta[static_cast<std::size_t>(axis) * d + t] =
                cfg.position_in_exponent
                    ? std::pow(cfg.base, -e * pos[axis])
                    : pos[axis] * std::pow(cfg.base, -e);
        }
    }
    return theta;
}

// Pairwise 2D rotation of an even-length vector by theta; norm preserving.
inline void apply_rotation(const double* x, const double* theta, double* out, int dim) {
    for (int k = 0; k * 2 < dim; ++k) {
        const double c = std::cos(theta[k]);
        const double s = std::sin(theta[k]);
        const double a = x[2 * k], b = x[2 * k + 1];
        out[2 * k] = a * c - b * s;
        out[2 * k + 1] = a * s + b * c;
    }
}

inline std::vector<double> apply_rotation(const std::vector<double>& x,
                                          const std::vector<double>& theta) {
    if (x.size() != 2 * theta.size())
        throw std::invalid_argument("apply_rotation: length mismatch");
    std::vector<double> out(x.size());
    apply_rotation(x.data(), theta.data(), out.data(), static_cast<int>(x.size()));
    return out;
}

// d(out)/d(x) and d(out)/d(theta), accumulated.
inline void rotation_backward(const double* x, const double* theta, const double* dout,
                              double* dx, double* dtheta, int dim) {
    for (int k = 0; k * 2 < dim; ++k) {
        const double c = std::cos(theta[k]);
        const double s = std::sin(theta[k]);
        const double a = x[2 * k], b = x[2 * k + 1];
        const double da = dout[2 * k], db = dout[2 * k + 1];
        dx[2 * k] += da * c + db * s;
        dx[2 * k + 1] += -da * s + db * c;
        // out = R(theta) x; d(out)/d(theta) rotates x by theta + pi/2.
        dtheta[k] += da * (-a * s - b * c) + db * (a * c - b * s);
    }
}

struct ExposureIndex {
    double e = 0.0;  // EV of the frame's exposure
    int c = 0;       // 1 for CRF-encoded conditioning frames
    int r = 0;       // frame position within its segment
};

// Vaswani-style interleaved sin/cos encoding of a scalar.
inline void sinusoidal_encode(double x, double base, int dim, double* out) {
    for (int i = 0; 2 * i < dim; ++i) {
        const double freq = std::pow(base, -2.0 * i / dim);
        out[2 * i] = std::sin(x * freq);
        out[2 * i + 1] = std::cos(x * freq);
    }
}

inline constexpr int kExposureGammaDim = 16;

// Gated learnable offset added to the rotation vector.
struct ExposureRope {
    nn::Linear proj;        // 3*d_gamma -> head_dim/2
    std::size_t gate = 0;   // [head_dim/2], initialized to zero
    int half = 0;

    static ExposureRope make(nn::ParamStore& ps, const std::string& name, int half) {
        ExposureRope er;
        er.half = half;
        er.proj = nn::Linear::make(ps, name + ".proj", 3 * kExposureGammaDim,
                                   static_cast<std::uint32_t>(half));
        er.gate = ps.add(name + ".gate", {static_cast<std::uint32_t>(half)});
        return er;
    }

    void init(nn::ParamStore& ps, RngSequence& seq) const {
        proj.init_xavier(ps, seq);
        double* g = ps.data(gate);
        for (int i = 0; i < half; ++i) g[i] = 0.0;  // pretrained path unchanged at start
    }

    void encode(const ExposureIndex& idx, double* enc /* 3*d_gamma */) const {
        sinusoidal_encode(idx.e, 10000.0, kExposureGammaDim, enc);
        sinusoidal_encode(static_cast<double>(idx.c), 10000.0, kExposureGammaDim,
                          enc + kExposureGammaDim);
        sinusoidal_encode(static_cast<double>(idx.r), 10000.0, kExposureGammaDim,
                          enc + 2 * kExposureGammaDim);
    }

    // offset = gate ⊙ proj(concat[γ(e), γ(c), γ(r)]); caches enc and the raw
    // projection for backward.
    void forward(const nn::ParamStore& ps, const ExposureIndex& idx, double* enc, double* u,
                 double* offset) const {
        encode(idx, enc);
        proj.forward(ps, enc, u);
        const double* g = ps.data(gate);
        for (int i = 0; i < half; ++i) offset[i] = g[i] * u[i];
    }

    void backward(nn::ParamStore& ps, const double* enc, const double* u, const double* doffset) {
        const double* g = ps.data(gate);
        double* dg = ps.grad(gate);
        std::vector<double> du(static_cast<std::size_t>(half));
        for (int i = 0; i < half; ++i) {
            dg[i] += doffset[i] * u[i];
            du[i] = doffset[i] * g[i];
        }
        proj.backward(ps, enc, du.data(), nullptr);
    }
};

}  // namespace bracketforge
