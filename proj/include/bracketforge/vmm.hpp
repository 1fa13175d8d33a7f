#pragma once

// Learned per-pixel exposure merger: a shared two-layer MLP embeds the 7-D
// feature [V_k, R_k, E_k] of each exposure, a pre-norm 4-head self-attention
// block mixes the three embeddings (exposures as a length-3 sequence, pixels
// batched), and a softmax head produces blending weights over the radiance
// estimates. Training uses hand-derived exact gradients end to end, from the
// log-L1 loss through the merge and the network.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "bracketforge/bracket.hpp"
#include "bracketforge/core.hpp"
#include "bracketforge/log_l1.hpp"
#include "bracketforge/nn.hpp"
#include "bracketforge/rng.hpp"

namespace bracketforge {

inline constexpr int kVmmExposures = 3;   // minus, base, plus (ascending EV)
inline constexpr int kVmmFeatureDim = 7;  // [V rgb, R rgb, E]
inline constexpr int kVmmHidden = 128;
inline constexpr int kVmmModelDim = 64;
inline constexpr int kVmmHeads = 4;

struct VmmFeature {
    std::array<double, kVmmFeatureDim> values{};

    static VmmFeature from_pixel(const float* v_rgb, double exposure) {
        VmmFeature f;
        for (int c = 0; c < 3; ++c) {
            f.values[c] = v_rgb[c];
            f.values[3 + c] = v_rgb[c] / exposure;
        }
        f.values[6] = exposure;
        return f;
    }
};

class VmmModel {
public:
    VmmModel() {
        fc1_ = nn::Linear::make(ps_, "mlp.fc1", kVmmFeatureDim, kVmmHidden);
        fc2_ = nn::Linear::make(ps_, "mlp.fc2", kVmmHidden, kVmmModelDim);
        ln_attn_ = nn::LayerNorm::make(ps_, "attn.ln", kVmmModelDim);
        wq_ = nn::Linear::make(ps_, "attn.wq", kVmmModelDim, kVmmModelDim);
        wk_ = nn::Linear::make(ps_, "attn.wk", kVmmModelDim, kVmmModelDim);
        wv_ = nn::Linear::make(ps_, "attn.wv", kVmmModelDim, kVmmModelDim);
        wo_ = nn::Linear::make(ps_, "attn.wo", kVmmModelDim, kVmmModelDim);
        ln_head_ = nn::LayerNorm::make(ps_, "head.ln", kVmmModelDim);
        head_ = nn::Linear::make(ps_, "head.fc", kVmmModelDim, 1);
        attn_.heads = kVmmHeads;
        attn_.head_dim = kVmmModelDim / kVmmHeads;
    }

    void init(std::uint64_t seed) {
        RngSequence seq(Rng(seed, 0x766D6D00 /* "vmm" */));
        fc1_.init_xavier(ps_, seq);
        fc2_.init_xavier(ps_, seq);
        ln_attn_.init(ps_);
        wq_.init_xavier(ps_, seq);
        wk_.init_xavier(ps_, seq);
        wv_.init_xavier(ps_, seq);
        wo_.init_xavier(ps_, seq);
        ln_head_.init(ps_);
        head_.init_xavier(ps_, seq);
    }

    nn::ParamStore& params() { return ps_; }
    const nn::ParamStore& params() const { return ps_; }

    void save(const std::filesystem::path& path) const { ps_.save(path, "VMM1"); }
    void load(const std::filesystem::path& path) { ps_.load(path, "VMM1"); }

    // Forward state for one pixel, kept for the backward pass.
    struct Workspace {
        double f[kVmmExposures][kVmmFeatureDim];
        double h1[kVmmExposures][kVmmHidden];
        double a1[kVmmExposures][kVmmHidden];
        double z[kVmmExposures][kVmmModelDim];
        double zn[kVmmExposures][kVmmModelDim];
        double q[kVmmExposures][kVmmModelDim];
        double k[kVmmExposures][kVmmModelDim];
        double v[kVmmExposures][kVmmModelDim];
        double ao[kVmmExposures][kVmmModelDim];
        double zr[kVmmExposures][kVmmModelDim];
        double hn[kVmmExposures][kVmmModelDim];
        double logit[kVmmExposures];
        double w[kVmmExposures];
        std::vector<double> probs;
    };

    void forward(const std::array<VmmFeature, kVmmExposures>& features, Workspace& ws) const {
        for (int k = 0; k < kVmmExposures; ++k) {
            for (int i = 0; i < kVmmFeatureDim; ++i) {
                const double v = features[k].values[i];
                if (!std::isfinite(v)) throw std::invalid_argument("vmm: non-finite feature");
                ws.f[k][i] = v;
            }
            fc1_.forward(ps_, ws.f[k], ws.h1[k]);
            for (int i = 0; i < kVmmHidden; ++i) ws.a1[k][i] = nn::gelu(ws.h1[k][i]);
            fc2_.forward(ps_, ws.a1[k], ws.z[k]);
            ln_attn_.forward(ps_, ws.z[k], ws.zn[k]);
            wq_.forward(ps_, ws.zn[k], ws.q[k]);
            wk_.forward(ps_, ws.zn[k], ws.k[k]);
            wv_.forward(ps_, ws.zn[k], ws.v[k]);
        }
        attn_.forward(&ws.q[0][0], &ws.k[0][0], &ws.v[0][0], &ws.ao[0][0], kVmmExposures,
                      ws.probs);
        for (int k = 0; k < kVmmExposures; ++k) {
            double o[kVmmModelDim];
            wo_.forward(ps_, ws.ao[k], o);
            for (int i = 0; i < kVmmModelDim; ++i) ws.zr[k][i] = ws.z[k][i] + o[i];
            ln_head_.forward(ps_, ws.zr[k], ws.hn[k]);
            head_.forward(ps_, ws.hn[k], &ws.logit[k]);
        }
        nn::softmax(ws.logit, ws.w, kVmmExposures);
    }

    // dL/dw -> parameter grads (accumulated in the store).
    void backward(const Workspace& ws, const double dw[kVmmExposures]) {
        double dlogit[kVmmExposures];
        nn::softmax_backward(ws.w, dw, dlogit, kVmmExposures);

        double dz[kVmmExposures][kVmmModelDim] = {};
        double dq[kVmmExposures][kVmmModelDim] = {};
        double dk[kVmmExposures][kVmmModelDim] = {};
        double dv[kVmmExposures][kVmmModelDim] = {};
        double dao[kVmmExposures][kVmmModelDim] = {};

        for (int k = 0; k < kVmmExposures; ++k) {
            double dhn[kVmmModelDim] = {};
            head_.backward(ps_, ws.hn[k], &dlogit[k], dhn);
            double dzr[kVmmModelDim] = {};
            ln_head_.backward(ps_, ws.zr[k], dhn, dzr);
            for (int i = 0; i < kVmmModelDim; ++i) dz[k][i] += dzr[i];
            wo_.backward(ps_, ws.ao[k], dzr, dao[k]);
        }
        attn_.backward(&ws.q[0][0], &ws.k[0][0], &ws.v[0][0], &dao[0][0], kVmmExposures, ws.probs,
                       &dq[0][0], &dk[0][0], &dv[0][0]);
        for (int k = 0; k < kVmmExposures; ++k) {
            double dzn[kVmmModelDim] = {};
            wq_.backward(ps_, ws.zn[k], dq[k], dzn);
            wk_.backward(ps_, ws.zn[k], dk[k], dzn);
            wv_.backward(ps_, ws.zn[k], dv[k], dzn);
            ln_attn_.backward(ps_, ws.z[k], dzn, dz[k]);
            double da1[kVmmHidden] = {};
            fc2_.backward(ps_, ws.a1[k], dz[k], da1);
            double dh1[kVmmHidden];
            for (int i = 0; i < kVmmHidden; ++i) dh1[i] = da1[i] * nn::gelu_grad(ws.h1[k][i]);
            fc1_.backward(ps_, ws.f[k], dh1, nullptr);
        }
    }

private:
    nn::ParamStore ps_;
    nn::Linear fc1_, fc2_, wq_, wk_, wv_, wo_, head_;
    nn::LayerNorm ln_attn_, ln_head_;
    nn::AttentionCore attn_;
};

// Blending weights for every pixel of one bracket frame, ordered
// (minus, base, plus), flattened [pixel][3].
inline std::vector<double> vmm_forward_frame(const VmmModel& model, const Frame& v_minus,
                                             const Frame& v_base, const Frame& v_plus,
                                             double e_minus, double e_base, double e_plus) {
    const std::size_t pixels = v_base.pixel_count();
    std::vector<double> weights(pixels * kVmmExposures);
    VmmModel::Workspace ws;
    for (std::size_t p = 0; p < pixels; ++p) {
        const std::array<VmmFeature, kVmmExposures> features = {
            VmmFeature::from_pixel(v_minus.data.data() + p * 3, e_minus),
            VmmFeature::from_pixel(v_base.data.data() + p * 3, e_base),
            VmmFeature::from_pixel(v_plus.data.data() + p * 3, e_plus),
        };
        model.forward(features, ws);
        for (int k = 0; k < kVmmExposures; ++k) weights[p * kVmmExposures + k] = ws.w[k];
    }
    return weights;
}

// H = sum_k W_k * R_k, a per-pixel convex combination of radiance estimates.
inline Video vmm_merge(const ExposureBracket& b, const VmmModel& model) {
    Video out;
    out.color_space = ColorSpace::LinearRadiance;
    out.frames.reserve(b.base.frames.size());
    for (std::size_t fr = 0; fr < b.base.frames.size(); ++fr) {
        const Frame& vm = b.minus.frames[fr];
        const Frame& vb = b.base.frames[fr];
        const Frame& vp = b.plus.frames[fr];
        const std::vector<double> w =
            vmm_forward_frame(model, vm, vb, vp, b.e_minus, b.e_base, b.e_plus);
        Frame h(vb.width, vb.height);
        for (std::size_t p = 0; p < vb.pixel_count(); ++p) {
            for (int c = 0; c < 3; ++c) {
                const double r_minus = vm.data[p * 3 + c] / b.e_minus;
                const double r_base = vb.data[p * 3 + c] / b.e_base;
                const double r_plus = vp.data[p * 3 + c] / b.e_plus;
                h.data[p * 3 + c] = static_cast<float>(w[p * 3 + 0] * r_minus +
                                                       w[p * 3 + 1] * r_base +
                                                       w[p * 3 + 2] * r_plus);
            }
        }
        out.frames.push_back(std::move(h));
    }
    return out;
}

inline double vmm_loss(const Video& h, const Video& h_ref, double s) {
    return log_l1_loss(h, h_ref, s);
}

}  // namespace bracketforge
