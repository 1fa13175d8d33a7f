#pragma once

// Trainer for the learned merger: synthetic HDR scenes are bracketed, run
// through the distortion proxy, and the network is fit with Adam on exact
// gradients of the log-L1 merge loss.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "bracketforge/bracket.hpp"
#include "bracketforge/merge.hpp"
#include "bracketforge/synth.hpp"
#include "bracketforge/vmm.hpp"

namespace bracketforge {

struct VmmSample {
    ExposureBracket bracket;  // distorted, single frame
    Video gt;                 // clean radiance, single frame
    double s = 1.0;           // max scene radiance of gt
};

inline VmmSample make_vmm_sample(std::uint64_t seed, std::uint64_t index, int width, int height) {
    const Rng rng(seed, 0x64617461 /* "data" */ + index);
    RngSequence seq(rng);
    BlobSceneOptions opt;
    opt.frames = 1;
    opt.width = width;
    opt.height = height;
    Video hdr = make_blob_scene(opt, seq);
    const auto range = exposure_range(hdr.frames[0]);
    const double e0 = sample_reference_exposure(range, seq);

    VmmSample sample;
    sample.bracket = distort_bracket(make_bracket(hdr, e0), rng);
    sample.s = max_radiance(hdr);
    sample.gt = std::move(hdr);
    return sample;
}

inline std::vector<VmmSample> make_vmm_dataset(int count, std::uint64_t seed, int width = 24,
                                               int height = 24) {
    std::vector<VmmSample> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i)
        out.push_back(make_vmm_sample(seed, static_cast<std::uint64_t>(i), width, height));
    return out;
}

// Loss over selected pixels of one sample; optionally accumulates parameter
// gradients. The per-pixel merge H = sum_k w_k R_k feeds the log-L1 loss, so
// dL/dw_k = sum_c sign(log diff) / (N * (H_c + s*eps)) * R_k,c.
inline double vmm_pixel_loss(VmmModel& model, const VmmSample& sample,
                             const std::vector<std::size_t>& pixels, bool with_grad) {
    const Frame& vm = sample.bracket.minus.frames[0];
    const Frame& vb = sample.bracket.base.frames[0];
    const Frame& vp = sample.bracket.plus.frames[0];
    const Frame& gt = sample.gt.frames[0];
    const double s = sample.s;
    const double n_terms = static_cast<double>(pixels.size()) * 3.0;

    VmmModel::Workspace ws;
    double loss = 0.0;
    for (std::size_t p : pixels) {
        const std::array<VmmFeature, kVmmExposures> features = {
            VmmFeature::from_pixel(vm.data.data() + p * 3, sample.bracket.e_minus),
            VmmFeature::from_pixel(vb.data.data() + p * 3, sample.bracket.e_base),
            VmmFeature::from_pixel(vp.data.data() + p * 3, sample.bracket.e_plus),
        };
        model.forward(features, ws);

        double dw[kVmmExposures] = {};
        for (int c = 0; c < 3; ++c) {
            double h = 0.0;
            double r[kVmmExposures];
            for (int k = 0; k < kVmmExposures; ++k) {
                r[k] = features[k].values[3 + c];
                h += ws.w[k] * r[k];
            }
            const double diff =
                std::log(h / s + kLogLossEps) - std::log(gt.data[p * 3 + c] / s + kLogLossEps);
            loss += std::abs(diff) / n_terms;
            if (with_grad) {
                const double dh = (diff > 0.0 ? 1.0 : diff < 0.0 ? -1.0 : 0.0) /
                                  (n_terms * (h + s * kLogLossEps));
                for (int k = 0; k < kVmmExposures; ++k) dw[k] += dh * r[k];
            }
        }
        if (with_grad) model.backward(ws, dw);
    }
    return loss;
}

struct VmmTrainConfig {
    double lr = 1e-3;
    int steps = 2000;
    int batch = 256;  // pixels per step
    std::uint64_t seed = 0;
};

struct VmmTrainResult {
    double initial_loss = 0.0;  // full-dataset merge loss before training
    double final_loss = 0.0;
};

// Mean full-frame merge loss over a dataset.
inline double vmm_dataset_loss(const VmmModel& model, const std::vector<VmmSample>& dataset) {
    double total = 0.0;
    for (const VmmSample& sample : dataset)
        total += vmm_loss(vmm_merge(sample.bracket, model), sample.gt, sample.s);
    return total / static_cast<double>(dataset.size());
}

inline VmmTrainResult vmm_train(VmmModel& model, const std::vector<VmmSample>& dataset,
                                const VmmTrainConfig& cfg) {
    if (dataset.empty()) throw std::invalid_argument("vmm_train: empty dataset");
    VmmTrainResult result;
    result.initial_loss = vmm_dataset_loss(model, dataset);

    nn::Adam adam;
    adam.lr = cfg.lr;
    const Rng pick_rng(cfg.seed, 0x7069636B /* "pick" */);
    std::vector<std::size_t> pixels(cfg.batch);

    for (int step = 0; step < cfg.steps; ++step) {
        const std::size_t sample_idx = static_cast<std::size_t>(
            pick_rng.uniform(static_cast<std::uint64_t>(step) * 2) * dataset.size());
        const VmmSample& sample = dataset[sample_idx];
        const std::size_t pixel_count = sample.gt.frames[0].pixel_count();
        const Rng batch_rng = pick_rng.substream(static_cast<std::uint64_t>(step));
        for (int i = 0; i < cfg.batch; ++i)
            pixels[i] = static_cast<std::size_t>(batch_rng.uniform(i) * pixel_count);

        model.params().zero_grad();
        const double loss = vmm_pixel_loss(model, sample, pixels, /*with_grad=*/true);
        if (!std::isfinite(loss))
            throw std::runtime_error("vmm_train: non-finite loss at step " +
                                     std::to_string(step));
        adam.step(model.params().values(), model.params().grads());
    }
    result.final_loss = vmm_dataset_loss(model, dataset);
    return result;
}

}  // namespace bracketforge
