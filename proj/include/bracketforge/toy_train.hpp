#pragma once

// Flow-matching trainer for the toy transformer on procedurally generated
// multi-exposure sequences: blob scenes are bracketed, the base exposure is
// CRF-encoded and quantized as conditioning, and the three linear exposure
// segments (base, minus, plus) form the generation target.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "bracketforge/bracket.hpp"
#include "bracketforge/latent.hpp"
#include "bracketforge/sdrsim.hpp"
#include "bracketforge/synth.hpp"
#include "bracketforge/toydit.hpp"

namespace bracketforge {

struct ToySample {
    LatentVideo crf;     // F frames, conditioning
    LatentVideo target;  // 3F frames: base | minus | plus
};

inline ToySample make_toy_sample(std::uint64_t seed, std::uint64_t index, int seg_frames,
                                 int latent_h, int latent_w) {
    const Rng rng(seed, 0x746F7973 /* "toys" */ + index);
    RngSequence seq(rng);
    BlobSceneOptions opt;
    opt.frames = seg_frames;
    opt.width = 2 * latent_w;
    opt.height = 2 * latent_h;
    const Video hdr = make_blob_scene(opt, seq);
    const auto range = exposure_range(hdr.frames[0]);
    const double e0 = sample_reference_exposure(range, seq);
    const ExposureBracket bracket = make_bracket(hdr, e0);

    const CrfParams crf = sample_crf(seq);
    const SdrVideo sdr = simulate_sdr_input(hdr, e0, crf, NoiseParams{}, rng);

    ToySample sample;
    sample.crf = latentize(sdr.video);
    const LatentVideo base = latentize(bracket.base);
    const LatentVideo minus = latentize(bracket.minus);
    const LatentVideo plus = latentize(bracket.plus);
    sample.target = LatentVideo(3 * seg_frames, latent_h, latent_w);
    std::size_t pos = 0;
    for (const LatentVideo* seg : {&base, &minus, &plus})
        for (double v : seg->data) sample.target.data[pos++] = v;
    return sample;
}

inline std::vector<ToySample> make_toy_dataset(int count, std::uint64_t seed, int seg_frames = 2,
                                               int latent_h = 8, int latent_w = 8) {
    std::vector<ToySample> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i)
        out.push_back(
            make_toy_sample(seed, static_cast<std::uint64_t>(i), seg_frames, latent_h, latent_w));
    return out;
}

// One flow-matching loss evaluation; accumulates parameter grads on request.
inline double toy_loss(ToyDitModel& model, const ToySample& sample, double t,
                       const LatentVideo& eps, bool with_grad) {
    const LatentVideo noisy = flow_interpolant(sample.target, eps, t);
    ToyDitModel::Cache cache;
    const LatentVideo vhat = model.forward(noisy, sample.crf, t, cache);
    const double n = static_cast<double>(vhat.data.size());
    double loss = 0.0;
    LatentVideo dvel(vhat.frames, vhat.height, vhat.width);
    for (std::size_t i = 0; i < vhat.data.size(); ++i) {
        const double diff = vhat.data[i] - (sample.target.data[i] - eps.data[i]);
        loss += std::abs(diff) / n;
        dvel.data[i] = (diff > 0.0 ? 1.0 : diff < 0.0 ? -1.0 : 0.0) / n;
    }
    if (with_grad) model.backward(dvel, cache);
    return loss;
}

struct ToyTrainConfig {
    double lr = 1e-3;
    int steps = 3000;
    std::uint64_t seed = 0;
    bool learnable_gate = true;  // freeze the RoPE offset gates at 0 when false
    int probe_size = 16;         // fixed (sample, t, eps) triples for loss probes
};

struct ToyTrainResult {
    double initial_loss = 0.0;  // probe loss before training
    double final_loss = 0.0;
};

struct ToyProbe {
    std::size_t sample = 0;
    double t = 0.0;
    LatentVideo eps;
};

inline std::vector<ToyProbe> make_toy_probes(const std::vector<ToySample>& dataset, int count,
                                             std::uint64_t seed) {
    const Rng rng(seed, 0x70726F62 /* "prob" */);
    std::vector<ToyProbe> probes(count);
    for (int i = 0; i < count; ++i) {
        probes[i].sample = static_cast<std::size_t>(rng.uniform(2 * i) * dataset.size());
        probes[i].t = rng.uniform(2 * i + 1);
        const LatentVideo& target = dataset[probes[i].sample].target;
        probes[i].eps = gaussian_latent(target.frames, target.height, target.width,
                                        rng.substream(i));
    }
    return probes;
}

inline double toy_probe_loss(ToyDitModel& model, const std::vector<ToySample>& dataset,
                             const std::vector<ToyProbe>& probes) {
    double total = 0.0;
    for (const ToyProbe& p : probes)
        total += toy_loss(model, dataset[p.sample], p.t, p.eps, /*with_grad=*/false);
    return total / static_cast<double>(probes.size());
}

inline ToyTrainResult toy_train(ToyDitModel& model, const std::vector<ToySample>& dataset,
                                const ToyTrainConfig& cfg) {
    if (dataset.empty()) throw std::invalid_argument("toy_train: empty dataset");
    const std::vector<ToyProbe> probes = make_toy_probes(dataset, cfg.probe_size, cfg.seed);
    ToyTrainResult result;
    result.initial_loss = toy_probe_loss(model, dataset, probes);

    nn::Adam adam;
    adam.lr = cfg.lr;
    const Rng rng(cfg.seed, 0x74726169 /* "trai" */);

    for (int step = 0; step < cfg.steps; ++step) {
        const std::size_t idx = static_cast<std::size_t>(
            rng.uniform(static_cast<std::uint64_t>(step) * 2) * dataset.size());
        const double t = rng.uniform(static_cast<std::uint64_t>(step) * 2 + 1);
        const ToySample& sample = dataset[idx];
        const LatentVideo eps =
            gaussian_latent(sample.target.frames, sample.target.height, sample.target.width,
                            rng.substream(0x65707300 + static_cast<std::uint64_t>(step)));

        model.params().zero_grad();
        const double loss = toy_loss(model, sample, t, eps, /*with_grad=*/true);
        if (!std::isfinite(loss))
            throw std::runtime_error("toy_train: non-finite loss at step " + std::to_string(step));
        if (!cfg.learnable_gate) {
            for (int b = 0; b < 2; ++b) {
                const std::size_t id = model.gate_tensor(b);
                double* g = model.params().grads().data() + model.params().tensors()[id].offset;
                for (std::uint32_t i = 0; i < model.params().tensors()[id].shape[0]; ++i)
                    g[i] = 0.0;
            }
        }
        adam.step(model.params().values(), model.params().grads());
    }
    result.final_loss = toy_probe_loss(model, dataset, probes);
    return result;
}

}  // namespace bracketforge
