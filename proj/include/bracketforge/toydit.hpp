#pragma once

// Desk-scale flow-matching transformer over temporally concatenated
// multi-exposure latents. Layout: [CRF | base | minus | plus], each segment
// F latent frames; conditioning CRF frames stay clean and velocity is
// predicted for the three generated segments. Every attention block rotates
// queries and keys with the exposure-aware RoPE. Forward, loss and sampling
// follow the rectified-flow recipe: interpolant x_t = t*x + (1-t)*eps,
// velocity target x - eps, L1 objective, Euler integration.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "bracketforge/latent.hpp"
#include "bracketforge/nn.hpp"
#include "bracketforge/rng.hpp"
#include "bracketforge/rope.hpp"

namespace bracketforge {

inline constexpr int kToySegments = 4;  // CRF, base, minus, plus
inline constexpr double kToySegmentEv[kToySegments] = {0.0, 0.0, -4.0, 4.0};

// Per-frame exposure indices for the concatenated layout.
inline std::vector<ExposureIndex> concat_indices(int latent_frames) {
    if (latent_frames <= 0) throw std::invalid_argument("concat_indices: bad frame count");
    std::vector<ExposureIndex> idx;
    idx.reserve(static_cast<std::size_t>(kToySegments) * latent_frames);
    for (int s = 0; s < kToySegments; ++s)
        for (int r = 0; r < latent_frames; ++r)
            idx.push_back(ExposureIndex{kToySegmentEv[s], s == 0 ? 1 : 0, r});
    return idx;
}

struct ConcatLayout {
    LatentVideo latents;                 // 4*F frames
    std::vector<ExposureIndex> indices;  // one per frame
};

inline ConcatLayout concat_layout(const LatentVideo& crf, const LatentVideo& base,
                                  const LatentVideo& minus, const LatentVideo& plus) {
    const LatentVideo* segs[kToySegments] = {&crf, &base, &minus, &plus};
    for (const LatentVideo* s : segs)
        if (s->frames != crf.frames || s->height != crf.height || s->width != crf.width)
            throw std::invalid_argument("concat_layout: segment shape mismatch");
    ConcatLayout out;
    out.latents = LatentVideo(kToySegments * crf.frames, crf.height, crf.width);
    std::size_t pos = 0;
    for (const LatentVideo* s : segs)
        for (double v : s->data) out.latents.data[pos++] = v;
    out.indices = concat_indices(crf.frames);
    return out;
}

struct ToyDitConfig {
    int model_dim = 48;
    int heads = 2;
    int mlp_hidden = 192;
    int patch = 2;
    RopeConfig rope{};  // head_dim 24
    bool exposure_rope = true;

    int head_dim() const { return model_dim / heads; }
    int patch_payload() const { return patch * patch * LatentVideo::kChannels; }

    void validate() const {
        if (model_dim % heads != 0)
            throw std::invalid_argument("ToyDitConfig: model_dim must divide into heads");
        if (head_dim() != rope.head_dim)
            throw std::invalid_argument("ToyDitConfig: rope head_dim must equal head_dim");
        if (model_dim > 64) throw std::invalid_argument("ToyDitConfig: model_dim > 64");
        rope.validate();
    }
};

class ToyDitModel {
public:
    explicit ToyDitModel(ToyDitConfig cfg = {}) : cfg_(cfg) {
        cfg_.validate();
        const auto md = static_cast<std::uint32_t>(cfg_.model_dim);
        patch_embed_ = nn::Linear::make(ps_, "patch_embed",
                                        static_cast<std::uint32_t>(cfg_.patch_payload()), md);
        temb_fc1_ = nn::Linear::make(ps_, "temb.fc1", md, md);
        temb_fc2_ = nn::Linear::make(ps_, "temb.fc2", md, md);
        for (int b = 0; b < kBlocks; ++b) {
            const std::string p = "block" + std::to_string(b);
            blocks_[b].ln1 = nn::LayerNorm::make(ps_, p + ".ln1", md);
            blocks_[b].wq = nn::Linear::make(ps_, p + ".wq", md, md);
            blocks_[b].wk = nn::Linear::make(ps_, p + ".wk", md, md);
            blocks_[b].wv = nn::Linear::make(ps_, p + ".wv", md, md);
            blocks_[b].wo = nn::Linear::make(ps_, p + ".wo", md, md);
            blocks_[b].erope = ExposureRope::make(ps_, p + ".erope", cfg_.rope.half());
            blocks_[b].ln2 = nn::LayerNorm::make(ps_, p + ".ln2", md);
            blocks_[b].fc1 = nn::Linear::make(ps_, p + ".mlp.fc1", md,
                                              static_cast<std::uint32_t>(cfg_.mlp_hidden));
            blocks_[b].fc2 = nn::Linear::make(
                ps_, p + ".mlp.fc2", static_cast<std::uint32_t>(cfg_.mlp_hidden), md);
        }
        head_ = nn::Linear::make(ps_, "head", md,
                                 static_cast<std::uint32_t>(cfg_.patch_payload()));
    }

    void init(std::uint64_t seed) {
        RngSequence seq(Rng(seed, 0x746F7964 /* "toyd" */));
        patch_embed_.init_xavier(ps_, seq);
        temb_fc1_.init_xavier(ps_, seq);
        temb_fc2_.init_xavier(ps_, seq);
        for (Block& b : blocks_) {
            b.ln1.init(ps_);
            b.wq.init_xavier(ps_, seq);
            b.wk.init_xavier(ps_, seq);
            b.wv.init_xavier(ps_, seq);
            b.wo.init_xavier(ps_, seq);
            b.erope.init(ps_, seq);
            b.ln2.init(ps_);
            b.fc1.init_xavier(ps_, seq);
            b.fc2.init_xavier(ps_, seq);
        }
        head_.init_xavier(ps_, seq);
    }

    const ToyDitConfig& config() const { return cfg_; }
    nn::ParamStore& params() { return ps_; }
    const nn::ParamStore& params() const { return ps_; }
    std::size_t gate_tensor(int block) const { return blocks_[block].erope.gate; }

    void save(const std::filesystem::path& path) const { ps_.save(path, "MEVT"); }
    void load(const std::filesystem::path& path) { ps_.load(path, "MEVT"); }

    struct Cache {
        int T = 0, frames = 0, grid_h = 0, grid_w = 0, seg_frames = 0;
        std::vector<ExposureIndex> indices;
        std::vector<double> patches;  // [T][payload]
        std::vector<double> tok;      // [T][D] after embed + temb
        double t_enc[64];             // sinusoidal(t), model_dim <= 64
        std::vector<double> t_h1, t_a1, temb;
        struct BlockCache {
            std::vector<double> xin, n1, q, k, v, qr, kr, probs, ao, xmid, n2, mh, ma;
            std::vector<double> enc, u, offset;  // per frame
            std::vector<double> theta;           // [T][half] plain angles
        };
        BlockCache block[2];
        std::vector<double> xfinal;   // [T][D] input to the head
        std::vector<double> out_tok;  // [T][payload]
    };

    // noisy: 3*F generated frames (base, minus, plus); crf: F clean frames.
    // Returns the velocity prediction for the generated segments.
    LatentVideo forward(const LatentVideo& noisy, const LatentVideo& crf, double t,
                        Cache& cache) const {
        if (noisy.frames != 3 * crf.frames || noisy.height != crf.height ||
            noisy.width != crf.width)
            throw std::invalid_argument("toy_dit_forward: segment shape mismatch");
        if (!(t >= 0.0 && t <= 1.0))
            throw std::invalid_argument("toy_dit_forward: t outside [0,1]");
        if (crf.height % cfg_.patch != 0 || crf.width % cfg_.patch != 0)
            throw std::invalid_argument("toy_dit_forward: latent size not patch-aligned");

        const int D = cfg_.model_dim;
        const int payload = cfg_.patch_payload();
        cache.seg_frames = crf.frames;
        cache.frames = kToySegments * crf.frames;
        cache.grid_h = crf.height / cfg_.patch;
        cache.grid_w = crf.width / cfg_.patch;
        cache.T = cache.frames * cache.grid_h * cache.grid_w;
        cache.indices = concat_indices(crf.frames);
        const int T = cache.T;

        // Patchify [CRF | generated].
        cache.patches.assign(static_cast<std::size_t>(T) * payload, 0.0);
        for (int f = 0; f < cache.frames; ++f) {
            const LatentVideo& src = f < crf.frames ? crf : noisy;
            const int fl = f < crf.frames ? f : f - crf.frames;
            for (int py = 0; py < cache.grid_h; ++py)
                for (int px = 0; px < cache.grid_w; ++px) {
                    double* dst = cache.patches.data() +
                                  static_cast<std::size_t>(token_id(f, py, px, cache)) * payload;
                    gather_patch(src, fl, py, px, dst);
                }
        }

        // Timestep embedding, shared by every token.
        sinusoidal_encode(1000.0 * t, 10000.0, D, cache.t_enc);
        cache.t_h1.assign(D, 0.0);
        cache.t_a1.assign(D, 0.0);
        cache.temb.assign(D, 0.0);
        temb_fc1_.forward(ps_, cache.t_enc, cache.t_h1.data());
        for (int i = 0; i < D; ++i) cache.t_a1[i] = nn::gelu(cache.t_h1[i]);
        temb_fc2_.forward(ps_, cache.t_a1.data(), cache.temb.data());

        cache.tok.assign(static_cast<std::size_t>(T) * D, 0.0);
        for (int n = 0; n < T; ++n) {
            patch_embed_.forward(ps_, cache.patches.data() + static_cast<std::size_t>(n) * payload,
                                 cache.tok.data() + static_cast<std::size_t>(n) * D);
            for (int i = 0; i < D; ++i) cache.tok[static_cast<std::size_t>(n) * D + i] +=
                cache.temb[i];
        }

        std::vector<double> x = cache.tok;
        for (int b = 0; b < kBlocks; ++b) run_block_forward(b, x, cache);
        cache.xfinal = x;

        cache.out_tok.assign(static_cast<std::size_t>(T) * payload, 0.0);
        for (int n = 0; n < T; ++n)
            head_.forward(ps_, x.data() + static_cast<std::size_t>(n) * D,
                          cache.out_tok.data() + static_cast<std::size_t>(n) * payload);

        // Un-patchify the generated segments only.
        LatentVideo vel(noisy.frames, noisy.height, noisy.width);
        for (int f = crf.frames; f < cache.frames; ++f)
            for (int py = 0; py < cache.grid_h; ++py)
                for (int px = 0; px < cache.grid_w; ++px)
                    scatter_patch(cache.out_tok.data() +
                                      static_cast<std::size_t>(token_id(f, py, px, cache)) *
                                          payload,
                                  vel, f - crf.frames, py, px);
        return vel;
    }

    // dvel: gradient w.r.t. the returned velocity. Accumulates param grads.
    void backward(const LatentVideo& dvel, Cache& cache) {
        const int D = cfg_.model_dim;
        const int payload = cfg_.patch_payload();
        const int T = cache.T;

        std::vector<double> dout_tok(static_cast<std::size_t>(T) * payload, 0.0);
        for (int f = cache.seg_frames; f < cache.frames; ++f)
            for (int py = 0; py < cache.grid_h; ++py)
                for (int px = 0; px < cache.grid_w; ++px)
                    gather_patch(dvel, f - cache.seg_frames, py, px,
                                 dout_tok.data() +
                                     static_cast<std::size_t>(token_id(f, py, px, cache)) *
                                         payload);

        std::vector<double> dx(static_cast<std::size_t>(T) * D, 0.0);
        for (int n = 0; n < T; ++n)
            head_.backward(ps_, cache.xfinal.data() + static_cast<std::size_t>(n) * D,
                           dout_tok.data() + static_cast<std::size_t>(n) * payload,
                           dx.data() + static_cast<std::size_t>(n) * D);

        for (int b = kBlocks - 1; b >= 0; --b) run_block_backward(b, dx, cache);

        // Patch embedding and timestep MLP.
        std::vector<double> dtemb(D, 0.0);
        for (int n = 0; n < T; ++n) {
            patch_embed_.backward(ps_,
                                  cache.patches.data() + static_cast<std::size_t>(n) * payload,
                                  dx.data() + static_cast<std::size_t>(n) * D, nullptr);
            for (int i = 0; i < D; ++i) dtemb[i] += dx[static_cast<std::size_t>(n) * D + i];
        }
        std::vector<double> dt_a1(D, 0.0);
        temb_fc2_.backward(ps_, cache.t_a1.data(), dtemb.data(), dt_a1.data());
        std::vector<double> dt_h1(D);
        for (int i = 0; i < D; ++i) dt_h1[i] = dt_a1[i] * nn::gelu_grad(cache.t_h1[i]);
        temb_fc1_.backward(ps_, cache.t_enc, dt_h1.data(), nullptr);
    }

private:
    static constexpr int kBlocks = 2;

    struct Block {
        nn::LayerNorm ln1, ln2;
        nn::Linear wq, wk, wv, wo, fc1, fc2;
        ExposureRope erope;
    };

    static int token_id(int f, int py, int px, const Cache& c) {
        return (f * c.grid_h + py) * c.grid_w + px;
    }

    void gather_patch(const LatentVideo& src, int f, int py, int px, double* dst) const {
        int i = 0;
        for (int c = 0; c < LatentVideo::kChannels; ++c)
            for (int dy = 0; dy < cfg_.patch; ++dy)
                for (int dxp = 0; dxp < cfg_.patch; ++dxp)
                    dst[i++] = src.at(f, c, py * cfg_.patch + dy, px * cfg_.patch + dxp);
    }

    void scatter_patch(const double* src, LatentVideo& dst, int f, int py, int px) const {
        int i = 0;
        for (int c = 0; c < LatentVideo::kChannels; ++c)
            for (int dy = 0; dy < cfg_.patch; ++dy)
                for (int dxp = 0; dxp < cfg_.patch; ++dxp)
                    dst.at(f, c, py * cfg_.patch + dy, px * cfg_.patch + dxp) = src[i++];
    }

    void run_block_forward(int b, std::vector<double>& x, Cache& cache) const {
        const Block& blk = blocks_[b];
        auto& bc = cache.block[b];
        const int D = cfg_.model_dim;
        const int T = cache.T;
        const int half = cfg_.rope.half();

        bc.xin = x;
        bc.n1.assign(static_cast<std::size_t>(T) * D, 0.0);
        bc.q.assign(bc.n1.size(), 0.0);
        bc.k.assign(bc.n1.size(), 0.0);
        bc.v.assign(bc.n1.size(), 0.0);
        for (int n = 0; n < T; ++n) {
            const std::size_t o = static_cast<std::size_t>(n) * D;
            blk.ln1.forward(ps_, bc.xin.data() + o, bc.n1.data() + o);
            blk.wq.forward(ps_, bc.n1.data() + o, bc.q.data() + o);
            blk.wk.forward(ps_, bc.n1.data() + o, bc.k.data() + o);
            blk.wv.forward(ps_, bc.n1.data() + o, bc.v.data() + o);
        }

        // Rotation vector per token: plain axial angles plus the gated
        // per-frame exposure offset.
        bc.enc.assign(static_cast<std::size_t>(cache.frames) * 3 * kExposureGammaDim, 0.0);
        bc.u.assign(static_cast<std::size_t>(cache.frames) * half, 0.0);
        bc.offset.assign(static_cast<std::size_t>(cache.frames) * half, 0.0);
        if (cfg_.exposure_rope) {
            for (int f = 0; f < cache.frames; ++f)
                blk.erope.forward(ps_, cache.indices[f],
                                  bc.enc.data() + static_cast<std::size_t>(f) * 3 *
                                                      kExposureGammaDim,
                                  bc.u.data() + static_cast<std::size_t>(f) * half,
                                  bc.offset.data() + static_cast<std::size_t>(f) * half);
        }
        bc.theta.assign(static_cast<std::size_t>(T) * half, 0.0);
        bc.qr.assign(bc.q.size(), 0.0);
        bc.kr.assign(bc.k.size(), 0.0);
        for (int f = 0; f < cache.frames; ++f)
            for (int py = 0; py < cache.grid_h; ++py)
                for (int px = 0; px < cache.grid_w; ++px) {
                    const int n = token_id(f, py, px, cache);
                    const std::vector<double> plain = rope_angles({f, py, px}, cfg_.rope);
                    double* th = bc.theta.data() + static_cast<std::size_t>(n) * half;
                    const double* off = bc.offset.data() + static_cast<std::size_t>(f) * half;
                    for (int i = 0; i < half; ++i) th[i] = plain[i] + off[i];
                    for (int h = 0; h < cfg_.heads; ++h) {
                        const std::size_t ho =
                            static_cast<std::size_t>(n) * D + static_cast<std::size_t>(h) * cfg_.head_dim();
                        apply_rotation(bc.q.data() + ho, th, bc.qr.data() + ho, cfg_.head_dim());
                        apply_rotation(bc.k.data() + ho, th, bc.kr.data() + ho, cfg_.head_dim());
                    }
                }

        nn::AttentionCore core{static_cast<std::uint32_t>(cfg_.heads),
                               static_cast<std::uint32_t>(cfg_.head_dim())};
        bc.ao.assign(static_cast<std::size_t>(T) * D, 0.0);
        core.forward(bc.qr.data(), bc.kr.data(), bc.v.data(), bc.ao.data(),
                     static_cast<std::size_t>(T), bc.probs);

        bc.xmid.assign(static_cast<std::size_t>(T) * D, 0.0);
        for (int n = 0; n < T; ++n) {
            const std::size_t o = static_cast<std::size_t>(n) * D;
            double tmp[64];
            blk.wo.forward(ps_, bc.ao.data() + o, tmp);
            for (int i = 0; i < D; ++i) bc.xmid[o + i] = bc.xin[o + i] + tmp[i];
        }

        bc.n2.assign(static_cast<std::size_t>(T) * D, 0.0);
        bc.mh.assign(static_cast<std::size_t>(T) * cfg_.mlp_hidden, 0.0);
        bc.ma.assign(bc.mh.size(), 0.0);
        for (int n = 0; n < T; ++n) {
            const std::size_t o = static_cast<std::size_t>(n) * D;
            const std::size_t oh = static_cast<std::size_t>(n) * cfg_.mlp_hidden;
            blk.ln2.forward(ps_, bc.xmid.data() + o, bc.n2.data() + o);
            blk.fc1.forward(ps_, bc.n2.data() + o, bc.mh.data() + oh);
            for (int i = 0; i < cfg_.mlp_hidden; ++i) bc.ma[oh + i] = nn::gelu(bc.mh[oh + i]);
            double tmp[64];
            blk.fc2.forward(ps_, bc.ma.data() + oh, tmp);
            for (int i = 0; i < D; ++i) x[o + i] = bc.xmid[o + i] + tmp[i];
        }
    }

    void run_block_backward(int b, std::vector<double>& dx, Cache& cache) {
        Block& blk = blocks_[b];
        auto& bc = cache.block[b];
        const int D = cfg_.model_dim;
        const int T = cache.T;
        const int half = cfg_.rope.half();

        // MLP sub-block: x_out = xmid + fc2(gelu(fc1(ln2(xmid)))).
        std::vector<double> dxmid(static_cast<std::size_t>(T) * D, 0.0);
        for (int n = 0; n < T; ++n) {
            const std::size_t o = static_cast<std::size_t>(n) * D;
            const std::size_t oh = static_cast<std::size_t>(n) * cfg_.mlp_hidden;
            for (int i = 0; i < D; ++i) dxmid[o + i] += dx[o + i];  // residual
            std::vector<double> dma(cfg_.mlp_hidden, 0.0);
            blk.fc2.backward(ps_, bc.ma.data() + oh, dx.data() + o, dma.data());
            std::vector<double> dmh(cfg_.mlp_hidden);
            for (int i = 0; i < cfg_.mlp_hidden; ++i)
                dmh[i] = dma[i] * nn::gelu_grad(bc.mh[oh + i]);
            std::vector<double> dn2(D, 0.0);
            blk.fc1.backward(ps_, bc.n2.data() + o, dmh.data(), dn2.data());
            blk.ln2.backward(ps_, bc.xmid.data() + o, dn2.data(), dxmid.data() + o);
        }

        // Attention sub-block: xmid = xin + wo(attn(rot(q), rot(k), v)).
        std::vector<double> dxin = dxmid;  // residual path
        std::vector<double> dao(static_cast<std::size_t>(T) * D, 0.0);
        for (int n = 0; n < T; ++n)
            blk.wo.backward(ps_, bc.ao.data() + static_cast<std::size_t>(n) * D,
                            dxmid.data() + static_cast<std::size_t>(n) * D,
                            dao.data() + static_cast<std::size_t>(n) * D);

        std::vector<double> dqr(static_cast<std::size_t>(T) * D, 0.0);
        std::vector<double> dkr(dqr.size(), 0.0);
        std::vector<double> dv(dqr.size(), 0.0);
        nn::AttentionCore core{static_cast<std::uint32_t>(cfg_.heads),
                               static_cast<std::uint32_t>(cfg_.head_dim())};
        core.backward(bc.qr.data(), bc.kr.data(), bc.v.data(), dao.data(),
                      static_cast<std::size_t>(T), bc.probs, dqr.data(), dkr.data(), dv.data());

        // Undo rotations; collect dtheta per token, then per frame offset.
        std::vector<double> dq(static_cast<std::size_t>(T) * D, 0.0);
        std::vector<double> dk(dq.size(), 0.0);
        std::vector<double> dtheta(static_cast<std::size_t>(T) * half, 0.0);
        for (int f = 0; f < cache.frames; ++f)
            for (int py = 0; py < cache.grid_h; ++py)
                for (int px = 0; px < cache.grid_w; ++px) {
                    const int n = token_id(f, py, px, cache);
                    const double* th = bc.theta.data() + static_cast<std::size_t>(n) * half;
                    double* dth = dtheta.data() + static_cast<std::size_t>(n) * half;
                    for (int h = 0; h < cfg_.heads; ++h) {
                        const std::size_t ho = static_cast<std::size_t>(n) * D +
                                               static_cast<std::size_t>(h) * cfg_.head_dim();
                        rotation_backward(bc.q.data() + ho, th, dqr.data() + ho, dq.data() + ho,
                                          dth, cfg_.head_dim());
                        rotation_backward(bc.k.data() + ho, th, dkr.data() + ho, dk.data() + ho,
                                          dth, cfg_.head_dim());
                    }
                }
        if (cfg_.exposure_rope) {
            std::vector<double> doffset(half);
            for (int f = 0; f < cache.frames; ++f) {
                std::fill(doffset.begin(), doffset.end(), 0.0);
                for (int py = 0; py < cache.grid_h; ++py)
                    for (int px = 0; px < cache.grid_w; ++px) {
                        const double* dth =
                            dtheta.data() +
                            static_cast<std::size_t>(token_id(f, py, px, cache)) * half;
                        for (int i = 0; i < half; ++i) doffset[i] += dth[i];
                    }
                blk.erope.backward(ps_,
                                   bc.enc.data() + static_cast<std::size_t>(f) * 3 *
                                                       kExposureGammaDim,
                                   bc.u.data() + static_cast<std::size_t>(f) * half,
                                   doffset.data());
            }
        }

        // Projections and the pre-attention layer norm.
        for (int n = 0; n < T; ++n) {
            const std::size_t o = static_cast<std::size_t>(n) * D;
            std::vector<double> dn1(D, 0.0);
            blk.wq.backward(ps_, bc.n1.data() + o, dq.data() + o, dn1.data());
            blk.wk.backward(ps_, bc.n1.data() + o, dk.data() + o, dn1.data());
            blk.wv.backward(ps_, bc.n1.data() + o, dv.data() + o, dn1.data());
            blk.ln1.backward(ps_, bc.xin.data() + o, dn1.data(), dxin.data() + o);
        }
        dx = std::move(dxin);
    }

    ToyDitConfig cfg_;
    nn::ParamStore ps_;
    nn::Linear patch_embed_, temb_fc1_, temb_fc2_, head_;
    std::array<Block, kBlocks> blocks_;
};

// ---- flow matching ----

inline LatentVideo flow_interpolant(const LatentVideo& clean, const LatentVideo& noise,
                                    double t) {
    if (clean.data.size() != noise.data.size())
        throw std::invalid_argument("flow_interpolant: shape mismatch");
    LatentVideo out = clean;
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = t * clean.data[i] + (1.0 - t) * noise.data[i];
    return out;
}

// Mean |vhat - (clean - noise)| over the generated-segment elements.
inline double fm_loss(const LatentVideo& vhat, const LatentVideo& clean,
                      const LatentVideo& noise) {
    if (vhat.data.size() != clean.data.size() || clean.data.size() != noise.data.size())
        throw std::invalid_argument("fm_loss: shape mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < vhat.data.size(); ++i)
        sum += std::abs(vhat.data[i] - (clean.data[i] - noise.data[i]));
    return sum / static_cast<double>(vhat.data.size());
}

inline LatentVideo gaussian_latent(int frames, int h, int w, const Rng& rng,
                                   std::uint64_t draw = 0) {
    LatentVideo out(frames, h, w);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = rng.normal(Rng::coord(draw, i, 0));
    return out;
}

// Euler reverse-flow: x <- eps, then x += v(x, k/steps) / steps.
inline LatentVideo toy_sample(const ToyDitModel& model, const LatentVideo& crf, int steps,
                              const LatentVideo& eps) {
    if (steps < 1) throw std::invalid_argument("toy_sample: steps must be >= 1");
    LatentVideo x = eps;
    ToyDitModel::Cache cache;
    for (int k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) / steps;
        const LatentVideo v = model.forward(x, crf, t, cache);
        for (std::size_t i = 0; i < x.data.size(); ++i) x.data[i] += v.data[i] / steps;
    }
    return x;
}

}  // namespace bracketforge
