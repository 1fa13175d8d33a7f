#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <filesystem>

#include "bracketforge/toydit.hpp"
#include "bracketforge/vmm.hpp"
#include "bracketforge/vmm_train.hpp"

using namespace bracketforge;

namespace {

std::array<VmmFeature, 3> random_features(const Rng& rng, std::uint64_t salt) {
    std::array<VmmFeature, 3> f;
    const double exposures[3] = {0.00125, 0.02, 0.32};
    for (int k = 0; k < 3; ++k) {
        float rgb[3];
        for (int c = 0; c < 3; ++c)
            rgb[c] = static_cast<float>(rng.uniform(salt * 64 + k * 8 + c));
        f[k] = VmmFeature::from_pixel(rgb, exposures[k]);
    }
    return f;
}

}  // namespace

TEST_CASE("vmm weights form a distribution") {
    VmmModel model;
    model.init(3);
    VmmModel::Workspace ws;
    const Rng rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        model.forward(random_features(rng, trial), ws);
        double sum = 0.0;
        for (int k = 0; k < 3; ++k) {
            CHECK(ws.w[k] > 0.0);
            CHECK(ws.w[k] < 1.0);
            sum += ws.w[k];
        }
        CHECK(sum == Catch::Approx(1.0).margin(1e-6));
    }
}

TEST_CASE("swapping minus and plus slots permutes the weights") {
    // The length-3 exposure sequence has no positional encoding, so full
    // self-attention is permutation-equivariant.
    VmmModel model;
    model.init(4);
    VmmModel::Workspace ws;
    const Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        auto f = random_features(rng, trial);
        model.forward(f, ws);
        const double w0 = ws.w[0], w1 = ws.w[1], w2 = ws.w[2];
        std::swap(f[0], f[2]);
        model.forward(f, ws);
        CHECK(ws.w[0] == Catch::Approx(w2).margin(1e-12));
        CHECK(ws.w[1] == Catch::Approx(w1).margin(1e-12));
        CHECK(ws.w[2] == Catch::Approx(w0).margin(1e-12));
    }
}

TEST_CASE("zero head gives uniform weights") {
    VmmModel model;
    model.init(5);
    auto& ps = model.params();
    // head.fc is the last linear: zero its weight and bias.
    for (const auto& t : ps.tensors()) {
        if (t.name == "head.fc.w" || t.name == "head.fc.b")
            for (std::size_t i = 0; i < t.size; ++i) ps.values()[t.offset + i] = 0.0;
    }
    VmmModel::Workspace ws;
    model.forward(random_features(Rng(12), 0), ws);
    for (int k = 0; k < 3; ++k) CHECK(ws.w[k] == Catch::Approx(1.0 / 3.0).margin(1e-15));
}

TEST_CASE("vmm_merge is a per-pixel convex combination") {
    VmmModel model;
    model.init(6);
    RngSequence seq(Rng(13));
    BlobSceneOptions opt;
    opt.frames = 1;
    opt.width = 8;
    opt.height = 8;
    const Video hdr = make_blob_scene(opt, seq);
    const ExposureBracket b = make_bracket(hdr, 0.05);
    const Video h = vmm_merge(b, model);
    for (std::size_t i = 0; i < h.frames[0].data.size(); ++i) {
        const double r[3] = {b.minus.frames[0].data[i] / b.e_minus,
                             b.base.frames[0].data[i] / b.e_base,
                             b.plus.frames[0].data[i] / b.e_plus};
        const double lo = std::min({r[0], r[1], r[2]});
        const double hi = std::max({r[0], r[1], r[2]});
        CHECK(h.frames[0].data[i] >= lo - 1e-9);
        CHECK(h.frames[0].data[i] <= hi + 1e-9);
    }

    // A consistent bracket has equal radiance estimates, so any convex
    // weighting reproduces them.
    Video flat;
    flat.color_space = ColorSpace::LinearRadiance;
    flat.frames.push_back(Frame(4, 4, 2.0f));
    const ExposureBracket fb = make_bracket(flat, 0.015625);
    for (float x : vmm_merge(fb, model).frames[0].data)
        CHECK(x == Catch::Approx(2.0).margin(1e-6));
}

TEST_CASE("vmm_loss examples") {
    Video a, b;
    a.frames.push_back(Frame(2, 2, 0.7f));
    b.frames.push_back(Frame(2, 2, 0.7f));
    CHECK(vmm_loss(a, b, 3.0) == 0.0);

    // H = s, Hhat = s*e: |log(1 + eps) - log(e + eps)| ~= 0.999999
    Video h, hhat;
    h.frames.push_back(Frame(1, 1, 2.0f));
    hhat.frames.push_back(Frame(1, 1, static_cast<float>(2.0 * std::numbers::e)));
    const double expected = std::abs(std::log(1.0 + 1e-6) -
                                     std::log(static_cast<double>(hhat.frames[0].data[0]) / 2.0 + 1e-6));
    CHECK(vmm_loss(h, hhat, 2.0) == Catch::Approx(expected).margin(1e-12));
    CHECK(expected == Catch::Approx(1.0).margin(1e-4));

    // Joint rescaling by a power of two is exact in float, so the loss is
    // bitwise invariant.
    Video h4 = h, hhat4 = hhat;
    for (float& v : h4.frames[0].data) v *= 4.0f;
    for (float& v : hhat4.frames[0].data) v *= 4.0f;
    CHECK(vmm_loss(h4, hhat4, 8.0) == vmm_loss(h, hhat, 2.0));

    CHECK_THROWS_AS(vmm_loss(a, b, 0.0), std::invalid_argument);
}

TEST_CASE("zero training steps leave parameters unchanged") {
    VmmModel model;
    model.init(7);
    const std::vector<double> before = model.params().values();
    auto dataset = make_vmm_dataset(2, 100, 8, 8);
    VmmTrainConfig cfg;
    cfg.steps = 0;
    cfg.batch = 16;
    vmm_train(model, dataset, cfg);
    CHECK(model.params().values() == before);
}

TEST_CASE("vmm training is deterministic") {
    auto dataset = make_vmm_dataset(3, 200, 8, 8);
    VmmTrainConfig cfg;
    cfg.steps = 25;
    cfg.batch = 32;
    cfg.seed = 9;

    VmmModel m1, m2;
    m1.init(9);
    m2.init(9);
    vmm_train(m1, dataset, cfg);
    vmm_train(m2, dataset, cfg);
    CHECK(m1.params().values() == m2.params().values());
}

TEST_CASE("vmm gradient spot check") {
    VmmModel model;
    model.init(123);
    const VmmSample sample = make_vmm_sample(99, 0, 8, 8);
    const std::vector<std::size_t> pixels = {0, 5, 17, 33, 63, 12};

    model.params().zero_grad();
    vmm_pixel_loss(model, sample, pixels, true);
    const std::vector<double> analytic = model.params().grads();

    const Rng pick(77);
    const std::size_t total = model.params().values().size();
    const double h = 1e-3;
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t i = static_cast<std::size_t>(pick.uniform(trial) * total);
        double& w = model.params().values()[i];
        const double w0 = w;
        w = w0 + h;
        const double lp = vmm_pixel_loss(model, sample, pixels, false);
        w = w0 - h;
        const double lm = vmm_pixel_loss(model, sample, pixels, false);
        w = w0;
        const double fd = (lp - lm) / (2 * h);
        const double denom = std::max(std::abs(fd), std::abs(analytic[i]));
        if (denom < 1e-12) continue;
        CHECK(std::abs(fd - analytic[i]) / denom < 1e-4);
        ++checked;
    }
    CHECK(checked >= 30);
}

TEST_CASE("vmm parameter file round-trip") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "bracketforge_test" / "model.vmm";
    fs::create_directories(path.parent_path());

    VmmModel model;
    model.init(31);
    model.save(path);

    VmmModel loaded;
    loaded.load(path);
    // Values pass through float32 on disk.
    const auto& a = model.params().values();
    const auto& b = loaded.params().values();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(b[i] == static_cast<double>(static_cast<float>(a[i])));

    // Same weights, same outputs.
    VmmModel::Workspace w1, w2;
    const auto f = random_features(Rng(14), 0);
    model.forward(f, w1);
    loaded.forward(f, w2);
    for (int k = 0; k < 3; ++k) CHECK(w2.w[k] == Catch::Approx(w1.w[k]).margin(1e-6));

    // Wrong magic is rejected.
    ToyDitModel wrong;
    CHECK_THROWS(wrong.load(path));
}
