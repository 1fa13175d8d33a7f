// bracketforge: SDR degradation simulation, exposure-bracket generation,
// classical and learned HDR merging, toy multi-exposure flow matching, and
// the evaluation protocol, behind one CLI.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "bracketforge/bracket.hpp"
#include "bracketforge/core.hpp"
#include "bracketforge/manifest.hpp"
#include "bracketforge/merge.hpp"
#include "bracketforge/metrics.hpp"
#include "bracketforge/pfm.hpp"
#include "bracketforge/png8.hpp"
#include "bracketforge/sdrsim.hpp"
#include "bracketforge/synth.hpp"
#include "bracketforge/toy_train.hpp"
#include "bracketforge/vmm_train.hpp"

namespace fs = std::filesystem;
using namespace bracketforge;

namespace {

constexpr const char* kVersion = "bracketforge 1.0.0 (param formats: VMM1, MEVT v1)";

std::vector<fs::path> list_frames(const fs::path& dir, const std::string& ext) {
    if (!fs::is_directory(dir))
        throw std::runtime_error("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ext)
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw std::runtime_error("no " + ext + " frames in " + dir.string());
    return files;
}

Video read_pfm_video(const fs::path& dir, ColorSpace cs) {
    Video v;
    v.color_space = cs;
    for (const fs::path& p : list_frames(dir, ".pfm")) v.frames.push_back(read_pfm(p));
    v.validate_dims();
    return v;
}

std::string frame_name(const std::string& prefix, std::size_t index, const std::string& ext) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%04zu%s", prefix.c_str(), index, ext.c_str());
    return buf;
}

// Flat dotted-key JSON config, consulted for defaults that the command line
// does not override. Example: {"sdrsim.sigma_s": 0.01, "vmm.lr": 0.001}.
struct Config {
    nlohmann::json values = nlohmann::json::object();

    void load(const fs::path& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config " + path.string());
        in >> values;
        if (!values.is_object()) throw std::runtime_error("config must be a JSON object");
    }

    double number(const std::string& key, double fallback) const {
        const auto it = values.find(key);
        return it != values.end() ? it->get<double>() : fallback;
    }
};

struct GlobalOpts {
    std::uint64_t seed = 0;
    int threads = 1;
    bool deterministic = false;
    std::string config_path;
    Config config;
};

Video load_bracket_exposure(const BracketManifest& m, const fs::path& base_dir, std::size_t k) {
    Video v;
    v.color_space = m.crf ? ColorSpace::CrfEncoded : ColorSpace::LinearDisplay;
    for (const std::string& rel : m.paths[k]) {
        fs::path p = rel;
        if (p.is_relative()) p = base_dir / p;
        Frame f = p.extension() == ".png" ? read_png8(p) : read_pfm(p);
        for (float x : f.data)
            if (!(x >= 0.0f && x <= 1.0f))
                throw std::runtime_error("bracket frame outside [0,1]: " + p.string());
        v.frames.push_back(std::move(f));
    }
    v.validate_dims();
    return v;
}

int run_simulate(const GlobalOpts& g, const std::string& input, const std::string& mode_name,
                 std::uint64_t crf_seed, std::uint64_t noise_seed, double sigma_s, double sigma_r,
                 const std::string& out) {
    const Video hdr = read_pfm_video(input, ColorSpace::LinearRadiance);
    ExposureMode mode;
    if (mode_name == "over")
        mode = ExposureMode::Over;
    else if (mode_name == "under")
        mode = ExposureMode::Under;
    else if (mode_name == "auto")
        mode = ExposureMode::Auto;
    else
        throw CLI::ValidationError("--mode", "must be over, under or auto");

    const std::vector<double> exposures = protocol_exposures(hdr, mode);
    const CrfParams crf = sample_crf(Rng(crf_seed));
    NoiseParams noise;
    noise.sigma_s = sigma_s;
    noise.sigma_r = sigma_r;
    noise.rho = g.config.number("sdrsim.rho", 0.5);
    const SdrVideo sdr = simulate_sdr_input(hdr, exposures, crf, noise, Rng(noise_seed));

    fs::create_directories(out);
    BracketManifest m;
    m.exposures = {exposures[0]};
    m.paths.resize(1);
    m.crf = crf;
    m.seed = crf_seed;
    bool constant = true;
    for (double e : exposures) constant = constant && e == exposures[0];
    if (!constant) m.frame_exposures = exposures;
    for (std::size_t i = 0; i < sdr.video.frames.size(); ++i) {
        const std::string name = frame_name("sdr", i, ".png");
        write_png8(sdr.video.frames[i], fs::path(out) / name);
        m.paths[0].push_back(name);
    }
    write_manifest(m, fs::path(out) / "manifest.json");
    std::cout << "simulate: " << sdr.video.frames.size() << " frames, mode " << mode_name
              << ", E0 " << exposures[0] << ", crf n " << crf.n << " sigma " << crf.sigma
              << "\n";
    return 0;
}

int run_bracket(const GlobalOpts& g, const std::string& input, const std::string& e0_arg,
                double ev, const std::string& format, const std::string& out) {
    const Video hdr = read_pfm_video(input, ColorSpace::LinearRadiance);
    double e0;
    if (e0_arg == "auto") {
        const auto range = exposure_range(hdr.frames[0]);
        RngSequence seq(Rng(g.seed, 0x65300000 /* "e0" */));
        e0 = sample_reference_exposure(range, seq);
    } else {
        e0 = std::stod(e0_arg);
        if (!(e0 > 0.0)) throw std::runtime_error("--e0 must be positive");
    }
    const ExposureBracket b = make_bracket(hdr, e0, ev);

    fs::create_directories(out);
    const bool png = format == "png";
    const std::string ext = png ? ".png" : ".pfm";
    BracketManifest m;
    m.exposures = {b.e_minus, b.e_base, b.e_plus};
    m.ev_spacing = ev;
    m.paths.resize(3);
    const Video* videos[3] = {&b.minus, &b.base, &b.plus};
    const char* names[3] = {"minus", "base", "plus"};
    for (int k = 0; k < 3; ++k) {
        for (std::size_t i = 0; i < videos[k]->frames.size(); ++i) {
            const std::string name = frame_name(names[k], i, ext);
            if (png)
                write_png8(clip_quantize(*videos[k]).frames[i], fs::path(out) / name);
            else
                write_pfm(videos[k]->frames[i], fs::path(out) / name);
            m.paths[k].push_back(name);
        }
    }
    write_manifest(m, fs::path(out) / "manifest.json");
    std::cout << "bracket: E0 " << e0 << ", exposures [" << b.e_minus << ", " << b.e_base << ", "
              << b.e_plus << "]\n";
    return 0;
}

int run_merge(const GlobalOpts&, const std::string& manifest_path, const std::string& method,
              const std::string& model_path, const std::string& out) {
    const BracketManifest m = read_manifest(manifest_path);
    if (m.exposures.size() != 3)
        throw std::runtime_error("merge expects a 3-exposure manifest");
    const fs::path base_dir = fs::path(manifest_path).parent_path();

    ExposureBracket b;
    b.ev_spacing = m.ev_spacing;
    b.e_minus = m.exposures[0];
    b.e_base = m.exposures[1];
    b.e_plus = m.exposures[2];
    Video videos[3];
    for (int k = 0; k < 3; ++k) {
        videos[k] = load_bracket_exposure(m, base_dir, k);
        if (m.crf) videos[k] = invert_crf(videos[k], *m.crf);
    }
    b.minus = std::move(videos[0]);
    b.base = std::move(videos[1]);
    b.plus = std::move(videos[2]);

    Video merged;
    if (method == "classical") {
        merged = merge_classical(b);
    } else if (method == "vmm") {
        if (model_path.empty()) throw std::runtime_error("--method vmm requires --model");
        VmmModel model;
        model.load(model_path);
        merged = vmm_merge(b, model);
    } else {
        throw CLI::ValidationError("--method", "must be classical or vmm");
    }

    fs::create_directories(out);
    for (std::size_t i = 0; i < merged.frames.size(); ++i)
        write_pfm(merged.frames[i], fs::path(out) / frame_name("hdr", i, ".pfm"));
    std::cout << "merge: " << merged.frames.size() << " frames via " << method << "\n";
    return 0;
}

int run_train_vmm(const GlobalOpts& g, const std::string& data, int scenes, int steps,
                  const std::string& out) {
    std::vector<VmmSample> dataset;
    if (data == "synthetic") {
        dataset = make_vmm_dataset(scenes, g.seed);
    } else {
        // Each PFM in the directory becomes one training frame.
        const auto files = list_frames(data, ".pfm");
        for (std::size_t i = 0; i < files.size(); ++i) {
            Video hdr;
            hdr.color_space = ColorSpace::LinearRadiance;
            hdr.frames.push_back(read_pfm(files[i]));
            const Rng rng(g.seed, 0x68647264 + i);
            RngSequence seq(rng);
            const auto range = exposure_range(hdr.frames[0]);
            const double e0 = sample_reference_exposure(range, seq);
            VmmSample s;
            s.bracket = distort_bracket(make_bracket(hdr, e0), rng);
            s.s = max_radiance(hdr);
            s.gt = std::move(hdr);
            dataset.push_back(std::move(s));
        }
    }

    VmmModel model;
    model.init(g.seed);
    VmmTrainConfig cfg;
    cfg.steps = steps;
    cfg.seed = g.seed;
    cfg.lr = g.config.number("vmm.lr", cfg.lr);
    cfg.batch = static_cast<int>(g.config.number("vmm.batch", cfg.batch));
    const VmmTrainResult r = vmm_train(model, dataset, cfg);
    model.save(out);
    std::cout << "train-vmm: " << dataset.size() << " brackets, " << steps << " steps, loss "
              << r.initial_loss << " -> " << r.final_loss << ", saved " << out << "\n";
    return 0;
}

nlohmann::json finite_or_inf(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

int run_eval(const GlobalOpts& g, const std::string& pred_dir, const std::string& gt_dir,
             const std::string& report_path) {
    const Video pred = read_pfm_video(pred_dir, ColorSpace::LinearRadiance);
    const Video gt_raw = read_pfm_video(gt_dir, ColorSpace::LinearRadiance);
    if (pred.frame_count() != gt_raw.frame_count())
        throw std::runtime_error("eval: pred/gt frame counts differ");

    const Video gt = preprocess_gt(gt_raw);
    const AffineFit fit = affine_align(pred, gt);
    const double peak_nits = g.config.number("metrics.peak_nits", 1000.0);
    const double s = max_radiance(gt);

    nlohmann::json report;
    report["a"] = fit.a;
    report["b"] = fit.b;
    report["pu_psnr_db"] = finite_or_inf(pu_psnr(fit.aligned, gt, peak_nits));
    report["log_l1"] = log_l1(fit.aligned, gt, s);
    report["per_frame"] = nlohmann::json::array();
    for (int i = 0; i < gt.frame_count(); ++i) {
        Video pf, gf;
        pf.frames.push_back(fit.aligned.frames[i]);
        gf.frames.push_back(gt.frames[i]);
        nlohmann::json row;
        row["pu_psnr_db"] = finite_or_inf(pu_psnr(pf, gf, peak_nits));
        row["log_l1"] = log_l1(pf, gf, s);
        report["per_frame"].push_back(row);
    }

    std::ofstream out(report_path);
    if (!out) throw std::runtime_error("cannot open report " + report_path);
    out << report.dump(2) << "\n";
    std::cout << "eval: pu_psnr " << report["pu_psnr_db"] << " dB, log_l1 " << report["log_l1"]
              << ", a " << fit.a << ", b " << fit.b << "\n";
    return 0;
}

int run_tonemap(const std::string& in_dir, const std::string& out) {
    const Video hdr = read_pfm_video(in_dir, ColorSpace::LinearRadiance);
    const Video tm = reinhard_tonemap(hdr);
    fs::create_directories(out);
    for (std::size_t i = 0; i < tm.frames.size(); ++i)
        write_png8(tm.frames[i], fs::path(out) / frame_name("tm", i, ".png"));
    std::cout << "tonemap: " << tm.frames.size() << " frames\n";
    return 0;
}

int run_scanline(const std::string& frame_path, int row, const std::string& out) {
    const Frame f = read_pfm(frame_path);
    const std::string csv = scanline_csv(f, row);
    if (out.empty()) {
        std::cout << csv;
    } else {
        std::ofstream os(out);
        if (!os) throw std::runtime_error("cannot open " + out);
        os << csv;
    }
    return 0;
}

int run_toy_train(const GlobalOpts& g, int scenes, int steps, const std::string& out) {
    const auto dataset = make_toy_dataset(scenes, g.seed);
    ToyDitModel model;
    model.init(g.seed);
    ToyTrainConfig cfg;
    cfg.steps = steps;
    cfg.seed = g.seed;
    cfg.lr = g.config.number("toy.lr", cfg.lr);
    const ToyTrainResult r = toy_train(model, dataset, cfg);
    model.save(out);
    std::cout << "toy-train: " << scenes << " sequences, " << steps << " steps, probe loss "
              << r.initial_loss << " -> " << r.final_loss << ", saved " << out << "\n";
    return 0;
}

int run_toy_demo(const GlobalOpts& g, const std::string& model_path, int steps,
                 const std::string& out) {
    ToyDitModel model;
    model.load(model_path);
    const auto dataset = make_toy_dataset(1, g.seed + 1);
    const ToySample& sample = dataset[0];
    const Rng rng(g.seed, 0x64656D6F /* "demo" */);
    const LatentVideo eps = gaussian_latent(sample.target.frames, sample.target.height,
                                            sample.target.width, rng);
    const LatentVideo gen = toy_sample(model, sample.crf, steps, eps);

    fs::create_directories(out);
    const int seg = gen.frames / 3;
    const char* names[3] = {"base", "minus", "plus"};
    nlohmann::json summary;
    for (int k = 0; k < 3; ++k) {
        LatentVideo seg_lat(seg, gen.height, gen.width);
        LatentVideo tgt_lat(seg, gen.height, gen.width);
        std::copy_n(gen.data.begin() + k * seg * gen.values_per_frame(), seg_lat.data.size(),
                    seg_lat.data.begin());
        std::copy_n(sample.target.data.begin() + k * seg * gen.values_per_frame(),
                    tgt_lat.data.size(), tgt_lat.data.begin());
        double mae = 0.0;
        for (std::size_t i = 0; i < seg_lat.data.size(); ++i)
            mae += std::abs(seg_lat.data[i] - tgt_lat.data[i]);
        summary[std::string("mean_abs_error_") + names[k]] = mae / seg_lat.data.size();

        const Video vis = delatentize(seg_lat);
        for (int i = 0; i < vis.frame_count(); ++i)
            write_pfm(vis.frames[i],
                      fs::path(out) / frame_name(std::string("gen_") + names[k], i, ".pfm"));
    }
    std::ofstream os(fs::path(out) / "summary.json");
    os << summary.dump(2) << "\n";
    std::cout << "toy-demo: " << summary.dump() << "\n";
    return 0;
}

#define SELFCHECK(label, cond)                                        \
    do {                                                              \
        const bool ok_ = (cond);                                      \
        std::cout << (ok_ ? "PASS " : "FAIL ") << label << "\n";      \
        if (!ok_) failures++;                                         \
    } while (0)

int run_selftest(const GlobalOpts& g) {
    int failures = 0;

    const Rng rng(g.seed, 1);
    SELFCHECK("rng determinism", rng.bits(12345) == Rng(g.seed, 1).bits(12345));

    const CrfParams crf{0.9, 0.6};
    SELFCHECK("crf endpoints", crf_forward(0.0f, crf) == 0.0f && crf_forward(1.0f, crf) == 1.0f);
    bool inverse_ok = true;
    for (int i = 0; i <= 64; ++i) {
        const float x = static_cast<float>(i) / 64.0f;
        inverse_ok = inverse_ok && std::abs(crf_inverse(crf_forward(x, crf), crf) - x) < 1e-5f;
    }
    SELFCHECK("crf inverse round-trip", inverse_ok);

    Frame q(4, 4, 0.3f);
    const Video qv = clip_quantize(Video{{q}, ColorSpace::CrfEncoded});
    SELFCHECK("quantize idempotent", clip_quantize(qv).frames[0].data == qv.frames[0].data);

    RngSequence seq(rng.substream(2));
    BlobSceneOptions opt;
    opt.frames = 2;
    opt.width = 16;
    opt.height = 16;
    const Video hdr = make_blob_scene(opt, seq);
    const ExposureBracket b = make_bracket(hdr, 0.02);
    SELFCHECK("bracket ladder ratio", b.e_plus / b.e_base == 16.0 && b.e_base / b.e_minus == 16.0);

    const Video merged = merge_classical(b);
    double max_rel = 0.0;
    for (std::size_t i = 0; i < merged.frames[0].data.size(); ++i) {
        const double r = hdr.frames[0].data[i];
        const double v = b.plus.frames[0].data[i];
        if (v < 1.0f && r > 0.0) {
            max_rel = std::max(max_rel,
                               std::abs(merged.frames[0].data[i] - r) / r);
        }
    }
    SELFCHECK("classical merge recovers radiance", max_rel < 1e-5);

    const RopeConfig rope_cfg;
    const auto theta = rope_angles({3, 1, 2}, rope_cfg);
    std::vector<double> vec(rope_cfg.head_dim);
    RngSequence vseq(rng.substream(3));
    for (double& x : vec) x = vseq.normal();
    const auto rotated = apply_rotation(vec, theta);
    double n0 = 0.0, n1 = 0.0;
    for (std::size_t i = 0; i < vec.size(); ++i) {
        n0 += vec[i] * vec[i];
        n1 += rotated[i] * rotated[i];
    }
    SELFCHECK("rotation preserves norm", std::abs(std::sqrt(n0) - std::sqrt(n1)) < 1e-9);

    VmmModel vmm;
    vmm.init(g.seed);
    const auto weights = vmm_forward_frame(vmm, b.minus.frames[0], b.base.frames[0],
                                           b.plus.frames[0], b.e_minus, b.e_base, b.e_plus);
    bool sums_ok = true;
    for (std::size_t p = 0; p < weights.size() / 3; ++p) {
        const double s = weights[p * 3] + weights[p * 3 + 1] + weights[p * 3 + 2];
        sums_ok = sums_ok && std::abs(s - 1.0) < 1e-6;
    }
    SELFCHECK("vmm weights sum to one", sums_ok);

    bool monotone = true;
    double prev = pu_encode_value(pu::kLMin);
    for (int i = 1; i <= 256; ++i) {
        const double y = pu::kLMin * std::pow(pu::kLMax / pu::kLMin, i / 256.0);
        const double v = pu_encode_value(y);
        monotone = monotone && v > prev;
        prev = v;
    }
    SELFCHECK("pu encoding strictly monotone", monotone);

    std::cout << (failures == 0 ? "selftest: all checks passed\n"
                                : "selftest: FAILURES detected\n");
    return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exposure-bracket HDR toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--seed", g.seed, "global random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads for pixel ops")
        ->capture_default_str();
    app.add_flag("--deterministic", g.deterministic,
                 "force ordered reductions (bitwise thread-count independent)");
    app.add_option("--config", g.config_path, "JSON config with flat dotted keys");

    // simulate
    auto* sim = app.add_subcommand("simulate", "degrade HDR radiance to SDR input video");
    std::string sim_input, sim_mode = "over", sim_out;
    std::uint64_t crf_seed = 0, noise_seed = 0;
    double sigma_s = -1.0, sigma_r = -1.0;
    sim->add_option("--input", sim_input, "directory of HDR .pfm frames")->required();
    sim->add_option("--mode", sim_mode, "over|under|auto")->required();
    sim->add_option("--crf-seed", crf_seed, "seed for CRF sampling");
    sim->add_option("--noise-seed", noise_seed, "seed for sensor noise");
    sim->add_option("--sigma-s", sigma_s, "shot noise (default: none)");
    sim->add_option("--sigma-r", sigma_r, "read noise (default: none)");
    sim->add_option("--out", sim_out, "output directory")->required();

    // bracket
    auto* brk = app.add_subcommand("bracket", "generate a clean exposure ladder");
    std::string brk_input, brk_e0 = "auto", brk_format = "pfm", brk_out;
    double brk_ev = 4.0;
    brk->add_option("--input", brk_input, "directory of HDR .pfm frames")->required();
    brk->add_option("--e0", brk_e0, "reference exposure or 'auto'");
    brk->add_option("--ev", brk_ev, "EV spacing")->capture_default_str();
    brk->add_option("--format", brk_format, "pfm|png")->capture_default_str();
    brk->add_option("--out", brk_out, "output directory")->required();

    // merge
    auto* mrg = app.add_subcommand("merge", "merge a bracket manifest into HDR");
    std::string mrg_manifest, mrg_method = "classical", mrg_model, mrg_out;
    mrg->add_option("--manifest", mrg_manifest, "bracket manifest JSON")->required();
    mrg->add_option("--method", mrg_method, "classical|vmm")->capture_default_str();
    mrg->add_option("--model", mrg_model, "VMM parameter file (for --method vmm)");
    mrg->add_option("--out", mrg_out, "output directory")->required();

    // train-vmm
    auto* tv = app.add_subcommand("train-vmm", "train the learned merger");
    std::string tv_data = "synthetic", tv_out;
    int tv_scenes = 200, tv_steps = 2000;
    tv->add_option("--data", tv_data, "'synthetic' or a directory of HDR .pfm frames")
        ->capture_default_str();
    tv->add_option("--scenes", tv_scenes, "synthetic scene count")->capture_default_str();
    tv->add_option("--steps", tv_steps, "optimizer steps")->capture_default_str();
    tv->add_option("--out", tv_out, "output parameter file")->required();

    // eval
    auto* ev = app.add_subcommand("eval", "metric report for predicted HDR");
    std::string ev_pred, ev_gt, ev_report;
    ev->add_option("--pred", ev_pred, "directory of predicted .pfm frames")->required();
    ev->add_option("--gt", ev_gt, "directory of ground-truth .pfm frames")->required();
    ev->add_option("--report", ev_report, "output JSON report")->required();

    // tonemap
    auto* tm = app.add_subcommand("tonemap", "Reinhard visualization PNGs");
    std::string tm_in, tm_out;
    tm->add_option("--in", tm_in, "directory of HDR .pfm frames")->required();
    tm->add_option("--out", tm_out, "output directory")->required();

    // scanline
    auto* sl = app.add_subcommand("scanline", "per-column RGB profile of one row");
    std::string sl_frame, sl_out;
    int sl_row = 0;
    sl->add_option("--frame", sl_frame, "input .pfm frame")->required();
    sl->add_option("--row", sl_row, "row index")->required();
    sl->add_option("--out", sl_out, "output CSV (stdout when omitted)");

    // toy-train
    auto* tt = app.add_subcommand("toy-train", "train the toy flow-matching transformer");
    std::string tt_out;
    int tt_steps = 3000, tt_scenes = 24;
    tt->add_option("--steps", tt_steps, "optimizer steps")->capture_default_str();
    tt->add_option("--scenes", tt_scenes, "synthetic sequence count")->capture_default_str();
    tt->add_option("--out", tt_out, "output parameter file")->required();

    // toy-demo
    auto* td = app.add_subcommand("toy-demo", "sample the toy model on a fresh sequence");
    std::string td_model, td_out;
    int td_steps = 8;
    td->add_option("--model", td_model, "MEVT parameter file")->required();
    td->add_option("--steps", td_steps, "Euler steps")->capture_default_str();
    td->add_option("--out", td_out, "output directory")->required();

    auto* st = app.add_subcommand("selftest", "run the embedded invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints usage/help text
        return code == 0 ? 0 : 1;
    }

    try {
        if (!g.config_path.empty()) g.config.load(g.config_path);
        exec().threads = std::max(1, g.threads);
        exec().deterministic = g.deterministic;

        if (sim->parsed())
            return run_simulate(g, sim_input, sim_mode, crf_seed, noise_seed,
                                sigma_s < 0 ? g.config.number("sdrsim.sigma_s", 0.0) : sigma_s,
                                sigma_r < 0 ? g.config.number("sdrsim.sigma_r", 0.0) : sigma_r,
                                sim_out);
        if (brk->parsed()) return run_bracket(g, brk_input, brk_e0, brk_ev, brk_format, brk_out);
        if (mrg->parsed()) return run_merge(g, mrg_manifest, mrg_method, mrg_model, mrg_out);
        if (tv->parsed()) return run_train_vmm(g, tv_data, tv_scenes, tv_steps, tv_out);
        if (ev->parsed()) return run_eval(g, ev_pred, ev_gt, ev_report);
        if (tm->parsed()) return run_tonemap(tm_in, tm_out);
        if (sl->parsed()) return run_scanline(sl_frame, sl_row, sl_out);
        if (tt->parsed()) return run_toy_train(g, tt_scenes, tt_steps, tt_out);
        if (td->parsed()) return run_toy_demo(g, td_model, td_steps, td_out);
        if (st->parsed()) return run_selftest(g);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
