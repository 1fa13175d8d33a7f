#pragma once

// Minimal dense-network toolkit used by the learned mergers: a flat
// double-precision parameter store with named tensors, hand-written
// forward/backward for linear, layer-norm, GELU (exact erf form), softmax and
// scaled dot-product attention, an Adam optimizer, and a little-endian
// float32 tensor file format. Everything runs in double so central
// finite-difference gradient checks are clean.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "bracketforge/rng.hpp"

namespace bracketforge::nn {

struct TensorInfo {
    std::string name;
    std::vector<std::uint32_t> shape;
    std::size_t offset = 0;
    std::size_t size = 0;
};

class ParamStore {
public:
    std::size_t add(std::string name, std::vector<std::uint32_t> shape) {
        std::size_t size = 1;
        for (auto d : shape) size *= d;
        TensorInfo t{std::move(name), std::move(shape), values_.size(), size};
        tensors_.push_back(t);
        values_.resize(values_.size() + size, 0.0);
        grads_.resize(values_.size(), 0.0);
        return tensors_.size() - 1;
    }

    double* data(std::size_t id) { return values_.data() + tensors_[id].offset; }
    const double* data(std::size_t id) const { return values_.data() + tensors_[id].offset; }
    double* grad(std::size_t id) { return grads_.data() + tensors_[id].offset; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& grads() { return grads_; }
    const std::vector<TensorInfo>& tensors() const { return tensors_; }

    void zero_grad() { std::fill(grads_.begin(), grads_.end(), 0.0); }

    void save(const std::filesystem::path& path, const char magic[4]) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("ParamStore::save: cannot open " + path.string());
        out.write(magic, 4);
        write_u32(out, 1);  // format version
        write_u32(out, static_cast<std::uint32_t>(tensors_.size()));
        for (const TensorInfo& t : tensors_) {
            write_u32(out, static_cast<std::uint32_t>(t.name.size()));
            out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
            write_u32(out, static_cast<std::uint32_t>(t.shape.size()));
            for (std::uint32_t d : t.shape) write_u32(out, d);
        }
        for (double v : values_) {
            const float f = static_cast<float>(v);
            std::uint32_t u;
            std::memcpy(&u, &f, 4);
            write_u32(out, u);
        }
        if (!out) throw std::runtime_error("ParamStore::save: write failed");
    }

    // Loads into an already-built store; shapes must match exactly.
    void load(const std::filesystem::path& path, const char magic[4]) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("ParamStore::load: cannot open " + path.string());
        char m[4];
        in.read(m, 4);
        if (!in || std::memcmp(m, magic, 4) != 0)
            throw std::runtime_error("ParamStore::load: bad magic in " + path.string());
        if (read_u32(in) != 1)
            throw std::runtime_error("ParamStore::load: unsupported version in " + path.string());
        const std::uint32_t count = read_u32(in);
        if (count != tensors_.size())
            throw std::runtime_error("ParamStore::load: tensor count mismatch");
        for (const TensorInfo& t : tensors_) {
            const std::uint32_t name_len = read_u32(in);
            std::string name(name_len, '\0');
            in.read(name.data(), name_len);
            const std::uint32_t rank = read_u32(in);
            std::vector<std::uint32_t> shape(rank);
            for (auto& d : shape) d = read_u32(in);
            if (name != t.name || shape != t.shape)
                throw std::runtime_error("ParamStore::load: tensor '" + name +
                                         "' does not match expected '" + t.name + "'");
        }
        for (double& v : values_) {
            const std::uint32_t u = read_u32(in);
            float f;
            std::memcpy(&f, &u, 4);
            v = static_cast<double>(f);
        }
        if (!in) throw std::runtime_error("ParamStore::load: truncated file " + path.string());
    }

private:
    static void write_u32(std::ostream& out, std::uint32_t v) {
        const char bytes[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                               static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
        out.write(bytes, 4);
    }
    static std::uint32_t read_u32(std::istream& in) {
        unsigned char b[4];
        in.read(reinterpret_cast<char*>(b), 4);
        if (!in) throw std::runtime_error("ParamStore: truncated stream");
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }

    std::vector<double> values_;
    std::vector<double> grads_;
    std::vector<TensorInfo> tensors_;
};

// ---- activations ----

inline double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0)); }

inline double gelu_grad(double x) {
    const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    const double Phi = 0.5 * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0));
    return Phi + x * phi;
}

inline void softmax(const double* logits, double* out, std::size_t n) {
    double mx = logits[0];
    for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, logits[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::exp(logits[i] - mx);
        sum += out[i];
    }
    for (std::size_t i = 0; i < n; ++i) out[i] /= sum;
}

// d logits from d probs, in place allowed (dl may alias dp).
inline void softmax_backward(const double* p, const double* dp, double* dl, std::size_t n) {
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += p[i] * dp[i];
    for (std::size_t i = 0; i < n; ++i) dl[i] = p[i] * (dp[i] - dot);
}

// ---- layers ----

// y = W x + b with W stored row-major [out, in].
struct Linear {
    std::size_t w = 0, b = 0;
    std::uint32_t in = 0, out = 0;

    static Linear make(ParamStore& ps, const std::string& name, std::uint32_t in,
                       std::uint32_t out) {
        Linear l;
        l.in = in;
        l.out = out;
        l.w = ps.add(name + ".w", {out, in});
        l.b = ps.add(name + ".b", {out});
        return l;
    }

    void init_xavier(ParamStore& ps, RngSequence& seq) const {
        const double a = std::sqrt(6.0 / (in + out));
        double* W = ps.data(w);
        for (std::size_t i = 0; i < static_cast<std::size_t>(in) * out; ++i)
            W[i] = a * (2.0 * seq.uniform() - 1.0);
        double* B = ps.data(b);
        for (std::uint32_t i = 0; i < out; ++i) B[i] = 0.0;
    }

    void forward(const ParamStore& ps, const double* x, double* y) const {
        const double* W = ps.data(w);
        const double* B = ps.data(b);
        for (std::uint32_t o = 0; o < out; ++o) {
            double s = B[o];
            const double* row = W + static_cast<std::size_t>(o) * in;
            for (std::uint32_t i = 0; i < in; ++i) s += row[i] * x[i];
            y[o] = s;
        }
    }

    // Accumulates parameter grads; adds into dx when non-null.
    void backward(ParamStore& ps, const double* x, const double* dy, double* dx) const {
        const double* W = ps.data(w);
        double* dW = ps.grad(w);
        double* dB = ps.grad(b);
        for (std::uint32_t o = 0; o < out; ++o) {
            const double g = dy[o];
            dB[o] += g;
            const double* row = W + static_cast<std::size_t>(o) * in;
            double* drow = dW + static_cast<std::size_t>(o) * in;
            for (std::uint32_t i = 0; i < in; ++i) {
                drow[i] += g * x[i];
                if (dx) dx[i] += g * row[i];
            }
        }
    }
};

struct LayerNorm {
    std::size_t gamma = 0, beta = 0;
    std::uint32_t dim = 0;
    static constexpr double kEps = 1e-5;

    static LayerNorm make(ParamStore& ps, const std::string& name, std::uint32_t dim) {
        LayerNorm ln;
        ln.dim = dim;
        ln.gamma = ps.add(name + ".gamma", {dim});
        ln.beta = ps.add(name + ".beta", {dim});
        return ln;
    }

    void init(ParamStore& ps) const {
        double* g = ps.data(gamma);
        for (std::uint32_t i = 0; i < dim; ++i) g[i] = 1.0;
        double* b = ps.data(beta);
        for (std::uint32_t i = 0; i < dim; ++i) b[i] = 0.0;
    }

    void forward(const ParamStore& ps, const double* x, double* y) const {
        const double* g = ps.data(gamma);
        const double* b = ps.data(beta);
        double mean = 0.0;
        for (std::uint32_t i = 0; i < dim; ++i) mean += x[i];
        mean /= dim;
        double var = 0.0;
        for (std::uint32_t i = 0; i < dim; ++i) var += (x[i] - mean) * (x[i] - mean);
        var /= dim;
        const double inv = 1.0 / std::sqrt(var + kEps);
        for (std::uint32_t i = 0; i < dim; ++i) y[i] = g[i] * (x[i] - mean) * inv + b[i];
    }

    void backward(ParamStore& ps, const double* x, const double* dy, double* dx) const {
        const double* g = ps.data(gamma);
        double* dg = ps.grad(gamma);
        double* db = ps.grad(beta);
        double mean = 0.0;
        for (std::uint32_t i = 0; i < dim; ++i) mean += x[i];
        mean /= dim;
        double var = 0.0;
        for (std::uint32_t i = 0; i < dim; ++i) var += (x[i] - mean) * (x[i] - mean);
        var /= dim;
        const double inv = 1.0 / std::sqrt(var + kEps);

        double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
        for (std::uint32_t i = 0; i < dim; ++i) {
            const double xhat = (x[i] - mean) * inv;
            const double dxhat = dy[i] * g[i];
            dg[i] += dy[i] * xhat;
            db[i] += dy[i];
            sum_dxhat += dxhat;
            sum_dxhat_xhat += dxhat * xhat;
        }
        for (std::uint32_t i = 0; i < dim; ++i) {
            const double xhat = (x[i] - mean) * inv;
            const double dxhat = dy[i] * g[i];
            if (dx)
                dx[i] += inv * (dxhat - sum_dxhat / dim - xhat * sum_dxhat_xhat / dim);
        }
    }
};

// Scaled dot-product attention over a [T, D] sequence split into heads.
// Caches probs for backward. Q/K are the (possibly rotated) projections.
struct AttentionCore {
    std::uint32_t heads = 0, head_dim = 0;

    // q, k, v: [T, heads*head_dim]; out: same. probs: [heads, T, T] scratch.
    void forward(const double* q, const double* k, const double* v, double* out,
                 std::size_t T, std::vector<double>& probs) const {
        const std::uint32_t D = heads * head_dim;
        const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
        probs.assign(static_cast<std::size_t>(heads) * T * T, 0.0);
        std::vector<double> logits(T);
        for (std::uint32_t h = 0; h < heads; ++h) {
            const std::size_t off = static_cast<std::size_t>(h) * head_dim;
            for (std::size_t i = 0; i < T; ++i) {
                const double* qi = q + i * D + off;
                for (std::size_t j = 0; j < T; ++j) {
                    const double* kj = k + j * D + off;
                    double s = 0.0;
                    for (std::uint32_t d = 0; d < head_dim; ++d) s += qi[d] * kj[d];
                    logits[j] = s * scale;
                }
                double* p = probs.data() + (static_cast<std::size_t>(h) * T + i) * T;
                softmax(logits.data(), p, T);
                double* oi = out + i * D + off;
                for (std::uint32_t d = 0; d < head_dim; ++d) oi[d] = 0.0;
                for (std::size_t j = 0; j < T; ++j) {
                    const double* vj = v + j * D + off;
                    for (std::uint32_t d = 0; d < head_dim; ++d) oi[d] += p[j] * vj[d];
                }
            }
        }
    }

    // Accumulates into dq, dk, dv.
    void backward(const double* q, const double* k, const double* v, const double* dout,
                  std::size_t T, const std::vector<double>& probs, double* dq, double* dk,
                  double* dv) const {
        const std::uint32_t D = heads * head_dim;
        const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
        std::vector<double> dp(T), dl(T);
        for (std::uint32_t h = 0; h < heads; ++h) {
            const std::size_t off = static_cast<std::size_t>(h) * head_dim;
            for (std::size_t i = 0; i < T; ++i) {
                const double* p = probs.data() + (static_cast<std::size_t>(h) * T + i) * T;
                const double* doi = dout + i * D + off;
                for (std::size_t j = 0; j < T; ++j) {
                    const double* vj = v + j * D + off;
                    double* dvj = dv + j * D + off;
                    double s = 0.0;
                    for (std::uint32_t d = 0; d < head_dim; ++d) {
                        s += doi[d] * vj[d];
                        dvj[d] += p[j] * doi[d];
                    }
                    dp[j] = s;
                }
                softmax_backward(p, dp.data(), dl.data(), T);
                const double* qi = q + i * D + off;
                double* dqi = dq + i * D + off;
                for (std::size_t j = 0; j < T; ++j) {
                    const double g = dl[j] * scale;
                    const double* kj = k + j * D + off;
                    double* dkj = dk + j * D + off;
                    for (std::uint32_t d = 0; d < head_dim; ++d) {
                        dqi[d] += g * kj[d];
                        dkj[d] += g * qi[d];
                    }
                }
            }
        }
    }
};

// ---- optimizer ----

struct Adam {
    double lr = 1e-3;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::vector<double> m, v;
    std::int64_t t = 0;

    void step(std::vector<double>& params, const std::vector<double>& grads) {
        if (m.size() != params.size()) {
            m.assign(params.size(), 0.0);
            v.assign(params.size(), 0.0);
        }
        ++t;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i] * grads[i];
            params[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
        }
    }
};

}  // namespace bracketforge::nn
