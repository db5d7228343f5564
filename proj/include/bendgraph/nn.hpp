#pragma once

// Graph regression/classification model: per-face CNN over UV grids, mean
// message passing over the face adjacency graph, mean+max pooling to a
// 64-d graph embedding, a 3-layer head over the embedding plus the global
// attributes. All gradients are reverse-mode, hand-derived per layer, in
// 64-bit floats. Training uses Adam with early stopping on validation loss.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "bendgraph/core.hpp"
#include "bendgraph/enrich.hpp"

namespace bendgraph::nn {

using enrich::EnrichedGraph;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct ModelConfig {
    int grid = 10;
    int encoder_mid = 32;   // 7 -> mid -> 64
    int mp_layers = 2;
    int hidden = 64;
    std::uint64_t seed = 0;
    int out = 1;            // 1 = regression, 2 = collision classes

    static constexpr int kEncoderOut = 64;
    static constexpr int kMf = enrich::kMfWidth;     // 28
    static constexpr int kNode = kEncoderOut + kMf;  // 92
    static constexpr int kPooled = 64;
    static constexpr int kGlobals = 3;
    static constexpr int kHeadIn = kPooled + kGlobals;  // 67
    static constexpr int kHead1 = 64;
    static constexpr int kHead2 = 32;
};

struct TrainConfig {
    double lr = 1e-4;
    int batch_size = 32;
    int patience = 50;
    int max_epochs = 1000;
    double split_train = 0.8, split_val = 0.1, split_test = 0.1;
    bool classification = false;
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = hardware
};

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

struct Tensor {
    std::string name;
    std::vector<int> shape;
    std::vector<double> v;

    size_t size() const {
        size_t n = 1;
        for (int d : shape) n *= size_t(d);
        return n;
    }
};

struct ParamStore {
    std::vector<Tensor> params;

    Tensor& add(const std::string& name, std::vector<int> shape) {
        Tensor t;
        t.name = name;
        t.shape = std::move(shape);
        t.v.assign(t.size(), 0.0);
        params.push_back(std::move(t));
        return params.back();
    }
    Tensor& at(const std::string& name) {
        for (Tensor& t : params)
            if (t.name == name) return t;
        throw Error("unknown parameter " + name);
    }
    const Tensor& at(const std::string& name) const {
        return const_cast<ParamStore*>(this)->at(name);
    }
    size_t total() const {
        size_t n = 0;
        for (const Tensor& t : params) n += t.size();
        return n;
    }
};

// Standardization statistics held in the checkpoint. Continuous MF slots and
// the globals use training-split mean/std; boolean and sign slots pass
// through. Regression labels are standardized the same way.
struct Normalizer {
    std::array<double, ModelConfig::kMf> mf_mean{}, mf_std{};
    std::array<double, 3> glob_mean{}, glob_std{};
    double label_mean = 0, label_std = 1;

    static bool continuous_slot(int i) {
        return (i >= 5 && i <= 7) || (i >= 10 && i <= 23);
    }

    void reset() {
        mf_mean.fill(0);
        mf_std.fill(1);
        glob_mean.fill(0);
        glob_std.fill(1);
        label_mean = 0;
        label_std = 1;
    }
};

struct Model {
    ModelConfig cfg;
    ParamStore params;
    Normalizer norm;

    void build() {
        int m = cfg.encoder_mid;
        auto& P = params;
        P.params.clear();
        P.add("conv1.w", {m, 7, 3, 3});
        P.add("conv1.b", {m});
        P.add("conv2.w", {ModelConfig::kEncoderOut, m, 3, 3});
        P.add("conv2.b", {ModelConfig::kEncoderOut});
        for (int l = 0; l < cfg.mp_layers; ++l) {
            int in = l == 0 ? ModelConfig::kNode : cfg.hidden;
            std::string p = "mp" + std::to_string(l);
            P.add(p + ".self", {cfg.hidden, in});
            P.add(p + ".nbr", {cfg.hidden, in});
            P.add(p + ".b", {cfg.hidden});
        }
        P.add("pool.w", {ModelConfig::kPooled, 2 * cfg.hidden});
        P.add("pool.b", {ModelConfig::kPooled});
        P.add("head1.w", {ModelConfig::kHead1, ModelConfig::kHeadIn});
        P.add("head1.b", {ModelConfig::kHead1});
        P.add("head2.w", {ModelConfig::kHead2, ModelConfig::kHead1});
        P.add("head2.b", {ModelConfig::kHead2});
        P.add("head3.w", {cfg.out, ModelConfig::kHead2});
        P.add("head3.b", {cfg.out});
        init_weights();
        norm.reset();
    }

    void init_weights() {
        std::mt19937_64 rng(cfg.seed);
        for (Tensor& t : params.params) {
            if (t.name.ends_with(".b")) continue;  // biases stay zero
            double fan_in = 1, fan_out = 1;
            if (t.shape.size() == 4) {
                fan_out = double(t.shape[0]) * t.shape[2] * t.shape[3];
                fan_in = double(t.shape[1]) * t.shape[2] * t.shape[3];
            } else {
                fan_out = t.shape[0];
                fan_in = t.shape[1];
            }
            double a = std::sqrt(6.0 / (fan_in + fan_out));
            std::uniform_real_distribution<double> dist(-a, a);
            for (double& x : t.v) x = dist(rng);
        }
    }
};

// ---------------------------------------------------------------------------
// Activation
// ---------------------------------------------------------------------------

inline double silu(double x) { return x / (1.0 + std::exp(-x)); }
inline double silu_grad(double x) {
    double s = 1.0 / (1.0 + std::exp(-x));
    return s * (1.0 + x * (1.0 - s));
}

// ---------------------------------------------------------------------------
// Forward/backward workspace (one per thread)
// ---------------------------------------------------------------------------

struct GradBuffer {
    std::vector<std::vector<double>> g;  // parallel to params

    void init(const ParamStore& p) {
        g.resize(p.params.size());
        for (size_t i = 0; i < g.size(); ++i) g[i].assign(p.params[i].size(), 0.0);
    }
    void zero() {
        for (auto& v : g) std::fill(v.begin(), v.end(), 0.0);
    }
    void add(const GradBuffer& o) {
        for (size_t i = 0; i < g.size(); ++i)
            for (size_t k = 0; k < g[i].size(); ++k) g[i][k] += o.g[i][k];
    }
};

struct Workspace {
    // per-node encoder buffers
    struct NodeBuf {
        std::vector<double> in;          // 7*g*g normalized-free input
        std::vector<double> pre1, act1;  // mid*g*g
        std::vector<double> pre2, act2;  // 64*g*g
        std::vector<int> mask_idx;
        std::array<double, ModelConfig::kEncoderOut> pooled{};
    };
    std::vector<NodeBuf> nodes;
    // message passing activations: x[layer][node][width]
    std::vector<std::vector<std::vector<double>>> h, pre;
    std::vector<std::vector<std::vector<double>>> agg;
    std::vector<double> mean_pool, max_pool;
    std::vector<int> argmax;
    std::vector<double> pool_out;  // 64 (linear)
    std::vector<double> head_in;   // 67
    std::vector<double> h1_pre, h1, h2_pre, h2;
    std::vector<double> out;
};

// ---------------------------------------------------------------------------
// Layers
// ---------------------------------------------------------------------------

namespace detail {

// 3x3 same-padding convolution, channel-major [c][i][j].
inline void conv3x3_forward(const double* in, int cin, const double* w, const double* b,
                            double* out, int cout, int g) {
    int gg = g * g;
    for (int oc = 0; oc < cout; ++oc) {
        double* o = out + size_t(oc) * gg;
        for (int k = 0; k < gg; ++k) o[k] = b[oc];
        for (int ic = 0; ic < cin; ++ic) {
            const double* x = in + size_t(ic) * gg;
            const double* wk = w + (size_t(oc) * cin + ic) * 9;
            for (int di = -1; di <= 1; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    double wv = wk[(di + 1) * 3 + (dj + 1)];
                    int i0 = std::max(0, -di), i1 = std::min(g, g - di);
                    int j0 = std::max(0, -dj), j1 = std::min(g, g - dj);
                    for (int i = i0; i < i1; ++i) {
                        double* orow = o + i * g;
                        const double* xrow = x + (i + di) * g + dj;
                        for (int j = j0; j < j1; ++j) orow[j] += wv * xrow[j];
                    }
                }
            }
        }
    }
}

inline void conv3x3_backward(const double* in, int cin, const double* w, int cout,
                             const double* dout, int g, double* din, double* dw,
                             double* db) {
    int gg = g * g;
    for (int oc = 0; oc < cout; ++oc) {
        const double* go = dout + size_t(oc) * gg;
        for (int k = 0; k < gg; ++k) db[oc] += go[k];
        for (int ic = 0; ic < cin; ++ic) {
            const double* x = in + size_t(ic) * gg;
            double* gx = din ? din + size_t(ic) * gg : nullptr;
            const double* wk = w + (size_t(oc) * cin + ic) * 9;
            double* gw = dw + (size_t(oc) * cin + ic) * 9;
            for (int di = -1; di <= 1; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    int kidx = (di + 1) * 3 + (dj + 1);
                    double wv = wk[kidx];
                    double acc = 0;
                    int i0 = std::max(0, -di), i1 = std::min(g, g - di);
                    int j0 = std::max(0, -dj), j1 = std::min(g, g - dj);
                    for (int i = i0; i < i1; ++i) {
                        const double* grow = go + i * g;
                        const double* xrow = x + (i + di) * g + dj;
                        double* gxrow = gx ? gx + (i + di) * g + dj : nullptr;
                        for (int j = j0; j < j1; ++j) {
                            acc += grow[j] * xrow[j];
                            if (gxrow) gxrow[j] += wv * grow[j];
                        }
                    }
                    gw[kidx] += acc;
                }
            }
        }
    }
}

inline void affine_forward(const double* w, const double* b, const double* x, int in,
                           double* y, int out) {
    for (int o = 0; o < out; ++o) {
        const double* wr = w + size_t(o) * in;
        double acc = b ? b[o] : 0.0;
        for (int i = 0; i < in; ++i) acc += wr[i] * x[i];
        y[o] = acc;
    }
}

// dy [out] -> accumulates dw, db, dx
inline void affine_backward(const double* w, const double* x, int in, const double* dy,
                            int out, double* dw, double* db, double* dx) {
    for (int o = 0; o < out; ++o) {
        double g = dy[o];
        if (db) db[o] += g;
        const double* wr = w + size_t(o) * in;
        double* dwr = dw + size_t(o) * in;
        for (int i = 0; i < in; ++i) {
            dwr[i] += g * x[i];
            if (dx) dx[i] += g * wr[i];
        }
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Full forward / backward on one graph
// ---------------------------------------------------------------------------

inline std::vector<double> forward(const Model& model, const EnrichedGraph& graph,
                                   Workspace& ws) {
    const ModelConfig& cfg = model.cfg;
    if (graph.node_count() == 0) throw Error("forward on an empty graph");
    if (graph.grid != cfg.grid)
        throw Error("grid size mismatch: graph " + std::to_string(graph.grid) +
                    " vs model " + std::to_string(cfg.grid));
    for (const auto& gr : graph.grids)
        if (int(gr.data.size()) != 7 * cfg.grid * cfg.grid)
            throw Error("uv grid width violates the 7*G*G contract");
    int n = graph.node_count();
    int g = cfg.grid, gg = g * g, mid = cfg.encoder_mid;
    const ParamStore& P = model.params;
    const Normalizer& N = model.norm;

    ws.nodes.assign(n, {});
    ws.h.assign(cfg.mp_layers + 1, {});
    ws.pre.assign(cfg.mp_layers, {});
    ws.agg.assign(cfg.mp_layers, {});
    ws.h[0].assign(n, std::vector<double>(ModelConfig::kNode));

    const double* c1w = P.at("conv1.w").v.data();
    const double* c1b = P.at("conv1.b").v.data();
    const double* c2w = P.at("conv2.w").v.data();
    const double* c2b = P.at("conv2.b").v.data();
    for (int i = 0; i < n; ++i) {
        Workspace::NodeBuf& nb = ws.nodes[i];
        nb.in = graph.grids[i].data;
        nb.pre1.assign(size_t(mid) * gg, 0);
        nb.act1.assign(size_t(mid) * gg, 0);
        nb.pre2.assign(size_t(ModelConfig::kEncoderOut) * gg, 0);
        nb.act2.assign(size_t(ModelConfig::kEncoderOut) * gg, 0);
        detail::conv3x3_forward(nb.in.data(), 7, c1w, c1b, nb.pre1.data(), mid, g);
        for (size_t k = 0; k < nb.pre1.size(); ++k) nb.act1[k] = silu(nb.pre1[k]);
        detail::conv3x3_forward(nb.act1.data(), mid, c2w, c2b, nb.pre2.data(),
                                ModelConfig::kEncoderOut, g);
        for (size_t k = 0; k < nb.pre2.size(); ++k) nb.act2[k] = silu(nb.pre2[k]);
        nb.mask_idx.clear();
        const double* mask = nb.in.data() + size_t(6) * gg;
        for (int k = 0; k < gg; ++k)
            if (mask[k] > 0.5) nb.mask_idx.push_back(k);
        int cnt = std::max<size_t>(1, nb.mask_idx.size());
        for (int c = 0; c < ModelConfig::kEncoderOut; ++c) {
            double acc = 0;
            const double* a = nb.act2.data() + size_t(c) * gg;
            for (int k : nb.mask_idx) acc += a[k];
            nb.pooled[c] = acc / cnt;
        }
        // node feature: [encoder 64 | normalized mf 28] = 92
        std::vector<double>& x = ws.h[0][i];
        for (int c = 0; c < ModelConfig::kEncoderOut; ++c) x[c] = nb.pooled[c];
        for (int m2 = 0; m2 < ModelConfig::kMf; ++m2) {
            double val = graph.mf[i][m2];
            if (Normalizer::continuous_slot(m2))
                val = (val - N.mf_mean[m2]) / N.mf_std[m2];
            x[ModelConfig::kEncoderOut + m2] = val;
        }
    }

    auto adj = graph.adjacency();
    for (int l = 0; l < cfg.mp_layers; ++l) {
        int in_w = l == 0 ? ModelConfig::kNode : cfg.hidden;
        const std::string p = "mp" + std::to_string(l);
        const double* ws_w = P.at(p + ".self").v.data();
        const double* wn_w = P.at(p + ".nbr").v.data();
        const double* b = P.at(p + ".b").v.data();
        ws.agg[l].assign(n, std::vector<double>(in_w, 0.0));
        ws.pre[l].assign(n, std::vector<double>(cfg.hidden));
        ws.h[l + 1].assign(n, std::vector<double>(cfg.hidden));
        for (int i = 0; i < n; ++i) {
            if (!adj[i].empty()) {
                for (int nb2 : adj[i])
                    for (int k = 0; k < in_w; ++k) ws.agg[l][i][k] += ws.h[l][nb2][k];
                for (int k = 0; k < in_w; ++k) ws.agg[l][i][k] /= double(adj[i].size());
            }
            detail::affine_forward(ws_w, b, ws.h[l][i].data(), in_w,
                                   ws.pre[l][i].data(), cfg.hidden);
            std::vector<double> tmp(cfg.hidden);
            detail::affine_forward(wn_w, nullptr, ws.agg[l][i].data(), in_w, tmp.data(),
                                   cfg.hidden);
            for (int k = 0; k < cfg.hidden; ++k) {
                ws.pre[l][i][k] += tmp[k];
                ws.h[l + 1][i][k] = silu(ws.pre[l][i][k]);
            }
        }
    }

    // pooling: concat(mean, max) -> linear -> 64
    const auto& hn = ws.h[cfg.mp_layers];
    ws.mean_pool.assign(cfg.hidden, 0.0);
    ws.max_pool.assign(cfg.hidden, 0.0);
    ws.argmax.assign(cfg.hidden, 0);
    for (int c = 0; c < cfg.hidden; ++c) {
        double mx = hn[0][c], mean = 0;
        int arg = 0;
        for (int i = 0; i < n; ++i) {
            mean += hn[i][c];
            if (hn[i][c] > mx) { mx = hn[i][c]; arg = i; }
        }
        ws.mean_pool[c] = mean / n;
        ws.max_pool[c] = mx;
        ws.argmax[c] = arg;
    }
    std::vector<double> z(2 * cfg.hidden);
    std::copy(ws.mean_pool.begin(), ws.mean_pool.end(), z.begin());
    std::copy(ws.max_pool.begin(), ws.max_pool.end(), z.begin() + cfg.hidden);
    ws.pool_out.assign(ModelConfig::kPooled, 0.0);
    detail::affine_forward(P.at("pool.w").v.data(), P.at("pool.b").v.data(), z.data(),
                           2 * cfg.hidden, ws.pool_out.data(), ModelConfig::kPooled);

    ws.head_in.assign(ModelConfig::kHeadIn, 0.0);
    std::copy(ws.pool_out.begin(), ws.pool_out.end(), ws.head_in.begin());
    for (int k = 0; k < 3; ++k)
        ws.head_in[ModelConfig::kPooled + k] =
            (graph.globals[k] - N.glob_mean[k]) / N.glob_std[k];

    ws.h1_pre.assign(ModelConfig::kHead1, 0);
    ws.h1.assign(ModelConfig::kHead1, 0);
    detail::affine_forward(P.at("head1.w").v.data(), P.at("head1.b").v.data(),
                           ws.head_in.data(), ModelConfig::kHeadIn, ws.h1_pre.data(),
                           ModelConfig::kHead1);
    for (int k = 0; k < ModelConfig::kHead1; ++k) ws.h1[k] = silu(ws.h1_pre[k]);
    ws.h2_pre.assign(ModelConfig::kHead2, 0);
    ws.h2.assign(ModelConfig::kHead2, 0);
    detail::affine_forward(P.at("head2.w").v.data(), P.at("head2.b").v.data(),
                           ws.h1.data(), ModelConfig::kHead1, ws.h2_pre.data(),
                           ModelConfig::kHead2);
    for (int k = 0; k < ModelConfig::kHead2; ++k) ws.h2[k] = silu(ws.h2_pre[k]);
    ws.out.assign(cfg.out, 0);
    detail::affine_forward(P.at("head3.w").v.data(), P.at("head3.b").v.data(),
                           ws.h2.data(), ModelConfig::kHead2, ws.out.data(), cfg.out);
    return ws.out;
}

// Backpropagate d(loss)/d(out) through the stored workspace.
inline void backward(const Model& model, const EnrichedGraph& graph, Workspace& ws,
                     const std::vector<double>& dout, GradBuffer& grads) {
    const ModelConfig& cfg = model.cfg;
    const ParamStore& P = model.params;
    int n = graph.node_count();
    int g = cfg.grid, gg = g * g, mid = cfg.encoder_mid;

    auto gidx = [&](const std::string& name) -> double* {
        for (size_t i = 0; i < P.params.size(); ++i)
            if (P.params[i].name == name) return grads.g[i].data();
        throw Error("unknown parameter " + name);
    };

    std::vector<double> dh2(ModelConfig::kHead2, 0.0);
    detail::affine_backward(P.at("head3.w").v.data(), ws.h2.data(), ModelConfig::kHead2,
                            dout.data(), cfg.out, gidx("head3.w"), gidx("head3.b"),
                            dh2.data());
    for (int k = 0; k < ModelConfig::kHead2; ++k) dh2[k] *= silu_grad(ws.h2_pre[k]);
    std::vector<double> dh1(ModelConfig::kHead1, 0.0);
    detail::affine_backward(P.at("head2.w").v.data(), ws.h1.data(), ModelConfig::kHead1,
                            dh2.data(), ModelConfig::kHead2, gidx("head2.w"),
                            gidx("head2.b"), dh1.data());
    for (int k = 0; k < ModelConfig::kHead1; ++k) dh1[k] *= silu_grad(ws.h1_pre[k]);
    std::vector<double> dhead_in(ModelConfig::kHeadIn, 0.0);
    detail::affine_backward(P.at("head1.w").v.data(), ws.head_in.data(),
                            ModelConfig::kHeadIn, dh1.data(), ModelConfig::kHead1,
                            gidx("head1.w"), gidx("head1.b"), dhead_in.data());

    std::vector<double> dpool(ModelConfig::kPooled);
    std::copy(dhead_in.begin(), dhead_in.begin() + ModelConfig::kPooled, dpool.begin());
    std::vector<double> z(2 * cfg.hidden);
    std::copy(ws.mean_pool.begin(), ws.mean_pool.end(), z.begin());
    std::copy(ws.max_pool.begin(), ws.max_pool.end(), z.begin() + cfg.hidden);
    std::vector<double> dz(2 * cfg.hidden, 0.0);
    detail::affine_backward(P.at("pool.w").v.data(), z.data(), 2 * cfg.hidden,
                            dpool.data(), ModelConfig::kPooled, gidx("pool.w"),
                            gidx("pool.b"), dz.data());

    std::vector<std::vector<double>> dh(n, std::vector<double>(cfg.hidden, 0.0));
    for (int c = 0; c < cfg.hidden; ++c) {
        for (int i = 0; i < n; ++i) dh[i][c] += dz[c] / n;
        dh[ws.argmax[c]][c] += dz[cfg.hidden + c];
    }

    auto adj = graph.adjacency();
    for (int l = cfg.mp_layers - 1; l >= 0; --l) {
        int in_w = l == 0 ? ModelConfig::kNode : cfg.hidden;
        const std::string p = "mp" + std::to_string(l);
        const double* ws_w = P.at(p + ".self").v.data();
        const double* wn_w = P.at(p + ".nbr").v.data();
        std::vector<std::vector<double>> dx(n, std::vector<double>(in_w, 0.0));
        for (int i = 0; i < n; ++i) {
            std::vector<double>& dpre = dh[i];
            for (int k = 0; k < cfg.hidden; ++k) dpre[k] *= silu_grad(ws.pre[l][i][k]);
            detail::affine_backward(ws_w, ws.h[l][i].data(), in_w, dpre.data(),
                                    cfg.hidden, gidx(p + ".self"), gidx(p + ".b"),
                                    dx[i].data());
            std::vector<double> dagg(in_w, 0.0);
            detail::affine_backward(wn_w, ws.agg[l][i].data(), in_w, dpre.data(),
                                    cfg.hidden, gidx(p + ".nbr"), nullptr, dagg.data());
            if (!adj[i].empty()) {
                double inv = 1.0 / double(adj[i].size());
                for (int nb2 : adj[i])
                    for (int k = 0; k < in_w; ++k) dx[nb2][k] += dagg[k] * inv;
            }
        }
        dh = std::move(dx);
    }

    // encoder backward; dh now holds d/d(node features) with width 92
    double* dc1w = gidx("conv1.w");
    double* dc1b = gidx("conv1.b");
    double* dc2w = gidx("conv2.w");
    double* dc2b = gidx("conv2.b");
    const double* c1w = P.at("conv1.w").v.data();
    const double* c2w = P.at("conv2.w").v.data();
    std::vector<double> dact2(size_t(ModelConfig::kEncoderOut) * gg);
    std::vector<double> dact1(size_t(mid) * gg);
    for (int i = 0; i < n; ++i) {
        Workspace::NodeBuf& nb = ws.nodes[i];
        std::fill(dact2.begin(), dact2.end(), 0.0);
        int cnt = std::max<size_t>(1, nb.mask_idx.size());
        for (int c = 0; c < ModelConfig::kEncoderOut; ++c) {
            double gpool = dh[i][c] / cnt;
            double* d = dact2.data() + size_t(c) * gg;
            for (int k : nb.mask_idx) d[k] += gpool;
        }
        for (size_t k = 0; k < dact2.size(); ++k) dact2[k] *= silu_grad(nb.pre2[k]);
        std::fill(dact1.begin(), dact1.end(), 0.0);
        detail::conv3x3_backward(nb.act1.data(), mid, c2w, ModelConfig::kEncoderOut,
                                 dact2.data(), g, dact1.data(), dc2w, dc2b);
        for (size_t k = 0; k < dact1.size(); ++k) dact1[k] *= silu_grad(nb.pre1[k]);
        detail::conv3x3_backward(nb.in.data(), 7, c1w, mid, dact1.data(), g, nullptr,
                                 dc1w, dc1b);
    }
}

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

// Returns (loss, d/d out) for one sample; regression targets are already
// standardized by the caller.
inline std::pair<double, std::vector<double>> loss_and_dout(
    const std::vector<double>& out, double target, bool classification) {
    if (classification) {
        if (out.size() != 2) throw Error("classification head must emit 2 logits");
        double mx = std::max(out[0], out[1]);
        double e0 = std::exp(out[0] - mx), e1 = std::exp(out[1] - mx);
        double zsum = e0 + e1;
        int cls = target > 0.5 ? 1 : 0;
        double loss = -std::log((cls == 0 ? e0 : e1) / zsum);
        std::vector<double> d = {e0 / zsum, e1 / zsum};
        d[cls] -= 1.0;
        return {loss, d};
    }
    double err = out[0] - target;
    return {err * err, {2 * err}};
}

// ---------------------------------------------------------------------------
// Dataset container and normalization
// ---------------------------------------------------------------------------

struct Dataset {
    std::vector<EnrichedGraph> graphs;
    std::vector<int> split;  // 0 train, 1 val, 2 test

    std::vector<int> indices(int tag) const {
        std::vector<int> out;
        for (size_t i = 0; i < split.size(); ++i)
            if (split[i] == tag) out.push_back(int(i));
        return out;
    }
};

inline Normalizer fit_normalizer(const Dataset& ds, bool classification) {
    Normalizer n;
    n.reset();
    auto train = ds.indices(0);
    if (train.empty()) throw Error("empty training split");
    std::array<double, ModelConfig::kMf> sum{}, sq{};
    std::array<double, 3> gsum{}, gsq{};
    double lsum = 0, lsq = 0;
    size_t faces = 0;
    for (int i : train) {
        const EnrichedGraph& g = ds.graphs[i];
        for (const auto& mf : g.mf) {
            for (int k = 0; k < ModelConfig::kMf; ++k) {
                sum[k] += mf[k];
                sq[k] += mf[k] * mf[k];
            }
            ++faces;
        }
        for (int k = 0; k < 3; ++k) {
            gsum[k] += g.globals[k];
            gsq[k] += g.globals[k] * g.globals[k];
        }
        lsum += g.label;
        lsq += g.label * g.label;
    }
    for (int k = 0; k < ModelConfig::kMf; ++k) {
        if (!Normalizer::continuous_slot(k)) continue;
        n.mf_mean[k] = sum[k] / double(faces);
        double var = sq[k] / double(faces) - n.mf_mean[k] * n.mf_mean[k];
        n.mf_std[k] = var > 1e-12 ? std::sqrt(var) : 1.0;
    }
    for (int k = 0; k < 3; ++k) {
        n.glob_mean[k] = gsum[k] / double(train.size());
        double var = gsq[k] / double(train.size()) - n.glob_mean[k] * n.glob_mean[k];
        n.glob_std[k] = var > 1e-12 ? std::sqrt(var) : 1.0;
    }
    if (!classification) {
        n.label_mean = lsum / double(train.size());
        double var = lsq / double(train.size()) - n.label_mean * n.label_mean;
        n.label_std = var > 1e-12 ? std::sqrt(var) : 1.0;
    }
    return n;
}

// ---------------------------------------------------------------------------
// Adam optimizer
// ---------------------------------------------------------------------------

struct Adam {
    double lr = 1e-4, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long long t = 0;
    std::vector<std::vector<double>> m, v;

    void init(const ParamStore& p) {
        m.resize(p.params.size());
        v.resize(p.params.size());
        for (size_t i = 0; i < p.params.size(); ++i) {
            m[i].assign(p.params[i].size(), 0.0);
            v[i].assign(p.params[i].size(), 0.0);
        }
    }

    void step(ParamStore& p, const GradBuffer& g) {
        ++t;
        double b1c = 1 - std::pow(beta1, double(t));
        double b2c = 1 - std::pow(beta2, double(t));
        for (size_t i = 0; i < p.params.size(); ++i) {
            auto& theta = p.params[i].v;
            for (size_t k = 0; k < theta.size(); ++k) {
                double gk = g.g[i][k];
                m[i][k] = beta1 * m[i][k] + (1 - beta1) * gk;
                v[i][k] = beta2 * v[i][k] + (1 - beta2) * gk * gk;
                theta[k] -= lr * (m[i][k] / b1c) / (std::sqrt(v[i][k] / b2c) + eps);
            }
        }
    }
};

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0, val_loss = 0;
};

struct TrainResult {
    Model model;
    TrainConfig tcfg;
    std::vector<EpochRecord> history;
    double best_val = 0;
    int best_epoch = 0;
    int stopped_epoch = 0;
};

// Mean loss over a set of graphs; forward only.
inline double mean_loss(const Model& model, const Dataset& ds,
                        const std::vector<int>& idx, bool classification) {
    if (idx.empty()) throw Error("empty split");
    Workspace ws;
    double total = 0;
    for (int i : idx) {
        auto out = forward(model, ds.graphs[i], ws);
        double target = classification
                            ? ds.graphs[i].label
                            : (ds.graphs[i].label - model.norm.label_mean) /
                                  model.norm.label_std;
        total += loss_and_dout(out, target, classification).first;
    }
    return total / double(idx.size());
}

inline TrainResult train(const Dataset& ds, ModelConfig mcfg, TrainConfig tcfg) {
    mcfg.out = tcfg.classification ? 2 : 1;
    TrainResult res;
    res.tcfg = tcfg;
    res.model.cfg = mcfg;
    res.model.build();
    res.model.norm = fit_normalizer(ds, tcfg.classification);

    auto train_idx = ds.indices(0);
    auto val_idx = ds.indices(1);
    if (train_idx.empty() || val_idx.empty()) throw Error("empty train or val split");
    for (int i : train_idx)
        if (!ds.graphs[i].has_label) throw Error("training graphs need labels");

    Adam adam;
    adam.lr = tcfg.lr;
    adam.init(res.model.params);

    int n_threads = tcfg.threads > 0
                        ? tcfg.threads
                        : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<int>(n_threads, 8);

    std::mt19937_64 rng(mix_seed(tcfg.seed, 0x7261696e));
    std::vector<double> best_params;
    double best_val = 1e300;
    int best_epoch = 0, since_best = 0;

    std::vector<GradBuffer> tgrads(n_threads);
    for (auto& gb : tgrads) gb.init(res.model.params);
    GradBuffer grads;
    grads.init(res.model.params);

    auto snapshot = [&]() {
        best_params.clear();
        for (const Tensor& t : res.model.params.params)
            best_params.insert(best_params.end(), t.v.begin(), t.v.end());
    };

    int epoch = 0;
    for (epoch = 1; epoch <= tcfg.max_epochs; ++epoch) {
        std::shuffle(train_idx.begin(), train_idx.end(), rng);
        double train_loss = 0;
        size_t seen = 0;
        for (size_t start = 0; start < train_idx.size();
             start += size_t(tcfg.batch_size)) {
            size_t stop = std::min(train_idx.size(), start + size_t(tcfg.batch_size));
            int bn = int(stop - start);
            grads.zero();
            std::vector<double> sample_losses(bn, 0.0);
            auto worker = [&](int tid) {
                Workspace ws;
                tgrads[tid].zero();
                for (int k = tid; k < bn; k += n_threads) {
                    const EnrichedGraph& gph = ds.graphs[train_idx[start + k]];
                    auto out = forward(res.model, gph, ws);
                    double target = tcfg.classification
                                        ? gph.label
                                        : (gph.label - res.model.norm.label_mean) /
                                              res.model.norm.label_std;
                    auto [loss, dout] = loss_and_dout(out, target, tcfg.classification);
                    sample_losses[k] = loss;
                    for (double& d : dout) d /= double(bn);
                    backward(res.model, gph, ws, dout, tgrads[tid]);
                }
            };
            if (n_threads == 1) {
                worker(0);
            } else {
                std::vector<std::thread> pool;
                for (int tIdx = 0; tIdx < n_threads; ++tIdx)
                    pool.emplace_back(worker, tIdx);
                for (auto& th : pool) th.join();
            }
            for (int tIdx = 0; tIdx < n_threads; ++tIdx) grads.add(tgrads[tIdx]);
            double batch_loss = 0;
            for (double l : sample_losses) batch_loss += l;
            if (!std::isfinite(batch_loss))
                throw Error("non-finite loss at epoch " + std::to_string(epoch));
            train_loss += batch_loss;
            seen += size_t(bn);
            adam.step(res.model.params, grads);
        }
        train_loss /= double(seen);
        double val_loss = mean_loss(res.model, ds, val_idx, tcfg.classification);
        if (!std::isfinite(val_loss))
            throw Error("non-finite validation loss at epoch " + std::to_string(epoch));
        res.history.push_back({epoch, train_loss, val_loss});
        if (val_loss < best_val) {
            best_val = val_loss;
            best_epoch = epoch;
            since_best = 0;
            snapshot();
        } else {
            ++since_best;
            if (since_best >= tcfg.patience) break;
        }
    }
    // restore the best parameters
    if (!best_params.empty()) {
        size_t off = 0;
        for (Tensor& t : res.model.params.params) {
            std::copy(best_params.begin() + off, best_params.begin() + off + t.size(),
                      t.v.begin());
            off += t.size();
        }
    }
    res.best_val = best_val;
    res.best_epoch = best_epoch;
    res.stopped_epoch = std::min(epoch, tcfg.max_epochs);
    return res;
}

// ---------------------------------------------------------------------------
// Metrics and baseline
// ---------------------------------------------------------------------------

struct Metrics {
    double rmse = 0, mae = 0, mape = 0;
    double accuracy = 0;  // classification only (percent)
};

inline double predict(const Model& model, const EnrichedGraph& g, Workspace& ws) {
    auto out = forward(model, g, ws);
    if (model.cfg.out == 1)
        return out[0] * model.norm.label_std + model.norm.label_mean;
    return out[1] > out[0] ? 1.0 : 0.0;
}

inline Metrics compute_metrics(const std::vector<double>& pred,
                               const std::vector<double>& truth,
                               bool classification) {
    if (pred.empty() || pred.size() != truth.size())
        throw Error("metrics need a nonempty matched sample");
    Metrics m;
    double se = 0, ae = 0, ape = 0;
    int hits = 0;
    for (size_t i = 0; i < pred.size(); ++i) {
        double err = pred[i] - truth[i];
        se += err * err;
        ae += std::abs(err);
        ape += std::abs(err) / std::max(std::abs(truth[i]), 1e-9);
        if ((pred[i] > 0.5) == (truth[i] > 0.5)) ++hits;
    }
    double n = double(pred.size());
    m.rmse = std::sqrt(se / n);
    m.mae = ae / n;
    m.mape = 100.0 * ape / n;
    m.accuracy = 100.0 * hits / n;
    (void)classification;
    return m;
}

inline Metrics evaluate(const Model& model, const Dataset& ds,
                        const std::vector<int>& idx, bool classification) {
    if (idx.empty()) throw Error("empty evaluation split");
    Workspace ws;
    std::vector<double> pred, truth;
    for (int i : idx) {
        pred.push_back(predict(model, ds.graphs[i], ws));
        truth.push_back(ds.graphs[i].label);
    }
    return compute_metrics(pred, truth, classification);
}

struct BaselineReport {
    double mean = 0, median = 0;
    Metrics metrics;
};

// Constant predictor equal to the training-label mean (the median is also
// reported for reference).
inline BaselineReport baseline_predict(const std::vector<double>& train_labels,
                                       const std::vector<double>& test_labels) {
    if (train_labels.empty()) throw Error("baseline needs training labels");
    BaselineReport rep;
    Aggregates a = aggregates(train_labels);
    rep.mean = a.mean;
    rep.median = a.median;
    if (!test_labels.empty()) {
        std::vector<double> pred(test_labels.size(), rep.mean);
        rep.metrics = compute_metrics(pred, test_labels, false);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Checkpoint I/O: little-endian binary, magic "BGCK", raw 64-bit parameters
// ---------------------------------------------------------------------------

inline void save_checkpoint(const std::string& path, const Model& model,
                            const TrainConfig& tcfg, double best_val, int epoch) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open checkpoint for writing: " + path);
    auto put_u32 = [&](uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
    auto put_i64 = [&](int64_t v) { out.write(reinterpret_cast<char*>(&v), 8); };
    auto put_f64 = [&](double v) { out.write(reinterpret_cast<char*>(&v), 8); };
    auto put_str = [&](const std::string& s) {
        put_u32(uint32_t(s.size()));
        out.write(s.data(), std::streamsize(s.size()));
    };
    out.write("BGCK", 4);
    put_u32(1);  // format version
    const ModelConfig& mc = model.cfg;
    put_u32(uint32_t(mc.grid));
    put_u32(uint32_t(mc.encoder_mid));
    put_u32(uint32_t(mc.mp_layers));
    put_u32(uint32_t(mc.hidden));
    put_u32(uint32_t(mc.out));
    put_i64(int64_t(mc.seed));
    put_f64(tcfg.lr);
    put_u32(uint32_t(tcfg.batch_size));
    put_u32(uint32_t(tcfg.patience));
    put_u32(uint32_t(tcfg.max_epochs));
    put_u32(tcfg.classification ? 1 : 0);
    put_i64(int64_t(tcfg.seed));
    for (double v : model.norm.mf_mean) put_f64(v);
    for (double v : model.norm.mf_std) put_f64(v);
    for (double v : model.norm.glob_mean) put_f64(v);
    for (double v : model.norm.glob_std) put_f64(v);
    put_f64(model.norm.label_mean);
    put_f64(model.norm.label_std);
    put_f64(best_val);
    put_u32(uint32_t(epoch));
    put_u32(uint32_t(model.params.params.size()));
    for (const Tensor& t : model.params.params) {
        put_str(t.name);
        put_u32(uint32_t(t.shape.size()));
        for (int d : t.shape) put_u32(uint32_t(d));
        out.write(reinterpret_cast<const char*>(t.v.data()),
                  std::streamsize(t.v.size() * 8));
    }
}

struct LoadedCheckpoint {
    Model model;
    TrainConfig tcfg;
    double best_val = 0;
    int epoch = 0;
};

inline LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open checkpoint: " + path);
    char magic[4];
    in.read(magic, 4);
    if (std::string(magic, 4) != "BGCK") throw Error("bad checkpoint magic");
    auto get_u32 = [&]() { uint32_t v; in.read(reinterpret_cast<char*>(&v), 4); return v; };
    auto get_i64 = [&]() { int64_t v; in.read(reinterpret_cast<char*>(&v), 8); return v; };
    auto get_f64 = [&]() { double v; in.read(reinterpret_cast<char*>(&v), 8); return v; };
    auto get_str = [&]() {
        uint32_t n = get_u32();
        std::string s(n, '\0');
        in.read(s.data(), n);
        return s;
    };
    if (get_u32() != 1) throw Error("unsupported checkpoint version");
    LoadedCheckpoint lc;
    ModelConfig& mc = lc.model.cfg;
    mc.grid = int(get_u32());
    mc.encoder_mid = int(get_u32());
    mc.mp_layers = int(get_u32());
    mc.hidden = int(get_u32());
    mc.out = int(get_u32());
    mc.seed = uint64_t(get_i64());
    lc.tcfg.lr = get_f64();
    lc.tcfg.batch_size = int(get_u32());
    lc.tcfg.patience = int(get_u32());
    lc.tcfg.max_epochs = int(get_u32());
    lc.tcfg.classification = get_u32() != 0;
    lc.tcfg.seed = uint64_t(get_i64());
    for (double& v : lc.model.norm.mf_mean) v = get_f64();
    for (double& v : lc.model.norm.mf_std) v = get_f64();
    for (double& v : lc.model.norm.glob_mean) v = get_f64();
    for (double& v : lc.model.norm.glob_std) v = get_f64();
    lc.model.norm.label_mean = get_f64();
    lc.model.norm.label_std = get_f64();
    lc.best_val = get_f64();
    lc.epoch = int(get_u32());
    uint32_t count = get_u32();
    for (uint32_t i = 0; i < count; ++i) {
        Tensor t;
        t.name = get_str();
        uint32_t dims = get_u32();
        for (uint32_t d = 0; d < dims; ++d) t.shape.push_back(int(get_u32()));
        t.v.resize(t.size());
        in.read(reinterpret_cast<char*>(t.v.data()), std::streamsize(t.v.size() * 8));
        lc.model.params.params.push_back(std::move(t));
    }
    if (!in) throw Error("truncated checkpoint: " + path);
    return lc;
}

}  // namespace bendgraph::nn
