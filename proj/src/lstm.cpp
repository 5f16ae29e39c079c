#include "vsxc/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "vsxc/error.hpp"

namespace vsxc {

std::size_t LstmWeights::param_count(std::size_t input, std::size_t hidden, std::size_t layers) noexcept {
    std::size_t total = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = l == 0 ? input : hidden;
        total += 4 * hidden * in + 4 * hidden * hidden + 4 * hidden;
    }
    return total + hidden + 1;
}

std::size_t LstmWeights::w_offset(std::size_t layer) const noexcept {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layer; ++l) {
        const std::size_t in = l == 0 ? input_size : hidden_size;
        off += 4 * hidden_size * (in + hidden_size + 1);
    }
    return off;
}

std::size_t LstmWeights::u_offset(std::size_t layer) const noexcept {
    const std::size_t in = layer == 0 ? input_size : hidden_size;
    return w_offset(layer) + 4 * hidden_size * in;
}

std::size_t LstmWeights::b_offset(std::size_t layer) const noexcept {
    return u_offset(layer) + 4 * hidden_size * hidden_size;
}

std::size_t LstmWeights::out_offset() const noexcept { return w_offset(num_layers); }

bool LstmWeights::all_finite() const noexcept {
    return std::all_of(params.begin(), params.end(), [](double v) { return std::isfinite(v); });
}

LstmWeights lstm_zeros(std::size_t input, std::size_t hidden, std::size_t layers) {
    if (input == 0 || hidden == 0 || layers == 0) throw InvalidArgument("lstm: sizes must be positive");
    LstmWeights w;
    w.input_size = input;
    w.hidden_size = hidden;
    w.num_layers = layers;
    w.params.assign(LstmWeights::param_count(input, hidden, layers), 0.0);
    return w;
}

LstmWeights lstm_init(std::size_t input, std::size_t hidden, std::size_t layers, std::uint64_t seed) {
    auto w = lstm_zeros(input, hidden, layers);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    const std::size_t H = hidden;
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = l == 0 ? input : hidden;
        const double scale = 1.0 / std::sqrt(static_cast<double>(in + H));
        for (std::size_t i = w.w_offset(l); i < w.b_offset(l); ++i) w.params[i] = u(rng) * scale;
        for (std::size_t j = 0; j < H; ++j) w.params[w.b_offset(l) + H + j] = 1.0;
    }
    const double out_scale = 1.0 / std::sqrt(static_cast<double>(H));
    for (std::size_t j = 0; j < H; ++j) w.params[w.out_offset() + j] = u(rng) * out_scale;
    return w;
}

namespace {

inline double sigm(double x) noexcept {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Activations of one sequence, kept for back-propagation. Index [l][t * H + j]
// for per-unit quantities.
struct Cache {
    std::size_t steps = 0;
    std::vector<std::vector<double>> gi, gf, gg, go, c, h;
};

double forward(const LstmWeights& w, std::span<const double> seq, Cache* cache) {
    const std::size_t H = w.hidden_size;
    const std::size_t T = seq.size();
    const double* p = w.params.data();
    std::vector<double> layer_in(seq.begin(), seq.end());  // T x in
    std::size_t in = w.input_size;
    if (in != 1) throw InvalidArgument("lstm_forward: only scalar inputs are supported");

    std::vector<double> h_seq(T * H), c_seq(T * H), a(4 * H);
    if (cache) {
        cache->steps = T;
        for (auto* v : {&cache->gi, &cache->gf, &cache->gg, &cache->go, &cache->c, &cache->h})
            v->assign(w.num_layers, std::vector<double>(T * H));
    }
    for (std::size_t l = 0; l < w.num_layers; ++l) {
        const double* W = p + w.w_offset(l);
        const double* U = p + w.u_offset(l);
        const double* b = p + w.b_offset(l);
        std::vector<double> h(H, 0.0), c(H, 0.0);
        for (std::size_t t = 0; t < T; ++t) {
            const double* x = layer_in.data() + t * in;
            for (std::size_t r = 0; r < 4 * H; ++r) {
                double acc = b[r];
                const double* wr = W + r * in;
                for (std::size_t q = 0; q < in; ++q) acc += wr[q] * x[q];
                const double* ur = U + r * H;
                for (std::size_t q = 0; q < H; ++q) acc += ur[q] * h[q];
                a[r] = acc;
            }
            for (std::size_t j = 0; j < H; ++j) {
                const double ig = sigm(a[j]);
                const double fg = sigm(a[H + j]);
                const double gg = std::tanh(a[2 * H + j]);
                const double og = sigm(a[3 * H + j]);
                c[j] = fg * c[j] + ig * gg;
                h[j] = og * std::tanh(c[j]);
                if (cache) {
                    cache->gi[l][t * H + j] = ig;
                    cache->gf[l][t * H + j] = fg;
                    cache->gg[l][t * H + j] = gg;
                    cache->go[l][t * H + j] = og;
                    cache->c[l][t * H + j] = c[j];
                    cache->h[l][t * H + j] = h[j];
                }
            }
            std::copy(h.begin(), h.end(), h_seq.begin() + static_cast<std::ptrdiff_t>(t * H));
        }
        layer_in = h_seq;
        in = H;
    }
    const double* wo = p + w.out_offset();
    double y = wo[H];
    for (std::size_t j = 0; j < H; ++j) y += wo[j] * layer_in[(T - 1) * H + j];
    return y;
}

// Accumulates d(out)/d(params) * dy into grad.
void backward(const LstmWeights& w, std::span<const double> seq, const Cache& cc, double dy, std::vector<double>& grad) {
    const std::size_t H = w.hidden_size;
    const std::size_t T = cc.steps;
    const std::size_t L = w.num_layers;
    const double* p = w.params.data();
    const double* wo = p + w.out_offset();
    double* gwo = grad.data() + w.out_offset();
    for (std::size_t j = 0; j < H; ++j) gwo[j] += dy * cc.h[L - 1][(T - 1) * H + j];
    gwo[H] += dy;

    // dh_ext[t * H + j]: gradient reaching layer l's h_t from above.
    std::vector<double> dh_ext(T * H, 0.0);
    for (std::size_t j = 0; j < H; ++j) dh_ext[(T - 1) * H + j] = dy * wo[j];

    std::vector<double> da(4 * H), dh_next(H), dc_next(H);
    for (std::size_t l = L; l-- > 0;) {
        const std::size_t in = l == 0 ? w.input_size : H;
        const double* W = p + w.w_offset(l);
        const double* U = p + w.u_offset(l);
        double* gW = grad.data() + w.w_offset(l);
        double* gU = grad.data() + w.u_offset(l);
        double* gb = grad.data() + w.b_offset(l);
        std::vector<double> dx(T * in, 0.0);
        std::fill(dh_next.begin(), dh_next.end(), 0.0);
        std::fill(dc_next.begin(), dc_next.end(), 0.0);
        for (std::size_t t = T; t-- > 0;) {
            for (std::size_t j = 0; j < H; ++j) {
                const std::size_t k = t * H + j;
                const double ig = cc.gi[l][k], fg = cc.gf[l][k], gg = cc.gg[l][k], og = cc.go[l][k];
                const double tc = std::tanh(cc.c[l][k]);
                const double c_prev = t > 0 ? cc.c[l][k - H] : 0.0;
                const double dh = dh_ext[k] + dh_next[j];
                const double dc = dc_next[j] + dh * og * (1.0 - tc * tc);
                da[j] = dc * gg * ig * (1.0 - ig);
                da[H + j] = dc * c_prev * fg * (1.0 - fg);
                da[2 * H + j] = dc * ig * (1.0 - gg * gg);
                da[3 * H + j] = dh * tc * og * (1.0 - og);
                dc_next[j] = dc * fg;
            }
            const double* x = l == 0 ? seq.data() + t : cc.h[l - 1].data() + t * H;
            const double* h_prev = t > 0 ? cc.h[l].data() + (t - 1) * H : nullptr;
            std::fill(dh_next.begin(), dh_next.end(), 0.0);
            for (std::size_t r = 0; r < 4 * H; ++r) {
                const double d = da[r];
                gb[r] += d;
                for (std::size_t q = 0; q < in; ++q) {
                    gW[r * in + q] += d * x[q];
                    dx[t * in + q] += d * W[r * in + q];
                }
                for (std::size_t q = 0; q < H; ++q) {
                    if (h_prev) gU[r * H + q] += d * h_prev[q];
                    dh_next[q] += d * U[r * H + q];
                }
            }
        }
        if (l > 0) dh_ext = std::move(dx);
    }
}

}  // namespace

double lstm_forward(const LstmWeights& w, std::span<const double> sequence) {
    if (w.params.size() != LstmWeights::param_count(w.input_size, w.hidden_size, w.num_layers))
        throw InvalidArgument("lstm_forward: parameter vector has the wrong size");
    if (!w.all_finite()) throw NumericalError("lstm_forward: non-finite weights");
    if (sequence.empty()) throw InvalidArgument("lstm_forward: empty sequence");
    return forward(w, sequence, nullptr);
}

LstmGradient lstm_loss_grad(const LstmWeights& w, const std::vector<std::vector<double>>& sequences,
                            std::span<const double> targets) {
    if (sequences.size() != targets.size() || sequences.empty())
        throw InvalidArgument("lstm_loss_grad: need one target per non-empty batch entry");
    if (!w.all_finite()) throw NumericalError("lstm_loss_grad: non-finite weights");
    LstmGradient out;
    out.grad.assign(w.params.size(), 0.0);
    const auto n = static_cast<double>(sequences.size());
    Cache cache;
    for (std::size_t i = 0; i < sequences.size(); ++i) {
        const double y = forward(w, sequences[i], &cache);
        const double err = y - targets[i];
        out.loss += err * err / n;
        backward(w, sequences[i], cache, 2.0 * err / n, out.grad);
    }
    return out;
}

TrainTrace lstm_train(LstmWeights& w, const std::vector<std::vector<double>>& sequences,
                      std::span<const double> targets, const AdamConfig& cfg) {
    if (cfg.epochs < 0) throw InvalidArgument("lstm_train: epochs must be >= 0");
    if (!(cfg.learning_rate > 0.0)) throw InvalidArgument("lstm_train: learning rate must be positive");
    TrainTrace trace;
    const std::size_t P = w.params.size();
    std::vector<double> m(P, 0.0), v(P, 0.0);
    auto current = lstm_loss_grad(w, sequences, targets);
    trace.loss_history.push_back(current.loss);
    double lr = cfg.learning_rate;
    int step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto saved = w.params;
        const auto v_saved = v;
        ++step;
        const double bc1 = 1.0 - std::pow(cfg.beta1, step);
        const double bc2 = 1.0 - std::pow(cfg.beta2, step);
        for (std::size_t i = 0; i < P; ++i) {
            const double g = current.grad[i];
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
            w.params[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.epsilon);
        }
        bool accept = w.all_finite();
        LstmGradient next;
        if (accept) {
            next = lstm_loss_grad(w, sequences, targets);
            accept = next.loss <= current.loss;
        }
        if (accept) {
            current = std::move(next);
            lr = std::min(cfg.learning_rate, lr * 1.25);
        } else {
            // Momentum carried the step past the valley: drop it and retry smaller.
            w.params = saved;
            std::fill(m.begin(), m.end(), 0.0);
            v = v_saved;
            --step;
            lr *= 0.5;
            ++trace.rejected_steps;
        }
        trace.loss_history.push_back(current.loss);
    }
    return trace;
}

}  // namespace vsxc
