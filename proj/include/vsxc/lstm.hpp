#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace vsxc {

/// Stacked LSTM with a linear read-out of the last layer's final hidden
/// state. Parameters live in one flat vector so optimizers and gradient
/// checks can treat them uniformly. Layout, per layer l:
///   W_l (4H x in_l), U_l (4H x H), b_l (4H)
/// followed by w_out (H) and b_out (1). Gate rows are ordered i, f, g, o.
struct LstmWeights {
    std::size_t input_size = 1;
    std::size_t hidden_size = 6;
    std::size_t num_layers = 2;
    std::vector<double> params;

    [[nodiscard]] static std::size_t param_count(std::size_t input, std::size_t hidden, std::size_t layers) noexcept;
    /// Offsets of W_l, U_l and b_l inside `params`.
    [[nodiscard]] std::size_t w_offset(std::size_t layer) const noexcept;
    [[nodiscard]] std::size_t u_offset(std::size_t layer) const noexcept;
    [[nodiscard]] std::size_t b_offset(std::size_t layer) const noexcept;
    [[nodiscard]] std::size_t out_offset() const noexcept;

    [[nodiscard]] bool all_finite() const noexcept;
};

/// Zero-filled weights of the given shape.
[[nodiscard]] LstmWeights lstm_zeros(std::size_t input, std::size_t hidden, std::size_t layers);

/// uniform(-0.5, 0.5) / sqrt(fan_in), forget-gate bias +1.
[[nodiscard]] LstmWeights lstm_init(std::size_t input, std::size_t hidden, std::size_t layers, std::uint64_t seed);

/// Scalar prediction for a sequence of scalar inputs (input_size 1).
/// Throws NumericalError on non-finite weights.
[[nodiscard]] double lstm_forward(const LstmWeights& w, std::span<const double> sequence);

/// Mean squared error over the batch and its gradient with respect to `params`.
struct LstmGradient {
    double loss = 0.0;
    std::vector<double> grad;
};
[[nodiscard]] LstmGradient lstm_loss_grad(const LstmWeights& w, const std::vector<std::vector<double>>& sequences,
                                          std::span<const double> targets);

struct AdamConfig {
    double learning_rate = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int epochs = 200;
};

struct TrainTrace {
    std::vector<double> loss_history;  ///< loss of the accepted weights, one entry per epoch
    int rejected_steps = 0;
};

/// Full-batch Adam. A step that raises the loss is undone and retried with
/// half the learning rate and no momentum, so the recorded loss never
/// increases; accepted steps let the rate grow back to its configured value.
TrainTrace lstm_train(LstmWeights& w, const std::vector<std::vector<double>>& sequences,
                      std::span<const double> targets, const AdamConfig& cfg);

}  // namespace vsxc
