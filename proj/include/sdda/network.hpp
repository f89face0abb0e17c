#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdda/matrix.hpp"
#include "sdda/rng.hpp"

namespace sdda {

enum class Activation { relu, tanh };

std::string to_string(Activation a);
bool activation_from_string(const std::string& s, Activation& out);

/// One parameter set serving both streams (tied weights): layer_dims is
/// [d_in, hidden..., L, k]. The second-to-last layer is the adapted layer
/// and is always linear, so feature norms are unbounded; the final layer
/// emits logits. Hidden layers use hidden_activation.
struct MlpParams {
    std::vector<std::size_t> layer_dims;
    std::vector<Matrix> weights;              // weights[l]: dims[l] x dims[l+1]
    std::vector<std::vector<double>> biases;  // biases[l]: dims[l+1]
    Activation hidden_activation = Activation::relu;

    std::size_t layer_count() const { return weights.size(); }
    std::size_t input_dim() const { return layer_dims.front(); }
    std::size_t adapted_dim() const { return layer_dims[layer_dims.size() - 2]; }
    std::size_t class_count() const { return layer_dims.back(); }
    std::size_t parameter_count() const;

    /// Flat parameter vector (weights row-major then bias, layer by
    /// layer); used by the finite-difference checks.
    std::vector<double> flatten() const;
    void unflatten(const std::vector<double>& flat);

    bool operator==(const MlpParams&) const = default;
};

/// Glorot-uniform weights from the given generator, zero biases.
/// Draw order is fixed (layer by layer, weights row-major) so identical
/// seeds give bit-identical parameters.
MlpParams init_params(const std::vector<std::size_t>& layer_dims, Activation hidden, Rng& rng);

struct ForwardCache {
    std::vector<Matrix> pre_activations;  // z per layer
    std::vector<Matrix> activations;      // a per layer, activations[0] = input
    const Matrix& adapted_features() const { return activations[activations.size() - 2]; }
};

/// Returns logits (b x k) and fills the cache backward needs.
Matrix forward(const MlpParams& params, const Matrix& input, ForwardCache& cache);
Matrix forward(const MlpParams& params, const Matrix& input);

struct CrossEntropyResult {
    double loss = 0.0;
    Matrix dlogits;  // (1/b)(softmax - onehot)
};

/// Mean negative log-likelihood with log-sum-exp stabilization.
CrossEntropyResult cross_entropy(const Matrix& logits, const std::vector<int>& labels);

struct MlpGrads {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    MlpGrads() = default;
    explicit MlpGrads(const MlpParams& shape_of);
    MlpGrads& operator+=(const MlpGrads& o);
};

/// Backpropagation. dlogits and/or d_adapted may be null; d_adapted is
/// added to the backpropagated signal at the adapted layer's activation
/// before continuing toward the input.
MlpGrads backward(const MlpParams& params, const ForwardCache& cache,
                  const Matrix* dlogits, const Matrix* d_adapted);

struct AdamState {
    std::vector<Matrix> m_w, v_w;
    std::vector<std::vector<double>> m_b, v_b;
    std::uint64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    AdamState() = default;
    explicit AdamState(const MlpParams& shape_of);
};

/// Standard bias-corrected Adam update, in place. Throws numeric_error on
/// non-finite gradient entries.
void adam_step(AdamState& state, MlpParams& params, const MlpGrads& grads, double lr);

} // namespace sdda
