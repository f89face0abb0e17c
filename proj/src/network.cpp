#include "sdda/network.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sdda/errors.hpp"

namespace sdda {

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

bool activation_from_string(const std::string& s, Activation& out) {
    if (s == "relu") out = Activation::relu;
    else if (s == "tanh") out = Activation::tanh;
    else return false;
    return true;
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
        n += weights[l].size() + biases[l].size();
    return n;
}

std::vector<double> MlpParams::flatten() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (std::size_t l = 0; l < weights.size(); ++l) {
        flat.insert(flat.end(), weights[l].values().begin(), weights[l].values().end());
        flat.insert(flat.end(), biases[l].begin(), biases[l].end());
    }
    return flat;
}

void MlpParams::unflatten(const std::vector<double>& flat) {
    if (flat.size() != parameter_count())
        throw std::invalid_argument("MlpParams::unflatten: size mismatch");
    std::size_t pos = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (double& w : weights[l].values()) w = flat[pos++];
        for (double& b : biases[l]) b = flat[pos++];
    }
}

MlpParams init_params(const std::vector<std::size_t>& layer_dims, Activation hidden, Rng& rng) {
    if (layer_dims.size() < 3)
        throw std::invalid_argument(
            "init_params: need at least [d_in, adapted, classes] layer dims");
    for (std::size_t d : layer_dims)
        if (d == 0) throw std::invalid_argument("init_params: zero layer width");

    MlpParams p;
    p.layer_dims = layer_dims;
    p.hidden_activation = hidden;
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        const std::size_t fan_in = layer_dims[l], fan_out = layer_dims[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Matrix w(fan_in, fan_out);
        for (double& x : w.values()) x = (2.0 * rng.uniform() - 1.0) * limit;
        p.weights.push_back(std::move(w));
        p.biases.emplace_back(fan_out, 0.0);
    }
    return p;
}

namespace {

double apply_activation(Activation act, double z) {
    return act == Activation::relu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

double activation_derivative(Activation act, double z) {
    if (act == Activation::relu) return z > 0.0 ? 1.0 : 0.0;
    const double t = std::tanh(z);
    return 1.0 - t * t;
}

} // namespace

Matrix forward(const MlpParams& params, const Matrix& input, ForwardCache& cache) {
    if (input.cols() != params.input_dim())
        throw std::invalid_argument("forward: input width " + std::to_string(input.cols()) +
                                    " differs from d_in " + std::to_string(params.input_dim()));
    const std::size_t n_layers = params.layer_count();
    cache.pre_activations.clear();
    cache.activations.clear();
    cache.activations.push_back(input);

    Matrix a = input;
    for (std::size_t l = 0; l < n_layers; ++l) {
        Matrix z = matmul(a, params.weights[l]);
        for (std::size_t i = 0; i < z.rows(); ++i)
            for (std::size_t j = 0; j < z.cols(); ++j)
                z(i, j) += params.biases[l][j];
        cache.pre_activations.push_back(z);
        // adapted layer (n_layers - 2) and output layer are linear
        if (l + 2 < n_layers) {
            for (double& x : z.values()) x = apply_activation(params.hidden_activation, x);
        }
        cache.activations.push_back(z);
        a = std::move(z);
    }
    return cache.activations.back();
}

Matrix forward(const MlpParams& params, const Matrix& input) {
    ForwardCache cache;
    return forward(params, input, cache);
}

CrossEntropyResult cross_entropy(const Matrix& logits, const std::vector<int>& labels) {
    const std::size_t b = logits.rows(), k = logits.cols();
    if (labels.size() != b)
        throw std::invalid_argument("cross_entropy: label count differs from batch size");
    for (int y : labels)
        if (y < 0 || static_cast<std::size_t>(y) >= k)
            throw std::invalid_argument("cross_entropy: label " + std::to_string(y) +
                                        " outside [0, " + std::to_string(k) + ")");

    CrossEntropyResult r;
    r.dlogits = Matrix(b, k);
    const double inv_b = 1.0 / static_cast<double>(b);
    for (std::size_t i = 0; i < b; ++i) {
        double zmax = logits(i, 0);
        for (std::size_t j = 1; j < k; ++j) zmax = std::max(zmax, logits(i, j));
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) sum += std::exp(logits(i, j) - zmax);
        const double log_z = zmax + std::log(sum);
        r.loss += inv_b * (log_z - logits(i, static_cast<std::size_t>(labels[i])));
        for (std::size_t j = 0; j < k; ++j)
            r.dlogits(i, j) = inv_b * std::exp(logits(i, j) - log_z);
        r.dlogits(i, static_cast<std::size_t>(labels[i])) -= inv_b;
    }
    return r;
}

MlpGrads::MlpGrads(const MlpParams& shape_of) {
    for (std::size_t l = 0; l < shape_of.weights.size(); ++l) {
        weights.emplace_back(shape_of.weights[l].rows(), shape_of.weights[l].cols());
        biases.emplace_back(shape_of.biases[l].size(), 0.0);
    }
}

MlpGrads& MlpGrads::operator+=(const MlpGrads& o) {
    if (weights.size() != o.weights.size())
        throw std::invalid_argument("MlpGrads::operator+=: layer count mismatch");
    for (std::size_t l = 0; l < weights.size(); ++l) {
        weights[l] += o.weights[l];
        for (std::size_t j = 0; j < biases[l].size(); ++j) biases[l][j] += o.biases[l][j];
    }
    return *this;
}

MlpGrads backward(const MlpParams& params, const ForwardCache& cache,
                  const Matrix* dlogits, const Matrix* d_adapted) {
    if (dlogits == nullptr && d_adapted == nullptr)
        throw std::invalid_argument("backward: need dlogits and/or d_adapted");
    const std::size_t n_layers = params.layer_count();
    if (cache.activations.size() != n_layers + 1)
        throw std::invalid_argument("backward: cache does not match the network");

    const std::size_t b = cache.activations[0].rows();
    if (dlogits != nullptr &&
        (dlogits->rows() != b || dlogits->cols() != params.class_count()))
        throw std::invalid_argument("backward: dlogits shape mismatch");
    if (d_adapted != nullptr &&
        (d_adapted->rows() != b || d_adapted->cols() != params.adapted_dim()))
        throw std::invalid_argument("backward: d_adapted shape mismatch");

    MlpGrads grads(params);
    Matrix da = dlogits != nullptr ? *dlogits : Matrix(b, params.class_count());
    for (std::size_t l = n_layers; l-- > 0;) {
        // da holds dL/d activations[l+1]; inject the adapted-layer signal
        if (l + 2 == n_layers && d_adapted != nullptr) da += *d_adapted;
        Matrix dz = std::move(da);
        if (l + 2 < n_layers) {
            const Matrix& z = cache.pre_activations[l];
            for (std::size_t i = 0; i < dz.size(); ++i)
                dz.values()[i] *= activation_derivative(params.hidden_activation, z.values()[i]);
        }
        grads.weights[l] = matmul_at_b(cache.activations[l], dz);
        for (std::size_t i = 0; i < dz.rows(); ++i)
            for (std::size_t j = 0; j < dz.cols(); ++j)
                grads.biases[l][j] += dz(i, j);
        if (l > 0) da = matmul_a_bt(dz, params.weights[l]);
    }
    return grads;
}

AdamState::AdamState(const MlpParams& shape_of) {
    for (std::size_t l = 0; l < shape_of.weights.size(); ++l) {
        m_w.emplace_back(shape_of.weights[l].rows(), shape_of.weights[l].cols());
        v_w.emplace_back(shape_of.weights[l].rows(), shape_of.weights[l].cols());
        m_b.emplace_back(shape_of.biases[l].size(), 0.0);
        v_b.emplace_back(shape_of.biases[l].size(), 0.0);
    }
}

namespace {

void adam_update(std::span<double> p, std::span<const double> g,
                 std::span<double> m, std::span<double> v,
                 double lr, double beta1, double beta2, double eps,
                 double bc1, double bc2) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!std::isfinite(g[i])) throw numeric_error("adam_step: non-finite gradient entry");
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

} // namespace

void adam_step(AdamState& state, MlpParams& params, const MlpGrads& grads, double lr) {
    if (grads.weights.size() != params.weights.size())
        throw std::invalid_argument("adam_step: gradient layer count mismatch");
    ++state.step;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        adam_update(params.weights[l].values(), grads.weights[l].values(),
                    state.m_w[l].values(), state.v_w[l].values(),
                    lr, state.beta1, state.beta2, state.epsilon, bc1, bc2);
        adam_update(params.biases[l], grads.biases[l], state.m_b[l], state.v_b[l],
                    lr, state.beta1, state.beta2, state.epsilon, bc1, bc2);
    }
}

} // namespace sdda
