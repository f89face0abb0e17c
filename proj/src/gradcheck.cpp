#include "sdda/gradcheck.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include "sdda/alignment.hpp"
#include "sdda/discrimination.hpp"
#include "sdda/matrix.hpp"
#include "sdda/network.hpp"
#include "sdda/numerics.hpp"
#include "sdda/rng.hpp"
#include "sdda/trainer.hpp"

namespace sdda {
namespace {

// One random evaluation: analytic gradient and the matching
// finite-difference estimate over the same flattened point.
struct TrialResult {
    std::vector<double> analytic;
    std::vector<double> numeric;
};

using TrialFn = std::function<TrialResult(Rng&)>;

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (double& v : m.values()) v = 2.0 * rng.uniform() - 1.0;
    return m;
}

std::vector<int> random_labels(Rng& rng, std::size_t n, std::size_t classes) {
    std::vector<int> y(n);
    for (int& v : y) v = static_cast<int>(rng.below(classes));
    return y;
}

std::vector<double> pack2(const Matrix& a, const Matrix& b) {
    std::vector<double> flat;
    flat.reserve(a.size() + b.size());
    flat.insert(flat.end(), a.values().begin(), a.values().end());
    flat.insert(flat.end(), b.values().begin(), b.values().end());
    return flat;
}

void unpack2(const std::vector<double>& flat, Matrix& a, Matrix& b) {
    std::copy(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(a.size()),
              a.values().begin());
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(a.size()), flat.end(),
              b.values().begin());
}

std::vector<double> flatten_grads(const MlpGrads& g) {
    std::vector<double> flat;
    for (std::size_t l = 0; l < g.weights.size(); ++l) {
        flat.insert(flat.end(), g.weights[l].values().begin(), g.weights[l].values().end());
        flat.insert(flat.end(), g.biases[l].begin(), g.biases[l].end());
    }
    return flat;
}

constexpr std::size_t kBatch = 6;
constexpr std::size_t kFeat = 4;
constexpr std::size_t kClasses = 3;

// Two random b x L batches against any discrepancy loss.
TrialFn discrepancy_trial(std::function<DiscrepancyResult(const Matrix&, const Matrix&)> loss) {
    return [loss = std::move(loss)](Rng& rng) {
        Matrix s = random_matrix(rng, kBatch, kFeat);
        Matrix t = random_matrix(rng, kBatch, kFeat);
        const DiscrepancyResult res = loss(s, t);

        TrialResult out;
        out.analytic = pack2(res.grad_source, res.grad_target);
        Matrix s2 = s, t2 = t;
        const ScalarFn f = [&](const std::vector<double>& flat) {
            unpack2(flat, s2, t2);
            return loss(s2, t2).loss;
        };
        out.numeric = finite_diff_gradient(f, pack2(s, t));
        return out;
    };
}

TrialFn intra_trial(double margin) {
    return [margin](Rng& rng) {
        Matrix phi = random_matrix(rng, kBatch, kFeat);
        const std::vector<int> labels = random_labels(rng, kBatch, kClasses);
        CenterBank bank(kClasses, kFeat, 0.5, margin);
        bank.centers = random_matrix(rng, kClasses, kFeat);

        const IntraResult res = intra_loss(phi, labels, bank);
        TrialResult out;
        out.analytic = res.grad.values();
        Matrix phi2 = phi;
        const ScalarFn f = [&](const std::vector<double>& flat) {
            phi2.values() = flat;
            return intra_loss(phi2, labels, bank).loss;
        };
        out.numeric = finite_diff_gradient(f, phi.values());
        return out;
    };
}

// Rows pushed away from the origin: the radial gradient is undefined there
// and the subgradient convention would disagree with finite differences.
Matrix random_offorigin_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix m = random_matrix(rng, rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        double sq = 0.0;
        for (std::size_t c = 0; c < cols; ++c) sq += m(r, c) * m(r, c);
        if (std::sqrt(sq) < 0.5) m(r, 0) += 1.0;
    }
    return m;
}

TrialResult inter_trial(Rng& rng) {
    Matrix s = random_offorigin_matrix(rng, kBatch, kFeat);
    Matrix t = random_offorigin_matrix(rng, kBatch, kFeat);
    const NormConstraint nc{1.5};

    const InterResult res = inter_loss(s, t, nc);
    TrialResult out;
    out.analytic = pack2(res.grad_source, res.grad_target);
    Matrix s2 = s, t2 = t;
    const ScalarFn f = [&](const std::vector<double>& flat) {
        unpack2(flat, s2, t2);
        return inter_loss(s2, t2, nc).loss;
    };
    out.numeric = finite_diff_gradient(f, pack2(s, t));
    return out;
}

const std::vector<std::size_t> kNetDims{3, 5, 4, 3};

TrialFn network_trial(Activation act) {
    return [act](Rng& rng) {
        MlpParams params = init_params(kNetDims, act, rng);
        const Matrix x = random_matrix(rng, 5, kNetDims.front());
        const std::vector<int> labels = random_labels(rng, 5, kNetDims.back());

        ForwardCache cache;
        const Matrix logits = forward(params, x, cache);
        const CrossEntropyResult ce = cross_entropy(logits, labels);
        const MlpGrads grads = backward(params, cache, &ce.dlogits, nullptr);

        TrialResult out;
        out.analytic = flatten_grads(grads);
        MlpParams p2 = params;
        const ScalarFn f = [&](const std::vector<double>& flat) {
            p2.unflatten(flat);
            return cross_entropy(forward(p2, x), labels).loss;
        };
        out.numeric = finite_diff_gradient(f, params.flatten());
        return out;
    };
}

TrialFn composite_trial(Activation act) {
    return [act](Rng& rng) {
        TrainerConfig cfg;
        cfg.lambda_ssc = 0.7;
        cfg.lambda_intra = 0.4;
        cfg.lambda_inter = 0.3;
        cfg.metric = MetricKind::ssc;
        cfg.similarity = SimilarityKind{Similarity::heat_kernel, 0.5};
        cfg.target_norm = 1.2;
        cfg.margin = 0.2;
        cfg.schedule_enabled = false;
        cfg.layer_dims = kNetDims;
        cfg.hidden_activation = act;

        MlpParams params = init_params(kNetDims, act, rng);
        const Matrix sx = random_matrix(rng, kBatch, kNetDims.front());
        const Matrix tx = random_matrix(rng, kBatch, kNetDims.front());
        const std::vector<int> labels = random_labels(rng, kBatch, kNetDims.back());
        CenterBank bank(kNetDims.back(), params.adapted_dim(), 0.5, cfg.margin);
        bank.centers = random_matrix(rng, kNetDims.back(), params.adapted_dim());

        const CompositeGrads cg =
            composite_gradients(params, bank, sx, labels, tx, cfg, 0.0);
        TrialResult out;
        out.analytic = flatten_grads(cg.grads);
        MlpParams p2 = params;
        const ScalarFn f = [&](const std::vector<double>& flat) {
            p2.unflatten(flat);
            return composite_gradients(p2, bank, sx, labels, tx, cfg, 0.0).scalars.loss_total;
        };
        out.numeric = finite_diff_gradient(f, params.flatten());
        return out;
    };
}

GradCheckEntry run_entry(const std::string& name, const GradCheckOptions& opts,
                         const TrialFn& trial) {
    GradCheckEntry entry;
    entry.name = name;
    const Rng root(opts.seed);
    for (std::size_t t = 0; t < opts.trials; ++t) {
        Rng rng = root.substream(t);
        TrialResult res = trial(rng);
        if (opts.corrupt_scale != 1.0)
            for (double& v : res.analytic) v *= opts.corrupt_scale;
        const double err = max_relative_error(res.analytic, res.numeric);
        if (err > entry.max_rel_err) {
            entry.max_rel_err = err;
            entry.worst_trial = t;
        }
    }
    entry.passed = entry.max_rel_err <= opts.tolerance;
    return entry;
}

void add_similarity_family(std::vector<std::pair<std::string, TrialFn>>& plan,
                           const std::string& prefix,
                           DiscrepancyResult (*loss)(const Matrix&, const Matrix&,
                                                     const SimilarityKind&)) {
    const std::pair<Similarity, double> kinds[] = {
        {Similarity::dot_product, 0.0},       {Similarity::euclidean_distance, 0.0},
        {Similarity::cosine, 0.0},            {Similarity::heat_kernel, 0.7},
        {Similarity::heat_kernel_sq, 0.7},
    };
    for (const auto& [tag, gamma] : kinds) {
        SimilarityKind kind{tag, gamma > 0.0 ? gamma : 1e-3};
        plan.emplace_back(prefix + "[" + to_string(tag) + "]",
                          discrepancy_trial([loss, kind](const Matrix& s, const Matrix& t) {
                              return loss(s, t, kind);
                          }));
    }
}

} // namespace

bool GradCheckReport::all_passed() const {
    for (const GradCheckEntry& e : entries)
        if (!e.passed) return false;
    return true;
}

bool valid_gradcheck_scope(const std::string& scope) {
    static const char* kScopes[] = {"all",   "ssc",   "coral", "mmd",     "cmd",
                                    "msm",   "intra", "inter", "network", "composite"};
    for (const char* s : kScopes)
        if (scope == s) return true;
    return false;
}

GradCheckReport run_gradcheck(const GradCheckOptions& opts) {
    if (!valid_gradcheck_scope(opts.scope))
        throw std::invalid_argument("unknown gradcheck scope: " + opts.scope);
    if (opts.trials == 0) throw std::invalid_argument("gradcheck: trials must be >= 1");

    std::vector<std::pair<std::string, TrialFn>> plan;
    const bool all = opts.scope == "all";

    if (all || opts.scope == "ssc") add_similarity_family(plan, "ssc", &ssc_loss);
    if (all || opts.scope == "coral")
        plan.emplace_back("coral", discrepancy_trial(
                                       [](const Matrix& s, const Matrix& t) {
                                           return coral_loss(s, t);
                                       }));
    if (all || opts.scope == "mmd")
        plan.emplace_back("mmd", discrepancy_trial([](const Matrix& s, const Matrix& t) {
                              return mmd_loss(s, t, default_mmd_bandwidths());
                          }));
    if (all || opts.scope == "cmd")
        plan.emplace_back("cmd", discrepancy_trial([](const Matrix& s, const Matrix& t) {
                              return cmd_loss(s, t, kDefaultCmdOrder);
                          }));
    if (all || opts.scope == "msm") add_similarity_family(plan, "msm", &msm_loss);
    if (all || opts.scope == "intra") {
        plan.emplace_back("intra[margin=0]", intra_trial(0.0));
        plan.emplace_back("intra[margin=0.3]", intra_trial(0.3));
    }
    if (all || opts.scope == "inter") plan.emplace_back("inter", TrialFn(inter_trial));
    if (all || opts.scope == "network") {
        plan.emplace_back("network[relu]", network_trial(Activation::relu));
        plan.emplace_back("network[tanh]", network_trial(Activation::tanh));
    }
    if (all || opts.scope == "composite") {
        plan.emplace_back("composite[relu]", composite_trial(Activation::relu));
        plan.emplace_back("composite[tanh]", composite_trial(Activation::tanh));
    }

    GradCheckReport report;
    for (const auto& [name, trial] : plan) report.entries.push_back(run_entry(name, opts, trial));
    return report;
}

} // namespace sdda
