#include "sdda/trainer.hpp"

#include <cmath>
#include <stdexcept>

#include "sdda/alignment.hpp"
#include "sdda/errors.hpp"
#include "sdda/rng.hpp"

namespace sdda {
namespace {

// Endless batch supply over one domain: hands out disjoint index blocks
// from a shuffled order and reshuffles whenever a full batch no longer
// fits. With block count = floor(n/b) this reshuffles exactly at epoch
// boundaries for the source domain.
class IndexStream {
public:
    IndexStream(std::size_t n, Rng rng) : n_(n), pos_(n), rng_(rng), order_(n) {}

    void next_batch(std::size_t b, std::vector<std::size_t>& out) {
        if (pos_ + b > n_) {
            for (std::size_t i = 0; i < n_; ++i) order_[i] = i;
            shuffle_indices(order_, rng_);
            pos_ = 0;
        }
        out.assign(order_.begin() + static_cast<std::ptrdiff_t>(pos_),
                   order_.begin() + static_cast<std::ptrdiff_t>(pos_ + b));
        pos_ += b;
    }

private:
    std::size_t n_;
    std::size_t pos_;
    Rng rng_;
    std::vector<std::size_t> order_;
};

Matrix take_rows(const Matrix& x, const std::vector<std::size_t>& idx) {
    Matrix out(idx.size(), x.cols());
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = x(idx[r], c);
    return out;
}

std::vector<int> take_labels(const std::vector<int>& labels, const std::vector<std::size_t>& idx) {
    std::vector<int> out(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) out[r] = labels[idx[r]];
    return out;
}

void check_finite(double v, const char* term) {
    if (!std::isfinite(v)) throw numeric_error(std::string("non-finite ") + term + " loss");
}

DiscrepancyResult metric_loss(MetricKind metric, const Matrix& phi_s, const Matrix& phi_t,
                              const SimilarityKind& sim) {
    switch (metric) {
        case MetricKind::ssc: return ssc_loss(phi_s, phi_t, sim);
        case MetricKind::coral: return coral_loss(phi_s, phi_t);
        case MetricKind::mmd: return mmd_loss(phi_s, phi_t, default_mmd_bandwidths());
        case MetricKind::cmd: return cmd_loss(phi_s, phi_t, 5);
        case MetricKind::msm: return msm_loss(phi_s, phi_t, sim);
        case MetricKind::none: break;
    }
    throw std::logic_error("metric_loss called with metric=none");
}

struct DomainEval {
    double accuracy = 0.0;
    double mean_norm = 0.0;
};

DomainEval eval_domain(const MlpParams& params, const LabeledDataset& ds) {
    ForwardCache cache;
    const Matrix logits = forward(params, ds.x, cache);
    const Matrix& phi = cache.adapted_features();

    DomainEval ev;
    std::size_t correct = 0;
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < logits.cols(); ++c)
            if (logits(r, c) > logits(r, best)) best = c;
        if (static_cast<int>(best) == ds.labels[r]) ++correct;

        double sq = 0.0;
        for (std::size_t c = 0; c < phi.cols(); ++c) sq += phi(r, c) * phi(r, c);
        ev.mean_norm += std::sqrt(sq);
    }
    ev.accuracy = static_cast<double>(correct) / static_cast<double>(logits.rows());
    ev.mean_norm /= static_cast<double>(logits.rows());
    return ev;
}

} // namespace

std::string to_string(MetricKind m) {
    switch (m) {
        case MetricKind::ssc: return "ssc";
        case MetricKind::coral: return "coral";
        case MetricKind::mmd: return "mmd";
        case MetricKind::cmd: return "cmd";
        case MetricKind::msm: return "msm";
        case MetricKind::none: return "none";
    }
    return "?";
}

MetricKind metric_from_string(const std::string& s) {
    if (s == "ssc") return MetricKind::ssc;
    if (s == "coral") return MetricKind::coral;
    if (s == "mmd") return MetricKind::mmd;
    if (s == "cmd") return MetricKind::cmd;
    if (s == "msm") return MetricKind::msm;
    if (s == "none") return MetricKind::none;
    throw std::invalid_argument("unknown metric kind: " + s);
}

void validate_trainer_config(const TrainerConfig& cfg) {
    if (cfg.lambda_ssc < 0.0 || cfg.lambda_intra < 0.0 || cfg.lambda_inter < 0.0)
        throw std::invalid_argument("trainer: trade-off weights must be >= 0");
    if (!(cfg.similarity.gamma > 0.0))
        throw std::invalid_argument("trainer: gamma must be > 0");
    if (!(cfg.target_norm > 0.0))
        throw std::invalid_argument("trainer: target_norm must be > 0");
    if (cfg.margin < 0.0) throw std::invalid_argument("trainer: margin must be >= 0");
    if (cfg.center_alpha < 0.0 || cfg.center_alpha > 1.0)
        throw std::invalid_argument("trainer: center_alpha must lie in [0, 1]");
    if (cfg.batch_size < 1) throw std::invalid_argument("trainer: batch_size must be >= 1");
    if (cfg.metric != MetricKind::none && cfg.batch_size < 2)
        throw std::invalid_argument("trainer: batch_size must be >= 2 when a metric is active");
    if (!(cfg.learning_rate > 0.0))
        throw std::invalid_argument("trainer: learning_rate must be > 0");
    if (cfg.schedule_mu < 0.0) throw std::invalid_argument("trainer: schedule_mu must be >= 0");
    if (cfg.layer_dims.size() < 3)
        throw std::invalid_argument("trainer: layer_dims needs input, adapted and output sizes");
    for (std::size_t d : cfg.layer_dims)
        if (d == 0) throw std::invalid_argument("trainer: layer_dims entries must be positive");
}

double lambda_schedule(double p, double mu) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("lambda_schedule: p must lie in [0, 1]");
    return 2.0 / (1.0 + std::exp(-mu * p)) - 1.0;
}

CompositeGrads composite_gradients(const MlpParams& params, const CenterBank& bank,
                                   const Matrix& source_x,
                                   const std::vector<int>& source_labels, const Matrix& target_x,
                                   const TrainerConfig& cfg, double p) {
    CompositeGrads out;
    StepScalars& s = out.scalars;
    s.schedule_factor = cfg.schedule_enabled ? lambda_schedule(p, cfg.schedule_mu) : 1.0;
    const double w_metric = cfg.lambda_ssc * s.schedule_factor;
    const double w_intra = cfg.lambda_intra * s.schedule_factor;
    const double w_inter = cfg.lambda_inter * s.schedule_factor;

    const bool want_metric = cfg.metric != MetricKind::none && w_metric > 0.0;
    const bool want_intra = w_intra > 0.0;
    const bool want_inter = w_inter > 0.0;
    const bool want_target_stream = want_metric || want_inter;

    ForwardCache cache_s;
    const Matrix logits = forward(params, source_x, cache_s);
    CrossEntropyResult ce = cross_entropy(logits, source_labels);
    s.loss_cls = ce.loss;
    check_finite(s.loss_cls, "classification");

    const Matrix& phi_s = cache_s.adapted_features();
    const std::size_t feat = phi_s.cols();
    Matrix d_phi_s(source_x.rows(), feat);
    Matrix d_phi_t;
    ForwardCache cache_t;
    if (want_target_stream) {
        forward(params, target_x, cache_t);
        d_phi_t = Matrix(target_x.rows(), feat);
    }

    if (want_metric) {
        DiscrepancyResult m = metric_loss(cfg.metric, phi_s, cache_t.adapted_features(),
                                          cfg.similarity);
        s.loss_metric = m.loss;
        check_finite(s.loss_metric, "metric");
        d_phi_s.add_scaled(m.grad_source, w_metric);
        d_phi_t.add_scaled(m.grad_target, w_metric);
    }
    if (want_intra) {
        IntraResult ir = intra_loss(phi_s, source_labels, bank);
        s.loss_intra = ir.loss;
        check_finite(s.loss_intra, "intra-class");
        d_phi_s.add_scaled(ir.grad, w_intra);
    }
    if (want_inter) {
        InterResult nr = inter_loss(phi_s, cache_t.adapted_features(),
                                    NormConstraint{cfg.target_norm});
        s.loss_inter = nr.loss;
        check_finite(s.loss_inter, "inter-class");
        d_phi_s.add_scaled(nr.grad_source, w_inter);
        d_phi_t.add_scaled(nr.grad_target, w_inter);
    }

    s.loss_total = s.loss_cls + w_metric * s.loss_metric + w_intra * s.loss_intra +
                   w_inter * s.loss_inter;
    check_finite(s.loss_total, "total");

    const bool adapted_grads = want_metric || want_intra || want_inter;
    out.grads = backward(params, cache_s, &ce.dlogits, adapted_grads ? &d_phi_s : nullptr);
    if (want_target_stream) {
        MlpGrads tgrads = backward(params, cache_t, nullptr, &d_phi_t);
        out.grads += tgrads;
    }
    out.source_features = phi_s;
    return out;
}

StepScalars composite_step(TrainState& state, const Matrix& source_x,
                           const std::vector<int>& source_labels, const Matrix& target_x,
                           const TrainerConfig& cfg, double p) {
    CompositeGrads cg =
        composite_gradients(state.params, state.bank, source_x, source_labels, target_x, cfg, p);
    adam_step(state.adam, state.params, cg.grads, cfg.learning_rate);

    // Centers track features whenever the compactness term participates in
    // the run at all, so they are already warm when the schedule ramps up.
    if (cfg.lambda_intra > 0.0)
        state.bank = update_centers(state.bank, cg.source_features, source_labels);
    return cg.scalars;
}

TrainResult train(const TrainerConfig& cfg, const LabeledDataset& source,
                  const LabeledDataset& target) {
    validate_trainer_config(cfg);
    const std::size_t d_in = cfg.layer_dims.front();
    const std::size_t classes = cfg.layer_dims.back();
    const std::size_t feat = cfg.layer_dims[cfg.layer_dims.size() - 2];
    if (source.dim() != d_in || target.dim() != d_in)
        throw std::invalid_argument("train: dataset width does not match layer_dims");
    for (int y : source.labels)
        if (y < 0 || static_cast<std::size_t>(y) >= classes)
            throw std::invalid_argument("train: source label outside class range");

    Rng root(cfg.seed);
    Rng init_rng = root.substream(0);
    IndexStream src_stream(source.size(), root.substream(1));
    IndexStream tgt_stream(target.size(), root.substream(2));

    TrainState state;
    state.params = init_params(cfg.layer_dims, cfg.hidden_activation, init_rng);
    state.adam = AdamState(state.params);
    state.bank = CenterBank(classes, feat, cfg.center_alpha, cfg.margin);

    TrainResult result;
    const std::size_t steps_per_epoch = source.size() / cfg.batch_size;
    if (cfg.epochs > 0) {
        if (steps_per_epoch == 0)
            throw std::invalid_argument("train: source smaller than one batch");
        if (target.size() < cfg.batch_size)
            throw std::invalid_argument("train: target smaller than one batch");
    }
    const std::size_t total_steps = cfg.epochs * steps_per_epoch;

    std::vector<std::size_t> src_idx, tgt_idx;
    std::size_t steps_done = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        StepScalars last{};
        try {
            for (std::size_t step = 0; step < steps_per_epoch; ++step) {
                src_stream.next_batch(cfg.batch_size, src_idx);
                tgt_stream.next_batch(cfg.batch_size, tgt_idx);
                const double p =
                    static_cast<double>(steps_done) / static_cast<double>(total_steps);
                last = composite_step(state, take_rows(source.x, src_idx),
                                      take_labels(source.labels, src_idx),
                                      take_rows(target.x, tgt_idx), cfg, p);
                ++steps_done;
            }
        } catch (const numeric_error& e) {
            result.aborted = true;
            result.abort_reason = e.what();
            break;
        }

        const DomainEval ev_s = eval_domain(state.params, source);
        const DomainEval ev_t = eval_domain(state.params, target);
        EpochRecord rec;
        rec.epoch = epoch;
        rec.loss_total = last.loss_total;
        rec.loss_cls = last.loss_cls;
        rec.loss_metric = last.loss_metric;
        rec.loss_intra = last.loss_intra;
        rec.loss_inter = last.loss_inter;
        rec.source_accuracy = ev_s.accuracy;
        rec.target_accuracy = ev_t.accuracy;
        rec.mean_source_feature_norm = ev_s.mean_norm;
        rec.mean_target_feature_norm = ev_t.mean_norm;
        rec.schedule_factor = last.schedule_factor;
        result.log.records.push_back(rec);
    }
    result.params = std::move(state.params);
    return result;
}

double evaluate(const MlpParams& params, const LabeledDataset& ds) {
    return eval_domain(params, ds).accuracy;
}

double mean_feature_norm(const MlpParams& params, const Matrix& x) {
    ForwardCache cache;
    forward(params, x, cache);
    const Matrix& phi = cache.adapted_features();
    double total = 0.0;
    for (std::size_t r = 0; r < phi.rows(); ++r) {
        double sq = 0.0;
        for (std::size_t c = 0; c < phi.cols(); ++c) sq += phi(r, c) * phi(r, c);
        total += std::sqrt(sq);
    }
    return total / static_cast<double>(phi.rows());
}

} // namespace sdda
