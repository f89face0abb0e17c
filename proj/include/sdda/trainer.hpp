#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdda/datagen.hpp"
#include "sdda/discrimination.hpp"
#include "sdda/matrix.hpp"
#include "sdda/network.hpp"
#include "sdda/similarity.hpp"

namespace sdda {

enum class MetricKind { ssc, coral, mmd, cmd, msm, none };

std::string to_string(MetricKind m);
MetricKind metric_from_string(const std::string& s);

struct TrainerConfig {
    double lambda_ssc = 1000.0;
    double lambda_intra = 0.003;
    double lambda_inter = 0.0001;
    MetricKind metric = MetricKind::ssc;
    SimilarityKind similarity{};  // heat kernel, gamma = 0.001
    double target_norm = 10.0;
    double margin = 0.0;
    double center_alpha = 0.5;
    std::size_t batch_size = 32;
    std::size_t epochs = 10;
    double learning_rate = 1e-4;
    double schedule_mu = 10.0;
    bool schedule_enabled = true;
    std::uint64_t seed = 1;
    std::vector<std::size_t> layer_dims;  // input ... adapted, classes
    Activation hidden_activation = Activation::relu;

    bool operator==(const TrainerConfig&) const = default;
};

/// Throws std::invalid_argument when a field is out of range.
void validate_trainer_config(const TrainerConfig& cfg);

struct EpochRecord {
    std::size_t epoch = 0;
    double loss_total = 0.0;
    double loss_cls = 0.0;
    double loss_metric = 0.0;  // raw, unweighted
    double loss_intra = 0.0;   // raw, unweighted
    double loss_inter = 0.0;   // raw, unweighted
    double source_accuracy = 0.0;
    double target_accuracy = 0.0;
    double mean_source_feature_norm = 0.0;
    double mean_target_feature_norm = 0.0;
    double schedule_factor = 1.0;
};

struct TrainLog {
    std::vector<EpochRecord> records;
};

struct StepScalars {
    double loss_total = 0.0;
    double loss_cls = 0.0;
    double loss_metric = 0.0;
    double loss_intra = 0.0;
    double loss_inter = 0.0;
    double schedule_factor = 1.0;
};

/// Adaptation ramp 2/(1+exp(-mu*p)) - 1, rising from 0 toward 1.
double lambda_schedule(double p, double mu);

struct TrainState {
    MlpParams params;
    AdamState adam;
    CenterBank bank;
};

struct CompositeGrads {
    StepScalars scalars;
    MlpGrads grads;
    Matrix source_features;  // adapted-layer activations of the source batch
};

/// The weighted gradient assembly behind composite_step, without the
/// optimizer step or center update; the gradient checker compares its
/// output against finite differences over the flattened parameters.
CompositeGrads composite_gradients(const MlpParams& params, const CenterBank& bank,
                                   const Matrix& source_x,
                                   const std::vector<int>& source_labels, const Matrix& target_x,
                                   const TrainerConfig& cfg, double p);

/// One optimizer step on the composite objective
///   loss_cls + s·lambda_ssc·metric + s·lambda_intra·intra + s·lambda_inter·inter
/// where s = lambda_schedule(p, mu) when the schedule is enabled, else 1.
/// Terms whose effective weight is zero are skipped entirely, so a run with
/// all lambdas zero takes the plain cross-entropy code path bit for bit.
/// The center bank is refreshed after the parameter step from the pre-step
/// source features. Throws numeric_error naming the term if a loss is
/// non-finite.
StepScalars composite_step(TrainState& state, const Matrix& source_x,
                           const std::vector<int>& source_labels, const Matrix& target_x,
                           const TrainerConfig& cfg, double p);

struct TrainResult {
    MlpParams params;
    TrainLog log;
    bool aborted = false;        // numeric failure mid-run; log holds completed epochs
    std::string abort_reason;
};

/// Full epoch loop. Steps per epoch = floor(source_n / batch_size); each
/// domain draws batches from its own shuffled index stream which reshuffles
/// whenever it cannot supply a full batch. p = completed steps / total steps.
/// Target labels are touched only by the per-epoch evaluation.
TrainResult train(const TrainerConfig& cfg, const LabeledDataset& source,
                  const LabeledDataset& target);

/// Fraction of rows whose argmax logit equals the label; argmax ties go to
/// the lowest class index.
double evaluate(const MlpParams& params, const LabeledDataset& ds);

/// Mean row-wise Euclidean norm of the adapted-layer features.
double mean_feature_norm(const MlpParams& params, const Matrix& x);

} // namespace sdda
