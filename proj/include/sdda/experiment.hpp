#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "sdda/config.hpp"
#include "sdda/trainer.hpp"

namespace sdda {

struct SeedOutcome {
    std::uint64_t seed = 0;
    TrainResult result;
    LabeledDataset source;
    LabeledDataset target;
    TrainerConfig resolved;  // trainer config actually used (seeds/dims filled)
};

/// The effective output directory: $SDDA_OUT_DIR when set, else the
/// configured one.
std::string resolve_output_dir(const ExperimentConfig& cfg);

/// Fills layer_dims when the config says auto ([d_in, 16, 16, 8, classes])
/// and validates explicit dims against the data. Throws config_error.
std::vector<std::size_t> resolve_layer_dims(const ExperimentConfig& cfg, std::size_t data_dim,
                                            std::size_t classes);

/// Runs every sweep seed (concurrently when there are several), then
/// writes metrics_<seed>.csv per seed, summary.json, and optionally
/// features_<seed>.csv and convergence.svg. Returns the process exit
/// status: 0 ok, 2 numeric failure (partial metrics still flushed),
/// 3 I/O failure. Diagnostics go to err.
int run_experiment(const ExperimentConfig& cfg, std::ostream& err);

/// The exact column contract of metrics_<seed>.csv.
inline constexpr const char* kMetricsHeader =
    "epoch,loss_total,loss_cls,loss_metric,loss_intra,loss_inter,src_acc,tgt_acc,"
    "norm_src,norm_tgt,schedule";

std::string metrics_csv_text(const TrainLog& log);

} // namespace sdda
