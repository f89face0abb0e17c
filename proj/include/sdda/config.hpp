#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdda/datagen.hpp"
#include "sdda/trainer.hpp"

namespace sdda {

struct DataConfig {
    bool from_csv = false;
    std::string source_csv;
    std::string target_csv;
    DomainShiftSpec spec;  // meaningful when !from_csv

    bool operator==(const DataConfig&) const = default;
};

struct OutputConfig {
    std::string dir = "out";
    bool emit_svg = true;
    bool emit_features = false;
    // Sweep seeds; each value replaces both the data seed and the trainer
    // seed for its run. Empty = one run with the configured seeds.
    std::vector<std::uint64_t> seeds;

    bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
    DataConfig data;
    TrainerConfig trainer;
    bool layer_dims_auto = true;  // trainer.layer_dims filled from the data at run time
    OutputConfig output;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses the line-oriented `key = value` format under [data] / [trainer]
/// / [output] headers; `#` starts a comment; unknown keys, duplicate keys,
/// malformed or out-of-range values, and missing required sections throw
/// config_error carrying the 1-based line number.
ExperimentConfig parse_config(const std::string& text);

/// Canonical full dump: every effective value, including defaults.
/// parse_config(print_config(c)) reproduces c exactly.
std::string print_config(const ExperimentConfig& cfg);

} // namespace sdda
