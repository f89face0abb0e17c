#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdda/matrix.hpp"

namespace sdda {

enum class DatasetShape { gaussian_blobs, two_moons };

std::string to_string(DatasetShape s);
bool shape_from_string(const std::string& s, DatasetShape& out);

/// Parameters of one synthetic source/target pair. The target is drawn
/// from the same generative process as the source and then transformed
/// row-wise by x -> scale * R(theta) * x + translation + noise, with the
/// rotation acting on the first two coordinates.
struct DomainShiftSpec {
    DatasetShape shape = DatasetShape::gaussian_blobs;
    std::size_t classes = 3;            // two_moons forces 2
    std::size_t dim = 2;                // two_moons forces 2
    std::size_t samples_per_class = 100;
    std::vector<std::vector<double>> class_means;  // blobs; empty = default circular layout
    double class_stddev = 0.3;
    double target_rotation_deg = 0.0;
    std::vector<double> target_translation;  // empty = zero vector
    double target_scale = 1.0;
    double target_noise_std = 0.0;
    std::uint64_t seed = 1;

    bool operator==(const DomainShiftSpec&) const = default;
};

enum class DomainTag { source, target };

struct LabeledDataset {
    Matrix x;                 // n x d
    std::vector<int> labels;  // length n; target labels are for evaluation only
    DomainTag domain = DomainTag::source;

    std::size_t size() const { return x.rows(); }
    std::size_t dim() const { return x.cols(); }
};

struct DatasetPair {
    LabeledDataset source;
    LabeledDataset target;
};

/// Default blob layout when class_means is empty: class j centered at
/// radius 2.5 on the circle through the first two coordinates (for d=1,
/// spread along the line instead).
std::vector<std::vector<double>> default_class_means(std::size_t classes, std::size_t dim);

DatasetPair generate_pair(const DomainShiftSpec& spec);

/// Comma-separated values, optional trailing integer label column.
/// Throws io_error if the file cannot be read and config_error-style
/// parse failures as io-category errors with 1-based line numbers.
LabeledDataset load_csv(const std::string& path, bool has_labels);

/// 17 significant digits, so a reload is bit-identical.
void save_csv(const std::string& path, const LabeledDataset& ds, bool write_labels);

/// Shared numeric formatting for every emitted file.
std::string format_g17(double v);

} // namespace sdda
