#pragma once

#include <cstddef>
#include <vector>

#include "sdda/matrix.hpp"

namespace sdda {

/// Per-class feature centroids with their moving-average update settings.
/// Centers start at zero; the trainer owns the single mutable bank.
struct CenterBank {
    Matrix centers;      // k x L, row j = center of class j
    double alpha = 0.5;  // center learning rate, in [0, 1]
    double margin = 0.0; // hinge margin m, >= 0

    CenterBank() = default;
    CenterBank(std::size_t classes, std::size_t dim, double alpha = 0.5, double margin = 0.0);
    std::size_t classes() const { return centers.rows(); }
};

struct IntraResult {
    double loss = 0.0;
    Matrix grad;  // d loss / d features, same shape as the feature batch
};

/// Margin center loss: sum_i max(0, ||phi_i - c_{y_i}||^2 - m). Gradients
/// flow into the features only; centers move via update_centers.
IntraResult intra_loss(const Matrix& features, const std::vector<int>& labels,
                       const CenterBank& bank);

/// Moving-average center update: for each class present in the batch,
/// delta_j = sum_{y_i=j} phi_i / (1 + count_j), c_j <- alpha c_j + (1-alpha) delta_j.
/// Classes absent from the batch are left unchanged.
CenterBank update_centers(CenterBank bank, const Matrix& features, const std::vector<int>& labels);

struct NormConstraint {
    double target_norm = 10.0;  // R_tn > 0
};

struct InterResult {
    double loss = 0.0;
    Matrix grad_source;
    Matrix grad_target;
};

/// Feature norm constraint: sum over both domains' rows of
/// (R_tn - ||phi||_2)^2. Gradient row: -2 (R_tn/||phi|| - 1) phi; a row
/// with ||phi|| below 1e-12 contributes loss R_tn^2 and zero gradient.
InterResult inter_loss(const Matrix& source, const Matrix& target, const NormConstraint& nc);

} // namespace sdda
