#pragma once

#include <cstddef>
#include <vector>

#include "sdda/matrix.hpp"
#include "sdda/similarity.hpp"

namespace sdda {

/// Loss value plus analytic gradients with respect to the two raw input
/// batches (same shapes as the inputs). Every metric chains its gradient
/// through any internal centering, so these are gradients at the raw
/// adapted-layer activations.
struct DiscrepancyResult {
    double loss = 0.0;
    Matrix grad_source;
    Matrix grad_target;
};

/// Self-similarity consistency: squared Frobenius distance between the
/// two domains' L x L column-similarity matrices, summed over all ordered
/// pairs including the diagonal. Inputs are raw b x L batches; feature
/// columns are centered internally by their batch means.
DiscrepancyResult ssc_loss(const Matrix& source, const Matrix& target, const SimilarityKind& kind);

/// Covariance alignment: (1/L^2) ||Cs - Ct||_F^2 with C = H̃ᵀH̃. Shares
/// the dot-product ssc path, so ssc_loss(dot) == L^2 * coral_loss exactly.
DiscrepancyResult coral_loss(const Matrix& source, const Matrix& target);

/// Biased V-statistic MMD with Gaussian kernels k(x,z) = exp(-|x-z|^2/(2s^2)),
/// averaged uniformly over the bandwidth grid. Rows are samples.
DiscrepancyResult mmd_loss(const Matrix& source, const Matrix& target,
                           const std::vector<double>& bandwidths);

/// 19 bandwidths, log-spaced over [1e-6, 1e6].
std::vector<double> default_mmd_bandwidths();

inline constexpr std::size_t kDefaultCmdOrder = 5;

/// Central moment discrepancy: ||mu_s - mu_t||_2 plus the coordinate-wise
/// central-moment gaps of orders 2..max_order. Rows are samples; no range
/// normalization.
DiscrepancyResult cmd_loss(const Matrix& source, const Matrix& target, std::size_t max_order);

/// Mutual-similarity maximization: -(1/L^2) * sum of cross-domain column
/// similarities. May be negative. Columns centered internally.
DiscrepancyResult msm_loss(const Matrix& source, const Matrix& target, const SimilarityKind& kind);

} // namespace sdda
