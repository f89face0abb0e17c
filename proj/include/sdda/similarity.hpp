#pragma once

#include <span>
#include <string>

#include "sdda/matrix.hpp"

namespace sdda {

enum class Similarity {
    dot_product,
    euclidean_distance,
    cosine,
    heat_kernel,     // exp(-gamma * ||x - y||_2), unsquared norm
    heat_kernel_sq,  // exp(-gamma * ||x - y||_2^2), comparison variant, off by default
};

struct SimilarityKind {
    Similarity tag = Similarity::heat_kernel;
    double gamma = 1e-3;  // used by the heat kernels only

    bool operator==(const SimilarityKind&) const = default;
};

std::string to_string(Similarity tag);
bool similarity_from_string(const std::string& s, Similarity& out);

/// Distances below this are treated as zero when a formula divides by
/// the pair distance or a vector norm (subgradient choice: contribute 0).
inline constexpr double kSimilarityEps = 1e-12;

/// Scalar similarity between two equal-length vectors.
double similarity(std::span<const double> x, std::span<const double> y, const SimilarityKind& kind);

/// similarity plus its gradients with respect to both arguments
/// (dx, dy must have x.size() entries; they are overwritten).
double similarity_with_grad(std::span<const double> x, std::span<const double> y,
                            const SimilarityKind& kind,
                            std::span<double> dx, std::span<double> dy);

/// L x L matrix of pairwise similarities between the feature columns of a
/// centered b x L batch. Exactly symmetric by construction; heat-kernel
/// matrices have a unit diagonal.
struct SelfSimilarityMatrix {
    Matrix entries;  // L x L
    std::size_t dim() const { return entries.rows(); }
};

/// The caller is expected to have applied center_columns already.
SelfSimilarityMatrix pairwise_similarity(const Matrix& centered, const SimilarityKind& kind);

} // namespace sdda
