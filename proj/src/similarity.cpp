#include "sdda/similarity.hpp"

#include <cmath>
#include <stdexcept>

namespace sdda {

std::string to_string(Similarity tag) {
    switch (tag) {
        case Similarity::dot_product: return "dot_product";
        case Similarity::euclidean_distance: return "euclidean_distance";
        case Similarity::cosine: return "cosine";
        case Similarity::heat_kernel: return "heat_kernel";
        case Similarity::heat_kernel_sq: return "heat_kernel_sq";
    }
    return "?";
}

bool similarity_from_string(const std::string& s, Similarity& out) {
    if (s == "dot_product") out = Similarity::dot_product;
    else if (s == "euclidean_distance") out = Similarity::euclidean_distance;
    else if (s == "cosine") out = Similarity::cosine;
    else if (s == "heat_kernel") out = Similarity::heat_kernel;
    else if (s == "heat_kernel_sq") out = Similarity::heat_kernel_sq;
    else return false;
    return true;
}

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double dist2(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

} // namespace

double similarity(std::span<const double> x, std::span<const double> y, const SimilarityKind& kind) {
    if (x.size() != y.size())
        throw std::invalid_argument("similarity: vector lengths differ");
    switch (kind.tag) {
        case Similarity::dot_product:
            return dot(x, y);
        case Similarity::euclidean_distance:
            return std::sqrt(dist2(x, y));
        case Similarity::cosine: {
            const double nx = std::sqrt(dot(x, x)), ny = std::sqrt(dot(y, y));
            if (nx < kSimilarityEps || ny < kSimilarityEps) return 0.0;  // zero-norm pair
            return dot(x, y) / (nx * ny);
        }
        case Similarity::heat_kernel:
            return std::exp(-kind.gamma * std::sqrt(dist2(x, y)));
        case Similarity::heat_kernel_sq:
            return std::exp(-kind.gamma * dist2(x, y));
    }
    throw std::invalid_argument("similarity: unknown kind");
}

double similarity_with_grad(std::span<const double> x, std::span<const double> y,
                            const SimilarityKind& kind,
                            std::span<double> dx, std::span<double> dy) {
    if (x.size() != y.size() || dx.size() != x.size() || dy.size() != x.size())
        throw std::invalid_argument("similarity_with_grad: vector lengths differ");
    const std::size_t n = x.size();
    switch (kind.tag) {
        case Similarity::dot_product: {
            for (std::size_t i = 0; i < n; ++i) {
                dx[i] = y[i];
                dy[i] = x[i];
            }
            return dot(x, y);
        }
        case Similarity::euclidean_distance: {
            const double r = std::sqrt(dist2(x, y));
            if (r < kSimilarityEps) {
                for (std::size_t i = 0; i < n; ++i) dx[i] = dy[i] = 0.0;
                return r;
            }
            for (std::size_t i = 0; i < n; ++i) {
                const double g = (x[i] - y[i]) / r;
                dx[i] = g;
                dy[i] = -g;
            }
            return r;
        }
        case Similarity::cosine: {
            const double nx = std::sqrt(dot(x, x)), ny = std::sqrt(dot(y, y));
            if (nx < kSimilarityEps || ny < kSimilarityEps) {
                for (std::size_t i = 0; i < n; ++i) dx[i] = dy[i] = 0.0;
                return 0.0;
            }
            const double d = dot(x, y);
            const double c = d / (nx * ny);
            for (std::size_t i = 0; i < n; ++i) {
                dx[i] = y[i] / (nx * ny) - c * x[i] / (nx * nx);
                dy[i] = x[i] / (nx * ny) - c * y[i] / (ny * ny);
            }
            return c;
        }
        case Similarity::heat_kernel: {
            const double r = std::sqrt(dist2(x, y));
            const double s = std::exp(-kind.gamma * r);
            if (r < kSimilarityEps) {
                // i = j or coincident columns: contribution defined as 0
                for (std::size_t i = 0; i < n; ++i) dx[i] = dy[i] = 0.0;
                return s;
            }
            const double f = -kind.gamma * s / r;
            for (std::size_t i = 0; i < n; ++i) {
                const double g = f * (x[i] - y[i]);
                dx[i] = g;
                dy[i] = -g;
            }
            return s;
        }
        case Similarity::heat_kernel_sq: {
            const double r2 = dist2(x, y);
            const double s = std::exp(-kind.gamma * r2);
            const double f = -2.0 * kind.gamma * s;
            for (std::size_t i = 0; i < n; ++i) {
                const double g = f * (x[i] - y[i]);
                dx[i] = g;
                dy[i] = -g;
            }
            return s;
        }
    }
    throw std::invalid_argument("similarity_with_grad: unknown kind");
}

SelfSimilarityMatrix pairwise_similarity(const Matrix& centered, const SimilarityKind& kind) {
    const std::size_t b = centered.rows(), L = centered.cols();
    std::vector<double> ci(b), cj(b);
    SelfSimilarityMatrix out{Matrix(L, L)};
    for (std::size_t i = 0; i < L; ++i) {
        for (std::size_t k = 0; k < b; ++k) ci[k] = centered(k, i);
        for (std::size_t j = i; j < L; ++j) {
            for (std::size_t k = 0; k < b; ++k) cj[k] = centered(k, j);
            const double s = similarity(ci, cj, kind);
            out.entries(i, j) = s;
            out.entries(j, i) = s;  // mirrored, so symmetry is exact
        }
    }
    return out;
}

} // namespace sdda
