#include "sdda/discrimination.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sdda {

namespace {

constexpr double kNormEps = 1e-12;

void check_labels(const std::vector<int>& labels, std::size_t batch, std::size_t classes,
                  const char* op) {
    if (labels.size() != batch)
        throw std::invalid_argument(std::string(op) + ": label count differs from batch size");
    for (int y : labels)
        if (y < 0 || static_cast<std::size_t>(y) >= classes)
            throw std::invalid_argument(std::string(op) + ": label " + std::to_string(y) +
                                        " outside [0, " + std::to_string(classes) + ")");
}

} // namespace

CenterBank::CenterBank(std::size_t classes, std::size_t dim, double alpha, double margin)
    : centers(classes, dim), alpha(alpha), margin(margin) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("CenterBank: alpha must lie in [0, 1]");
    if (margin < 0.0)
        throw std::invalid_argument("CenterBank: margin must be >= 0");
}

IntraResult intra_loss(const Matrix& features, const std::vector<int>& labels,
                       const CenterBank& bank) {
    const std::size_t b = features.rows(), L = features.cols();
    if (bank.centers.cols() != L)
        throw std::invalid_argument("intra_loss: feature dimension differs from center dimension");
    check_labels(labels, b, bank.classes(), "intra_loss");

    IntraResult r;
    r.grad = Matrix(b, L);
    for (std::size_t i = 0; i < b; ++i) {
        const std::size_t y = static_cast<std::size_t>(labels[i]);
        double d2 = 0.0;
        for (std::size_t j = 0; j < L; ++j) {
            const double d = features(i, j) - bank.centers(y, j);
            d2 += d * d;
        }
        if (d2 > bank.margin) {
            r.loss += d2 - bank.margin;
            for (std::size_t j = 0; j < L; ++j)
                r.grad(i, j) = 2.0 * (features(i, j) - bank.centers(y, j));
        }
    }
    return r;
}

CenterBank update_centers(CenterBank bank, const Matrix& features, const std::vector<int>& labels) {
    const std::size_t b = features.rows(), L = features.cols();
    if (bank.centers.cols() != L)
        throw std::invalid_argument("update_centers: feature dimension differs from center dimension");
    check_labels(labels, b, bank.classes(), "update_centers");

    std::vector<std::size_t> count(bank.classes(), 0);
    Matrix sum(bank.classes(), L);
    for (std::size_t i = 0; i < b; ++i) {
        const std::size_t y = static_cast<std::size_t>(labels[i]);
        ++count[y];
        for (std::size_t j = 0; j < L; ++j) sum(y, j) += features(i, j);
    }
    for (std::size_t y = 0; y < bank.classes(); ++y) {
        if (count[y] == 0) continue;  // absent classes keep their center
        const double denom = 1.0 + static_cast<double>(count[y]);
        for (std::size_t j = 0; j < L; ++j) {
            const double delta = sum(y, j) / denom;
            bank.centers(y, j) = bank.alpha * bank.centers(y, j) + (1.0 - bank.alpha) * delta;
        }
    }
    return bank;
}

namespace {

void inter_accumulate(const Matrix& phi, double target_norm, double& loss, Matrix& grad) {
    const std::size_t n = phi.rows(), L = phi.cols();
    for (std::size_t i = 0; i < n; ++i) {
        double n2 = 0.0;
        for (std::size_t j = 0; j < L; ++j) n2 += phi(i, j) * phi(i, j);
        const double norm = std::sqrt(n2);
        const double gap = target_norm - norm;
        loss += gap * gap;
        if (norm < kNormEps) continue;  // loss R_tn^2, gradient defined as 0
        const double f = -2.0 * (target_norm / norm - 1.0);
        for (std::size_t j = 0; j < L; ++j) grad(i, j) = f * phi(i, j);
    }
}

} // namespace

InterResult inter_loss(const Matrix& source, const Matrix& target, const NormConstraint& nc) {
    if (!(nc.target_norm > 0.0))
        throw std::invalid_argument("inter_loss: target_norm must be positive");
    InterResult r;
    r.grad_source = Matrix(source.rows(), source.cols());
    r.grad_target = Matrix(target.rows(), target.cols());
    inter_accumulate(source, nc.target_norm, r.loss, r.grad_source);
    inter_accumulate(target, nc.target_norm, r.loss, r.grad_target);
    return r;
}

} // namespace sdda
