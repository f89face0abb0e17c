#include "sdda/alignment.hpp"

#include <cmath>
#include <stdexcept>

#include "sdda/numerics.hpp"

namespace sdda {

namespace {

void copy_column(const Matrix& m, std::size_t j, std::vector<double>& out) {
    out.resize(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) out[i] = m(i, j);
}

void add_to_column(Matrix& m, std::size_t j, const std::vector<double>& v, double w) {
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) += w * v[i];
}

// Gradient of sum_{i,j} weight(i,j) * sim(col_i, col_j) over all ordered
// pairs of one centered batch, where weight is the symmetric matrix
// 2*sign*E. Exploits sim(x,y) = sim(y,x): the ordered pair (j,i)
// contributes the same as (i,j) with dx/dy swapped.
Matrix self_sim_grad(const Matrix& centered, const SimilarityKind& kind,
                     const Matrix& e, double sign) {
    const std::size_t b = centered.rows(), L = centered.cols();
    Matrix grad(b, L);
    std::vector<double> ci, cj, dx(b), dy(b);
    for (std::size_t i = 0; i < L; ++i) {
        copy_column(centered, i, ci);
        for (std::size_t j = i; j < L; ++j) {
            copy_column(centered, j, cj);
            similarity_with_grad(ci, cj, kind, dx, dy);
            if (i == j) {
                const double w = 2.0 * sign * e(i, i);
                if (w != 0.0)
                    for (std::size_t k = 0; k < b; ++k) grad(k, i) += w * (dx[k] + dy[k]);
            } else {
                const double w = 4.0 * sign * e(i, j);
                if (w != 0.0) {
                    add_to_column(grad, i, dx, w);
                    add_to_column(grad, j, dy, w);
                }
            }
        }
    }
    return grad;
}

DiscrepancyResult ssc_impl(const Matrix& source, const Matrix& target,
                           const SimilarityKind& kind, double scale) {
    require_same_shape(source, target, "ssc_loss");
    const Matrix hs = center_columns(source).centered;
    const Matrix ht = center_columns(target).centered;
    const Matrix ds = pairwise_similarity(hs, kind).entries;
    const Matrix dt = pairwise_similarity(ht, kind).entries;
    const Matrix e = ds - dt;

    DiscrepancyResult r;
    r.loss = scale * frobenius_sq(e);
    Matrix gs = self_sim_grad(hs, kind, e, scale);
    Matrix gt = self_sim_grad(ht, kind, e, -scale);
    r.grad_source = center_columns_backward(gs);
    r.grad_target = center_columns_backward(gt);
    return r;
}

} // namespace

DiscrepancyResult ssc_loss(const Matrix& source, const Matrix& target, const SimilarityKind& kind) {
    return ssc_impl(source, target, kind, 1.0);
}

DiscrepancyResult coral_loss(const Matrix& source, const Matrix& target) {
    require_same_shape(source, target, "coral_loss");
    const double l = static_cast<double>(source.cols());
    return ssc_impl(source, target, SimilarityKind{Similarity::dot_product, 0.0}, 1.0 / (l * l));
}

std::vector<double> default_mmd_bandwidths() {
    std::vector<double> sigmas(19);
    for (int i = 0; i < 19; ++i)
        sigmas[i] = std::pow(10.0, -6.0 + 12.0 * i / 18.0);
    return sigmas;
}

DiscrepancyResult mmd_loss(const Matrix& source, const Matrix& target,
                           const std::vector<double>& bandwidths) {
    if (source.cols() != target.cols())
        throw std::invalid_argument("mmd_loss: feature dimensions differ");
    if (bandwidths.empty())
        throw std::invalid_argument("mmd_loss: at least one bandwidth required");
    for (double s : bandwidths)
        if (!(s > 0.0)) throw std::invalid_argument("mmd_loss: bandwidths must be positive");

    const std::size_t bs = source.rows(), bt = target.rows(), d = source.cols();
    DiscrepancyResult r;
    r.grad_source = Matrix(bs, d);
    r.grad_target = Matrix(bt, d);

    const double wss = 1.0 / static_cast<double>(bs * bs);
    const double wtt = 1.0 / static_cast<double>(bt * bt);
    const double wst = 2.0 / static_cast<double>(bs * bt);
    const double wband = 1.0 / static_cast<double>(bandwidths.size());

    for (double sigma : bandwidths) {
        const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
        double loss_b = 0.0;
        // source-source and target-target terms; each unordered pair
        // appears twice in the V-statistic, the diagonal once.
        for (std::size_t i = 0; i < bs; ++i)
            for (std::size_t j = 0; j < bs; ++j) {
                double d2 = 0.0;
                for (std::size_t c = 0; c < d; ++c) {
                    const double dv = source(i, c) - source(j, c);
                    d2 += dv * dv;
                }
                const double k = std::exp(-d2 * inv2s2);
                loss_b += wss * k;
                const double g = -wss * k * 2.0 * inv2s2;  // d/dx_i of k summed over both orders
                for (std::size_t c = 0; c < d; ++c)
                    r.grad_source(i, c) += wband * g * (source(i, c) - source(j, c)) * 2.0;
            }
        for (std::size_t i = 0; i < bt; ++i)
            for (std::size_t j = 0; j < bt; ++j) {
                double d2 = 0.0;
                for (std::size_t c = 0; c < d; ++c) {
                    const double dv = target(i, c) - target(j, c);
                    d2 += dv * dv;
                }
                const double k = std::exp(-d2 * inv2s2);
                loss_b += wtt * k;
                const double g = -wtt * k * 2.0 * inv2s2;
                for (std::size_t c = 0; c < d; ++c)
                    r.grad_target(i, c) += wband * g * (target(i, c) - target(j, c)) * 2.0;
            }
        for (std::size_t i = 0; i < bs; ++i)
            for (std::size_t j = 0; j < bt; ++j) {
                double d2 = 0.0;
                for (std::size_t c = 0; c < d; ++c) {
                    const double dv = source(i, c) - target(j, c);
                    d2 += dv * dv;
                }
                const double k = std::exp(-d2 * inv2s2);
                loss_b -= wst * k;
                const double g = wst * k * 2.0 * inv2s2;
                for (std::size_t c = 0; c < d; ++c) {
                    const double dv = source(i, c) - target(j, c);
                    r.grad_source(i, c) += wband * g * dv;
                    r.grad_target(j, c) -= wband * g * dv;
                }
            }
        r.loss += wband * loss_b;
    }
    return r;
}

namespace {

std::vector<double> column_means(const Matrix& m) {
    std::vector<double> mu(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            mu[j] += m(i, j);
    for (double& x : mu) x /= static_cast<double>(m.rows());
    return mu;
}

// Coordinate-wise central moment of the given order.
std::vector<double> central_moment(const Matrix& m, const std::vector<double>& mu, std::size_t k) {
    std::vector<double> mom(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            mom[j] += std::pow(m(i, j) - mu[j], static_cast<double>(k));
    for (double& x : mom) x /= static_cast<double>(m.rows());
    return mom;
}

double vec_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// d||m_k(X) - m_k(Z)|| / dX for one side, added into grad with the given
// sign. Uses d m_k[j]/dx_ij = (k/n)((x_ij - mu_j)^{k-1} - m_{k-1}[j]).
void cmd_term_grad(Matrix& grad, const Matrix& x, const std::vector<double>& mu,
                   const std::vector<double>& delta, double norm, std::size_t k, double sign) {
    if (norm < 1e-12) return;  // term flat at zero gap
    const double n = static_cast<double>(x.rows());
    if (k == 1) {
        for (std::size_t i = 0; i < x.rows(); ++i)
            for (std::size_t j = 0; j < x.cols(); ++j)
                grad(i, j) += sign * delta[j] / norm / n;
        return;
    }
    const std::vector<double> prev = central_moment(x, mu, k - 1);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double dm = (static_cast<double>(k) / n) *
                              (std::pow(x(i, j) - mu[j], static_cast<double>(k - 1)) - prev[j]);
            grad(i, j) += sign * delta[j] / norm * dm;
        }
}

} // namespace

DiscrepancyResult cmd_loss(const Matrix& source, const Matrix& target, std::size_t max_order) {
    if (source.cols() != target.cols())
        throw std::invalid_argument("cmd_loss: feature dimensions differ");
    if (max_order == 0)
        throw std::invalid_argument("cmd_loss: max_order must be >= 1");

    DiscrepancyResult r;
    r.grad_source = Matrix(source.rows(), source.cols());
    r.grad_target = Matrix(target.rows(), target.cols());

    const std::vector<double> mus = column_means(source);
    const std::vector<double> mut = column_means(target);

    std::vector<double> delta(source.cols());
    for (std::size_t j = 0; j < delta.size(); ++j) delta[j] = mus[j] - mut[j];
    double norm = vec_norm(delta);
    r.loss += norm;
    cmd_term_grad(r.grad_source, source, mus, delta, norm, 1, 1.0);
    cmd_term_grad(r.grad_target, target, mut, delta, norm, 1, -1.0);

    for (std::size_t k = 2; k <= max_order; ++k) {
        const std::vector<double> ms = central_moment(source, mus, k);
        const std::vector<double> mt = central_moment(target, mut, k);
        for (std::size_t j = 0; j < delta.size(); ++j) delta[j] = ms[j] - mt[j];
        norm = vec_norm(delta);
        r.loss += norm;
        cmd_term_grad(r.grad_source, source, mus, delta, norm, k, 1.0);
        cmd_term_grad(r.grad_target, target, mut, delta, norm, k, -1.0);
    }
    return r;
}

DiscrepancyResult msm_loss(const Matrix& source, const Matrix& target, const SimilarityKind& kind) {
    require_same_shape(source, target, "msm_loss");
    const Matrix hs = center_columns(source).centered;
    const Matrix ht = center_columns(target).centered;
    const std::size_t b = hs.rows(), L = hs.cols();
    const double w = -1.0 / static_cast<double>(L * L);

    DiscrepancyResult r;
    Matrix gs(b, L), gt(b, L);
    std::vector<double> ci, cj, dx(b), dy(b);
    for (std::size_t i = 0; i < L; ++i) {
        copy_column(hs, i, ci);
        for (std::size_t j = 0; j < L; ++j) {
            copy_column(ht, j, cj);
            r.loss += w * similarity_with_grad(ci, cj, kind, dx, dy);
            add_to_column(gs, i, dx, w);
            add_to_column(gt, j, dy, w);
        }
    }
    r.grad_source = center_columns_backward(gs);
    r.grad_target = center_columns_backward(gt);
    return r;
}

} // namespace sdda
