#include "sdda/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sdda/errors.hpp"

namespace sdda {

CenteredColumns center_columns(const Matrix& m) {
    const std::size_t b = m.rows(), L = m.cols();
    CenteredColumns out{Matrix(b, L), std::vector<double>(L, 0.0)};
    for (std::size_t j = 0; j < L; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < b; ++i) sum += m(i, j);
        out.means[j] = sum / static_cast<double>(b);
    }
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < L; ++j)
            out.centered(i, j) = m(i, j) - out.means[j];
    return out;
}

Matrix center_columns_backward(const Matrix& grad_centered) {
    return center_columns(grad_centered).centered;
}

std::vector<double> finite_diff_gradient(const ScalarFn& f, std::vector<double> x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite_diff_gradient: h must be positive");
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        x[i] = xi + h;
        const double fp = f(x);
        x[i] = xi - h;
        const double fm = f(x);
        x[i] = xi;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw numeric_error("finite_diff_gradient: non-finite evaluation at coordinate " +
                                std::to_string(i));
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

double max_relative_error(const std::vector<double>& analytic,
                          const std::vector<double>& numeric) {
    if (analytic.size() != numeric.size())
        throw std::invalid_argument("max_relative_error: size mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double denom = std::max({1.0, std::fabs(analytic[i]), std::fabs(numeric[i])});
        worst = std::max(worst, std::fabs(analytic[i] - numeric[i]) / denom);
    }
    return worst;
}

} // namespace sdda
