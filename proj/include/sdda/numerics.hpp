#pragma once

#include <functional>
#include <vector>

#include "sdda/matrix.hpp"

namespace sdda {

struct CenteredColumns {
    Matrix centered;            // same shape as the input
    std::vector<double> means;  // one batch mean per column
};

/// Subtracts each column's own batch mean. Idempotent; invariant to any
/// per-column constant shift of the input.
CenteredColumns center_columns(const Matrix& m);

/// Applies the centering projection to a gradient: a loss that consumed
/// centered columns has raw-input gradient P·G where P = I - (1/b)11ᵀ,
/// i.e. the same column-mean subtraction applied to G.
Matrix center_columns_backward(const Matrix& grad_centered);

using ScalarFn = std::function<double(const std::vector<double>&)>;

inline constexpr double kFiniteDiffStep = 1e-6;

/// Central-difference gradient estimate (f(x+h e_i) - f(x-h e_i)) / 2h.
/// Throws numeric_error naming the coordinate if f evaluates non-finite.
std::vector<double> finite_diff_gradient(const ScalarFn& f, std::vector<double> x,
                                         double h = kFiniteDiffStep);

/// max_i |a_i - b_i| / max(1, |a_i|, |b_i|) — the comparison used by
/// every gradient check in this project.
double max_relative_error(const std::vector<double>& analytic,
                          const std::vector<double>& numeric);

} // namespace sdda
