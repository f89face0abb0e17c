#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace sdda {

/// Dense row-major matrix of doubles. The one carrier type for batches,
/// weights, similarity matrices and gradients. All arithmetic runs in
/// fixed iteration order so repeated runs are bit-identical.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return v_.size(); }
    bool empty() const { return v_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return v_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return v_[r * cols_ + c]; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    std::span<double> row(std::size_t r) { return {v_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {v_.data() + r * cols_, cols_}; }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    bool all_finite() const;

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(double s);

    /// Adds s * o. Shapes must match.
    Matrix& add_scaled(const Matrix& o, double s);

    bool operator==(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && v_ == o.v_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> v_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);        // a * b
Matrix matmul_at_b(const Matrix& a, const Matrix& b);   // aᵀ * b
Matrix matmul_a_bt(const Matrix& a, const Matrix& b);   // a * bᵀ

double frobenius_sq(const Matrix& a);

void require_same_shape(const Matrix& a, const Matrix& b, const char* op);

} // namespace sdda
