#include "sdda/matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sdda {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), v_(rows * cols, fill) {
    if (rows == 0 || cols == 0)
        throw std::invalid_argument("Matrix: dimensions must be positive");
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    if (r == 0) throw std::invalid_argument("Matrix::from_rows: no rows");
    const std::size_t c = rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw std::invalid_argument("Matrix::from_rows: ragged rows");
        std::size_t j = 0;
        for (double x : row) m(i, j++) = x;
        ++i;
    }
    return m;
}

bool Matrix::all_finite() const {
    for (double x : v_)
        if (!std::isfinite(x)) return false;
    return true;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                                    std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

Matrix& Matrix::operator+=(const Matrix& o) {
    require_same_shape(*this, o, "Matrix::operator+=");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    require_same_shape(*this, o, "Matrix::operator-=");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& x : v_) x *= s;
    return *this;
}

Matrix& Matrix::add_scaled(const Matrix& o, double s) {
    require_same_shape(*this, o, "Matrix::add_scaled");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += s * o.v_[i];
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { a += b; return a; }
Matrix operator-(Matrix a, const Matrix& b) { a -= b; return a; }
Matrix operator*(Matrix a, double s) { a *= s; return a; }

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            t(j, i) = a(i, j);
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += aik * b(k, j);
        }
    return c;
}

Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows())
        throw std::invalid_argument("matmul_at_b: row counts differ");
    Matrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k)
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = a(k, i);
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += aki * b(k, j);
        }
    return c;
}

Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("matmul_a_bt: column counts differ");
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k)
                s += a(i, k) * b(j, k);
            c(i, j) = s;
        }
    return c;
}

double frobenius_sq(const Matrix& a) {
    double s = 0.0;
    for (double x : a.values()) s += x * x;
    return s;
}

} // namespace sdda
