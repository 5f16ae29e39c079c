#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vsxc {

/// Dense row-major design matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Least-squares fit with the quantities needed for residual diagnostics.
struct OlsFit {
    std::vector<double> coefficients;
    std::vector<double> fitted;
    std::vector<double> residuals;
    std::vector<double> hat_diag;  ///< leverages h_ii
    double sse = 0.0;
    std::size_t n = 0;
    std::size_t p = 0;  ///< number of columns, intercept included

    // Polynomial fits only: coefficients refer to u = (x - x_shift) / x_scale.
    double x_shift = 0.0;
    double x_scale = 1.0;
};

/// Householder-QR least squares. Throws SingularMatrixError when the design
/// is rank deficient.
[[nodiscard]] OlsFit ols(const Matrix& design, std::span<const double> y);

/// Indices of a maximal set of numerically independent columns, chosen
/// greedily left to right: a column is kept when its component orthogonal to
/// the columns kept so far exceeds `rel_tol` times its own norm.
[[nodiscard]] std::vector<std::size_t> independent_columns(const Matrix& design, double rel_tol = 1e-8);

/// Copy of the given columns, in order.
[[nodiscard]] Matrix select_columns(const Matrix& design, std::span<const std::size_t> columns);

/// Polynomial regression of y on x. x is mapped affinely onto [-1, 1] before
/// the power columns are formed.
[[nodiscard]] OlsFit polyfit_ols(std::span<const double> x, std::span<const double> y, int degree);

/// Evaluates a polynomial fit at x.
[[nodiscard]] double polyval(const OlsFit& fit, double x);

}  // namespace vsxc
