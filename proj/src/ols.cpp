#include "vsxc/ols.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "vsxc/error.hpp"

namespace vsxc {

OlsFit ols(const Matrix& design, std::span<const double> y) {
    const std::size_t n = design.rows;
    const std::size_t p = design.cols;
    if (y.size() != n) throw InvalidArgument("ols: response length does not match design rows");
    if (p == 0 || n < p) throw InvalidArgument("ols: need at least as many rows as columns");

    // Column-major working copy; reflectors overwrite it in place.
    std::vector<std::vector<double>> a(p, std::vector<double>(n));
    double max_norm = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            a[j][i] = design(i, j);
            nrm += a[j][i] * a[j][i];
        }
        max_norm = std::max(max_norm, std::sqrt(nrm));
    }
    if (max_norm == 0.0) throw SingularMatrixError("ols: design matrix is zero");

    std::vector<std::vector<double>> v(p);  // Householder vectors (rows j..n-1)
    std::vector<double> r_diag(p);
    std::vector<double> qty(y.begin(), y.end());
    for (std::size_t j = 0; j < p; ++j) {
        double nrm = 0.0;
        for (std::size_t i = j; i < n; ++i) nrm += a[j][i] * a[j][i];
        nrm = std::sqrt(nrm);
        if (nrm <= 1e-10 * max_norm)
            throw SingularMatrixError("ols: design matrix is rank deficient (column " + std::to_string(j) + ")");
        const double alpha = a[j][j] > 0 ? -nrm : nrm;
        auto& vj = v[j];
        vj.assign(a[j].begin() + static_cast<std::ptrdiff_t>(j), a[j].end());
        vj[0] -= alpha;
        double vnorm2 = 0.0;
        for (double e : vj) vnorm2 += e * e;
        auto reflect = [&](std::vector<double>& col) {
            double dot = 0.0;
            for (std::size_t i = j; i < n; ++i) dot += vj[i - j] * col[i];
            const double s = 2.0 * dot / vnorm2;
            for (std::size_t i = j; i < n; ++i) col[i] -= s * vj[i - j];
        };
        for (std::size_t c = j; c < p; ++c) reflect(a[c]);
        reflect(qty);
        r_diag[j] = a[j][j];
        if (std::abs(r_diag[j]) <= 1e-10 * max_norm)
            throw SingularMatrixError("ols: design matrix is rank deficient (column " + std::to_string(j) + ")");
    }

    OlsFit fit;
    fit.n = n;
    fit.p = p;
    fit.coefficients.assign(p, 0.0);
    for (std::size_t jj = p; jj-- > 0;) {
        double s = qty[jj];
        for (std::size_t c = jj + 1; c < p; ++c) s -= a[c][jj] * fit.coefficients[c];
        fit.coefficients[jj] = s / r_diag[jj];
    }

    fit.fitted.assign(n, 0.0);
    fit.residuals.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < p; ++j) s += design(i, j) * fit.coefficients[j];
        fit.fitted[i] = s;
        fit.residuals[i] = y[i] - s;
        fit.sse += fit.residuals[i] * fit.residuals[i];
    }

    // Thin Q: apply the reflectors in reverse to the first p unit vectors.
    fit.hat_diag.assign(n, 0.0);
    std::vector<double> q(n);
    for (std::size_t col = 0; col < p; ++col) {
        std::fill(q.begin(), q.end(), 0.0);
        q[col] = 1.0;
        for (std::size_t j = p; j-- > 0;) {
            const auto& vj = v[j];
            double dot = 0.0;
            double vnorm2 = 0.0;
            for (std::size_t i = j; i < n; ++i) {
                dot += vj[i - j] * q[i];
                vnorm2 += vj[i - j] * vj[i - j];
            }
            const double s = 2.0 * dot / vnorm2;
            for (std::size_t i = j; i < n; ++i) q[i] -= s * vj[i - j];
        }
        for (std::size_t i = 0; i < n; ++i) fit.hat_diag[i] += q[i] * q[i];
    }
    return fit;
}

std::vector<std::size_t> independent_columns(const Matrix& design, double rel_tol) {
    const std::size_t n = design.rows;
    double max_norm = 0.0;
    for (std::size_t j = 0; j < design.cols; ++j) {
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) nrm += design(i, j) * design(i, j);
        max_norm = std::max(max_norm, std::sqrt(nrm));
    }
    std::vector<std::vector<double>> basis;  // orthonormal
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < design.cols; ++j) {
        std::vector<double> col(n);
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            col[i] = design(i, j);
            nrm += col[i] * col[i];
        }
        nrm = std::sqrt(nrm);
        // Two passes of modified Gram-Schmidt keep the projection accurate.
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : basis) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += q[i] * col[i];
                for (std::size_t i = 0; i < n; ++i) col[i] -= dot * q[i];
            }
        }
        double rest = 0.0;
        for (double c : col) rest += c * c;
        rest = std::sqrt(rest);
        if (rest <= rel_tol * nrm || rest <= 1e-9 * max_norm) continue;
        for (double& c : col) c /= rest;
        basis.push_back(std::move(col));
        kept.push_back(j);
    }
    return kept;
}

Matrix select_columns(const Matrix& design, std::span<const std::size_t> columns) {
    Matrix out(design.rows, columns.size());
    for (std::size_t i = 0; i < design.rows; ++i)
        for (std::size_t c = 0; c < columns.size(); ++c) out(i, c) = design(i, columns[c]);
    return out;
}

OlsFit polyfit_ols(std::span<const double> x, std::span<const double> y, int degree) {
    if (degree < 0) throw InvalidArgument("polyfit_ols: degree must be >= 0");
    if (x.size() != y.size()) throw InvalidArgument("polyfit_ols: x and y differ in length");
    const auto p = static_cast<std::size_t>(degree) + 1;
    if (x.size() <= p) throw InvalidArgument("polyfit_ols: need n > degree + 1 samples");
    if (std::set<double>(x.begin(), x.end()).size() < p)
        throw SingularMatrixError("polyfit_ols: fewer distinct x values than coefficients");

    const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
    const double shift = 0.5 * (*lo_it + *hi_it);
    const double scale = *hi_it > *lo_it ? 0.5 * (*hi_it - *lo_it) : 1.0;

    Matrix design(x.size(), p);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = (x[i] - shift) / scale;
        double pw = 1.0;
        for (std::size_t j = 0; j < p; ++j) {
            design(i, j) = pw;
            pw *= u;
        }
    }
    OlsFit fit = ols(design, y);
    fit.x_shift = shift;
    fit.x_scale = scale;
    return fit;
}

double polyval(const OlsFit& fit, double x) {
    const double u = (x - fit.x_shift) / fit.x_scale;
    double acc = 0.0;
    for (std::size_t j = fit.coefficients.size(); j-- > 0;) acc = acc * u + fit.coefficients[j];
    return acc;
}

}  // namespace vsxc
