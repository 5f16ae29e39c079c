#include "vsxc/vmd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vsxc/error.hpp"
#include "vsxc/fft.hpp"

namespace vsxc {

void VmdParams::validate() const {
    if (k_modes < 1) throw InvalidArgument("vmd: k_modes must be >= 1");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("vmd: alpha must be positive");
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidArgument("vmd: tau must be >= 0");
    if (!(tol > 0.0)) throw InvalidArgument("vmd: tol must be positive");
    if (max_iter < 1) throw InvalidArgument("vmd: max_iter must be >= 1");
}

namespace {

// Time-domain signal for a one-sided (positive-frequency) centred spectrum:
// rebuild the negative half by conjugate symmetry, undo the shift, invert and
// keep the centre part that corresponds to the unmirrored input.
std::vector<double> to_time_domain(const Spectrum& half, std::size_t offset, std::size_t n) {
    const std::size_t len = half.size();
    const std::size_t mid = len / 2;
    Spectrum full(len);
    for (std::size_t i = mid; i < len; ++i) full[i] = half[i];
    for (std::size_t j = 0; j < mid; ++j) full[mid - j] = std::conj(half[mid + j]);
    full[0] = std::conj(full[len - 1]);
    Spectrum buf = ifftshift(full);
    ifft_inplace(buf);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = buf[offset + i].real();
    return out;
}

double mse(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

}  // namespace

VmdResult vmd(std::span<const double> signal, const VmdParams& params) {
    params.validate();
    const std::size_t n = signal.size();
    if (n < 16) throw InvalidArgument("vmd: series too short (need >= 16 samples, got " + std::to_string(n) + ")");
    const auto k_modes = static_cast<std::size_t>(params.k_modes);

    // Even (mirror) extension to length 2n.
    const std::size_t left = n / 2;
    const std::size_t len = 2 * n;
    std::vector<Complex> mirrored(len);
    for (std::size_t i = 0; i < left; ++i) mirrored[i] = signal[left - 1 - i];
    for (std::size_t i = 0; i < n; ++i) mirrored[left + i] = signal[i];
    for (std::size_t j = 0; j < n - left; ++j) mirrored[left + n + j] = signal[n - 1 - j];

    fft_inplace(mirrored);
    Spectrum f_hat = fftshift(mirrored);
    const std::size_t mid = len / 2;
    std::vector<double> freqs(len);
    for (std::size_t i = 0; i < len; ++i) freqs[i] = static_cast<double>(i) / static_cast<double>(len) - 0.5;

    // Only the non-negative half [mid, len) is ever non-zero.
    const std::size_t half = len - mid;
    std::vector<Complex> f_plus(f_hat.begin() + static_cast<std::ptrdiff_t>(mid), f_hat.end());
    std::vector<std::vector<Complex>> u(k_modes, std::vector<Complex>(half));
    std::vector<std::vector<Complex>> u_prev(k_modes, std::vector<Complex>(half));
    std::vector<Complex> lambda(half);
    std::vector<Complex> total(half);

    std::vector<double> omega(k_modes);
    for (std::size_t k = 0; k < k_modes; ++k) omega[k] = 0.5 / static_cast<double>(k_modes) * static_cast<double>(k);
    if (params.dc_mode) omega[0] = 0.0;

    VmdResult res;
    const double two_alpha = 2.0 * params.alpha;
    int iter = 0;
    for (; iter < params.max_iter; ++iter) {
        u_prev = u;
        for (std::size_t k = 0; k < k_modes; ++k) {
            auto& uk = u[k];
            double num = 0.0;
            double den = 0.0;
            for (std::size_t i = 0; i < half; ++i) {
                const Complex others = total[i] - uk[i];
                const double dw = freqs[mid + i] - omega[k];
                const Complex updated = (f_plus[i] - others + 0.5 * lambda[i]) / (1.0 + two_alpha * dw * dw);
                total[i] = others + updated;
                uk[i] = updated;
                const double p = std::norm(updated);
                num += freqs[mid + i] * p;
                den += p;
            }
            if (!(k == 0 && params.dc_mode) && den > 0.0) omega[k] = num / den;
            if (!std::isfinite(omega[k]))
                throw NumericalError("vmd: non-finite value at iteration " + std::to_string(iter + 1));
        }
        if (params.tau > 0.0)
            for (std::size_t i = 0; i < half; ++i) lambda[i] += params.tau * (f_plus[i] - total[i]);

        double diff = 0.0;
        bool first = (iter == 0);
        for (std::size_t k = 0; k < k_modes; ++k) {
            double d2 = 0.0;
            double p2 = 0.0;
            for (std::size_t i = 0; i < half; ++i) {
                d2 += std::norm(u[k][i] - u_prev[k][i]);
                p2 += std::norm(u_prev[k][i]);
            }
            if (!std::isfinite(d2))
                throw NumericalError("vmd: non-finite value at iteration " + std::to_string(iter + 1));
            if (p2 > 0.0)
                diff += d2 / p2;
            else if (d2 > 0.0)
                first = true;
        }

        if (params.record_history) {
            Spectrum pad(len);
            std::copy(total.begin(), total.end(), pad.begin() + static_cast<std::ptrdiff_t>(mid));
            res.recon_history.push_back(mse(to_time_domain(pad, left, n), signal));
        }
        if (!first && diff < params.tol) {
            ++iter;
            break;
        }
    }
    res.iterations = iter;
    res.hit_max_iter = iter >= params.max_iter;

    std::vector<std::size_t> order(k_modes);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return omega[a] < omega[b]; });

    std::vector<double> sum(n, 0.0);
    for (std::size_t k : order) {
        Spectrum pad(len);
        std::copy(u[k].begin(), u[k].end(), pad.begin() + static_cast<std::ptrdiff_t>(mid));
        auto mode = to_time_domain(pad, left, n);
        for (std::size_t i = 0; i < n; ++i) sum[i] += mode[i];
        res.modes.push_back(std::move(mode));
        res.center_freqs.push_back(omega[k]);
    }
    res.recon_mse = mse(sum, signal);
    return res;
}

Decomposition vmd_decompose(const TimeSeries& series, const VmdParams& params) {
    if (params.k_modes != 3) throw InvalidArgument("vmd_decompose: trend/periodic/residual labelling needs k_modes == 3");
    auto r = vmd(series.values(), params);
    Decomposition d{series.with_values(std::move(r.modes[0])), series.with_values(std::move(r.modes[1])),
                    series.with_values(std::move(r.modes[2])),
                    {r.center_freqs[0], r.center_freqs[1], r.center_freqs[2]},
                    0.0,
                    r.iterations,
                    r.hit_max_iter};
    d.recon_mse = reconstruction_mse(d, series);
    return d;
}

TimeSeries reconstruct(const Decomposition& d) {
    const auto t = d.trend.values();
    const auto s = d.periodic.values();
    const auto r = d.residual.values();
    std::vector<double> out(t.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = t[i] + s[i] + r[i];
    return d.trend.with_values(std::move(out));
}

double reconstruction_mse(const Decomposition& d, const TimeSeries& input) {
    const auto sum = reconstruct(d);
    if (sum.size() != input.size()) throw InvalidArgument("reconstruction_mse: length mismatch");
    return mse(sum.values(), input.values());
}

}  // namespace vsxc
