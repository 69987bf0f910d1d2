#pragma once

#include "core.hpp"

namespace efresnel {

// ---------------------------------------------------------------------------
// One-dimensional Fresnel transform on the real line. Scalar warm-up for the
// two-dimensional engine: same matrix conventions, same grid rules.

// (2 pi i B)^{-1/2} exp[(i/2B)(A xp^2 - 2 xp x + D x^2)], principal sqrt.
// xp is the input coordinate, x the output coordinate.
inline cd kernel_1d(const ABCDMatrix& m, double x, double xp) {
    m.validate();
    if (std::abs(m.b) < singular_threshold)
        throw SingularB("kernel_1d: |B| = " + std::to_string(std::abs(m.b)) +
                        " is below 1e-9; use the geometric limit instead");
    cd amp = 1.0 / std::sqrt(cd(0, 2 * pi * m.b));
    double phase = (m.a * xp * xp - 2 * xp * x + m.d * x * x) / (2 * m.b);
    return amp * std::polar(1.0, phase);
}

// Quadrature propagation: phi(x_i) = sum_j kernel_1d(m, x_i, x_j) psi(x_j) h.
inline std::vector<cd> propagate_1d(const std::vector<cd>& psi, const GridSpec& in_spec,
                                    const ABCDMatrix& m, const GridSpec& out_spec) {
    in_spec.validate();
    out_spec.validate();
    m.validate();
    if (psi.size() != size_t(in_spec.n))
        throw InvalidParams("propagate_1d: sample count does not match grid");
    if (std::abs(m.b) < singular_threshold)
        throw SingularB("propagate_1d: |B| below 1e-9");

    // factor the kernel: amp * e^{iD x^2/2B} * sum_j e^{-i x x_j / B} (e^{iA x_j^2/2B} psi_j) h
    double inv_b = 1.0 / m.b;
    std::vector<cd> chirped(in_spec.n);
    for (int j = 0; j < in_spec.n; ++j) {
        double xj = in_spec.x(j);
        chirped[j] = std::polar(1.0, 0.5 * m.a * xj * xj * inv_b) * psi[j];
    }
    cd amp = 1.0 / std::sqrt(cd(0, 2 * pi * m.b));
    double h = in_spec.h();
    std::vector<cd> out(out_spec.n);
    parallel_for(out_spec.n, [&](size_t i) {
        double x = out_spec.x(int(i));
        std::vector<cd> terms(in_spec.n);
        for (int j = 0; j < in_spec.n; ++j)
            terms[j] = std::polar(1.0, -x * in_spec.x(j) * inv_b) * chirped[j];
        cd acc = pairwise_sum(terms);
        out[i] = amp * std::polar(1.0, 0.5 * m.d * x * x * inv_b) * acc * h;
    });
    return out;
}

// ---------------------------------------------------------------------------
// One-dimensional Wigner table

struct Table1D {
    std::vector<double> nu;  // row coordinate
    GridSpec xgrid;          // column coordinate
    std::vector<double> w;   // row-major [nu_index][x_index]

    double& at(int inu, int ix) { return w[size_t(inu) * xgrid.n + ix]; }
    const double& at(int inu, int ix) const { return w[size_t(inu) * xgrid.n + ix]; }
};

namespace detail {

// linear interpolation on a cell-centered grid, zero outside [-L, L]
inline cd interp_line(const std::vector<cd>& psi, const GridSpec& g, double p) {
    if (p < -g.L || p > g.L) return 0;
    double t = (p - g.x(0)) / g.h();
    int j = int(std::floor(t));
    double f = t - j;
    cd lo = (j >= 0 && j < g.n) ? psi[j] : cd(0);
    cd hi = (j + 1 >= 0 && j + 1 < g.n) ? psi[j + 1] : cd(0);
    return lo + f * (hi - lo);
}

}  // namespace detail

// W(nu, x) = (h/2pi) sum_k e^{i nu u_k} conj(psi(x + u_k/2)) psi(x - u_k/2),
// u_k = (k - n + 1/2) h for k = 0 .. 2n-1, so u covers (-2L, 2L) and the
// half-offset keeps x +- u/2 on half-grid points reachable by interpolation.
inline Table1D wigner_1d(const std::vector<cd>& psi, const GridSpec& grid,
                         const std::vector<double>& nu_values) {
    grid.validate();
    if (psi.size() != size_t(grid.n)) throw InvalidParams("wigner_1d: sample count does not match grid");
    if (nu_values.empty()) throw InvalidParams("wigner_1d: empty frequency list");

    int n = grid.n;
    double h = grid.h();
    int nu_count = int(nu_values.size());

    std::vector<double> u(2 * n);
    for (int k = 0; k < 2 * n; ++k) u[k] = (k - n + 0.5) * h;

    Table1D tab;
    tab.nu = nu_values;
    tab.xgrid = grid;
    tab.w.assign(size_t(nu_count) * n, 0.0);

    std::vector<double> max_im(n, 0.0);
    parallel_for(n, [&](size_t jx) {
        double x = grid.x(int(jx));
        std::vector<cd> corr(2 * n);
        for (int k = 0; k < 2 * n; ++k)
            corr[k] = std::conj(detail::interp_line(psi, grid, x + 0.5 * u[k])) *
                      detail::interp_line(psi, grid, x - 0.5 * u[k]);
        for (int inu = 0; inu < nu_count; ++inu) {
            std::vector<cd> terms(2 * n);
            for (int k = 0; k < 2 * n; ++k) terms[k] = std::polar(1.0, nu_values[inu] * u[k]) * corr[k];
            cd val = pairwise_sum(terms) * (h / (2 * pi));
            tab.w[size_t(inu) * n + jx] = val.real();
            max_im[jx] = std::max(max_im[jx], std::abs(val.imag()));
        }
    });

    double worst_im = 0, worst_re = 0;
    for (double v : max_im) worst_im = std::max(worst_im, v);
    for (double v : tab.w) worst_re = std::max(worst_re, std::abs(v));
    if (worst_im > 1e-8 * worst_re)
        throw ImaginaryResidue("wigner_1d: imaginary residue " + std::to_string(worst_im) +
                               " exceeds 1e-8 of peak " + std::to_string(worst_re));
    return tab;
}

}  // namespace efresnel
