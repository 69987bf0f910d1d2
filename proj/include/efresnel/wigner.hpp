#pragma once

#include "efresnel.hpp"

namespace efresnel {

// ---------------------------------------------------------------------------
// Entangled Wigner function on a 4D table: sigma (position-like) and gamma
// (frequency-like) each live on their own 2D cell-centered grid.
//
//   W(sigma, gamma) = (h^2/pi^3) sum_eta psi(sigma+eta) conj(psi(sigma-eta))
//                                        e^{-2i (eta1 gamma2 - eta2 gamma1)}
//
// eta runs over the field grid. When every sigma node is an integer multiple
// of the field step (step ratio an even integer and extents aligned), the
// shifted factors are exact sample lookups; otherwise they are bilinear
// interpolations of the field, which costs accuracy near sharp features.

struct WignerTable {
    GridSpec sigma_grid, gamma_grid;
    std::vector<double> w;  // row-major [s1][s2][g1][g2]

    WignerTable() = default;
    WignerTable(const GridSpec& sg, const GridSpec& gg)
        : sigma_grid(sg), gamma_grid(gg),
          w(size_t(sg.n) * sg.n * gg.n * gg.n) {}

    size_t idx(int i1, int i2, int g1, int g2) const {
        return ((size_t(i1) * sigma_grid.n + i2) * gamma_grid.n + g1) * gamma_grid.n + g2;
    }
    double& at(int i1, int i2, int g1, int g2) { return w[idx(i1, i2, g1, g2)]; }
    const double& at(int i1, int i2, int g1, int g2) const { return w[idx(i1, i2, g1, g2)]; }
};

inline constexpr int wigner_table_side_cap = 48;

namespace detail {

inline cd interp_plane(const ComplexField& f, double px, double py) {
    const GridSpec& g = f.spec;
    double tx = (px - g.x(0)) / g.h(), ty = (py - g.x(0)) / g.h();
    int i0 = int(std::floor(tx)), j0 = int(std::floor(ty));
    double fx = tx - i0, fy = ty - j0;
    auto tap = [&](int i, int j) -> cd {
        return (i >= 0 && i < g.n && j >= 0 && j < g.n) ? f.at(i, j) : cd(0);
    };
    return (1 - fx) * ((1 - fy) * tap(i0, j0) + fy * tap(i0, j0 + 1)) +
           fx * ((1 - fy) * tap(i0 + 1, j0) + fy * tap(i0 + 1, j0 + 1));
}

// true when every node of `tab` sits on an integer multiple of field step h
inline bool lattice_aligned(const GridSpec& tab, double h) {
    for (int i = 0; i < tab.n; ++i) {
        double o = tab.x(i) / h;
        if (std::abs(o - std::round(o)) > 1e-9) return false;
    }
    return true;
}

inline void check_table_caps(const GridSpec& sg, const GridSpec& gg, bool override_size_cap) {
    if (!override_size_cap && (sg.n > wigner_table_side_cap || gg.n > wigner_table_side_cap))
        throw SizeCapExceeded("table grids above " + std::to_string(wigner_table_side_cap) +
                              " points per side need the size-cap override");
}

// Shared engine for the position- and xi-side tables. Per outer node the
// shifted product P[a][b] is contracted against separable phase columns:
//   Q[c2][c1] = sum_{a,b} E1[a][c2] P[a][b] E2[b][c1]
// and the result is stored transposed into the [c1][c2] slice.
struct WignerEngine {
    const ComplexField& f;
    GridSpec outer, inner;
    double phase_sign;   // sign of the e^{+-2i x c} column for E1
    bool conj_on_plus;   // which shifted factor carries the conjugate

    double run(WignerTable& tab, bool outer_is_sigma) const {
        int n = f.spec.n, ni = inner.n, no = outer.n;
        double h = f.spec.h();
        bool aligned = lattice_aligned(outer, h);

        std::vector<cd> E1(size_t(n) * ni), E2(size_t(n) * ni);
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < ni; ++c) {
                double ph = 2 * f.spec.x(a) * inner.x(c);
                E1[size_t(a) * ni + c] = std::polar(1.0, phase_sign * ph);
                E2[size_t(a) * ni + c] = std::polar(1.0, -phase_sign * ph);
            }

        double scale = f.spec.cell_area() / (pi * pi * pi);
        std::vector<double> max_im(size_t(no) * no, 0.0);

        parallel_for(size_t(no) * no, [&](size_t node) {
            int o1 = int(node) / no, o2 = int(node) % no;
            double c1 = outer.x(o1), c2 = outer.x(o2);

            std::vector<cd> P(size_t(n) * n);
            if (aligned) {
                int k1 = int(std::round(c1 / h)), k2 = int(std::round(c2 / h));
                for (int a = 0; a < n; ++a) {
                    int ip = a + k1, im = n - 1 - a + k1;
                    for (int b = 0; b < n; ++b) {
                        int jp = b + k2, jm = n - 1 - b + k2;
                        cd vp = (ip >= 0 && ip < n && jp >= 0 && jp < n) ? f.at(ip, jp) : cd(0);
                        cd vm = (im >= 0 && im < n && jm >= 0 && jm < n) ? f.at(im, jm) : cd(0);
                        P[size_t(a) * n + b] = conj_on_plus ? std::conj(vp) * vm : vp * std::conj(vm);
                    }
                }
            } else {
                for (int a = 0; a < n; ++a) {
                    double xa = f.spec.x(a);
                    for (int b = 0; b < n; ++b) {
                        double xb = f.spec.x(b);
                        cd vp = interp_plane(f, c1 + xa, c2 + xb);
                        cd vm = interp_plane(f, c1 - xa, c2 - xb);
                        P[size_t(a) * n + b] = conj_on_plus ? std::conj(vp) * vm : vp * std::conj(vm);
                    }
                }
            }

            // V = P E2 (n x ni), then Q[c2'][c1'] = sum_a E1[a][c2'] V[a][c1']
            std::vector<cd> V(size_t(n) * ni, cd(0));
            for (int a = 0; a < n; ++a) {
                const cd* prow = P.data() + size_t(a) * n;
                cd* vrow = V.data() + size_t(a) * ni;
                for (int b = 0; b < n; ++b) {
                    cd pv = prow[b];
                    const cd* e2row = E2.data() + size_t(b) * ni;
                    for (int c = 0; c < ni; ++c) vrow[c] += pv * e2row[c];
                }
            }
            double mi = 0;
            for (int cc2 = 0; cc2 < ni; ++cc2)
                for (int cc1 = 0; cc1 < ni; ++cc1) {
                    cd q(0);
                    for (int a = 0; a < n; ++a)
                        q += E1[size_t(a) * ni + cc2] * V[size_t(a) * ni + cc1];
                    q *= scale;
                    mi = std::max(mi, std::abs(q.imag()));
                    if (outer_is_sigma)
                        tab.at(o1, o2, cc1, cc2) = q.real();
                    else
                        tab.at(cc1, cc2, o1, o2) = q.real();
                }
            max_im[node] = mi;
        });
        double worst = 0;
        for (double v : max_im) worst = std::max(worst, v);
        return worst;
    }
};

inline void residue_check(const WignerTable& tab, double worst_im, const char* where) {
    double worst_re = 0;
    for (double v : tab.w) worst_re = std::max(worst_re, std::abs(v));
    if (worst_im > 1e-8 * worst_re)
        throw ImaginaryResidue(std::string(where) + ": imaginary residue " + std::to_string(worst_im) +
                               " exceeds 1e-8 of peak " + std::to_string(worst_re));
}

}  // namespace detail

inline WignerTable wigner(const ComplexField& psi, const GridSpec& sigma_grid, const GridSpec& gamma_grid,
                          bool override_size_cap = false) {
    psi.spec.validate();
    sigma_grid.validate();
    gamma_grid.validate();
    detail::check_table_caps(sigma_grid, gamma_grid, override_size_cap);
    WignerTable tab(sigma_grid, gamma_grid);
    // e^{-2i(eta1 gamma2 - eta2 gamma1)}: E1 column is gamma2 with sign -1
    detail::WignerEngine eng{psi, sigma_grid, gamma_grid, -1.0, /*conj_on_plus=*/false};
    double worst = eng.run(tab, /*outer_is_sigma=*/true);
    detail::residue_check(tab, worst, "wigner");
    return tab;
}

// Same table built from the xi representation:
//   W(sigma, gamma) = (h^2/pi^3) sum_zeta j(gamma-zeta) conj(j(gamma+zeta))
//                                         e^{+2i (zeta1 sigma2 - zeta2 sigma1)}
inline WignerTable wigner_from_xi(const ComplexField& j, const GridSpec& sigma_grid,
                                  const GridSpec& gamma_grid, bool override_size_cap = false) {
    j.spec.validate();
    sigma_grid.validate();
    gamma_grid.validate();
    detail::check_table_caps(sigma_grid, gamma_grid, override_size_cap);
    WignerTable tab(sigma_grid, gamma_grid);
    // outer loop over gamma; the +zeta factor carries the conjugate
    detail::WignerEngine eng{j, gamma_grid, sigma_grid, +1.0, /*conj_on_plus=*/true};
    double worst = eng.run(tab, /*outer_is_sigma=*/false);
    detail::residue_check(tab, worst, "wigner_from_xi");
    return tab;
}

// integrate gamma out: equals |psi(sigma)|^2 / pi in the continuum
inline RealField marginal_gamma(const WignerTable& tab) {
    RealField out(tab.sigma_grid);
    int ns = tab.sigma_grid.n, ng = tab.gamma_grid.n;
    double wcell = tab.gamma_grid.cell_area();
    for (int i1 = 0; i1 < ns; ++i1)
        for (int i2 = 0; i2 < ns; ++i2) {
            const double* block = tab.w.data() + tab.idx(i1, i2, 0, 0);
            out.at(i1, i2) = pairwise_sum(block, size_t(ng) * ng) * wcell;
        }
    return out;
}

// integrate sigma out: equals |j(gamma)|^2 / pi in the continuum
inline RealField marginal_sigma(const WignerTable& tab) {
    RealField out(tab.gamma_grid);
    int ns = tab.sigma_grid.n, ng = tab.gamma_grid.n;
    double wcell = tab.sigma_grid.cell_area();
    std::vector<double> terms(size_t(ns) * ns);
    for (int g1 = 0; g1 < ng; ++g1)
        for (int g2 = 0; g2 < ng; ++g2) {
            for (int i1 = 0; i1 < ns; ++i1)
                for (int i2 = 0; i2 < ns; ++i2)
                    terms[size_t(i1) * ns + i2] = tab.at(i1, i2, g1, g2);
            out.at(g1, g2) = pairwise_sum(terms) * wcell;
        }
    return out;
}

inline double table_mass(const WignerTable& tab) {
    return pairwise_sum(tab.w) * tab.sigma_grid.cell_area() * tab.gamma_grid.cell_area();
}

// Quadrilinear read of the table. Queries outside the domain box
// [-Ls, Ls]^2 x [-Lg, Lg]^2 return 0 and set *outside; queries in the
// half-cell fringe between the outermost nodes and the box edge interpolate
// against implicit zeros.
inline double sample_wigner(const WignerTable& tab, cd sigma, cd gamma, bool* outside = nullptr) {
    double s1 = sigma.real(), s2 = sigma.imag(), g1 = gamma.real(), g2 = gamma.imag();
    const GridSpec& sg = tab.sigma_grid;
    const GridSpec& gg = tab.gamma_grid;
    if (outside) *outside = false;
    if (std::abs(s1) > sg.L || std::abs(s2) > sg.L || std::abs(g1) > gg.L || std::abs(g2) > gg.L) {
        if (outside) *outside = true;
        return 0;
    }
    auto locate = [](const GridSpec& g, double v, int& i0, double& t) {
        double u = (v - g.x(0)) / g.h();
        i0 = int(std::floor(u));
        t = u - i0;
    };
    int a0, b0, c0, d0;
    double ta, tb, tc, td;
    locate(sg, s1, a0, ta);
    locate(sg, s2, b0, tb);
    locate(gg, g1, c0, tc);
    locate(gg, g2, d0, td);
    double acc = 0;
    for (int da = 0; da < 2; ++da) {
        int ia = a0 + da;
        if (ia < 0 || ia >= sg.n) continue;
        double wa = da ? ta : 1 - ta;
        for (int db = 0; db < 2; ++db) {
            int ib = b0 + db;
            if (ib < 0 || ib >= sg.n) continue;
            double wb = db ? tb : 1 - tb;
            for (int dc = 0; dc < 2; ++dc) {
                int ic = c0 + dc;
                if (ic < 0 || ic >= gg.n) continue;
                double wc = dc ? tc : 1 - tc;
                for (int dd = 0; dd < 2; ++dd) {
                    int id = d0 + dd;
                    if (id < 0 || id >= gg.n) continue;
                    double wd = dd ? td : 1 - td;
                    acc += wa * wb * wc * wd * tab.at(ia, ib, ic, id);
                }
            }
        }
    }
    return acc;
}

}  // namespace efresnel
