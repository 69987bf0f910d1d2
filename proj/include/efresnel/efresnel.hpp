#pragma once

#include "core.hpp"

namespace efresnel {

// ---------------------------------------------------------------------------
// Entangled Fresnel transform: 2D complex argument eta = eta1 + i eta2, with
// the two components coupled only through the |eta|^2 chirps and the bilinear
// pairing eta1*eta'1 + eta2*eta'2. Kernel variants share one engine:
//
//   Spatial         coefficients (A, B, D), coupling 1/B
//   SpatialSwapped  coefficients (D, -B, A): the inverse-direction kernel
//   Frequency       coefficients (A, C, D), coupling 1/C
//
// The swapped kernel equals the spatial kernel of the xi-counterpart matrix
// (D, -B, -C, A), which is also the matrix that acts on the xi representation
// when (A, B, C, D) acts on the position representation.

enum class Representation { Eta, Xi };

inline ABCDMatrix xi_counterpart(const ABCDMatrix& m) { return {m.d, -m.b, -m.c, m.a}; }

namespace detail {

inline void require_coupling(double b, KernelVariant v, const char* where) {
    if (std::abs(b) >= singular_threshold) return;
    std::string msg = std::string(where) + ": coupling coefficient " +
                      (v == KernelVariant::Frequency ? "|C| = " : "|B| = ") + std::to_string(std::abs(b)) +
                      " is below 1e-9";
    if (v == KernelVariant::Frequency) throw SingularC(msg);
    throw SingularB(msg);
}

}  // namespace detail

inline cd kernel_spatial(const ABCDMatrix& m, cd eta_out, cd eta_in) {
    m.validate();
    detail::require_coupling(m.b, KernelVariant::Spatial, "kernel_spatial");
    cd amp = 1.0 / (cd(0, 2 * m.b) * pi);
    double cross = eta_in.real() * eta_out.real() + eta_in.imag() * eta_out.imag();
    double phase = (m.a * std::norm(eta_in) - 2 * cross + m.d * std::norm(eta_out)) / (2 * m.b);
    return amp * std::polar(1.0, phase);
}

inline cd kernel_swapped(const ABCDMatrix& m, cd eta_out, cd eta_in) {
    m.validate();
    detail::require_coupling(-m.b, KernelVariant::SpatialSwapped, "kernel_swapped");
    return kernel_spatial(xi_counterpart(m), eta_out, eta_in);
}

inline cd kernel_frequency(const ABCDMatrix& m, cd xi_out, cd xi_in) {
    m.validate();
    detail::require_coupling(m.c, KernelVariant::Frequency, "kernel_frequency");
    return kernel_spatial({m.a, m.c, m.b, m.d}, xi_out, xi_in);
}

namespace detail {

// C = A (p x q) times B (q x r), rows in parallel, fixed-order dot products
inline std::vector<cd> matmul(const std::vector<cd>& A, const std::vector<cd>& B, int p, int q, int r) {
    std::vector<cd> C(size_t(p) * r);
    parallel_for(p, [&](size_t i) {
        const cd* arow = A.data() + i * q;
        cd* crow = C.data() + i * r;
        for (int j = 0; j < r; ++j) crow[j] = 0;
        for (int k = 0; k < q; ++k) {
            cd a = arow[k];
            const cd* brow = B.data() + size_t(k) * r;
            for (int j = 0; j < r; ++j) crow[j] += a * brow[j];
        }
    });
    return C;
}

}  // namespace detail

// Separable quadrature engine. The kernel factors per axis once the chirps
// are peeled off:
//   out = amp * chirp_out .* (M (chirp_in .* f) M^T) * h^2,
//   M[a, i] = exp(-i xo_a xi_i / b).
inline ComplexField propagate(const ComplexField& in, const ABCDMatrix& m, KernelVariant variant,
                              const GridSpec& out_spec) {
    in.spec.validate();
    out_spec.validate();
    m.validate();
    double a, b, d;
    kernel_coefficients(m, variant, a, b, d);
    detail::require_coupling(b, variant, "propagate");

    int ni = in.spec.n, no = out_spec.n;
    double inv_b = 1.0 / b;

    std::vector<cd> g(in.samples.size());
    for (int i = 0; i < ni; ++i) {
        double xi = in.spec.x(i);
        for (int j = 0; j < ni; ++j) {
            double xj = in.spec.x(j);
            g[size_t(i) * ni + j] =
                std::polar(1.0, 0.5 * a * (xi * xi + xj * xj) * inv_b) * in.at(i, j);
        }
    }

    std::vector<cd> M(size_t(no) * ni);
    for (int aa = 0; aa < no; ++aa)
        for (int i = 0; i < ni; ++i)
            M[size_t(aa) * ni + i] = std::polar(1.0, -out_spec.x(aa) * in.spec.x(i) * inv_b);

    // rows = eta'_1: T = M g ; then contract eta_2 with M: out[a][b'] = sum_j T[a][j] M[b'][j]
    std::vector<cd> T = detail::matmul(M, g, no, ni, ni);
    std::vector<cd> Mt(size_t(ni) * no);
    for (int i = 0; i < ni; ++i)
        for (int aa = 0; aa < no; ++aa) Mt[size_t(i) * no + aa] = M[size_t(aa) * ni + i];
    std::vector<cd> R = detail::matmul(T, Mt, no, ni, no);

    cd amp = 1.0 / (cd(0, 2 * b) * pi);
    double w = in.spec.cell_area();
    ComplexField out(out_spec);
    for (int aa = 0; aa < no; ++aa) {
        double xa = out_spec.x(aa);
        for (int bb = 0; bb < no; ++bb) {
            double xb = out_spec.x(bb);
            out.at(aa, bb) =
                amp * std::polar(1.0, 0.5 * d * (xa * xa + xb * xb) * inv_b) * R[size_t(aa) * no + bb] * w;
        }
    }
    return out;
}

inline ComplexField propagate(const ComplexField& in, const ABCDMatrix& m,
                              KernelVariant variant = KernelVariant::Spatial) {
    return propagate(in, m, variant, in.spec);
}

// Direct O(n_out^2 n_in^2) quadrature. Slow; kept as the cross-check for the
// separable engine and for kernel-level experiments.
inline ComplexField propagate_reference(const ComplexField& in, const ABCDMatrix& m, KernelVariant variant,
                                        const GridSpec& out_spec) {
    in.spec.validate();
    out_spec.validate();
    m.validate();
    double a, b, d;
    kernel_coefficients(m, variant, a, b, d);
    detail::require_coupling(b, variant, "propagate_reference");
    ABCDMatrix eff{a, b, 0, d};  // c slot unused by the spatial kernel; det not rechecked here
    double w = in.spec.cell_area();
    cd amp = 1.0 / (cd(0, 2 * b) * pi);
    double inv_b = 1.0 / b;
    ComplexField out(out_spec);
    parallel_for(size_t(out_spec.n) * out_spec.n, [&](size_t idx) {
        int aa = int(idx) / out_spec.n, bb = int(idx) % out_spec.n;
        cd eta_out(out_spec.x(aa), out_spec.x(bb));
        std::vector<cd> terms(in.samples.size());
        for (int i = 0; i < in.spec.n; ++i)
            for (int j = 0; j < in.spec.n; ++j) {
                cd eta_in(in.spec.x(i), in.spec.x(j));
                double cross = eta_in.real() * eta_out.real() + eta_in.imag() * eta_out.imag();
                double phase =
                    (eff.a * std::norm(eta_in) - 2 * cross + eff.d * std::norm(eta_out)) * 0.5 * inv_b;
                terms[size_t(i) * in.spec.n + j] = std::polar(1.0, phase) * in.at(i, j);
            }
        out.samples[idx] = amp * pairwise_sum(terms) * w;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Xi representation (frequency-like second argument of the entangled pair)

// <eta|xi> pairing: modulus exactly 1/2, phase Im(xi conj(eta))
inline cd overlap_eta_xi(cd eta, cd xi) {
    return 0.5 * std::exp(0.5 * (xi * std::conj(eta) - std::conj(xi) * eta));
}

// j(gamma) = (1/2pi) sum_sigma psi(sigma) exp[(sigma conj(gamma) - conj(sigma) gamma)/2] h^2
//          = (1/2pi) sum psi e^{-i (sigma1 gamma2 - sigma2 gamma1)} h^2, separable per axis.
inline ComplexField to_xi_rep(const ComplexField& psi, const GridSpec& out_spec) {
    psi.spec.validate();
    out_spec.validate();
    int n = psi.spec.n, no = out_spec.n;

    // G[i][b] = sum_j psi[i][j] e^{+i x_j g_b}   (contract sigma2 against gamma1)
    std::vector<cd> M2(size_t(n) * no);
    for (int j = 0; j < n; ++j)
        for (int bb = 0; bb < no; ++bb)
            M2[size_t(j) * no + bb] = std::polar(1.0, psi.spec.x(j) * out_spec.x(bb));
    std::vector<cd> G = detail::matmul(psi.samples, M2, n, n, no);

    // j[b][a] = sum_i G[i][b] e^{-i x_i g_a}    (contract sigma1 against gamma2)
    std::vector<cd> Gt(size_t(no) * n);
    for (int i = 0; i < n; ++i)
        for (int bb = 0; bb < no; ++bb) Gt[size_t(bb) * n + i] = G[size_t(i) * no + bb];
    std::vector<cd> M1(size_t(n) * no);
    for (int i = 0; i < n; ++i)
        for (int aa = 0; aa < no; ++aa)
            M1[size_t(i) * no + aa] = std::polar(1.0, -psi.spec.x(i) * out_spec.x(aa));
    std::vector<cd> J = detail::matmul(Gt, M1, no, n, no);

    ComplexField out(out_spec);
    double scale = psi.spec.cell_area() / (2 * pi);
    for (size_t k = 0; k < J.size(); ++k) out.samples[k] = J[k] * scale;
    return out;
}

inline ComplexField to_xi_rep(const ComplexField& psi) { return to_xi_rep(psi, psi.spec); }

// psi(sigma) = (1/2pi) sum_gamma j(gamma) e^{+i (sigma1 gamma2 - sigma2 gamma1)} h^2
inline ComplexField from_xi_rep(const ComplexField& j, const GridSpec& out_spec) {
    j.spec.validate();
    out_spec.validate();
    int n = j.spec.n, no = out_spec.n;

    // S[i][a] = sum_b e^{+i x_i g_b} j[a][b]    (contract gamma2 against sigma1)
    std::vector<cd> A1(size_t(no) * n);
    for (int i = 0; i < no; ++i)
        for (int bb = 0; bb < n; ++bb)
            A1[size_t(i) * n + bb] = std::polar(1.0, out_spec.x(i) * j.spec.x(bb));
    std::vector<cd> Jt(size_t(n) * n);
    for (int aa = 0; aa < n; ++aa)
        for (int bb = 0; bb < n; ++bb) Jt[size_t(bb) * n + aa] = j.samples[size_t(aa) * n + bb];
    std::vector<cd> S = detail::matmul(A1, Jt, no, n, n);

    // psi[i][jj] = sum_a S[i][a] e^{-i g_a x_jj} (contract gamma1 against sigma2)
    std::vector<cd> A2(size_t(n) * no);
    for (int aa = 0; aa < n; ++aa)
        for (int jj = 0; jj < no; ++jj)
            A2[size_t(aa) * no + jj] = std::polar(1.0, -j.spec.x(aa) * out_spec.x(jj));
    std::vector<cd> P = detail::matmul(S, A2, no, n, no);

    ComplexField out(out_spec);
    double scale = j.spec.cell_area() / (2 * pi);
    for (size_t k = 0; k < P.size(); ++k) out.samples[k] = P[k] * scale;
    return out;
}

inline ComplexField from_xi_rep(const ComplexField& j) { return from_xi_rep(j, j.spec); }

}  // namespace efresnel
