#pragma once

#include "wigner.hpp"

namespace efresnel {

// ---------------------------------------------------------------------------
// Generalized Radon strip transform of a Wigner table, and the direct
// quadratic-transform evaluation it must reproduce:
//
//   R(eta) = (pi/q^2) sum_sigma W(sigma, gamma(eta, sigma)) h_sigma^2,
//   gamma1 = (p sigma2 - eta2)/q,  gamma2 = (eta1 - p sigma1)/q
//
// equals |g(eta)|^2 with g(eta) = (1/2 q pi) sum_sigma psi(sigma)
// exp[(i/2q)(p |sigma|^2 - 2 eta.sigma)] h^2. The spatial strip of a system
// (A,B,C,D) is (p,q) = (D,B); the frequency strip is (p,q) = (A,C).

struct StripParams {
    double p, q;
};

inline StripParams strip_spatial(const ABCDMatrix& m) { return {m.d, m.b}; }
inline StripParams strip_frequency(const ABCDMatrix& m) { return {m.a, m.c}; }

enum class ExtrapolationPolicy { Strict, Lenient };

inline constexpr double extrapolation_limit = 0.20;

struct RadonResult {
    RealField values;
    double extrapolated_fraction = 0;  // (eta, sigma) pairs whose gamma left the table box
    std::vector<Warning> warnings;
};

inline RadonResult radon_from_table(const WignerTable& tab, const StripParams& strip,
                                    const GridSpec& out_spec,
                                    ExtrapolationPolicy policy = ExtrapolationPolicy::Strict) {
    out_spec.validate();
    if (std::abs(strip.q) < singular_threshold)
        throw DegenerateStrip("strip coupling |q| = " + std::to_string(std::abs(strip.q)) +
                              " is below 1e-9; the strip collapses to a line");

    const GridSpec& sg = tab.sigma_grid;
    int ns = sg.n, no = out_spec.n;
    double scale = pi / (strip.q * strip.q) * sg.cell_area();
    double inv_q = 1.0 / strip.q;

    RadonResult res;
    res.values = RealField(out_spec);
    std::vector<long long> flagged(size_t(no) * no, 0);

    parallel_for(size_t(no) * no, [&](size_t cell) {
        int i = int(cell) / no, j = int(cell) % no;
        double e1 = out_spec.x(i), e2 = out_spec.x(j);
        double acc = 0;
        long long out_count = 0;
        for (int a = 0; a < ns; ++a) {
            double s1 = sg.x(a);
            double g2 = (e1 - strip.p * s1) * inv_q;
            for (int b = 0; b < ns; ++b) {
                double s2 = sg.x(b);
                double g1 = (strip.p * s2 - e2) * inv_q;
                bool outside = false;
                acc += sample_wigner(tab, cd(s1, s2), cd(g1, g2), &outside);
                out_count += outside;
            }
        }
        res.values.samples[cell] = acc * scale;
        flagged[cell] = out_count;
    });

    long long total_flagged = 0;
    for (long long v : flagged) total_flagged += v;
    res.extrapolated_fraction = double(total_flagged) / (double(no) * no * ns * ns);
    if (res.extrapolated_fraction > extrapolation_limit) {
        std::string msg = "strip left the table domain for " +
                          std::to_string(res.extrapolated_fraction * 100) +
                          "% of sample pairs (limit 20%); enlarge the gamma grid";
        if (policy == ExtrapolationPolicy::Strict) throw ExcessiveExtrapolation(msg);
        res.warnings.push_back({Warning::Code::TruncationLoss, msg, 0});
    }
    return res;
}

// |g|^2 from the field directly, separable engine (no Wigner table involved)
inline RealField radon_direct(const ComplexField& psi, double p, double q, const GridSpec& out_spec) {
    psi.spec.validate();
    out_spec.validate();
    if (std::abs(q) < singular_threshold)
        throw DegenerateStrip("strip coupling |q| below 1e-9");

    int ni = psi.spec.n, no = out_spec.n;
    double inv_q = 1.0 / q;
    std::vector<cd> g(psi.samples.size());
    for (int i = 0; i < ni; ++i) {
        double xi = psi.spec.x(i);
        for (int j = 0; j < ni; ++j) {
            double xj = psi.spec.x(j);
            g[size_t(i) * ni + j] = std::polar(1.0, 0.5 * p * (xi * xi + xj * xj) * inv_q) * psi.at(i, j);
        }
    }
    std::vector<cd> M(size_t(no) * ni);
    for (int a = 0; a < no; ++a)
        for (int i = 0; i < ni; ++i)
            M[size_t(a) * ni + i] = std::polar(1.0, -out_spec.x(a) * psi.spec.x(i) * inv_q);
    std::vector<cd> T = detail::matmul(M, g, no, ni, ni);
    std::vector<cd> Mt(size_t(ni) * no);
    for (int i = 0; i < ni; ++i)
        for (int a = 0; a < no; ++a) Mt[size_t(i) * no + a] = M[size_t(a) * ni + i];
    std::vector<cd> G = detail::matmul(T, Mt, no, ni, no);

    double amp = psi.spec.cell_area() / (2 * q * pi);
    RealField out(out_spec);
    for (size_t k = 0; k < G.size(); ++k) out.samples[k] = std::norm(G[k] * amp);
    return out;
}

inline RealField radon_direct_spatial(const ComplexField& psi, const ABCDMatrix& m,
                                      const GridSpec& out_spec) {
    m.validate();
    return radon_direct(psi, m.d, m.b, out_spec);
}

// takes the position-representation field; the (A, C) chirp pair plays (p, q)
inline RealField radon_direct_frequency(const ComplexField& psi, const ABCDMatrix& m,
                                        const GridSpec& out_spec) {
    m.validate();
    return radon_direct(psi, m.a, m.c, out_spec);
}

// ---------------------------------------------------------------------------
// Identity verification: output intensity of the propagated field against the
// strip transform of the input's Wigner table, on a shared comparison window.

struct VerifyConfig {
    GridSpec field;   // input sampling window
    GridSpec sigma;   // table position grid
    GridSpec gamma;   // table frequency grid
    GridSpec output;  // comparison window
    double tolerance = 5e-3;
    bool override_size_cap = false;
};

struct IdentityReport {
    std::string check;  // "spatial" | "frequency" | "hankel"
    ABCDMatrix matrix{1, 0, 0, 1};
    double lhs_norm = 0, rhs_norm = 0;       // masses of the two sides
    double rel_l2_error = 0, rel_linf_error = 0;
    double tolerance = 0;
    double extrapolated_fraction = 0;
    bool pass = false;
    std::vector<Warning> warnings;
    std::vector<std::pair<int, double>> per_mode;  // hankel check only: (s, rel error)
    std::string notes;
};

namespace detail {

inline double mass(const RealField& f) {
    return pairwise_sum(f.samples) * f.spec.cell_area();
}

inline void compare_fields(const RealField& lhs, const RealField& rhs, IdentityReport& rep) {
    std::vector<double> d2(lhs.samples.size()), r2(lhs.samples.size());
    double worst_d = 0, worst_r = 0;
    for (size_t k = 0; k < lhs.samples.size(); ++k) {
        double d = lhs.samples[k] - rhs.samples[k];
        d2[k] = d * d;
        r2[k] = rhs.samples[k] * rhs.samples[k];
        worst_d = std::max(worst_d, std::abs(d));
        worst_r = std::max(worst_r, std::abs(rhs.samples[k]));
    }
    rep.rel_l2_error = std::sqrt(pairwise_sum(d2) / pairwise_sum(r2));
    rep.rel_linf_error = worst_d / worst_r;
    rep.lhs_norm = mass(lhs);
    rep.rhs_norm = mass(rhs);
    rep.pass = rep.rel_l2_error <= rep.tolerance;
}

inline RealField intensity(const ComplexField& f) {
    RealField out(f.spec);
    for (size_t k = 0; k < f.samples.size(); ++k) out.samples[k] = std::norm(f.samples[k]);
    return out;
}

}  // namespace detail

inline IdentityReport verify_identity_spatial(const AnalyticBeam& beam, const ABCDMatrix& m,
                                              const VerifyConfig& cfg) {
    m.validate();
    IdentityReport rep;
    rep.check = "spatial";
    rep.matrix = m;
    rep.tolerance = cfg.tolerance;

    ComplexField psi = sample_beam(beam, cfg.field);
    RealField lhs =
        detail::intensity(propagate(psi, m, KernelVariant::SpatialSwapped, cfg.output));
    WignerTable tab = wigner(psi, cfg.sigma, cfg.gamma, cfg.override_size_cap);
    RadonResult rhs =
        radon_from_table(tab, strip_spatial(m), cfg.output, ExtrapolationPolicy::Lenient);

    detail::compare_fields(lhs, rhs.values, rep);
    rep.extrapolated_fraction = rhs.extrapolated_fraction;
    rep.warnings = sampling_diagnostics(m, cfg.field, cfg.output, KernelVariant::SpatialSwapped);
    rep.warnings.insert(rep.warnings.end(), rhs.warnings.begin(), rhs.warnings.end());
    rep.notes = "swapped-kernel output intensity vs (D, B) strip of the input Wigner table; " +
                std::to_string(rhs.extrapolated_fraction * 100) + "% of strip samples extrapolated";
    return rep;
}

inline IdentityReport verify_identity_frequency(const AnalyticBeam& beam, const ABCDMatrix& m,
                                                const VerifyConfig& cfg) {
    m.validate();
    IdentityReport rep;
    rep.check = "frequency";
    rep.matrix = m;
    rep.tolerance = cfg.tolerance;

    ComplexField psi = sample_beam(beam, cfg.field);
    ComplexField jrep = to_xi_rep(psi);
    RealField lhs = detail::intensity(propagate(jrep, m, KernelVariant::Frequency, cfg.output));
    WignerTable tab = wigner(psi, cfg.sigma, cfg.gamma, cfg.override_size_cap);
    RadonResult rhs =
        radon_from_table(tab, strip_frequency(m), cfg.output, ExtrapolationPolicy::Lenient);

    detail::compare_fields(lhs, rhs.values, rep);
    rep.extrapolated_fraction = rhs.extrapolated_fraction;
    rep.warnings = sampling_diagnostics(m, cfg.field, cfg.output, KernelVariant::Frequency);
    rep.warnings.insert(rep.warnings.end(), rhs.warnings.begin(), rhs.warnings.end());
    rep.notes =
        "xi-side intensity vs (A, C) strip of the input Wigner table; exact for beams whose xi "
        "representation is proportional to the position representation (centered Gaussians, pure "
        "angular modes); " +
        std::to_string(rhs.extrapolated_fraction * 100) + "% of strip samples extrapolated";
    return rep;
}

}  // namespace efresnel
