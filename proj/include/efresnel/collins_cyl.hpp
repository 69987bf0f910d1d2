#pragma once

#include "radon.hpp"

namespace efresnel {

// ---------------------------------------------------------------------------
// Bessel function of the first kind, integer order.
//
// Power series below |x| = 12 (alternating terms stay tame there); Miller
// downward recurrence above, normalized by J0 + 2 sum J_{2k} = 1. The naive
// series at x = 50 cancels catastrophically (peak term ~ 1e19), hence the
// split.

inline double bessel_j(int s, double x) {
    if (std::abs(x) > 1e4) throw DomainError("bessel_j: |x| > 1e4 not supported");
    if (std::abs(s) > 64) throw DomainError("bessel_j: |s| > 64 not supported");

    double sign = 1;
    if (s < 0) {
        s = -s;
        if (s % 2) sign = -sign;
    }
    if (x < 0) {
        x = -x;
        if (s % 2) sign = -sign;
    }
    if (x == 0) return s == 0 ? sign : 0.0;

    if (x < 12.0) {
        double half = 0.5 * x;
        double term = 1.0;
        for (int k = 1; k <= s; ++k) term *= half / k;  // (x/2)^s / s!
        double sum = term;
        double q = half * half;
        for (int k = 1; k < 200; ++k) {
            term *= -q / (double(k) * (s + k));
            sum += term;
            if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-300)) break;
        }
        return sign * sum;
    }

    int big = std::max(s, int(std::ceil(x)));
    int start = big + 20 + int(std::ceil(std::sqrt(40.0 * big)));
    if (start % 2) ++start;

    double jp = 0.0, jc = 1e-30, target = (s == start) ? jc : 0.0;
    double even_sum = 0.0;
    for (int k = start; k >= 1; --k) {
        double jm = (2.0 * k / x) * jc - jp;
        jp = jc;
        jc = jm;
        int order = k - 1;
        if (order == s) target = jc;
        if (order >= 2 && order % 2 == 0) even_sum += 2.0 * jc;
        if (std::abs(jc) > 1e250) {  // rescale to dodge overflow; ratios are all that matter
            jp *= 1e-250;
            jc *= 1e-250;
            target *= 1e-250;
            even_sum *= 1e-250;
        }
    }
    double norm = jc + even_sum;  // jc now holds J0
    return sign * target / norm;
}

// ---------------------------------------------------------------------------
// Angular mode decomposition on a uniform radial grid r_i = (i+1) R / n_r.
// The grid starts one step away from the axis, where polar sampling of a
// square-lattice field is ill-conditioned anyway.

struct RadialModes {
    int n_r = 0;
    double R = 0;
    int s_max = 0;
    std::vector<std::vector<cd>> modes;  // index s + s_max

    double h_r() const { return R / n_r; }
    double r(int i) const { return (i + 1) * h_r(); }

    std::vector<cd>& mode(int s) { return modes[size_t(s + s_max)]; }
    const std::vector<cd>& mode(int s) const { return modes[size_t(s + s_max)]; }
};

inline int default_theta_count(int s_max) { return 4 * s_max + 16; }

// psi_s(r) = (1/2pi) integral e^{-i s theta} psi(r e^{i theta}) dtheta,
// trapezoid on n_theta equispaced angles (periodic, so spectrally accurate),
// bilinear field sampling with zero outside the window.
inline RadialModes angular_decompose(const ComplexField& f, int s_max, int n_r, double R,
                                     int n_theta = 0) {
    f.spec.validate();
    if (s_max < 0 || n_r <= 0 || !(R > 0)) throw InvalidParams("angular_decompose: bad mode-grid parameters");
    if (n_theta <= 0) n_theta = default_theta_count(s_max);
    if (n_theta < 2 * s_max + 1)
        throw InvalidParams("angular_decompose: n_theta too small to resolve s_max");

    RadialModes out;
    out.n_r = n_r;
    out.R = R;
    out.s_max = s_max;
    out.modes.assign(size_t(2 * s_max + 1), std::vector<cd>(n_r, cd(0)));

    std::vector<double> ct(n_theta), st(n_theta);
    for (int t = 0; t < n_theta; ++t) {
        double th = 2 * pi * t / n_theta;
        ct[t] = std::cos(th);
        st[t] = std::sin(th);
    }
    parallel_for(size_t(n_r), [&](size_t i) {
        double rv = out.r(int(i));
        std::vector<cd> ring(n_theta);
        for (int t = 0; t < n_theta; ++t)
            ring[t] = detail::interp_plane(f, rv * ct[t], rv * st[t]);
        for (int s = -s_max; s <= s_max; ++s) {
            cd acc = 0;
            for (int t = 0; t < n_theta; ++t)
                acc += ring[t] * std::polar(1.0, -s * (2 * pi * t / n_theta));
            out.modes[size_t(s + s_max)][i] = acc / double(n_theta);
        }
    });
    return out;
}

// psi(eta) = sum_s psi_s(|eta|) e^{i s arg(eta)}; radial linear interpolation,
// zero beyond R. Inside the first node only s = 0 extrapolates (other modes
// vanish like r^|s| at the axis).
inline ComplexField angular_reconstruct(const RadialModes& modes, const GridSpec& spec) {
    spec.validate();
    if (modes.n_r < 2) throw InvalidParams("angular_reconstruct: need at least two radial nodes");
    ComplexField out(spec);
    double hr = modes.h_r();
    parallel_for(size_t(spec.n) * spec.n, [&](size_t cell) {
        int i = int(cell) / spec.n, j = int(cell) % spec.n;
        cd eta(spec.x(i), spec.x(j));
        double rv = std::abs(eta), th = std::arg(eta);
        cd acc = 0;
        for (int s = -modes.s_max; s <= modes.s_max; ++s) {
            const auto& ms = modes.mode(s);
            cd val;
            if (rv > modes.R) {
                val = 0;
            } else if (rv < modes.r(0)) {
                val = (s == 0) ? ms[0] + (rv - modes.r(0)) / hr * (ms[1] - ms[0]) : cd(0);
            } else {
                double u = rv / hr - 1.0;
                int k = std::min(int(std::floor(u)), modes.n_r - 2);
                double frac = u - k;
                val = ms[k] + frac * (ms[k + 1] - ms[k]);
            }
            acc += val * std::polar(1.0, s * th);
        }
        out.samples[cell] = acc;
    });
    return out;
}

inline double mode_energy(const RadialModes& modes, int s) {
    const auto& ms = modes.mode(s);
    std::vector<double> terms(ms.size());
    for (size_t i = 0; i < ms.size(); ++i) terms[i] = std::norm(ms[i]) * modes.r(int(i));
    return 2 * pi * modes.h_r() * pairwise_sum(terms);
}

inline double total_energy(const RadialModes& modes) {
    double acc = 0;
    for (int s = -modes.s_max; s <= modes.s_max; ++s) acc += mode_energy(modes, s);
    return acc;
}

// ---------------------------------------------------------------------------
// Radial transform of a single angular mode:
//   phi_s(r') = (i^s / 2iB) e^{iD r'^2/2B} sum_r e^{iA r^2/2B} J_s(-r r'/B)
//               psi_s(r) 2 r h_r
// The i^s comes from integrating e^{i s u} e^{-i z cos u} over a period.

inline std::vector<cd> collins_radial(const std::vector<cd>& psi_s, int s, int n_r, double R,
                                      const ABCDMatrix& m) {
    m.validate();
    if (psi_s.size() != size_t(n_r) || n_r <= 0 || !(R > 0))
        throw InvalidParams("collins_radial: bad radial grid");
    if (std::abs(m.b) < singular_threshold) throw SingularB("collins_radial: |B| below 1e-9");

    double hr = R / n_r, inv_b = 1.0 / m.b;
    std::vector<cd> weighted(n_r);
    std::vector<double> rs(n_r);
    for (int i = 0; i < n_r; ++i) {
        rs[i] = (i + 1) * hr;
        weighted[i] = std::polar(1.0, 0.5 * m.a * rs[i] * rs[i] * inv_b) * psi_s[i] * 2.0 * rs[i] * hr;
    }
    int q = ((s % 4) + 4) % 4;
    cd is = q == 0 ? cd(1, 0) : q == 1 ? cd(0, 1) : q == 2 ? cd(-1, 0) : cd(0, -1);
    cd pref = is / cd(0, 2 * m.b);

    std::vector<cd> out(n_r);
    parallel_for(size_t(n_r), [&](size_t k) {
        double rp = rs[k];
        std::vector<cd> terms(n_r);
        for (int i = 0; i < n_r; ++i) terms[i] = bessel_j(s, -rs[i] * rp * inv_b) * weighted[i];
        out[k] = pref * std::polar(1.0, 0.5 * m.d * rp * rp * inv_b) * pairwise_sum(terms);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Consistency of the radial route against the full 2D engine, mode by mode.

struct HankelConfig {
    GridSpec field;
    int n_r = 128;
    double R = 0;  // 0 -> field.L
    int s_max = 2;
    int n_theta = 0;  // 0 -> 4 s_max + 16
    double tolerance = 2e-3;
    double energy_cut = 1e-6;  // modes below this fraction of total are skipped
};

inline IdentityReport verify_hankel_consistency(const AnalyticBeam& beam, const ABCDMatrix& m,
                                                const HankelConfig& cfg) {
    m.validate();
    double R = cfg.R > 0 ? cfg.R : cfg.field.L;

    IdentityReport rep;
    rep.check = "hankel";
    rep.matrix = m;
    rep.tolerance = cfg.tolerance;

    ComplexField psi = sample_beam(beam, cfg.field);
    ComplexField out2d = propagate(psi, m, KernelVariant::Spatial);
    RadialModes mi = angular_decompose(psi, cfg.s_max, cfg.n_r, R, cfg.n_theta);
    RadialModes mo = angular_decompose(out2d, cfg.s_max, cfg.n_r, R, cfg.n_theta);

    double tot = total_energy(mi);
    rep.pass = true;
    double worst = 0;
    for (int s = -cfg.s_max; s <= cfg.s_max; ++s) {
        if (mode_energy(mi, s) <= cfg.energy_cut * tot) continue;
        std::vector<cd> phi = collins_radial(mi.mode(s), s, cfg.n_r, R, m);
        const auto& ref = mo.mode(s);
        std::vector<double> num(cfg.n_r), den(cfg.n_r);
        for (int i = 0; i < cfg.n_r; ++i) {
            num[i] = std::norm(phi[i] - ref[i]) * mi.r(i);
            den[i] = std::norm(ref[i]) * mi.r(i);
        }
        double err = std::sqrt(pairwise_sum(num) / pairwise_sum(den));
        rep.per_mode.push_back({s, err});
        worst = std::max(worst, err);
        if (err > cfg.tolerance) rep.pass = false;
        rep.lhs_norm += mode_energy(mo, s);
        double phie = 0;
        for (int i = 0; i < cfg.n_r; ++i) phie += std::norm(phi[i]) * mi.r(i);
        rep.rhs_norm += 2 * pi * mi.h_r() * phie;
    }
    rep.rel_l2_error = worst;
    rep.rel_linf_error = worst;
    rep.warnings = sampling_diagnostics(m, cfg.field, cfg.field, KernelVariant::Spatial);
    rep.notes = std::to_string(rep.per_mode.size()) + " active angular mode(s) compared out of " +
                std::to_string(2 * cfg.s_max + 1);
    return rep;
}

}  // namespace efresnel
