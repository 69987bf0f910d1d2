#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace efresnel;

namespace {

WignerTable synthetic_gauss_table(const GridSpec& sg, const GridSpec& gg) {
    WignerTable tab(sg, gg);
    for (int a = 0; a < sg.n; ++a)
        for (int b = 0; b < sg.n; ++b)
            for (int c = 0; c < gg.n; ++c)
                for (int d = 0; d < gg.n; ++d)
                    tab.at(a, b, c, d) =
                        oracles::gauss_wigner(cd(sg.x(a), sg.x(b)), cd(gg.x(c), gg.x(d)));
    return tab;
}

// unfactorized double loop straight from the definition
RealField brute_direct(const ComplexField& psi, double p, double q, const GridSpec& out_spec) {
    RealField out(out_spec);
    for (int u = 0; u < out_spec.n; ++u)
        for (int v = 0; v < out_spec.n; ++v) {
            double e1 = out_spec.x(u), e2 = out_spec.x(v);
            cd acc = 0;
            for (int i = 0; i < psi.spec.n; ++i)
                for (int j = 0; j < psi.spec.n; ++j) {
                    double s1 = psi.spec.x(i), s2 = psi.spec.x(j);
                    double norm_s = s1 * s1 + s2 * s2;
                    acc += psi.at(i, j) *
                           std::polar(1.0, (p * norm_s - 2 * (e1 * s1 + e2 * s2)) / (2 * q));
                }
            out.at(u, v) = std::norm(acc * psi.spec.cell_area() / (2 * q * pi));
        }
    return out;
}

}  // namespace

TEST_CASE("strip transform of an exact gaussian table hits the closed form") {
    GridSpec tg(32, 4.8), og(6, 1.8);
    WignerTable tab = synthetic_gauss_table(tg, tg);
    RadonResult res = radon_from_table(tab, {1, 1}, og);  // strict policy by default

    CHECK(res.extrapolated_fraction > 0.1);
    CHECK(res.extrapolated_fraction < 0.2);

    double worst = 0;
    for (int u = 0; u < og.n; ++u)
        for (int v = 0; v < og.n; ++v) {
            cd eta(og.x(u), og.x(v));
            if (std::abs(eta) > 2.0) continue;
            double expect = oracles::gauss_radon(1, 1, eta);
            worst = std::max(worst, std::abs(res.values.at(u, v) - expect) / expect);
        }
    CHECK(worst < 1e-12);
}

TEST_CASE("table route equals the direct route for a displaced beam") {
    GridSpec fg(64, 4.8), tg(32, 4.8), og(6, 1.8);
    ComplexField psi = sample_beam(AnalyticBeam::gaussian({0.4, 0.2}), fg);
    WignerTable tab = wigner(psi, tg, tg);

    RadonResult from_table = radon_from_table(tab, {1, 1}, og);
    RealField direct = radon_direct(psi, 1, 1, og);
    CHECK(oracles::rel_linf(from_table.values.samples, direct.samples) < 1e-6);

    // named wrappers pick the right coefficient pairs
    RealField sp = radon_direct_spatial(psi, {1, 1, 0, 1}, og);
    RealField fq = radon_direct_frequency(psi, {1, 0, 1, 1}, og);
    for (size_t k = 0; k < direct.samples.size(); ++k) {
        CHECK(sp.samples[k] == direct.samples[k]);
        CHECK(fq.samples[k] == direct.samples[k]);
    }
}

TEST_CASE("table route error keeps shrinking on the refined grids") {
    GridSpec fg(96, 4.8), tg(48, 4.8), og(8, 1.6);
    ComplexField psi = sample_beam(AnalyticBeam::gaussian({0.4, 0.2}), fg);
    WignerTable tab = wigner(psi, tg, tg);
    RadonResult from_table = radon_from_table(tab, {1, 1}, og);
    RealField direct = radon_direct(psi, 1, 1, og);
    CHECK(oracles::rel_linf(from_table.values.samples, direct.samples) < 1e-6);
}

TEST_CASE("strip transform conserves mass on a wide output window") {
    GridSpec fg(64, 4.8), sg(32, 4.8), gg(32, 4.3), og(20, 8.0);
    ComplexField psi = sample_beam(AnalyticBeam::gaussian(), fg);
    WignerTable tab = wigner(psi, sg, gg);
    RadonResult res = radon_from_table(tab, {1, 3}, og);

    CHECK(res.extrapolated_fraction == 0.0);

    double mass = 0, peak = 0;
    for (double v : res.values.samples) {
        mass += v;
        peak = std::max(peak, v);
    }
    mass *= og.cell_area();
    CHECK(std::abs(mass - field_norm_sq(psi)) / field_norm_sq(psi) < 2e-2);
    CHECK(peak > 0.09);
    CHECK(peak < 0.10);
}

TEST_CASE("degenerate strips and runaway extrapolation are refused") {
    GridSpec tg(16, 3.2), og(6, 1.8);
    WignerTable tab = synthetic_gauss_table(tg, tg);
    CHECK_THROWS_AS(radon_from_table(tab, {1, 1e-10}, og), DegenerateStrip);

    ComplexField psi = sample_beam(AnalyticBeam::gaussian(), GridSpec(16, 3.2));
    CHECK_THROWS_AS(radon_direct(psi, 1, 1e-10, og), DegenerateStrip);

    WignerTable narrow = synthetic_gauss_table(GridSpec(32, 4.8), GridSpec(8, 0.8));
    CHECK_THROWS_AS(radon_from_table(narrow, {1, 1}, og), ExcessiveExtrapolation);
    RadonResult lenient = radon_from_table(narrow, {1, 1}, og, ExtrapolationPolicy::Lenient);
    REQUIRE(!lenient.warnings.empty());
    CHECK(lenient.warnings[0].code == Warning::Code::TruncationLoss);
    CHECK(lenient.extrapolated_fraction > 0.2);
}

TEST_CASE("separable direct transform matches the unfactorized loop") {
    GridSpec fg(16, 3.0), og(8, 2.0);
    ComplexField psi = sample_beam(
        AnalyticBeam::superposition({{cd(1, 0), AnalyticBeam::gaussian({0.3, -0.2})},
                                     {cd(0.2, 0.5), AnalyticBeam::angular_mode(1)}}),
        fg);
    RealField fast = radon_direct(psi, 0.5, 0.5, og);
    RealField lit = brute_direct(psi, 0.5, 0.5, og);
    CHECK(oracles::rel_linf(fast.samples, lit.samples) < 1e-10);
}

TEST_CASE("direct transform of the unit gaussian hits the closed form") {
    GridSpec fg(64, 6.0), og(16, 2.0);
    ComplexField psi = sample_beam(AnalyticBeam::gaussian(), fg);
    RealField got = radon_direct(psi, 1, 1, og);
    std::vector<double> expect(got.samples.size());
    for (int u = 0; u < og.n; ++u)
        for (int v = 0; v < og.n; ++v)
            expect[size_t(u) * og.n + v] = oracles::gauss_radon(1, 1, cd(og.x(u), og.x(v)));
    CHECK(oracles::rel_linf(got.samples, expect) < 1e-6);
}

TEST_CASE("direct transform equals the swapped-kernel intensity of the conjugate field") {
    GridSpec fg(64, 6.0);
    ComplexField psi = sample_beam(
        AnalyticBeam::superposition({{cd(1, 0), AnalyticBeam::gaussian({0.5, 0.25})},
                                     {cd(0, 0.6), AnalyticBeam::angular_mode(2)}}),
        fg);
    ComplexField conj_psi(fg);
    for (size_t k = 0; k < psi.samples.size(); ++k) conj_psi.samples[k] = std::conj(psi.samples[k]);

    const ABCDMatrix m{1, 0.5, -1, 0.5};
    RealField lhs = oracles::intensity(propagate(conj_psi, m, KernelVariant::SpatialSwapped));
    RealField rhs = radon_direct_spatial(psi, m, fg);
    CHECK(oracles::rel_linf(lhs.samples, rhs.samples) < 1e-8);
}

TEST_CASE("frequency-side strip orientation") {
    // the production pairing makes the frequency identity exact for beams
    // whose xi representation is proportional to the position representation;
    // a displaced beam leaves that family and the two sides part ways, while
    // the table route still reproduces the direct route for any beam
    VerifyConfig cfg;
    cfg.field = GridSpec(128, 6.4);
    cfg.sigma = GridSpec(32, 3.2);
    cfg.gamma = GridSpec(32, 3.2);
    cfg.output = GridSpec(16, 3.2);
    cfg.tolerance = 2e-2;
    const ABCDMatrix m{1, 0, 1, 1};

    IdentityReport centered = verify_identity_frequency(AnalyticBeam::angular_mode(2), m, cfg);
    CHECK(centered.pass);
    CHECK(centered.rel_l2_error < 5e-3);

    IdentityReport displaced =
        verify_identity_frequency(AnalyticBeam::gaussian({0.5, 0.25}), m, cfg);
    CHECK(!displaced.pass);
    CHECK(displaced.rel_l2_error > 0.1);

    GridSpec fg2(64, 4.8), tg2(32, 4.8), og2(6, 1.8);
    ComplexField psi = sample_beam(AnalyticBeam::gaussian({0.5, 0.25}), fg2);
    WignerTable tab = wigner(psi, tg2, tg2);
    RadonResult via_table = radon_from_table(tab, strip_frequency(m), og2);
    RealField direct = radon_direct_frequency(psi, m, og2);
    CHECK(oracles::rel_linf(via_table.values.samples, direct.samples) < 1e-6);
}

TEST_CASE("verification reports are invariant under composing with the identity") {
    VerifyConfig cfg;
    cfg.field = GridSpec(64, 4.8);
    cfg.sigma = GridSpec(16, 2.4);
    cfg.gamma = GridSpec(16, 2.4);
    cfg.output = GridSpec(8, 1.6);
    cfg.tolerance = 5e-2;
    const ABCDMatrix m{1, 1, 0, 1};

    IdentityReport r1 = verify_identity_spatial(AnalyticBeam::gaussian(), m, cfg);
    IdentityReport r2 =
        verify_identity_spatial(AnalyticBeam::gaussian(), compose(m, ABCDMatrix::identity()), cfg);
    CHECK(r1.rel_l2_error == r2.rel_l2_error);
    CHECK(r1.rel_linf_error == r2.rel_linf_error);
    CHECK(r1.lhs_norm == r2.lhs_norm);
    CHECK(r1.rhs_norm == r2.rhs_norm);
}
