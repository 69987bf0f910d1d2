#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "oracles.hpp"

using namespace efresnel;

TEST_CASE("squeeze parameters of reference matrices") {
    SqueezeParams p = params_from_abcd({1, 1, 0, 1});
    CHECK(std::abs(p.k - cd(1, -0.5)) < 1e-15);
    CHECK(std::abs(p.t - cd(0, 0.5)) < 1e-15);

    SqueezeParams q = params_from_abcd({1, 0, -1, 1});
    CHECK(std::abs(q.k - cd(1, -0.5)) < 1e-15);
    CHECK(std::abs(q.t - cd(0, -0.5)) < 1e-15);
}

TEST_CASE("matrix <-> parameter round trips on random unimodular matrices") {
    std::mt19937 rng(20250816);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int trial = 0; trial < 200; ++trial) {
        cd t(u(rng), u(rng));
        double th = u(rng);
        cd k = std::sqrt(1.0 + std::norm(t)) * std::polar(1.0, th);
        ABCDMatrix m = abcd_from_params({k, t});
        m.validate();
        SqueezeParams back = params_from_abcd(m);
        CHECK(std::abs(back.k - k) < 1e-12);
        CHECK(std::abs(back.t - t) < 1e-12);
        ABCDMatrix m2 = abcd_from_params(back);
        CHECK(std::abs(m2.a - m.a) < 1e-12);
        CHECK(std::abs(m2.b - m.b) < 1e-12);
        CHECK(std::abs(m2.c - m.c) < 1e-12);
        CHECK(std::abs(m2.d - m.d) < 1e-12);
    }
}

TEST_CASE("invalid matrices and parameters are rejected") {
    CHECK_THROWS_AS(params_from_abcd({1, 1, 1, 1}), InvalidMatrix);
    CHECK_THROWS_AS((ABCDMatrix{2, 0, 0, 1}.validate()), InvalidMatrix);
    CHECK_THROWS_AS(abcd_from_params({cd(1, 0), cd(1, 0)}), InvalidParams);
    CHECK_NOTHROW((ABCDMatrix{1, 0, 0, 1}.validate()));
}

TEST_CASE("compose applies the first argument after the second") {
    ABCDMatrix m = compose(ABCDMatrix::free_space(1), ABCDMatrix::thin_lens(-1));
    CHECK(m.a == Catch::Approx(0.0).margin(1e-15));
    CHECK(m.b == Catch::Approx(1.0));
    CHECK(m.c == Catch::Approx(-1.0));
    CHECK(m.d == Catch::Approx(1.0));

    ABCDMatrix f2 = compose(ABCDMatrix::free_space(1), ABCDMatrix::free_space(1));
    CHECK(f2.b == Catch::Approx(2.0));
}

TEST_CASE("grid cells are centered and even-sized") {
    GridSpec g(4, 2.0);
    CHECK(g.h() == Catch::Approx(1.0));
    CHECK(g.x(0) == Catch::Approx(-1.5));
    CHECK(g.x(3) == Catch::Approx(1.5));

    CHECK_THROWS_AS(GridSpec(5, 2.0), InvalidGrid);
    CHECK_THROWS_AS(GridSpec(0, 2.0), InvalidGrid);
    CHECK_THROWS_AS(GridSpec(8, -1.0), InvalidGrid);
}

TEST_CASE("beam evaluation") {
    AnalyticBeam g = AnalyticBeam::gaussian({0.5, 0}, 2.0);
    CHECK(std::abs(g.eval({0.5, 0}) - 1.0) < 1e-15);

    AnalyticBeam a1 = AnalyticBeam::angular_mode(1);
    cd v = a1.eval({0, 1});  // r=1, theta=pi/2: i * e^{-1/2}
    CHECK(std::abs(v - cd(0, std::exp(-0.5))) < 1e-15);

    AnalyticBeam a2 = AnalyticBeam::angular_mode(-2, 1.5);
    cd w = a2.eval({1, 1});
    double r2 = 2.0;
    cd expect = (r2 / 2.25) * std::exp(-r2 / 4.5) * std::polar(1.0, -2 * (pi / 4));
    CHECK(std::abs(w - expect) < 1e-14);

    AnalyticBeam sup = AnalyticBeam::superposition({{cd(0.3, -0.2), g}, {cd(1.1, 0), a1}});
    cd s = sup.eval({0.2, 0.7});
    CHECK(std::abs(s - (cd(0.3, -0.2) * g.eval({0.2, 0.7}) + 1.1 * a1.eval({0.2, 0.7}))) < 1e-15);

    CHECK_THROWS_AS(AnalyticBeam::gaussian({0, 0}, -1.0), InvalidParams);
    CHECK_THROWS_AS(AnalyticBeam::superposition({}), InvalidParams);
}

TEST_CASE("unit gaussian norm is pi") {
    ComplexField f = sample_beam(AnalyticBeam::gaussian(), GridSpec(128, 8.0));
    CHECK(std::abs(field_norm_sq(f) - pi) < 1e-6);
}

TEST_CASE("norm error stays at rounding level as the grid refines") {
    // midpoint quadrature of a smooth, well-truncated Gaussian converges
    // faster than exponentially; all three errors sit at FP noise
    double prev = 1.0;
    for (int n : {32, 64, 128}) {
        ComplexField f = sample_beam(AnalyticBeam::gaussian(), GridSpec(n, 6.0));
        double err = std::abs(field_norm_sq(f) - pi);
        CHECK(err < 1e-12);
        CHECK(err <= prev + 1e-13);
        prev = err;
    }
}

TEST_CASE("pairwise sum equals sequential sum") {
    std::vector<double> v(1000);
    for (size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.1 * double(i));
    double seq = 0;
    for (double x : v) seq += x;
    CHECK(pairwise_sum(v) == Catch::Approx(seq).epsilon(1e-13));
}

TEST_CASE("parallel_for covers every index exactly once") {
    std::vector<int> hits(10007, 0);
    parallel_for(hits.size(), [&](size_t i) { hits[i] += int(i % 7) + 1; });
    for (size_t i = 0; i < hits.size(); ++i) REQUIRE(hits[i] == int(i % 7) + 1);
}

TEST_CASE("sampling diagnostics: benign free-space setup is quiet") {
    GridSpec g(256, 6.0);
    auto w = sampling_diagnostics({1, 1, 0, 1}, g, g);
    CHECK(w.empty());
}

TEST_CASE("sampling diagnostics: short propagation on a coarse grid undersamples the chirp") {
    GridSpec g(64, 6.0);
    auto w = sampling_diagnostics({1, 0.05, 0, 1}, g, g);
    REQUIRE(!w.empty());
    bool found = false;
    for (const auto& x : w)
        if (x.code == Warning::Code::ChirpUndersampled) {
            found = true;
            CHECK(x.worst_cell_phase > pi);
        }
    CHECK(found);
}

TEST_CASE("sampling diagnostics: near-singular coupling") {
    GridSpec g(64, 6.0);
    auto w = sampling_diagnostics({1, 1e-9, 0, 1}, g, g);
    REQUIRE(w.size() == 1);
    CHECK(w[0].code == Warning::Code::NearSingularB);

    auto wf = sampling_diagnostics({1, 1, 1e-9, 1.000000001}, g, g, KernelVariant::Frequency);
    REQUIRE(wf.size() == 1);
    CHECK(wf[0].code == Warning::Code::NearSingularC);
}

TEST_CASE("sampling diagnostics: magnifying system outruns the output window") {
    GridSpec gin(256, 6.0), gout(256, 6.0);
    auto w = sampling_diagnostics({2, 1, 1, 1}, gin, gout);
    bool found = false;
    for (const auto& x : w)
        if (x.code == Warning::Code::TruncationLoss) found = true;
    CHECK(found);
}
