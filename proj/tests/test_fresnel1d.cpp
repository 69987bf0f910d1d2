#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include <efresnel/fresnel1d.hpp>

using namespace efresnel;

namespace {

std::vector<cd> gauss_line(const GridSpec& g) {
    std::vector<cd> f(g.n);
    for (int j = 0; j < g.n; ++j) f[j] = std::exp(-0.5 * g.x(j) * g.x(j));
    return f;
}

double norm_line(const std::vector<cd>& f, const GridSpec& g) {
    double acc = 0;
    for (const cd& v : f) acc += std::norm(v);
    return acc * g.h();
}

}  // namespace

TEST_CASE("1d kernel at the origin of unit free space") {
    cd k = kernel_1d({1, 1, 0, 1}, 0.0, 0.0);
    CHECK(std::abs(k.real() - 0.2820947917738781) < 1e-15);
    CHECK(std::abs(k.imag() + 0.2820947917738781) < 1e-15);
}

TEST_CASE("1d kernel refuses near-zero coupling") {
    CHECK_THROWS_AS(kernel_1d({1, 1e-10, 0, 1}, 0.0, 0.0), SingularB);
    CHECK_THROWS_AS(propagate_1d({cd(1), cd(1)}, GridSpec(2, 1.0), {1, 1e-10, 0, 1}, GridSpec(2, 1.0)),
                    SingularB);
}

TEST_CASE("gaussian through unit free space: intensity and norm") {
    GridSpec g(512, 10.0);
    std::vector<cd> psi = gauss_line(g);
    std::vector<cd> phi = propagate_1d(psi, g, {1, 1, 0, 1}, g);

    std::vector<double> got(g.n), expect(g.n);
    for (int j = 0; j < g.n; ++j) {
        got[j] = std::norm(phi[j]);
        expect[j] = std::exp(-0.5 * g.x(j) * g.x(j)) / std::sqrt(2.0);
    }
    CHECK(oracles::rel_l2(got, expect) < 1e-6);
    CHECK(std::abs(norm_line(phi, g) / norm_line(psi, g) - 1.0) < 1e-6);
}

TEST_CASE("short-distance limit approaches the identity once the chirp is resolved") {
    GridSpec g(16384, 3.0);
    std::vector<cd> psi = gauss_line(g);
    std::vector<cd> phi = propagate_1d(psi, g, {1, 1e-3, 0, 1}, g);
    CHECK(oracles::rel_l2(phi, psi) < 5e-2);
}

TEST_CASE("two unit free-space hops equal one double hop") {
    GridSpec g(512, 12.0);
    std::vector<cd> psi = gauss_line(g);
    ABCDMatrix hop = ABCDMatrix::free_space(1.0);
    std::vector<cd> two = propagate_1d(propagate_1d(psi, g, hop, g), g, hop, g);
    std::vector<cd> one = propagate_1d(psi, g, ABCDMatrix::free_space(2.0), g);
    CHECK(oracles::rel_l2(two, one) < 1e-3);
}

TEST_CASE("1d wigner table of the unit gaussian") {
    GridSpec g(256, 8.0);
    std::vector<cd> psi = gauss_line(g);

    std::vector<double> nus(25);
    for (int a = 0; a < 25; ++a) nus[a] = -3.0 + 0.25 * a;
    Table1D tab = wigner_1d(psi, g, nus);

    // shape: (1/sqrt(pi)) e^{-x^2 - nu^2}, deviation relative to the peak
    double peak = 1.0 / std::sqrt(pi), worst = 0;
    for (int a = 0; a < 25; ++a)
        for (int j = 0; j < g.n; ++j) {
            double expect = peak * std::exp(-nus[a] * nus[a] - g.x(j) * g.x(j));
            worst = std::max(worst, std::abs(tab.at(a, j) - expect));
        }
    CHECK(worst / peak < 1e-3);
}

TEST_CASE("1d wigner frequency marginal reproduces the intensity") {
    GridSpec g(256, 8.0);
    std::vector<cd> psi = gauss_line(g);

    int nn = 512;
    double dnu = pi / (2 * g.L);
    std::vector<double> nus(nn);
    for (int a = 0; a < nn; ++a) nus[a] = (a - nn / 2 + 0.5) * dnu;
    Table1D tab = wigner_1d(psi, g, nus);

    int jx = 133;  // x ~ 0.344
    double acc = 0;
    for (int a = 0; a < nn; ++a) acc += tab.at(a, jx);
    acc *= dnu;
    double expect = std::exp(-g.x(jx) * g.x(jx));
    CHECK(std::abs(acc - expect) < 2e-3);
}
