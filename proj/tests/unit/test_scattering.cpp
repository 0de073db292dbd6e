#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "kerrj/scattering.hpp"

using namespace kerrj;
using doctest::Approx;

namespace {

CavityParams sym(double u) {
    CavityParams p;
    p.u = u;
    return p;
}

} // namespace

TEST_CASE("single-photon amplitudes: closed-port and resonance cases") {
    auto s = single_amplitudes(sym(0), 0.0);
    CHECK(std::abs(s.c_L) < 1e-15);
    CHECK(std::abs(s.c_R - 1.0) < 1e-15);

    CavityParams closed;
    closed.gamma_R = 0;
    s = single_amplitudes(closed, 0.3);
    CHECK(s.c_R == cplx(0.0));
    CHECK(std::abs(s.c_L) == Approx(1.0).epsilon(1e-15));

    s = single_amplitudes(sym(0), 1.0);
    CHECK(std::norm(s.c_L) == Approx(0.5).epsilon(1e-14));
    CHECK(std::norm(s.c_R) == Approx(0.5).epsilon(1e-14));
}

TEST_CASE("single-photon unitarity over random parameters") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> D(-50, 50), G(0, 10);
    double worst = 0;
    for (int i = 0; i < 20000; ++i) {
        CavityParams p;
        p.gamma_L = G(rng);
        p.gamma_R = G(rng);
        if (i % 10 == 0) p.gamma_R = 0;
        if (p.gamma() == 0) continue;
        const auto s = single_amplitudes(p, D(rng));
        worst = std::max(worst, std::abs(std::norm(s.c_L) + std::norm(s.c_R) - 1.0));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("pair amplitude values") {
    for (Channel ch : {Channel::LL, Channel::RR, Channel::LR})
        for (double d : {0.0, 0.7, 3.0}) {
            const auto s = single_amplitudes(sym(0), 0.4);
            const cplx ci = ch == Channel::RR ? s.c_R : s.c_L;
            const cplx cj = ch == Channel::LL ? s.c_L : s.c_R;
            CHECK(pair_amplitude(sym(0), 0.4, ch, d) == ci * cj);
        }

    const cplx a = pair_amplitude(sym(4), 0.0, Channel::RR, 0.0);
    CHECK(std::abs(a - cplx(1, -4) / 17.0) < 1e-15);
    CHECK(std::norm(a) == Approx(1.0 / 17).epsilon(1e-14));

    double prev = 1;
    for (double u : {10.0, 100.0, 1e3, 1e4, 1e6}) {
        const double v = std::norm(pair_amplitude(sym(u), 0.0, Channel::RR, 0.0));
        CHECK(v < prev);
        prev = v;
    }
    CHECK(std::norm(pair_amplitude(sym(1e4), 0.0, Channel::RR, 0.0)) < 1e-3);
}

TEST_CASE("bound-state term decays at rate gamma") {
    CavityParams p;
    p.u = 3;
    p.gamma_L = 0.6;
    p.gamma_R = 1.4;
    for (Channel ch : {Channel::LL, Channel::RR, Channel::LR}) {
        const auto s = single_amplitudes(p, 0.9);
        const cplx ci = ch == Channel::RR ? s.c_R : s.c_L;
        const cplx cj = ch == Channel::LL ? s.c_L : s.c_R;
        // least-squares slope of log|a - c_i c_j| over d in [0, 6/gamma]
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (double d = 0; d <= 6.0 / p.gamma(); d += 0.05) {
            const double y = std::log(std::abs(pair_amplitude(p, 0.9, ch, d) - ci * cj));
            sx += d, sy += y, sxx += d * d, sxy += d * y, ++n;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        CHECK(-slope == Approx(p.gamma()).epsilon(0.01));
    }
}

TEST_CASE("pair spectral density: elastic weight and zero interaction") {
    const auto grid = linspace(-10, 10, 201);
    const auto r = pair_spectral_density(sym(0), 0.7, 5.0, Port::R, Port::L, grid);
    for (double v : r.continuous) CHECK(v == 0.0);
    CHECK(r.delta_weight == Approx(2 * std::norm(single_amplitudes(sym(0), 0.7).c_R) / 5.0).epsilon(1e-14));
    const auto same = pair_spectral_density(sym(0), 0.7, 5.0, Port::L, Port::L, grid);
    CHECK(same.delta_weight == Approx(2 * std::norm(single_amplitudes(sym(0), 0.7).c_L) / 5.0).epsilon(1e-14));
}

TEST_CASE("pair spectral density: reference value and symmetry") {
    const double tau = 3.0;
    const auto r = pair_spectral_density(sym(4), 0.0, tau, Port::R, Port::L, {0.0});
    CHECK(r.continuous[0] == Approx(128.0 / (17 * std::numbers::pi * tau * tau)).epsilon(1e-13));

    CavityParams p = sym(2.5);
    p.omega_c = 0.3;
    const double w0 = 1.1;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> W(-20, 20);
    for (int i = 0; i < 1000; ++i) {
        const double w = W(rng);
        const double a = fwm_density(p, w0, w), b = fwm_density(p, w0, 2 * w0 - w);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(a, b));
    }
}

TEST_CASE("pair spectral density: coupling weight loads through the input port twice") {
    CavityParams p;
    p.u = 2;
    p.gamma_L = 0.5;
    p.gamma_R = 1.5;
    const double g = p.gamma();
    const double F = pair_formation_probability(p, 0.2, 4.0);
    const auto rl = pair_spectral_density(p, 0.2, 4.0, Port::R, Port::L, {0.1});
    CHECK(rl.continuous[0] ==
          Approx(p.gamma_L * p.gamma_L * p.gamma_R / (g * g * g) * F * fwm_density(p, 0.2, 0.1)).epsilon(1e-14));
    const auto lr = pair_spectral_density(p, 0.2, 4.0, Port::L, Port::R, {0.1});
    CHECK(lr.continuous[0] ==
          Approx(p.gamma_R * p.gamma_R * p.gamma_L / (g * g * g) * F * fwm_density(p, 0.2, 0.1)).epsilon(1e-14));
}

TEST_CASE("monochromatic spectra report with tau factored out") {
    const auto r = pair_spectral_density(sym(4), 0.0, INFINITY, Port::R, Port::L, {0.0});
    CHECK(r.tau_factored_out);
    CHECK(r.continuous[0] == Approx(128.0 / (17 * std::numbers::pi)).epsilon(1e-13));
    CHECK(r.delta_weight == Approx(2.0).epsilon(1e-14));
}

TEST_CASE("integrated four-wave-mixing density matches the closed form") {
    // Brute-force quadrature with omega = omega_0 + tan(theta), which maps the
    // real line onto (-pi/2, pi/2) and absorbs the 1/omega^4 tails.
    for (double D : {-3.0, -0.5, 0.0, 1.0, 4.0}) {
        CavityParams p = sym(4);
        p.omega_c = 0.25;
        const double w0 = p.omega_c + D;
        const int n = 400000;
        const double a = -std::numbers::pi / 2, b = std::numbers::pi / 2, h = (b - a) / n;
        double s = 0;
        for (int k = 0; k < n; ++k) {
            const double th = a + (k + 0.5) * h;
            const double c = std::cos(th);
            s += fwm_density(p, w0, w0 + std::tan(th)) / (c * c);
        }
        s *= h;
        const double exact = 2 * std::numbers::pi * p.u * p.u * p.gamma() / (D * D + 1);
        CHECK(s == Approx(exact).epsilon(1e-4));
        CHECK(fwm_density_integral(p, w0) == Approx(exact).epsilon(1e-14));
    }
}

TEST_CASE("pair formation probability peaks near omega_c and omega_c + u") {
    CavityParams p = sym(8);
    p.omega_c = 1.0;
    const auto w = linspace(p.omega_c - 4, p.omega_c + 12, 16001);
    std::vector<double> maxima;
    for (std::size_t i = 1; i + 1 < w.size(); ++i) {
        const double a = pair_formation_probability(p, w[i - 1], 1), b = pair_formation_probability(p, w[i], 1),
                     c = pair_formation_probability(p, w[i + 1], 1);
        if (b > a && b > c) maxima.push_back(w[i]);
    }
    REQUIRE(maxima.size() == 2);
    CHECK(std::abs(maxima[0] - p.omega_c) < 0.25);
    CHECK(std::abs(maxima[1] - (p.omega_c + p.u)) < 0.25);
}

TEST_CASE("continuous spectrum ridges sit at omega_c and 2 omega_0 - omega_c") {
    CavityParams p = sym(4);
    const double w0 = p.omega_c + 6;
    const auto grid = linspace(w0 - 15, w0 + 15, 30001);
    const auto r = pair_spectral_density(p, w0, 1, Port::R, Port::L, grid);
    std::vector<double> maxima;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i)
        if (r.continuous[i] > r.continuous[i - 1] && r.continuous[i] > r.continuous[i + 1]) maxima.push_back(grid[i]);
    REQUIRE(maxima.size() == 2);
    // Overlapping Lorentzian tails pull each ridge inward by ~ gamma^2 / (2 Delta).
    CHECK(std::abs(maxima[0] - p.omega_c) < 0.1);
    CHECK(std::abs(maxima[1] - (2 * w0 - p.omega_c)) < 0.1);
}

TEST_CASE("default spectral grid") {
    const auto g = default_spectral_grid(sym(4), 1.0);
    CHECK(g.size() == 2001);
    CHECK(g.front() == Approx(-7.0));
    CHECK(g.back() == Approx(9.0));
    const auto g2 = default_spectral_grid(sym(1), 0.0);
    CHECK(g2.front() == Approx(-5.0));
}
