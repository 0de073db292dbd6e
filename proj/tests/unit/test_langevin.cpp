#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "kerrj/langevin.hpp"

using namespace kerrj;
using doctest::Approx;

namespace {

CavityParams kerr(double u) {
    CavityParams p;
    p.u = u;
    return p;
}

// Positive roots of the mean-field cubic found by sign changes on a fine grid.
int count_roots_by_bracketing(const CavityParams& p, double w0, double f2, double n_max) {
    const double D = w0 - p.omega_c, g = p.gamma();
    auto q = [&](double n) { return n * (g * g + (D - 2 * p.u * n) * (D - 2 * p.u * n)) - f2; };
    int count = 0;
    const int N = 200000;
    for (int i = 0; i < N; ++i) {
        const double a = n_max * i / N, b = n_max * (i + 1) / N;
        if ((q(a) < 0) != (q(b) < 0)) ++count;
    }
    return count;
}

} // namespace

TEST_CASE("linear cavity has the single root |f|^2 / (Delta^2 + gamma^2)") {
    const auto s = steady_amplitude(kerr(0), 0.7, cplx(0.3, 0.1));
    REQUIRE(s.n_bar.size() == 1);
    CHECK(s.n() == Approx(0.1 / (0.49 + 1)).epsilon(1e-14));
    CHECK(std::abs(s.alpha() - cplx(0.3, 0.1) / cplx(0.7, 1)) < 1e-15);
    CHECK_FALSE(s.multiple);
}

TEST_CASE("zero drive gives the vacuum") {
    const auto s = steady_amplitude(kerr(4), -1, 0.0);
    CHECK(s.n() == 0.0);
    CHECK(s.alpha() == cplx(0.0));
}

TEST_CASE("weak red-detuned drive stays on a single branch") {
    const auto s = steady_amplitude(kerr(4), -4, 0.1002);
    REQUIRE(s.n_bar.size() == 1);
    CHECK(s.n() == Approx(5.9e-4).epsilon(0.01));
    CHECK(drive_for_population(kerr(4), -4, 5.9e-4) == Approx(0.10026).epsilon(1e-4));
}

TEST_CASE("bistable window reports three roots") {
    const CavityParams p = kerr(4);
    const double w0 = 4;  // blue detuned: the Kerr shift walks the resonance into the drive
    int found = 0;
    for (double f = 0.05; f < 3; f += 0.01) {
        const auto s = steady_amplitude(p, w0, f);
        const int brute = count_roots_by_bracketing(p, w0, f * f, 2.0);
        CHECK(static_cast<int>(s.n_bar.size()) == brute);
        if (brute == 3) {
            ++found;
            CHECK(s.multiple);
            CHECK(s.selected == 0);
            CHECK(s.n_bar[0] < s.n_bar[1]);
            CHECK(s.n_bar[1] < s.n_bar[2]);
        }
    }
    CHECK(found > 0);
}

TEST_CASE("reported roots satisfy the cubic") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-10, 10), G(0.1, 3), F(0, 5);
    for (int i = 0; i < 2000; ++i) {
        CavityParams p;
        p.u = U(rng);
        p.gamma_L = G(rng);
        p.gamma_R = G(rng);
        const double w0 = U(rng);
        const cplx f(F(rng), F(rng) - 2.5);
        const auto s = steady_amplitude(p, w0, f);
        REQUIRE_FALSE(s.n_bar.empty());
        for (std::size_t k = 0; k < s.n_bar.size(); ++k) {
            CHECK(cubic_residual(p, w0, f, s.n_bar[k]) < 1e-10);
            CHECK(std::norm(s.roots[k]) == Approx(s.n_bar[k]).epsilon(1e-9));
        }
    }
}

TEST_CASE("population grows monotonically with drive off the bistable window") {
    double prev = -1;
    for (double f = 0; f < 2; f += 0.01) {
        const double n = steady_amplitude(kerr(4), -4, f).n();
        CHECK(n > prev);
        prev = n;
    }
}

TEST_CASE("linearization") {
    const auto s0 = steady_amplitude(kerr(0), 1.5, 0.2);
    const auto L0 = linearize(kerr(0), 1.5, s0);
    CHECK(L0.A(0, 0) == -1);
    CHECK(L0.A(0, 1) == 1.5);
    CHECK(L0.A(1, 0) == -1.5);
    CHECK(L0.stable);
    CHECK(L0.D.norm() == 0.0);
    for (int i = 0; i < 2; ++i) {
        CHECK(L0.eigenvalues[i].real() == Approx(-1));
        CHECK(std::abs(L0.eigenvalues[i].imag()) == Approx(1.5));
    }

    const auto s = steady_amplitude(kerr(4), -4, 0.1002);
    const auto L = linearize(kerr(4), -4, s);
    CHECK(L.A.trace() == Approx(-2.0));
    CHECK(L.stable);
    CHECK(std::abs(L.D(0, 0)) == Approx(8 * s.n()).epsilon(1e-12));
    // Noise of (r, theta) is symmetric because D is diagonal.
    CHECK((L.noise - L.noise.transpose()).norm() < 1e-14);
}

TEST_CASE("analytic spectrum is |b|^4 times the pair spectral density") {
    CavityParams p = kerr(4 / 8.0);
    PulseSpec pulse;
    pulse.omega_0 = -0.3;
    pulse.tau = 10;
    pulse.envelope = Envelope::UncorrelatedGaussian;
    pulse.b = cplx(0.2, 0.1);
    const auto grid = linspace(-6, 6, 121);
    const auto a = analytic_spectrum(p, pulse, grid);
    const auto s = pair_spectral_density(p, pulse.omega_0, pulse.tau, Port::R, Port::L, grid);
    const double b4 = std::pow(std::abs(pulse.b), 4);
    CHECK(a.spectrum.delta_weight == Approx(b4 * s.delta_weight).epsilon(1e-14));
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(a.spectrum.continuous[i] == Approx(b4 * s.continuous[i]).epsilon(1e-14));
    CHECK_FALSE(a.outside_validity);

    pulse.b = 30;
    CHECK(analytic_spectrum(kerr(4), pulse, grid).outside_validity);

    const auto lin = analytic_spectrum(kerr(0), pulse, grid);
    for (double v : lin.spectrum.continuous) CHECK(v == 0.0);
}
