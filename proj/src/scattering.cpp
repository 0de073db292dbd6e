#include "kerrj/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kerrj {

const char* channel_name(Channel c) {
    switch (c) {
    case Channel::LL: return "LL";
    case Channel::RR: return "RR";
    case Channel::LR: return "LR";
    }
    return "?";
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(std::max(n, 0));
    if (n == 1) v[0] = a;
    for (int i = 0; i < n && n > 1; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

SingleAmplitudes single_amplitudes(const CavityParams& p, double omega_0) {
    const double D = omega_0 - p.omega_c;
    const double g = p.gamma();
    const cplx den(D, g);
    return {-cplx(D, 0.5 * (p.gamma_R - p.gamma_L)) / den,
            cplx(0.0, std::sqrt(p.gamma_L * p.gamma_R)) / den};
}

namespace {

double gamma_of(const CavityParams& p, Port q) { return q == Port::L ? p.gamma_L : p.gamma_R; }

std::pair<Port, Port> ports(Channel ch) {
    switch (ch) {
    case Channel::LL: return {Port::L, Port::L};
    case Channel::RR: return {Port::R, Port::R};
    default: return {Port::L, Port::R};
    }
}

} // namespace

cplx bound_amplitude(const CavityParams& p, double omega_0, Channel ch, double d) {
    const double D = omega_0 - p.omega_c;
    const double g = p.gamma();
    auto [i, j] = ports(ch);
    const double gi = gamma_of(p, i), gj = gamma_of(p, j);
    const cplx den1(D, g);
    const cplx den2(D - p.u, g);
    const cplx decay = std::exp(cplx(-g, D) * std::abs(d));
    return -p.u * p.gamma_L * std::sqrt(gi * gj) * decay / (den1 * den1 * den2);
}

cplx pair_amplitude(const CavityParams& p, double omega_0, Channel ch, double d) {
    const auto s = single_amplitudes(p, omega_0);
    auto [i, j] = ports(ch);
    const cplx ci = i == Port::L ? s.c_L : s.c_R;
    const cplx cj = j == Port::L ? s.c_L : s.c_R;
    if (p.u == 0.0) return ci * cj;
    return ci * cj + bound_amplitude(p, omega_0, ch, d);
}

double pair_formation_probability(const CavityParams& p, double omega_0, double tau) {
    const double D = omega_0 - p.omega_c;
    const double g = p.gamma();
    const double t2 = std::isfinite(tau) ? tau * tau : 1.0;
    return 2.0 * g * g / (std::numbers::pi * t2) / ((D * D + g * g) * ((D - p.u) * (D - p.u) + g * g));
}

double fwm_density(const CavityParams& p, double omega_0, double omega) {
    const double g = p.gamma();
    const double a = omega - p.omega_c;
    const double b = omega - 2.0 * omega_0 + p.omega_c;
    return 4.0 * p.u * p.u * g * g / ((a * a + g * g) * (b * b + g * g));
}

double fwm_density_integral(const CavityParams& p, double omega_0) {
    const double D = omega_0 - p.omega_c;
    const double g = p.gamma();
    return 2.0 * std::numbers::pi * p.u * p.u * g / (D * D + g * g);
}

SpectrumResult pair_spectral_density(const CavityParams& p, double omega_0, double tau, Port out, Port in,
                                     const std::vector<double>& grid) {
    SpectrumResult r;
    r.tau_factored_out = !std::isfinite(tau);
    const double inv_tau = r.tau_factored_out ? 1.0 : 1.0 / tau;
    const auto s = single_amplitudes(p, omega_0);
    // Elastic weight: same-port output carries |c_L|^2, opposite port |c_R|^2.
    const double c2 = out == in ? std::norm(s.c_L) : std::norm(s.c_R);
    r.delta_weight = 2.0 * c2 * inv_tau;

    // Coupling weight: the pair is loaded through `in` twice and released
    // once through `out`.
    const double g = p.gamma();
    const double gi = gamma_of(p, in), go = gamma_of(p, out);
    const double weight = gi * gi * go / (g * g * g);
    const double F = pair_formation_probability(p, omega_0, tau);
    r.grid = grid;
    r.continuous.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) r.continuous[k] = weight * F * fwm_density(p, omega_0, grid[k]);
    return r;
}

std::vector<double> default_spectral_grid(const CavityParams& p, double omega_0, int points) {
    const double half = std::max(5.0 * p.gamma(), 2.0 * std::abs(p.u));
    return linspace(omega_0 - half, omega_0 + half, points);
}

} // namespace kerrj
