#pragma once

#include <vector>

#include "kerrj/model.hpp"

namespace kerrj {

enum class Port { L, R };
enum class Channel { LL, RR, LR };

const char* channel_name(Channel c);

struct SingleAmplitudes {
    cplx c_L;  // reflection
    cplx c_R;  // transmission
};

// Elastic delta weight plus sampled continuous part on a caller grid.
struct SpectrumResult {
    double delta_weight = 0.0;
    std::vector<double> grid;
    std::vector<double> continuous;
    // Set when tau is infinite: 1/tau (delta) and 1/tau^2 (continuous)
    // have been dropped from the reported numbers.
    bool tau_factored_out = false;
};

SingleAmplitudes single_amplitudes(const CavityParams& p, double omega_0);

// Monochromatic two-photon amplitude for a pair incident from L, both
// photons leaving through channel pair `ch`, at separation d = |x1 - x2|.
cplx pair_amplitude(const CavityParams& p, double omega_0, Channel ch, double d);

// The bound-state part alone: a_ij(d) - c_i c_j.
cplx bound_amplitude(const CavityParams& p, double omega_0, Channel ch, double d);

// Probability of forming the correlated pair inside the cavity. Pass
// tau = inf to get tau^2 * F.
double pair_formation_probability(const CavityParams& p, double omega_0, double tau);

// Spectral density of the correlated emission at frequency omega.
double fwm_density(const CavityParams& p, double omega_0, double omega);

// Closed form of the integral of fwm_density over the real line.
double fwm_density_integral(const CavityParams& p, double omega_0);

// Spectrum of photons leaving through `out` for a pulse entering through `in`.
SpectrumResult pair_spectral_density(const CavityParams& p, double omega_0, double tau, Port out, Port in,
                                     const std::vector<double>& grid);

// 2001 uniform points over omega_0 +- max(5 gamma, 2u).
std::vector<double> default_spectral_grid(const CavityParams& p, double omega_0, int points = 2001);

std::vector<double> linspace(double a, double b, int n);

} // namespace kerrj
