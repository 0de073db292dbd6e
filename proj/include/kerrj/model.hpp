#pragma once

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "kerrj/error.hpp"

namespace kerrj {

using cplx = std::complex<double>;

// Junction constants. Frequencies share one unit; gamma is always derived.
struct CavityParams {
    double omega_c = 0.0;
    double u = 0.0;
    double gamma_L = 1.0;
    double gamma_R = 1.0;

    double gamma() const { return 0.5 * (gamma_L + gamma_R); }
};

enum class Envelope { Monochromatic, UncorrelatedGaussian, CorrelatedGaussian };

struct PulseSpec {
    double omega_0 = 0.0;
    double tau = std::numeric_limits<double>::infinity();
    Envelope envelope = Envelope::Monochromatic;
    cplx b{0.0, 0.0};
};

struct Config {
    CavityParams cavity;
    PulseSpec pulse;

    double detuning() const { return pulse.omega_0 - cavity.omega_c; }
};

// hbar = c = 1 throughout. `gamma` is the frequency unit used to rescale,
// so a dimensionless config has gamma == 1.
struct Units {
    double gamma = 1.0;

    double to_dimless_freq(double w) const { return w / gamma; }
    double to_dimless_time(double t) const { return t * gamma; }
    double to_physical_freq(double w) const { return w * gamma; }
    double to_physical_time(double t) const { return t / gamma; }
};

const char* envelope_name(Envelope e);
Envelope parse_envelope(const std::string& s);

// Every violated invariant, empty when the input is usable.
std::vector<Issue> check(const CavityParams& c, const PulseSpec& p);

// Throws Error(Config) carrying the full issue list.
Config validate(const CavityParams& c, const PulseSpec& p);

// Frequencies / gamma, times * gamma. Idempotent.
Config nondimensionalize(const Config& cfg);
Config nondimensionalize(const Config& cfg, Units& units_out);
Config redimensionalize(const Config& cfg, const Units& units);

// Strict JSON (unknown keys rejected). Keys: omega_c, u, gamma_L, gamma_R,
// omega_0, tau, envelope, b_re, b_im. tau may be a number, null or "inf".
Config config_from_json_text(const std::string& text);
Config load_config(const std::string& path);
std::string config_to_json_text(const Config& cfg);

} // namespace kerrj
