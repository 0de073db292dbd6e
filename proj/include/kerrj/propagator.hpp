#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "kerrj/model.hpp"
#include "kerrj/scattering.hpp"

namespace kerrj {

// Cell-centred lattice in the comoving coordinate xi = x - t; the physical
// position of cell a at time t is xi_a + t. Transport is therefore exact and
// free: one time step (dt = h) moves the junction by one cell.
struct GridSpec {
    double h = 0.0;
    double lo = 0.0;
    std::size_t M = 0;

    double xi(std::size_t a) const { return lo + (static_cast<double>(a) + 0.5) * h; }
    double hi() const { return lo + static_cast<double>(M) * h; }
};

struct PropagatorOptions {
    double h = 0.0;            // 0: min(1/(40 gamma), tau/80)
    double cm_width = 0.0;     // centre-of-mass window for corr_gauss; 0: 2 tau
    double tail_sigmas = 6.0;  // pulse support radius in marginal standard deviations
    double ringdown = 15.0;    // extra run time after the pulse, in 1/gamma
};

// Envelopes, carrier exp(i omega_0 (x1 + x2 - 2t)) divided out.
// Two-photon arrays are row-major M x M: X[a * M + b] has the first photon in
// cell a and the second in cell b. LR holds the L photon first.
struct TwoPhotonField {
    GridSpec grid;
    CavityParams cavity;
    double omega_0 = 0.0;
    double tau = 0.0;
    Envelope envelope = Envelope::UncorrelatedGaussian;
    double cm_width = 0.0;

    std::size_t steps = 0;  // steps taken since t0 = -grid.hi()
    std::vector<cplx> LL, RR, LR;
    std::vector<cplx> LC, RC;
    cplx CC{0.0, 0.0};

    // Overlap of the mixed region (one photon scattered, the other still
    // incoming) with the incident envelope, accumulated pair by pair just
    // before the trailing photon reaches the junction.
    cplx mixed_num_L{0.0, 0.0};
    cplx mixed_num_R{0.0, 0.0};
    double mixed_den = 0.0;

    double norm0 = 0.0;

    double t0() const { return -grid.hi(); }
    double t() const { return t0() + static_cast<double>(steps) * grid.h; }
    cplx& at(std::vector<cplx>& X, std::size_t a, std::size_t b) { return X[a * grid.M + b]; }
    const cplx& at(const std::vector<cplx>& X, std::size_t a, std::size_t b) const { return X[a * grid.M + b]; }
};

double default_step(const CavityParams& p, double tau);
double support_radius(const PulseSpec& pulse, const PropagatorOptions& opt);
double default_t_final(const CavityParams& p, const PulseSpec& pulse, const PropagatorOptions& opt);

// Incident envelope at comoving (xi1, xi2); the pulse centre reaches the
// junction at t = 0.
double incident_envelope(Envelope e, double tau, double cm_width, double xi1, double xi2);

// Throws BadEnvelope for mono, GridTooSmall if more than 1e-8 of the pulse is clipped.
TwoPhotonField init_field(const CavityParams& p, const PulseSpec& pulse, const PropagatorOptions& opt = {},
                          double t_final = 0.0);

// Advance to t_final (rounded to whole steps). Throws DomainOverrun, UnstableStep.
void evolve(TwoPhotonField& f, double t_final);

double norm(const TwoPhotonField& f);
double cavity_population(const TwoPhotonField& f);
double symmetry_error(const TwoPhotonField& f);

struct ScatteredAmplitudes {
    double h = 0.0;
    std::vector<double> d;  // separations m h
    // Pulse-averaged |a_ij(d)|^2: outgoing over incident intensity summed
    // along the line x1 - x2 = d.
    std::array<std::vector<double>, 3> prob;
    // Complex ratio outgoing/incident at the pulse centre, versus d.
    std::array<std::vector<cplx>, 3> center_cut;
    // Envelope-weighted single-photon gains from the mixed region, in the
    // phase convention of single_amplitudes().
    cplx c_L{0.0, 0.0};
    cplx c_R{0.0, 0.0};

    double d0(Channel ch) const { return prob[static_cast<int>(ch)].at(0); }
    double center_d0(Channel ch) const { return std::norm(center_cut[static_cast<int>(ch)].at(0)); }
};

// Throws CavityNotEmpty if more than 1e-6 of the norm is still in the cavity.
ScatteredAmplitudes extract_amplitudes(const TwoPhotonField& f, double d_max = 8.0);

void write_cut_csv(const ScatteredAmplitudes& a, std::ostream& os);

// Little-endian binary layout, see README.
void save_checkpoint(const TwoPhotonField& f, const std::string& path);
TwoPhotonField load_checkpoint(const std::string& path);

struct PulseRun {
    ScatteredAmplitudes amps;
    GridSpec grid;
    double t_final = 0.0;
    double norm_initial = 0.0;
    double norm_final = 0.0;
};

// init + evolve + extract. `keep`, if given, receives the final field.
PulseRun run_pulse(const CavityParams& p, const PulseSpec& pulse, const PropagatorOptions& opt = {},
                   TwoPhotonField* keep = nullptr);

// One photon through the same discrete junction, for factorization checks.
struct SinglePhotonField {
    std::vector<cplx> L, R;
    cplx C{0.0, 0.0};
};
SinglePhotonField propagate_single_photon(const CavityParams& p, double omega_0, const GridSpec& g,
                                          const std::vector<cplx>& incident_L, std::size_t steps);

} // namespace kerrj
