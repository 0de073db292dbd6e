#pragma once

#include <vector>

#include <Eigen/Dense>

#include "kerrj/model.hpp"
#include "kerrj/scattering.hpp"

namespace kerrj {

// Mean-field steady states of the driven Kerr cavity in the frame rotating
// at omega_0: <a> = f / (Delta - 2 u n + i gamma), n = |<a>|^2.
struct SteadyAmplitude {
    std::vector<cplx> roots;      // ordered by increasing n
    std::vector<double> n_bar;
    std::size_t selected = 0;     // low branch
    bool multiple = false;        // more than one physical root (bistable)

    cplx alpha() const { return roots.at(selected); }
    double n() const { return n_bar.at(selected); }
};

// Linearization around <a> in the (r, theta) variables, a = <a>(1 + r - i theta).
struct LinearizedSystem {
    Eigen::Matrix2d A;             // drift
    Eigen::Matrix2cd D;            // diffusion of (a, a*)
    Eigen::Matrix2cd noise;        // covariance of the (r, theta) noise, M D M^T
    Eigen::Vector2cd eigenvalues;
    bool stable = false;
};

cplx drive_amplitude(const CavityParams& p, const PulseSpec& pulse);  // sqrt(gamma_L / tau) b

SteadyAmplitude steady_amplitude(const CavityParams& p, double omega_0, cplx f);

// |f| that puts the mean field at population n (inverse of the cubic).
double drive_for_population(const CavityParams& p, double omega_0, double n);

// Relative residual of n (gamma^2 + (Delta - 2 u n)^2) = |f|^2.
double cubic_residual(const CavityParams& p, double omega_0, cplx f, double n);

LinearizedSystem linearize(const CavityParams& p, double omega_0, const SteadyAmplitude& s);

struct AnalyticSpectrum {
    SpectrumResult spectrum;
    double n_bar = 0.0;
    bool outside_validity = false;  // n u > gamma / 10
};

// |b|^4 times the R<-L pair spectrum.
AnalyticSpectrum analytic_spectrum(const CavityParams& p, const PulseSpec& pulse, const std::vector<double>& grid);

} // namespace kerrj
