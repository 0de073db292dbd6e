#pragma once

#include <vector>

#include <Eigen/Dense>

#include "kerrj/model.hpp"
#include "kerrj/scattering.hpp"

namespace kerrj {

// Cavity density operator in the number basis |0..N>.
struct DensityMatrix {
    Eigen::MatrixXcd data;

    int dim() const { return static_cast<int>(data.rows()); }
    cplx trace() const { return data.trace(); }
    double hermiticity_error() const;
    double min_eigenvalue() const;
    cplx expect(const Eigen::MatrixXcd& op) const { return (op * data).trace(); }
};

// Generator of the master equation in the frame rotating at omega_0:
//   H = -Delta a^dag a + u a^dag a^dag a a + f a^dag + f* a
//   D[rho] = gamma (2 a rho a^dag - a^dag a rho - rho a^dag a)
// acting on column-stacked density matrices, vec(A X B) = (B^T kron A) vec X.
struct Liouvillian {
    int cutoff = 0;  // N, Hilbert dimension N + 1
    double omega_0 = 0.0;
    double detuning = 0.0;
    double u = 0.0;
    double gamma = 1.0;
    cplx f{0.0, 0.0};
    Eigen::MatrixXcd a;  // annihilation operator
    Eigen::MatrixXcd H;
    Eigen::MatrixXcd L;

    int dim() const { return cutoff + 1; }
    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const { return L * v; }
};

Eigen::MatrixXcd annihilation(int dim);
Eigen::VectorXcd vec(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, int dim);

Liouvillian build_liouvillian(const CavityParams& p, double omega_0, cplx f, int cutoff);

// Null-space solve with the trace row; time integration if that fails.
// Throws NonUniqueSteadyState, CutoffTooSmall (|N><N| population > 1e-8).
DensityMatrix steady_state(const Liouvillian& L);

double steady_residual(const Liouvillian& L, const DensityMatrix& rho);

// rho(t) at t = k dt, k = 0..steps, checking trace, Hermiticity, positivity.
std::vector<DensityMatrix> propagate(const Liouvillian& L, const DensityMatrix& rho0, double dt, int steps);

struct CorrelatorSeries {
    double dt = 0.0;
    std::vector<double> times;
    std::vector<cplx> values;  // C(t) = Tr[a^dag e^{Lt}(a rho)]
    cplx mean{0.0, 0.0};       // <a>
    double asymptote = 0.0;    // |<a>|^2
    double n_ss = 0.0;         // <a^dag a>
    double omega_0 = 0.0;
};

CorrelatorSeries two_time_correlator(const DensityMatrix& rho_ss, const Liouvillian& L, double t_max, double dt);

// gamma_R/(2 pi) times the two-sided Fourier transform of C - |<a>|^2 at
// nu = omega - omega_0. The piecewise-linear interpolant of the correlator
// is transformed exactly on the caller grid.
SpectrumResult emission_spectrum(const CorrelatorSeries& c, double gamma_R, const std::vector<double>& grid);

double gn(const DensityMatrix& rho, int n);

struct GnScan {
    std::vector<double> detuning;
    std::vector<int> orders;
    std::vector<std::vector<double>> g;  // g[order index][point]
    std::vector<double> n_mean;
    std::vector<double> peak;            // refined argmax per order
};

GnScan gn_scan(const CavityParams& p, cplx f, const std::vector<double>& detunings, const std::vector<int>& orders,
               int cutoff, int workers);

// Parabolic refinement of the maximum of y(x) on a uniform-ish grid.
double refined_argmax(const std::vector<double>& x, const std::vector<double>& y);

} // namespace kerrj
