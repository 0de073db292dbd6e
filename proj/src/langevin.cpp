#include "kerrj/langevin.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/Polynomials>

namespace kerrj {

cplx drive_amplitude(const CavityParams& p, const PulseSpec& pulse) {
    return std::sqrt(p.gamma_L / pulse.tau) * pulse.b;
}

double cubic_residual(const CavityParams& p, double omega_0, cplx f, double n) {
    const double D = omega_0 - p.omega_c, g = p.gamma();
    const double f2 = std::norm(f);
    const double x = D - 2.0 * p.u * n;
    const double lhs = n * (g * g + x * x);
    return std::abs(lhs - f2) / std::max(f2, 1e-300);
}

double drive_for_population(const CavityParams& p, double omega_0, double n) {
    const double D = omega_0 - p.omega_c, g = p.gamma();
    const double x = D - 2.0 * p.u * n;
    return std::sqrt(n * (g * g + x * x));
}

SteadyAmplitude steady_amplitude(const CavityParams& p, double omega_0, cplx f) {
    const double D = omega_0 - p.omega_c, g = p.gamma();
    const double f2 = std::norm(f);
    std::vector<double> ns;

    if (f2 == 0.0) {
        ns.push_back(0.0);
    } else if (p.u == 0.0) {
        ns.push_back(f2 / (D * D + g * g));
    } else {
        // 4u^2 n^3 - 4u D n^2 + (D^2 + g^2) n - |f|^2 = 0
        Eigen::Vector4d c;
        c << -f2, D * D + g * g, -4.0 * p.u * D, 4.0 * p.u * p.u;
        Eigen::PolynomialSolver<double, 3> solver(c);
        auto poly = [&](double n) { return ((c[3] * n + c[2]) * n + c[1]) * n + c[0]; };
        auto dpoly = [&](double n) { return (3.0 * c[3] * n + 2.0 * c[2]) * n + c[1]; };
        for (const auto& r : solver.roots()) {
            const double scale = std::max(1.0, std::abs(r));
            if (std::abs(r.imag()) > 1e-6 * scale) continue;
            double n = r.real();
            for (int it = 0; it < 50; ++it) {  // polish
                const double d = dpoly(n);
                if (d == 0.0) break;
                const double step = poly(n) / d;
                n -= step;
                if (std::abs(step) <= 1e-16 * std::max(std::abs(n), 1e-300)) break;
            }
            if (n < 0) continue;
            bool dup = false;
            for (double m : ns)
                if (std::abs(m - n) <= 1e-9 * std::max(m, 1e-300)) dup = true;
            if (!dup) ns.push_back(n);
        }
        std::sort(ns.begin(), ns.end());
    }

    SteadyAmplitude s;
    for (double n : ns) {
        s.n_bar.push_back(n);
        s.roots.push_back(f == 0.0 ? cplx(0.0) : f / cplx(D - 2.0 * p.u * n, g));
    }
    s.selected = 0;
    s.multiple = ns.size() > 1;
    return s;
}

LinearizedSystem linearize(const CavityParams& p, double omega_0, const SteadyAmplitude& s) {
    const double D = omega_0 - p.omega_c, g = p.gamma();
    const double n = s.n();
    const cplx a = s.alpha();
    LinearizedSystem L;
    L.A << -g, D - 2.0 * n * p.u, -(D - 6.0 * n * p.u), -g;
    L.D << cplx(0, -2.0 * p.u) * a * a, 0.0, 0.0, cplx(0, 2.0 * p.u) * std::conj(a) * std::conj(a);
    if (std::abs(a) > 0) {
        Eigen::Matrix2cd M;
        M << 0.5 / a, 0.5 / std::conj(a), cplx(0, 0.5) / a, cplx(0, -0.5) / std::conj(a);
        L.noise = M * L.D * M.transpose();
    } else {
        L.noise.setZero();
    }
    Eigen::EigenSolver<Eigen::Matrix2d> es(L.A);
    L.eigenvalues = es.eigenvalues();
    L.stable = L.eigenvalues[0].real() < 0 && L.eigenvalues[1].real() < 0;
    return L;
}

AnalyticSpectrum analytic_spectrum(const CavityParams& p, const PulseSpec& pulse, const std::vector<double>& grid) {
    AnalyticSpectrum out;
    out.spectrum = pair_spectral_density(p, pulse.omega_0, pulse.tau, Port::R, Port::L, grid);
    const double b4 = std::norm(pulse.b) * std::norm(pulse.b);
    out.spectrum.delta_weight *= b4;
    for (double& v : out.spectrum.continuous) v *= b4;
    if (std::isfinite(pulse.tau)) {
        out.n_bar = steady_amplitude(p, pulse.omega_0, drive_amplitude(p, pulse)).n();
        out.outside_validity = out.n_bar * std::abs(p.u) > p.gamma() / 10.0;
    }
    return out;
}

} // namespace kerrj
