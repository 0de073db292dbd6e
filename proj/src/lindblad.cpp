#include "kerrj/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "kerrj/parallel.hpp"

namespace kerrj {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

double DensityMatrix::hermiticity_error() const { return (data - data.adjoint()).cwiseAbs().maxCoeff(); }

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (data + data.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

MatrixXcd annihilation(int dim) {
    MatrixXcd a = MatrixXcd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

VectorXcd vec(const MatrixXcd& m) { return Eigen::Map<const VectorXcd>(m.data(), m.size()); }

MatrixXcd unvec(const VectorXcd& v, int dim) { return Eigen::Map<const MatrixXcd>(v.data(), dim, dim); }

Liouvillian build_liouvillian(const CavityParams& p, double omega_0, cplx f, int cutoff) {
    if (cutoff < 1) throw Error(ErrorKind::Config, "CutoffTooSmall", "Fock cutoff must be >= 1");
    Liouvillian L;
    L.cutoff = cutoff;
    L.omega_0 = omega_0;
    L.detuning = omega_0 - p.omega_c;
    L.u = p.u;
    L.gamma = p.gamma();
    L.f = f;
    const int d = cutoff + 1;
    L.a = annihilation(d);
    const MatrixXcd ad = L.a.adjoint();
    const MatrixXcd n = ad * L.a;
    L.H = -L.detuning * n + L.u * ad * ad * L.a * L.a + f * ad + std::conj(f) * L.a;
    const MatrixXcd I = MatrixXcd::Identity(d, d);
    const cplx mi(0.0, -1.0);
    L.L = mi * (Eigen::kroneckerProduct(I, L.H).eval() - Eigen::kroneckerProduct(L.H.transpose(), I).eval());
    L.L += L.gamma * (2.0 * Eigen::kroneckerProduct(L.a.conjugate(), L.a).eval() -
                      Eigen::kroneckerProduct(I, n).eval() - Eigen::kroneckerProduct(n.transpose(), I).eval());
    return L;
}

double steady_residual(const Liouvillian& L, const DensityMatrix& rho) {
    return (L.L * vec(rho.data)).cwiseAbs().maxCoeff();
}

namespace {

DensityMatrix tidy(const MatrixXcd& m) {
    DensityMatrix r{0.5 * (m + m.adjoint())};
    r.data /= r.data.trace();
    return r;
}

DensityMatrix integrate_to_steady(const Liouvillian& L, DensityMatrix rho) {
    const MatrixXcd P = (L.L * (10.0 / L.gamma)).exp();
    VectorXcd v = vec(rho.data);
    for (int it = 0; it < 200; ++it) {
        v = P * v;
        rho = tidy(unvec(v, L.dim()));
        v = vec(rho.data);
        if (steady_residual(L, rho) <= 1e-12) break;
    }
    return rho;
}

} // namespace

DensityMatrix steady_state(const Liouvillian& L) {
    const int d = L.dim();
    const int n = d * d;
    MatrixXcd M = L.L;
    M.row(0).setZero();
    for (int i = 0; i < d; ++i) M(0, i + i * d) = 1.0;
    VectorXcd rhs = VectorXcd::Zero(n);
    rhs(0) = 1.0;

    Eigen::PartialPivLU<MatrixXcd> lu(M);
    DensityMatrix rho;
    // Exact zero pivots slip past the rcond estimate, so check the pivots too.
    const auto piv = lu.matrixLU().diagonal().cwiseAbs();
    bool ok = lu.rcond() > 1e-13 && piv.minCoeff() > 1e-13 * piv.maxCoeff();
    if (ok) {
        VectorXcd x = lu.solve(rhs);
        x += lu.solve(rhs - M * x);  // one refinement sweep
        rho = tidy(unvec(x, d));
        ok = rho.data.allFinite();
    }
    if (!ok) {
        Eigen::FullPivLU<MatrixXcd> full(L.L);
        full.setThreshold(1e-10);
        if (full.dimensionOfKernel() > 1)
            throw Error(ErrorKind::Numerical, "NonUniqueSteadyState",
                        "Liouvillian kernel dimension " + std::to_string(full.dimensionOfKernel()));
        DensityMatrix vac{MatrixXcd::Zero(d, d)};
        vac.data(0, 0) = 1.0;
        rho = integrate_to_steady(L, vac);
    }
    const double scale = std::max(1.0, L.L.cwiseAbs().maxCoeff());
    if (steady_residual(L, rho) > 1e-10 * scale) rho = integrate_to_steady(L, rho);

    const double top = rho.data(d - 1, d - 1).real();
    if (top > 1e-8)
        throw Error(ErrorKind::Numerical, "CutoffTooSmall",
                    "population of level N=" + std::to_string(L.cutoff) + " is " + std::to_string(top));
    return rho;
}

std::vector<DensityMatrix> propagate(const Liouvillian& L, const DensityMatrix& rho0, double dt, int steps) {
    const MatrixXcd P = (L.L * dt).exp();
    std::vector<DensityMatrix> out;
    out.reserve(steps + 1);
    out.push_back(rho0);
    VectorXcd v = vec(rho0.data);
    for (int k = 1; k <= steps; ++k) {
        v = P * v;
        DensityMatrix r{unvec(v, L.dim())};
        if (std::abs(r.trace() - 1.0) > 1e-10 || r.hermiticity_error() > 1e-12 || r.min_eigenvalue() < -1e-8)
            throw Error(ErrorKind::Numerical, "InvariantViolation",
                        "density matrix lost trace, Hermiticity or positivity at step " + std::to_string(k));
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

double trace_norm(const MatrixXcd& m) {
    Eigen::JacobiSVD<MatrixXcd> svd(m);
    return svd.singularValues().sum();
}

} // namespace

CorrelatorSeries two_time_correlator(const DensityMatrix& rho_ss, const Liouvillian& L, double t_max, double dt) {
    if (!(dt > 0) || !(t_max > 0)) throw Error(ErrorKind::Config, "BadStep", "t_max and dt must be positive");
    const int steps = static_cast<int>(std::ceil(t_max / dt - 1e-9));
    const int d = L.dim();
    const MatrixXcd P = (L.L * dt).exp();
    // Tr(a^dag X) = sum_ij conj(a)_ij X_ij = vec(a)^T vec(X) for real a.
    const VectorXcd w = vec(L.a);

    CorrelatorSeries c;
    c.dt = dt;
    c.mean = rho_ss.expect(L.a);
    c.asymptote = std::norm(c.mean);
    c.n_ss = rho_ss.expect(L.a.adjoint() * L.a).real();
    c.omega_0 = L.omega_0;
    c.times.resize(steps + 1);
    c.values.resize(steps + 1);

    VectorXcd x = vec(L.a * rho_ss.data);
    const double tn0 = trace_norm(unvec(x, d));
    for (int k = 0; k <= steps; ++k) {
        if (k > 0) x = P * x;
        c.times[k] = k * dt;
        c.values[k] = w.transpose() * x;
        if (k % 16 == 0 || k == steps) {
            const double tn = trace_norm(unvec(x, d));
            if (tn > tn0 * (1.0 + 1e-6) + 1e-300)
                throw Error(ErrorKind::Numerical, "PropagationDrift", "trace norm grew at t=" + std::to_string(k * dt));
        }
    }
    return c;
}

namespace {

// int_0^1 x^m exp(-i th x) dx for m = 0, 1.
std::pair<cplx, cplx> filon_moments(double th) {
    const cplx I(0.0, 1.0);
    if (std::abs(th) < 0.5) {
        cplx m0 = 0.0, m1 = 0.0, term = 1.0;
        for (int k = 0; k < 14; ++k) {
            m0 += term / double(k + 1);
            m1 += term / double(k + 2);
            term *= -I * th / double(k + 1);
        }
        return {m0, m1};
    }
    const cplx e = std::exp(-I * th);
    const cplx m0 = (1.0 - e) / (I * th);
    const cplx m1 = I * e / th + m0 / (I * th);
    return {m0, m1};
}

} // namespace

SpectrumResult emission_spectrum(const CorrelatorSeries& c, double gamma_R, const std::vector<double>& grid) {
    const std::size_t K = c.values.size();
    if (K < 2) throw Error(ErrorKind::Config, "BadStep", "correlator needs at least two samples");
    std::vector<cplx> g(K);
    for (std::size_t k = 0; k < K; ++k) g[k] = c.values[k] - c.asymptote;
    const double ref = std::max(std::abs(c.values[0]), 1e-300);
    if (std::abs(g.back()) > 1e-8 * ref)
        throw Error(ErrorKind::Numerical, "UnsettledCorrelator",
                    "C(t_max) differs from |<a>|^2 by " + std::to_string(std::abs(g.back()) / ref) + " (relative)");

    SpectrumResult r;
    r.grid = grid;
    r.continuous.resize(grid.size());
    r.delta_weight = gamma_R * c.asymptote;
    const double dt = c.dt;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double nu = grid[i] - c.omega_0;
        auto [m0, m1] = filon_moments(nu * dt);
        const cplx w0 = m0 - m1, w1 = m1;
        cplx acc = 0.0;
        for (std::size_t k = 0; k + 1 < K; ++k) {
            const cplx ph = std::polar(1.0, -nu * c.times[k]);
            acc += ph * (g[k] * w0 + g[k + 1] * w1);
        }
        r.continuous[i] = gamma_R / (2.0 * std::numbers::pi) * 2.0 * (acc * dt).real();
    }
    return r;
}

double gn(const DensityMatrix& rho, int n) {
    if (n < 1) throw Error(ErrorKind::Config, "BadOrder", "g(n) needs n >= 1");
    if (rho.dim() < n + 5)
        throw Error(ErrorKind::Config, "CutoffTooSmall", "g(" + std::to_string(n) + ") needs N >= n + 4");
    const MatrixXcd a = annihilation(rho.dim());
    MatrixXcd an = MatrixXcd::Identity(rho.dim(), rho.dim());
    for (int k = 0; k < n; ++k) an = an * a;
    const double num = rho.expect(an.adjoint() * an).real();
    const double den = rho.expect(a.adjoint() * a).real();
    if (den < 1e-14) throw Error(ErrorKind::Numerical, "VanishingDenominator", "<a^dag a> < 1e-14");
    return std::max(0.0, num) / std::pow(den, n);
}

double refined_argmax(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t i = std::max_element(y.begin(), y.end()) - y.begin();
    if (i == 0 || i + 1 >= y.size()) return x[i];
    const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
    const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
    const double d1 = (y1 - y0) / (x1 - x0), d2 = (y2 - y1) / (x2 - x1);
    const double curv = (d2 - d1) / (0.5 * (x2 - x0));
    if (curv >= 0) return x1;
    return 0.5 * (x0 + x1) - d1 / curv;
}

GnScan gn_scan(const CavityParams& p, cplx f, const std::vector<double>& detunings, const std::vector<int>& orders,
               int cutoff, int workers) {
    GnScan s;
    s.detuning = detunings;
    s.orders = orders;
    s.g.assign(orders.size(), std::vector<double>(detunings.size()));
    s.n_mean.resize(detunings.size());
    parallel_for(detunings.size(), workers, [&](std::size_t i) {
        const auto L = build_liouvillian(p, p.omega_c + detunings[i], f, cutoff);
        const auto rho = steady_state(L);
        s.n_mean[i] = rho.expect(L.a.adjoint() * L.a).real();
        for (std::size_t o = 0; o < orders.size(); ++o) s.g[o][i] = gn(rho, orders[o]);
    });
    for (std::size_t o = 0; o < orders.size(); ++o) s.peak.push_back(refined_argmax(detunings, s.g[o]));
    return s;
}

} // namespace kerrj
