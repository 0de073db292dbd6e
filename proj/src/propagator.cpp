#include "kerrj/propagator.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>

namespace kerrj {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

// Per-step junction update. Within a step the photon in the crossing cell
// k, its partner state in the other waveguide and the cavity mode form a
// 3-level block coupled by sqrt(h) kappa; the Cayley transform of that
// coupling is the midpoint rule for the delta(x) interface, so it is
// unitary and reproduces the continuum reflection/transmission amplitudes.
// Cavity energies (-Delta per photon, 2u - 2Delta for two) are applied as
// half-step phases on either side.
struct Junction {
    Eigen::Matrix3cd C;
    cplx p1;  // half-step phase, one cavity photon
    cplx p2;  // half-step phase, two cavity photons

    Junction(const CavityParams& p, double omega_0, double h) {
        const double D = omega_0 - p.omega_c;
        const double sh = std::sqrt(h);
        Eigen::Matrix3cd K = Eigen::Matrix3cd::Zero();
        K(0, 2) = K(2, 0) = sh * std::sqrt(p.gamma_L);
        K(1, 2) = K(2, 1) = sh * std::sqrt(p.gamma_R);
        const Eigen::Matrix3cd I = Eigen::Matrix3cd::Identity();
        const cplx i(0.0, 1.0);
        C = (I + 0.5 * i * K).inverse() * (I - 0.5 * i * K);
        p1 = std::polar(1.0, 0.5 * D * h);
        p2 = std::polar(1.0, -0.5 * (2.0 * p.u - 2.0 * D) * h);
    }

    void apply(cplx& x0, cplx& x1, cplx& x2) const {
        const cplx y0 = C(0, 0) * x0 + C(0, 1) * x1 + C(0, 2) * x2;
        const cplx y1 = C(1, 0) * x0 + C(1, 1) * x1 + C(1, 2) * x2;
        const cplx y2 = C(2, 0) * x0 + C(2, 1) * x1 + C(2, 2) * x2;
        x0 = y0;
        x1 = y1;
        x2 = y2;
    }
};

double marginal_sd(Envelope e, double tau, double cm_width) {
    if (e == Envelope::CorrelatedGaussian) return std::sqrt(0.5 * cm_width * cm_width + 0.125 * tau * tau);
    return tau / std::sqrt(2.0);
}

double resolved_cm_width(const PulseSpec& pulse, const PropagatorOptions& opt) {
    return opt.cm_width > 0 ? opt.cm_width : 2.0 * pulse.tau;
}

void accumulate_mixed(TwoPhotonField& f, std::size_t k) {
    const std::size_t M = f.grid.M;
    const double ref = incident_envelope(f.envelope, f.tau, f.cm_width, 0.0, 0.0);
    cplx nl = 0.0, nr = 0.0;
    double den = 0.0;
    for (std::size_t a = k + 1; a < M; ++a) {
        const double w = incident_envelope(f.envelope, f.tau, f.cm_width, f.grid.xi(a), f.grid.xi(k));
        if (w < 1e-12 * ref) continue;
        nl += f.at(f.LL, a, k) * w;
        nr += f.at(f.LR, k, a) * w;
        den += w * w;
    }
    f.mixed_num_L += nl;
    f.mixed_num_R += nr;
    f.mixed_den += den;
}

void step(TwoPhotonField& f, const Junction& J) {
    const std::size_t M = f.grid.M;
    const std::size_t k = M - 1 - f.steps;
    const double h = f.grid.h;
    const double sh = std::sqrt(h);

    accumulate_mixed(f, k);

    for (std::size_t a = 0; a < M; ++a) {
        f.LC[a] *= J.p1;
        f.RC[a] *= J.p1;
    }
    f.CC *= J.p2;

    cplx* LLk = &f.LL[k * M];
    cplx* RRk = &f.RR[k * M];
    cplx* LRk = &f.LR[k * M];
    for (std::size_t a = 0; a < M; ++a) {
        if (a == k) continue;
        // spectator in L at cell a
        cplx x0 = sh * LLk[a], x1 = sh * f.LR[a * M + k], x2 = f.LC[a] / kSqrt2;
        J.apply(x0, x1, x2);
        LLk[a] = x0 / sh;
        f.LL[a * M + k] = LLk[a];
        f.LR[a * M + k] = x1 / sh;
        f.LC[a] = x2 * kSqrt2;
        // spectator in R at cell a
        cplx y0 = sh * LRk[a], y1 = sh * RRk[a], y2 = f.RC[a] / kSqrt2;
        J.apply(y0, y1, y2);
        LRk[a] = y0 / sh;
        RRk[a] = y1 / sh;
        f.RR[a * M + k] = RRk[a];
        f.RC[a] = y2 * kSqrt2;
    }

    // Both photons at the junction: T -> C T C^T on the symmetric 3x3 block.
    Eigen::Matrix3cd T;
    T(0, 0) = h * LLk[k];
    T(1, 1) = h * RRk[k];
    T(0, 1) = T(1, 0) = h * LRk[k];
    T(0, 2) = T(2, 0) = sh * f.LC[k] / kSqrt2;
    T(1, 2) = T(2, 1) = sh * f.RC[k] / kSqrt2;
    T(2, 2) = f.CC;
    T = (J.C * T * J.C.transpose()).eval();
    LLk[k] = T(0, 0) / h;
    RRk[k] = T(1, 1) / h;
    LRk[k] = 0.5 * (T(0, 1) + T(1, 0)) / h;
    f.LC[k] = 0.5 * (T(0, 2) + T(2, 0)) / sh * kSqrt2;
    f.RC[k] = 0.5 * (T(1, 2) + T(2, 1)) / sh * kSqrt2;
    f.CC = T(2, 2);

    for (std::size_t a = 0; a < M; ++a) {
        f.LC[a] *= J.p1;
        f.RC[a] *= J.p1;
    }
    f.CC *= J.p2;
    ++f.steps;
}

} // namespace

double default_step(const CavityParams& p, double tau) { return std::min(1.0 / (40.0 * p.gamma()), tau / 80.0); }

double support_radius(const PulseSpec& pulse, const PropagatorOptions& opt) {
    return opt.tail_sigmas * marginal_sd(pulse.envelope, pulse.tau, resolved_cm_width(pulse, opt));
}

double default_t_final(const CavityParams& p, const PulseSpec& pulse, const PropagatorOptions& opt) {
    return support_radius(pulse, opt) + opt.ringdown / p.gamma();
}

double incident_envelope(Envelope e, double tau, double cm_width, double x1, double x2) {
    constexpr double pi = std::numbers::pi;
    if (e == Envelope::UncorrelatedGaussian) {
        const double s = (x1 * x1 + x2 * x2) / (2.0 * tau * tau);
        return s > 700 ? 0.0 : std::exp(-s) / (std::sqrt(pi) * tau);
    }
    // Relative-coordinate Gaussian times a normalized centre-of-mass window.
    const double d = x1 - x2, X = 0.5 * (x1 + x2);
    const double s = d * d / (2.0 * tau * tau) + X * X / (2.0 * cm_width * cm_width);
    return s > 700 ? 0.0 : std::exp(-s) * std::pow(pi, -0.5) / std::sqrt(tau * cm_width);
}

TwoPhotonField init_field(const CavityParams& p, const PulseSpec& pulse, const PropagatorOptions& opt,
                          double t_final) {
    if (pulse.envelope == Envelope::Monochromatic)
        throw Error(ErrorKind::Config, "BadEnvelope", "monochromatic input has closed forms; use the scattering module");
    validate(p, pulse);
    TwoPhotonField f;
    f.cavity = p;
    f.omega_0 = pulse.omega_0;
    f.tau = pulse.tau;
    f.envelope = pulse.envelope;
    f.cm_width = resolved_cm_width(pulse, opt);

    const double h = opt.h > 0 ? opt.h : default_step(p, pulse.tau);
    if (t_final <= 0) t_final = default_t_final(p, pulse, opt);
    const double R = support_radius(pulse, opt);
    f.grid.h = h;
    f.grid.lo = -(t_final + h);
    f.grid.M = static_cast<std::size_t>(std::ceil((R + h - f.grid.lo) / h));
    const std::size_t M = f.grid.M;

    f.LL.assign(M * M, cplx(0.0));
    f.RR.assign(M * M, cplx(0.0));
    f.LR.assign(M * M, cplx(0.0));
    f.LC.assign(M, cplx(0.0));
    f.RC.assign(M, cplx(0.0));

    if (f.envelope == Envelope::UncorrelatedGaussian) {
        std::vector<double> g(M);
        for (std::size_t a = 0; a < M; ++a) {
            const double x = f.grid.xi(a);
            const double s = x * x / (2.0 * f.tau * f.tau);
            g[a] = s > 700 ? 0.0 : std::exp(-s) / (std::pow(std::numbers::pi, 0.25) * std::sqrt(f.tau));
        }
        for (std::size_t a = 0; a < M; ++a)
            for (std::size_t b = 0; b < M; ++b) f.LL[a * M + b] = g[a] * g[b];
    } else {
        for (std::size_t a = 0; a < M; ++a)
            for (std::size_t b = 0; b <= a; ++b) {
                const double v = incident_envelope(f.envelope, f.tau, f.cm_width, f.grid.xi(a), f.grid.xi(b));
                f.LL[a * M + b] = v;
                f.LL[b * M + a] = v;
            }
    }
    f.norm0 = norm(f);
    if (std::abs(f.norm0 - 1.0) > 1e-8)
        throw Error(ErrorKind::Config, "GridTooSmall",
                    "incident pulse norm on the grid is " + std::to_string(f.norm0) + " (tail clipped)");
    return f;
}

double norm(const TwoPhotonField& f) {
    const double h = f.grid.h;
    double s2 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < f.LL.size(); ++i)
        s2 += std::norm(f.LL[i]) + std::norm(f.RR[i]) + 2.0 * std::norm(f.LR[i]);
    for (std::size_t a = 0; a < f.LC.size(); ++a) s1 += std::norm(f.LC[a]) + std::norm(f.RC[a]);
    return h * h * s2 + h * s1 + std::norm(f.CC);
}

double cavity_population(const TwoPhotonField& f) {
    double s1 = 0.0;
    for (std::size_t a = 0; a < f.LC.size(); ++a) s1 += std::norm(f.LC[a]) + std::norm(f.RC[a]);
    return f.grid.h * s1 + std::norm(f.CC);
}

double symmetry_error(const TwoPhotonField& f) {
    const std::size_t M = f.grid.M;
    double e = 0.0;
    for (std::size_t a = 0; a < M; ++a)
        for (std::size_t b = 0; b < a; ++b) {
            e = std::max(e, std::abs(f.LL[a * M + b] - f.LL[b * M + a]));
            e = std::max(e, std::abs(f.RR[a * M + b] - f.RR[b * M + a]));
        }
    return e;
}

void evolve(TwoPhotonField& f, double t_final) {
    const double h = f.grid.h;
    if (!(t_final > f.t())) throw Error(ErrorKind::Config, "BadTime", "t_final must exceed the field time");
    const auto n = static_cast<std::size_t>(std::llround((t_final - f.t()) / h));
    if (f.steps + n > f.grid.M)
        throw Error(ErrorKind::Numerical, "DomainOverrun",
                    "grid holds " + std::to_string(f.grid.M - f.steps) + " more steps, " + std::to_string(n) +
                        " requested");
    const Junction J(f.cavity, f.omega_0, h);
    const std::size_t check_every = std::max<std::size_t>(n / 4, 1);
    for (std::size_t i = 0; i < n; ++i) {
        step(f, J);
        if ((i + 1) % check_every == 0 || i + 1 == n) {
            const double drift = std::abs(norm(f) - f.norm0);
            if (!(drift <= 1e-4))
                throw Error(ErrorKind::Numerical, "UnstableStep",
                            "norm drift " + std::to_string(drift) + " at t=" + std::to_string(f.t()));
        }
    }
}

ScatteredAmplitudes extract_amplitudes(const TwoPhotonField& f, double d_max) {
    const double pop = cavity_population(f);
    if (pop > 1e-6)
        throw Error(ErrorKind::Numerical, "CavityNotEmpty", "cavity still holds " + std::to_string(pop));
    const std::size_t M = f.grid.M;
    const double h = f.grid.h;
    const auto mmax = std::min<std::size_t>(M - 1, static_cast<std::size_t>(std::ceil(d_max / (f.cavity.gamma() * h))));
    std::size_t c = static_cast<std::size_t>(std::floor(-f.grid.lo / h));
    c = std::min(c, M - 1);

    ScatteredAmplitudes r;
    r.h = h;
    // The propagator couples the cavity with +kappa; the closed forms use
    // the opposite sign of the cavity mode, which flips every single-photon
    // amplitude and leaves pair amplitudes unchanged.
    if (f.mixed_den > 0) {
        r.c_L = -f.mixed_num_L / f.mixed_den;
        r.c_R = -f.mixed_num_R / f.mixed_den;
    }
    for (auto& v : r.prob) v.resize(mmax + 1);
    for (auto& v : r.center_cut) v.resize(mmax + 1);
    r.d.resize(mmax + 1);
    for (std::size_t m = 0; m <= mmax; ++m) {
        r.d[m] = m * h;
        double nll = 0, nrr = 0, nlr = 0, den = 0;
        for (std::size_t b = 0; b + m < M; ++b) {
            const std::size_t a = b + m;
            const double w = incident_envelope(f.envelope, f.tau, f.cm_width, f.grid.xi(a), f.grid.xi(b));
            den += w * w;
            nll += std::norm(f.at(f.LL, a, b));
            nrr += std::norm(f.at(f.RR, a, b));
            nlr += 0.5 * (std::norm(f.at(f.LR, a, b)) + std::norm(f.at(f.LR, b, a)));
        }
        r.prob[0][m] = den > 0 ? nll / den : 0.0;
        r.prob[1][m] = den > 0 ? nrr / den : 0.0;
        r.prob[2][m] = den > 0 ? nlr / den : 0.0;
        if (c + m < M) {
            const double w = incident_envelope(f.envelope, f.tau, f.cm_width, f.grid.xi(c + m), f.grid.xi(c));
            if (w > 0) {
                r.center_cut[0][m] = f.at(f.LL, c + m, c) / w;
                r.center_cut[1][m] = f.at(f.RR, c + m, c) / w;
                r.center_cut[2][m] = f.at(f.LR, c + m, c) / w;
            }
        }
    }
    return r;
}

void write_cut_csv(const ScatteredAmplitudes& a, std::ostream& os) {
    os << "d,|a_LL|^2,|a_RR|^2,|a_LR|^2\n";
    char buf[160];
    for (std::size_t m = 0; m < a.d.size(); ++m) {
        std::snprintf(buf, sizeof buf, "%.10e,%.12e,%.12e,%.12e\n", a.d[m], a.prob[0][m], a.prob[1][m], a.prob[2][m]);
        os << buf;
    }
}

namespace {

constexpr char kMagic[8] = {'K', 'J', 'F', 'I', 'E', 'L', 'D', '1'};

template <class T>
void put(std::ofstream& o, const T& v) {
    o.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
void get(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
}
void put_array(std::ofstream& o, const std::vector<cplx>& v) {
    o.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(cplx)));
}
void get_array(std::ifstream& in, std::vector<cplx>& v, std::size_t n) {
    v.resize(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(cplx)));
}

} // namespace

void save_checkpoint(const TwoPhotonField& f, const std::string& path) {
    std::ofstream o(path, std::ios::binary);
    if (!o) throw Error(ErrorKind::Io, "WriteFailed", "cannot open '" + path + "'");
    o.write(kMagic, 8);
    put<std::uint64_t>(o, f.grid.M);
    put<std::uint64_t>(o, f.steps);
    for (double v : {f.grid.h, f.grid.lo, f.omega_0, f.tau, f.cm_width, f.cavity.omega_c, f.cavity.u, f.cavity.gamma_L,
                     f.cavity.gamma_R, f.norm0})
        put(o, v);
    put<std::int32_t>(o, static_cast<std::int32_t>(f.envelope));
    put<std::int32_t>(o, 0);
    put(o, f.mixed_num_L);
    put(o, f.mixed_num_R);
    put(o, f.mixed_den);
    put(o, f.CC);
    put_array(o, f.LC);
    put_array(o, f.RC);
    put_array(o, f.LL);
    put_array(o, f.RR);
    put_array(o, f.LR);
    if (!o) throw Error(ErrorKind::Io, "WriteFailed", "short write to '" + path + "'");
}

TwoPhotonField load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "ReadFailed", "cannot open '" + path + "'");
    char magic[8];
    in.read(magic, 8);
    if (!in || !std::equal(magic, magic + 8, kMagic))
        throw Error(ErrorKind::Io, "BadCheckpoint", "'" + path + "' is not a field checkpoint");
    TwoPhotonField f;
    std::uint64_t M = 0, steps = 0;
    get(in, M);
    get(in, steps);
    f.grid.M = M;
    f.steps = steps;
    for (double* v : {&f.grid.h, &f.grid.lo, &f.omega_0, &f.tau, &f.cm_width, &f.cavity.omega_c, &f.cavity.u,
                      &f.cavity.gamma_L, &f.cavity.gamma_R, &f.norm0})
        get(in, *v);
    std::int32_t env = 0, pad = 0;
    get(in, env);
    get(in, pad);
    if (env < 1 || env > 2) throw Error(ErrorKind::Io, "BadCheckpoint", "'" + path + "' has an unknown envelope");
    f.envelope = static_cast<Envelope>(env);
    get(in, f.mixed_num_L);
    get(in, f.mixed_num_R);
    get(in, f.mixed_den);
    get(in, f.CC);
    get_array(in, f.LC, M);
    get_array(in, f.RC, M);
    get_array(in, f.LL, M * M);
    get_array(in, f.RR, M * M);
    get_array(in, f.LR, M * M);
    if (!in) throw Error(ErrorKind::Io, "BadCheckpoint", "'" + path + "' is truncated");
    return f;
}

PulseRun run_pulse(const CavityParams& p, const PulseSpec& pulse, const PropagatorOptions& opt, TwoPhotonField* keep) {
    PulseRun r;
    r.t_final = default_t_final(p, pulse, opt);
    TwoPhotonField f = init_field(p, pulse, opt, r.t_final);
    r.grid = f.grid;
    r.norm_initial = f.norm0;
    evolve(f, r.t_final);
    r.norm_final = norm(f);
    r.amps = extract_amplitudes(f);
    if (keep) *keep = std::move(f);
    return r;
}

SinglePhotonField propagate_single_photon(const CavityParams& p, double omega_0, const GridSpec& g,
                                          const std::vector<cplx>& incident_L, std::size_t steps) {
    if (steps > g.M) throw Error(ErrorKind::Numerical, "DomainOverrun", "more steps than cells");
    const Junction J(p, omega_0, g.h);
    const double sh = std::sqrt(g.h);
    SinglePhotonField s;
    s.L = incident_L;
    s.R.assign(g.M, cplx(0.0));
    for (std::size_t n = 0; n < steps; ++n) {
        const std::size_t k = g.M - 1 - n;
        s.C *= J.p1;
        cplx x0 = sh * s.L[k], x1 = sh * s.R[k];
        J.apply(x0, x1, s.C);
        s.L[k] = x0 / sh;
        s.R[k] = x1 / sh;
        s.C *= J.p1;
    }
    return s;
}

} // namespace kerrj
