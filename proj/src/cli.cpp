#include "kerrj/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kerrj/langevin.hpp"
#include "kerrj/lindblad.hpp"
#include "kerrj/parallel.hpp"
#include "kerrj/propagator.hpp"
#include "kerrj/scattering.hpp"

namespace kerrj {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// Subcommand controls from the optional "run" object. Every key read is
// recorded; anything left over is rejected.
class Controls {
public:
    explicit Controls(nlohmann::json j) : j_(std::move(j)) {}

    double num(const std::string& k, double def) {
        used_.insert(k);
        auto it = j_.find(k);
        double v = def;
        if (it != j_.end()) {
            if (!it->is_number()) throw Error(ErrorKind::Config, "BadType", "run." + k + " must be a number");
            v = it->get<double>();
        }
        resolved_[k] = v;
        return v;
    }
    int integer(const std::string& k, int def) {
        const double v = num(k, def);
        if (v != std::floor(v)) throw Error(ErrorKind::Config, "BadType", "run." + k + " must be an integer");
        resolved_[k] = static_cast<int>(v);
        return static_cast<int>(v);
    }
    bool has(const std::string& k) const { return j_.contains(k); }
    std::string str(const std::string& k, const std::string& def) {
        used_.insert(k);
        auto it = j_.find(k);
        std::string v = def;
        if (it != j_.end()) {
            if (!it->is_string()) throw Error(ErrorKind::Config, "BadType", "run." + k + " must be a string");
            v = it->get<std::string>();
        }
        resolved_[k] = v;
        return v;
    }
    bool flag(const std::string& k, bool def) {
        used_.insert(k);
        auto it = j_.find(k);
        bool v = def;
        if (it != j_.end()) {
            if (!it->is_boolean()) throw Error(ErrorKind::Config, "BadType", "run." + k + " must be a boolean");
            v = it->get<bool>();
        }
        resolved_[k] = v;
        return v;
    }
    void finish() const {
        std::vector<Issue> issues;
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) issues.push_back({"UnknownKey", "unknown key 'run." + it.key() + "'"});
        if (!issues.empty()) throw Error(ErrorKind::Config, std::move(issues));
    }
    const ojson& resolved() const { return resolved_; }

private:
    nlohmann::json j_;
    std::set<std::string> used_;
    ojson resolved_ = ojson::object();
};

struct Loaded {
    Config cfg;
    nlohmann::json run;
};

Loaded load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "ReadFailed", "cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Config, "BadJson", path + ": " + e.what());
    }
    if (!j.is_object()) throw Error(ErrorKind::Config, "BadJson", path + ": top level must be an object");
    Loaded l;
    l.run = nlohmann::json::object();
    if (j.contains("run")) {
        l.run = j["run"];
        if (!l.run.is_object()) throw Error(ErrorKind::Config, "BadType", "'run' must be an object");
        j.erase("run");
    }
    l.cfg = config_from_json_text(j.dump());
    return l;
}

std::string fmt(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.12e", v);
    return b;
}

class Output {
public:
    Output(const fs::path& dir, const std::string& name) : path_(dir / name) {
        os_.open(path_);
        if (!os_) throw Error(ErrorKind::Io, "WriteFailed", "cannot open '" + path_.string() + "'");
    }
    std::ofstream& os() { return os_; }
    void close() {
        os_.close();
        if (!os_) throw Error(ErrorKind::Io, "WriteFailed", "write to '" + path_.string() + "' failed");
    }

private:
    fs::path path_;
    std::ofstream os_;
};

void provenance(std::ostream& os, const std::string& sub, const Config& cfg, const Controls& c) {
    os << "# kerrjunction " << kVersion << " " << sub << "\n";
    os << "# config: " << config_to_json_text(cfg) << "\n";
    os << "# run: " << c.resolved().dump() << "\n";
}

void write_json(const fs::path& dir, const std::string& name, const ojson& j) {
    Output o(dir, name);
    o.os() << j.dump(2) << "\n";
    o.close();
}

Port port(const std::string& s) {
    if (s == "L") return Port::L;
    if (s == "R") return Port::R;
    throw Error(ErrorKind::Config, "BadPort", "port must be \"L\" or \"R\"");
}

std::vector<double> grid_from(Controls& c, const std::string& prefix, double lo, double hi, int n) {
    const double a = c.num(prefix + "_min", lo);
    const double b = c.num(prefix + "_max", hi);
    const int m = c.integer(prefix + "_points", n);
    if (m < 1) throw Error(ErrorKind::Config, "EmptyGrid", prefix + " grid needs at least one point");
    if (m > 1 && !(b > a)) throw Error(ErrorKind::Config, "EmptyGrid", prefix + "_max must exceed " + prefix + "_min");
    return linspace(a, b, m);
}

// Drive amplitude: explicit f, a target mean-field population, or b and tau.
cplx resolve_drive(Controls& c, const Config& cfg) {
    const auto& p = cfg.cavity;
    if (c.has("target_population")) {
        const double n = c.num("target_population", 0.0);
        if (!(n >= 0)) throw Error(ErrorKind::Config, "BadDrive", "target_population must be >= 0");
        return drive_for_population(p, cfg.pulse.omega_0, n);
    }
    if (c.has("f_re") || c.has("f_im")) return {c.num("f_re", 0.0), c.num("f_im", 0.0)};
    if (!std::isfinite(cfg.pulse.tau))
        throw Error(ErrorKind::Config, "BadDrive", "drive from b needs a finite tau (or give f_re/f_im)");
    return drive_amplitude(p, cfg.pulse);
}

void cmd_amplitudes(const Config& cfg, Controls& c, const fs::path& out) {
    const auto& p = cfg.cavity;
    const double g = p.gamma();
    const auto grid = grid_from(c, "omega0", p.omega_c - 4 * g, p.omega_c + std::max(8 * g, p.u + 4 * g), 241);
    const double d = c.num("d", 0.0);
    c.finish();
    Output o(out, "amplitudes.csv");
    provenance(o.os(), "amplitudes", cfg, c);
    o.os() << "omega0,|aLL|^2,|aRR|^2,|aLR|^2\n";
    for (double w : grid)
        o.os() << fmt(w) << "," << fmt(std::norm(pair_amplitude(p, w, Channel::LL, d))) << ","
               << fmt(std::norm(pair_amplitude(p, w, Channel::RR, d))) << ","
               << fmt(std::norm(pair_amplitude(p, w, Channel::LR, d))) << "\n";
    o.close();
}

void cmd_spectrum(const Config& cfg, Controls& c, const fs::path& out) {
    const auto& p = cfg.cavity;
    const double w0 = cfg.pulse.omega_0;
    const auto def = default_spectral_grid(p, w0);
    const auto grid = grid_from(c, "omega", def.front(), def.back(), static_cast<int>(def.size()));
    const Port po = port(c.str("out_port", "R")), pi = port(c.str("in_port", "L"));
    c.finish();
    const auto s = pair_spectral_density(p, w0, cfg.pulse.tau, po, pi, grid);
    Output o(out, "spectrum.csv");
    provenance(o.os(), "spectrum", cfg, c);
    o.os() << "# delta_weight: " << fmt(s.delta_weight) << (s.tau_factored_out ? " (tau factored out)" : "")
           << "\n";
    o.os() << "omega,S_continuous\n";
    for (std::size_t k = 0; k < grid.size(); ++k) o.os() << fmt(grid[k]) << "," << fmt(s.continuous[k]) << "\n";
    o.close();
}

void cmd_spectrum2(const Config& cfg, Controls& c, const fs::path& out) {
    const auto& p = cfg.cavity;
    const double g = p.gamma();
    const auto w0s = grid_from(c, "omega0", p.omega_c - 4 * g, p.omega_c + std::max(8 * g, p.u + 4 * g), 101);
    const auto ws = grid_from(c, "omega", p.omega_c - 12 * g, p.omega_c + std::max(20 * g, 2 * p.u + 12 * g), 101);
    const Port po = port(c.str("out_port", "R")), pi = port(c.str("in_port", "L"));
    c.finish();
    Output o(out, "spectrum2.csv");
    provenance(o.os(), "spectrum2", cfg, c);
    o.os() << "omega0,omega,S_continuous,delta_weight\n";
    for (double w0 : w0s) {
        const auto s = pair_spectral_density(p, w0, cfg.pulse.tau, po, pi, ws);
        for (std::size_t k = 0; k < ws.size(); ++k)
            o.os() << fmt(w0) << "," << fmt(ws[k]) << "," << fmt(s.continuous[k]) << "," << fmt(s.delta_weight) << "\n";
    }
    o.close();
}

void cmd_pulse(const Config& cfg, Controls& c, const fs::path& out, int workers) {
    const auto& p = cfg.cavity;
    std::vector<double> w0s{cfg.pulse.omega_0};
    const bool scan = c.has("omega0_points") || c.has("omega0_min") || c.has("omega0_max");
    if (scan) w0s = grid_from(c, "omega0", p.omega_c - 4 * p.gamma(), p.omega_c + 8 * p.gamma(), 25);
    PropagatorOptions opt;
    opt.h = c.num("h", 0.0);
    opt.cm_width = c.num("cm_width", 0.0);
    const bool checkpoint = c.flag("checkpoint", false);
    c.finish();

    std::vector<PulseRun> runs(w0s.size());
    std::vector<TwoPhotonField> keep(checkpoint && !scan ? 1 : 0);
    parallel_for(w0s.size(), workers, [&](std::size_t i) {
        PulseSpec ps = cfg.pulse;
        ps.omega_0 = w0s[i];
        runs[i] = run_pulse(p, ps, opt, keep.empty() ? nullptr : &keep[0]);
        const double drift = std::abs(runs[i].norm_final - runs[i].norm_initial);
        if (drift > 1e-6)
            throw Error(ErrorKind::Numerical, "NormDrift", "norm drift " + std::to_string(drift) + " exceeds 1e-6");
    });

    Output o(out, "pulse.csv");
    provenance(o.os(), "pulse", cfg, c);
    o.os() << "omega0,|aLL|^2,|aRR|^2,|aLR|^2,norm_drift\n";
    for (std::size_t i = 0; i < w0s.size(); ++i) {
        const auto& a = runs[i].amps;
        o.os() << fmt(w0s[i]) << "," << fmt(a.d0(Channel::LL)) << "," << fmt(a.d0(Channel::RR)) << ","
               << fmt(a.d0(Channel::LR)) << "," << fmt(runs[i].norm_final - runs[i].norm_initial) << "\n";
    }
    o.close();

    if (!scan) {
        Output cut(out, "cut.csv");
        provenance(cut.os(), "pulse", cfg, c);
        const auto& a = runs[0].amps;
        cut.os() << "# c_L: " << fmt(a.c_L.real()) << " " << fmt(a.c_L.imag()) << "  c_R: " << fmt(a.c_R.real())
                 << " " << fmt(a.c_R.imag()) << "\n";
        write_cut_csv(a, cut.os());
        cut.close();
        if (checkpoint) save_checkpoint(keep[0], (out / "field.bin").string());
    }
}

void cmd_emission(const Config& cfg, Controls& c, const fs::path& out) {
    const auto& p = cfg.cavity;
    const double w0 = cfg.pulse.omega_0;
    const int N = c.integer("cutoff", 8);
    const double tmax = c.num("t_max", 40.0 / p.gamma());
    const double dt = c.num("dt", 0.01 / p.gamma());
    const auto def = default_spectral_grid(p, w0);
    const auto grid = grid_from(c, "omega", def.front(), def.back(), static_cast<int>(def.size()));
    const cplx f = resolve_drive(c, cfg);
    c.finish();

    const auto L = build_liouvillian(p, w0, f, N);
    const auto rho = steady_state(L);
    const auto corr = two_time_correlator(rho, L, tmax, dt);
    const auto s = emission_spectrum(corr, p.gamma_R, grid);

    Output o(out, "emission.csv");
    provenance(o.os(), "emission", cfg, c);
    o.os() << "# delta_weight: " << fmt(s.delta_weight) << "\n";
    o.os() << "omega,S_continuous\n";
    for (std::size_t k = 0; k < grid.size(); ++k) o.os() << fmt(grid[k]) << "," << fmt(s.continuous[k]) << "\n";
    o.close();

    ojson rep;
    rep["f"] = {f.real(), f.imag()};
    rep["mean_a"] = {corr.mean.real(), corr.mean.imag()};
    rep["abs_mean_a_sq"] = corr.asymptote;
    rep["photon_number"] = corr.n_ss;
    rep["g2"] = gn(rho, 2);
    rep["delta_weight"] = s.delta_weight;
    rep["steady_residual"] = steady_residual(L, rho);
    rep["min_eigenvalue"] = rho.min_eigenvalue();
    write_json(out, "emission.json", rep);
}

void cmd_gn(const Config& cfg, Controls& c, const fs::path& out, int workers) {
    const auto& p = cfg.cavity;
    const int N = c.integer("cutoff", 12);
    const auto det = grid_from(c, "detuning", -6.0 * p.gamma(), 16.0 * p.gamma(), 221);
    const cplx f = resolve_drive(c, cfg);
    c.finish();
    const auto s = gn_scan(p, f, det, {2, 3, 4}, N, workers);

    Output o(out, "gn.csv");
    provenance(o.os(), "gn", cfg, c);
    o.os() << "detuning,g2,g3,g4\n";
    for (std::size_t i = 0; i < det.size(); ++i)
        o.os() << fmt(det[i]) << "," << fmt(s.g[0][i]) << "," << fmt(s.g[1][i]) << "," << fmt(s.g[2][i]) << "\n";
    o.close();

    ojson rep;
    rep["f"] = {f.real(), f.imag()};
    for (std::size_t k = 0; k < s.orders.size(); ++k) rep["peak_detuning"]["g" + std::to_string(s.orders[k])] = s.peak[k];
    write_json(out, "gn.json", rep);
}

void cmd_langevin(const Config& cfg, Controls& c, const fs::path& out) {
    const auto& p = cfg.cavity;
    const double w0 = cfg.pulse.omega_0;
    const auto def = default_spectral_grid(p, w0);
    const auto grid = grid_from(c, "omega", def.front(), def.back(), static_cast<int>(def.size()));
    c.finish();
    if (!std::isfinite(cfg.pulse.tau))
        throw Error(ErrorKind::Config, "BadTau", "the weak-nonlinearity spectrum needs a finite tau");
    const auto a = analytic_spectrum(p, cfg.pulse, grid);
    const cplx f = drive_amplitude(p, cfg.pulse);
    const auto st = steady_amplitude(p, w0, f);
    const auto lin = linearize(p, w0, st);

    Output o(out, "langevin.csv");
    provenance(o.os(), "langevin", cfg, c);
    o.os() << "# delta_weight: " << fmt(a.spectrum.delta_weight) << "\n";
    o.os() << "omega,S_continuous\n";
    for (std::size_t k = 0; k < grid.size(); ++k)
        o.os() << fmt(grid[k]) << "," << fmt(a.spectrum.continuous[k]) << "\n";
    o.close();

    ojson rep;
    rep["f"] = {f.real(), f.imag()};
    rep["roots"] = ojson::array();
    for (std::size_t i = 0; i < st.roots.size(); ++i)
        rep["roots"].push_back({{"re", st.roots[i].real()}, {"im", st.roots[i].imag()}, {"n", st.n_bar[i]}});
    rep["selected"] = st.selected;
    rep["multiple_roots"] = st.multiple;
    rep["drift"] = {{lin.A(0, 0), lin.A(0, 1)}, {lin.A(1, 0), lin.A(1, 1)}};
    rep["eigenvalues"] = {{lin.eigenvalues[0].real(), lin.eigenvalues[0].imag()},
                          {lin.eigenvalues[1].real(), lin.eigenvalues[1].imag()}};
    rep["stable"] = lin.stable;
    rep["outside_validity"] = a.outside_validity;
    write_json(out, "roots.json", rep);
}

int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Numerical: return 3;
    case ErrorKind::Io: return 4;
    }
    return 3;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Few-photon transport through a Kerr microcavity junction"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int workers = 0;
    const std::vector<std::pair<std::string, std::string>> subs = {
        {"amplitudes", "two-photon amplitudes at d=0 versus omega_0 (closed form)"},
        {"spectrum", "pair spectral density at one carrier frequency"},
        {"spectrum2", "pair spectral density map over (omega_0, omega)"},
        {"pulse", "finite-pulse wavefunction propagation"},
        {"emission", "driven-cavity emission spectrum from the master equation"},
        {"gn", "g2, g3, g4 versus drive detuning"},
        {"langevin", "mean-field roots, linearization and weak-nonlinearity spectrum"}};
    for (const auto& [name, desc] : subs) {
        auto* s = app.add_subcommand(name, desc);
        s->add_option("--config", config_path, "JSON configuration")->required();
        s->add_option("--out", out_dir, "output directory")->required();
        s->add_option("--workers", workers, "worker threads (default: KERRJ_THREADS or all cores)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    if (workers <= 0) workers = default_workers();

    try {
        const Loaded l = load(config_path);
        Controls c(l.run);
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) throw Error(ErrorKind::Io, "WriteFailed", "cannot create '" + out_dir + "': " + ec.message());
        const fs::path out(out_dir);
        if (sub == "amplitudes") cmd_amplitudes(l.cfg, c, out);
        else if (sub == "spectrum") cmd_spectrum(l.cfg, c, out);
        else if (sub == "spectrum2") cmd_spectrum2(l.cfg, c, out);
        else if (sub == "pulse") cmd_pulse(l.cfg, c, out, workers);
        else if (sub == "emission") cmd_emission(l.cfg, c, out);
        else if (sub == "gn") cmd_gn(l.cfg, c, out, workers);
        else if (sub == "langevin") cmd_langevin(l.cfg, c, out);
    } catch (const Error& e) {
        std::cerr << "kerrjunction " << sub << ": " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::bad_alloc&) {
        std::cerr << "kerrjunction " << sub << ": out of memory\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "kerrjunction " << sub << ": " << e.what() << "\n";
        return 3;
    }
    return 0;
}

} // namespace kerrj
