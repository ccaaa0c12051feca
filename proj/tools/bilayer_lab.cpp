#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "bilayer/chain.hpp"
#include "bilayer/composites.hpp"
#include "bilayer/config.hpp"
#include "bilayer/diagrams.hpp"
#include "bilayer/simulator.hpp"
#include "bilayer/verify.hpp"

namespace fs = std::filesystem;
using namespace bilayer;

namespace {

enum Exit { kOk = 0, kUsage = 1, kConstraint = 2, kAbort = 3, kVerify = 4 };

// Reads flat JSON or key=value files; keys may use '_' for '-'. Keys are routed to
// the subcommand chosen on the command line.
class LabConfig : public CLI::Config {
public:
    explicit LabConfig(const CLI::App* app) : app_(app) {}

    std::string to_config(const CLI::App* app, bool defaults, bool write_desc, std::string prefix) const override {
        return CLI::ConfigINI().to_config(app, defaults, write_desc, std::move(prefix));
    }
    std::vector<CLI::ConfigItem> from_config(std::istream& is) const override {
        const auto subs = app_->get_subcommands();
        std::vector<CLI::ConfigItem> out;
        try {
            for (auto& e : parse_config(is)) {
                CLI::ConfigItem item;
                if (!subs.empty()) item.parents = {subs.front()->get_name()};
                item.name = e.key;
                std::replace(item.name.begin(), item.name.end(), '_', '-');
                item.inputs = e.values;
                const CLI::App* target = subs.empty() ? app_ : subs.front();
                if (!target->get_option_no_throw("--" + item.name) && !app_->get_option_no_throw("--" + item.name))
                    throw UsageError("unknown config key '" + e.key + "' for " + target->get_name());
                if (!subs.empty() && !target->get_option_no_throw("--" + item.name)) item.parents.clear();
                out.push_back(std::move(item));
            }
        } catch (const UsageError& err) {
            throw CLI::ConversionError(err.what());
        }
        return out;
    }

private:
    const CLI::App* app_;
};

int thread_cap(int requested) {
    int n = requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("BILAYER_LAB_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1) n = std::min(n, cap);
        } catch (const std::exception&) {
            throw UsageError(std::string("BILAYER_LAB_THREADS is not an integer: ") + env);
        }
    }
    return n;
}

PotentialParams potential_from(const std::string& nl, double eps) {
    PotentialParams p;
    const auto comma = nl.find(',');
    if (comma == std::string::npos) throw UsageError("--nl expects 'n,l', got '" + nl + "'");
    try {
        p.n = std::stoi(nl.substr(0, comma));
        p.l = std::stoi(nl.substr(comma + 1));
    } catch (const std::exception&) {
        throw UsageError("--nl expects two integers, got '" + nl + "'");
    }
    p.eps = eps;
    p.validate();
    return p;
}

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::string tok;
    std::istringstream is(text);
    while (std::getline(is, tok, ',')) {
        std::istringstream ts(tok);
        ts.imbue(std::locale::classic());
        double v = 0.0;
        if (!(ts >> v) || !(ts >> std::ws).eof()) throw UsageError(what + ": cannot parse '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

std::pair<double, double> parse_range(const std::string& text, const std::string& what) {
    const auto v = parse_numbers(text, what);
    if (v.size() != 2) throw UsageError(what + " expects 'lo,hi'");
    return {v[0], v[1]};
}

/// "h1,h" or "h1,h;h1,h;..."
std::vector<HeightPair> parse_heights(const std::string& text) {
    std::vector<HeightPair> out;
    std::string group;
    std::istringstream is(text);
    while (std::getline(is, group, ';')) {
        const auto v = parse_numbers(group, "--heights");
        if (v.size() != 2) throw UsageError("--heights expects pairs 'h1,h' separated by ';'");
        out.push_back({v[0], v[1]});
    }
    if (out.empty()) throw UsageError("--heights is empty");
    return out;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw UsageError("cannot create output directory " + dir + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw UsageError("cannot write " + path.string());
    f.imbue(std::locale::classic());
    return f;
}

void write_plotscript(const fs::path& dir, const std::string& body) {
    auto f = open_out(dir / "plot.py");
    f << "# Plots the CSV files in this directory; run with python3 plot.py\n"
         "import csv\nimport glob\nimport os\nimport matplotlib\nmatplotlib.use('Agg')\n"
         "import matplotlib.pyplot as plt\n\n"
         "here = os.path.dirname(os.path.abspath(__file__))\n\n"
         "def read(name):\n"
         "    with open(os.path.join(here, name)) as f:\n"
         "        rows = list(csv.DictReader(f))\n"
         "    return {k: [float(r[k]) for r in rows] for k in rows[0]} if rows else {}\n\n"
      << body;
}

// construct --------------------------------------------------------------------

struct ConstructArgs {
    std::string kind;
    double sigma = 0.2;
    double L = 2.0;
    double hm = 0.0;
    double h1m = 0.0;
    std::string nl = "2,3";
    double shift = 0.0;
    bool inverted = false;
    double eps = 0.01;
    int grid = 2001;
    bool no_mollify = false;
    std::string out = "construct_out";
};

int cmd_construct(const ConstructArgs& a, bool plotscript) {
    const PotentialParams pot = potential_from(a.nl, a.eps);
    CompositeSpec spec;
    spec.kind = kind_from_string(a.kind);
    spec.sigma = a.sigma;
    spec.L = a.L;
    spec.well_depth = pot.well_depth();
    spec.h1_m = a.h1m;
    spec.h_m = a.hm;
    spec.inverted = a.inverted;
    if (spec.kind == Kind::TwoSideSessileZigZag) spec.shift = a.shift;
    if (a.grid < 2) throw UsageError("--grid must be at least 2");

    ensure_dir(a.out);
    const fs::path dir(a.out);
    const ConstraintReport rep = existence_report(spec);
    {
        auto f = open_out(dir / "constraints.txt");
        f << rep.to_text();
    }
    if (!rep.ok()) {
        std::cerr << "constraint violated: " << rep.first_violation()->id << "\n" << rep.to_text();
        return kConstraint;
    }
    const LeadingOrderSolution sol = build(spec);
    const Profile prof = sample_profile(sol, pot, a.grid, !a.no_mollify);
    write_profile_csv((dir / "profile.csv").string(), prof);

    auto f = open_out(dir / "summary.txt");
    auto opt_text = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("undetermined"); };
    f << "kind=" << kind_name(spec.kind) << "\n"
      << "solution_id=" << solution_id(spec.kind) << "\n"
      << "sigma=" << format_double(spec.sigma) << "\n"
      << "L=" << format_double(spec.L) << "\n"
      << "well_depth=" << format_double(spec.well_depth) << "\n"
      << "h1_m=" << format_double(spec.h1_m) << "\n"
      << "h_m=" << format_double(spec.h_m) << "\n"
      << "lambda1_0=" << opt_text(sol.lambda1_0) << "\n"
      << "lambda2_0=" << opt_text(sol.lambda2_0) << "\n"
      << "max_h1=" << format_double(sol.max_h1) << "\n"
      << "max_h=" << format_double(sol.max_h) << "\n";
    const auto s = sol.cl_distances();
    for (std::size_t i = 0; i < s.size(); ++i) f << "cl_distance_" << i << "=" << format_double(s[i]) << "\n";
    for (const auto& [k, v] : sol.constants) f << "const_" << k << "=" << format_double(v) << "\n";
    for (const auto& fl : sol.flags) f << "flag=" << fl << "\n";
    if (prof.resolution_warning) f << "warning=grid too coarse to resolve the contact lines\n";
    f.close();

    std::cout << "lambda1_0=" << opt_text(sol.lambda1_0) << "\nlambda2_0=" << opt_text(sol.lambda2_0) << "\n";
    if (plotscript)
        write_plotscript(dir, "p = read('profile.csv')\nplt.plot(p['x'], p['h1'], label='h1')\n"
                              "plt.plot(p['x'], [a + b for a, b in zip(p['h1'], p['h'])], label='h1+h')\n"
                              "plt.legend()\nplt.xlabel('x')\nplt.savefig(os.path.join(here, 'profile.png'))\n");
    return kOk;
}

// diagram ----------------------------------------------------------------------

struct DiagramArgs {
    double sigma = 0.2;
    double L = 2.0;
    std::string nl = "2,3";
    int res = 200;
    std::string hmax_range;
    std::string h1max_range;
    int threads = 0;
    std::string out = "diagram_out";
};

int cmd_diagram(const DiagramArgs& a, bool plotscript) {
    const PotentialParams pot = potential_from(a.nl, 0.01);
    DiagramConfig cfg = DiagramConfig::around_symmetric_points(a.sigma, a.L, pot.well_depth(), a.res);
    if (!a.hmax_range.empty()) cfg.h_max_range = parse_range(a.hmax_range, "--hmax-range");
    if (!a.h1max_range.empty()) cfg.h1_max_range = parse_range(a.h1max_range, "--h1max-range");
    cfg.threads = thread_cap(a.threads);
    cfg.validate();

    ensure_dir(a.out);
    const fs::path dir(a.out);
    {
        auto f = open_out(dir / "membership.csv");
        write_membership_csv(f, membership_grid(cfg));
    }
    {
        auto f = open_out(dir / "boundaries.csv");
        write_boundary_csv(f, ed_boundaries(cfg));
    }
    const auto [p1, p2] = symmetric_points(cfg);
    std::ostringstream pts;
    pts << "point_I_h1_max=" << format_double(p1.h1_max) << "\n"
        << "point_II_h_max=" << format_double(p2.h_max) << "\n"
        << "pentagon_constant=" << format_double(pentagon_constant(cfg)) << "\n";
    {
        auto f = open_out(dir / "symmetric_points.txt");
        f << pts.str();
    }
    DiagramConfig rcfg = cfg;
    rcfg.resolution = std::max(a.res, 50);
    const SymmetryReport rep = reflect_check(rcfg);
    std::ostringstream sym;
    sym << "resolution=" << rep.resolution << "\nchecked=" << rep.checked
        << "\nboundary_excluded=" << rep.boundary_excluded << "\nviolations=" << rep.violations << "\n";
    for (const auto& e : rep.examples) sym << "example=" << e << "\n";
    {
        auto f = open_out(dir / "symmetry.txt");
        f << sym.str();
    }
    std::cout << pts.str() << "symmetry_violations=" << rep.violations << "\n";
    if (plotscript)
        write_plotscript(dir,
                         "with open(os.path.join(here, 'boundaries.csv')) as f:\n"
                         "    rows = list(csv.DictReader(f))\n"
                         "curves = {}\n"
                         "for r in rows:\n"
                         "    curves.setdefault((r['solution_id'], r['segment']), []).append(\n"
                         "        (float(r['h_max']), float(r['h1_max'])))\n"
                         "for (sid, seg), pts in sorted(curves.items()):\n"
                         "    plt.plot([p[0] for p in pts], [p[1] for p in pts], lw=0.8, label=sid if seg == '0' else None)\n"
                         "plt.xlabel('h_max')\nplt.ylabel('h1_max')\nplt.legend(fontsize=6)\n"
                         "plt.savefig(os.path.join(here, 'boundaries.png'), dpi=150)\n");
    return kOk;
}

// simulate ---------------------------------------------------------------------

struct SimulateArgs {
    std::string init;
    std::string preset;
    std::string heights;
    double sigma = 0.2;
    double mu = 1.0;
    double L = 2.0;
    double eps = 0.01;
    std::string nl = "2,3";
    double h1m = 0.0;
    double hm = 0.0;
    int N = 0;
    double dt_init = 1e-6;
    double dt_min = 1e-14;
    double dt_max = 0.1;
    double newton_tol = 1e-10;
    int newton_max_iter = 12;
    double t_end = 1.0;
    long max_steps = 0;
    int output_every = 100;
    int snapshot_every = 0;
    bool no_mollify = false;
    double perturb = 0.0;  // eps units
    std::string out = "simulate_out";
};

struct Preset {
    double L, sigma, eps, t_end, dt_max;
    std::string init, heights;
};

const Preset& preset(const std::string& name) {
    static const std::map<std::string, Preset> presets = {
        {"fig14", {12.0, 0.2, 0.01, 1e6, 2000.0, "chain:(2-0-11-02)", "0.45,0.5"}},
        {"fig15", {2.0, 1.2, 0.005, 5e6, 2000.0, "chain:(2-0-02)", "0.08,0.15"}},
        {"fig16", {60.0, 1.2, 0.002, 1e6, 2000.0, "chain:(3-1-00-13)", "0.5,1.0"}},
        {"fig17", {5.7, 0.7, 0.003, 1e6, 2000.0, "kind:lens_on_zigzag", ""}},
    };
    const auto it = presets.find(name);
    if (it == presets.end()) throw UsageError("unknown preset '" + name + "' (fig14, fig15, fig16, fig17)");
    return it->second;
}

int cmd_simulate(SimulateArgs a, const CLI::App& sub, bool plotscript) {
    auto given = [&](const char* flag) { return sub.count(flag) > 0; };
    if (!a.preset.empty()) {
        const Preset& p = preset(a.preset);
        if (!given("--L")) a.L = p.L;
        if (!given("--sigma")) a.sigma = p.sigma;
        if (!given("--eps")) a.eps = p.eps;
        if (!given("--t-end")) a.t_end = p.t_end;
        if (!given("--dt-max")) a.dt_max = p.dt_max;
        if (!given("--init")) a.init = p.init;
        if (!given("--heights")) a.heights = p.heights;
        if (!given("--snapshot-every")) a.snapshot_every = 500;
        // Symmetric initial data need a seed for the symmetry-breaking mode to grow.
        if (!given("--perturb")) a.perturb = 1e-4;
        if (a.preset == "fig17") {
            if (!given("--h1m")) a.h1m = 0.6;
            if (!given("--hm")) a.hm = 0.1;
        }
    }
    if (a.init.empty()) throw UsageError("simulate needs --init kind:<name>, chain:<expr> or file:<path>");

    SimParams prm;
    prm.sigma = a.sigma;
    prm.mu = a.mu;
    prm.potential = potential_from(a.nl, a.eps);
    prm.L = a.L;
    prm.dt_init = a.dt_init;
    prm.dt_min = a.dt_min;
    prm.dt_max = a.dt_max;
    prm.newton_tol = a.newton_tol;
    prm.newton_max_iter = a.newton_max_iter;
    prm.t_end = a.t_end;
    prm.max_steps = a.max_steps;
    prm.output_every = a.output_every;
    const int default_n = static_cast<int>(std::lround(16.0 * a.L / a.eps)) + 1;
    prm.N = a.N > 0 ? a.N : default_n;

    const auto colon = a.init.find(':');
    if (colon == std::string::npos) throw UsageError("--init must be kind:<name>, chain:<expr> or file:<path>");
    const std::string src = a.init.substr(0, colon);
    const std::string arg = a.init.substr(colon + 1);
    Profile initial;
    if (src == "kind") {
        CompositeSpec spec = reference_spec(kind_from_string(arg));
        spec.sigma = a.sigma;
        spec.L = a.L;
        spec.well_depth = prm.potential.well_depth();
        if (given("--h1m") || a.h1m > 0.0) spec.h1_m = a.h1m;
        if (given("--hm") || a.hm > 0.0) spec.h_m = a.hm;
        initial = sample_profile(build(spec), prm.potential, prm.N, !a.no_mollify);
    } else if (src == "chain") {
        const auto heights = parse_heights(a.heights.empty() ? "0.45,0.5" : a.heights);
        initial = assemble_chain(parse_chain(arg), prm.potential, prm.sigma, prm.L, heights, prm.N, !a.no_mollify);
    } else if (src == "file") {
        initial = read_profile_csv(arg);
        if (!given("--L")) prm.L = initial.length();
        if (a.N <= 0) prm.N = static_cast<int>(initial.size());
    } else {
        throw UsageError("unknown --init source '" + src + "'");
    }
    prm.validate();
    if (a.perturb != 0.0) perturb_antisymmetric(initial, a.perturb * prm.potential.eps);

    ensure_dir(a.out);
    const fs::path dir(a.out);
    const SimState s0 = state_from_profile(initial, prm);

    auto write_state = [&](const fs::path& path, const SimState& s) {
        const auto [p1, p2] = pressures(s, prm);
        write_profile_csv(path.string(), profile_from_state(s, prm), &p2, &p1);
    };
    auto index = std::make_shared<std::ofstream>();
    RunCallbacks cb;
    if (a.snapshot_every > 0) {
        ensure_dir((dir / "snapshots").string());
        *index = open_out(dir / "snapshots" / "index.csv");
        *index << "index,t,file\n";
        cb.snapshot_every = a.snapshot_every;
        auto counter = std::make_shared<int>(0);
        cb.on_snapshot = [&, index, counter](const SimState& s, const Diagnostics&) {
            char name[32];
            std::snprintf(name, sizeof name, "snap_%06d.csv", *counter);
            write_state(dir / "snapshots" / name, s);
            *index << *counter << "," << format_double(s.t) << "," << name << "\n";
            ++*counter;
        };
    }
    const RunResult res = run(prm, initial, cb);

    {
        auto f = open_out(dir / "trajectory.csv");
        f << "t,dt,energy,mass1,mass,min_h1,min_h,newton_iters,symmetry_metric\n";
        for (const auto& d : res.trajectory)
            f << format_double(d.t) << "," << format_double(d.dt) << "," << format_double(d.energy) << ","
              << format_double(d.mass1) << "," << format_double(d.mass) << "," << format_double(d.min_h1) << ","
              << format_double(d.min_h) << "," << d.newton_iters << "," << format_double(d.symmetry_metric) << "\n";
    }
    write_state(dir / "final.csv", res.final_state);

    const Diagnostics& first = res.trajectory.front();
    const Diagnostics& last = res.trajectory.back();
    std::cout << "N=" << prm.N << "\naccepted=" << res.accepted << "\nrejected=" << res.rejected
              << "\nt_final=" << format_double(res.final_state.t) << "\nenergy_initial=" << format_double(first.energy)
              << "\nenergy_final=" << format_double(last.energy)
              << "\nmax_energy_increase=" << format_double(res.max_energy_increase)
              << "\nsymmetry_initial=" << format_double(first.symmetry_metric)
              << "\nsymmetry_final=" << format_double(last.symmetry_metric) << "\ncl_count_final=" << last.cls.size()
              << "\n";
    if (plotscript)
        write_plotscript(dir, "p = read('final.csv')\nplt.subplot(2, 1, 1)\nplt.plot(p['x'], p['h1'], label='h1')\n"
                              "plt.plot(p['x'], [a + b for a, b in zip(p['h1'], p['h'])], label='h1+h')\n"
                              "plt.legend()\ntr = read('trajectory.csv')\nplt.subplot(2, 1, 2)\n"
                              "plt.semilogx(tr['t'][1:], tr['energy'][1:])\nplt.xlabel('t')\nplt.ylabel('energy')\n"
                              "plt.savefig(os.path.join(here, 'simulation.png'), dpi=150)\n");
    if (res.aborted) {
        std::cerr << "aborted: " << res.abort_reason << "\n";
        std::cout << "classification=aborted\n";
        return kAbort;
    }
    std::cout << "classification=" << to_string(classify_run(s0, res.final_state, prm)) << "\n";
    return kOk;
}

// verify -----------------------------------------------------------------------

int cmd_verify(const std::string& suite, int samples, std::uint64_t seed, int threads) {
    SuiteOptions opt;
    opt.samples = samples;
    opt.seed = seed;
    opt.threads = thread_cap(threads);
    if (samples < 1) throw UsageError("--samples must be positive");
    const auto checks = run_suite(suite, opt);
    int failed = 0;
    for (const auto& c : checks) {
        std::cout << format_check(c) << "\n";
        failed += c.pass ? 0 : 1;
    }
    std::cout << "summary checks=" << checks.size() << " failed=" << failed << "\n";
    return failed == 0 ? kOk : kVerify;
}

}  // namespace

int main(int argc, char** argv) {
    std::cout.imbue(std::locale::classic());
    CLI::App app{"Bilayer thin-film composite solutions, existence diagrams and simulations"};
    app.require_subcommand(1);
    bool plotscript = false;
    app.add_flag("--emit-plotscript", plotscript, "Also write plot.py next to the CSV output");
    app.set_config("--config", "", "JSON or key=value file supplying the subcommand's flags");
    app.config_formatter(std::make_shared<LabConfig>(&app));
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.fallthrough();

    ConstructArgs ca;
    auto* construct = app.add_subcommand("construct", "Build a leading-order composite solution");
    construct->add_option("--kind", ca.kind, "Solution kind")->required();
    construct->add_option("--sigma", ca.sigma);
    construct->add_option("--L", ca.L, "Half period");
    construct->add_option("--hm", ca.hm);
    construct->add_option("--h1m", ca.h1m);
    construct->add_option("--nl", ca.nl, "Potential exponents n,l");
    construct->add_option("--shift", ca.shift, "Free shift for two_side_sessile_zigzag");
    construct->add_flag("--inverted", ca.inverted);
    construct->add_option("--eps", ca.eps);
    construct->add_option("--grid", ca.grid, "Profile sample count");
    construct->add_flag("--no-mollify", ca.no_mollify, "Sample without contact-line inner profiles");
    construct->add_option("--out", ca.out);

    DiagramArgs da;
    auto* diagram = app.add_subcommand("diagram", "Existence diagrams in realized-maxima coordinates");
    diagram->add_option("--sigma", da.sigma);
    diagram->add_option("--L", da.L);
    diagram->add_option("--nl", da.nl);
    diagram->add_option("--res", da.res, "Samples per axis");
    diagram->add_option("--hmax-range", da.hmax_range, "lo,hi");
    diagram->add_option("--h1max-range", da.h1max_range, "lo,hi");
    diagram->add_option("--threads", da.threads);
    diagram->add_option("--out", da.out);

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Implicit simulation of the two-layer system");
    simulate->add_option("--init", sa.init, "kind:<name> | chain:<expr> | file:<csv>");
    simulate->add_option("--preset", sa.preset, "fig14 | fig15 | fig16 | fig17");
    simulate->add_option("--heights", sa.heights, "Chain block heights h1,h[;h1,h...]");
    simulate->add_option("--sigma", sa.sigma);
    simulate->add_option("--mu", sa.mu, "Viscosity ratio");
    simulate->add_option("--L", sa.L);
    simulate->add_option("--eps", sa.eps);
    simulate->add_option("--nl", sa.nl);
    simulate->add_option("--h1m", sa.h1m);
    simulate->add_option("--hm", sa.hm);
    simulate->add_option("--N", sa.N, "Grid nodes (default 16 L/eps + 1)");
    simulate->add_option("--dt-init", sa.dt_init);
    simulate->add_option("--dt-min", sa.dt_min);
    simulate->add_option("--dt-max", sa.dt_max);
    simulate->add_option("--newton-tol", sa.newton_tol);
    simulate->add_option("--newton-max-iter", sa.newton_max_iter);
    simulate->add_option("--t-end", sa.t_end);
    simulate->add_option("--max-steps", sa.max_steps);
    simulate->add_option("--output-every", sa.output_every);
    simulate->add_option("--snapshot-every", sa.snapshot_every);
    simulate->add_flag("--no-mollify", sa.no_mollify);
    simulate->add_option("--perturb", sa.perturb, "Antisymmetric seed amplitude in eps units (presets: 1e-4)");
    simulate->add_option("--out", sa.out);

    std::string suite = "all";
    int samples = 20;
    std::uint64_t seed = 1;
    int vthreads = 0;
    auto* verify = app.add_subcommand("verify", "Oracle, identity, diagram and simulator checks");
    verify->add_option("--suite", suite, "oracle | identities | diagram | simulator-fast | all");
    verify->add_option("--samples", samples);
    verify->add_option("--seed", seed);
    verify->add_option("--threads", vthreads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*construct) return cmd_construct(ca, plotscript);
        if (*diagram) return cmd_diagram(da, plotscript);
        if (*simulate) return cmd_simulate(sa, *simulate, plotscript);
        if (*verify) return cmd_verify(suite, samples, seed, vthreads);
    } catch (const ConstraintViolation& e) {
        std::cerr << e.what() << "\n" << e.report.to_text();
        return kConstraint;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kAbort;
    }
    return kUsage;
}
