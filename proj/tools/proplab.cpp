// proplab: batch front-end for the propagator library.
//
//   proplab <command> --config <file> [--output <file>] [--slices N]
//           [--basis K] [--tolerance x]
//
// Commands: propagate, action, spectrum, zeta, verify, demo-sine.
// Exit codes: 0 ok, 1 tolerance failure, 2 input error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "proplab/acceptance.hpp"
#include "proplab/closed_form.hpp"
#include "proplab/config.hpp"
#include "proplab/csv.hpp"
#include "proplab/oracles.hpp"
#include "proplab/zeta_reg.hpp"

namespace {

using namespace proplab;

struct Sweep {
    double start = 0.0;
    double stop = 0.0;
    long count = 0;
};

std::optional<Sweep> parse_sweep(const std::string& text) {
    if (text.empty()) return std::nullopt;
    Sweep s;
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw ConfigError("sweep must be start:stop:count");
    s.start = std::stod(text.substr(0, c1));
    s.stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    s.count = std::stol(text.substr(c2 + 1));
    if (s.count < 1) throw ConfigError("sweep count must be >= 1");
    return s;
}

double sweep_value(const Sweep& s, long i) {
    if (s.count == 1) return s.start;
    return s.start + (s.stop - s.start) * static_cast<double>(i) /
                         static_cast<double>(s.count - 1);
}

ExitReport write_or_print(const Table& table, const std::filesystem::path& output) {
    if (output.empty()) {
        std::cout << render_csv(table);
        return {};
    }
    return emit_table(table, output);
}

ExitReport cmd_propagate(const RunConfig& cfg, const std::optional<Sweep>& sweep_t,
                         const std::optional<Sweep>& sweep_xb,
                         const std::filesystem::path& output) {
    Table table;
    table.header = {"T", "x_b", "y_b", "re", "im", "modulus", "phase", "caustics"};
    auto add_row = [&table](const SystemConfig& sys, const Endpoints& ep) {
        const PropagatorValue K = propagator(sys, ep);
        RowBuilder row;
        row.add(ep.duration_T)
            .add(ep.x_b)
            .add(ep.y_b)
            .add(K.amplitude)
            .add(std::abs(K.amplitude))
            .add(std::arg(K.amplitude))
            .add(static_cast<long>(K.caustics_crossed));
        table.rows.push_back(row.take());
    };
    if (sweep_t && sweep_xb) throw ConfigError("choose one sweep axis");
    if (sweep_t) {
        for (long i = 0; i < sweep_t->count; ++i) {
            Endpoints ep = cfg.endpoints;
            ep.duration_T = sweep_value(*sweep_t, i);
            ep.validate();
            add_row(cfg.system, ep);
        }
    } else if (sweep_xb) {
        for (long i = 0; i < sweep_xb->count; ++i) {
            Endpoints ep = cfg.endpoints;
            ep.x_b = sweep_value(*sweep_xb, i);
            add_row(cfg.system, ep);
        }
    } else {
        add_row(cfg.system, cfg.endpoints);
    }
    return write_or_print(table, output);
}

ExitReport cmd_action(const RunConfig& cfg, const std::filesystem::path& output) {
    const SystemConfig& sys = cfg.system;
    const Endpoints& ep = cfg.endpoints;
    const DiscretePath path = solve_classical_bvp(sys, ep, cfg.slices);
    const double oracle = action_from_path(sys, path).value;

    Table table;
    table.header = {"action", "closed_form", "bvp_oracle", "rel_error"};
    auto add_row = [&](const std::string& name, double closed) {
        RowBuilder row;
        row.add(name).add(closed).add(oracle).add(
            std::abs(closed - oracle) / std::max(std::abs(closed), 1e-3));
        table.rows.push_back(row.take());
    };

    const DerivedFrequencies f = derive_frequencies(sys);
    if (!sys.has_e_field()) {
        if (sys.omega_x == 0.0 && sys.omega_y == 0.0 && f.omega_L != 0.0)
            add_row("pure_b", classical_action_pure_B(sys, ep).value);
        if (sys.isotropic() && f.omega_eff_x > 0.0)
            add_row("iso_b", classical_action_iso_B(sys, ep).value);
        add_row("aniso_b", classical_action_aniso_B(sys, ep).value);
    }
    if (sys.isotropic() && (sys.omega_x > 0.0 || !sys.has_e_field()))
        add_row("iso_eb", classical_action_iso_EB(sys, ep).value);
    if (table.rows.empty())
        throw ConfigError("no closed-form action applies to this configuration");
    return write_or_print(table, output);
}

ExitReport cmd_spectrum(const RunConfig& cfg, const std::filesystem::path& output) {
    const auto numeric = diagonalize_hamiltonian(cfg.system, cfg.basis);
    const int levels = std::min<int>(20, static_cast<int>(numeric.size()));

    struct Labelled {
        double value;
        int n, m;
    };
    std::vector<Labelled> analytic;
    for (int n = 0; n < 2 * cfg.basis; ++n)
        for (int m = 0; m < 2 * cfg.basis; ++m)
            analytic.push_back({energy_level(cfg.system, {n, m}).value, n, m});
    std::sort(analytic.begin(), analytic.end(),
              [](const Labelled& a, const Labelled& b) { return a.value < b.value; });

    Table table;
    table.header = {"level", "n", "m", "analytic", "numeric", "abs_error"};
    for (int i = 0; i < levels; ++i) {
        RowBuilder row;
        row.add(static_cast<long>(i))
            .add(static_cast<long>(analytic[static_cast<size_t>(i)].n))
            .add(static_cast<long>(analytic[static_cast<size_t>(i)].m))
            .add(analytic[static_cast<size_t>(i)].value)
            .add(numeric[static_cast<size_t>(i)])
            .add(std::abs(analytic[static_cast<size_t>(i)].value -
                          numeric[static_cast<size_t>(i)]));
        table.rows.push_back(row.take());
    }
    return write_or_print(table, output);
}

ExitReport cmd_zeta(const std::filesystem::path& output) {
    Table table;
    table.header = {"name", "analytic", "numeric", "abs_error"};
    const auto schedule = default_abel_schedule();

    auto add = [&](const std::string& name, double analytic, double numeric) {
        RowBuilder row;
        row.add(name).add(analytic).add(numeric).add(std::abs(analytic - numeric));
        table.rows.push_back(row.take());
    };

    const double eta0 = abel_sum([](long n) { return n % 2 ? 1.0 : -1.0; }, schedule)
                            .value.real();
    const double eta1 =
        abel_sum([](long n) { return (n % 2 ? 1.0 : -1.0) * n; }, schedule).value.real();
    const double eta2 =
        abel_sum([](long n) { return (n % 2 ? 1.0 : -1.0) * n * n; }, schedule)
            .value.real();
    const double eta_log =
        abel_sum([](long n) { return (n % 2 ? 1.0 : -1.0) / n; }, schedule).value.real();
    const double alt_log =
        abel_sum([](long n) { return (n % 2 ? 1.0 : -1.0) * std::log(double(n)); },
                 schedule)
            .value.real();

    add("eta_exp0", eta_value(0).value.real(), eta0);
    add("eta_exp1", eta_value(1).value.real(), eta1);
    add("eta_harmonic", eta_value(-1).value.real(), eta_log);
    add("alternating_log", 0.5 * std::log(2.0 / kPi), alt_log);
    // zeta(-s) = eta(-s) / (1 - 2^{1+s}) transports the Abel values.
    add("zeta_0", zeta_nonpositive(0).value.real(), eta0 / (1.0 - 2.0));
    add("zeta_m1", zeta_nonpositive(-1).value.real(), eta1 / (1.0 - 4.0));
    add("zeta_m2", zeta_nonpositive(-2).value.real(), eta2 / (1.0 - 8.0));
    add("zeta_prime_0", zeta_prime_zero().value.real(),
        zeta_prime_zero_abel().value.real());
    return write_or_print(table, output);
}

ExitReport cmd_verify(const RunConfig& cfg, const std::filesystem::path& output) {
    AcceptanceOptions options;
    options.tolerance_scale = cfg.tolerance;
    const auto results = run_acceptance(options);
    print_acceptance(results, std::cout);

    ExitReport report;
    if (!output.empty()) {
        Table table;
        table.header = {"id", "name", "status", "observed", "threshold", "seconds"};
        for (const auto& r : results) {
            RowBuilder row;
            row.add(static_cast<long>(r.id))
                .add(r.name)
                .add(std::string(r.passed ? "pass" : "fail"))
                .add(r.observed)
                .add(r.threshold)
                .add(r.seconds);
            table.rows.push_back(row.take());
        }
        report = emit_table(table, output);
        if (report.status != ExitStatus::ok) return report;
    }
    if (!all_passed(results)) {
        report.status = ExitStatus::tolerance_failure;
        report.messages.push_back("one or more acceptance checks failed");
    }
    return report;
}

ExitReport cmd_demo_sine(int modes, double T, const std::filesystem::path& output) {
    const auto [mat, rep] = sine_mode_coupling(modes, T);
    Table table;
    table.header = {"n", "m", "value"};
    for (int n = 1; n <= modes; ++n) {
        for (int m = 1; m <= modes; ++m) {
            RowBuilder row;
            row.add(static_cast<long>(n)).add(static_cast<long>(m)).add(mat.at(n, m));
            table.rows.push_back(row.take());
        }
    }
    std::cout << "sine-mode velocity couplings (1/T) <phi_n | d/dt phi_m>, T = " << T
              << "\n"
              << "  diagonal entries zero: " << (rep.diagonal_zero ? "yes" : "no")
              << "\n"
              << "  even n+m entries zero: " << (rep.even_pairs_zero ? "yes" : "no")
              << "\n"
              << "  nonzero odd n+m pairs: " << rep.nonzero_odd_pairs
              << " (max |entry| = " << rep.max_abs_entry << ")\n"
              << "  all couplings vanish:  "
              << (rep.all_couplings_vanish ? "yes" : "no") << "\n"
              << "The odd-pair couplings are nonzero (value 4nm/(T^2(n^2-m^2))), so\n"
                 "a sine-mode expansion cannot drop the velocity coupling term by\n"
                 "orthogonality; treating it as zero reduces any magnetic propagator\n"
                 "to the free one.\n";
    return write_or_print(table, output);
}

int run(int argc, char** argv) {
    CLI::App app{"charged anisotropic oscillator propagator laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_path;
    std::string sweep_t_text, sweep_xb_text;
    long slices = 0;
    int basis = 0;
    int modes = 8;
    double tolerance = 0.0;

    auto add_common = [&](CLI::App* cmd, bool config_required) {
        auto* opt = cmd->add_option("--config", config_path, "key = value config file");
        if (config_required) opt->required();
        cmd->add_option("--output", output_path, "CSV destination (stdout if absent)");
        cmd->add_option("--slices", slices, "time slices for oracles");
        cmd->add_option("--basis", basis, "basis states per axis");
        cmd->add_option("--tolerance", tolerance, "tolerance scale");
        return cmd;
    };

    auto* propagate = add_common(app.add_subcommand("propagate", "emit K rows"), true);
    propagate->add_option("--sweep-t", sweep_t_text, "duration sweep start:stop:count");
    propagate->add_option("--sweep-xb", sweep_xb_text, "x_b sweep start:stop:count");
    add_common(app.add_subcommand("action", "closed-form actions vs the BVP oracle"),
               true);
    add_common(app.add_subcommand("spectrum", "analytic levels vs diagonalization"),
               true);
    add_common(app.add_subcommand("zeta", "regularized constants table"), false);
    add_common(app.add_subcommand("verify", "run the acceptance suite"), false);
    auto* demo =
        add_common(app.add_subcommand("demo-sine", "sine-mode coupling matrix"), false);
    demo->add_option("--modes", modes, "number of sine modes");

    CLI11_PARSE(app, argc, argv);

    RunConfig cfg;
    if (!config_path.empty()) cfg = load_run_config(config_path);
    if (slices > 0) cfg.slices = slices;
    if (basis > 0) cfg.basis = basis;
    if (tolerance > 0.0) cfg.tolerance = tolerance;
    cfg.output = output_path;

    ExitReport report;
    if (app.got_subcommand("propagate")) {
        report = cmd_propagate(cfg, parse_sweep(sweep_t_text), parse_sweep(sweep_xb_text),
                               cfg.output);
    } else if (app.got_subcommand("action")) {
        report = cmd_action(cfg, cfg.output);
    } else if (app.got_subcommand("spectrum")) {
        report = cmd_spectrum(cfg, cfg.output);
    } else if (app.got_subcommand("zeta")) {
        report = cmd_zeta(cfg.output);
    } else if (app.got_subcommand("verify")) {
        report = cmd_verify(cfg, cfg.output);
    } else if (app.got_subcommand("demo-sine")) {
        report = cmd_demo_sine(modes, cfg.endpoints.duration_T, cfg.output);
    }

    for (const auto& msg : report.messages) std::cerr << msg << "\n";
    return static_cast<int>(report.status);
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& err) {
        std::cerr << "input error: " << err.what() << "\n";
        return static_cast<int>(proplab::ExitStatus::input_error);
    } catch (const proplab::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return static_cast<int>(proplab::ExitStatus::input_error);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return static_cast<int>(proplab::ExitStatus::input_error);
    }
}
