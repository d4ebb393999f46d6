#include "proplab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "proplab/closed_form.hpp"
#include "proplab/oracles.hpp"
#include "proplab/zeta_reg.hpp"

namespace proplab {

namespace {

using Clock = std::chrono::steady_clock;

SystemConfig config_345(double Ex = 0.0, double Ey = 0.0) {
    SystemConfig c;
    c.mass = 1.0;
    c.charge = 1.0;
    c.b_field = 8.0;  // omega_L = 4
    c.omega_x = 3.0;
    c.omega_y = 3.0;
    c.e_field_x = Ex;
    c.e_field_y = Ey;
    return c;
}

Endpoints ep_345() {
    Endpoints ep;
    ep.x_b = 1.0;
    ep.y_b = 0.5;
    ep.duration_T = 0.2;
    return ep;
}

SystemConfig config_from(double omega_x, double omega_y, double omega_L,
                         double Ex = 0.0, double Ey = 0.0, double mass = 1.0) {
    SystemConfig c;
    c.mass = mass;
    c.charge = 1.0;
    c.b_field = 2.0 * mass * omega_L;
    c.omega_x = omega_x;
    c.omega_y = omega_y;
    c.e_field_x = Ex;
    c.e_field_y = Ey;
    return c;
}

struct MetricMax {
    double value = 0.0;
    void fold(double v) { value = std::max(value, v); }
};

// ---------------------------------------------------------------------------
// 1. Regularized constants

CriterionResult criterion_zeta() {
    CriterionResult r;
    r.id = 1;
    r.name = "zeta-constants";
    r.threshold = 1e-4;
    r.time_limit = 1.0;

    MetricMax metric;
    metric.fold(std::abs(zeta_nonpositive(0).value.real() - (-0.5)));
    metric.fold(std::abs(zeta_nonpositive(-1).value.real() - (-1.0 / 12.0)));
    metric.fold(std::abs(zeta_nonpositive(-2).value.real() - 0.0));
    const double zp = -0.5 * std::log(2.0 * kPi);
    metric.fold(std::abs(zeta_prime_zero().value.real() - zp));
    const bool exact_ok = metric.value == 0.0;

    const auto abel = zeta_prime_zero_abel();
    metric.fold(std::abs(abel.value.real() - zp));

    r.observed = metric.value;
    r.passed = exact_ok && metric.value <= r.threshold;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "analytic values exact; Abel route off by %.2e", metric.value);
    r.detail = buf;
    return r;
}

// ---------------------------------------------------------------------------
// 2. Pipeline / closed-form equivalence

CriterionResult criterion_pipeline() {
    CriterionResult r;
    r.id = 2;
    r.name = "pipeline-equivalence";
    r.threshold = 1e-12;
    r.time_limit = 5.0;

    std::mt19937_64 rng(424242u);
    std::uniform_real_distribution<double> omega_dist(0.3, 3.0);
    std::uniform_real_distribution<double> larmor_dist(0.2, 2.5);
    std::uniform_real_distribution<double> sign_dist(0.0, 1.0);
    std::uniform_real_distribution<double> mass_dist(0.5, 2.0);
    std::uniform_real_distribution<double> frac_dist(0.15, 0.92);

    MetricMax metric;
    int done_plain = 0, done_magnetic = 0;
    while (done_plain + done_magnetic < 100) {
        const bool magnetic = (done_plain >= 50) ||
                              (done_magnetic < 50 && sign_dist(rng) < 0.5);
        const double omega = omega_dist(rng);
        const double omega_L =
            magnetic ? (sign_dist(rng) < 0.5 ? 1.0 : -1.0) * larmor_dist(rng) : 0.0;
        const double mass = mass_dist(rng);
        const double w_eff = std::hypot(omega, omega_L);
        const double T = frac_dist(rng) * kPi / w_eff;
        if (std::abs(std::sin(w_eff * T)) < 0.05) continue;

        SystemConfig cfg = config_from(omega, omega, omega_L, 0.0, 0.0, mass);
        const FourierParams fp = fourier_params(cfg, T);
        const Complex closed = fluctuation_factor(cfg, T);
        const Complex pipeline = fluctuation_pipeline(fp, mass, 1.0);
        const Complex as_2d = (fp.gamma == 0.0) ? pipeline * pipeline : pipeline;
        metric.fold(std::abs(as_2d - closed) / std::abs(closed));
        (magnetic ? done_magnetic : done_plain) += 1;
    }

    r.observed = metric.value;
    r.passed = metric.value <= r.threshold;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%d zero-field + %d magnetic parameter sets, worst rel %.2e",
                  done_plain, done_magnetic, metric.value);
    r.detail = buf;
    return r;
}

// ---------------------------------------------------------------------------
// 3. Sliced-oracle convergence and the discretization-rule plateau

CriterionResult criterion_sliced() {
    CriterionResult r;
    r.id = 3;
    r.name = "sliced-convergence";
    r.threshold = 1e-3;
    r.time_limit = 60.0;

    const SystemConfig cfg = config_345();
    const Endpoints ep = ep_345();
    const Complex closed = propagator(cfg, ep).amplitude;

    double errs[3] = {0.0, 0.0, 0.0};
    double arg_err_4096 = 0.0;
    const long sizes[3] = {256, 1024, 4096};
    for (int i = 0; i < 3; ++i) {
        const Complex got = sliced_propagator(cfg, ep, sizes[i]);
        errs[i] = std::abs(got - closed) / std::abs(closed);
        if (sizes[i] == 4096) arg_err_4096 = std::abs(std::arg(got / closed));
    }
    const bool monotone = errs[0] > errs[1] && errs[1] > errs[2];
    const bool phase_ok = arg_err_4096 <= 1e-3;

    // Prepoint sampling of a divergence-carrying gauge of the same field
    // must converge to the wrong answer (finite plateau).
    SlicedOptions bad;
    bad.rule = SliceRule::prepoint;
    bad.gauge_lambda = 1.0;
    const Complex gauge_ref = gauge_phase(cfg, ep, bad.gauge_lambda) * closed;
    double plateau_min = 1e300;
    for (long N : {256L, 1024L, 4096L}) {
        const Complex got = sliced_propagator(cfg, ep, N, bad);
        plateau_min = std::min(plateau_min,
                               std::abs(got - gauge_ref) / std::abs(gauge_ref));
    }
    const bool plateau_ok = plateau_min > 1e-1;

    r.observed = errs[2];
    r.passed = errs[2] <= r.threshold && monotone && phase_ok && plateau_ok;
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "rel err %.2e -> %.2e -> %.2e (N=256,1024,4096), arg err %.2e; "
                  "prepoint-rule plateau >= %.2f",
                  errs[0], errs[1], errs[2], arg_err_4096, plateau_min);
    r.detail = buf;
    return r;
}

// ---------------------------------------------------------------------------
// 4. Boundary-value action oracle across all closed forms

struct ActionCase {
    std::string family;
    SystemConfig cfg;
    Endpoints ep;
    double closed = 0.0;
};

CriterionResult criterion_actions() {
    CriterionResult r;
    r.id = 4;
    r.name = "action-oracle";
    r.threshold = 1e-8;
    r.time_limit = 30.0;

    std::mt19937_64 rng(777u);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    std::uniform_real_distribution<double> omega_dist(0.5, 2.5);
    std::uniform_real_distribution<double> larmor_dist(-1.5, 1.5);
    std::uniform_real_distribution<double> field_dist(-0.5, 0.5);
    std::uniform_real_distribution<double> frac(0.2, 0.85);

    auto draw_ep = [&](double omega_max) {
        Endpoints ep;
        ep.x_a = coord(rng);
        ep.y_a = coord(rng);
        ep.x_b = coord(rng);
        ep.y_b = coord(rng);
        ep.duration_T = frac(rng) * kPi / std::max(omega_max, 0.5);
        return ep;
    };

    std::vector<ActionCase> cases;
    for (int k = 0; k < 10; ++k) {  // 1d oscillator embedded on the x axis
        ActionCase c;
        c.family = "1d-ho";
        const double w = omega_dist(rng);
        c.cfg = config_from(w, omega_dist(rng), 0.0);
        c.ep = draw_ep(w);
        c.ep.y_a = 0.0;
        c.ep.y_b = 0.0;
        c.closed = classical_action_1d_ho(1.0, w, c.ep.x_a, c.ep.x_b,
                                          c.ep.duration_T)
                       .value;
        cases.push_back(c);
    }
    for (int k = 0; k < 10; ++k) {  // isotropic + B
        ActionCase c;
        c.family = "iso-B";
        const double w = omega_dist(rng);
        const double wl = larmor_dist(rng);
        c.cfg = config_from(w, w, wl);
        c.ep = draw_ep(std::hypot(w, wl));
        c.closed = classical_action_iso_B(c.cfg, c.ep).value;
        cases.push_back(c);
    }
    for (int k = 0; k < 10; ++k) {  // pure B
        ActionCase c;
        c.family = "pure-B";
        const double wl = (k % 2 == 0 ? 1.0 : -1.0) * (0.4 + 0.1 * k);
        c.cfg = config_from(0.0, 0.0, wl);
        c.ep = draw_ep(std::abs(wl));
        c.closed = classical_action_pure_B(c.cfg, c.ep).value;
        cases.push_back(c);
    }
    for (int k = 0; k < 10; ++k) {  // anisotropic + B (normal modes)
        ActionCase c;
        c.family = "aniso-B";
        const double wx = omega_dist(rng);
        const double wy = omega_dist(rng) + 0.3;
        const double wl = larmor_dist(rng);
        c.cfg = config_from(wx, wy, wl);
        const double w_big = std::sqrt(wx * wx + wy * wy + 4.0 * wl * wl);
        c.ep = draw_ep(w_big);
        c.closed = classical_action_aniso_B(c.cfg, c.ep).value;
        cases.push_back(c);
    }
    for (int k = 0; k < 10; ++k) {  // isotropic + E + B
        ActionCase c;
        c.family = "iso-EB";
        const double w = omega_dist(rng);
        const double wl = larmor_dist(rng);
        c.cfg = config_from(w, w, wl, field_dist(rng), field_dist(rng));
        c.ep = draw_ep(std::hypot(w, wl));
        c.closed = classical_action_iso_EB(c.cfg, c.ep).value;
        cases.push_back(c);
    }

    MetricMax metric;
    std::string worst_family = "-";
    for (const auto& c : cases) {
        const DiscretePath path = solve_classical_bvp(c.cfg, c.ep, 1L << 12);
        const double oracle = action_from_path(c.cfg, path).value;
        const double rel =
            std::abs(c.closed - oracle) / std::max(std::abs(c.closed), 1e-3);
        if (rel > metric.value) worst_family = c.family;
        metric.fold(rel);
    }

    r.observed = metric.value;
    r.passed = metric.value <= r.threshold;
    char buf[160];
    std::snprintf(buf, sizeof buf, "50 configs across 5 families, worst rel %.2e (%s)",
                  metric.value, worst_family.c_str());
    r.detail = buf;
    return r;
}

// ---------------------------------------------------------------------------
// 5. Spectrum against the truncated-basis diagonalization

CriterionResult criterion_spectrum() {
    CriterionResult r;
    r.id = 5;
    r.name = "spectrum";
    r.time_limit = 120.0;

    const int basis = 40;
    const int lowest = 10;
    MetricMax metric;
    double tol = 0.0;
    std::string sign_note;

    for (const bool with_field : {false, true}) {
        const SystemConfig cfg = with_field ? config_345(0.5, 0.0) : config_345();
        const DerivedFrequencies f = derive_frequencies(cfg);
        tol = 1e-6 * cfg.constants.hbar * f.omega_eff_x;

        const auto numeric = diagonalize_hamiltonian(cfg, basis);
        std::vector<double> analytic;
        for (int n = 0; n < 16; ++n)
            for (int m = 0; m < 16; ++m)
                analytic.push_back(energy_level(cfg, {n, m}).value);
        std::sort(analytic.begin(), analytic.end());

        for (int i = 0; i < lowest; ++i)
            metric.fold(std::abs(numeric[static_cast<size_t>(i)] -
                                 analytic[static_cast<size_t>(i)]));

        if (with_field) {
            // The sign of the electric shift, fixed by the oracle.
            const double shift = 0.25 / (2.0 * 9.0);
            const double with_minus = std::abs(numeric[0] - (5.0 - shift));
            const double with_plus = std::abs(numeric[0] - (5.0 + shift));
            sign_note = (with_minus < with_plus)
                            ? "E^2 shift sign: negative (oracle)"
                            : "E^2 shift sign: positive (oracle)";
        }
    }

    r.threshold = tol;
    r.observed = metric.value;
    r.passed = metric.value <= tol;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "lowest %d levels, basis %d^2, worst |dE| %.2e; %s", lowest, basis,
                  metric.value, sign_note.c_str());
    r.detail = buf;
    return r;
}

// ---------------------------------------------------------------------------
// 6. Trace identity

CriterionResult criterion_trace() {
    CriterionResult r;
    r.id = 6;
    r.name = "trace-identity";
    r.threshold = 1e-8;
    r.time_limit = 5.0;

    MetricMax metric;
    int reconciling_sign = 0;
    for (const bool with_field : {false, true}) {
        const SystemConfig cfg = with_field ? config_345(0.5, 0.0) : config_345();
        for (double s : {0.5, 1.0, 2.0}) {
            const auto cmp = trace_vs_spectrum(cfg, s, 50);
            metric.fold(cmp.rel_discrepancy);
            if (with_field) reconciling_sign = cmp.reconciling_sign;
        }
    }

    r.observed = metric.value;
    r.passed = metric.value <= r.threshold;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "s in {0.5,1,2}, E in {0, (0.5,0)}, worst rel %.2e, "
                  "reconciling E^2 sign %+d",
                  metric.value, reconciling_sign);
    r.detail = buf;
    return r;
}

// ---------------------------------------------------------------------------
// 7. Schrodinger residual orders and the corrupted-action control

CriterionResult criterion_residual() {
    CriterionResult r;
    r.id = 7;
    r.name = "pde-residual";
    r.threshold = 0.3;  // |observed order - 2| bound
    r.time_limit = 30.0;

    Endpoints ep;
    ep.x_a = 0.15;
    ep.y_a = -0.2;
    ep.x_b = 0.6;
    ep.y_b = 0.35;

    struct Probe {
        SystemConfig cfg;
        double T;
    };
    const Probe probes[] = {
        {config_from(0.0, 0.0, 0.0), 0.7},           // free
        {config_345(), 0.2},                         // isotropic + B
        {config_from(1.0, 2.0, 0.5, 0.2, 0.1), 0.3}  // general
    };

    MetricMax order_dev;
    for (const auto& probe : probes) {
        Endpoints e = ep;
        e.duration_T = probe.T;
        const double r1 = schrodinger_residual(probe.cfg, e, 2e-2);
        const double r2 = schrodinger_residual(probe.cfg, e, 1e-2);
        order_dev.fold(std::abs(std::log2(r1 / r2) - 2.0));
    }

    const SystemConfig cfg = config_345();
    Endpoints e = ep;
    e.duration_T = 0.2;
    const KernelFn corrupted = [cfg, e](double xb, double yb, double T) {
        Endpoints probe = e;
        probe.x_b = xb;
        probe.y_b = yb;
        probe.duration_T = T;
        return propagator_scaled_action(cfg, probe, 1.01).amplitude;
    };
    const double control = std::min(
        schrodinger_residual_kernel(cfg, e, 5e-3, corrupted),
        schrodinger_residual_kernel(cfg, e, 2.5e-3, corrupted));
    const bool control_ok = control > 1e-2;

    r.observed = order_dev.value;
    r.passed = order_dev.value <= r.threshold && control_ok;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "worst |order-2| = %.2f (free, iso-B, general); corrupted control "
                  "plateau %.2e > 1e-2",
                  order_dev.value, control);
    r.detail = buf;
    return r;
}

// ---------------------------------------------------------------------------
// 8. Limit chain

CriterionResult criterion_limits() {
    CriterionResult r;
    r.id = 8;
    r.name = "limit-chain";
    r.threshold = 1e-5;
    r.time_limit = 5.0;

    const Endpoints eps[] = {
        [] { Endpoints e; e.x_b = 1.0; e.y_b = 0.4; e.duration_T = 0.8; return e; }(),
        [] {
            Endpoints e;
            e.x_a = 0.2;
            e.y_a = -0.3;
            e.x_b = 0.9;
            e.y_b = 0.4;
            e.duration_T = 0.6;
            return e;
        }(),
    };

    MetricMax aniso_iso, iso_pure, pure_free;
    for (const Endpoints& ep : eps) {
        const double iso = classical_action_iso_B(config_from(1.5, 1.5, 0.8), ep).value;
        const double aniso =
            classical_action_aniso_B(config_from(1.5, 1.5, 0.8), ep).value;
        aniso_iso.fold(std::abs(aniso - iso) / std::max(std::abs(iso), 1e-3));

        const double iso_small =
            classical_action_iso_B(config_from(1e-6, 1e-6, 0.8), ep).value;
        const double pure = classical_action_pure_B(config_from(0.0, 0.0, 0.8), ep).value;
        iso_pure.fold(std::abs(iso_small - pure) / std::max(std::abs(pure), 1e-3));

        const double pure_small =
            classical_action_pure_B(config_from(0.0, 0.0, 1e-6), ep).value;
        const double dx = ep.x_b - ep.x_a, dy = ep.y_b - ep.y_a;
        const double free_action = (dx * dx + dy * dy) / (2.0 * ep.duration_T);
        pure_free.fold(std::abs(pure_small - free_action) / free_action);
    }

    const bool ok = aniso_iso.value <= 1e-12 && iso_pure.value <= 1e-5 &&
                    pure_free.value <= 1e-5;
    r.observed = std::max({aniso_iso.value, iso_pure.value, pure_free.value});
    r.passed = ok;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "aniso==iso %.2e (<=1e-12), iso->pureB %.2e (<=1e-5), "
                  "pureB->free %.2e (<=1e-5)",
                  aniso_iso.value, iso_pure.value, pure_free.value);
    r.detail = buf;
    return r;
}

// ---------------------------------------------------------------------------
// 9. Sine-mode coupling diagnostic

CriterionResult criterion_sine() {
    CriterionResult r;
    r.id = 9;
    r.name = "sine-coupling";
    r.threshold = 0.0;
    r.time_limit = 5.0;

    const auto [mat, rep] = sine_mode_coupling(12, 1.0);
    MetricMax structural;  // any nonzero where an exact zero is required
    for (int n = 1; n <= 12; ++n) {
        for (int m = 1; m <= 12; ++m) {
            if (n == m || (n + m) % 2 == 0)
                structural.fold(std::abs(mat.at(n, m)));
        }
    }
    const bool nonzero_flagged = !rep.all_couplings_vanish && rep.nonzero_odd_pairs > 0;

    r.observed = structural.value;
    r.passed = structural.value == 0.0 && nonzero_flagged;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "diagonal/even entries exactly 0; %d odd pairs nonzero (max %.3f), "
                  "velocity couplings do not all vanish",
                  rep.nonzero_odd_pairs, rep.max_abs_entry);
    r.detail = buf;
    return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
    using Criterion = CriterionResult (*)();
    const Criterion criteria[] = {
        criterion_zeta,    criterion_pipeline, criterion_sliced,
        criterion_actions, criterion_spectrum, criterion_trace,
        criterion_residual, criterion_limits,  criterion_sine,
    };
    std::vector<CriterionResult> results;
    for (Criterion fn : criteria) {
        const auto t0 = Clock::now();
        CriterionResult r = fn();
        r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        if (options.tolerance_scale != 1.0) {
            r.threshold *= options.tolerance_scale;
            r.passed = r.observed <= r.threshold ||
                       (r.threshold == 0.0 && r.observed == 0.0);
        }
        if (r.seconds > r.time_limit) r.passed = false;
        results.push_back(std::move(r));
    }
    return results;
}

void print_acceptance(const std::vector<CriterionResult>& results, std::ostream& out) {
    for (const auto& r : results) {
        char line[512];
        std::snprintf(line, sizeof line,
                      "[%s] %d. %-20s observed %.3e  bound %.3e  (%.2fs < %.0fs)  %s",
                      r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.observed,
                      r.threshold, r.seconds, r.time_limit, r.detail.c_str());
        out << line << "\n";
    }
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.passed) return false;
    return !results.empty();
}

}  // namespace proplab
