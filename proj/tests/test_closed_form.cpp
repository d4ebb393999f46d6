#include <doctest.h>

#include <cmath>
#include <random>

#include "proplab/closed_form.hpp"
#include "proplab/oracles.hpp"

using namespace proplab;

namespace {

SystemConfig make_config(double omega_x, double omega_y, double omega_L,
                         double Ex = 0.0, double Ey = 0.0, double mass = 1.0,
                         double charge = 1.0) {
    SystemConfig c;
    c.mass = mass;
    c.charge = charge;
    c.b_field = charge != 0.0 ? 2.0 * mass * omega_L / charge : 0.0;
    c.omega_x = omega_x;
    c.omega_y = omega_y;
    c.e_field_x = Ex;
    c.e_field_y = Ey;
    return c;
}

Endpoints make_ep(double xa, double ya, double xb, double yb, double T) {
    Endpoints ep;
    ep.x_a = xa;
    ep.y_a = ya;
    ep.x_b = xb;
    ep.y_b = yb;
    ep.duration_T = T;
    return ep;
}

double bvp_action(const SystemConfig& cfg, const Endpoints& ep, long N = 4096) {
    const DiscretePath path = solve_classical_bvp(cfg, ep, N);
    return action_from_path(cfg, path).value;
}

}  // namespace

TEST_CASE("1d oscillator action") {
    SUBCASE("zero endpoints") {
        CHECK(classical_action_1d_ho(1.0, 2.0, 0.0, 0.0, 0.4).value == 0.0);
    }
    SUBCASE("free limit") {
        CHECK(classical_action_1d_ho(1.0, 0.0, 0.0, 2.0, 2.0).value ==
              doctest::Approx(1.0));
    }
    SUBCASE("unit case equals cos(1)/(2 sin 1) ~ 0.32105") {
        const double want = std::cos(1.0) / (2.0 * std::sin(1.0));
        CHECK(classical_action_1d_ho(1.0, 1.0, 0.0, 1.0, 1.0).value ==
              doctest::Approx(want).epsilon(1e-14));
        CHECK(want == doctest::Approx(0.321048).epsilon(1e-5));
        // Boundary-value oracle: 1d motion embedded on the x axis.
        const SystemConfig cfg = make_config(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        const double oracle = bvp_action(cfg, make_ep(0.0, 0.0, 1.0, 0.0, 1.0));
        CHECK(oracle == doctest::Approx(want).epsilon(1e-9));
    }
    SUBCASE("caustic rejection") {
        CHECK_THROWS_AS(classical_action_1d_ho(1.0, 1.0, 0.0, 1.0, kPi),
                        CausticSingularity);
    }
}

TEST_CASE("isotropic action in B decouples at omega_L = 0") {
    const SystemConfig cfg = make_config(1.4, 1.4, 0.0);
    const Endpoints ep = make_ep(0.3, -0.2, 1.1, 0.7, 0.9);
    const double sum_1d =
        classical_action_1d_ho(1.0, 1.4, ep.x_a, ep.x_b, ep.duration_T).value +
        classical_action_1d_ho(1.0, 1.4, ep.y_a, ep.y_b, ep.duration_T).value;
    CHECK(classical_action_iso_B(cfg, ep).value ==
          doctest::Approx(sum_1d).epsilon(1e-14));
}

TEST_CASE("isotropic action reduces to the pure-B formula as omega -> 0") {
    const Endpoints ep = make_ep(0.0, 0.0, 1.0, 0.4, 0.8);
    const SystemConfig tiny_omega = make_config(1e-6, 1e-6, 1.3);
    const SystemConfig pure = make_config(0.0, 0.0, 1.3);
    const double iso = classical_action_iso_B(tiny_omega, ep).value;
    const double pb = classical_action_pure_B(pure, ep).value;
    CHECK(std::abs(iso - pb) < 1e-5 * std::abs(pb));
}

TEST_CASE("isotropic action in B matches the boundary-value oracle") {
    const SystemConfig cfg = make_config(3.0, 3.0, 4.0);
    const Endpoints ep = make_ep(0.0, 0.0, 1.0, 0.5, 0.2);
    const double closed = classical_action_iso_B(cfg, ep).value;
    const double oracle = bvp_action(cfg, ep);
    CHECK(std::abs(closed - oracle) < 1e-8 * std::max(1.0, std::abs(closed)));
}

TEST_CASE("pure magnetic action") {
    SUBCASE("coincident endpoints vanish") {
        const SystemConfig cfg = make_config(0.0, 0.0, 1.0);
        CHECK(classical_action_pure_B(cfg, make_ep(0.4, 0.2, 0.4, 0.2, 1.0)).value ==
              doctest::Approx(0.0));
    }
    SUBCASE("B -> 0 free limit") {
        const SystemConfig cfg = make_config(0.0, 0.0, 1e-6);
        const Endpoints ep = make_ep(0.0, 0.0, 1.0, 1.0, 2.0);
        // m (dr)^2 / 2T = 2 / 4
        CHECK(classical_action_pure_B(cfg, ep).value ==
              doctest::Approx(0.5).epsilon(1e-5));
    }
    SUBCASE("matches the boundary-value oracle") {
        const SystemConfig cfg = make_config(0.0, 0.0, 1.0);
        const Endpoints ep = make_ep(0.0, 0.0, 1.0, 0.0, 1.0);
        const double closed = classical_action_pure_B(cfg, ep).value;
        CHECK(std::abs(closed - bvp_action(cfg, ep)) < 1e-8);
    }
    SUBCASE("caustic at omega_L T = pi") {
        const SystemConfig cfg = make_config(0.0, 0.0, 1.0);
        CHECK_THROWS_AS(classical_action_pure_B(cfg, make_ep(0, 0, 1, 0, kPi)),
                        CausticSingularity);
    }
}

TEST_CASE("anisotropic action in B") {
    SUBCASE("isotropic reduction") {
        const SystemConfig cfg = make_config(2.1, 2.1, 0.9);
        const Endpoints ep = make_ep(0.2, -0.4, 0.9, 0.6, 0.5);
        CHECK(classical_action_aniso_B(cfg, ep).value ==
              doctest::Approx(classical_action_iso_B(cfg, ep).value).epsilon(1e-12));
    }
    SUBCASE("decouples at omega_L = 0") {
        const SystemConfig cfg = make_config(1.0, 2.0, 0.0);
        const Endpoints ep = make_ep(0.1, 0.2, 0.8, -0.5, 0.7);
        const double sum_1d =
            classical_action_1d_ho(1.0, 1.0, ep.x_a, ep.x_b, ep.duration_T).value +
            classical_action_1d_ho(1.0, 2.0, ep.y_a, ep.y_b, ep.duration_T).value;
        CHECK(classical_action_aniso_B(cfg, ep).value ==
              doctest::Approx(sum_1d).epsilon(1e-13));
    }
    SUBCASE("matches the boundary-value oracle") {
        const SystemConfig cfg = make_config(1.0, 2.0, 0.5);
        const Endpoints ep = make_ep(0.3, -0.1, 0.8, 0.45, 0.3);
        const double closed = classical_action_aniso_B(cfg, ep).value;
        const double oracle = bvp_action(cfg, ep);
        CHECK(std::abs(closed - oracle) < 1e-8 * std::max(1.0, std::abs(closed)));
    }
    SUBCASE("rejects electric fields") {
        const SystemConfig cfg = make_config(1.0, 2.0, 0.5, 0.3);
        CHECK_THROWS_AS(classical_action_aniso_B(cfg, make_ep(0, 0, 1, 0, 0.3)),
                        ConfigError);
    }
    SUBCASE("normal-mode route is continuous into the isotropic point") {
        const Endpoints ep = make_ep(0.2, -0.4, 0.9, 0.6, 0.5);
        const double iso =
            classical_action_aniso_B(make_config(2.1, 2.1, 0.9), ep).value;
        const double near_iso =
            classical_action_aniso_B(make_config(2.1, 2.1 + 1e-7, 0.9), ep).value;
        CHECK(std::abs(near_iso - iso) < 1e-5 * std::abs(iso));
    }
    SUBCASE("zero-frequency drift mode is rejected") {
        const SystemConfig cfg = make_config(1.0, 0.0, 0.5);
        CHECK_THROWS_AS(classical_action_aniso_B(cfg, make_ep(0, 0, 1, 0, 0.3)),
                        ConfigError);
    }
}

TEST_CASE("isotropic action in crossed fields") {
    SUBCASE("E = 0 reduces to the magnetic action and kills a4") {
        const SystemConfig cfg = make_config(2.0, 2.0, 1.0);
        const Endpoints ep = make_ep(0.4, 0.1, -0.3, 0.8, 0.45);
        CHECK(classical_action_iso_EB(cfg, ep).value ==
              doctest::Approx(classical_action_iso_B(cfg, ep).value).epsilon(1e-13));
        CHECK(iso_eb_terms(cfg, ep).a4 == 0.0);
    }
    SUBCASE("matches the boundary-value oracle") {
        const SystemConfig cfg = make_config(2.0, 2.0, 1.0, 0.3, -0.1);
        const Endpoints ep = make_ep(0.25, -0.35, 0.9, 0.55, 0.4);
        const double closed = classical_action_iso_EB(cfg, ep).value;
        const double oracle = bvp_action(cfg, ep);
        CHECK(std::abs(closed - oracle) < 1e-8 * std::max(1.0, std::abs(closed)));
    }
    SUBCASE("two algebraic routes agree") {
        // Endpoint-combination route vs constant + transformed 1d actions.
        const SystemConfig cfg = make_config(1.7, 1.7, -0.8, 0.2, 0.4);
        const Endpoints ep = make_ep(-0.2, 0.5, 0.7, -0.6, 0.55);
        const DerivedFrequencies f = derive_frequencies(cfg);
        const TransformedEndpoints te = transform_endpoints(cfg, ep, true);
        const double route2 =
            constant_action_term(cfg, ep).value +
            classical_action_1d_ho(cfg.mass, f.omega_eff_x, te.x_a_t, te.x_b_t,
                                   ep.duration_T)
                .value +
            classical_action_1d_ho(cfg.mass, f.omega_eff_y, te.y_a_t, te.y_b_t,
                                   ep.duration_T)
                .value;
        CHECK(classical_action_iso_EB(cfg, ep).value ==
              doctest::Approx(route2).epsilon(1e-12));
    }
    SUBCASE("degenerate shift") {
        const SystemConfig cfg = make_config(0.0, 0.0, 1.0, 0.5);
        CHECK_THROWS_AS(classical_action_iso_EB(cfg, make_ep(0, 0, 1, 0, 0.3)),
                        DegenerateShift);
    }
}

TEST_CASE("endpoint transforms") {
    SUBCASE("full rotation is the identity") {
        const double omega_L = 1.0;
        const SystemConfig cfg = make_config(1.0, 1.0, omega_L);
        const Endpoints ep = make_ep(0.3, 0.7, -0.4, 0.2, 2.0 * kPi / omega_L);
        const TransformedEndpoints te = transform_endpoints(cfg, ep, false);
        CHECK(te.x_b_t == doctest::Approx(ep.x_b).epsilon(1e-12));
        CHECK(te.y_b_t == doctest::Approx(ep.y_b).epsilon(1e-12));
        CHECK(te.x_a_t == ep.x_a);
        CHECK(te.y_a_t == ep.y_a);
    }
    SUBCASE("pure rotation of the b endpoint") {
        const SystemConfig cfg = make_config(1.0, 1.0, 0.5);
        const Endpoints ep = make_ep(0.0, 0.0, 1.0, 0.0, 1.0);
        const TransformedEndpoints te = transform_endpoints(cfg, ep, false);
        CHECK(te.x_b_t == doctest::Approx(std::cos(0.5)));
        CHECK(te.y_b_t == doctest::Approx(std::sin(0.5)));
    }
    SUBCASE("unit shift before rotation") {
        const SystemConfig cfg = make_config(1.0, 1.0, 0.0, 1.0);
        const Endpoints ep = make_ep(0.0, 0.0, 2.0, 0.0, 1.0);
        const TransformedEndpoints te = transform_endpoints(cfg, ep, true);
        CHECK(te.x_a_t == doctest::Approx(-1.0));
        CHECK(te.x_b_t == doctest::Approx(1.0));
    }
    SUBCASE("rotation preserves b-endpoint distances") {
        const SystemConfig cfg = make_config(1.2, 1.2, 0.7);
        const Endpoints e1 = make_ep(0.0, 0.0, 0.8, -0.3, 0.9);
        const Endpoints e2 = make_ep(0.0, 0.0, -0.2, 0.6, 0.9);
        const TransformedEndpoints t1 = transform_endpoints(cfg, e1, false);
        const TransformedEndpoints t2 = transform_endpoints(cfg, e2, false);
        const double before = std::hypot(e1.x_b - e2.x_b, e1.y_b - e2.y_b);
        const double after = std::hypot(t1.x_b_t - t2.x_b_t, t1.y_b_t - t2.y_b_t);
        CHECK(after == doctest::Approx(before).epsilon(1e-13));
    }
}

TEST_CASE("constant action term") {
    SUBCASE("zero field gives zero") {
        const SystemConfig cfg = make_config(1.0, 1.0, 0.7);
        CHECK(constant_action_term(cfg, make_ep(0, 0, 1, 1, 0.5)).value == 0.0);
    }
    SUBCASE("B = 0 with E along x") {
        const SystemConfig cfg = make_config(2.0, 1.0, 0.0, 0.6);
        const Endpoints ep = make_ep(0.1, 0.2, 0.9, -0.4, 0.8);
        CHECK(constant_action_term(cfg, ep).value ==
              doctest::Approx(0.8 * 0.36 / (2.0 * 4.0)));
    }
    SUBCASE("degenerate axis") {
        const SystemConfig cfg = make_config(0.0, 1.0, 0.5, 0.3, 0.0);
        CHECK_THROWS_AS(constant_action_term(cfg, make_ep(0, 0, 1, 0, 0.5)),
                        DegenerateShift);
    }
}

TEST_CASE("fluctuation factor") {
    SUBCASE("free prefactor") {
        const SystemConfig cfg = make_config(0.0, 0.0, 0.0);
        const Complex got = fluctuation_factor(cfg, 0.7);
        const Complex want = 1.0 / (2.0 * kPi * 0.7 * Complex(0.0, 1.0));
        CHECK(std::abs(got - want) < 1e-15);
    }
    SUBCASE("even in the field direction") {
        for (double T : {0.2, 0.5}) {
            const Complex plus = fluctuation_factor(make_config(1.0, 1.0, 2.0), T);
            const Complex minus = fluctuation_factor(make_config(1.0, 1.0, -2.0), T);
            CHECK(std::abs(plus - minus) < 1e-14 * std::abs(plus));
        }
    }
    SUBCASE("3-4-5 modulus") {
        CHECK(std::abs(fluctuation_factor(make_config(3.0, 3.0, 4.0), 0.2)) ==
              doctest::Approx(5.0 / (2.0 * kPi * std::sin(1.0))).epsilon(1e-12));
    }
    SUBCASE("caustic counting and rejection") {
        const SystemConfig cfg = make_config(3.0, 3.0, 4.0);  // w_eff = 5
        const auto before = fluctuation_factor_full(cfg, 0.5);
        CHECK(before.caustics_x == 0);
        const auto after = fluctuation_factor_full(cfg, 0.7);  // w_eff T = 3.5 > pi
        CHECK(after.caustics_x == 1);
        CHECK_THROWS_AS(fluctuation_factor(cfg, kPi / 5.0), CausticSingularity);
    }
}

TEST_CASE("propagator") {
    SUBCASE("free particle closed form") {
        const SystemConfig cfg = make_config(0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        const Endpoints ep = make_ep(0.1, -0.2, 1.3, 0.8, 0.6);
        const PropagatorValue K = propagator(cfg, ep);
        const double dr2 = std::pow(1.3 - 0.1, 2) + std::pow(0.8 + 0.2, 2);
        const Complex want = 1.0 / (2.0 * kPi * 0.6 * Complex(0.0, 1.0)) *
                             std::exp(Complex(0.0, dr2 / (2.0 * 0.6)));
        CHECK(std::abs(K.amplitude - want) < 1e-14);
    }
    SUBCASE("iso-B propagator equals exp(iS) F") {
        const SystemConfig cfg = make_config(3.0, 3.0, 4.0);
        const Endpoints ep = make_ep(0.0, 0.0, 1.0, 0.5, 0.2);
        const PropagatorValue K = propagator(cfg, ep);
        const Complex want =
            std::polar(1.0, classical_action_iso_B(cfg, ep).value) *
            fluctuation_factor(cfg, 0.2);
        CHECK(std::abs(K.amplitude - want) < 1e-12 * std::abs(want));
    }
    SUBCASE("small-T free asymptotics, B = 0") {
        // Relative exponent error O(T^2), prefactor error O(T).
        const SystemConfig cfg = make_config(1.0, 2.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        const SystemConfig free_cfg = make_config(0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        double prev_pref = 0.0, prev_exp = 0.0;
        for (double T : {2e-2, 1e-2}) {
            const Endpoints ep = make_ep(0.15, 0.05, 0.35, 0.22, T);
            const Complex K = propagator(cfg, ep).amplitude;
            const Complex K0 = propagator(free_cfg, ep).amplitude;
            const double pref_err = std::abs(std::abs(K) / std::abs(K0) - 1.0);
            const double dr2 = std::pow(0.2, 2) + std::pow(0.17, 2);
            const double s_free = dr2 / (2.0 * T);
            const double exp_rel_err = std::abs(std::arg(K / K0)) / s_free;
            if (prev_pref > 0.0) {
                CHECK(pref_err < 0.6 * prev_pref);    // O(T)
                CHECK(exp_rel_err < 0.3 * prev_exp);  // O(T^2)
            }
            prev_pref = pref_err;
            prev_exp = exp_rel_err;
        }
    }
    SUBCASE("small-T phase approaches the straight-line A integral when B != 0") {
        const SystemConfig cfg = make_config(1.0, 2.0, 0.7);
        const SystemConfig free_cfg = make_config(0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        // q int A . dr along the straight segment = m wL (xa yb - ya xb).
        const double a_phase = 0.7 * (0.15 * 0.22 - 0.05 * 0.35);
        double prev = 0.0;
        for (double T : {2e-2, 1e-2}) {
            const Endpoints ep = make_ep(0.15, 0.05, 0.35, 0.22, T);
            const Complex K = propagator(cfg, ep).amplitude;
            const Complex K0 = propagator(free_cfg, ep).amplitude;
            const double err = std::abs(std::arg(K / K0) - a_phase);
            if (prev > 0.0) CHECK(err < 0.6 * prev);  // O(T)
            prev = err;
        }
    }
}

TEST_CASE("energy levels") {
    SUBCASE("isotropic ladder") {
        const SystemConfig cfg = make_config(2.0, 2.0, 0.0);
        CHECK(energy_level(cfg, {0, 0}).value == doctest::Approx(2.0));
        CHECK(energy_level(cfg, {1, 2}).value == doctest::Approx(2.0 * 4.0));
    }
    SUBCASE("Landau limit") {
        const SystemConfig cfg = make_config(0.0, 0.0, 1.5);
        const double omega_c = 3.0;
        CHECK(energy_level(cfg, {0, 0}).value == doctest::Approx(omega_c * 0.5));
        CHECK(energy_level(cfg, {2, 0}).value == doctest::Approx(omega_c * 2.5));
        // m is a zero mode in this limit.
        CHECK(energy_level(cfg, {0, 7}).value == doctest::Approx(omega_c * 0.5));
    }
    SUBCASE("3-4-5 ground state") {
        const SystemConfig cfg = make_config(3.0, 3.0, 4.0);
        CHECK(energy_level(cfg, {0, 0}).value == doctest::Approx(5.0));
    }
    SUBCASE("monotone in both indices") {
        const SystemConfig cfg = make_config(2.0, 2.0, -1.2, 0.4, 0.0);
        for (int n = 0; n < 4; ++n) {
            for (int m = 0; m < 4; ++m) {
                CHECK(energy_level(cfg, {n + 1, m}).value >=
                      energy_level(cfg, {n, m}).value);
                CHECK(energy_level(cfg, {n, m + 1}).value >=
                      energy_level(cfg, {n, m}).value);
            }
        }
    }
}

TEST_CASE("closed-form trace") {
    SUBCASE("E = 0 has unit prefactor phase") {
        const SystemConfig cfg = make_config(2.0, 2.0, 1.0);
        const Complex tr = trace_closed_form(cfg, Complex(0.0, -1.0));
        const DerivedFrequencies f = derive_frequencies(cfg);
        const double denom = std::cosh(f.omega_eff_x) - std::cosh(f.omega_L);
        CHECK(tr.real() == doctest::Approx(0.5 / denom).epsilon(1e-12));
        CHECK(tr.imag() == doctest::Approx(0.0));
    }
    SUBCASE("omega_L = 0 geometric form") {
        const SystemConfig cfg = make_config(1.3, 1.3, 0.0);
        for (double s : {0.5, 1.0, 2.0}) {
            const Complex tr = trace_closed_form(cfg, Complex(0.0, -s));
            const double want = std::pow(2.0 * std::sinh(1.3 * s / 2.0), -2.0);
            CHECK(tr.real() == doctest::Approx(want).epsilon(1e-12));
        }
    }
    SUBCASE("pole rejection") {
        const SystemConfig cfg = make_config(1.0, 1.0, 0.0);
        CHECK_THROWS_AS(trace_closed_form(cfg, Complex(0.0, 0.0)), PoleError);
    }
}

TEST_CASE("reduction chain on actions") {
    const Endpoints ep = make_ep(0.2, -0.3, 0.9, 0.4, 0.6);
    // anisotropic -> isotropic
    const SystemConfig aniso_as_iso = make_config(1.5, 1.5, 0.8);
    CHECK(classical_action_aniso_B(aniso_as_iso, ep).value ==
          doctest::Approx(classical_action_iso_B(aniso_as_iso, ep).value)
              .epsilon(1e-12));
    // isotropic -> pure B
    const double iso_small = classical_action_iso_B(make_config(1e-6, 1e-6, 0.8), ep).value;
    const double pure = classical_action_pure_B(make_config(0.0, 0.0, 0.8), ep).value;
    CHECK(std::abs(iso_small - pure) <= 1e-5 * std::max(1.0, std::abs(pure)));
    // pure B -> free
    const double pure_small =
        classical_action_pure_B(make_config(0.0, 0.0, 1e-6), ep).value;
    const double dr2 = std::pow(ep.x_b - ep.x_a, 2) + std::pow(ep.y_b - ep.y_a, 2);
    const double free_action = dr2 / (2.0 * ep.duration_T);
    CHECK(std::abs(pure_small - free_action) <= 1e-5 * free_action);
}

TEST_CASE("magnetic parity of the isotropic action") {
    // The sin(wL T) cross term is odd in B, the rest even: flipping B and
    // swapping endpoint chirality leaves the action invariant.
    const Endpoints ep = make_ep(0.3, 0.1, -0.4, 0.7, 0.5);
    Endpoints mirrored = ep;  // (x, y) -> (x, -y) flips the cross term
    mirrored.y_a = -ep.y_a;
    mirrored.y_b = -ep.y_b;
    const double plus = classical_action_iso_B(make_config(1.2, 1.2, 0.9), ep).value;
    const double minus =
        classical_action_iso_B(make_config(1.2, 1.2, -0.9), mirrored).value;
    CHECK(plus == doctest::Approx(minus).epsilon(1e-13));
}
