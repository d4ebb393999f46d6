#include <doctest.h>

#include <cmath>
#include <random>

#include "proplab/closed_form.hpp"
#include "proplab/zeta_reg.hpp"

using namespace proplab;

TEST_CASE("abel summation of the printed alternating series") {
    const auto schedule = default_abel_schedule();

    const auto half = abel_sum([](long n) { return n % 2 == 1 ? 1.0 : -1.0; }, schedule);
    CHECK(half.value.real() == doctest::Approx(0.5).epsilon(1e-6));

    const auto log2 = abel_sum(
        [](long n) { return (n % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(n); },
        schedule);
    CHECK(log2.value.real() == doctest::Approx(std::log(2.0)).epsilon(1e-6));

    const auto alt_log = abel_sum(
        [](long n) {
            return (n % 2 == 1 ? 1.0 : -1.0) * std::log(static_cast<double>(n));
        },
        schedule);
    CHECK(alt_log.value.real() ==
          doctest::Approx(0.5 * std::log(2.0 / kPi)).epsilon(1e-4));
    CHECK(alt_log.extrapolation_error < 1e-4);
}

TEST_CASE("abel summation reproduces ordinary convergent sums") {
    const auto schedule = default_abel_schedule();
    // sum 1/n^2 = pi^2/6, absolutely convergent.
    const auto basel = abel_sum(
        [](long n) { return 1.0 / (static_cast<double>(n) * static_cast<double>(n)); },
        schedule);
    const double exact = kPi * kPi / 6.0;
    CHECK(std::abs(basel.value.real() - exact) <=
          2.0 * basel.extrapolation_error + 1e-12);
    // Alternating series carry no eps log eps terms and extrapolate sharply.
    const auto eta2 = abel_sum(
        [](long n) {
            return (n % 2 == 1 ? 1.0 : -1.0) /
                   (static_cast<double>(n) * static_cast<double>(n));
        },
        schedule);
    CHECK(eta2.value.real() == doctest::Approx(kPi * kPi / 12.0).epsilon(1e-12));
    // geometric 1/2^n = 1.
    const auto geo = abel_sum([](long n) { return std::pow(0.5, n); }, schedule);
    CHECK(geo.value.real() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("abel schedule validation") {
    CHECK_THROWS_AS(abel_sum([](long) { return 1.0; }, {0.1}), ConfigError);
    CHECK_THROWS_AS(abel_sum([](long) { return 1.0; }, {0.1, 0.2}), ConfigError);
    // A violently growing series never settles.
    CHECK_THROWS_AS(abel_sum([](long n) { return std::exp(0.5 * n); },
                             default_abel_schedule(0.6, 4)),
                    DivergedExtrapolation);
}

TEST_CASE("eta values by exponent") {
    CHECK(eta_value(0).value.real() == doctest::Approx(0.5));
    CHECK(eta_value(1).value.real() == doctest::Approx(0.25));
    CHECK(eta_value(-1).value.real() == doctest::Approx(std::log(2.0)));
    CHECK(eta_value(-2).value.real() == doctest::Approx(kPi * kPi / 12.0));
    CHECK(eta_value(2).value.real() == doctest::Approx(0.0));
    CHECK_THROWS_AS(eta_value(7), UnsupportedOrder);
    CHECK(eta_value(0).extrapolation_error == 0.0);
}

TEST_CASE("zeta at nonpositive integers") {
    CHECK(zeta_nonpositive(0).value.real() == doctest::Approx(-0.5));
    CHECK(zeta_nonpositive(-1).value.real() == doctest::Approx(-1.0 / 12.0));
    CHECK(zeta_nonpositive(-2).value.real() == doctest::Approx(0.0));
    CHECK_THROWS_AS(zeta_nonpositive(1), UnsupportedOrder);
}

TEST_CASE("eta/zeta consistency at s = 0") {
    // eta = (1 - 2^{1+s}) zeta at s = 0: 1/2 = (1 - 2)(-1/2).
    const double eta0 = eta_value(0).value.real();
    const double zeta0 = zeta_nonpositive(0).value.real();
    CHECK(eta0 == doctest::Approx((1.0 - 2.0) * zeta0));
}

TEST_CASE("zeta prime at zero, analytic and Abel routes") {
    const auto analytic = zeta_prime_zero();
    CHECK(analytic.value.real() == doctest::Approx(-0.5 * std::log(2.0 * kPi)));
    CHECK(std::exp(-2.0 * analytic.value.real()) == doctest::Approx(2.0 * kPi));

    const auto numeric = zeta_prime_zero_abel();
    CHECK(std::abs(numeric.value.real() - analytic.value.real()) < 1e-4);
}

TEST_CASE("regularized quadratic product") {
    // alpha = i pi: radicand is 1.
    CHECK(std::abs(reg_product_quadratic(Complex(0.0, kPi)) -
                   Complex(1.0 / (2.0 * kPi))) < 1e-15);
    CHECK_THROWS_AS(reg_product_quadratic(Complex(0.0, 0.0)), ZeroAlpha);
}

TEST_CASE("regularized quadratic product squares back to alpha") {
    // [result]^2 (2 pi)^2 (i pi) = alpha, single valued away from the cut.
    std::mt19937_64 rng(31u);
    std::uniform_real_distribution<double> mag(0.2, 5.0);
    std::uniform_real_distribution<double> arg(-0.45 * kPi, 1.4 * kPi);
    for (int k = 0; k < 60; ++k) {
        // Stay off the branch cut of alpha/(i pi) (negative reals), i.e.
        // alpha on the negative imaginary axis.
        const Complex alpha = std::polar(mag(rng), arg(rng));
        const Complex r = reg_product_quadratic(alpha);
        const Complex back = r * r * (2.0 * kPi) * (2.0 * kPi) * Complex(0.0, kPi);
        CHECK(std::abs(back - alpha) < 1e-12 * std::abs(alpha));
    }
}

TEST_CASE("lattice sum closed form") {
    SUBCASE("cot(pi/2) zero") {
        FourierParams fp{1.0, 0.25, 0.0};
        CHECK(std::abs(sum_inverse_quadratic(fp)) < 1e-14);
    }
    SUBCASE("gamma to zero continuity") {
        FourierParams fp0{2.0, 0.3, 0.0};
        FourierParams fp_eps{2.0, 0.3, 1e-9};
        CHECK(sum_inverse_quadratic(fp0).real() ==
              doctest::Approx(sum_inverse_quadratic(fp_eps).real()).epsilon(1e-7));
    }
    SUBCASE("pole on the lattice") {
        // roots at n = 0 when beta = 0.
        CHECK_THROWS_AS(sum_inverse_quadratic(FourierParams{1.0, 0.0, 0.0}),
                        PoleOnLattice);
        // alpha n^2 - beta with beta = 4 alpha has roots +-2.
        CHECK_THROWS_AS(sum_inverse_quadratic(FourierParams{1.0, 4.0, 0.0}),
                        PoleOnLattice);
    }
    SUBCASE("truncated sum converges at rate 1/N") {
        FourierParams fp{1.7, 0.4, 2.2};
        const Complex exact = sum_inverse_quadratic(fp);
        double prev_err = 1e300;
        long prev_N = 0;
        for (long N : {100L, 1000L, 10000L, 100000L}) {
            const double err = std::abs(sum_inverse_quadratic_truncated(fp, N) - exact);
            if (prev_N > 0) {
                const double expected_drop =
                    static_cast<double>(prev_N) / static_cast<double>(N);
                CHECK(err < prev_err);
                CHECK(err / prev_err == doctest::Approx(expected_drop).epsilon(0.25));
            }
            prev_err = err;
            prev_N = N;
        }
    }
}

TEST_CASE("truncated lattice sum error is monotone beyond small N") {
    FourierParams fp{2.0, 0.35, 0.0};
    const Complex exact = sum_inverse_quadratic(fp);
    double prev = 1e300;
    for (long N = 8; N <= 4096; N *= 2) {
        const double err = std::abs(sum_inverse_quadratic_truncated(fp, N) - exact);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("eulerian sine product") {
    SUBCASE("x = 0 gives 1") {
        const auto [truncated, closed] = eulerian_sine_product(Complex(0.0), 10);
        CHECK(std::abs(closed - Complex(1.0)) < 1e-15);
        CHECK(std::abs(truncated - Complex(1.0)) < 1e-15);
    }
    SUBCASE("x = 1/2 gives 2/pi") {
        const auto [truncated, closed] = eulerian_sine_product(Complex(0.5), 200000);
        CHECK(closed.real() == doctest::Approx(2.0 / kPi).epsilon(1e-14));
        CHECK(truncated.real() == doctest::Approx(2.0 / kPi).epsilon(1e-4));
    }
    SUBCASE("truncation error O(1/N) at x = 0.3") {
        const auto [t1, closed] = eulerian_sine_product(Complex(0.3), 10000);
        const auto [t2, closed2] = eulerian_sine_product(Complex(0.3), 20000);
        const double e1 = std::abs(t1 - closed) / std::abs(closed);
        const double e2 = std::abs(t2 - closed2) / std::abs(closed2);
        CHECK(e1 < 2e-5);  // ~ x^2/N
        CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.1));
    }
    SUBCASE("integer pole") {
        CHECK_THROWS_AS(eulerian_sine_product(Complex(2.0), 10), PoleAtInteger);
    }
}

namespace {

SystemConfig iso_config(double omega, double omega_L, double mass = 1.0,
                        double hbar = 1.0) {
    SystemConfig c;
    c.mass = mass;
    c.constants.hbar = hbar;
    c.omega_x = omega;
    c.omega_y = omega;
    c.charge = 1.0;
    c.b_field = 2.0 * mass * omega_L;  // q = 1
    return c;
}

}  // namespace

TEST_CASE("pipeline reproduces the 1d oscillator prefactor at gamma = 0") {
    const double m = 1.0, hbar = 1.0, omega = 1.0, T = 1.0;
    const auto fp = fourier_params(iso_config(omega, 0.0), T);
    REQUIRE(fp.gamma == 0.0);
    const Complex got = fluctuation_pipeline(fp, m, hbar);
    const Complex want =
        std::sqrt(m * omega / (2.0 * kPi * hbar * std::sin(omega * T) * Complex(0.0, 1.0)));
    CHECK(std::abs(got - want) < 1e-13 * std::abs(want));
}

TEST_CASE("pipeline reproduces the magnetic prefactor at gamma != 0") {
    const double m = 1.0, hbar = 1.0, omega = 3.0, omega_L = 4.0, T = 0.2;
    const auto cfg = iso_config(omega, omega_L);
    const auto fp = fourier_params(cfg, T);
    REQUIRE(fp.gamma != 0.0);
    const Complex got = fluctuation_pipeline(fp, m, hbar);
    const double w_eff = std::hypot(omega, omega_L);
    const Complex want =
        m * w_eff / (2.0 * kPi * hbar * std::sin(w_eff * T) * Complex(0.0, 1.0));
    CHECK(std::abs(got - want) < 1e-12 * std::abs(want));
    // And the closed-form module agrees.
    const Complex closed = fluctuation_factor(cfg, T);
    CHECK(std::abs(got - closed) < 1e-12 * std::abs(closed));
    CHECK(std::abs(closed) == doctest::Approx(5.0 / (2.0 * kPi * std::sin(1.0))));
}

TEST_CASE("pipeline equals closed form on random non-caustic parameters") {
    std::mt19937_64 rng(2026u);
    std::uniform_real_distribution<double> omega_dist(0.3, 3.0);
    std::uniform_real_distribution<double> larmor_dist(-2.5, 2.5);
    std::uniform_real_distribution<double> mass_dist(0.5, 2.0);
    std::uniform_real_distribution<double> frac_dist(0.15, 0.92);
    int tested = 0;
    while (tested < 100) {
        const double omega = omega_dist(rng);
        const double omega_L = larmor_dist(rng);
        const double mass = mass_dist(rng);
        const double w_eff = std::hypot(omega, omega_L);
        const double T = frac_dist(rng) * kPi / w_eff;  // below the first caustic
        if (std::abs(std::sin(w_eff * T)) < 0.05) continue;
        SystemConfig cfg = iso_config(omega, omega_L, mass);
        const auto fp = fourier_params(cfg, T);

        if (fp.gamma == 0.0) {
            const Complex f1 = fluctuation_pipeline(fp, mass, 1.0);
            const Complex closed2 = fluctuation_factor(cfg, T);
            CHECK(std::abs(f1 * f1 - closed2) < 1e-12 * std::abs(closed2));
        } else {
            const Complex f2 = fluctuation_pipeline(fp, mass, 1.0);
            const Complex closed2 = fluctuation_factor(cfg, T);
            CHECK(std::abs(f2 - closed2) < 1e-12 * std::abs(closed2));
        }
        ++tested;
    }
}

TEST_CASE("smoothing check") {
    const auto rep = smoothing_check(1e-3, 1000);
    CHECK(rep.regularized_log == 0.0);
    CHECK(rep.regularized_factor == 1.0);
    CHECK(rep.naive_log == doctest::Approx(rep.naive_log_closed).epsilon(1e-12));
    // Dominant term -2 eps N^3 / 3.
    CHECK(rep.naive_log ==
          doctest::Approx(-2.0 * 1e-3 * std::pow(1000.0, 3) / 3.0).epsilon(2e-3));
    const auto zero_eps = smoothing_check(0.0, 100);
    CHECK(std::exp(zero_eps.naive_log) == doctest::Approx(1.0));
}

TEST_CASE("mode expansion inner products match Parseval forms") {
    std::vector<Complex> coeffs = {{0.2, -0.1}, {0.0, 0.4}, {0.0, 0.0},
                                   {-0.3, 0.2}, {0.1, 0.1}};
    const double T = 2.0;
    ModeExpansion modes(coeffs, T);
    // Quadrature of (1/T) int |f|^2 against sum |c_n|^2.
    const int steps = 4096;
    double quad = 0.0, quad_d = 0.0;
    for (int k = 0; k < steps; ++k) {
        const double t = T * (k + 0.5) / steps;
        quad += std::norm(modes.value(t));
        quad_d += std::norm(modes.derivative(t));
    }
    quad /= steps;
    quad_d /= steps;
    CHECK(quad == doctest::Approx(modes.norm_squared()).epsilon(1e-10));
    CHECK(quad_d == doctest::Approx(modes.derivative_norm_squared()).epsilon(1e-10));
}
