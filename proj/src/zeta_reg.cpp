#include "proplab/zeta_reg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace proplab {

namespace {

// Smallest damped-tail cutoff: e^{-eps n} below ~1e-19 contributes nothing
// at double precision for the slowly varying terms used here.
long abel_cutoff(double eps) {
    return static_cast<long>(std::ceil(44.0 / eps)) + 1;
}

Complex sqrt_principal(Complex z) { return std::sqrt(z); }

}  // namespace

std::vector<double> default_abel_schedule(double eps0, int levels) {
    std::vector<double> schedule;
    schedule.reserve(static_cast<size_t>(levels));
    double eps = eps0;
    for (int k = 0; k < levels; ++k) {
        schedule.push_back(eps);
        eps *= 0.5;
    }
    return schedule;
}

RegularizedValue abel_sum(const std::function<double(long)>& term,
                          const std::vector<double>& eps_schedule,
                          int richardson_order) {
    if (eps_schedule.size() < 2)
        throw ConfigError("abel_sum needs at least two epsilon levels");
    for (size_t i = 1; i < eps_schedule.size(); ++i) {
        if (!(eps_schedule[i] > 0.0) || !(eps_schedule[i] < eps_schedule[i - 1]))
            throw ConfigError("abel_sum schedule must be decreasing and positive");
    }

    long max_N = 0;
    std::vector<double> sums;
    sums.reserve(eps_schedule.size());
    for (double eps : eps_schedule) {
        const long cutoff = abel_cutoff(eps);
        max_N = std::max(max_N, cutoff);
        double acc = 0.0;
        double comp = 0.0;  // Kahan compensation; tails are long at small eps
        for (long n = 1; n <= cutoff; ++n) {
            const double y = term(n) * std::exp(-eps * n) - comp;
            const double t = acc + y;
            comp = (t - acc) - y;
            acc = t;
        }
        if (!std::isfinite(acc))
            throw DivergedExtrapolation("abel_sum partial sum not finite");
        sums.push_back(acc);
    }

    // Richardson tableau for eps halving: R[k][j] kills the eps^j term.
    const int levels = static_cast<int>(sums.size());
    const int order = std::min(richardson_order, levels - 1);
    std::vector<std::vector<double>> tableau(static_cast<size_t>(levels));
    for (int k = 0; k < levels; ++k) {
        tableau[static_cast<size_t>(k)].resize(static_cast<size_t>(order) + 1);
        tableau[static_cast<size_t>(k)][0] = sums[static_cast<size_t>(k)];
    }
    for (int j = 1; j <= order; ++j) {
        const double pow2 = std::pow(2.0, j);
        for (int k = j; k < levels; ++k) {
            const double fine = tableau[static_cast<size_t>(k)][static_cast<size_t>(j) - 1];
            const double coarse = tableau[static_cast<size_t>(k) - 1][static_cast<size_t>(j) - 1];
            tableau[static_cast<size_t>(k)][static_cast<size_t>(j)] =
                (pow2 * fine - coarse) / (pow2 - 1.0);
        }
    }

    const double last = tableau[static_cast<size_t>(levels) - 1][static_cast<size_t>(order)];
    const double prev = tableau[static_cast<size_t>(levels) - 2][static_cast<size_t>(order)];
    const double err = std::abs(last - prev);
    if (!std::isfinite(last) || !std::isfinite(err))
        throw DivergedExtrapolation("abel_sum extrapolation not finite");
    const double scale = std::max(1.0, std::abs(last));
    if (err > 0.05 * scale)
        throw DivergedExtrapolation("abel_sum extrapolants did not settle");

    RegularizedValue out;
    out.value = last;
    out.truncation_N = max_N;
    out.epsilon_floor = eps_schedule.back();
    out.extrapolation_error = err;
    out.method = RegMethod::abel_richardson;
    return out;
}

RegularizedValue eta_value(int s) {
    RegularizedValue out;
    out.method = RegMethod::analytic;
    switch (s) {
        case -2: out.value = kPi * kPi / 12.0; break;  // 1 - 1/4 + 1/9 - ...
        case -1: out.value = std::log(2.0); break;     // 1 - 1/2 + 1/3 - ...
        case 0: out.value = 0.5; break;                // 1 - 1 + 1 - ...
        case 1: out.value = 0.25; break;               // 1 - 2 + 3 - ...
        case 2: out.value = 0.0; break;                // 1 - 4 + 9 - ...
        case 3: out.value = -0.125; break;             // 1 - 8 + 27 - ...
        default:
            throw UnsupportedOrder("eta_value: exponent " + std::to_string(s) +
                                   " not in the analytic set {-2..3}");
    }
    return out;
}

RegularizedValue zeta_nonpositive(int s) {
    RegularizedValue out;
    out.method = RegMethod::analytic;
    switch (s) {
        case 0: out.value = -0.5; break;
        case -1: out.value = -1.0 / 12.0; break;
        case -2: out.value = 0.0; break;
        case -3: out.value = 1.0 / 120.0; break;
        default:
            throw UnsupportedOrder("zeta_nonpositive: s " + std::to_string(s) +
                                   " not in {0,-1,-2,-3}");
    }
    return out;
}

RegularizedValue zeta_prime_zero() {
    RegularizedValue out;
    out.method = RegMethod::analytic;
    out.value = -0.5 * std::log(2.0 * kPi);
    return out;
}

RegularizedValue zeta_prime_zero_abel() {
    // Alternating route: A = sum (-1)^(n+1) log n, then
    // sum log n = log 2 - A from the even-part bookkeeping with sum 1 = -1/2.
    const auto schedule = default_abel_schedule();
    RegularizedValue alt = abel_sum(
        [](long n) {
            const double sign = (n % 2 == 1) ? 1.0 : -1.0;
            return sign * std::log(static_cast<double>(n));
        },
        schedule);
    RegularizedValue out = alt;
    out.value = alt.value.real() - std::log(2.0);
    out.method = RegMethod::abel_richardson;
    return out;
}

Complex reg_product_quadratic(Complex alpha) {
    if (alpha == Complex(0.0, 0.0)) throw ZeroAlpha("reg_product_quadratic: alpha = 0");
    const Complex i_pi(0.0, kPi);
    return sqrt_principal(alpha / i_pi) / (2.0 * kPi);
}

namespace {

// Real roots of alpha n^2 + gamma n - beta (alpha > 0).
struct LatticeRoots {
    double plus;
    double minus;
};

LatticeRoots lattice_roots(const FourierParams& fp) {
    if (!(fp.alpha > 0.0)) throw ConfigError("lattice sum requires alpha > 0");
    const double disc = fp.gamma * fp.gamma + 4.0 * fp.alpha * fp.beta;
    if (disc < 0.0)
        throw ConfigError("lattice sum: complex roots unsupported (beta < -gamma^2/4a)");
    const double root = std::sqrt(disc);
    return {(-fp.gamma + root) / (2.0 * fp.alpha), (-fp.gamma - root) / (2.0 * fp.alpha)};
}

void check_roots_off_lattice(const LatticeRoots& r) {
    for (double root : {r.plus, r.minus}) {
        if (std::abs(root - std::round(root)) < 1e-12)
            throw PoleOnLattice("mode sum has a pole at integer n = " +
                                std::to_string(std::lround(root)));
    }
}

}  // namespace

Complex sum_inverse_quadratic(const FourierParams& fp) {
    const LatticeRoots r = lattice_roots(fp);
    check_roots_off_lattice(r);
    const double spread = fp.alpha * (r.plus - r.minus);  // sqrt(gamma^2 + 4 alpha beta)
    if (fp.gamma == 0.0) {
        // Symmetric roots +-x: -(pi/x) cot(pi x) / alpha.
        const double x = r.plus;
        return -kPi / (x * std::tan(kPi * x)) / fp.alpha;
    }
    const double cot_minus = 1.0 / std::tan(kPi * r.minus);
    const double cot_plus = 1.0 / std::tan(kPi * r.plus);
    return kPi * (cot_minus - cot_plus) / spread;
}

Complex sum_inverse_quadratic_truncated(const FourierParams& fp, long N) {
    const LatticeRoots r = lattice_roots(fp);
    check_roots_off_lattice(r);
    double acc = 0.0;
    for (long n = -N; n <= N; ++n) {
        const double nn = static_cast<double>(n);
        acc += 1.0 / (fp.alpha * nn * nn - fp.beta + fp.gamma * nn);
    }
    return acc;
}

std::pair<Complex, Complex> eulerian_sine_product(Complex x, long N) {
    if (N < 1) throw ConfigError("eulerian_sine_product: N must be positive");
    if (x.imag() == 0.0 && x.real() != 0.0) {
        const double xr = x.real();
        if (std::abs(xr - std::round(xr)) < 1e-14)
            throw PoleAtInteger("eulerian sine product pole at integer x");
    }
    Complex truncated(1.0, 0.0);
    const Complex x2 = x * x;
    for (long n = 1; n <= N; ++n) {
        const double nn = static_cast<double>(n);
        truncated *= 1.0 - x2 / (nn * nn);
    }
    Complex closed;
    if (x == Complex(0.0, 0.0)) {
        closed = 1.0;
    } else {
        const Complex px = kPi * x;
        closed = std::sin(px) / px;
    }
    return {truncated, closed};
}

Complex fluctuation_pipeline(const FourierParams& fp, double mass, double hbar) {
    if (!(mass > 0.0) || !(hbar > 0.0))
        throw ConfigError("fluctuation_pipeline: mass and hbar must be positive");
    const LatticeRoots roots = lattice_roots(fp);
    check_roots_off_lattice(roots);

    // Gaussian k-integral over exp(i a k^2) with a from the lattice sum.
    const Complex lattice = sum_inverse_quadratic(fp);
    const Complex a = -lattice / 4.0;
    if (std::abs(a) < 1e-300) throw CausticSingularity("mode sum vanished (caustic)");
    const Complex i_pi(0.0, kPi);
    const Complex k_integral = sqrt_principal(i_pi / a);

    // Zero-mode factor sqrt(i pi / (-beta)) and the regularized n >= 1 part.
    const Complex zero_mode = sqrt_principal(i_pi / Complex(-fp.beta, 0.0));
    const Complex quad_product = reg_product_quadratic(Complex(fp.alpha, 0.0));

    if (fp.gamma == 0.0) {
        // Paired +-n factors appear once each: the sine product enters to the
        // first inverse power.
        const Complex sine = eulerian_sine_product(Complex(roots.plus, 0.0), 1).second;
        const Complex star = zero_mode * quad_product / sine;
        return k_integral * star / (2.0 * kPi);
    }

    // gamma != 0: the +-n pairing leaves each sine product under a square
    // root. Below the first caustic both root arguments lie in (-1, 1) and
    // the products are positive reals.
    const Complex sine_plus = eulerian_sine_product(Complex(roots.plus, 0.0), 1).second;
    const Complex sine_minus = eulerian_sine_product(Complex(roots.minus, 0.0), 1).second;
    const Complex star2 = zero_mode * quad_product / sqrt_principal(sine_plus * sine_minus);
    const Complex root_F = k_integral * star2 / (2.0 * kPi);
    return root_F * root_F;
}

SmoothingReport smoothing_check(double epsilon, long N) {
    if (epsilon < 0.0) throw ConfigError("smoothing_check: epsilon must be >= 0");
    if (N < 1) throw ConfigError("smoothing_check: N must be positive");
    SmoothingReport rep;
    rep.epsilon = epsilon;
    rep.truncation_N = N;
    rep.regularized_log = -2.0 * epsilon * zeta_nonpositive(-2).value.real();  // = 0
    rep.regularized_factor = std::exp(rep.regularized_log);
    double sum_sq = 0.0;
    for (long n = 1; n <= N; ++n)
        sum_sq += static_cast<double>(n) * static_cast<double>(n);
    rep.naive_log = -2.0 * epsilon * sum_sq;
    const double Nd = static_cast<double>(N);
    rep.naive_log_closed = -2.0 * epsilon * Nd * (Nd + 1.0) * (2.0 * Nd + 1.0) / 6.0;
    return rep;
}

ModeExpansion::ModeExpansion(std::vector<Complex> coefficients, double period)
    : coefficients_(std::move(coefficients)), period_(period) {
    if (coefficients_.empty() || coefficients_.size() % 2 == 0)
        throw ConfigError("ModeExpansion needs an odd coefficient count (n in [-N, N])");
    if (!(period_ > 0.0)) throw ConfigError("ModeExpansion period must be positive");
    max_index_ = static_cast<long>(coefficients_.size() / 2);
}

const Complex& ModeExpansion::coefficient(long n) const {
    if (n < -max_index_ || n > max_index_)
        throw ConfigError("ModeExpansion coefficient index out of range");
    return coefficients_[static_cast<size_t>(n + max_index_)];
}

Complex ModeExpansion::value(double t) const {
    Complex acc(0.0, 0.0);
    for (long n = -max_index_; n <= max_index_; ++n) {
        const double phase = 2.0 * kPi * static_cast<double>(n) * t / period_;
        acc += coefficient(n) * std::polar(1.0, phase);
    }
    return acc;
}

Complex ModeExpansion::derivative(double t) const {
    Complex acc(0.0, 0.0);
    for (long n = -max_index_; n <= max_index_; ++n) {
        const double w = 2.0 * kPi * static_cast<double>(n) / period_;
        const double phase = w * t;
        acc += coefficient(n) * Complex(0.0, w) * std::polar(1.0, phase);
    }
    return acc;
}

double ModeExpansion::norm_squared() const {
    double acc = 0.0;
    for (const Complex& c : coefficients_) acc += std::norm(c);
    return acc;
}

double ModeExpansion::derivative_norm_squared() const {
    double acc = 0.0;
    const double w0 = 2.0 * kPi / period_;
    for (long n = -max_index_; n <= max_index_; ++n)
        acc += w0 * w0 * static_cast<double>(n) * static_cast<double>(n) *
               std::norm(coefficient(n));
    return acc;
}

}  // namespace proplab
