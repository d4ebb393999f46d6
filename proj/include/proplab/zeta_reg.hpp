#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "proplab/types.hpp"

// Divergent-series machinery: Abel summation with Richardson extrapolation,
// analytic eta/zeta integer values, zeta-regularized infinite products, the
// closed-form lattice sum over 1/(alpha n^2 - beta + gamma n), the Eulerian
// sine product and the assembled fluctuation-integral pipelines.
//
// Indexing convention: series of the family sum (-1)^(n+1) n^s are labelled
// by the exponent s of n, not by the analytic-continuation argument. The
// usual Dirichlet eta corresponds to eta_value(-s) here; the exponent
// labelling avoids the ambiguity of calling both 1-2+3-... and
// 1-1/2+1/3-... "eta(1)".

namespace proplab {

enum class RegMethod { analytic, abel_richardson, truncated_product };

struct RegularizedValue {
    Complex value{0.0, 0.0};
    long truncation_N = 0;
    double epsilon_floor = 0.0;
    double extrapolation_error = 0.0;
    RegMethod method = RegMethod::analytic;
};

// Geometric damping schedule eps_k = eps0 * 2^-k, k = 0..levels-1.
std::vector<double> default_abel_schedule(double eps0 = 0.1, int levels = 13);

// Abel-sums sum_{n>=1} term(n) e^{-eps n} over the schedule and Richardson-
// extrapolates eps -> 0 (step ratio 2, up to the given order).
RegularizedValue abel_sum(const std::function<double(long)>& term,
                          const std::vector<double>& eps_schedule,
                          int richardson_order = 4);

// Analytic value of sum (-1)^(n+1) n^s for the implemented exponents
// s in {-2, -1, 0, 1, 2, 3}.
RegularizedValue eta_value(int s);

// zeta(s) for s in {0, -1, -2, -3}, exact.
RegularizedValue zeta_nonpositive(int s);

// zeta'(0) = -log(2 pi)/2, exact.
RegularizedValue zeta_prime_zero();

// Numeric route to zeta'(0): Abel-sum the alternating log series
// sum (-1)^(n+1) log n = log sqrt(2/pi) and remove the doubled even part
// using sum 1 = -1/2, giving sum log n = log(2 pi)/2.
RegularizedValue zeta_prime_zero_abel();

// Regularized product over n>=1 of i pi / (alpha n^2): equals
// (1/2pi) sqrt(alpha/(i pi)), principal branch.
Complex reg_product_quadratic(Complex alpha);

// Closed form of sum over all integers n of 1/(alpha n^2 - beta + gamma n).
Complex sum_inverse_quadratic(const FourierParams& fp);

// Partial sum over |n| <= N of the same lattice sum (diagnostic).
Complex sum_inverse_quadratic_truncated(const FourierParams& fp, long N);

// Truncated prod_{n<=N} (1 - x^2/n^2) and the closed form sin(pi x)/(pi x).
std::pair<Complex, Complex> eulerian_sine_product(Complex x, long N);

// Assembles the fluctuation integral from the regularized pieces:
// the lattice sum (Gaussian k-integral sqrt(i pi / a)), the regularized
// quadratic product and the sine products at the roots of
// alpha n^2 + gamma n - beta. Returns the 1d prefactor F_1d for gamma = 0
// (square externally for two dimensions) and the full 2d prefactor F(T)
// for gamma != 0.
Complex fluctuation_pipeline(const FourierParams& fp, double mass, double hbar);

struct SmoothingReport {
    double epsilon = 0.0;
    long truncation_N = 0;
    // log of the regularized factor prod e^{-2 eps n^2} = e^{-2 eps zeta(-2)}
    double regularized_log = 0.0;   // exactly 0
    double regularized_factor = 1.0;
    // log of the naive truncated product, -2 eps sum_{n<=N} n^2
    double naive_log = 0.0;
    double naive_log_closed = 0.0;  // -2 eps N(N+1)(2N+1)/6
};

// Contrast of the zeta-regularized Gaussian mode damping with its naive
// truncation: the regularized factor is exactly 1 for every eps while the
// truncated log diverges like -2 eps N^3 / 3.
SmoothingReport smoothing_check(double epsilon, long N);

// T-periodic complex Fourier mode expansion sum c_n exp(2 pi i n t / T),
// n in [-N, N]. Inner products follow the 1/T-normalized convention
// <f|g> = (1/T) integral f conj(g).
class ModeExpansion {
  public:
    ModeExpansion(std::vector<Complex> coefficients, double period);

    long max_index() const { return max_index_; }
    double period() const { return period_; }
    const Complex& coefficient(long n) const;

    Complex value(double t) const;
    Complex derivative(double t) const;

    // Parseval forms of <f|f> and <f'|f'>.
    double norm_squared() const;
    double derivative_norm_squared() const;

  private:
    std::vector<Complex> coefficients_;  // index n + max_index_
    long max_index_;
    double period_;
};

}  // namespace proplab
