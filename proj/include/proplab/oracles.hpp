#pragma once

#include <functional>
#include <vector>

#include "proplab/types.hpp"

// Independent brute-force verifiers: classical boundary-value solutions via
// the fundamental matrix of the linear equations of motion, action
// quadrature along the solved path, the exactly evaluated time-sliced
// Gaussian path integral, truncated-basis diagonalization of the
// Hamiltonian, finite-difference Schrodinger residuals, the spectral trace
// comparison and the sine-mode coupling diagnostic.

namespace proplab {

// Classical path sampled at t_k = k T / N, k = 0..N, with the velocities of
// the fundamental-matrix solution carried alongside for quadrature.
struct DiscretePath {
    std::vector<double> x, y, vx, vy;
    double duration_T = 0.0;
    SystemConfig config{};

    size_t size() const { return x.size(); }
};

struct ConvergenceRow {
    double resolution = 0.0;  // N, h or basis size
    Complex value{0.0, 0.0};
    Complex reference{0.0, 0.0};
    double rel_error = 0.0;
};

using ConvergenceTable = std::vector<ConvergenceRow>;

// Equations of motion of the planar charged oscillator:
//   m x'' = -m wx^2 x + 2 m wL y' + q Ex
//   m y'' = -m wy^2 y - 2 m wL x' + q Ey
// solved as a linear boundary-value problem through the matrix exponential
// of the first-order system. Throws NonUniqueSolution near caustics.
DiscretePath solve_classical_bvp(const SystemConfig& config, const Endpoints& ep,
                                 long N);

// Largest one-step propagation defect max_k |z_{k+1} - Phi(dt) z_k - psi(dt)|
// of the sampled path under the exact slice map; ~1e-13 for a valid path.
double path_eom_residual(const DiscretePath& path);

// Composite Simpson quadrature of the Lagrangian along the path (N even
// preferred; an odd tail panel falls back to Simpson 3/8).
ActionValue action_from_path(const SystemConfig& config, const DiscretePath& path);

// Where the scalar potential, electric term and vector potential are sampled
// on each segment of the time-sliced action.
enum class SliceRule { midpoint, prepoint };

struct SlicedOptions {
    SliceRule rule = SliceRule::midpoint;
    // Gauge deformation A -> A + (lambda B / 2) (x, y) of the same magnetic
    // field. The midpoint-rule integral is exactly gauge covariant (the added
    // term telescopes to a boundary phase); the prepoint rule is not, which
    // is the classic discretization ambiguity of magnetic path integrals.
    double gauge_lambda = 0.0;
};

// Exact evaluation of the N-slice discretized path integral: the action is
// quadratic in the 2(N-1) interior coordinates, so the multidimensional
// Fresnel integral equals the stationary-point phase times the
// eigenvalue-by-eigenvalue Fresnel determinant of the banded Hessian.
Complex sliced_propagator(const SystemConfig& config, const Endpoints& ep, long N,
                          const SlicedOptions& options = {});

// Gauge phase exp[i q lambda B (|r_b|^2 - |r_a|^2) / (4 hbar)] relating the
// deformed-gauge propagator to the symmetric-gauge one.
Complex gauge_phase(const SystemConfig& config, const Endpoints& ep,
                    double gauge_lambda);

// Ascending eigenvalues of H = (p - qA)^2/(2m) + m(wx^2 x^2 + wy^2 y^2)/2
//                              - q E . r
// in the truncated product basis of basis_per_axis oscillator states per
// axis (reference frequency = w_eff per axis unless overridden).
std::vector<double> diagonalize_hamiltonian(const SystemConfig& config,
                                            int basis_per_axis);
std::vector<double> diagonalize_hamiltonian(const SystemConfig& config,
                                            int basis_per_axis, double ref_freq_x,
                                            double ref_freq_y);

// Same, with a stability check: lowest `lowest` eigenvalues must drift less
// than drift_tol between basis_per_axis - step and basis_per_axis.
std::vector<double> diagonalize_hamiltonian_checked(const SystemConfig& config,
                                                    int basis_per_axis, int step,
                                                    int lowest, double drift_tol);

// Finite-difference residual |(i hbar d/dT - H_b) K| / |K| of a kernel
// K(x_b, y_b, T), second-order stencils of step h (the value carries the
// natural energy scale of the configuration). The kernel argument lets
// negative controls corrupt the action deliberately.
using KernelFn = std::function<Complex(double x_b, double y_b, double T)>;
double schrodinger_residual_kernel(const SystemConfig& config, const Endpoints& ep,
                                   double h, const KernelFn& kernel);
double schrodinger_residual(const SystemConfig& config, const Endpoints& ep,
                            double h);

struct TraceComparison {
    Complex closed_form{0.0, 0.0};
    double spectrum_sum = 0.0;          // with the implemented negative E^2 shift
    double spectrum_sum_flipped = 0.0;  // with the shift sign inverted
    double rel_discrepancy = 0.0;
    double rel_discrepancy_flipped = 0.0;
    double tail_bound = 0.0;
    int reconciling_sign = 0;  // sign of the E^2 energy shift closing the gap
};

// Compares the closed-form trace at Euclidean time tau = -i s against the
// direct sum over energy_level up to `cutoff` per index.
TraceComparison trace_vs_spectrum(const SystemConfig& config, double s, int cutoff);

struct CouplingMatrix {
    int n_modes = 0;
    double period = 0.0;
    std::vector<double> entries;  // row-major, entries[n-1][m-1]

    double at(int n, int m) const { return entries[static_cast<size_t>(n - 1) *
                                                   static_cast<size_t>(n_modes) +
                                                   static_cast<size_t>(m - 1)]; }
};

struct SineCouplingReport {
    bool diagonal_zero = true;
    bool even_pairs_zero = true;
    int nonzero_odd_pairs = 0;
    double max_abs_entry = 0.0;
    // The couplings do not all vanish: odd n+m pairs survive, so dropping
    // the velocity coupling from a sine-mode expansion is not justified by
    // orthogonality alone.
    bool all_couplings_vanish = false;
};

// M[n][m] = (1/T) integral_0^T phi_n phi_m' dt for phi_n = sqrt(2/T)
// sin(n pi t / T), evaluated from the closed antiderivative:
// zero for n = m and even n + m, and 4 n m / (T^2 (n^2 - m^2)) otherwise.
std::pair<CouplingMatrix, SineCouplingReport> sine_mode_coupling(int n_modes,
                                                                 double T);

}  // namespace proplab
