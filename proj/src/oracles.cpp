#include "proplab/oracles.hpp"

#include <lapacke.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "proplab/closed_form.hpp"

namespace proplab {

namespace {

using Matrix5 = Eigen::Matrix<double, 5, 5>;
using Vector4 = Eigen::Matrix<double, 4, 1>;

// First-order form z = (x, y, vx, vy), zdot = M z + g, augmented with the
// constant drive as a fifth homogeneous coordinate.
Matrix5 augmented_system(const SystemConfig& config) {
    const DerivedFrequencies f = derive_frequencies(config);
    Matrix5 m = Matrix5::Zero();
    m(0, 2) = 1.0;
    m(1, 3) = 1.0;
    m(2, 0) = -config.omega_x * config.omega_x;
    m(2, 3) = 2.0 * f.omega_L;
    m(3, 1) = -config.omega_y * config.omega_y;
    m(3, 2) = -2.0 * f.omega_L;
    m(2, 4) = config.charge * config.e_field_x / config.mass;
    m(3, 4) = config.charge * config.e_field_y / config.mass;
    return m;
}

}  // namespace

DiscretePath solve_classical_bvp(const SystemConfig& config, const Endpoints& ep,
                                 long N) {
    config.validate();
    ep.validate();
    if (N < 2) throw ConfigError("solve_classical_bvp: N must be >= 2");

    const Matrix5 sys = augmented_system(config);
    const Matrix5 phi_T = (sys * ep.duration_T).exp();

    // r(T) = Phi_rr r_a + Phi_rv v0 + psi_r  =>  solve for v0.
    Eigen::Matrix2d phi_rr = phi_T.block<2, 2>(0, 0);
    Eigen::Matrix2d phi_rv = phi_T.block<2, 2>(0, 2);
    Eigen::Vector2d psi_r = phi_T.block<2, 1>(0, 4);
    const double det = phi_rv.determinant();
    // det ~ (sin-type factors)/Omega^2; compare against the squared
    // characteristic length of a healthy solve, min(T, 1/Omega_max)^2.
    const DerivedFrequencies f = derive_frequencies(config);
    const double omega_scale =
        std::max({std::hypot(f.omega_eff_x, f.omega_eff_y), std::abs(f.omega_L),
                  1.0 / ep.duration_T});
    const double det_floor = kCausticTol * kCausticTol / (omega_scale * omega_scale);
    if (std::abs(det) < det_floor)
        throw NonUniqueSolution("classical BVP singular near a caustic");

    const Eigen::Vector2d r_a(ep.x_a, ep.y_a);
    const Eigen::Vector2d r_b(ep.x_b, ep.y_b);
    const Eigen::Vector2d v0 = phi_rv.inverse() * (r_b - phi_rr * r_a - psi_r);

    const double dt = ep.duration_T / static_cast<double>(N);
    const Matrix5 step = (sys * dt).exp();

    DiscretePath path;
    path.duration_T = ep.duration_T;
    path.config = config;
    path.x.reserve(static_cast<size_t>(N) + 1);
    path.y.reserve(static_cast<size_t>(N) + 1);
    path.vx.reserve(static_cast<size_t>(N) + 1);
    path.vy.reserve(static_cast<size_t>(N) + 1);

    Eigen::Matrix<double, 5, 1> z;
    z << ep.x_a, ep.y_a, v0(0), v0(1), 1.0;
    for (long k = 0; k <= N; ++k) {
        path.x.push_back(z(0));
        path.y.push_back(z(1));
        path.vx.push_back(z(2));
        path.vy.push_back(z(3));
        if (k < N) z = step * z;
    }
    return path;
}

double path_eom_residual(const DiscretePath& path) {
    if (path.size() < 3) throw ConfigError("path too short for residual check");
    const Matrix5 sys = augmented_system(path.config);
    const long N = static_cast<long>(path.size()) - 1;
    // Compare stored samples against independently evaluated flow maps at a
    // subsample of times (bounds accumulated stepping drift).
    const long stride = std::max<long>(1, N / 64);
    Eigen::Matrix<double, 5, 1> z0;
    z0 << path.x[0], path.y[0], path.vx[0], path.vy[0], 1.0;
    double worst = 0.0;
    for (long k = stride; k <= N; k += stride) {
        const double t = path.duration_T * static_cast<double>(k) /
                         static_cast<double>(N);
        const Eigen::Matrix<double, 5, 1> zk = (sys * t).exp() * z0;
        const size_t i = static_cast<size_t>(k);
        worst = std::max(worst, std::abs(zk(0) - path.x[i]));
        worst = std::max(worst, std::abs(zk(1) - path.y[i]));
        worst = std::max(worst, std::abs(zk(2) - path.vx[i]));
        worst = std::max(worst, std::abs(zk(3) - path.vy[i]));
    }
    return worst;
}

namespace {

double lagrangian_at(const SystemConfig& config, const DerivedFrequencies& f,
                     const DiscretePath& p, size_t k) {
    const double x = p.x[k], y = p.y[k], vx = p.vx[k], vy = p.vy[k];
    return 0.5 * config.mass * (vx * vx + vy * vy) -
           0.5 * config.mass *
               (config.omega_x * config.omega_x * x * x +
                config.omega_y * config.omega_y * y * y) +
           config.mass * f.omega_L * (x * vy - y * vx) +
           config.charge * (config.e_field_x * x + config.e_field_y * y);
}

}  // namespace

ActionValue action_from_path(const SystemConfig& config, const DiscretePath& path) {
    config.validate();
    const size_t n_samples = path.size();
    if (n_samples < 4) throw ConfigError("action_from_path: need >= 4 samples");
    const long N = static_cast<long>(n_samples) - 1;
    const double dt = path.duration_T / static_cast<double>(N);
    const DerivedFrequencies f = derive_frequencies(config);

    std::vector<double> L(n_samples);
    for (size_t k = 0; k < n_samples; ++k) L[k] = lagrangian_at(config, f, path, k);

    // Composite Simpson; odd panel counts get a Simpson-3/8 tail.
    long simpson_panels = N;
    double tail = 0.0;
    if (N % 2 != 0) {
        simpson_panels = N - 3;
        const size_t j = static_cast<size_t>(simpson_panels);
        tail = 3.0 * dt / 8.0 * (L[j] + 3.0 * L[j + 1] + 3.0 * L[j + 2] + L[j + 3]);
    }
    double acc = 0.0;
    if (simpson_panels > 0) {
        acc = L[0] + L[static_cast<size_t>(simpson_panels)];
        for (long k = 1; k < simpson_panels; ++k)
            acc += (k % 2 == 1 ? 4.0 : 2.0) * L[static_cast<size_t>(k)];
        acc *= dt / 3.0;
    }
    return {acc + tail};
}

// ---------------------------------------------------------------------------
// Time-sliced propagator

namespace {

// Quadratic form S = 1/2 z^T H z + b^T z + c over the interior coordinates,
// assembled monomial by monomial. H is symmetric banded (ku = 3 with the
// interleaved x1,y1,x2,y2,... ordering).
class QuadraticForm {
  public:
    static constexpr lapack_int kBand = 3;

    explicit QuadraticForm(lapack_int dim)
        : dim_(dim), band_(static_cast<size_t>(kBand + 1) * static_cast<size_t>(dim), 0.0),
          linear_(static_cast<size_t>(dim), 0.0) {}

    // Adds coeff * u * v where negative indices mean fixed boundary values.
    void add_pair(lapack_int i, double val_i, lapack_int j, double val_j,
                  double coeff) {
        const bool var_i = i >= 0;
        const bool var_j = j >= 0;
        if (var_i && var_j) {
            if (i == j) {
                diag(i) += 2.0 * coeff;
            } else {
                upper(std::min(i, j), std::max(i, j)) += coeff;
            }
        } else if (var_i) {
            linear_[static_cast<size_t>(i)] += coeff * val_j;
        } else if (var_j) {
            linear_[static_cast<size_t>(j)] += coeff * val_i;
        } else {
            constant_ += coeff * val_i * val_j;
        }
    }

    void add_linear(lapack_int i, double val_i, double coeff) {
        if (i >= 0)
            linear_[static_cast<size_t>(i)] += coeff;
        else
            constant_ += coeff * val_i;
    }

    lapack_int dim() const { return dim_; }
    double constant() const { return constant_; }
    const std::vector<double>& linear() const { return linear_; }

    // LAPACK 'U' symmetric-band column-major storage, ldab = kBand + 1.
    const std::vector<double>& banded_upper() const { return band_; }

  private:
    double& upper(lapack_int i, lapack_int j) {
        // ab[ku + i - j, j], 0-based rows 0..ku with row ku = diagonal.
        return band_[static_cast<size_t>(kBand + i - j) +
                     static_cast<size_t>(j) * static_cast<size_t>(kBand + 1)];
    }
    double& diag(lapack_int i) { return upper(i, i); }

    lapack_int dim_;
    std::vector<double> band_;
    std::vector<double> linear_;
    double constant_ = 0.0;
};

struct SliceGrid {
    long N;
    double dt;
    // Returns the variable index of coordinate (x or y) at time index k,
    // or -1 when k is a fixed endpoint.
    lapack_int x_index(long k) const {
        return (k == 0 || k == N) ? -1 : static_cast<lapack_int>(2 * (k - 1));
    }
    lapack_int y_index(long k) const {
        return (k == 0 || k == N) ? -1 : static_cast<lapack_int>(2 * (k - 1) + 1);
    }
};

}  // namespace

Complex gauge_phase(const SystemConfig& config, const Endpoints& ep,
                    double gauge_lambda) {
    const double q = config.charge;
    const double B = config.b_field;
    const double hbar = config.constants.hbar;
    const double rb2 = ep.x_b * ep.x_b + ep.y_b * ep.y_b;
    const double ra2 = ep.x_a * ep.x_a + ep.y_a * ep.y_a;
    return std::polar(1.0, q * gauge_lambda * B * (rb2 - ra2) / (4.0 * hbar));
}

Complex sliced_propagator(const SystemConfig& config, const Endpoints& ep, long N,
                          const SlicedOptions& options) {
    config.validate();
    ep.validate();
    if (N < 2) throw ConfigError("sliced_propagator: N must be >= 2");

    const DerivedFrequencies f = derive_frequencies(config);
    const double m = config.mass;
    const double hbar = config.constants.hbar;
    const double q = config.charge;
    const double lamB = options.gauge_lambda * config.b_field;
    const SliceGrid grid{N, ep.duration_T / static_cast<double>(N)};
    const double dt = grid.dt;
    const lapack_int dim = static_cast<lapack_int>(2 * (N - 1));
    const bool midpoint = options.rule == SliceRule::midpoint;

    QuadraticForm form(dim);

    auto x_of = [&](long k) { return k == 0 ? ep.x_a : ep.x_b; };
    auto y_of = [&](long k) { return k == 0 ? ep.y_a : ep.y_b; };

    for (long k = 0; k < N; ++k) {
        const lapack_int xi = grid.x_index(k), xj = grid.x_index(k + 1);
        const lapack_int yi = grid.y_index(k), yj = grid.y_index(k + 1);
        const double xvi = xi < 0 ? x_of(k) : 0.0, xvj = xj < 0 ? x_of(k + 1) : 0.0;
        const double yvi = yi < 0 ? y_of(k) : 0.0, yvj = yj < 0 ? y_of(k + 1) : 0.0;

        // Kinetic term m (dr)^2 / (2 dt).
        const double kin = m / (2.0 * dt);
        form.add_pair(xi, xvi, xi, xvi, kin);
        form.add_pair(xj, xvj, xj, xvj, kin);
        form.add_pair(xi, xvi, xj, xvj, -2.0 * kin);
        form.add_pair(yi, yvi, yi, yvi, kin);
        form.add_pair(yj, yvj, yj, yvj, kin);
        form.add_pair(yi, yvi, yj, yvj, -2.0 * kin);

        // Symmetric-gauge vector-potential term. Midpoint and prepoint
        // sampling agree identically here: cross(r_k, dr) = cross(rbar, dr).
        const double wl = m * f.omega_L;
        form.add_pair(xi, xvi, yj, yvj, wl);
        form.add_pair(yi, yvi, xj, xvj, -wl);

        // Gauge deformation (lambda B / 2) (x, y) . dr.
        if (lamB != 0.0) {
            const double g4 = q * lamB / 4.0;
            if (midpoint) {
                // (g4)((x_{k+1}^2 - x_k^2) + (y...)), telescopes to the
                // boundary gauge phase.
                form.add_pair(xj, xvj, xj, xvj, g4);
                form.add_pair(xi, xvi, xi, xvi, -g4);
                form.add_pair(yj, yvj, yj, yvj, g4);
                form.add_pair(yi, yvi, yi, yvi, -g4);
            } else {
                // (q lambda B / 2) (x_k dx + y_k dy).
                const double g2 = q * lamB / 2.0;
                form.add_pair(xi, xvi, xj, xvj, g2);
                form.add_pair(xi, xvi, xi, xvi, -g2);
                form.add_pair(yi, yvi, yj, yvj, g2);
                form.add_pair(yi, yvi, yi, yvi, -g2);
            }
        }

        // Scalar potential and electric term, sampled per rule.
        const double cx = -0.5 * m * config.omega_x * config.omega_x * dt;
        const double cy = -0.5 * m * config.omega_y * config.omega_y * dt;
        const double ex = q * config.e_field_x * dt;
        const double ey = q * config.e_field_y * dt;
        if (midpoint) {
            // xbar^2 = (x_k + x_{k+1})^2 / 4.
            form.add_pair(xi, xvi, xi, xvi, 0.25 * cx);
            form.add_pair(xj, xvj, xj, xvj, 0.25 * cx);
            form.add_pair(xi, xvi, xj, xvj, 0.5 * cx);
            form.add_pair(yi, yvi, yi, yvi, 0.25 * cy);
            form.add_pair(yj, yvj, yj, yvj, 0.25 * cy);
            form.add_pair(yi, yvi, yj, yvj, 0.5 * cy);
            if (xi >= 0) form.add_linear(xi, 0.0, 0.5 * ex);
            if (xj >= 0) form.add_linear(xj, 0.0, 0.5 * ex);
            if (xi < 0) form.add_linear(xi, xvi, 0.5 * ex);
            if (xj < 0) form.add_linear(xj, xvj, 0.5 * ex);
            if (yi >= 0) form.add_linear(yi, 0.0, 0.5 * ey);
            if (yj >= 0) form.add_linear(yj, 0.0, 0.5 * ey);
            if (yi < 0) form.add_linear(yi, yvi, 0.5 * ey);
            if (yj < 0) form.add_linear(yj, yvj, 0.5 * ey);
        } else {
            form.add_pair(xi, xvi, xi, xvi, cx);
            form.add_pair(yi, yvi, yi, yvi, cy);
            if (xi >= 0)
                form.add_linear(xi, 0.0, ex);
            else
                form.add_linear(xi, xvi, ex);
            if (yi >= 0)
                form.add_linear(yi, 0.0, ey);
            else
                form.add_linear(yi, yvi, ey);
        }
    }

    // Stationary point: H z* = -b via banded LU.
    const lapack_int kl = QuadraticForm::kBand;
    const lapack_int ku = QuadraticForm::kBand;
    const lapack_int ldab_g = 2 * kl + ku + 1;
    std::vector<double> ab_g(static_cast<size_t>(ldab_g) * static_cast<size_t>(dim), 0.0);
    const auto& upper_band = form.banded_upper();
    for (lapack_int j = 0; j < dim; ++j) {
        for (lapack_int d = 0; d <= ku; ++d) {
            const lapack_int i = j - (ku - d);
            if (i < 0) continue;
            const double v =
                upper_band[static_cast<size_t>(d) +
                           static_cast<size_t>(j) * static_cast<size_t>(ku + 1)];
            // (i, j) of the symmetric matrix, i <= j; mirror into LU storage.
            ab_g[static_cast<size_t>(kl + ku + i - j) +
                 static_cast<size_t>(j) * static_cast<size_t>(ldab_g)] = v;
            if (i != j)
                ab_g[static_cast<size_t>(kl + ku + j - i) +
                     static_cast<size_t>(i) * static_cast<size_t>(ldab_g)] = v;
        }
    }
    std::vector<double> rhs(form.linear());
    for (double& v : rhs) v = -v;
    std::vector<lapack_int> ipiv(static_cast<size_t>(dim));
    lapack_int info = LAPACKE_dgbsv(LAPACK_COL_MAJOR, dim, kl, ku, 1, ab_g.data(),
                                    ldab_g, ipiv.data(), rhs.data(), dim);
    if (info != 0) throw SingularHessian("sliced propagator: singular stationary solve");
    double stationary_action = form.constant();
    const auto& lin = form.linear();
    for (lapack_int i = 0; i < dim; ++i)
        stationary_action += 0.5 * lin[static_cast<size_t>(i)] * rhs[static_cast<size_t>(i)];

    // Fresnel determinant from the eigenvalues of H.
    std::vector<double> band_copy(form.banded_upper());
    std::vector<double> eigs(static_cast<size_t>(dim));
    info = LAPACKE_dsbev(LAPACK_COL_MAJOR, 'N', 'U', dim, ku, band_copy.data(),
                         ku + 1, eigs.data(), nullptr, 1);
    if (info != 0) throw SingularHessian("sliced propagator: eigenvalue failure");

    double max_abs = 0.0;
    for (double v : eigs) max_abs = std::max(max_abs, std::abs(v));
    long double log_mag = 0.0L;
    long n_pos = 0, n_neg = 0;
    for (double v : eigs) {
        if (std::abs(v) < 1e-12 * max_abs)
            throw SingularHessian("sliced propagator: near-zero Hessian eigenvalue");
        log_mag -= 0.5L * std::log(std::abs(static_cast<long double>(v)));
        (v > 0.0 ? n_pos : n_neg) += 1;
    }

    // K = (m / 2 pi i hbar dt)^N e^{iS*/hbar} (2 pi hbar)^{dim/2}
    //     prod_j (-i lambda_j)^{-1/2}
    log_mag += static_cast<long double>(N) *
               std::log(static_cast<long double>(m / (2.0 * kPi * hbar * dt)));
    log_mag += 0.5L * static_cast<long double>(dim) *
               std::log(static_cast<long double>(2.0 * kPi * hbar));
    const double phase = -0.5 * kPi * static_cast<double>(N) +
                         0.25 * kPi * static_cast<double>(n_pos - n_neg) +
                         stationary_action / hbar;
    return std::polar(static_cast<double>(std::exp(log_mag)), phase);
}

// ---------------------------------------------------------------------------
// Truncated-basis diagonalization

namespace {

struct LadderContext {
    int K;                // states per axis
    double hbar, mass;
    double nu_x, nu_y;    // reference frequencies
};

size_t state_index(int nx, int ny, int K) {
    return static_cast<size_t>(nx) * static_cast<size_t>(K) + static_cast<size_t>(ny);
}

}  // namespace

std::vector<double> diagonalize_hamiltonian(const SystemConfig& config,
                                            int basis_per_axis, double ref_freq_x,
                                            double ref_freq_y) {
    config.validate();
    if (basis_per_axis < 4) throw ConfigError("basis_per_axis must be >= 4");
    if (!(ref_freq_x > 0.0) || !(ref_freq_y > 0.0))
        throw ConfigError("reference frequencies must be positive");

    const DerivedFrequencies f = derive_frequencies(config);
    const LadderContext ctx{basis_per_axis, config.constants.hbar, config.mass,
                            ref_freq_x, ref_freq_y};
    const int K = ctx.K;
    const size_t dim = static_cast<size_t>(K) * static_cast<size_t>(K);
    std::vector<Complex> H(dim * dim, Complex(0.0, 0.0));
    auto add = [&](size_t row, size_t col, Complex v) { H[col * dim + row] += v; };

    const double hbar = ctx.hbar;
    const double wx_eff = f.omega_eff_x;
    const double wy_eff = f.omega_eff_y;
    // Oscillator parts: diag (hbar/4)(nu + w^2/nu)(2n+1),
    // (n, n+2): (hbar/4)(w^2/nu - nu) sqrt((n+1)(n+2)).
    const double dx_co = 0.25 * hbar * (ctx.nu_x + wx_eff * wx_eff / ctx.nu_x);
    const double qx_co = 0.25 * hbar * (wx_eff * wx_eff / ctx.nu_x - ctx.nu_x);
    const double dy_co = 0.25 * hbar * (ctx.nu_y + wy_eff * wy_eff / ctx.nu_y);
    const double qy_co = 0.25 * hbar * (wy_eff * wy_eff / ctx.nu_y - ctx.nu_y);
    // Angular-momentum coupling -wL Lz =
    // -i wL (hbar/2) [sqrt(nu_y/nu_x)(a + a+)(b+ - b)
    //                 - sqrt(nu_x/nu_y)(b + b+)(a+ - a)]
    const double lz_xy = f.omega_L * 0.5 * hbar * std::sqrt(ctx.nu_y / ctx.nu_x);
    const double lz_yx = f.omega_L * 0.5 * hbar * std::sqrt(ctx.nu_x / ctx.nu_y);
    // Electric dipole -q E . r with x = l (a + a+).
    const double len_x = std::sqrt(hbar / (2.0 * ctx.mass * ctx.nu_x));
    const double len_y = std::sqrt(hbar / (2.0 * ctx.mass * ctx.nu_y));
    const double ex_co = -config.charge * config.e_field_x * len_x;
    const double ey_co = -config.charge * config.e_field_y * len_y;

    for (int nx = 0; nx < K; ++nx) {
        for (int ny = 0; ny < K; ++ny) {
            const size_t col = state_index(nx, ny, K);
            add(col, col, dx_co * (2.0 * nx + 1.0) + dy_co * (2.0 * ny + 1.0));
            if (nx + 2 < K) {
                const double amp = std::sqrt((nx + 1.0) * (nx + 2.0));
                add(state_index(nx + 2, ny, K), col, qx_co * amp);
                add(col, state_index(nx + 2, ny, K), qx_co * amp);
            }
            if (ny + 2 < K) {
                const double amp = std::sqrt((ny + 1.0) * (ny + 2.0));
                add(state_index(nx, ny + 2, K), col, qy_co * amp);
                add(col, state_index(nx, ny + 2, K), qy_co * amp);
            }
            if (ex_co != 0.0 && nx + 1 < K) {
                const double amp = std::sqrt(nx + 1.0);
                add(state_index(nx + 1, ny, K), col, ex_co * amp);
                add(col, state_index(nx + 1, ny, K), ex_co * amp);
            }
            if (ey_co != 0.0 && ny + 1 < K) {
                const double amp = std::sqrt(ny + 1.0);
                add(state_index(nx, ny + 1, K), col, ey_co * amp);
                add(col, state_index(nx, ny + 1, K), ey_co * amp);
            }
            if (f.omega_L != 0.0) {
                // -i lz_xy (a + a+)(b+ - b): acts as |nx +- 1, ny +- 1>.
                auto add_lz = [&](int dnx, int dny, double amp_x, double amp_y,
                                  double coeff) {
                    const int mx = nx + dnx, my = ny + dny;
                    if (mx < 0 || mx >= K || my < 0 || my >= K) return;
                    add(state_index(mx, my, K), col,
                        Complex(0.0, -1.0) * coeff * amp_x * amp_y);
                };
                const double ax_up = std::sqrt(nx + 1.0), ax_dn = std::sqrt(nx * 1.0);
                const double ay_up = std::sqrt(ny + 1.0), ay_dn = std::sqrt(ny * 1.0);
                // (a + a+)(b+ - b)
                add_lz(+1, +1, ax_up, ay_up, lz_xy);
                add_lz(-1, +1, ax_dn, ay_up, lz_xy);
                add_lz(+1, -1, ax_up, -ay_dn, lz_xy);
                add_lz(-1, -1, ax_dn, -ay_dn, lz_xy);
                // +i lz_yx (b + b+)(a+ - a) contributes with opposite i.
                auto add_lz2 = [&](int dnx, int dny, double amp_x, double amp_y,
                                   double coeff) {
                    const int mx = nx + dnx, my = ny + dny;
                    if (mx < 0 || mx >= K || my < 0 || my >= K) return;
                    add(state_index(mx, my, K), col,
                        Complex(0.0, 1.0) * coeff * amp_x * amp_y);
                };
                add_lz2(+1, +1, ax_up, ay_up, lz_yx);
                add_lz2(+1, -1, ax_up, ay_dn, lz_yx);
                add_lz2(-1, +1, -ax_dn, ay_up, lz_yx);
                add_lz2(-1, -1, -ax_dn, ay_dn, lz_yx);
            }
        }
    }

    std::vector<double> eigs(dim);
    const lapack_int n = static_cast<lapack_int>(dim);
    lapack_int info = LAPACKE_zheevd(
        LAPACK_COL_MAJOR, 'N', 'U', n,
        reinterpret_cast<lapack_complex_double*>(H.data()), n, eigs.data());
    if (info != 0) throw Error("zheevd failed with info " + std::to_string(info));
    return eigs;
}

std::vector<double> diagonalize_hamiltonian(const SystemConfig& config,
                                            int basis_per_axis) {
    const DerivedFrequencies f = derive_frequencies(config);
    const double nu_x = f.omega_eff_x > 0.0 ? f.omega_eff_x : 1.0;
    const double nu_y = f.omega_eff_y > 0.0 ? f.omega_eff_y : 1.0;
    return diagonalize_hamiltonian(config, basis_per_axis, nu_x, nu_y);
}

std::vector<double> diagonalize_hamiltonian_checked(const SystemConfig& config,
                                                    int basis_per_axis, int step,
                                                    int lowest, double drift_tol) {
    if (step < 1 || basis_per_axis - step < 4)
        throw ConfigError("diagonalize_hamiltonian_checked: bad step");
    const std::vector<double> coarse =
        diagonalize_hamiltonian(config, basis_per_axis - step);
    const std::vector<double> fine = diagonalize_hamiltonian(config, basis_per_axis);
    const int n_check = std::min<int>(lowest, static_cast<int>(coarse.size()));
    double drift = 0.0;
    for (int i = 0; i < n_check; ++i)
        drift = std::max(drift, std::abs(fine[static_cast<size_t>(i)] -
                                         coarse[static_cast<size_t>(i)]));
    if (drift > drift_tol)
        throw BasisTooSmall("lowest-" + std::to_string(n_check) + " drift " +
                            std::to_string(drift) + " exceeds tolerance");
    return fine;
}

// ---------------------------------------------------------------------------
// Schrodinger residual

double schrodinger_residual_kernel(const SystemConfig& config, const Endpoints& ep,
                                   double h, const KernelFn& kernel) {
    config.validate();
    ep.validate();
    if (!(h > 0.0)) throw ConfigError("stencil step must be positive");
    const double x = ep.x_b, y = ep.y_b, T = ep.duration_T;
    const double hbar = config.constants.hbar;
    const double m = config.mass;
    const double q = config.charge;
    const Complex i_unit(0.0, 1.0);

    const Complex k0 = kernel(x, y, T);
    const Complex kxp = kernel(x + h, y, T), kxm = kernel(x - h, y, T);
    const Complex kyp = kernel(x, y + h, T), kym = kernel(x, y - h, T);
    const Complex ktp = kernel(x, y, T + h), ktm = kernel(x, y, T - h);

    const Complex dT = (ktp - ktm) / (2.0 * h);
    const Complex dx = (kxp - kxm) / (2.0 * h);
    const Complex dy = (kyp - kym) / (2.0 * h);
    const Complex dxx = (kxp - 2.0 * k0 + kxm) / (h * h);
    const Complex dyy = (kyp - 2.0 * k0 + kym) / (h * h);

    // H = -hbar^2 lap / 2m + (i hbar q / m) A . grad + q^2 A^2 / 2m + V,
    // symmetric gauge A = (B/2)(-y, x).
    const double Ax = -0.5 * config.b_field * y;
    const double Ay = 0.5 * config.b_field * x;
    const double V = 0.5 * m * (config.omega_x * config.omega_x * x * x +
                                config.omega_y * config.omega_y * y * y) -
                     q * (config.e_field_x * x + config.e_field_y * y);
    const Complex Hk = -hbar * hbar / (2.0 * m) * (dxx + dyy) +
                       i_unit * hbar * q / m * (Ax * dx + Ay * dy) +
                       (q * q * (Ax * Ax + Ay * Ay) / (2.0 * m) + V) * k0;

    const Complex lhs = i_unit * hbar * dT;
    const double scale = std::max(std::abs(k0), 1e-300);
    return std::abs(lhs - Hk) / scale;
}

double schrodinger_residual(const SystemConfig& config, const Endpoints& ep,
                            double h) {
    const KernelFn k = [config, ep](double xb, double yb, double T) {
        Endpoints e = ep;
        e.x_b = xb;
        e.y_b = yb;
        e.duration_T = T;
        return propagator(config, e).amplitude;
    };
    return schrodinger_residual_kernel(config, ep, h, k);
}

// ---------------------------------------------------------------------------
// Trace vs spectrum

TraceComparison trace_vs_spectrum(const SystemConfig& config, double s, int cutoff) {
    config.validate();
    if (!(s > 0.0)) throw ConfigError("trace comparison requires s > 0");
    if (cutoff < 2) throw ConfigError("cutoff must be >= 2");
    if (!config.isotropic())
        throw AnisotropyError("trace comparison requires an isotropic config");

    const DerivedFrequencies f = derive_frequencies(config);
    const double hbar = config.constants.hbar;
    const double w_eff = f.omega_eff_x;
    const double omega = config.omega_x;
    const double E2 = config.e_field_x * config.e_field_x +
                      config.e_field_y * config.e_field_y;
    if (E2 > 0.0 && omega <= 0.0) throw DegenerateShift("trace: E != 0 with omega = 0");

    const double shift =
        (E2 > 0.0) ? config.charge * config.charge * E2 /
                         (2.0 * config.mass * omega * omega)
                   : 0.0;

    // Geometric ladder sums with ratios r+- = exp(-(w_eff +- wL) s).
    const double r_plus = std::exp(-(w_eff + f.omega_L) * s);
    const double r_minus = std::exp(-(w_eff - f.omega_L) * s);
    if (r_plus >= 1.0 || r_minus >= 1.0)
        throw ConfigError("trace comparison needs positive ladder spacings");

    double sum = 0.0;
    for (int n = 0; n < cutoff; ++n) {
        for (int m = 0; m < cutoff; ++m) {
            const double en = hbar * (w_eff + f.omega_L) * (n + 0.5) +
                              hbar * (w_eff - f.omega_L) * (m + 0.5);
            sum += std::exp(-en * s / hbar);
        }
    }
    TraceComparison cmp;
    cmp.spectrum_sum = sum * std::exp(shift * s / hbar);           // E-shift lowers E
    cmp.spectrum_sum_flipped = sum * std::exp(-shift * s / hbar);  // opposite sign
    cmp.tail_bound = std::pow(r_plus, cutoff) / (1.0 - r_plus) +
                     std::pow(r_minus, cutoff) / (1.0 - r_minus);
    if (cmp.tail_bound > 1e-9)
        throw CutoffTooSmall("spectral tail bound " + std::to_string(cmp.tail_bound));

    cmp.closed_form = trace_closed_form(config, Complex(0.0, -s));
    const double closed_mag = std::abs(cmp.closed_form);
    cmp.rel_discrepancy = std::abs(cmp.closed_form - Complex(cmp.spectrum_sum)) /
                          closed_mag;
    cmp.rel_discrepancy_flipped =
        std::abs(cmp.closed_form - Complex(cmp.spectrum_sum_flipped)) / closed_mag;
    cmp.reconciling_sign = (cmp.rel_discrepancy <= cmp.rel_discrepancy_flipped) ? -1 : +1;
    return cmp;
}

// ---------------------------------------------------------------------------
// Sine-mode coupling diagnostic

std::pair<CouplingMatrix, SineCouplingReport> sine_mode_coupling(int n_modes,
                                                                 double T) {
    if (n_modes < 2) throw ConfigError("sine_mode_coupling: need >= 2 modes");
    if (!(T > 0.0)) throw ConfigError("sine_mode_coupling: T must be positive");

    CouplingMatrix mat;
    mat.n_modes = n_modes;
    mat.period = T;
    mat.entries.assign(static_cast<size_t>(n_modes) * static_cast<size_t>(n_modes),
                       0.0);
    SineCouplingReport rep;
    for (int n = 1; n <= n_modes; ++n) {
        for (int m = 1; m <= n_modes; ++m) {
            double value = 0.0;
            if (n != m && (n + m) % 2 == 1) {
                // (1/T) (2/T)(m pi / T)(T/pi) * 2n/(n^2 - m^2)
                value = 4.0 * static_cast<double>(n) * static_cast<double>(m) /
                        (T * T * static_cast<double>(n * n - m * m));
                rep.nonzero_odd_pairs += 1;
            }
            mat.entries[static_cast<size_t>(n - 1) * static_cast<size_t>(n_modes) +
                        static_cast<size_t>(m - 1)] = value;
            rep.max_abs_entry = std::max(rep.max_abs_entry, std::abs(value));
            if (n == m && value != 0.0) rep.diagonal_zero = false;
            if (n != m && (n + m) % 2 == 0 && value != 0.0) rep.even_pairs_zero = false;
        }
    }
    rep.all_couplings_vanish = rep.nonzero_odd_pairs == 0;
    return {mat, rep};
}

}  // namespace proplab
