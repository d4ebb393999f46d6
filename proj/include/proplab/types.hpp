#pragma once

#include <complex>
#include <stdexcept>
#include <string>

// Core domain types shared by every component: physical configuration,
// derived frequencies, propagator endpoints and the error taxonomy.
//
// Unit conventions: natural units with hbar and mass explicit config fields
// (defaults hbar = 1, mass = 1). All frequencies are angular. The magnetic
// field is uniform and perpendicular to the plane; q*B > 0 means the Larmor
// frequency is positive and the compensating frame rotation is
// counter-clockwise.

namespace proplab {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Rejection threshold for |sin(omega_eff * T)| before a caustic.
inline constexpr double kCausticTol = 1e-9;

// ---------------------------------------------------------------------------
// Errors

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : Error {
    using Error::Error;
};
// Fluctuation prefactor / classical action evaluated at sin(w_eff T) ~ 0.
struct CausticSingularity : Error {
    explicit CausticSingularity(const std::string& msg) : Error(msg) {}
};
// Isotropic-only operation called with omega_x != omega_y.
struct AnisotropyError : Error {
    using Error::Error;
};
// Electric-field shift q E / (m omega^2) undefined because omega = 0.
struct DegenerateShift : Error {
    using Error::Error;
};
// Trace denominator cos(w_eff tau) - cos(w_L tau) vanished.
struct PoleError : Error {
    using Error::Error;
};
// A lattice integer hits a zero of alpha n^2 - beta + gamma n.
struct PoleOnLattice : Error {
    using Error::Error;
};
// Eulerian sine product evaluated at a nonzero integer.
struct PoleAtInteger : Error {
    using Error::Error;
};
struct ZeroAlpha : Error {
    using Error::Error;
};
// eta/zeta value requested outside the implemented analytic set.
struct UnsupportedOrder : Error {
    using Error::Error;
};
struct DivergedExtrapolation : Error {
    using Error::Error;
};
// Classical boundary-value problem singular (at/near a caustic).
struct NonUniqueSolution : Error {
    using Error::Error;
};
// Discrete fluctuation Hessian singular (discrete caustic).
struct SingularHessian : Error {
    using Error::Error;
};
struct BasisTooSmall : Error {
    using Error::Error;
};
struct CutoffTooSmall : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Configuration

struct PhysicalConstants {
    double hbar = 1.0;
};

struct SystemConfig {
    double mass = 1.0;
    double charge = 0.0;
    double b_field = 0.0;
    double e_field_x = 0.0;
    double e_field_y = 0.0;
    double omega_x = 0.0;
    double omega_y = 0.0;
    PhysicalConstants constants{};

    bool isotropic() const { return omega_x == omega_y; }
    bool has_e_field() const { return e_field_x != 0.0 || e_field_y != 0.0; }

    void validate() const {
        if (!(mass > 0.0)) throw ConfigError("mass must be positive");
        if (!(constants.hbar > 0.0)) throw ConfigError("hbar must be positive");
        if (omega_x < 0.0 || omega_y < 0.0)
            throw ConfigError("oscillator frequencies must be nonnegative");
    }
};

struct DerivedFrequencies {
    double omega_L = 0.0;      // q B / (2 m)
    double omega_c = 0.0;      // q B / m
    double omega_eff_x = 0.0;  // sqrt(omega_L^2 + omega_x^2)
    double omega_eff_y = 0.0;
    // Half-sum/half-difference splitting, defined in the isotropic case only:
    // omega_eff_plus  = (sqrt(w^2 + w_L^2) + w_L) / 2
    // omega_eff_minus = (sqrt(w^2 + w_L^2) - w_L) / 2
    bool isotropic = false;
    double omega_eff_plus = 0.0;
    double omega_eff_minus = 0.0;
};

DerivedFrequencies derive_frequencies(const SystemConfig& config);

struct Endpoints {
    double x_a = 0.0;
    double y_a = 0.0;
    double x_b = 0.0;
    double y_b = 0.0;
    double duration_T = 1.0;

    void validate() const {
        if (!(duration_T > 0.0)) throw ConfigError("duration_T must be positive");
    }
};

// Parameters of the quadratic mode sum alpha n^2 - beta + gamma n.
struct FourierParams {
    double alpha = 0.0;  // 2 m pi^2 / (hbar T)
    double beta = 0.0;   // m omega^2 T / (2 hbar)
    double gamma = 0.0;  // 2 m pi omega_L / hbar
};

// Mode-sum parameters of an isotropic configuration over duration T.
FourierParams fourier_params(const SystemConfig& config, double T);

enum class PhaseConvention { principal_branch, maslov_tracked };

struct PropagatorValue {
    Complex amplitude{0.0, 0.0};
    int caustics_crossed = 0;
    PhaseConvention phase_convention = PhaseConvention::principal_branch;
};

struct ActionValue {
    double value = 0.0;
};

struct SpectrumIndex {
    int n = 0;
    int m = 0;
};

}  // namespace proplab
