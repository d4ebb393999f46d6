#include "proplab/types.hpp"

#include <cmath>

namespace proplab {

DerivedFrequencies derive_frequencies(const SystemConfig& config) {
    config.validate();
    DerivedFrequencies f;
    f.omega_L = config.charge * config.b_field / (2.0 * config.mass);
    f.omega_c = config.charge * config.b_field / config.mass;
    f.omega_eff_x = std::hypot(f.omega_L, config.omega_x);
    f.omega_eff_y = std::hypot(f.omega_L, config.omega_y);
    f.isotropic = config.isotropic();
    if (f.isotropic) {
        const double omega_eff = std::hypot(f.omega_L, config.omega_x);
        f.omega_eff_plus = 0.5 * (omega_eff + f.omega_L);
        f.omega_eff_minus = 0.5 * (omega_eff - f.omega_L);
    }
    return f;
}

FourierParams fourier_params(const SystemConfig& config, double T) {
    config.validate();
    if (!(T > 0.0)) throw ConfigError("duration must be positive");
    if (!config.isotropic())
        throw AnisotropyError("fourier_params requires omega_x == omega_y");
    const double hbar = config.constants.hbar;
    const double omega_L = config.charge * config.b_field / (2.0 * config.mass);
    FourierParams fp;
    fp.alpha = 2.0 * config.mass * kPi * kPi / (hbar * T);
    fp.beta = config.mass * config.omega_x * config.omega_x * T / (2.0 * hbar);
    fp.gamma = 2.0 * config.mass * kPi * omega_L / hbar;
    return fp;
}

}  // namespace proplab
