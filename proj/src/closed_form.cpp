#include "proplab/closed_form.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace proplab {

namespace {

// Zeros of sin(w t) strictly inside (0, T).
int count_caustics(double omega, double T) {
    if (omega <= 0.0) return 0;
    const double x = omega * T / kPi;
    int k = static_cast<int>(std::floor(x));
    if (std::abs(x - std::round(x)) < 1e-12) k = static_cast<int>(std::round(x)) - 1;
    return std::max(0, k);
}

void require_noncaustic(double omega, double T, const char* axis) {
    if (omega > 0.0 && std::abs(std::sin(omega * T)) < kCausticTol)
        throw CausticSingularity(std::string("sin(omega_eff T) below tolerance on ") +
                                 axis + " axis");
}

// Per-component electric shift q E / (m w^2); zero field shifts by zero.
double field_shift(double q, double E, double mass, double omega, const char* axis) {
    if (E == 0.0) return 0.0;
    if (omega <= 0.0)
        throw DegenerateShift(std::string("electric field along ") + axis +
                              " with vanishing oscillator frequency");
    return q * E / (mass * omega * omega);
}

struct ShiftedEndpoints {
    double x_a, y_a, x_b, y_b;
};

ShiftedEndpoints apply_shift(const SystemConfig& config, const Endpoints& ep,
                             bool include_shift) {
    double dx = 0.0;
    double dy = 0.0;
    if (include_shift) {
        dx = field_shift(config.charge, config.e_field_x, config.mass, config.omega_x, "x");
        dy = field_shift(config.charge, config.e_field_y, config.mass, config.omega_y, "y");
    }
    return {ep.x_a - dx, ep.y_a - dy, ep.x_b - dx, ep.y_b - dy};
}

}  // namespace

ActionValue classical_action_1d_ho(double mass, double omega, double x_a,
                                   double x_b, double T) {
    if (!(mass > 0.0) || !(T > 0.0)) throw ConfigError("mass and T must be positive");
    if (omega < 0.0) throw ConfigError("omega must be nonnegative");
    if (omega == 0.0) {
        const double dx = x_b - x_a;
        return {mass * dx * dx / (2.0 * T)};
    }
    const double s = std::sin(omega * T);
    if (std::abs(s) < kCausticTol)
        throw CausticSingularity("1d action at sin(omega T) ~ 0");
    const double c = std::cos(omega * T);
    return {mass * omega / (2.0 * s) * ((x_a * x_a + x_b * x_b) * c - 2.0 * x_a * x_b)};
}

TransformedEndpoints transform_endpoints(const SystemConfig& config,
                                         const Endpoints& ep, bool include_shift) {
    config.validate();
    ep.validate();
    const DerivedFrequencies f = derive_frequencies(config);
    const ShiftedEndpoints s = apply_shift(config, ep, include_shift);
    const double c = std::cos(f.omega_L * ep.duration_T);
    const double sn = std::sin(f.omega_L * ep.duration_T);
    TransformedEndpoints out;
    out.x_a_t = s.x_a;
    out.y_a_t = s.y_a;
    out.x_b_t = s.x_b * c - s.y_b * sn;
    out.y_b_t = s.x_b * sn + s.y_b * c;
    return out;
}

ActionValue constant_action_term(const SystemConfig& config, const Endpoints& ep) {
    config.validate();
    ep.validate();
    const double q = config.charge;
    const double m = config.mass;
    const DerivedFrequencies f = derive_frequencies(config);
    double value = 0.0;
    if (config.e_field_x != 0.0) {
        if (config.omega_x <= 0.0)
            throw DegenerateShift("constant term: E_x with omega_x = 0");
        const double wx2 = config.omega_x * config.omega_x;
        value += q * q * ep.duration_T * config.e_field_x * config.e_field_x /
                 (2.0 * m * wx2);
        value += q * f.omega_L * config.e_field_x / wx2 * (ep.y_b - ep.y_a);
    }
    if (config.e_field_y != 0.0) {
        if (config.omega_y <= 0.0)
            throw DegenerateShift("constant term: E_y with omega_y = 0");
        const double wy2 = config.omega_y * config.omega_y;
        value += q * q * ep.duration_T * config.e_field_y * config.e_field_y /
                 (2.0 * m * wy2);
        value -= q * f.omega_L * config.e_field_y / wy2 * (ep.x_b - ep.x_a);
    }
    return {value};
}

ActionValue classical_action_iso_B(const SystemConfig& config, const Endpoints& ep) {
    config.validate();
    ep.validate();
    if (!config.isotropic())
        throw AnisotropyError("classical_action_iso_B requires omega_x == omega_y");
    const DerivedFrequencies f = derive_frequencies(config);
    const double w_eff = f.omega_eff_x;
    const double T = ep.duration_T;
    if (w_eff == 0.0) {
        const double dx = ep.x_b - ep.x_a;
        const double dy = ep.y_b - ep.y_a;
        return {config.mass * (dx * dx + dy * dy) / (2.0 * T)};
    }
    require_noncaustic(w_eff, T, "isotropic");
    const double s = std::sin(w_eff * T);
    const double c = std::cos(w_eff * T);
    const double cl = std::cos(f.omega_L * T);
    const double sl = std::sin(f.omega_L * T);
    const double sum_sq = ep.x_a * ep.x_a + ep.x_b * ep.x_b + ep.y_a * ep.y_a +
                          ep.y_b * ep.y_b;
    const double dot = ep.x_a * ep.x_b + ep.y_a * ep.y_b;
    const double cross = ep.y_a * ep.x_b - ep.x_a * ep.y_b;
    return {config.mass * w_eff / (2.0 * s) *
            (sum_sq * c - 2.0 * dot * cl - 2.0 * cross * sl)};
}

ActionValue classical_action_pure_B(const SystemConfig& config, const Endpoints& ep) {
    config.validate();
    ep.validate();
    if (config.omega_x != 0.0 || config.omega_y != 0.0)
        throw ConfigError("classical_action_pure_B requires omega_x = omega_y = 0");
    const DerivedFrequencies f = derive_frequencies(config);
    const double T = ep.duration_T;
    const double dx = ep.x_b - ep.x_a;
    const double dy = ep.y_b - ep.y_a;
    if (f.omega_L == 0.0) return {config.mass * (dx * dx + dy * dy) / (2.0 * T)};
    if (std::abs(std::sin(f.omega_L * T)) < kCausticTol)
        throw CausticSingularity("pure-B action at omega_L T ~ k pi");
    const double cross = ep.y_a * ep.x_b - ep.x_a * ep.y_b;
    return {config.mass * f.omega_L / (2.0 * std::tan(f.omega_L * T)) *
                (dx * dx + dy * dy) -
            config.mass * f.omega_L * cross};
}

// ---------------------------------------------------------------------------
// Anisotropic oscillator in a magnetic field.
//
// The Larmor rotation only decouples the axes when the potential is
// rotation invariant; for omega_x != omega_y the coupled equations of
// motion have the normal-mode frequencies
//   W^4 - (wx^2 + wy^2 + 4 wL^2) W^2 + wx^2 wy^2 = 0,
// which reduce to w_eff +- wL in the isotropic case but are not
// sqrt(wx^2 + wL^2), sqrt(wy^2 + wL^2). The action and prefactor below are
// built from the analytic mode solutions and are validated against the
// boundary-value and time-sliced oracles.

namespace {

struct AnisoModes {
    double w_plus, w_minus;        // normal-mode frequencies, w_plus >= w_minus > 0
    double a_plus, b_plus;         // mode vectors: P(t) = (a cos Wt, b sin Wt)
    double a_minus, b_minus;       //               Q(t) = (a sin Wt, -b cos Wt)
};

AnisoModes aniso_modes(double wx, double wy, double wl) {
    if (!(wx > 0.0) || !(wy > 0.0))
        throw ConfigError(
            "anisotropic B-field motion with a vanishing oscillator frequency has a "
            "zero-frequency drift mode; not supported");
    const double s = wx * wx + wy * wy + 4.0 * wl * wl;
    const double prod = wx * wx * wy * wy;
    const double disc = std::sqrt(std::max(0.0, s * s - 4.0 * prod));
    AnisoModes m;
    const double w2_plus = 0.5 * (s + disc);
    m.w_plus = std::sqrt(w2_plus);
    m.w_minus = std::sqrt(prod / w2_plus);
    // (wx^2 - W^2) a = 2 wL W b, nondegenerate components for wl != 0.
    m.a_plus = 2.0 * wl * m.w_plus;
    m.b_plus = wx * wx - w2_plus;
    m.a_minus = 2.0 * wl * m.w_minus;
    m.b_minus = wx * wx - prod / w2_plus;
    return m;
}

// Blocks of the fundamental matrix: (r(t), v(t)) = Phi(t) (r(0), v(0)).
struct FundamentalBlocks {
    Eigen::Matrix2d rr, rv, vr, vv;
};

FundamentalBlocks aniso_fundamental(const AnisoModes& m, double t) {
    // Mode coefficients (c1, c3) couple to (x(0), vy(0)) and (c2, c4) to
    // (y(0), vx(0)):
    //   x(0) = c1 a+ + c3 a-          vy(0) = c1 b+ W+ + c3 b- W-
    //   y(0) = -(c2 b+ + c4 b-)       vx(0) = c2 a+ W+ + c4 a- W-
    const double det1 = m.a_plus * m.b_minus * m.w_minus -
                        m.a_minus * m.b_plus * m.w_plus;
    const double det2 = -m.b_plus * m.a_minus * m.w_minus +
                        m.b_minus * m.a_plus * m.w_plus;
    if (det1 == 0.0 || det2 == 0.0)
        throw ConfigError("degenerate normal-mode basis");

    const double cp = std::cos(m.w_plus * t), sp = std::sin(m.w_plus * t);
    const double cm = std::cos(m.w_minus * t), sm = std::sin(m.w_minus * t);

    // State row vectors in mode coordinates (c1, c2, c3, c4):
    //   x(t) = c1 a+ cp + c2 a+ sp + c3 a- cm + c4 a- sm
    //   y(t) = c1 b+ sp - c2 b+ cp + c3 b- sm - c4 b- cm
    //   vx(t) = W+ a+ (-c1 sp + c2 cp) + W- a- (-c3 sm + c4 cm)
    //   vy(t) = W+ b+ (c1 cp + c2 sp) + W- b- (c3 cm + c4 sm)
    // and mode coordinates of the canonical initial conditions:
    //   (c1, c3) = [[b- W-, -a-], [-b+ W+, a+]] (x0, vy0) / det1
    //   (c2, c4) = [[a- W-, b-], [-a+ W+, -b+]] (y0, vx0) / det2
    const double c1_x = m.b_minus * m.w_minus / det1;
    const double c1_vy = -m.a_minus / det1;
    const double c3_x = -m.b_plus * m.w_plus / det1;
    const double c3_vy = m.a_plus / det1;
    const double c2_y = m.a_minus * m.w_minus / det2;
    const double c2_vx = m.b_minus / det2;
    const double c4_y = -m.a_plus * m.w_plus / det2;
    const double c4_vx = -m.b_plus / det2;

    auto state = [&](double c1, double c2, double c3, double c4) {
        Eigen::Vector4d out;
        out(0) = c1 * m.a_plus * cp + c2 * m.a_plus * sp + c3 * m.a_minus * cm +
                 c4 * m.a_minus * sm;
        out(1) = c1 * m.b_plus * sp - c2 * m.b_plus * cp + c3 * m.b_minus * sm -
                 c4 * m.b_minus * cm;
        out(2) = m.w_plus * m.a_plus * (-c1 * sp + c2 * cp) +
                 m.w_minus * m.a_minus * (-c3 * sm + c4 * cm);
        out(3) = m.w_plus * m.b_plus * (c1 * cp + c2 * sp) +
                 m.w_minus * m.b_minus * (c3 * cm + c4 * sm);
        return out;
    };

    const Eigen::Vector4d col_x = state(c1_x, 0.0, c3_x, 0.0);
    const Eigen::Vector4d col_y = state(0.0, c2_y, 0.0, c4_y);
    const Eigen::Vector4d col_vx = state(0.0, c2_vx, 0.0, c4_vx);
    const Eigen::Vector4d col_vy = state(c1_vy, 0.0, c3_vy, 0.0);

    FundamentalBlocks blocks;
    blocks.rr << col_x(0), col_y(0), col_x(1), col_y(1);
    blocks.rv << col_vx(0), col_vy(0), col_vx(1), col_vy(1);
    blocks.vr << col_x(2), col_y(2), col_x(3), col_y(3);
    blocks.vv << col_vx(2), col_vy(2), col_vx(3), col_vy(3);
    return blocks;
}

bool needs_normal_modes(const SystemConfig& config, const DerivedFrequencies& f) {
    return f.omega_L != 0.0 && !config.isotropic();
}

double aniso_caustic_scale(const AnisoModes& m, double T) {
    // det(Phi_rv) ~ T^2 at small T and oscillates on the 1/w scale; a
    // characteristic squared-length for the tolerance test.
    const double w = std::max(m.w_plus, 1.0 / T);
    return 1.0 / (w * w);
}

}  // namespace

ActionValue classical_action_aniso_B(const SystemConfig& config, const Endpoints& ep) {
    config.validate();
    ep.validate();
    if (config.has_e_field())
        throw ConfigError("classical_action_aniso_B requires E = 0");
    const DerivedFrequencies f = derive_frequencies(config);
    const double T = ep.duration_T;

    if (!needs_normal_modes(config, f)) {
        // Decoupled axes (B = 0) or rotation-invariant potential: the Larmor
        // rotation plus per-axis oscillator actions is exact here.
        require_noncaustic(f.omega_eff_x, T, "x");
        require_noncaustic(f.omega_eff_y, T, "y");
        const TransformedEndpoints te = transform_endpoints(config, ep, false);
        const ActionValue sx = classical_action_1d_ho(config.mass, f.omega_eff_x,
                                                      te.x_a_t, te.x_b_t, T);
        const ActionValue sy = classical_action_1d_ho(config.mass, f.omega_eff_y,
                                                      te.y_a_t, te.y_b_t, T);
        return {sx.value + sy.value};
    }

    const AnisoModes modes = aniso_modes(config.omega_x, config.omega_y, f.omega_L);
    const FundamentalBlocks blocks = aniso_fundamental(modes, T);
    const double det = blocks.rv.determinant();
    if (std::abs(det) < kCausticTol * aniso_caustic_scale(modes, T))
        throw CausticSingularity("anisotropic action at a normal-mode caustic");

    const Eigen::Vector2d r_a(ep.x_a, ep.y_a);
    const Eigen::Vector2d r_b(ep.x_b, ep.y_b);
    const Eigen::Vector2d v_a = blocks.rv.inverse() * (r_b - blocks.rr * r_a);
    const Eigen::Vector2d v_b = blocks.vr * r_a + blocks.vv * v_a;
    // On shell the potential and magnetic terms integrate away:
    // S_c = m/2 [r.v] evaluated at the boundary.
    return {0.5 * config.mass * (r_b.dot(v_b) - r_a.dot(v_a))};
}

IsoEBTerms iso_eb_terms(const SystemConfig& config, const Endpoints& ep) {
    config.validate();
    ep.validate();
    if (!config.isotropic())
        throw AnisotropyError("iso_eb_terms requires omega_x == omega_y");
    const double omega = config.omega_x;
    if (config.has_e_field() && omega <= 0.0)
        throw DegenerateShift("isotropic E+B action with omega = 0");
    const double q = config.charge;
    const double m = config.mass;
    const double Ex = config.e_field_x;
    const double Ey = config.e_field_y;
    const double E2 = Ex * Ex + Ey * Ey;
    const double w2 = omega * omega;
    const double shift_scale = (E2 > 0.0) ? q / (m * w2) : 0.0;      // q/(m w^2)
    const double shift_sq = shift_scale * shift_scale;               // q^2/(m^2 w^4)
    const double sum_aE = (ep.x_a + ep.x_b) * Ex + (ep.y_a + ep.y_b) * Ey;

    IsoEBTerms t;
    t.a1 = ep.x_a * ep.x_a + ep.x_b * ep.x_b + ep.y_a * ep.y_a + ep.y_b * ep.y_b +
           2.0 * shift_sq * E2 - 2.0 * shift_scale * sum_aE;
    // a2 and a3 are the shifted-endpoint dot and cross combinations; the
    // shift drops out of both when E = 0.
    t.a2 = 2.0 * (ep.x_a * ep.x_b + ep.y_a * ep.y_b) + 2.0 * shift_sq * E2 -
           2.0 * shift_scale * sum_aE;
    t.a3 = 2.0 * (ep.y_a * ep.x_b - ep.x_a * ep.y_b) +
           2.0 * shift_scale * ((ep.y_b - ep.y_a) * Ex - (ep.x_b - ep.x_a) * Ey);
    t.a4 = constant_action_term(config, ep).value;
    return t;
}

ActionValue classical_action_iso_EB(const SystemConfig& config, const Endpoints& ep) {
    const IsoEBTerms t = iso_eb_terms(config, ep);
    const DerivedFrequencies f = derive_frequencies(config);
    const double w_eff = f.omega_eff_x;
    const double T = ep.duration_T;
    if (w_eff == 0.0) {
        // Free limit: every field vanished upstream.
        const double dx = ep.x_b - ep.x_a;
        const double dy = ep.y_b - ep.y_a;
        return {config.mass * (dx * dx + dy * dy) / (2.0 * T)};
    }
    require_noncaustic(w_eff, T, "isotropic");
    const double s = std::sin(w_eff * T);
    return {config.mass * w_eff / (2.0 * s) *
                (t.a1 * std::cos(w_eff * T) - t.a2 * std::cos(f.omega_L * T) -
                 t.a3 * std::sin(f.omega_L * T)) +
            t.a4};
}

ActionValue classical_action_general(const SystemConfig& config, const Endpoints& ep) {
    config.validate();
    ep.validate();
    if (config.e_field_x != 0.0 && config.omega_x <= 0.0)
        throw DegenerateShift("general action: E_x with omega_x = 0");
    if (config.e_field_y != 0.0 && config.omega_y <= 0.0)
        throw DegenerateShift("general action: E_y with omega_y = 0");
    const ShiftedEndpoints shifted = apply_shift(config, ep, config.has_e_field());
    SystemConfig no_field = config;
    no_field.e_field_x = 0.0;
    no_field.e_field_y = 0.0;
    Endpoints shifted_ep = ep;
    shifted_ep.x_a = shifted.x_a;
    shifted_ep.y_a = shifted.y_a;
    shifted_ep.x_b = shifted.x_b;
    shifted_ep.y_b = shifted.y_b;
    return {constant_action_term(config, ep).value +
            classical_action_aniso_B(no_field, shifted_ep).value};
}

namespace {

// Per-axis prefactor radicand w/sin(wT), free limit 1/T.
double axis_prefactor(double omega, double T) {
    if (omega == 0.0) return 1.0 / T;
    return omega / std::sin(omega * T);
}

}  // namespace

namespace {

// Zeros of det(Phi_rv(t)) on (0, T) by sign-change scanning; the caustic
// structure of the coupled system lives on this determinant.
int count_det_zeros(const AnisoModes& modes, double T) {
    const int per_halfperiod = 48;
    const int samples = std::max(
        256, static_cast<int>(per_halfperiod * (2.0 * modes.w_plus * T / kPi + 1.0)));
    int crossings = 0;
    double prev = aniso_fundamental(modes, T / samples * 1e-3).rv.determinant();
    for (int k = 1; k < samples; ++k) {
        const double t = T * static_cast<double>(k) / static_cast<double>(samples);
        const double det = aniso_fundamental(modes, t).rv.determinant();
        if (det == 0.0 || (det > 0.0) != (prev > 0.0)) ++crossings;
        prev = det;
    }
    return crossings;
}

}  // namespace

FluctuationFactor fluctuation_factor_full(const SystemConfig& config, double T,
                                          PhaseConvention convention) {
    config.validate();
    if (!(T > 0.0)) throw ConfigError("duration must be positive");
    const DerivedFrequencies f = derive_frequencies(config);
    const double hbar = config.constants.hbar;
    FluctuationFactor out;

    if (needs_normal_modes(config, f)) {
        // Coupled axes: prefactor m / (2 pi i hbar sqrt(det Phi_rv)).
        const AnisoModes modes =
            aniso_modes(config.omega_x, config.omega_y, f.omega_L);
        const FundamentalBlocks blocks = aniso_fundamental(modes, T);
        const double det = blocks.rv.determinant();
        if (std::abs(det) < kCausticTol * aniso_caustic_scale(modes, T))
            throw CausticSingularity("fluctuation factor at a normal-mode caustic");
        out.caustics_x = count_det_zeros(modes, T);  // combined count
        out.caustics_y = 0;
        const double magnitude =
            config.mass / (2.0 * kPi * hbar * std::sqrt(std::abs(det)));
        double phase = -0.5 * kPi;
        if (convention == PhaseConvention::maslov_tracked) {
            phase += -0.5 * kPi * static_cast<double>(out.caustics_x);
        } else if (det < 0.0) {
            phase += 0.5 * kPi;
        }
        out.value = std::polar(magnitude, phase);
        return out;
    }

    require_noncaustic(f.omega_eff_x, T, "x");
    require_noncaustic(f.omega_eff_y, T, "y");
    out.caustics_x = count_caustics(f.omega_eff_x, T);
    out.caustics_y = count_caustics(f.omega_eff_y, T);

    const double rx = axis_prefactor(f.omega_eff_x, T);
    const double ry = axis_prefactor(f.omega_eff_y, T);
    const double magnitude =
        config.mass / (2.0 * kPi * hbar) * std::sqrt(std::abs(rx * ry));

    // m / (2 pi i hbar) sqrt(rx ry): phase -pi/2 from 1/i, and each negative
    // radicand contributes according to the convention.
    double phase = -0.5 * kPi;
    if (convention == PhaseConvention::maslov_tracked) {
        phase += -0.5 * kPi * static_cast<double>(out.caustics_x + out.caustics_y);
    } else {
        // Principal branch of the combined square root.
        if (rx * ry < 0.0) phase += 0.5 * kPi;
    }
    out.value = std::polar(magnitude, phase);
    return out;
}

Complex fluctuation_factor(const SystemConfig& config, double T) {
    return fluctuation_factor_full(config, T).value;
}

namespace {

PropagatorValue assemble_propagator(const SystemConfig& config, const Endpoints& ep,
                                    double action_scale, PhaseConvention convention) {
    config.validate();
    ep.validate();
    const DerivedFrequencies f = derive_frequencies(config);
    const double hbar = config.constants.hbar;
    const double T = ep.duration_T;

    if (config.has_e_field()) {
        if (config.e_field_x != 0.0 && config.omega_x <= 0.0)
            throw DegenerateShift("propagator: E_x with omega_x = 0");
        if (config.e_field_y != 0.0 && config.omega_y <= 0.0)
            throw DegenerateShift("propagator: E_y with omega_y = 0");
    }

    PropagatorValue out;
    out.phase_convention = convention;

    if (f.omega_eff_x == 0.0 && f.omega_eff_y == 0.0 && !config.has_e_field()) {
        const double dx = ep.x_b - ep.x_a;
        const double dy = ep.y_b - ep.y_a;
        const Complex i_unit(0.0, 1.0);
        const Complex pref = config.mass / (2.0 * kPi * hbar * T * i_unit);
        const double s_free = config.mass * (dx * dx + dy * dy) / (2.0 * T);
        out.amplitude = pref * std::exp(i_unit * (action_scale * s_free / hbar));
        return out;
    }

    const double action = classical_action_general(config, ep).value;
    const FluctuationFactor fluct = fluctuation_factor_full(config, T, convention);

    const double total_action = action_scale * action;
    out.amplitude = fluct.value * std::polar(1.0, total_action / hbar);
    out.caustics_crossed = fluct.caustics_x + fluct.caustics_y;
    return out;
}

}  // namespace

PropagatorValue propagator(const SystemConfig& config, const Endpoints& ep,
                           PhaseConvention convention) {
    return assemble_propagator(config, ep, 1.0, convention);
}

PropagatorValue propagator_scaled_action(const SystemConfig& config,
                                         const Endpoints& ep, double action_scale) {
    return assemble_propagator(config, ep, action_scale,
                               PhaseConvention::principal_branch);
}

EnergyLevel energy_level(const SystemConfig& config, const SpectrumIndex& idx) {
    config.validate();
    if (idx.n < 0 || idx.m < 0) throw ConfigError("quantum numbers must be >= 0");
    if (!config.isotropic())
        throw AnisotropyError("energy_level requires omega_x == omega_y");
    const double omega = config.omega_x;
    const double E2 = config.e_field_x * config.e_field_x +
                      config.e_field_y * config.e_field_y;
    if (E2 > 0.0 && omega <= 0.0)
        throw DegenerateShift("energy_level: E != 0 with omega = 0");
    const DerivedFrequencies f = derive_frequencies(config);
    const double w_eff = f.omega_eff_x;
    const double hbar = config.constants.hbar;
    double value = hbar * (w_eff + f.omega_L) * (idx.n + 0.5) +
                   hbar * (w_eff - f.omega_L) * (idx.m + 0.5);
    if (E2 > 0.0) {
        value -= config.charge * config.charge * E2 /
                 (2.0 * config.mass * omega * omega);
    }
    return {value, idx};
}

Complex trace_closed_form(const SystemConfig& config, Complex tau) {
    config.validate();
    if (!config.isotropic())
        throw AnisotropyError("trace_closed_form requires omega_x == omega_y");
    if (tau.imag() > 1e-12)
        throw ConfigError("trace continuation requires Im(tau) <= 0");
    const double omega = config.omega_x;
    const double E2 = config.e_field_x * config.e_field_x +
                      config.e_field_y * config.e_field_y;
    if (E2 > 0.0 && omega <= 0.0)
        throw DegenerateShift("trace: E != 0 with omega = 0");
    const DerivedFrequencies f = derive_frequencies(config);
    const double hbar = config.constants.hbar;
    const Complex denom = std::cos(f.omega_eff_x * tau) - std::cos(f.omega_L * tau);
    if (std::abs(denom) < 1e-12)
        throw PoleError("trace pole: cos(w_eff tau) = cos(wL tau)");
    Complex phase(0.0, 0.0);
    if (E2 > 0.0) {
        phase = Complex(0.0, 1.0) * config.charge * config.charge * E2 * tau /
                (2.0 * config.mass * hbar * omega * omega);
    }
    return 0.5 * std::exp(phase) / denom;
}

}  // namespace proplab
