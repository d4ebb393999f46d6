#pragma once

#include "proplab/types.hpp"

// Closed-form classical actions, fluctuation prefactors, full propagators,
// the partition-function trace and the energy spectrum of the charged
// anisotropic oscillator in crossed uniform electric and magnetic fields.
//
// Every action here is the classical action of the Lagrangian
//   L = m/2 (xdot^2 + ydot^2) - m/2 (wx^2 x^2 + wy^2 y^2)
//       + m wL (x ydot - y xdot) + q E . r
// between fixed endpoints, and every propagator is
// exp(i S_c / hbar) * F(T) with F the endpoint-independent prefactor.

namespace proplab {

// Endpoints after the electric-field shift (a and b) and the Larmor rotation
// by angle wL*T (b only).
struct TransformedEndpoints {
    double x_a_t = 0.0;
    double y_a_t = 0.0;
    double x_b_t = 0.0;
    double y_b_t = 0.0;
};

struct EnergyLevel {
    double value = 0.0;
    SpectrumIndex index{};
};

// (m w / 2 sin wT) [(xa^2 + xb^2) cos wT - 2 xa xb]; free-particle limit
// m (xb-xa)^2 / (2T) taken analytically at w = 0.
ActionValue classical_action_1d_ho(double mass, double omega, double x_a,
                                   double x_b, double T);

// Isotropic oscillator in a magnetic field (w_eff = sqrt(w^2 + wL^2)).
ActionValue classical_action_iso_B(const SystemConfig& config, const Endpoints& ep);

// Pure magnetic field: (m wL / 2 tan wL T) |dr|^2 - m wL (ya xb - xa yb).
ActionValue classical_action_pure_B(const SystemConfig& config, const Endpoints& ep);

// Anisotropic oscillator in a magnetic field, E = 0.
ActionValue classical_action_aniso_B(const SystemConfig& config, const Endpoints& ep);

// Isotropic oscillator in crossed E and B fields.
ActionValue classical_action_iso_EB(const SystemConfig& config, const Endpoints& ep);

// Any field configuration: the electric shift plus the field-free action
// between shifted endpoints plus the endpoint constant. Reduces to each of
// the specialized forms on their domains.
ActionValue classical_action_general(const SystemConfig& config, const Endpoints& ep);

// The endpoint-combination terms of the isotropic E+B action: the action is
// (m w_eff / 2 sin w_eff T) (a1 cos w_eff T - a2 cos wL T - a3 sin wL T) + a4.
struct IsoEBTerms {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
    double a4 = 0.0;
};
IsoEBTerms iso_eb_terms(const SystemConfig& config, const Endpoints& ep);

// Shift x -> x - q Ex / (m wx^2) (both endpoints, when include_shift) followed
// by the rotation of the b endpoint by angle wL*T.
TransformedEndpoints transform_endpoints(const SystemConfig& config,
                                         const Endpoints& ep, bool include_shift);

// Endpoint-dependent constant produced by the electric-field shift:
// q^2 T/(2m) (Ex^2/wx^2 + Ey^2/wy^2) + q wL Ex/wx^2 (yb - ya)
//                                    - q wL Ey/wy^2 (xb - xa).
ActionValue constant_action_term(const SystemConfig& config, const Endpoints& ep);

struct FluctuationFactor {
    Complex value{0.0, 0.0};
    int caustics_x = 0;  // zeros of sin(w_eff^x t) on (0, T)
    int caustics_y = 0;
};

// Anisotropic prefactor (m / 2 pi i hbar) sqrt(wx_eff wy_eff /
// (sin wx_eff T sin wy_eff T)); per-axis free limits handled analytically.
FluctuationFactor fluctuation_factor_full(
    const SystemConfig& config, double T,
    PhaseConvention convention = PhaseConvention::principal_branch);

Complex fluctuation_factor(const SystemConfig& config, double T);

// Full propagator K(b, T; a, 0).
PropagatorValue propagator(const SystemConfig& config, const Endpoints& ep,
                           PhaseConvention convention = PhaseConvention::principal_branch);

// Internal hook for negative controls: scales the classical action phase.
PropagatorValue propagator_scaled_action(const SystemConfig& config,
                                         const Endpoints& ep, double action_scale);

// E(n, m) = -q^2 E^2/(2 m w^2) + hbar (w_eff + wL)(n + 1/2)
//                              + hbar (w_eff - wL)(m + 1/2).
// The sign of the electric shift follows the diagonalization of the
// Hamiltonian (completing the square lowers the potential minimum).
EnergyLevel energy_level(const SystemConfig& config, const SpectrumIndex& idx);

// Trace of exp(-i H tau / hbar) for the isotropic configuration, continued
// to complex tau (Im tau <= 0):
//   (1/2) exp[i q^2 E^2 tau / (2 m hbar w^2)] / (cos w_eff tau - cos wL tau).
Complex trace_closed_form(const SystemConfig& config, Complex tau);

}  // namespace proplab
