#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "analytics.hpp"
#include "params.hpp"

namespace phog {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double c = 299792458.0;
}  // namespace constants

struct PlatformSpec {
    std::string name;
    double lambda_m = 0;
    double n_eff = 0;
    double T_eff_s = 100e-15;
    std::optional<double> n2_m2_per_W;
    std::optional<double> A_eff_m2;
    std::optional<double> gamma_nl_per_W_m;
    double loss_db_per_m = 0;

    double omega() const { return 2.0 * std::numbers::pi * constants::c / lambda_m; }
    double photon_energy() const { return constants::hbar * omega(); }

    void validate() const {
        bool area_route = n2_m2_per_W && A_eff_m2;
        if (area_route == bool(gamma_nl_per_W_m))
            throw std::invalid_argument("platform needs exactly one of (n2, A_eff) or gamma_nl");
        if (bool(n2_m2_per_W) != bool(A_eff_m2)) throw std::invalid_argument("n2 and A_eff must be given together");
        if (!(lambda_m > 0 && n_eff > 0 && T_eff_s > 0)) throw std::invalid_argument("platform values must be positive");
        if (loss_db_per_m < 0) throw std::invalid_argument("loss must be nonnegative");
    }
};

inline double kerr_constant(const PlatformSpec& p) {
    p.validate();
    double w = p.omega(), hw = p.photon_energy();
    if (p.gamma_nl_per_W_m) return 2.0 * hw * *p.gamma_nl_per_W_m / (p.T_eff_s * p.n_eff);
    double V = *p.A_eff_m2 * constants::c * p.T_eff_s;
    return 2.0 * hw * (w / V) * (*p.n2_m2_per_W / p.n_eff);
}

inline double gamma_nl_from_n2(double n2, double A_eff, double lambda) {
    return 2.0 * std::numbers::pi / lambda * n2 / A_eff;
}

inline double loss_rate(double loss_db_per_m) {
    if (loss_db_per_m < 0) throw std::invalid_argument("loss must be nonnegative");
    return std::log(10.0) / 10.0 * loss_db_per_m;
}

struct FeasibilityReport {
    double U, gamma1, Gamma, gamma2, gamma3;
    double n0_Y1, energy_J, X, Q;
    double g_a, g_b, gamma_c;
};

inline FeasibilityReport feasibility_report(const PlatformSpec& p, double g_a, double length,
                                            std::optional<double> gamma_c = std::nullopt,
                                            double ratio = optimal_coupling_ratio()) {
    DeviceParams d;
    d.g_a = g_a;
    d.g_b = ratio * g_a;
    d.kerr_U = kerr_constant(p);
    d.gamma1 = loss_rate(p.loss_db_per_m);
    if (gamma_c) d.gamma_c = *gamma_c;
    DerivedRates r = derived_rates(d);
    FeasibilityReport f{};
    f.U = d.kerr_U;
    f.gamma1 = d.gamma1;
    f.Gamma = r.Gamma;
    f.gamma2 = r.gamma2;
    f.gamma3 = r.gamma3;
    f.g_a = d.g_a;
    f.g_b = d.g_b;
    f.gamma_c = d.resolved_gamma_c();
    f.n0_Y1 = std::sqrt(d.gamma1 / r.gamma3);
    f.energy_J = f.n0_Y1 * p.photon_energy();
    f.X = universal_params(d.gamma1, r.gamma3, f.n0_Y1, length).X;
    f.Q = q_of_x(f.X);
    return f;
}

}  // namespace phog
