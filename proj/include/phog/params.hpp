#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace phog {

using cplx = std::complex<double>;

enum class GammaCDefault { TotalDecay4G, TailOnly4G };

struct DeviceParams {
    double g_a = 1.0;
    double g_b = 0.0;
    std::vector<double> tail_couplings;
    double kerr_U = 0.0;
    double gamma1 = 0.0;
    double gamma_c = -1.0;  // negative: unset, resolved by resolved_gamma_c
    GammaCDefault gamma_c_default = GammaCDefault::TotalDecay4G;

    std::size_t tail_length() const { return tail_couplings.size(); }

    void validate() const {
        if (!(g_a > 0.0)) throw std::invalid_argument("g_a must be positive");
        if (g_b < 0.0 || kerr_U < 0.0 || gamma1 < 0.0)
            throw std::invalid_argument("rates must be nonnegative");
        for (double g : tail_couplings)
            if (g < 0.0) throw std::invalid_argument("tail couplings must be nonnegative");
    }

    double G() const { return std::hypot(g_a, g_b); }

    double resolved_gamma_c() const {
        if (gamma_c >= 0.0) return gamma_c;
        double g4 = 4.0 * G();
        if (gamma_c_default == GammaCDefault::TailOnly4G) return g4;
        if (g4 < gamma1) throw std::invalid_argument("4G below gamma1, cannot default gamma_c");
        return g4 - gamma1;
    }
};

struct DerivedRates {
    double G = 0, Gamma = 0, gamma2 = 0, gamma3 = 0;
    double sigma1 = 0, sigma2 = 0, sigma3 = 0, sigma4 = 0, sigma5 = 0;
};

// Rates for given couplings, Kerr constant and symmetric-mode decay Γ (γ₁ enters through Γ+γ₁).
inline DerivedRates rates_from_gamma(double g_a, double g_b, double U, double Gamma, double gamma1) {
    DerivedRates r;
    r.G = std::hypot(g_a, g_b);
    if (r.G == 0.0) throw std::invalid_argument("degenerate device: G = 0");
    r.Gamma = Gamma;
    double G4 = std::pow(r.G, 4), G8 = G4 * G4;
    double p = g_a * g_b, d = g_a * g_a - g_b * g_b;
    double denom = G8 * (Gamma + gamma1);
    r.gamma2 = 4.0 * U * U * std::pow(p, 4) / denom;
    r.gamma3 = 4.0 * U * U * p * p * d * d / denom;
    r.sigma1 = U * (std::pow(g_a, 4) + std::pow(g_b, 4)) / (2.0 * G4);
    r.sigma2 = 4.0 * U * p * p / G4;
    r.sigma3 = r.sigma2 / 4.0 - U / 2.0;
    r.sigma4 = r.sigma2 / 4.0;
    r.sigma5 = U * p * d / G4;
    return r;
}

inline DerivedRates derived_rates(const DeviceParams& dev) {
    dev.validate();
    double G = dev.G();
    double gamma = dev.gamma1 + dev.resolved_gamma_c();
    if (!(gamma > 0.0)) throw std::invalid_argument("total c0 decay must be positive");
    return rates_from_gamma(dev.g_a, dev.g_b, dev.kerr_U, 4.0 * G * G / gamma, dev.gamma1);
}

inline double optimal_coupling_ratio() { return std::sqrt(2.0) - 1.0; }

struct Collective {
    cplx s_plus, s_minus;
};

inline Collective collective_amplitudes(cplx alpha_a, cplx alpha_b, double g_a, double g_b) {
    double G = std::hypot(g_a, g_b);
    if (G == 0.0) throw std::invalid_argument("degenerate device: G = 0");
    return {(g_a * alpha_a + g_b * alpha_b) / G, (g_a * alpha_b - g_b * alpha_a) / G};
}

inline std::pair<cplx, cplx> modal_amplitudes(cplx s_plus, cplx s_minus, double g_a, double g_b) {
    double G = std::hypot(g_a, g_b);
    if (G == 0.0) throw std::invalid_argument("degenerate device: G = 0");
    return {(g_a * s_plus - g_b * s_minus) / G, (g_b * s_plus + g_a * s_minus) / G};
}

}  // namespace phog
