#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "diagonal.hpp"
#include "ode.hpp"

namespace phog {

inline double q_of_x(double X) {
    if (X < 0) throw std::invalid_argument("X must be nonnegative");
    return 0.8 * (std::pow(1.0 + 2.0 * X, -2.5) - 1.0);
}

inline double n_of_x(double n0, double X) { return n0 / std::sqrt(1.0 + 2.0 * X); }

struct UniversalParams {
    double X = 0, Y = 0;
};

inline UniversalParams universal_params(double gamma1, double gamma3, double n0, double t_fix) {
    if (!(gamma3 > 0)) throw std::domain_error("Y undefined for gamma3 = 0");
    return {gamma3 * n0 * n0 * t_fix, gamma1 / (gamma3 * n0 * n0)};
}

inline std::vector<double> q_ode(const LossRates& r, const std::function<double(double)>& n_path, double Q0,
                                 const std::vector<double>& t_grid, double rtol = 1e-10) {
    using V = Eigen::Matrix<double, 1, 1>;
    auto f = [&](double t, const V& y, V& dy) {
        double n = n_path(t), Q = y[0];
        dy[0] = -r.gamma1 * Q - 2.0 * r.gamma2 * n * (3.0 * Q + 1.0) - r.gamma3 * n * n * (5.0 * Q + 4.0);
    };
    OdeOptions opt;
    opt.rtol = rtol;
    opt.atol = 1e-14;
    std::vector<double> out(t_grid.size());
    integrate_on_grid<V>(f, V::Constant(Q0), t_grid, opt, [&](std::size_t i, double, const V& y) { out[i] = y[0]; });
    return out;
}

struct MomentSet {
    double mu = 0, zeta2 = 1, zeta3 = 1;
    bool low_mu = false;

    double q() const { return zeta2 - 1.0; }
    double skewness() const { return zeta3 / (std::sqrt(mu) * std::pow(zeta2, 1.5)); }
};

inline double zeta2_limit(const LossRates& r, double mu) {
    return (r.gamma1 + 4 * r.gamma2 * mu + r.gamma3 * mu * mu) /
           (r.gamma1 + 6 * r.gamma2 * mu + 5 * r.gamma3 * mu * mu);
}

inline double zeta3_limit(const LossRates& r, double mu, double z2) {
    double num = r.gamma1 * (3 * z2 - 1) + 4 * r.gamma2 * mu * (-2 + 6 * z2 - 3 * z2 * z2) +
                 r.gamma3 * mu * mu * (-1 + 9 * z2 - 18 * z2 * z2);
    return num / (2 * r.gamma1 + 10 * r.gamma2 * mu + 8 * r.gamma3 * mu * mu);
}

// Leading-order (mu >> 1) right-hand sides for (mu, zeta2, zeta3).
inline Eigen::Vector3d zeta_rhs(const LossRates& r, double mu, double z2, double z3) {
    double n2 = mu * mu + z2 * mu;
    double n3 = mu * mu * mu + 3 * mu * z2 * mu + z3 * mu;
    double dmu = -r.gamma1 * mu - 2 * r.gamma2 * (n2 - mu) - r.gamma3 * (n3 - 2 * n2 + mu);
    double dz2 = r.gamma1 * (1 - z2) + 2 * r.gamma2 * (2 - 3 * z2) * mu + r.gamma3 * (1 - 5 * z2) * mu * mu;
    double dz3 = r.gamma1 * (-1 + 3 * z2 - 2 * z3) + 2 * r.gamma2 * (-4 + 12 * z2 - 6 * z2 * z2 - 5 * z3) * mu +
                 r.gamma3 * (-1 + 9 * z2 - 18 * z2 * z2 - 8 * z3) * mu * mu;
    return {dmu, dz2, dz3};
}

inline std::vector<MomentSet> zeta_moment_odes(double n0, const LossRates& r, const std::vector<double>& t_grid,
                                               double mu_threshold = 20.0) {
    auto f = [&](double, const Eigen::Vector3d& y, Eigen::Vector3d& dy) { dy = zeta_rhs(r, y[0], y[1], y[2]); };
    OdeOptions opt;
    opt.rtol = 1e-10;
    opt.atol = 1e-14;
    std::vector<MomentSet> out(t_grid.size());
    integrate_on_grid<Eigen::Vector3d>(f, Eigen::Vector3d(n0, 1.0, 1.0), t_grid, opt,
                                       [&](std::size_t i, double, const Eigen::Vector3d& y) {
                                           out[i] = {y[0], y[1], y[2], y[0] < mu_threshold};
                                       });
    return out;
}

// zeta4 = (<dn^4> - 3 zeta2^2 mu^2)/mu^{3/2}, so excess kurtosis = zeta4/(sqrt(mu) zeta2^2).
struct ZetaMoments {
    double mu, zeta2, zeta3, zeta4;
};

inline ZetaMoments zeta_of(const PhotonNumberDist& d) {
    double mu = d.mean();
    double m2 = d.central_moment(2), m3 = d.central_moment(3), m4 = d.central_moment(4);
    double z2 = m2 / mu;
    return {mu, z2, m3 / mu, (m4 - 3.0 * z2 * z2 * mu * mu) / std::pow(mu, 1.5)};
}

}  // namespace phog
