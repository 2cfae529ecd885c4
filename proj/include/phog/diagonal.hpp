#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fock.hpp"
#include "ode.hpp"

namespace phog {

struct LossRates {
    double gamma1 = 0, gamma2 = 0, gamma3 = 0;
};

inline PhotonNumberDist poisson_dist(double mean, int n_max) {
    PhotonNumberDist d;
    d.p.resize(std::size_t(n_max) + 1);
    for (int n = 0; n <= n_max; ++n)
        d.p[n] = mean == 0.0 ? (n == 0 ? 1.0 : 0.0)
                             : std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
    return d;
}

inline PhotonNumberDist fock_dist(int k, int n_max) {
    PhotonNumberDist d;
    d.p.assign(std::size_t(n_max) + 1, 0.0);
    d.p.at(k) = 1.0;
    return d;
}

struct DiagonalRhs {
    RVec out_rate, down1, down2;  // down1[n]: rate n -> n-1, down2[n]: rate n -> n-2

    DiagonalRhs(const LossRates& r, int n_max) : out_rate(n_max + 1), down1(n_max + 1), down2(n_max + 1) {
        for (int n = 0; n <= n_max; ++n) {
            double x = n;
            down1[n] = r.gamma1 * x + r.gamma3 * x * (x - 1) * (x - 1);
            down2[n] = r.gamma2 * x * (x - 1);
            out_rate[n] = down1[n] + down2[n];
        }
    }

    void operator()(double, const RVec& p, RVec& dp) const {
        long N = p.size();
        dp = -out_rate.cwiseProduct(p);
        dp.head(N - 1) += down1.tail(N - 1).cwiseProduct(p.tail(N - 1));
        dp.head(N - 2) += down2.tail(N - 2).cwiseProduct(p.tail(N - 2));
    }

    double spectral_radius() const { return out_rate.maxCoeff(); }
};

struct DiagonalOptions {
    double rtol = 1e-9;
    double atol = 1e-14;
    double edge_tol = 1e-10;
    double trim_tol = 1e-16;  // tail mass allowed to be dropped
    double chunk_steps = 400;
};

// Birth-death evolution of p(n). The generator is triangular in n, so its
// eigenvalues are the outflow rates and those bound the explicit step. Mass
// only moves down, so the vector is trimmed as the top empties; that keeps the
// step bound tied to the occupied range rather than the initial n_max.
inline std::vector<PhotonNumberDist> evolve_pn(const PhotonNumberDist& p0, const LossRates& r,
                                               const std::vector<double>& t_grid, const DiagonalOptions& o = {}) {
    if (r.gamma1 < 0 || r.gamma2 < 0 || r.gamma3 < 0) throw std::invalid_argument("rates must be nonnegative");
    int n_max = int(p0.p.size()) - 1;
    if (n_max < 2) throw std::invalid_argument("distribution too short");
    if (p0.p[n_max - 1] > o.edge_tol || p0.p[n_max] > o.edge_tol)
        throw SolverError("truncation overflow: probability mass at the top of the photon-number range");
    if (t_grid.empty()) return {};
    RVec y = Eigen::Map<const RVec>(p0.p.data(), long(p0.p.size()));
    auto trim = [&](RVec& v) {
        long keep = v.size();
        double tail = 0;
        while (keep > 3 && tail + std::abs(v[keep - 1]) < o.trim_tol) tail += std::abs(v[--keep]);
        if (keep < v.size()) v.conservativeResize(keep);
    };
    std::vector<PhotonNumberDist> out(t_grid.size());
    auto store = [&](std::size_t i, const RVec& v) {
        out[i].p.assign(std::size_t(n_max) + 1, 0.0);
        std::copy(v.data(), v.data() + v.size(), out[i].p.begin());
    };
    store(0, y);
    double t = t_grid.front();
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (t_grid[i] < t) throw std::invalid_argument("time grid must be increasing");
        while (t < t_grid[i]) {
            trim(y);
            DiagonalRhs rhs(r, int(y.size()) - 1);
            double rho = rhs.spectral_radius();
            OdeOptions opt;
            opt.rtol = o.rtol;
            opt.atol = o.atol;
            double t_end = t_grid[i];
            if (rho > 0) {
                opt.h_max = 3.0 / rho;
                t_end = std::min(t_end, t + o.chunk_steps * opt.h_max);
            }
            auto solver = make_dopri5<RVec>(rhs, t, y, opt);
            while (solver.t() < t_end) solver.advance(t_end);
            y = solver.y();
            t = t_end;
        }
        store(i, y);
    }
    return out;
}

struct DiagonalSample {
    double t, mean, q, skewness, excess_kurtosis, total;
};

inline DiagonalSample sample_of(double t, const PhotonNumberDist& d) {
    return {t, d.mean(), d.mandel_q(), d.skewness(), d.excess_kurtosis(), d.total()};
}

inline std::vector<DiagonalSample> q_trajectory(double n0, const LossRates& r, const std::vector<double>& t_grid,
                                                const DiagonalOptions& o = {}) {
    int n_max = adequate_dim(n0);
    auto ds = evolve_pn(poisson_dist(n0, n_max), r, t_grid, o);
    std::vector<DiagonalSample> out;
    for (std::size_t i = 0; i < ds.size(); ++i) out.push_back(sample_of(t_grid[i], ds[i]));
    return out;
}

}  // namespace phog
