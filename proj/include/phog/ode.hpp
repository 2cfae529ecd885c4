#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace phog {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OdeOptions {
    double rtol = 1e-8;
    double atol = 1e-12;
    double h_init = 0.0;
    double h_max = std::numeric_limits<double>::infinity();
    long max_steps = 50'000'000;
};

// Dormand–Prince 5(4) with the 4th-order continuous extension.
// State is any Eigen dense type; F is callable as f(t, y, dy).
template <class State, class F>
class Dopri5 {
public:
    Dopri5(F f, double t0, State y0, OdeOptions opt = {})
        : f_(std::move(f)), opt_(opt), t_(t0), t_old_(t0), y_(std::move(y0)) {
        k1_ = y_;
        f_(t_, y_, k1_);
        h_ = opt_.h_init;
    }

    double t() const { return t_; }
    double t_old() const { return t_old_; }
    const State& y() const { return y_; }
    long steps() const { return n_accepted_; }
    long rejected() const { return n_rejected_; }

    // Restart from a new state (after a discontinuity such as a quantum jump).
    void reset(double t, const State& y) {
        t_ = t_old_ = t;
        y_ = y;
        y_old_ = y;
        f_(t_, y_, k1_);
        h_last_ = 0.0;
    }

    void set_h_max(double h) { opt_.h_max = h; }

    // One accepted step, never beyond t_limit.
    void advance(double t_limit) {
        if (h_ <= 0.0) h_ = initial_step(t_limit - t_);
        for (;;) {
            if (n_accepted_ + n_rejected_ > opt_.max_steps) throw SolverError("ODE step budget exhausted");
            double h = std::min({h_, opt_.h_max, t_limit - t_});
            if (!(h > 0.0)) throw SolverError("ODE step size collapsed");
            double err = attempt(h);
            if (!std::isfinite(err)) {
                h_ = 0.2 * h;
                ++n_rejected_;
                if (h_ < 1e-14 * std::max(1.0, std::abs(t_))) throw SolverError("non-finite ODE state");
                continue;
            }
            double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            if (err <= 1.0) {
                t_old_ = t_;
                y_old_.swap(y_);
                y_.swap(y_new_);
                t_ = h == t_limit - t_old_ ? t_limit : t_old_ + h;
                h_last_ = h;
                k1_.swap(k7_);  // FSAL
                build_dense();
                h_ = h * fac;
                ++n_accepted_;
                return;
            }
            ++n_rejected_;
            h_ = h * std::min(1.0, fac);
            if (h_ < 1e-14 * std::max(1.0, std::abs(t_))) throw SolverError("ODE step size underflow");
        }
    }

    // Dense output on [t_old, t].
    State interpolate(double tq) const {
        if (h_last_ == 0.0) return y_;
        double th = (tq - t_old_) / h_last_, th1 = 1.0 - th;
        return r1_ + th * (r2_ + th1 * (r3_ + th * (r4_ + th1 * r5_)));
    }

private:
    double attempt(double h) {
        constexpr double a21 = 1.0 / 5;
        constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                         a54 = -212.0 / 729;
        constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                         a65 = -5103.0 / 18656;
        constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                         a76 = 11.0 / 84;
        constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                         e6 = 22.0 / 525, e7 = -1.0 / 40;
        tmp_ = y_ + h * a21 * k1_;
        f_(t_ + h / 5, tmp_, k2_);
        tmp_ = y_ + h * (a31 * k1_ + a32 * k2_);
        f_(t_ + 0.3 * h, tmp_, k3_);
        tmp_ = y_ + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
        f_(t_ + 0.8 * h, tmp_, k4_);
        tmp_ = y_ + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
        f_(t_ + 8.0 / 9 * h, tmp_, k5_);
        tmp_ = y_ + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
        f_(t_ + h, tmp_, k6_);
        y_new_ = y_ + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
        f_(t_ + h, y_new_, k7_);
        tmp_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
        auto scale = (opt_.atol + opt_.rtol * y_.cwiseAbs().cwiseMax(y_new_.cwiseAbs()).array());
        double s = (tmp_.cwiseAbs().array() / scale).square().sum();
        return std::sqrt(s / static_cast<double>(y_.size()));
    }

    void build_dense() {
        constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                         d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                         d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
        double h = h_last_;
        // k1_ now holds f at the new point (k7), k-stage values of the step are intact in k2_..k6_;
        // the old k1 was swapped into k7_.
        r1_ = y_old_;
        r2_ = y_ - y_old_;
        r3_ = h * k7_ - r2_;
        r4_ = r2_ - h * k1_ - r3_;
        r5_ = h * (d1 * k7_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ + d7 * k1_);
    }

    double initial_step(double span) {
        auto scale = (opt_.atol + opt_.rtol * y_.cwiseAbs().array());
        double d0 = std::sqrt((y_.cwiseAbs().array() / scale).square().sum() / y_.size());
        double d1 = std::sqrt((k1_.cwiseAbs().array() / scale).square().sum() / y_.size());
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min({h0, span, opt_.h_max});
        tmp_ = y_ + h0 * k1_;
        State k(k1_);
        f_(t_ + h0, tmp_, k);
        double d2 = std::sqrt(((k - k1_).cwiseAbs().array() / scale).square().sum() / y_.size()) / h0;
        double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                              : std::pow(0.01 / std::max(d1, d2), 0.2);
        double h = std::min({100 * h0, h1, span, opt_.h_max});
        return h > 0.0 ? h : span;
    }

    F f_;
    OdeOptions opt_;
    double t_, t_old_, h_ = 0.0, h_last_ = 0.0;
    long n_accepted_ = 0, n_rejected_ = 0;
    State y_, y_old_, y_new_, tmp_;
    State k1_, k2_, k3_, k4_, k5_, k6_, k7_;
    State r1_, r2_, r3_, r4_, r5_;
};

template <class State, class F>
Dopri5<State, F> make_dopri5(F f, double t0, State y0, OdeOptions opt = {}) {
    return Dopri5<State, F>(std::move(f), t0, std::move(y0), opt);
}

// Integrates over t_grid (strictly increasing, t_grid[0] is the initial time) and
// calls obs(i, t, y) at every grid point.
template <class State, class F, class Obs>
void integrate_on_grid(F f, const State& y0, const std::vector<double>& t_grid, const OdeOptions& opt,
                       Obs&& obs) {
    if (t_grid.empty()) return;
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("time grid must be strictly increasing");
    auto solver = make_dopri5<State>(std::move(f), t_grid.front(), y0, opt);
    obs(std::size_t{0}, t_grid.front(), y0);
    double t_end = t_grid.back();
    std::size_t next = 1;
    while (next < t_grid.size()) {
        solver.advance(t_end);
        while (next < t_grid.size() && t_grid[next] <= solver.t()) {
            if (t_grid[next] == solver.t())
                obs(next, t_grid[next], solver.y());
            else
                obs(next, t_grid[next], solver.interpolate(t_grid[next]));
            ++next;
        }
    }
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

}  // namespace phog
