#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "feasibility.hpp"
#include "fock.hpp"
#include "ode.hpp"

namespace phog {

struct PulseGrid {
    int n_samples = 4096;
    double window_s = 0;
    double lambda0_m = 1550e-9;
    CMat A;  // guides x samples, |A|^2 in W
    double beta2 = 0;
    double gamma_nl = 0;
    RMat coupling;  // symmetric, 1/m
    double alpha = 0;
    bool self_steepening = true;

    int guides() const { return int(A.rows()); }
    double dt() const { return window_s / n_samples; }
    double omega0() const { return 2.0 * std::numbers::pi * constants::c / lambda0_m; }
    std::vector<double> times() const {
        std::vector<double> t(n_samples);
        for (int i = 0; i < n_samples; ++i) t[i] = (i - n_samples / 2) * dt();
        return t;
    }
    // FFT angular frequencies (e^{-i w T} forward convention).
    RVec fft_omega() const {
        RVec w(n_samples);
        double dw = 2.0 * std::numbers::pi / window_s;
        for (int k = 0; k < n_samples; ++k) w[k] = (k < n_samples / 2 ? k : k - n_samples) * dw;
        return w;
    }
    double energy() const { return A.cwiseAbs2().sum() * dt(); }
    double energy(int guide) const { return A.row(guide).cwiseAbs2().sum() * dt(); }

    void validate() const {
        if (n_samples < 4 || (n_samples & (n_samples - 1)) != 0) throw std::invalid_argument("n_samples must be a power of two");
        if (A.cols() != n_samples) throw std::invalid_argument("envelope length mismatch");
        if (coupling.rows() != A.rows() || coupling.cols() != A.rows())
            throw std::invalid_argument("coupling matrix size mismatch");
        if ((coupling - coupling.transpose()).cwiseAbs().maxCoeff() > 0 || coupling.minCoeff() < 0)
            throw std::invalid_argument("coupling matrix must be symmetric and nonnegative");
        if (!A.allFinite()) throw std::invalid_argument("non-finite envelope");
    }
};

inline CVec gaussian_envelope(const PulseGrid& g, double energy_J, double fwhm_s) {
    double T0 = fwhm_s / (2.0 * std::sqrt(std::log(2.0)));
    double P0 = energy_J / (T0 * std::sqrt(std::numbers::pi));
    auto t = g.times();
    CVec a(g.n_samples);
    for (int i = 0; i < g.n_samples; ++i) a[i] = std::sqrt(P0) * std::exp(-t[i] * t[i] / (2 * T0 * T0));
    return a;
}

struct NlseOptions {
    double dz = 0;  // 0: largest admissible step
    double step_fraction = 20.0;
    double edge_tol = 1e-6;
    int edge_bins = 3;
};

struct PropagationResult {
    std::vector<double> z;
    std::vector<CMat> fields;
    std::vector<double> energy;
    double dz = 0;
    long steps = 0;
};

class SplitStep {
public:
    explicit SplitStep(const PulseGrid& g) : g_(g), w_(g.fft_omega()) { g_.validate(); }

    double beat_length() const {
        double gmax = g_.coupling.maxCoeff();
        return gmax > 0 ? std::numbers::pi / (2.0 * gmax) : std::numeric_limits<double>::infinity();
    }
    double nonlinear_length() const {
        double p = g_.A.cwiseAbs2().maxCoeff();
        return g_.gamma_nl > 0 && p > 0 ? 1.0 / (g_.gamma_nl * p) : std::numeric_limits<double>::infinity();
    }
    double max_dz(double fraction = 20.0) const { return std::min(beat_length(), nonlinear_length()) / fraction; }

    PropagationResult propagate(const std::vector<double>& z_samples, const NlseOptions& o = {}) {
        if (z_samples.empty() || z_samples.front() != 0.0) throw std::invalid_argument("z samples must start at 0");
        double bound = max_dz(o.step_fraction);
        double dz = o.dz > 0 ? o.dz : bound;
        if (!std::isfinite(dz)) dz = z_samples.back() > 0 ? z_samples.back() / 16 : 1.0;
        if (dz > bound * (1 + 1e-12)) throw SolverError("split-step dz exceeds the beat/nonlinear length bound");
        PropagationResult res;
        res.dz = dz;
        CMat A = g_.A;
        res.z.push_back(0);
        res.fields.push_back(A);
        res.energy.push_back(A.cwiseAbs2().sum() * g_.dt());
        double z = 0;
        for (std::size_t s = 1; s < z_samples.size(); ++s) {
            double span = z_samples[s] - z;
            if (!(span > 0)) throw std::invalid_argument("z samples must increase");
            long n = std::max(1L, long(std::ceil(span / dz - 1e-9)));
            double h = span / n;
            prepare(h);
            for (long k = 0; k < n; ++k) step(A, h);
            res.steps += n;
            z = z_samples[s];
            check_edges(A, o);
            res.z.push_back(z);
            res.fields.push_back(A);
            res.energy.push_back(A.cwiseAbs2().sum() * g_.dt());
        }
        return res;
    }

    CVec fft(const CVec& x) {
        CVec out;
        fft_.fwd(out, x);
        return out;
    }
    CVec ifft(const CVec& x) {
        CVec out;
        fft_.inv(out, x);
        return out;
    }

private:
    void prepare(double h) {
        if (h == h_) return;
        h_ = h;
        Eigen::SelfAdjointEigenSolver<RMat> es(g_.coupling);
        CVec ph = (cplx(0, 0.5 * h) * es.eigenvalues().cast<cplx>()).array().exp();
        expK_ = es.eigenvectors().cast<cplx>() * ph.asDiagonal() * es.eigenvectors().transpose().cast<cplx>();
        CVec lin(g_.n_samples);
        for (int k = 0; k < g_.n_samples; ++k)
            lin[k] = std::exp(cplx(-0.25 * g_.alpha * h, 0.25 * g_.beta2 * w_[k] * w_[k] * h));
        disp_ = lin;
    }

    void linear_half(CMat& A) {
        A = expK_ * A;
        if (g_.beta2 == 0.0 && g_.alpha == 0.0) return;
        for (int r = 0; r < A.rows(); ++r) {
            CVec row = A.row(r).transpose();
            CVec F = fft(row);
            F.array() *= disp_.array();
            A.row(r) = ifft(F).transpose();
        }
    }

    CMat nonlinear_rhs(const CMat& A) {
        CMat P = A.cwiseAbs2().cwiseProduct(A);
        CMat r = cplx(0, g_.gamma_nl) * P;
        if (g_.self_steepening) {
            double w0 = g_.omega0();
            for (int k = 0; k < A.rows(); ++k) {
                CVec F = fft(P.row(k).transpose());
                F.array() *= cplx(0, 1) * w_.cast<cplx>().array();
                r.row(k) += (cplx(0, g_.gamma_nl) * cplx(0, 1.0 / w0)) * ifft(F).transpose();
            }
        }
        return r;
    }

    void step(CMat& A, double h) {
        linear_half(A);
        if (g_.gamma_nl != 0.0) {
            CMat k1 = nonlinear_rhs(A);
            CMat k2 = nonlinear_rhs(A + 0.5 * h * k1);
            CMat k3 = nonlinear_rhs(A + 0.5 * h * k2);
            CMat k4 = nonlinear_rhs(A + h * k3);
            A += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        linear_half(A);
    }

    void check_edges(const CMat& A, const NlseOptions& o) {
        double total = 0, edge = 0;
        int n = g_.n_samples, half = n / 2;
        for (int r = 0; r < A.rows(); ++r) {
            CVec F = fft(A.row(r).transpose());
            total += F.squaredNorm();
            for (int b = 0; b < o.edge_bins; ++b) edge += std::norm(F[half - 1 - b]) + std::norm(F[half + b]);
        }
        if (total > 0 && edge > o.edge_tol * total) throw SolverError("spectral aliasing: energy at the grid edge");
    }

    PulseGrid g_;
    RVec w_;
    Eigen::FFT<double> fft_;
    double h_ = -1;
    CMat expK_;
    CVec disp_;
};

inline double rms_width(const PulseGrid& g, const CVec& a) {
    auto t = g.times();
    double s0 = 0, s1 = 0, s2 = 0;
    for (int i = 0; i < g.n_samples; ++i) {
        double p = std::norm(a[i]);
        s0 += p;
        s1 += p * t[i];
        s2 += p * t[i] * t[i];
    }
    double m = s1 / s0;
    return std::sqrt(s2 / s0 - m * m);
}

// Spectral FWHM in wavelength of the summed power spectrum over all guides.
inline double spectral_fwhm_m(const PulseGrid& g, const CMat& A) {
    SplitStep ss(g);
    int n = g.n_samples;
    RVec S = RVec::Zero(n);
    for (int r = 0; r < A.rows(); ++r) S += ss.fft(A.row(r).transpose()).cwiseAbs2();
    RVec w = g.fft_omega();
    std::vector<double> ws(n), Ss(n);
    for (int i = 0; i < n; ++i) {
        int k = (i + n / 2) % n;
        ws[i] = w[k];
        Ss[i] = S[k];
    }
    int imax = int(std::max_element(Ss.begin(), Ss.end()) - Ss.begin());
    double half = 0.5 * Ss[imax];
    int lo = 0, hi = n - 1;
    while (lo < imax && Ss[lo] < half) ++lo;
    while (hi > imax && Ss[hi] < half) --hi;
    auto cross = [&](int inside, int outside) {
        if (outside < 0 || outside >= n) return ws[inside];
        double f = (Ss[inside] - half) / (Ss[inside] - Ss[outside]);
        return ws[inside] + f * (ws[outside] - ws[inside]);
    };
    double wl = cross(lo, lo - 1), wh = cross(hi, hi + 1);
    double w0 = g.omega0();
    // envelope frequency w corresponds to optical frequency w0 - w
    auto lam = [&](double dw) { return 2.0 * std::numbers::pi * constants::c / (w0 - dw); };
    return std::abs(lam(wl) - lam(wh));
}

struct NclDevice {
    double g_a = 210, g_b = 360, g_c = 430;
    int tail = 5;
    double gamma_nl = 0.6;
    double beta2 = 1.0e-24;
    double alpha = 0.0;
    double lambda0 = 1550e-9;
    double fwhm_s = 100e-15;
    double length_m = 0.02;
    int n_samples = 4096;
    double window_fwhm = 40;
    bool self_steepening = true;
    int z_samples = 41;
};

inline RMat ncl_coupling(const NclDevice& d) {
    int M = 3 + d.tail;
    RMat K = RMat::Zero(M, M);
    K(0, 2) = K(2, 0) = d.g_a;
    K(1, 2) = K(2, 1) = d.g_b;
    for (int j = 1; j <= d.tail; ++j) K(j + 1, j + 2) = K(j + 2, j + 1) = d.g_c;
    return K;
}

inline PulseGrid ncl_grid(const NclDevice& d, double energy_J) {
    PulseGrid g;
    g.n_samples = d.n_samples;
    g.window_s = d.window_fwhm * d.fwhm_s;
    g.lambda0_m = d.lambda0;
    g.beta2 = d.beta2;
    g.gamma_nl = d.gamma_nl;
    g.alpha = d.alpha;
    g.coupling = ncl_coupling(d);
    g.self_steepening = d.self_steepening;
    g.A = CMat::Zero(3 + d.tail, g.n_samples);
    CVec env = gaussian_envelope(g, energy_J, d.fwhm_s);
    double G = std::hypot(d.g_a, d.g_b);
    g.A.row(0) = (-d.g_b / G) * env.transpose();
    g.A.row(1) = (d.g_a / G) * env.transpose();
    return g;
}

struct NclCurve {
    double energy_J;
    std::vector<double> z, n_minus, energy;
    double fwhm0_m, fwhm1_m;
    double dz;
};

inline std::vector<double> n_minus_of(const PulseGrid& g, const PropagationResult& r, double g_a, double g_b) {
    double G = std::hypot(g_a, g_b), hw = constants::hbar * g.omega0();
    std::vector<double> out;
    for (const auto& A : r.fields) {
        CVec s = (g_a / G) * A.row(1).transpose() - (g_b / G) * A.row(0).transpose();
        out.push_back(s.squaredNorm() * g.dt() / hw);
    }
    return out;
}

inline std::vector<NclCurve> ncl_signature(const NclDevice& d, const std::vector<double>& energies_J,
                                           const NlseOptions& o = {}) {
    std::vector<NclCurve> out;
    auto zs = linspace(0.0, d.length_m, std::size_t(d.z_samples));
    for (double E : energies_J) {
        PulseGrid g = ncl_grid(d, E);
        SplitStep ss(g);
        auto r = ss.propagate(zs, o);
        NclCurve c;
        c.energy_J = E;
        c.z = r.z;
        c.energy = r.energy;
        c.dz = r.dz;
        c.n_minus = n_minus_of(g, r, d.g_a, d.g_b);
        c.fwhm0_m = spectral_fwhm_m(g, r.fields.front());
        c.fwhm1_m = spectral_fwhm_m(g, r.fields.back());
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace phog
