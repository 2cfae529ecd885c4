#include <gtest/gtest.h>

#include "phog/nlse.hpp"

using namespace phog;

namespace {
PulseGrid linear_pair(double g) {
    PulseGrid p;
    p.n_samples = 1024;
    p.window_s = 4e-12;
    p.coupling = RMat::Zero(2, 2);
    p.coupling(0, 1) = p.coupling(1, 0) = g;
    p.A = CMat::Zero(2, p.n_samples);
    p.A.row(0) = gaussian_envelope(p, 1e-12, 200e-15).transpose();
    return p;
}
}  // namespace

TEST(Nlse, BeatLength) {
    double g = 300;
    PulseGrid p = linear_pair(g);
    SplitStep ss(p);
    double zb = std::numbers::pi / (2 * g);
    EXPECT_NEAR(ss.beat_length(), zb, 1e-15);
    auto r = ss.propagate({0.0, zb, 2 * zb});
    double e0 = r.fields[0].row(0).squaredNorm();
    EXPECT_NEAR(r.fields[1].row(1).squaredNorm() / e0, 1.0, 1e-4);
    EXPECT_NEAR(r.fields[1].row(0).squaredNorm() / e0, 0.0, 1e-4);
    EXPECT_NEAR(r.fields[2].row(0).squaredNorm() / e0, 1.0, 1e-4);
}

TEST(Nlse, GaussianDispersion) {
    PulseGrid p;
    p.n_samples = 4096;
    double fwhm = 100e-15, T0 = fwhm / (2 * std::sqrt(std::log(2.0)));
    p.window_s = 80 * fwhm;
    p.beta2 = -2e-26;
    p.coupling = RMat::Zero(1, 1);
    p.A = gaussian_envelope(p, 1e-12, fwhm).transpose();
    double LD = T0 * T0 / std::abs(p.beta2);
    SplitStep ss(p);
    auto r = ss.propagate({0.0, 0.5 * LD, 2 * LD});
    double w0 = rms_width(p, r.fields[0].row(0).transpose());
    EXPECT_NEAR(w0, T0 / std::sqrt(2.0), 1e-4 * w0);
    for (int i = 1; i < 3; ++i) {
        double z = r.z[i];
        double w = rms_width(p, r.fields[i].row(0).transpose());
        EXPECT_NEAR(w / w0, std::sqrt(1 + z * z / (LD * LD)), 1e-4);
        CVec s0 = ss.fft(r.fields[0].row(0).transpose()), s1 = ss.fft(r.fields[i].row(0).transpose());
        EXPECT_NEAR((s0.cwiseAbs() - s1.cwiseAbs()).norm() / s0.norm(), 0, 1e-10);
    }
}

TEST(Nlse, EnergyConservationFullNetwork) {
    NclDevice d;
    PulseGrid g = ncl_grid(d, 200e-12);
    SplitStep ss(g);
    auto r = ss.propagate(linspace(0, d.length_m, 5));
    for (double e : r.energy) EXPECT_LE(std::abs(e / r.energy[0] - 1) / d.length_m, 1e-6);
}

TEST(Nlse, LinearLoss) {
    PulseGrid p = linear_pair(300);
    p.alpha = 2.0;
    SplitStep ss(p);
    auto r = ss.propagate(linspace(0, 0.05, 6));
    for (std::size_t i = 0; i < r.z.size(); ++i)
        EXPECT_NEAR(r.energy[i] / r.energy[0], std::exp(-2.0 * r.z[i]), 1e-6);
}

TEST(Nlse, ZeroInput) {
    NclDevice d;
    d.z_samples = 5;
    auto c = ncl_signature(d, {0.0});
    for (double n : c[0].n_minus) EXPECT_EQ(n, 0.0);
}

TEST(Nlse, InitialPhotonNumbers) {
    NclDevice d;
    double hw = constants::hbar * 2 * std::numbers::pi * constants::c / d.lambda0;
    double want[] = {3.9e8, 7.8e8, 1.2e9, 1.6e9};
    int i = 0;
    for (double E : {50e-12, 100e-12, 150e-12, 200e-12}) {
        PulseGrid g = ncl_grid(d, E);
        EXPECT_NEAR(g.energy() / E, 1.0, 1e-9);
        PropagationResult r;
        r.fields = {g.A};
        double n = n_minus_of(g, r, d.g_a, d.g_b)[0];
        EXPECT_NEAR(n, E / hw, 1e-6 * n);
        EXPECT_NEAR(n / want[i++], 1.0, 0.03);
    }
}

TEST(Nlse, StepGuards) {
    NclDevice d;
    PulseGrid g = ncl_grid(d, 200e-12);
    SplitStep ss(g);
    NlseOptions o;
    o.dz = 2 * ss.max_dz();
    EXPECT_THROW(ss.propagate({0.0, 1e-3}, o), SolverError);

    PulseGrid narrow = linear_pair(300);
    narrow.A.row(0) = gaussian_envelope(narrow, 1e-12, 0.8 * narrow.dt()).transpose();
    SplitStep s2(narrow);
    EXPECT_THROW(s2.propagate({0.0, 1e-4}), SolverError);

    PulseGrid bad = linear_pair(300);
    bad.coupling(0, 1) = 1;
    EXPECT_THROW(SplitStep{bad}, std::invalid_argument);
}

TEST(Nlse, StepHalvingConvergence) {
    NclDevice d;
    d.length_m = 0.005;
    PulseGrid g = ncl_grid(d, 150e-12);
    SplitStep ss(g);
    NlseOptions o;
    o.dz = ss.max_dz();
    auto r1 = ss.propagate({0.0, d.length_m}, o);
    o.dz /= 2;
    auto r2 = ss.propagate({0.0, d.length_m}, o);
    double n1 = n_minus_of(g, r1, d.g_a, d.g_b).back(), n2 = n_minus_of(g, r2, d.g_a, d.g_b).back();
    EXPECT_LT(std::abs(n1 / n2 - 1), 1e-4);
    EXPECT_LT((r1.fields.back() - r2.fields.back()).norm() / r2.fields.back().norm(), 1e-3);
}

TEST(Nlse, SpectralWidthOfTransformLimitedPulse) {
    NclDevice d;
    PulseGrid g = ncl_grid(d, 100e-12);
    // transform-limited Gaussian: dnu * dt = 2 ln2 / pi
    double dnu = 2 * std::log(2.0) / std::numbers::pi / d.fwhm_s;
    double dl = d.lambda0 * d.lambda0 / constants::c * dnu;
    EXPECT_NEAR(spectral_fwhm_m(g, g.A) / dl, 1.0, 0.01);
}
