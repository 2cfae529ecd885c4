#include <gtest/gtest.h>

#include "phog/lindblad.hpp"

using namespace phog;

namespace {
DeviceParams symmetric(double U, double gamma_c, double gamma1 = 0) {
    DeviceParams d;
    d.g_a = d.g_b = 1;
    d.kerr_U = U;
    d.gamma_c = gamma_c;
    d.gamma1 = gamma1;
    return d;
}
CMat fock_rho(int k, int dim) {
    CMat r = CMat::Zero(dim, dim);
    r(k, k) = 1;
    return r;
}
}  // namespace

TEST(Lindblad, ModelStructure) {
    auto m = build_model(ModelKind::SingleMode, symmetric(1, 2), {6});
    ASSERT_EQ(m.channels.size(), 3u);
    EXPECT_EQ(m.channels[2].name, "gamma3");
    EXPECT_EQ(m.channels[2].rate, 0.0);

    DeviceParams d = symmetric(1.0, 2.0, 0.3);
    d.g_b = 0.5;
    auto three = build_model(ModelKind::ThreeMode, d, {3, 3, 3});
    ASSERT_EQ(three.channels.size(), 3u);
    EXPECT_EQ(three.channels[0].rate, 0.3);
    EXPECT_EQ(three.channels[1].rate, 0.3);
    EXPECT_NEAR(three.channels[2].rate, 2.3, 1e-15);
    EXPECT_NEAR(CMat(three.H - adjoint(three.H)).norm(), 0, 1e-12);

    // symmetric two-mode: H reduces to the sigma-terms without the sigma5 coupling
    auto sym = symmetric(1.0, 2.0);
    auto r = derived_rates(sym);
    EXPECT_EQ(r.sigma5, 0.0);
    auto two = build_model(ModelKind::TwoMode, sym, {4, 4}, Basis::Collective);
    SpMat sp = two.ops["s_plus"], sm = two.ops["s_minus"];
    SpMat np = adjoint(sp) * sp, nm = adjoint(sm) * sm, x = adjoint(sp) * sm;
    SpMat H = r.sigma1 * SpMat(np * np + nm * nm) + r.sigma2 * SpMat(np * nm) + r.sigma3 * SpMat(np + nm) +
              r.sigma4 * SpMat(x * x + adjoint(SpMat(x * x)));
    EXPECT_NEAR(CMat(two.H - H).norm(), 0, 1e-12);

    EXPECT_THROW(build_model(ModelKind::ThreeMode, d, {3, 3}), std::invalid_argument);
}

TEST(Lindblad, VacuumIsStationary) {
    DeviceParams d = symmetric(0.0, 2.0, 0.5);
    d.g_b = 0.4;
    d.tail_couplings = {1.0};
    auto m = build_model(ModelKind::FullNetwork, d, {2, 2, 2, 2});
    CMat rho = fock_rho(0, int(m.dim()));
    auto r = evolve(m, rho, linspace(0, 3, 4), {"a", "c1"});
    for (auto& n : r.n) EXPECT_NEAR(n[0] + n[1], 0, 1e-14);
}

TEST(Lindblad, LinearDecay) {
    DeviceParams d;
    d.g_a = 1;
    d.gamma1 = 0.7;
    d.gamma_c = 0;
    auto m = build_model(ModelKind::SingleMode, d, {4});
    auto t = linspace(0, 3, 16);
    auto r = evolve(m, fock_rho(1, 4), t, {"s_minus"});
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(r.n[i][0], std::exp(-0.7 * t[i]), 1e-6);
}

TEST(Lindblad, TwoPhotonDecay) {
    ModelSpec m;
    m.kind = ModelKind::SingleMode;
    m.dims = {4};
    m.H = SpMat(4, 4);
    SpMat a = annihilation(4);
    m.channels = {{"gamma2", 0.3, SpMat(a * a)}};
    m.ops = {{"s", a}};
    EvolveOptions eo;
    eo.keep_states = true;
    auto t = linspace(0, 4, 9);
    auto r = evolve(m, fock_rho(2, 4), t, {"s"}, eo);
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_NEAR(r.states[i](2, 2).real(), std::exp(-2 * 0.3 * t[i]), 1e-7);
        EXPECT_NEAR(r.trace[i], 1, 1e-7);
    }
}

TEST(Lindblad, Invariants) {
    DeviceParams d;
    d.g_a = 1;
    d.g_b = 0.41;
    d.kerr_U = 0.5;
    d.gamma_c = 3;
    d.gamma1 = 0.1;
    auto m = build_model(ModelKind::ThreeMode, d, {7, 7, 3}, Basis::Modal);
    CVec psi = tensor({coherent_state(0.6, 7), coherent_state(cplx(0.3, 0.4), 7), coherent_state(0.0, 3)});
    EvolveOptions eo;
    eo.keep_states = true;
    eo.check_positivity = true;
    auto r = evolve(m, psi * psi.adjoint(), linspace(0, 2, 11), {"a", "b", "c0"}, eo);
    double prev = 1e9;
    for (std::size_t i = 0; i < r.t.size(); ++i) {
        EXPECT_NEAR(r.trace[i], 1, 1e-7);
        DensityMatrix dm{m.dims, r.states[i]};
        EXPECT_LE(dm.hermiticity_error(), 1e-9);
        EXPECT_GE(dm.min_eigenvalue(), -1e-7);
        double tot = r.n[i][0] + r.n[i][1] + r.n[i][2];
        EXPECT_LE(tot, prev + 1e-9);
        prev = tot;
    }
}

TEST(Lindblad, BasisChangeIsUnitary) {
    DeviceParams d;
    d.g_a = 1;
    d.g_b = 0.41;
    d.kerr_U = 0.3;
    d.gamma_c = 4;
    auto modal = build_model(ModelKind::ThreeMode, d, {10, 10, 3}, Basis::Modal);
    auto coll = build_model(ModelKind::ThreeMode, d, {10, 10, 3}, Basis::Collective);
    auto [a, b] = modal_amplitudes(0.3, 0.8, d.g_a, d.g_b);
    CVec p1 = tensor({coherent_state(a, 10), coherent_state(b, 10), coherent_state(0.0, 3)});
    CVec p2 = tensor({coherent_state(0.3, 10), coherent_state(0.8, 10), coherent_state(0.0, 3)});
    auto t = linspace(0, 1, 5);
    auto r1 = evolve(modal, p1 * p1.adjoint(), t, {"s_minus"});
    auto r2 = evolve(coll, p2 * p2.adjoint(), t, {"s_minus"});
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_NEAR(r1.n[i][0], r2.n[i][0], 2e-4);
        EXPECT_NEAR(r1.q[i][0], r2.q[i][0], 2e-3);
    }
}

TEST(Lindblad, PairGeneration) {
    auto vac = pair_generation_scenario(0.0, 0.0, 1, 5, 0, linspace(0, 1, 3), 4);
    for (auto& p : vac.p_a) EXPECT_NEAR(p.p[0], 1, 1e-12);

    // ideal asymptotic state (|2,0> + |0,2> - sqrt2 |1,1>)/2
    int D = 3;
    CVec psi = CVec::Zero(D * D);
    psi[2 * D + 0] = 0.5;
    psi[0 * D + 2] = 0.5;
    psi[1 * D + 1] = -std::sqrt(2.0) / 2;
    auto pa = photon_number_dist_pure(psi, {D, D}, 0);
    EXPECT_NEAR(pa.p[1] / pa.p[2], 2.0, 1e-14);

    auto r = pair_generation_scenario(0.5, 0.5, 1, 5, 0, linspace(0, 0.75, 4));
    EXPECT_NEAR(r.p_a.back().total(), 1, 1e-7);
    EXPECT_GT(r.p_a.back().p[2], 0);
}

TEST(Lindblad, TraceDriftIsAnError) {
    ModelSpec m;
    m.dims = {3};
    m.H = SpMat(3, 3);
    SpMat a = annihilation(3);
    m.channels = {{"bad", 1.0, a}};
    m.ops = {{"a", a}};
    CMat rho = fock_rho(2, 3);
    rho(0, 0) = 0.5;  // trace 1.5
    EXPECT_THROW(evolve(m, rho, linspace(0, 1, 3), {"a"}), SolverError);
}
