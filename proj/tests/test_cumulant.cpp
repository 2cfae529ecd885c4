#include <gtest/gtest.h>

#include "phog/cumulant.hpp"
#include "phog/diagonal.hpp"
#include "phog/lindblad.hpp"

using namespace phog;

namespace {
bool poly_eq(const Poly& a, const Poly& b, double tol = 1e-12) {
    Poly d = a - b;
    for (auto& [m, c] : d)
        if (std::abs(c) > tol) return false;
    return true;
}
cplx brute(const CVec& psi, const SpMat& A) { return psi.dot(A * psi); }
}  // namespace

TEST(Cumulant, NormalOrdering) {
    EXPECT_TRUE(poly_eq(commutator(op_a(0), op_ad(0)), op_one()));
    EXPECT_TRUE(poly_eq(op_a(0) * op_ad(0), op_ad(0) * op_a(0) + op_one()));
    EXPECT_TRUE(poly_eq(commutator(op_a(0), op_ad(1)), Poly{}));
    // a^2 a^dag^2 = a^dag^2 a^2 + 4 a^dag a + 2
    Poly lhs = op_a(0) * op_a(0) * op_ad(0) * op_ad(0);
    Poly rhs = op_ad(0) * op_ad(0) * op_a(0) * op_a(0) + 4.0 * (op_ad(0) * op_a(0)) + 2.0 * op_one();
    EXPECT_TRUE(poly_eq(lhs, rhs));
}

TEST(Cumulant, GeneratorOfLinearLoss) {
    // d<a>/dt = -(g/2) <a> under L(a)
    Poly d = adjoint_generator(op_a(0), Poly{}, {{2.0, op_a(0)}});
    EXPECT_TRUE(poly_eq(d, -1.0 * op_a(0)));
}

TEST(Cumulant, ClosuresWithoutFluctuations) {
    cplx A(1, 2), B(0.5, -1), C(-0.3, 0.2), D(2, 0);
    EXPECT_NEAR(std::abs(closure3(A, B, C, A * B, A * C, B * C) - A * B * C), 0, 1e-14);
    EXPECT_NEAR(std::abs(closure4(A, B, C, D, A * B, A * C, A * D, B * C, B * D, C * D) - A * B * C * D), 0,
                1e-14);
}

TEST(Cumulant, ClosureExactOnCoherentState) {
    int d = 40;
    cplx al(1.2, -0.7);
    CVec psi = coherent_state(al, d);
    SpMat a = annihilation(d), ad = adjoint(a);
    cplx A = brute(psi, ad), B = brute(psi, a), C = brute(psi, a);
    cplx exact = brute(psi, SpMat(ad * a * a));
    cplx cl = closure3(A, B, C, brute(psi, SpMat(ad * a)), brute(psi, SpMat(ad * a)), brute(psi, SpMat(a * a)));
    EXPECT_NEAR(std::abs(exact - cl), 0, 1e-9);
    Monomial m{{{0, 2, 3}}};
    EXPECT_NEAR(std::abs(wick_expect(m, MomentState::coherent(CVec::Constant(1, al))) -
                         brute(psi, SpMat(ad * ad * a * a * a))),
                0, 1e-8);
}

TEST(Cumulant, ClosureOnSqueezedVacuum) {
    int d = 80;
    double r = 0.4;
    CVec psi = CVec::Zero(d);
    for (int m = 0; 2 * m < d; ++m)
        psi[2 * m] = std::pow(-std::tanh(r), m) * std::exp(0.5 * std::lgamma(2 * m + 1.0) - std::lgamma(m + 1.0)) /
                     std::pow(2.0, m) / std::sqrt(std::cosh(r));
    SpMat a = annihilation(d);
    cplx a2 = brute(psi, SpMat(a * a));
    EXPECT_NEAR(a2.real(), -std::sinh(r) * std::cosh(r), 1e-10);
    cplx exact = brute(psi, SpMat(a * a * a * a));
    cplx cl = closure4(0, 0, 0, 0, a2, a2, a2, a2, a2, a2);
    EXPECT_NEAR(std::abs(exact - cl), 0, 1e-6);
    MomentState s{CVec::Zero(1), CMat::Constant(1, 1, brute(psi, SpMat(adjoint(a) * a))), CMat::Constant(1, 1, a2)};
    SpMat ad = adjoint(a);
    EXPECT_NEAR(std::abs(wick_expect(Monomial{{{0, 2, 2}}}, s) - brute(psi, SpMat(ad * ad * a * a))), 0, 1e-6);
}

TEST(Cumulant, ZeroAmplitudeIsRejected) {
    SingleModeRates r{0, 1, 1, 0, 0};
    EXPECT_THROW(single_mode_linearized(r, 0.0, linspace(0, 1, 3)), std::invalid_argument);
    // an empty state stays empty under the moment equations
    MomentEquations eq(1, op_ad(0) * op_a(0), {{1.0, op_a(0) * op_a(0)}});
    CVec v = eq.pack(MomentState::coherent(CVec::Zero(1))), dv;
    eq.rhs(v, dv);
    EXPECT_EQ(dv.norm(), 0.0);
}

TEST(Cumulant, PrintedEquationsWithDerivedSignMatchEngine) {
    auto dr = rates_from_gamma(1.0, optimal_coupling_ratio(), 2.0, 432.0, 0.0);
    SingleModeRates r{0.5, dr.gamma2, dr.gamma3, dr.sigma1, dr.sigma3};
    cplx a0 = std::sqrt(300.0);
    auto t = linspace(0, 0.004, 21);
    auto eng = single_mode_linearized(r, a0, t, SingleModeCoefficients::Derived, 1e-11);
    OdeOptions opt;
    opt.rtol = 1e-11;
    opt.atol = 1e-12;
    CVec y0(3);
    y0 << a0, a0 * a0, std::norm(a0);
    auto f = [&r](double, const CVec& y, CVec& dy) { printed_single_mode_rhs(r, -1.0, y, dy); };
    integrate_on_grid<CVec>(f, y0, t, opt, [&](std::size_t i, double, const CVec& y) {
        double n = y[2].real();
        double s2s2 = std::norm(y[1]) + 2 * n * n - 2 * std::pow(std::norm(y[0]), 2);
        EXPECT_NEAR(n, eng[i].n, 1e-6 * n);
        EXPECT_NEAR((s2s2 - n * n) / n, eng[i].q, 1e-6);
    });
}

TEST(Cumulant, DerivedSingleModeTracksDiagonal) {
    auto dr = rates_from_gamma(1.0, optimal_coupling_ratio(), 2.0, 432.0, 0.0);
    SingleModeRates r{0, dr.gamma2, dr.gamma3, dr.sigma1, dr.sigma3};
    auto t = linspace(0, 0.01, 101);
    auto lin = single_mode_linearized(r, std::sqrt(300.0), t);
    auto ex = q_trajectory(300, {0, dr.gamma2, dr.gamma3}, t);
    for (std::size_t i = 0; i < t.size() && ex[i].q > -0.5; ++i) EXPECT_NEAR(lin[i].q, ex[i].q, 0.05);
}

TEST(Cumulant, LinearNetworkIsClassical) {
    DeviceParams d;
    d.g_a = 2;
    d.g_b = 0.8;
    d.tail_couplings = {1.5, 1.1};
    d.gamma1 = 0.3;
    auto net = network_poly(d);
    ASSERT_EQ(net.modes, 5);
    RMat K = RMat::Zero(5, 5);
    K(0, 2) = K(2, 0) = 2;
    K(1, 2) = K(2, 1) = 0.8;
    K(2, 3) = K(3, 2) = 1.5;
    K(3, 4) = K(4, 3) = 1.1;
    Eigen::SelfAdjointEigenSolver<RMat> es(K);
    CVec a0 = s_minus_coherent(d, 5, 40.0);
    auto t = linspace(0, 3, 13);
    MomentOptions mo;
    mo.rtol = 1e-11;
    mo.atol = 1e-12;
    auto res = multimode_linearized(d, a0, t, false, mo, true);
    CVec u = s_minus_vector(d, 5);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CVec ph = (cplx(0, -1) * es.eigenvalues().cast<cplx>() * t[i]).array().exp();
        CVec at = std::exp(-0.15 * t[i]) * (es.eigenvectors().cast<cplx>() * ph.asDiagonal() *
                                            es.eigenvectors().transpose().cast<cplx>() * a0);
        EXPECT_NEAR(res[i].n_minus, std::norm(u.dot(at)), 1e-8 * 40);
        EXPECT_NEAR((res[i].state.alpha - at).norm(), 0, 1e-8);
    }
}

TEST(Cumulant, ToyNetworkAgreesWithExactSolver) {
    // two modes: Kerr on both, hopping, loss on the second
    double g = 1, U = 0.02, gl = 0.5;
    Poly H = g * (op_ad(0) * op_a(1) + op_ad(1) * op_a(0));
    for (int k = 0; k < 2; ++k) H = H + (U / 2) * (op_ad(k) * op_ad(k) * op_a(k) * op_a(k));
    MomentEquations eq(2, H, {{gl, op_a(1)}});

    int D = 24;
    ModelSpec m;
    m.dims = {D, D};
    SpMat a = embed(annihilation(D), 0, m.dims), b = embed(annihilation(D), 1, m.dims);
    m.H = g * SpMat(adjoint(a) * b + adjoint(b) * a) + detail::kerr_term(a, U) + detail::kerr_term(b, U);
    m.channels = {{"loss_b", gl, b}};
    m.ops = {{"a", a}, {"b", b}};
    CVec psi = tensor({coherent_state(2.5, D), coherent_state(0.0, D)});
    double t_e = 2.0 / gl * 2;  // total photon number e-folds over ~4/gl with half the light in b
    auto t = linspace(0, t_e, 9);
    auto ex = evolve(m, psi * psi.adjoint(), t, {"a", "b"});
    CVec a0(2);
    a0 << 2.5, 0.0;
    std::vector<double> nl;
    evolve_moments(eq, MomentState::coherent(a0), t, MomentOptions{}, [&](std::size_t i, double, const MomentState& s) {
        double na = std::norm(s.alpha[0]) + s.N(0, 0).real();
        double nb = std::norm(s.alpha[1]) + s.N(1, 1).real();
        double tot_ex = ex.n[i][0] + ex.n[i][1];
        if (tot_ex < 6.25 / std::exp(1.0)) return;
        EXPECT_NEAR(na + nb, tot_ex, 0.02 * tot_ex);
        EXPECT_NEAR(na, ex.n[i][0], 0.02 * tot_ex);
        // physicality of the reconstructed covariance
        EXPECT_TRUE(is_physical(covariance_from_central(s.alpha, s.N, s.M)));
    });
}

TEST(Cumulant, NegativityScenario) {
    DeviceParams d;
    d.g_a = d.g_b = 60;
    d.kerr_U = 2;
    d.gamma_c = 15;
    d.gamma1 = 11.5;
    auto r = negativity_scenario(d, 2500, linspace(0, 0.01, 21));
    EXPECT_NEAR(r.front().negativity, 0, 1e-12);
    double peak = 0;
    for (auto& s : r) peak = std::max(peak, s.negativity);
    EXPECT_NEAR(peak, 1.25, 0.25);
    // without Kerr the symmetric device keeps both modes coherent and separable
    d.kerr_U = 0;
    for (auto& s : negativity_scenario(d, 2500, linspace(0, 0.01, 11))) EXPECT_NEAR(s.negativity, 0, 1e-9);
}
