#pragma once

#include <map>
#include <string>

#include "fock.hpp"
#include "ode.hpp"
#include "params.hpp"

namespace phog {

enum class ModelKind { FullNetwork, ThreeMode, TwoMode, SingleMode };
enum class Basis { Modal, Collective };

struct Channel {
    std::string name;
    double rate;
    SpMat L;
};

struct ModelSpec {
    ModelKind kind{};
    Basis basis = Basis::Modal;
    std::vector<std::string> mode_names;
    Dims dims;
    SpMat H;
    std::vector<Channel> channels;
    std::map<std::string, SpMat> ops;  // named annihilation-type operators (a, b, s_minus, ...)

    long dim() const { return total_dim(dims); }

    SpMat effective_hamiltonian() const {
        SpMat Heff = H;
        for (const auto& c : channels) Heff -= cplx(0, 0.5 * c.rate) * SpMat(adjoint(c.L) * c.L);
        return Heff;
    }
};

namespace detail {

inline SpMat kerr_term(const SpMat& x, double U) {
    SpMat xd = adjoint(x);
    return SpMat((U / 2.0) * (xd * xd * x * x));
}

inline void add_hc(SpMat& H, const SpMat& term) { H += term + adjoint(term); }

}  // namespace detail

// dims are per mode in the order of mode_names of the requested kind:
//   FullNetwork: a, b, c0..cN;  ThreeMode: a, b, c0 (Collective: s_plus, s_minus, c0);
//   TwoMode: a, b (Collective: s_plus, s_minus);  SingleMode: s_minus.
inline ModelSpec build_model(ModelKind kind, const DeviceParams& dev, const Dims& dims, Basis basis = Basis::Modal) {
    dev.validate();
    ModelSpec m;
    m.kind = kind;
    m.basis = basis;
    m.dims = dims;
    for (int d : dims)
        if (d < 2) throw std::invalid_argument("mode dimension below 2");
    const double ga = dev.g_a, gb = dev.g_b, G = dev.G(), U = dev.kerr_U;
    auto need = [&](std::size_t n) {
        if (dims.size() != n) throw std::invalid_argument("wrong number of mode dimensions for model");
    };
    auto mode_op = [&](std::size_t k) { return embed(annihilation(dims[k]), k, dims); };
    long D = total_dim(dims);
    m.H = SpMat(D, D);

    auto signal_ops = [&](SpMat& a, SpMat& b, SpMat& sp, SpMat& sm) {
        if (basis == Basis::Modal) {
            a = mode_op(0);
            b = mode_op(1);
            sp = (ga * a + gb * b) / G;
            sm = (ga * b - gb * a) / G;
        } else {
            sp = mode_op(0);
            sm = mode_op(1);
            a = (ga * sp - gb * sm) / G;
            b = (gb * sp + ga * sm) / G;
        }
    };

    switch (kind) {
    case ModelKind::FullNetwork: {
        std::size_t N = dev.tail_length();
        need(3 + N);
        if (basis != Basis::Modal) throw std::invalid_argument("full network supports the modal basis only");
        m.mode_names = {"a", "b"};
        for (std::size_t j = 0; j <= N; ++j) m.mode_names.push_back("c" + std::to_string(j));
        std::vector<SpMat> x;
        for (std::size_t k = 0; k < dims.size(); ++k) x.push_back(mode_op(k));
        detail::add_hc(m.H, SpMat(ga * adjoint(x[0]) * x[2]));
        detail::add_hc(m.H, SpMat(gb * adjoint(x[1]) * x[2]));
        for (std::size_t j = 1; j <= N; ++j)
            detail::add_hc(m.H, SpMat(dev.tail_couplings[j - 1] * adjoint(x[j + 1]) * x[j + 2]));
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (U != 0.0) m.H += detail::kerr_term(x[k], U);
            m.channels.push_back({"loss_" + m.mode_names[k], dev.gamma1, x[k]});
            m.ops[m.mode_names[k]] = x[k];
        }
        m.ops["s_plus"] = (ga * x[0] + gb * x[1]) / G;
        m.ops["s_minus"] = (ga * x[1] - gb * x[0]) / G;
        break;
    }
    case ModelKind::ThreeMode: {
        need(3);
        SpMat a, b, sp, sm;
        signal_ops(a, b, sp, sm);
        SpMat c0 = mode_op(2);
        m.mode_names = basis == Basis::Modal ? std::vector<std::string>{"a", "b", "c0"}
                                             : std::vector<std::string>{"s_plus", "s_minus", "c0"};
        detail::add_hc(m.H, SpMat(ga * adjoint(a) * c0));
        detail::add_hc(m.H, SpMat(gb * adjoint(b) * c0));
        if (U != 0.0) {
            m.H += detail::kerr_term(a, U);
            m.H += detail::kerr_term(b, U);
            m.H += detail::kerr_term(c0, U);
        }
        m.channels.push_back({"loss_a", dev.gamma1, a});
        m.channels.push_back({"loss_b", dev.gamma1, b});
        m.channels.push_back({"loss_c0", dev.gamma1 + dev.resolved_gamma_c(), c0});
        m.ops = {{"a", a}, {"b", b}, {"c0", c0}, {"s_plus", sp}, {"s_minus", sm}};
        break;
    }
    case ModelKind::TwoMode: {
        need(2);
        DerivedRates r = derived_rates(dev);
        SpMat a, b, sp, sm;
        signal_ops(a, b, sp, sm);
        m.mode_names = basis == Basis::Modal ? std::vector<std::string>{"a", "b"}
                                             : std::vector<std::string>{"s_plus", "s_minus"};
        SpMat np = adjoint(sp) * sp, nm = adjoint(sm) * sm;
        SpMat I = identity_op(D);
        m.H = r.sigma1 * SpMat(np * np + nm * nm) + r.sigma2 * SpMat(np * nm) + r.sigma3 * SpMat(np + nm);
        SpMat x = adjoint(sp) * sm;
        if (r.sigma4 != 0.0) detail::add_hc(m.H, SpMat(r.sigma4 * x * x));
        if (r.sigma5 != 0.0) detail::add_hc(m.H, SpMat(r.sigma5 * x * SpMat(nm - np - I)));
        m.channels.push_back({"loss_s_minus", dev.gamma1, sm});
        m.channels.push_back({"loss_s_plus", r.Gamma + dev.gamma1, sp});
        m.ops = {{"a", a}, {"b", b}, {"s_plus", sp}, {"s_minus", sm}};
        break;
    }
    case ModelKind::SingleMode: {
        need(1);
        DerivedRates r = derived_rates(dev);
        SpMat s = mode_op(0);
        SpMat n = adjoint(s) * s;
        m.mode_names = {"s_minus"};
        m.H = r.sigma1 * SpMat(n * n) + r.sigma3 * n;
        m.channels.push_back({"gamma1", dev.gamma1, s});
        m.channels.push_back({"gamma2", r.gamma2, SpMat(s * s)});
        m.channels.push_back({"gamma3", r.gamma3, SpMat(n * s)});
        m.ops = {{"s_minus", s}};
        break;
    }
    }
    m.H.prune(cplx(0.0));
    return m;
}

inline cplx expect(const SpMat& A, const CMat& rho) {
    cplx s = 0;
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it) s += it.value() * rho(it.col(), it.row());
    return s;
}

struct ModeStats {
    double n = 0, q = 0;
};

// Photon number and Mandel Q for an annihilation-type operator x.
inline ModeStats mode_stats(const SpMat& x, const CMat& rho) {
    SpMat xd = adjoint(x);
    double n = expect(SpMat(xd * x), rho).real();
    double n2 = expect(SpMat(xd * xd * x * x), rho).real();
    return {n, n > 0 ? n2 / n - n : 0.0};
}

inline double top_level_population(const CMat& rho, const Dims& dims) {
    std::vector<double> top(dims.size(), 0.0);
    for (long i = 0; i < rho.rows(); ++i) {
        auto occ = decode_index(i, dims);
        for (std::size_t k = 0; k < dims.size(); ++k)
            if (occ[k] == dims[k] - 1) top[k] += rho(i, i).real();
    }
    return top.empty() ? 0.0 : *std::max_element(top.begin(), top.end());
}

struct EvolveOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double trace_tol = 1e-7;
    double positivity_tol = 1e-7;
    bool check_positivity = false;
    bool keep_states = false;
};

struct EvolutionResult {
    std::vector<double> t;
    std::vector<std::string> observables;
    std::vector<std::vector<double>> n;  // [time][observable]
    std::vector<std::vector<double>> q;
    std::vector<double> trace;
    std::vector<double> leakage;  // largest top-level population over modes
    std::vector<CMat> states;
};

struct LindbladRhs {
    SpMat Heff;
    std::vector<SpMat> jumps;

    explicit LindbladRhs(const ModelSpec& m) : Heff(m.effective_hamiltonian()) {
        for (const auto& c : m.channels)
            if (c.rate > 0.0) jumps.push_back(std::sqrt(c.rate) * c.L);
    }

    void operator()(double, const CMat& rho, CMat& d) const {
        X_.noalias() = Heff * rho;
        d.noalias() = cplx(0, -1) * X_;
        d.noalias() += cplx(0, 1) * X_.adjoint();
        for (const auto& J : jumps) {
            X_.noalias() = J * rho;
            Y_ = X_.adjoint();
            d.noalias() += J * Y_;
        }
    }

private:
    mutable CMat X_, Y_;
};

inline EvolutionResult evolve(const ModelSpec& m, const CMat& rho0, const std::vector<double>& t_grid,
                              const std::vector<std::string>& observables, const EvolveOptions& eo = {}) {
    if (rho0.rows() != m.dim()) throw std::invalid_argument("initial state dimension mismatch");
    EvolutionResult res;
    res.observables = observables;
    std::vector<SpMat> obs;
    for (const auto& name : observables) {
        auto it = m.ops.find(name);
        if (it == m.ops.end()) throw std::invalid_argument("unknown observable " + name);
        obs.push_back(it->second);
    }
    OdeOptions opt;
    opt.rtol = eo.rtol;
    opt.atol = eo.atol;
    integrate_on_grid<CMat>(LindbladRhs(m), rho0, t_grid, opt, [&](std::size_t, double t, const CMat& rho) {
        double tr = rho.trace().real();
        if (std::abs(tr - 1.0) > eo.trace_tol) throw SolverError("trace drift beyond tolerance");
        if (eo.check_positivity) {
            Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() < -eo.positivity_tol) throw SolverError("positivity violated");
        }
        res.t.push_back(t);
        res.trace.push_back(tr);
        res.leakage.push_back(top_level_population(rho, m.dims));
        std::vector<double> nn, qq;
        for (const auto& x : obs) {
            auto s = mode_stats(x, rho);
            nn.push_back(s.n);
            qq.push_back(s.q);
        }
        res.n.push_back(std::move(nn));
        res.q.push_back(std::move(qq));
        if (eo.keep_states) res.states.push_back(rho);
    });
    return res;
}

struct PairGenerationResult {
    std::vector<double> t;
    std::vector<PhotonNumberDist> p_a;
};

// Symmetric two-mode model, coupling scale g = 1 (times in units of 1/g).
inline PairGenerationResult pair_generation_scenario(cplx alpha_a, cplx alpha_b, double U, double gamma_c,
                                                     double gamma1, const std::vector<double>& t_grid,
                                                     int dim = 8) {
    DeviceParams dev;
    dev.g_a = dev.g_b = 1.0;
    dev.kerr_U = U;
    dev.gamma1 = gamma1;
    dev.gamma_c = gamma_c;
    ModelSpec m = build_model(ModelKind::TwoMode, dev, {dim, dim}, Basis::Modal);
    CVec psi = tensor({coherent_state(alpha_a, dim), coherent_state(alpha_b, dim)});
    EvolveOptions eo;
    eo.keep_states = true;
    eo.rtol = 1e-10;
    eo.atol = 1e-12;
    auto r = evolve(m, psi * psi.adjoint(), t_grid, {"a"}, eo);
    PairGenerationResult out;
    out.t = r.t;
    for (const auto& rho : r.states) out.p_a.push_back(photon_number_dist(rho, m.dims, 0));
    return out;
}

}  // namespace phog
