#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "fock.hpp"
#include "ode.hpp"
#include "params.hpp"

namespace phog {

// ---- normally ordered operator algebra -------------------------------------------------------

// Product over modes of x_k^dag^cre x_k^ann, modes strictly increasing.
struct Monomial {
    struct Factor {
        int mode, cre, ann;
        auto operator<=>(const Factor&) const = default;
    };
    std::vector<Factor> f;

    auto operator<=>(const Monomial&) const = default;

    static Monomial one() { return {}; }
    static Monomial ann(int k) { return {{{k, 0, 1}}}; }
    static Monomial cre(int k) { return {{{k, 1, 0}}}; }

    int degree() const {
        int d = 0;
        for (const auto& x : f) d += x.cre + x.ann;
        return d;
    }
    Monomial adjoint() const {
        Monomial m = *this;
        for (auto& x : m.f) std::swap(x.cre, x.ann);
        return m;
    }
};

using Poly = std::map<Monomial, cplx>;

inline Poly poly(const Monomial& m, cplx c = 1.0) { return Poly{{m, c}}; }
inline Poly op_a(int k) { return poly(Monomial::ann(k)); }
inline Poly op_ad(int k) { return poly(Monomial::cre(k)); }
inline Poly op_one() { return poly(Monomial::one()); }

inline void add_to(Poly& p, const Monomial& m, cplx c) {
    if (c == 0.0) return;
    auto [it, fresh] = p.emplace(m, c);
    if (!fresh) {
        it->second += c;
        if (std::abs(it->second) == 0.0) p.erase(it);
    }
}

inline Poly operator+(Poly a, const Poly& b) {
    for (const auto& [m, c] : b) add_to(a, m, c);
    return a;
}
inline Poly operator-(Poly a, const Poly& b) {
    for (const auto& [m, c] : b) add_to(a, m, -c);
    return a;
}
inline Poly operator*(cplx s, Poly a) {
    for (auto& [m, c] : a) c *= s;
    return a;
}
inline Poly operator*(double s, Poly a) { return cplx(s) * std::move(a); }

inline Poly adjoint(const Poly& p) {
    Poly r;
    for (const auto& [m, c] : p) add_to(r, m.adjoint(), std::conj(c));
    return r;
}

namespace detail {

inline double binom(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline double factorial(int n) {
    double r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

}  // namespace detail

// Normal-ordered product of two normal-ordered monomials:
// x^q x^dag^p = sum_j C(q,j) C(p,j) j! x^dag^(p-j) x^(q-j) on each shared mode.
inline Poly multiply(const Monomial& A, const Monomial& B) {
    std::vector<std::vector<std::pair<Monomial::Factor, double>>> choices;
    std::size_t i = 0, j = 0;
    while (i < A.f.size() || j < B.f.size()) {
        if (j == B.f.size() || (i < A.f.size() && A.f[i].mode < B.f[j].mode)) {
            choices.push_back({{A.f[i], 1.0}});
            ++i;
        } else if (i == A.f.size() || B.f[j].mode < A.f[i].mode) {
            choices.push_back({{B.f[j], 1.0}});
            ++j;
        } else {
            const auto &a = A.f[i], &b = B.f[j];
            std::vector<std::pair<Monomial::Factor, double>> opts;
            for (int k = 0; k <= std::min(a.ann, b.cre); ++k)
                opts.push_back({{a.mode, a.cre + b.cre - k, a.ann + b.ann - k},
                                detail::binom(a.ann, k) * detail::binom(b.cre, k) * detail::factorial(k)});
            choices.push_back(std::move(opts));
            ++i;
            ++j;
        }
    }
    Poly out;
    std::vector<std::size_t> idx(choices.size(), 0);
    for (;;) {
        Monomial m;
        double c = 1;
        for (std::size_t k = 0; k < choices.size(); ++k) {
            const auto& [fac, w] = choices[k][idx[k]];
            if (fac.cre + fac.ann > 0) m.f.push_back(fac);
            c *= w;
        }
        add_to(out, m, c);
        std::size_t k = 0;
        while (k < choices.size() && ++idx[k] == choices[k].size()) idx[k++] = 0;
        if (k == choices.size()) break;
    }
    return out;
}

inline Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b)
            for (const auto& [m, c] : multiply(ma, mb)) add_to(r, m, ca * cb * c);
    return r;
}

inline Poly commutator(const Poly& a, const Poly& b) { return a * b - b * a; }

struct PolyChannel {
    double rate;
    Poly L;
};

// Heisenberg-picture Lindblad generator: i[H,A] + sum rate (L^dag A L - {L^dag L, A}/2).
inline Poly adjoint_generator(const Poly& A, const Poly& H, const std::vector<PolyChannel>& ch) {
    Poly r = cplx(0, 1) * commutator(H, A);
    for (const auto& c : ch) {
        if (c.rate == 0.0) continue;
        Poly Ld = adjoint(c.L);
        Poly LdL = Ld * c.L;
        r = r + c.rate * (Ld * A * c.L - 0.5 * (LdL * A + A * LdL));
    }
    return r;
}

// ---- Gaussian (Wick) closure -----------------------------------------------------------------

// Central moments: alpha_k = <x_k>, N_kl = <dx_k^dag dx_l>, M_kl = <dx_k dx_l>.
struct MomentState {
    CVec alpha;
    CMat N, M;

    long modes() const { return alpha.size(); }
    static MomentState coherent(const CVec& alpha) {
        long m = alpha.size();
        return {alpha, CMat::Zero(m, m), CMat::Zero(m, m)};
    }
};

struct WickFactor {
    enum Kind : unsigned char { Alpha, AlphaBar, N, M, MBar } kind;
    int i, j;
    auto operator<=>(const WickFactor&) const = default;
};

struct WickTerm {
    double coef;
    std::vector<WickFactor> factors;
};

// Expands <monomial> into means and central pair contractions (Gaussian fluctuations).
inline std::vector<WickTerm> wick_expand(const Monomial& mono) {
    struct Op {
        int mode;
        bool dag;
    };
    std::vector<Op> ops;
    for (const auto& f : mono.f)
        for (int r = 0; r < f.cre; ++r) ops.push_back({f.mode, true});
    for (const auto& f : mono.f)
        for (int r = 0; r < f.ann; ++r) ops.push_back({f.mode, false});
    std::map<std::vector<WickFactor>, double> acc;
    std::vector<WickFactor> cur;
    std::vector<bool> used(ops.size(), false);
    auto rec = [&](auto&& self, std::size_t pos) -> void {
        while (pos < ops.size() && used[pos]) ++pos;
        if (pos == ops.size()) {
            auto key = cur;
            std::sort(key.begin(), key.end());
            acc[key] += 1.0;
            return;
        }
        used[pos] = true;
        const Op& u = ops[pos];
        cur.push_back({u.dag ? WickFactor::AlphaBar : WickFactor::Alpha, u.mode, -1});
        self(self, pos + 1);
        cur.pop_back();
        for (std::size_t q = pos + 1; q < ops.size(); ++q) {
            if (used[q]) continue;
            const Op& v = ops[q];
            WickFactor w{};
            if (u.dag && v.dag)
                w = {WickFactor::MBar, std::min(u.mode, v.mode), std::max(u.mode, v.mode)};
            else if (u.dag && !v.dag)
                w = {WickFactor::N, u.mode, v.mode};
            else if (!u.dag && !v.dag)
                w = {WickFactor::M, std::min(u.mode, v.mode), std::max(u.mode, v.mode)};
            else
                throw std::logic_error("monomial not normally ordered");
            used[q] = true;
            cur.push_back(w);
            self(self, pos + 1);
            cur.pop_back();
            used[q] = false;
        }
        used[pos] = false;
    };
    rec(rec, 0);
    std::vector<WickTerm> out;
    for (auto& [k, c] : acc) out.push_back({c, k});
    return out;
}

inline cplx wick_factor_value(const WickFactor& w, const MomentState& s) {
    switch (w.kind) {
    case WickFactor::Alpha: return s.alpha[w.i];
    case WickFactor::AlphaBar: return std::conj(s.alpha[w.i]);
    case WickFactor::N: return s.N(w.i, w.j);
    case WickFactor::M: return s.M(w.i, w.j);
    case WickFactor::MBar: return std::conj(s.M(w.i, w.j));
    }
    return 0.0;
}

inline cplx wick_evaluate(const std::vector<WickTerm>& terms, const MomentState& s) {
    cplx sum = 0;
    for (const auto& t : terms) {
        cplx p = t.coef;
        for (const auto& f : t.factors) p *= wick_factor_value(f, s);
        sum += p;
    }
    return sum;
}

inline cplx wick_expect(const Monomial& m, const MomentState& s) { return wick_evaluate(wick_expand(m), s); }

// Printed third/fourth-order cumulant closures on explicit (order-preserving) moments.
inline cplx closure3(cplx A, cplx B, cplx C, cplx AB, cplx AC, cplx BC) {
    return A * BC + B * AC + C * AB - 2.0 * A * B * C;
}

inline cplx closure4(cplx A, cplx B, cplx C, cplx D, cplx AB, cplx AC, cplx AD, cplx BC, cplx BD, cplx CD) {
    return AB * CD + AC * BD + AD * BC - 2.0 * A * B * C * D;
}

// ---- closed first/second moment system --------------------------------------------------------

class MomentEquations {
public:
    MomentEquations(int modes, const Poly& H, const std::vector<PolyChannel>& channels) : m_(modes) {
        for (int k = 0; k < m_; ++k) first_.push_back(compile(adjoint_generator(op_a(k), H, channels)));
        for (int k = 0; k < m_; ++k)
            for (int l = k; l < m_; ++l) {
                n_.push_back(compile(adjoint_generator(op_ad(k) * op_a(l), H, channels)));
                mm_.push_back(compile(adjoint_generator(op_a(k) * op_a(l), H, channels)));
            }
    }

    int modes() const { return m_; }
    std::size_t unique_monomials() const { return terms_.size(); }
    long packed_size() const { return m_ + m_ * (m_ + 1); }

    CVec pack(const MomentState& s) const {
        CVec v(packed_size());
        v.head(m_) = s.alpha;
        long p = m_;
        for (int k = 0; k < m_; ++k)
            for (int l = k; l < m_; ++l) {
                v[p++] = s.N(k, l);
                v[p++] = s.M(k, l);
            }
        return v;
    }

    MomentState unpack(const CVec& v) const {
        MomentState s{v.head(m_), CMat(m_, m_), CMat(m_, m_)};
        long p = m_;
        for (int k = 0; k < m_; ++k)
            for (int l = k; l < m_; ++l) {
                s.N(k, l) = v[p];
                s.N(l, k) = std::conj(v[p++]);
                s.M(k, l) = s.M(l, k) = v[p++];
            }
        return s;
    }

    // Time derivative of the packed central-moment vector.
    void rhs(const CVec& v, CVec& dv) const {
        MomentState s = unpack(v);
        values_.resize(long(terms_.size()));
        for (std::size_t i = 0; i < terms_.size(); ++i) values_[long(i)] = wick_evaluate(terms_[i], s);
        auto eval = [&](const Lin& lin) {
            cplx r = 0;
            for (const auto& [idx, c] : lin) r += c * values_[idx];
            return r;
        };
        CVec da(m_);
        for (int k = 0; k < m_; ++k) da[k] = eval(first_[k]);
        dv.resize(v.size());
        dv.head(m_) = da;
        long p = m_, q = 0;
        for (int k = 0; k < m_; ++k)
            for (int l = k; l < m_; ++l, ++q) {
                const cplx ak = s.alpha[k], al = s.alpha[l];
                dv[p++] = eval(n_[q]) - std::conj(da[k]) * al - std::conj(ak) * da[l];
                dv[p++] = eval(mm_[q]) - da[k] * al - ak * da[l];
            }
    }

private:
    using Lin = std::vector<std::pair<long, cplx>>;

    Lin compile(const Poly& p) {
        Lin lin;
        for (const auto& [mono, c] : p) {
            auto it = index_.find(mono);
            long idx;
            if (it == index_.end()) {
                idx = long(terms_.size());
                index_.emplace(mono, idx);
                terms_.push_back(wick_expand(mono));
            } else {
                idx = it->second;
            }
            lin.push_back({idx, c});
        }
        return lin;
    }

    int m_;
    std::vector<Lin> first_, n_, mm_;
    std::map<Monomial, long> index_;
    std::vector<std::vector<WickTerm>> terms_;
    mutable CVec values_;
};

struct MomentOptions {
    double rtol = 1e-9;
    double atol = 1e-9;
};

template <class Obs>
void evolve_moments(const MomentEquations& eq, const MomentState& s0, const std::vector<double>& t_grid,
                    const MomentOptions& mo, Obs&& obs) {
    OdeOptions opt;
    opt.rtol = mo.rtol;
    opt.atol = mo.atol;
    auto f = [&eq](double, const CVec& y, CVec& dy) { eq.rhs(y, dy); };
    integrate_on_grid<CVec>(f, eq.pack(s0), t_grid, opt,
                            [&](std::size_t i, double t, const CVec& y) { obs(i, t, eq.unpack(y)); });
}

struct CollectiveStats {
    double n = 0, q = 0;
};

// Photon number and Mandel Q of x_u = sum_k u_k x_k under the Gaussian closure.
inline CollectiveStats collective_stats(const MomentState& s, const CVec& u) {
    cplx a = (u.transpose() * s.alpha)(0);
    double Ns = (u.adjoint() * s.N * u)(0).real();
    cplx Ms = (u.transpose() * s.M * u)(0);
    double n = std::norm(a) + Ns;
    double qn = 2.0 * (std::conj(a) * std::conj(a) * Ms).real() + std::norm(Ms) + 2.0 * std::norm(a) * Ns + Ns * Ns;
    return {n, n > 0 ? qn / n : 0.0};
}

// ---- single-mode linearized model -------------------------------------------------------------

enum class SingleModeCoefficients { Printed, Derived };

struct SingleModeRates {
    double gamma1 = 0, gamma2 = 0, gamma3 = 0, sigma1 = 0, sigma3 = 0;
};

struct LinearizedSample {
    double t, n, q;
};

// Raw-moment equations with the printed coefficient set (d<s> carries +gamma2 in c2);
// conjugate equations are implied.
inline void printed_single_mode_rhs(const SingleModeRates& r, double c2_gamma2_sign, const CVec& y, CVec& dy) {
    const cplx I(0, 1);
    const double g1 = r.gamma1, g2 = r.gamma2, g3 = r.gamma3;
    const cplx c1 = -g1 / 2 + I * (r.sigma1 + r.sigma3);
    const cplx c2 = c2_gamma2_sign * g2 - g3 + 2.0 * I * r.sigma1;
    const cplx c3 = -g1 - g2 - g3 + 4.0 * I * r.sigma1 + 2.0 * I * r.sigma3;
    const cplx c4 = -2 * g2 - 5 * g3 + 4.0 * I * r.sigma1;
    const double c5 = -2 * g2 - g3;
    const cplx S = y[0], S2 = y[1], n = y[2];
    const cplx Sb = std::conj(S), S2b = std::conj(S2);
    dy.resize(3);
    dy[0] = c1 * S + c2 * (Sb * S2 + 2.0 * S * n - 2.0 * Sb * S * S) -
            g3 / 2 *
                (6.0 * Sb * n * S2 + 3.0 * S * S2b * S2 + 6.0 * S * n * n - 2.0 * S2b * S * S * S -
                 12.0 * n * Sb * S * S - 6.0 * S2 * Sb * Sb * S + 6.0 * Sb * Sb * S * S * S);
    dy[1] = c3 * S2 + c4 * (3.0 * n * S2 - 2.0 * Sb * S * S * S) -
            g3 * (3.0 * S2b * S2 * S2 + 12.0 * n * n * S2 - 2.0 * S2b * std::pow(S, 4) -
                  12.0 * S2 * Sb * Sb * S * S - 16.0 * n * Sb * S * S * S + 16.0 * Sb * Sb * std::pow(S, 4));
    dy[2] = -g1 * n + c5 * (S2b * S2 + 2.0 * n * n - 2.0 * Sb * Sb * S * S) -
            g3 * (9.0 * S2b * n * S2 + 6.0 * n * n * n - 6.0 * S2b * Sb * S * S * S - 18.0 * n * Sb * Sb * S * S -
                  6.0 * S2 * Sb * Sb * Sb * S + 16.0 * Sb * Sb * Sb * S * S * S);
}

inline std::vector<LinearizedSample> single_mode_linearized(
    const SingleModeRates& r, cplx alpha0, const std::vector<double>& t_grid,
    SingleModeCoefficients variant = SingleModeCoefficients::Derived, double rtol = 1e-10) {
    if (std::norm(alpha0) == 0.0) throw std::invalid_argument("linearized model needs a nonzero amplitude");
    std::vector<LinearizedSample> out;
    if (variant == SingleModeCoefficients::Printed) {
        OdeOptions opt;
        opt.rtol = rtol;
        opt.atol = 1e-12;
        CVec y0(3);
        y0 << alpha0, alpha0 * alpha0, std::norm(alpha0);
        auto f = [&r](double, const CVec& y, CVec& dy) { printed_single_mode_rhs(r, +1.0, y, dy); };
        integrate_on_grid<CVec>(f, y0, t_grid, opt, [&](std::size_t, double t, const CVec& y) {
            double n = y[2].real();
            double s2s2 = std::norm(y[1]) + 2 * n * n - 2 * std::pow(std::norm(y[0]), 2);
            out.push_back({t, n, (s2s2 - n * n) / n});
        });
        return out;
    }
    Poly nn = op_ad(0) * op_a(0);
    Poly H = r.sigma1 * (nn * nn) + r.sigma3 * nn;
    std::vector<PolyChannel> ch{{r.gamma1, op_a(0)}, {r.gamma2, op_a(0) * op_a(0)}, {r.gamma3, nn * op_a(0)}};
    MomentEquations eq(1, H, ch);
    CVec u = CVec::Ones(1);
    MomentOptions mo;
    mo.rtol = rtol;
    mo.atol = 1e-12;
    evolve_moments(eq, MomentState::coherent(CVec::Constant(1, alpha0)), t_grid, mo,
                   [&](std::size_t, double t, const MomentState& s) {
                       auto st = collective_stats(s, u);
                       out.push_back({t, st.n, st.q});
                   });
    return out;
}

// ---- multimode network ----------------------------------------------------------------------

// Modes a, b, c0..cN with optional extra decay on c0 (gamma_c; zero for the full tail).
struct NetworkPoly {
    int modes;
    Poly H;
    std::vector<PolyChannel> channels;
};

inline NetworkPoly network_poly(const DeviceParams& dev, bool tail_as_decay = false) {
    dev.validate();
    int N = int(dev.tail_length());
    NetworkPoly net{3 + (tail_as_decay ? 0 : N), {}, {}};
    auto hop = [&](int k, int l, double g) {
        if (g == 0.0) return;
        Poly t = g * (op_ad(k) * op_a(l));
        net.H = net.H + t + adjoint(t);
    };
    hop(0, 2, dev.g_a);
    hop(1, 2, dev.g_b);
    if (!tail_as_decay)
        for (int j = 1; j <= N; ++j) hop(j + 1, j + 2, dev.tail_couplings[j - 1]);
    for (int k = 0; k < net.modes; ++k) {
        if (dev.kerr_U != 0.0) {
            Poly x2 = op_a(k) * op_a(k);
            net.H = net.H + (dev.kerr_U / 2) * (adjoint(x2) * x2);
        }
        double rate = dev.gamma1 + (tail_as_decay && k == 2 ? dev.resolved_gamma_c() : 0.0);
        net.channels.push_back({rate, op_a(k)});
    }
    return net;
}

struct MultimodeSample {
    double t;
    double n_minus, q_minus;
    MomentState state;
};

inline CVec s_minus_vector(const DeviceParams& dev, int modes) {
    CVec u = CVec::Zero(modes);
    u[0] = -dev.g_b / dev.G();
    u[1] = dev.g_a / dev.G();
    return u;
}

inline std::vector<MultimodeSample> multimode_linearized(const DeviceParams& dev, const CVec& alpha0,
                                                         const std::vector<double>& t_grid,
                                                         bool tail_as_decay = false, MomentOptions mo = {},
                                                         bool keep_state = false) {
    NetworkPoly net = network_poly(dev, tail_as_decay);
    if (alpha0.size() != net.modes) throw std::invalid_argument("amplitude list does not match network modes");
    MomentEquations eq(net.modes, net.H, net.channels);
    CVec u = s_minus_vector(dev, net.modes);
    std::vector<MultimodeSample> out;
    evolve_moments(eq, MomentState::coherent(alpha0), t_grid, mo, [&](std::size_t, double t, const MomentState& s) {
        auto st = collective_stats(s, u);
        out.push_back({t, st.n, st.q, keep_state ? s : MomentState{}});
    });
    return out;
}

// Two-mode model in the modal basis (modes a, b) with the collective-mode Hamiltonian and dissipators.
inline NetworkPoly two_mode_poly(const DeviceParams& dev) {
    DerivedRates r = derived_rates(dev);
    double G = dev.G();
    Poly sp = (dev.g_a / G) * op_a(0) + (dev.g_b / G) * op_a(1);
    Poly sm = (dev.g_a / G) * op_a(1) - (dev.g_b / G) * op_a(0);
    Poly np = adjoint(sp) * sp, nm = adjoint(sm) * sm;
    NetworkPoly net{2, {}, {}};
    net.H = r.sigma1 * (np * np + nm * nm) + r.sigma2 * (np * nm) + r.sigma3 * (np + nm);
    Poly x = adjoint(sp) * sm;
    Poly t4 = r.sigma4 * (x * x);
    Poly t5 = r.sigma5 * (x * (nm - np - op_one()));
    net.H = net.H + t4 + adjoint(t4) + t5 + adjoint(t5);
    net.channels = {{dev.gamma1, sm}, {r.Gamma + dev.gamma1, sp}};
    return net;
}

enum class NegativityModel { TwoMode, ThreeMode };

struct NegativitySample {
    double t, negativity, n_a, n_b;
};

// Gaussian log-negativity between a and b from linearized moments, coherent inputs of
// mean n0 in each of a and b (equal phases).
inline std::vector<NegativitySample> negativity_scenario(const DeviceParams& dev, double n0_per_mode,
                                                         const std::vector<double>& t_grid,
                                                         NegativityModel level = NegativityModel::TwoMode,
                                                         double log_base = std::exp(1.0), MomentOptions mo = {}) {
    NetworkPoly net = level == NegativityModel::TwoMode ? two_mode_poly(dev) : network_poly(dev, true);
    MomentEquations eq(net.modes, net.H, net.channels);
    CVec a0 = CVec::Zero(net.modes);
    a0[0] = a0[1] = std::sqrt(n0_per_mode);
    std::vector<NegativitySample> out;
    evolve_moments(eq, MomentState::coherent(a0), t_grid, mo, [&](std::size_t, double t, const MomentState& s) {
        CVec al = s.alpha.head(2);
        CMat N = s.N.topLeftCorner(2, 2), M = s.M.topLeftCorner(2, 2);
        auto c = covariance_from_central(al, N, M);
        out.push_back({t, log_negativity(c, log_base), std::norm(al[0]) + N(0, 0).real(),
                       std::norm(al[1]) + N(1, 1).real()});
    });
    return out;
}

// Initial amplitudes with a coherent state of mean n_minus in s_minus and vacuum elsewhere.
inline CVec s_minus_coherent(const DeviceParams& dev, int modes, double n_minus) {
    CVec a = CVec::Zero(modes);
    auto [aa, ab] = modal_amplitudes(0.0, std::sqrt(n_minus), dev.g_a, dev.g_b);
    a[0] = aa;
    a[1] = ab;
    return a;
}

struct Plateau {
    double level = 0, duration = 0, start = 0, min_q = 0;
};

// Longest contiguous run with Q below the threshold; level is the median Q over that run.
inline Plateau plateau_of(const std::vector<double>& t, const std::vector<double>& q, double threshold = -0.5) {
    if (t.size() != q.size()) throw std::invalid_argument("plateau: length mismatch");
    Plateau p;
    if (q.empty()) return p;
    p.min_q = *std::min_element(q.begin(), q.end());
    std::size_t best_lo = 0, best_hi = 0;
    for (std::size_t i = 0; i < q.size();) {
        if (q[i] >= threshold) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < q.size() && q[j] < threshold) ++j;
        if (t[j - 1] - t[i] > t[best_hi == 0 ? 0 : best_hi - 1] - t[best_lo] || best_hi == 0) {
            best_lo = i;
            best_hi = j;
        }
        i = j;
    }
    if (best_hi == 0) return p;
    std::vector<double> run(q.begin() + long(best_lo), q.begin() + long(best_hi));
    std::sort(run.begin(), run.end());
    std::size_t m = run.size();
    p.level = m % 2 ? run[m / 2] : 0.5 * (run[m / 2 - 1] + run[m / 2]);
    p.start = t[best_lo];
    p.duration = t[best_hi - 1] - t[best_lo];
    return p;
}

}  // namespace phog
