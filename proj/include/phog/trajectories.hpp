#pragma once

#include <atomic>
#include <cstdint>
#include <thread>

#include "lindblad.hpp"

namespace phog {

// SplitMix64 stream keyed by (seed, trajectory index); each index yields an independent stream.
class SplitMix64 {
public:
    SplitMix64(std::uint64_t seed, std::uint64_t stream) : state_(mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL))) {}

    std::uint64_t next() { return mix(state_ += 0x9E3779B97F4A7C15ULL); }
    double uniform() { return (double(next() >> 11) + 0.5) * 0x1.0p-53; }  // (0,1)

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

struct TrajectoryConfig {
    const ModelSpec* model = nullptr;
    CVec psi0;
    int n_traj = 1;
    std::uint64_t seed = 0;
    std::vector<double> t_grid;
    int threads = 1;
    double rtol = 1e-7;
    double atol = 1e-9;
    double jump_tol = 1e-9;
};

struct ObservableSeries {
    std::vector<double> n_mean, n_se, q, q_se;
};

struct TrajectoryResult {
    std::vector<double> t;
    std::vector<std::string> names;
    std::vector<ObservableSeries> obs;
    int n_traj = 0;
    std::uint64_t seed = 0;
    long jumps = 0;
};

namespace detail {

struct TrajSamples {
    // [time][observable] of <x^dag x> and <x^dag^2 x^2> in the normalized conditional state
    std::vector<double> n, f2;
    long jumps = 0;
};

}  // namespace detail

inline TrajectoryResult mcwf_evolve(const TrajectoryConfig& cfg, const std::vector<std::string>& observables) {
    if (!cfg.model) throw std::invalid_argument("trajectory config needs a model");
    const ModelSpec& m = *cfg.model;
    if (cfg.n_traj < 1) throw std::invalid_argument("n_traj must be positive");
    if (cfg.psi0.size() != m.dim()) throw std::invalid_argument("initial state dimension mismatch");
    if (std::abs(cfg.psi0.norm() - 1.0) > 1e-10) throw std::invalid_argument("initial state must be normalized");
    const auto& tg = cfg.t_grid;
    for (std::size_t i = 1; i < tg.size(); ++i)
        if (!(tg[i] > tg[i - 1])) throw std::invalid_argument("time grid must be strictly increasing");

    const SpMat Heff = m.effective_hamiltonian();
    const SpMat mIH = cplx(0, -1) * Heff;
    std::vector<SpMat> jumps;
    std::vector<double> rates;
    for (const auto& c : m.channels)
        if (c.rate > 0.0) {
            jumps.push_back(c.L);
            rates.push_back(c.rate);
        }
    std::vector<SpMat> X1, X2;
    for (const auto& name : observables) {
        auto it = m.ops.find(name);
        if (it == m.ops.end()) throw std::invalid_argument("unknown observable " + name);
        X1.push_back(it->second);
        X2.push_back(SpMat(it->second * it->second));
    }
    const std::size_t T = tg.size(), K = observables.size();

    auto record = [&](detail::TrajSamples& s, std::size_t ti, const CVec& psi) {
        double nrm2 = psi.squaredNorm();
        for (std::size_t k = 0; k < K; ++k) {
            s.n[ti * K + k] = (X1[k] * psi).squaredNorm() / nrm2;
            s.f2[ti * K + k] = (X2[k] * psi).squaredNorm() / nrm2;
        }
    };

    auto run_one = [&](int i) {
        detail::TrajSamples s;
        s.n.assign(T * K, 0.0);
        s.f2.assign(T * K, 0.0);
        SplitMix64 rng(cfg.seed, std::uint64_t(i));
        OdeOptions opt;
        opt.rtol = cfg.rtol;
        opt.atol = cfg.atol;
        auto f = [&mIH](double, const CVec& y, CVec& dy) { dy.noalias() = mIH * y; };
        auto solver = make_dopri5<CVec>(f, tg.front(), cfg.psi0, opt);
        record(s, 0, cfg.psi0);
        std::size_t next = 1;
        double r = rng.uniform();
        while (next < T) {
            solver.advance(tg.back());
            double t1 = solver.t();
            double t_cut = t1;
            bool jump = solver.y().squaredNorm() <= r;
            if (jump) {
                double lo = solver.t_old(), hi = t1;
                for (int it = 0; it < 200; ++it) {
                    double mid = 0.5 * (lo + hi);
                    double nm = solver.interpolate(mid).squaredNorm();
                    if (nm > r)
                        lo = mid;
                    else
                        hi = mid;
                    if (std::abs(nm - r) <= cfg.jump_tol || hi - lo <= 1e-15 * std::max(1.0, std::abs(hi))) break;
                }
                t_cut = hi;
            }
            while (next < T && tg[next] <= t_cut) {
                record(s, next, tg[next] == t1 ? solver.y() : CVec(solver.interpolate(tg[next])));
                ++next;
            }
            if (!jump) continue;
            CVec psi = t_cut == t1 ? solver.y() : CVec(solver.interpolate(t_cut));
            double nrm = psi.norm();
            if (!(nrm > 1e-150)) throw SolverError("trajectory norm underflow");
            psi /= nrm;
            std::vector<CVec> Lpsi(jumps.size());
            std::vector<double> w(jumps.size());
            double wsum = 0;
            for (std::size_t c = 0; c < jumps.size(); ++c) {
                Lpsi[c] = jumps[c] * psi;
                w[c] = rates[c] * Lpsi[c].squaredNorm();
                wsum += w[c];
            }
            if (!(wsum > 0)) throw SolverError("jump with vanishing total rate");
            double u = rng.uniform() * wsum, acc = 0;
            std::size_t ch = 0;
            for (; ch + 1 < w.size(); ++ch) {
                acc += w[ch];
                if (u < acc) break;
            }
            psi = Lpsi[ch] / Lpsi[ch].norm();
            solver.reset(t_cut, psi);
            ++s.jumps;
            r = rng.uniform();
        }
        return s;
    };

    std::vector<detail::TrajSamples> all(cfg.n_traj);
    int nthreads = std::max(1, std::min(cfg.threads, cfg.n_traj));
    if (nthreads == 1) {
        for (int i = 0; i < cfg.n_traj; ++i) all[i] = run_one(i);
    } else {
        std::atomic<int> counter{0};
        std::vector<std::exception_ptr> errors(nthreads);
        std::vector<std::thread> pool;
        for (int w = 0; w < nthreads; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (int i; (i = counter.fetch_add(1)) < cfg.n_traj;) all[i] = run_one(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    TrajectoryResult res;
    res.t = tg;
    res.names = observables;
    res.n_traj = cfg.n_traj;
    res.seed = cfg.seed;
    for (const auto& s : all) res.jumps += s.jumps;
    const double Nt = cfg.n_traj;
    for (std::size_t k = 0; k < K; ++k) {
        ObservableSeries os;
        for (std::size_t ti = 0; ti < T; ++ti) {
            double sn = 0, sf = 0;
            for (const auto& s : all) {
                sn += s.n[ti * K + k];
                sf += s.f2[ti * K + k];
            }
            double mn = sn / Nt, mf = sf / Nt;
            double vnn = 0, vff = 0, vnf = 0;
            for (const auto& s : all) {
                double dn = s.n[ti * K + k] - mn, df = s.f2[ti * K + k] - mf;
                vnn += dn * dn;
                vff += df * df;
                vnf += dn * df;
            }
            double denom = Nt > 1 ? Nt - 1 : 1;
            vnn /= denom;
            vff /= denom;
            vnf /= denom;
            os.n_mean.push_back(mn);
            os.n_se.push_back(std::sqrt(vnn / Nt));
            if (mn > 0) {
                double q = mf / mn - mn;
                double gf = 1.0 / mn, gn = -mf / (mn * mn) - 1.0;
                double var = gf * gf * vff + gn * gn * vnn + 2 * gf * gn * vnf;
                os.q.push_back(q);
                os.q_se.push_back(std::sqrt(std::max(0.0, var) / Nt));
            } else {
                os.q.push_back(0.0);
                os.q_se.push_back(0.0);
            }
        }
        res.obs.push_back(std::move(os));
    }
    return res;
}

}  // namespace phog
