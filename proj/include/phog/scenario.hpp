#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <vector>

#include "analytics.hpp"
#include "config.hpp"
#include "cumulant.hpp"
#include "diagonal.hpp"
#include "feasibility.hpp"
#include "lindblad.hpp"
#include "nlse.hpp"
#include "params.hpp"
#include "trajectories.hpp"

namespace phog {

inline constexpr const char* code_version = "phog 0.1.0";

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> r) {
        if (r.size() != columns.size()) throw std::logic_error("row width does not match header");
        rows.push_back(std::move(r));
    }
};

struct ScenarioOutput {
    Table table;
    json meta;
};

inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ',';
            out += format_double(r[i]);
        }
        out += '\n';
    }
    return out;
}

namespace detail {

inline json solver_defaults(const std::string& solver) {
    json d = {{"seed", 0}, {"threads", 1}, {"description", ""}};
    d["device"] = {{"units", "scaled"}, {"g_a", 1.0}, {"kerr_U", 0.0}, {"gamma1", 0.0},
                   {"gamma_c_default", "total_decay_4G"}, {"tail_length", 0}, {"tail_coupling", 0.0}};
    d["time"] = {{"samples", 101}};
    if (solver == "exact")
        d["exact"] = {{"task", "evolve"}, {"model", "two_mode"}, {"basis", "modal"}, {"p_max", 4}, {"rtol", 1e-8}};
    else if (solver == "diagonal")
        d["diagonal"] = {{"rtol", 1e-9}};
    else if (solver == "analytics")
        d["analytics"] = {{"diagonal_check", false}};
    else if (solver == "linearized")
        d["linearized"] = {{"task", "single_mode"}, {"coefficients", "derived"}, {"with_exact", false},
                           {"negativity_model", "two_mode"}, {"log_base", std::exp(1.0)}, {"rtol", 1e-10}};
    else if (solver == "multimode")
        d["multimode"] = {{"tail_as_decay", false}, {"plateau_threshold", -0.5}, {"rtol", 1e-9}};
    else if (solver == "trajectories")
        d["trajectories"] = {{"n_traj", 100}, {"model", "three_mode"}, {"basis", "collective"},
                             {"observables", {"s_minus"}}, {"compare_diagonal", false}, {"rtol", 1e-7}};
    else if (solver == "nlse") {
        NclDevice n;
        d["nlse"] = {{"g_a_per_m", n.g_a},
                     {"g_b_per_m", n.g_b},
                     {"g_c_per_m", n.g_c},
                     {"tail_length", n.tail},
                     {"gamma_nl_per_W_m", n.gamma_nl},
                     {"beta2_s2_per_m", n.beta2},
                     {"alpha_per_m", 0.0},
                     {"lambda0_m", n.lambda0},
                     {"fwhm_s", n.fwhm_s},
                     {"length_m", n.length_m},
                     {"n_samples", n.n_samples},
                     {"window_fwhm", n.window_fwhm},
                     {"self_steepening", n.self_steepening},
                     {"z_samples", n.z_samples},
                     {"energies_J", {50e-12, 100e-12, 150e-12, 200e-12}},
                     {"step_fraction", NlseOptions{}.step_fraction},
                     {"dz_m", 0.0}};
    } else if (solver == "feasibility")
        d["feasibility"] = {{"preset", "bulk-glass"}, {"g_a_per_m", 200.0}, {"length_m", 0.03}, {"samples", 31}};
    return d;
}

inline std::string label_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

inline const json& require(const json& block, const std::string& key, const std::string& where) {
    if (!block.contains(key)) throw ConfigError(where + "." + key + " is required for this solver");
    return block[key];
}

inline DeviceParams device_of(const json& d) {
    DeviceParams dev;
    dev.g_a = d["g_a"].get<double>();
    bool opt = d.value("optimal_ratio", !d.contains("g_b"));
    if (opt && d.contains("g_b")) throw ConfigError("device: give either g_b or optimal_ratio, not both");
    dev.g_b = opt ? optimal_coupling_ratio() * dev.g_a : d["g_b"].get<double>();
    dev.kerr_U = d["kerr_U"].get<double>();
    dev.gamma1 = d["gamma1"].get<double>();
    if (d.contains("gamma_c")) dev.gamma_c = d["gamma_c"].get<double>();
    dev.gamma_c_default =
        d["gamma_c_default"] == "tail_only_4G" ? GammaCDefault::TailOnly4G : GammaCDefault::TotalDecay4G;
    dev.tail_couplings.assign(d["tail_length"].get<std::size_t>(), d["tail_coupling"].get<double>());
    return dev;
}

// Derived rates for the device with gamma1 replaced; an explicit Gamma bypasses the c0 elimination.
inline DerivedRates rates_of(const json& d, const DeviceParams& dev, double gamma1) {
    if (d.contains("Gamma")) return rates_from_gamma(dev.g_a, dev.g_b, dev.kerr_U, d["Gamma"].get<double>(), gamma1);
    DeviceParams x = dev;
    x.gamma1 = gamma1;
    return derived_rates(x);
}

inline json rates_json(const DerivedRates& r) {
    return {{"G", r.G},           {"Gamma", r.Gamma},   {"gamma2", r.gamma2}, {"gamma3", r.gamma3},
            {"sigma1", r.sigma1}, {"sigma2", r.sigma2}, {"sigma3", r.sigma3}, {"sigma4", r.sigma4},
            {"sigma5", r.sigma5}};
}

inline std::string evolution_column(const json& cfg) {
    return cfg["device"]["units"] == "per_m" ? "z_m" : "gt";
}

inline std::vector<double> n0_list(const json& cfg) {
    std::vector<double> v;
    if (cfg.contains("initial") && cfg["initial"].contains("n0"))
        for (const auto& x : cfg["initial"]["n0"]) v.push_back(x.get<double>());
    return v;
}

inline std::vector<double> time_grid(const json& cfg, double gamma3, double n0_ref) {
    const json& t = cfg["time"];
    if (t.contains("t_values")) {
        auto v = t["t_values"].get<std::vector<double>>();
        if (v.empty() || v.front() != 0.0) throw ConfigError("time.t_values must start at 0, where the initial state sits");
        for (std::size_t i = 1; i < v.size(); ++i)
            if (v[i] < v[i - 1]) throw ConfigError("time.t_values must be nondecreasing");
        return v;
    }
    int samples = t["samples"].get<int>();
    if (t.contains("t_end") && t.contains("x_end")) throw ConfigError("time: give t_end or x_end, not both");
    if (t.contains("t_end")) return linspace(0.0, t["t_end"].get<double>(), std::size_t(samples));
    if (t.contains("x_end")) {
        if (!(gamma3 > 0 && n0_ref > 0)) throw ConfigError("time.x_end needs gamma3 > 0 and an initial n0");
        return linspace(0.0, t["x_end"].get<double>() / (gamma3 * n0_ref * n0_ref), std::size_t(samples));
    }
    throw ConfigError("time needs t_end, x_end or t_values");
}

struct Run {
    std::string label;
    double n0, gamma1, gamma2_scale;
    int tail_length;
};

// Explicit runs win; otherwise one run per initial n0.
inline std::vector<Run> runs_of(const json& cfg, const DeviceParams& dev) {
    std::vector<Run> out;
    auto n0s = n0_list(cfg);
    double n0_default = n0s.empty() ? 0.0 : n0s.front();
    if (cfg.contains("runs")) {
        for (const auto& r : cfg["runs"]) {
            Run x{"", r.value("n0", n0_default), r.value("gamma1", dev.gamma1), r.value("gamma2_scale", 1.0),
                  r.value("tail_length", int(dev.tail_length()))};
            x.label = "n0_" + label_number(x.n0);
            if (r.contains("gamma1")) x.label += "_gamma1_" + label_number(x.gamma1);
            if (r.contains("gamma2_scale")) x.label += "_g2x" + label_number(x.gamma2_scale);
            if (r.contains("tail_length")) x.label += "_N" + std::to_string(x.tail_length);
            out.push_back(x);
        }
    } else {
        for (double n0 : n0s)
            out.push_back({"n0_" + label_number(n0), n0, dev.gamma1, 1.0, int(dev.tail_length())});
    }
    if (out.empty()) throw ConfigError("no runs: set initial.n0 or runs");
    for (const auto& r : out)
        if (!(r.n0 > 0)) throw ConfigError("every run needs n0 > 0");
    return out;
}

inline ModelKind model_kind(const std::string& s) {
    if (s == "full") return ModelKind::FullNetwork;
    if (s == "three_mode") return ModelKind::ThreeMode;
    if (s == "two_mode") return ModelKind::TwoMode;
    return ModelKind::SingleMode;
}

inline std::vector<int> dims_of(const json& block, const std::string& where) {
    return require(block, "dims", where).get<std::vector<int>>();
}

// Initial pure state: explicit per-mode amplitudes, or a coherent state of mean n0 in s_minus.
inline CVec initial_state(const json& cfg, const ModelSpec& m, const DeviceParams& dev, double leak_tol) {
    std::vector<cplx> amp(m.dims.size(), 0.0);
    const json init = cfg.value("initial", json::object());
    if (init.contains("amplitudes")) {
        const auto& a = init["amplitudes"];
        if (a.size() != m.dims.size()) throw ConfigError("initial.amplitudes needs one [re, im] per mode");
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (a[k].size() != 2) throw ConfigError("initial.amplitudes entries are [re, im]");
            amp[k] = {a[k][0].get<double>(), a[k][1].get<double>()};
        }
    } else {
        auto n0s = n0_list(cfg);
        if (n0s.size() != 1) throw ConfigError("give initial.amplitudes or exactly one initial.n0");
        cplx s = std::sqrt(n0s.front());
        auto it = std::find(m.mode_names.begin(), m.mode_names.end(), "s_minus");
        if (it != m.mode_names.end()) {
            amp[std::size_t(it - m.mode_names.begin())] = s;
        } else {
            auto [aa, ab] = modal_amplitudes(0.0, s, dev.g_a, dev.g_b);
            amp[0] = aa;
            amp[1] = ab;
        }
    }
    std::vector<CVec> parts;
    for (std::size_t k = 0; k < amp.size(); ++k) parts.push_back(coherent_state(amp[k], m.dims[k], leak_tol));
    return tensor(parts);
}

inline std::vector<std::string> observables_of(const json& block, const ModelSpec& m) {
    if (block.contains("observables")) {
        auto v = block["observables"].get<std::vector<std::string>>();
        for (const auto& o : v)
            if (!m.ops.count(o)) throw ConfigError("unknown observable " + o);
        return v;
    }
    std::vector<std::string> v = m.mode_names;
    if (m.ops.count("s_minus") && std::find(v.begin(), v.end(), "s_minus") == v.end()) v.push_back("s_minus");
    return v;
}

// ---- solvers ----

inline ScenarioOutput run_exact(const json& cfg, const DeviceParams& dev) {
    const json& b = cfg["exact"];
    ScenarioOutput out;
    auto col = evolution_column(cfg);
    if (b["task"] == "pair_generation") {
        const json init = cfg.value("initial", json::object());
        if (!init.contains("amplitudes") || init["amplitudes"].size() != 2)
            throw ConfigError("pair_generation needs initial.amplitudes for a and b");
        cplx aa{init["amplitudes"][0][0].get<double>(), init["amplitudes"][0][1].get<double>()};
        cplx ab{init["amplitudes"][1][0].get<double>(), init["amplitudes"][1][1].get<double>()};
        if (dev.gamma_c < 0.0) throw ConfigError("pair_generation needs device.gamma_c");
        int dim = b.contains("dims") ? b["dims"][0].get<int>() : 8;
        auto t = time_grid(cfg, 0, 0);
        auto r = pair_generation_scenario(aa, ab, dev.kerr_U, dev.gamma_c, dev.gamma1, t, dim);
        int pmax = std::min(b["p_max"].get<int>(), dim - 1);
        out.table.columns = {col, "n", "P"};
        json ratios = json::array();
        for (std::size_t i = 0; i < r.t.size(); ++i) {
            for (int n = 0; n <= pmax; ++n) out.table.add_row({r.t[i], double(n), r.p_a[i].p[n]});
            ratios.push_back({{col, r.t[i]}, {"P1_over_P2", r.p_a[i].p[1] / r.p_a[i].p[2]}});
        }
        out.meta["diagnostics"] = {{"ratios", ratios}, {"dim", dim}, {"top_level_population_a", r.p_a.back().p.back()}};
        return out;
    }
    ModelSpec m = build_model(model_kind(b["model"]), dev, dims_of(b, "exact"),
                              b["basis"] == "collective" ? Basis::Collective : Basis::Modal);
    auto obs = observables_of(b, m);
    CVec psi = initial_state(cfg, m, dev, 1e-6);
    auto n0s = n0_list(cfg);
    auto t = time_grid(cfg, derived_rates(dev).gamma3, n0s.empty() ? 0.0 : n0s.front());
    EvolveOptions eo;
    eo.rtol = b["rtol"].get<double>();
    eo.atol = eo.rtol * 1e-2;
    auto r = evolve(m, psi * psi.adjoint(), t, obs, eo);
    out.table.columns = {col};
    for (const auto& o : obs) {
        out.table.columns.push_back("n_" + o);
        out.table.columns.push_back("Q_" + o);
    }
    out.table.columns.push_back("trace");
    for (std::size_t i = 0; i < r.t.size(); ++i) {
        std::vector<double> row{r.t[i]};
        for (std::size_t k = 0; k < obs.size(); ++k) {
            row.push_back(r.n[i][k]);
            row.push_back(r.q[i][k]);
        }
        row.push_back(r.trace[i]);
        out.table.add_row(row);
    }
    out.meta["diagnostics"] = {{"max_top_level_population", *std::max_element(r.leakage.begin(), r.leakage.end())},
                               {"dims", m.dims},
                               {"modes", m.mode_names}};
    return out;
}

inline ScenarioOutput run_diagonal(const json& cfg, const DeviceParams& dev) {
    auto runs = runs_of(cfg, dev);
    auto t = time_grid(cfg, rates_of(cfg["device"], dev, dev.gamma1).gamma3, runs.front().n0);
    DiagonalOptions o;
    o.rtol = cfg["diagonal"]["rtol"].get<double>();
    ScenarioOutput out;
    out.table.columns = {evolution_column(cfg)};
    std::vector<std::vector<DiagonalSample>> res;
    json diag = json::array();
    for (const auto& r : runs) {
        auto dr = rates_of(cfg["device"], dev, r.gamma1);
        LossRates lr{r.gamma1, dr.gamma2 * r.gamma2_scale, dr.gamma3};
        res.push_back(q_trajectory(r.n0, lr, t, o));
        out.table.columns.push_back("n_mean_" + r.label);
        out.table.columns.push_back("Q_" + r.label);
        double min_total = 1;
        for (const auto& s : res.back()) min_total = std::min(min_total, s.total);
        diag.push_back({{"run", r.label},
                        {"gamma1", lr.gamma1},
                        {"gamma2", lr.gamma2},
                        {"gamma3", lr.gamma3},
                        {"n_max", adequate_dim(r.n0)},
                        {"min_total_probability", min_total}});
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<double> row{t[i]};
        for (const auto& s : res) {
            row.push_back(s[i].mean);
            row.push_back(s[i].q);
        }
        out.table.add_row(row);
    }
    out.meta["diagnostics"] = {{"runs", diag}};
    return out;
}

inline ScenarioOutput run_analytics(const json& cfg, const DeviceParams& dev) {
    const json& t = cfg["time"];
    if (!t.contains("x_end")) throw ConfigError("analytics needs time.x_end");
    auto X = linspace(0.0, t["x_end"].get<double>(), t["samples"].get<std::size_t>());
    ScenarioOutput out;
    out.table.columns = {"X", "Q_analytic", "n_over_n0"};
    std::vector<std::vector<DiagonalSample>> diag;
    auto n0s = n0_list(cfg);
    if (cfg["analytics"]["diagonal_check"].get<bool>()) {
        double g3 = rates_of(cfg["device"], dev, 0.0).gamma3;
        if (!(g3 > 0)) throw ConfigError("diagonal_check needs gamma3 > 0");
        if (n0s.empty()) throw ConfigError("diagonal_check needs initial.n0");
        for (double n0 : n0s) {
            std::vector<double> tg;
            for (double x : X) tg.push_back(x / (g3 * n0 * n0));
            diag.push_back(q_trajectory(n0, {0, 0, g3}, tg));
            out.table.columns.push_back("Q_diag_n0_" + label_number(n0));
        }
    }
    for (std::size_t i = 0; i < X.size(); ++i) {
        std::vector<double> row{X[i], q_of_x(X[i]), n_of_x(1.0, X[i])};
        for (const auto& d : diag) row.push_back(d[i].q);
        out.table.add_row(row);
    }
    return out;
}

inline ScenarioOutput run_linearized(const json& cfg, const DeviceParams& dev) {
    const json& b = cfg["linearized"];
    ScenarioOutput out;
    auto col = evolution_column(cfg);
    MomentOptions mo;
    mo.rtol = b["rtol"].get<double>();
    mo.atol = 1e-12;
    if (b["task"] == "negativity") {
        auto n0s = n0_list(cfg);
        if (n0s.size() != 1) throw ConfigError("negativity needs one initial.n0 (photons per mode)");
        auto t = time_grid(cfg, 0, 0);
        auto level = b["negativity_model"] == "three_mode" ? NegativityModel::ThreeMode : NegativityModel::TwoMode;
        auto r = negativity_scenario(dev, n0s.front(), t, level, b["log_base"].get<double>(), mo);
        out.table.columns = {col, "log_negativity", "n_a", "n_b"};
        double peak = 0, t_peak = 0;
        for (const auto& s : r) {
            out.table.add_row({s.t, s.negativity, s.n_a, s.n_b});
            if (s.negativity > peak) peak = s.negativity, t_peak = s.t;
        }
        out.meta["diagnostics"] = {{"peak_log_negativity", peak}, {"peak_at", t_peak}};
        return out;
    }
    auto variant = b["coefficients"] == "printed" ? SingleModeCoefficients::Printed : SingleModeCoefficients::Derived;
    bool with_exact = b["with_exact"].get<bool>();
    auto runs = runs_of(cfg, dev);
    auto t = time_grid(cfg, rates_of(cfg["device"], dev, dev.gamma1).gamma3, runs.front().n0);
    out.table.columns = {col};
    std::vector<std::vector<LinearizedSample>> lin;
    std::vector<std::vector<DiagonalSample>> ex;
    json diag = json::array();
    for (const auto& r : runs) {
        auto dr = rates_of(cfg["device"], dev, r.gamma1);
        SingleModeRates sr{r.gamma1, dr.gamma2 * r.gamma2_scale, dr.gamma3, dr.sigma1, dr.sigma3};
        lin.push_back(single_mode_linearized(sr, std::sqrt(r.n0), t, variant, mo.rtol));
        out.table.columns.push_back("n_lin_" + r.label);
        out.table.columns.push_back("Q_lin_" + r.label);
        if (with_exact) {
            ex.push_back(q_trajectory(r.n0, {sr.gamma1, sr.gamma2, sr.gamma3}, t));
            out.table.columns.push_back("n_exact_" + r.label);
            out.table.columns.push_back("Q_exact_" + r.label);
            double worst = 0;
            for (std::size_t i = 0; i < t.size(); ++i)
                worst = std::max(worst, std::abs(lin.back()[i].q - ex.back()[i].q));
            diag.push_back({{"run", r.label}, {"max_abs_Q_gap", worst}});
        }
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<double> row{t[i]};
        for (std::size_t k = 0; k < lin.size(); ++k) {
            row.push_back(lin[k][i].n);
            row.push_back(lin[k][i].q);
            if (with_exact) {
                row.push_back(ex[k][i].mean);
                row.push_back(ex[k][i].q);
            }
        }
        out.table.add_row(row);
    }
    out.meta["diagnostics"] = {{"runs", diag}};
    return out;
}

inline ScenarioOutput run_multimode(const json& cfg, const DeviceParams& dev) {
    const json& b = cfg["multimode"];
    bool as_decay = b["tail_as_decay"].get<bool>();
    auto runs = runs_of(cfg, dev);
    auto t = time_grid(cfg, 0, 0);
    MomentOptions mo;
    mo.rtol = b["rtol"].get<double>();
    mo.atol = 1e-9;
    ScenarioOutput out;
    out.table.columns = {evolution_column(cfg)};
    std::vector<std::vector<MultimodeSample>> res;
    json diag = json::array();
    for (const auto& r : runs) {
        DeviceParams d = dev;
        d.gamma1 = r.gamma1;
        d.tail_couplings.assign(std::size_t(r.tail_length), cfg["device"]["tail_coupling"].get<double>());
        int modes = as_decay ? 3 : 3 + r.tail_length;
        res.push_back(multimode_linearized(d, s_minus_coherent(d, modes, r.n0), t, as_decay, mo));
        out.table.columns.push_back("n_minus_" + r.label);
        out.table.columns.push_back("Q_" + r.label);
        std::vector<double> q;
        for (const auto& s : res.back()) q.push_back(s.q_minus);
        auto p = plateau_of(t, q, b["plateau_threshold"].get<double>());
        diag.push_back({{"run", r.label},
                        {"modes", modes},
                        {"plateau_level", p.level},
                        {"plateau_start", p.start},
                        {"plateau_duration", p.duration},
                        {"min_Q", p.min_q}});
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<double> row{t[i]};
        for (const auto& s : res) {
            row.push_back(s[i].n_minus);
            row.push_back(s[i].q_minus);
        }
        out.table.add_row(row);
    }
    out.meta["diagnostics"] = {{"runs", diag}};
    return out;
}

inline ScenarioOutput run_trajectories(const json& cfg, const DeviceParams& dev) {
    const json& b = cfg["trajectories"];
    ModelSpec m = build_model(model_kind(b["model"]), dev, dims_of(b, "trajectories"),
                              b["basis"] == "collective" ? Basis::Collective : Basis::Modal);
    auto obs = observables_of(b, m);
    CVec psi = initial_state(cfg, m, dev, 1e-6);
    auto dr = derived_rates(dev);
    auto n0s = n0_list(cfg);
    auto t = time_grid(cfg, dr.gamma3, n0s.empty() ? 0.0 : n0s.front());
    TrajectoryConfig tc;
    tc.model = &m;
    tc.psi0 = psi;
    tc.n_traj = b["n_traj"].get<int>();
    tc.seed = cfg["seed"].get<std::uint64_t>();
    tc.t_grid = t;
    tc.threads = cfg["threads"].get<int>();
    tc.rtol = b["rtol"].get<double>();
    tc.atol = tc.rtol * 1e-2;
    auto r = mcwf_evolve(tc, obs);
    ScenarioOutput out;
    out.table.columns = {evolution_column(cfg)};
    for (const auto& o : obs)
        for (const char* p : {"n_", "n_se_", "Q_", "Q_se_"}) out.table.columns.push_back(p + o);
    std::vector<DiagonalSample> dg;
    bool cmp = b["compare_diagonal"].get<bool>();
    if (cmp) {
        if (n0s.size() != 1) throw ConfigError("compare_diagonal needs one initial.n0");
        dg = q_trajectory(n0s.front(), {dev.gamma1, dr.gamma2, dr.gamma3}, t);
        out.table.columns.push_back("n_diag");
        out.table.columns.push_back("Q_diag");
    }
    double z_n = 0, z_q = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<double> row{t[i]};
        for (const auto& s : r.obs) {
            row.insert(row.end(), {s.n_mean[i], s.n_se[i], s.q[i], s.q_se[i]});
        }
        if (cmp) {
            row.push_back(dg[i].mean);
            row.push_back(dg[i].q);
            std::size_t k = std::size_t(std::find(obs.begin(), obs.end(), "s_minus") - obs.begin());
            if (k < obs.size() && i > 0) {
                z_n = std::max(z_n, std::abs(r.obs[k].n_mean[i] - dg[i].mean) / r.obs[k].n_se[i]);
                z_q = std::max(z_q, std::abs(r.obs[k].q[i] - dg[i].q) / r.obs[k].q_se[i]);
            }
        }
        out.table.add_row(row);
    }
    out.meta["diagnostics"] = {{"n_traj", r.n_traj}, {"seed", r.seed}, {"jumps", r.jumps}, {"dims", m.dims},
                               {"modes", m.mode_names}};
    if (cmp) out.meta["diagnostics"]["max_z_n"] = z_n, out.meta["diagnostics"]["max_z_Q"] = z_q;
    return out;
}

inline ScenarioOutput run_nlse(const json& cfg) {
    const json& b = cfg["nlse"];
    NclDevice d;
    d.g_a = b["g_a_per_m"].get<double>();
    d.g_b = b["g_b_per_m"].get<double>();
    d.g_c = b["g_c_per_m"].get<double>();
    d.tail = b["tail_length"].get<int>();
    d.gamma_nl = b["gamma_nl_per_W_m"].get<double>();
    d.beta2 = b["beta2_s2_per_m"].get<double>();
    d.alpha = b["alpha_per_m"].get<double>();
    d.lambda0 = b["lambda0_m"].get<double>();
    d.fwhm_s = b["fwhm_s"].get<double>();
    d.length_m = b["length_m"].get<double>();
    d.n_samples = b["n_samples"].get<int>();
    d.window_fwhm = b["window_fwhm"].get<double>();
    d.self_steepening = b["self_steepening"].get<bool>();
    d.z_samples = b["z_samples"].get<int>();
    NlseOptions o;
    o.step_fraction = b["step_fraction"].get<double>();
    o.dz = b["dz_m"].get<double>();
    auto curves = ncl_signature(d, b["energies_J"].get<std::vector<double>>(), o);
    ScenarioOutput out;
    out.table.columns = {"z_m"};
    json diag = json::array();
    for (const auto& c : curves) {
        auto lab = label_number(c.energy_J * 1e12) + "pJ";
        out.table.columns.push_back("n_minus_" + lab);
        double drift = 0;
        for (double e : c.energy) drift = std::max(drift, std::abs(e / c.energy.front() - 1.0));
        diag.push_back({{"energy_J", c.energy_J},
                        {"n_minus_initial", c.n_minus.front()},
                        {"n_minus_decay_fraction", c.n_minus.front() > 0 ? 1 - c.n_minus.back() / c.n_minus.front() : 0.0},
                        {"spectral_fwhm_initial_m", c.fwhm0_m},
                        {"spectral_fwhm_final_m", c.fwhm1_m},
                        {"max_energy_drift", drift},
                        {"dz_m", c.dz}});
    }
    for (std::size_t i = 0; i < curves.front().z.size(); ++i) {
        std::vector<double> row{curves.front().z[i]};
        for (const auto& c : curves) row.push_back(c.n_minus[i]);
        out.table.add_row(row);
    }
    out.meta["diagnostics"] = {{"curves", diag}};
    return out;
}

inline PlatformSpec platform_of(const json& cfg) {
    const json& f = cfg["feasibility"];
    json p = json::object();
    auto name = f["preset"].get<std::string>();
    if (!name.empty()) {
        if (!platform_presets().contains(name)) throw ConfigError("unknown preset " + name);
        p = platform_presets()[name];
    }
    if (cfg.contains("platform")) p.merge_patch(cfg["platform"]);
    detail::check(p, config_schema()["properties"]["platform"], "platform");
    PlatformSpec s;
    s.name = p.value("name", name);
    s.lambda_m = require(p, "lambda_m", "platform").get<double>();
    s.n_eff = require(p, "n_eff", "platform").get<double>();
    s.T_eff_s = p.value("T_eff_s", s.T_eff_s);
    if (p.contains("n2_m2_per_W")) s.n2_m2_per_W = p["n2_m2_per_W"].get<double>();
    if (p.contains("A_eff_m2")) s.A_eff_m2 = p["A_eff_m2"].get<double>();
    if (p.contains("gamma_nl_per_W_m")) s.gamma_nl_per_W_m = p["gamma_nl_per_W_m"].get<double>();
    s.loss_db_per_m = p.value("loss_db_per_m", 0.0);
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("platform: ") + e.what());
    }
    return s;
}

inline json feasibility_json(const FeasibilityReport& f) {
    return {{"U", f.U},         {"gamma1", f.gamma1},     {"Gamma", f.Gamma},   {"gamma2", f.gamma2},
            {"gamma3", f.gamma3}, {"n0_Y1", f.n0_Y1},     {"energy_J", f.energy_J}, {"X", f.X},
            {"Q", f.Q},         {"g_a", f.g_a},           {"g_b", f.g_b},       {"gamma_c", f.gamma_c}};
}

inline ScenarioOutput run_feasibility(const json& cfg) {
    const json& b = cfg["feasibility"];
    auto p = platform_of(cfg);
    std::optional<double> gc;
    if (b.contains("gamma_c_per_m")) gc = b["gamma_c_per_m"].get<double>();
    double L = b["length_m"].get<double>();
    auto rep = feasibility_report(p, b["g_a_per_m"].get<double>(), L, gc);
    ScenarioOutput out;
    out.table.columns = {"z_m", "X", "Q", "n_mean"};
    for (double z : linspace(0.0, L, b["samples"].get<std::size_t>())) {
        double X = rep.gamma3 * rep.n0_Y1 * rep.n0_Y1 * z;
        out.table.add_row({z, X, q_of_x(X), n_of_x(rep.n0_Y1, X)});
    }
    out.meta["report"] = feasibility_json(rep);
    out.meta["report"]["platform"] = p.name;
    out.meta["report"]["length_m"] = L;
    return out;
}

}  // namespace detail

// Validates, fills defaults and returns the config every output is derived from.
inline json resolve_config(const json& user) {
    validate_config(user);
    json r = detail::solver_defaults(user["solver"].get<std::string>());
    r.merge_patch(user);
    validate_config(r);
    return r;
}

inline ScenarioOutput run_scenario(const json& user) {
    json cfg = resolve_config(user);
    auto solver = cfg["solver"].get<std::string>();
    ScenarioOutput out;
    json rates = nullptr;
    if (solver == "nlse")
        out = detail::run_nlse(cfg);
    else if (solver == "feasibility")
        out = detail::run_feasibility(cfg);
    else {
        DeviceParams dev;
        try {
            dev = detail::device_of(cfg["device"]);
            dev.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("device: ") + e.what());
        }
        if (solver != "exact" || cfg["exact"]["task"] != "pair_generation")
            rates = detail::rates_json(detail::rates_of(cfg["device"], dev, dev.gamma1));
        if (solver == "exact") out = detail::run_exact(cfg, dev);
        if (solver == "diagonal") out = detail::run_diagonal(cfg, dev);
        if (solver == "analytics") out = detail::run_analytics(cfg, dev);
        if (solver == "linearized") out = detail::run_linearized(cfg, dev);
        if (solver == "multimode") out = detail::run_multimode(cfg, dev);
        if (solver == "trajectories") out = detail::run_trajectories(cfg, dev);
        cfg["device"]["g_b"] = dev.g_b;
        cfg["device"].erase("optimal_ratio");
        if (dev.gamma_c < 0 && !cfg["device"].contains("Gamma")) {
            try {
                cfg["device"]["gamma_c"] = dev.resolved_gamma_c();
            } catch (const std::invalid_argument&) {
            }
        }
    }
    out.meta["config"] = cfg;
    out.meta["derived_rates"] = rates;
    out.meta["code_version"] = code_version;
    out.meta["seed"] = cfg["seed"];
    out.meta["columns"] = out.table.columns;
    return out;
}

// A sidecar carries the resolved config; accept it in place of a config.
inline json config_from_document(const json& doc) {
    if (doc.is_object() && doc.contains("code_version") && doc.contains("config")) return doc["config"];
    return doc;
}

}  // namespace phog
