#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "phog/scenario.hpp"

namespace fs = std::filesystem;
using namespace phog;

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const char* const fig_ids[] = {"3a", "3b", "3c", "3d", "4a", "4b", "6", "7", "8a", "8b", "9"};

json read_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    json doc = json::parse(ss.str(), nullptr, false);
    if (doc.is_discarded()) throw ConfigError(p.string() + ": not valid JSON");
    return doc;
}

void write_text(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(p, std::ios::binary);
    if (!out || !(out << text) || !out.flush()) throw IoError("cannot write " + p.string());
}

fs::path config_dir() {
    if (const char* env = std::getenv("PHOG_CONFIG_DIR")) return env;
#ifdef PHOG_CONFIG_DIR
    return PHOG_CONFIG_DIR;
#else
    return "configs";
#endif
}

struct Common {
    std::string out;
    long long seed = -1;
    int threads = 0;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--out", c.out, "CSV output path; a .json sidecar is written next to it");
    sub->add_option("--seed", c.seed, "RNG seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--override", c.overrides, "dot-path assignment, e.g. device.gamma1=20");
}

// Applies flags, runs, writes CSV (stdout when no path and csv_to_stdout) and the sidecar.
ScenarioOutput execute(json cfg, const Common& c, std::string default_out, bool csv_to_stdout = true) {
    cfg = config_from_document(cfg);
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& o : c.overrides) apply_override(cfg, o);
    if (c.seed >= 0) cfg["seed"] = c.seed;
    if (c.threads > 0) cfg["threads"] = c.threads;
    std::string path = !c.out.empty() ? c.out : cfg.value("output", default_out);
    cfg.erase("output");
    auto res = run_scenario(cfg);
    auto csv = to_csv(res.table);
    if (path.empty() || path == "-") {
        if (csv_to_stdout) std::cout << csv;
        return res;
    }
    fs::path p(path);
    write_text(p, csv);
    fs::path side = p;
    side.replace_extension(".json");
    write_text(side, res.meta.dump(2) + "\n");
    std::cerr << "wrote " << p.string() << " and " << side.string() << "\n";
    return res;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Photon-gun device simulator"};
    app.require_subcommand(1);

    Common rc, fc, gc;
    std::string config_path;
    auto* run = app.add_subcommand("run", "run a scenario config (or a previous sidecar)");
    run->add_option("--config", config_path, "scenario JSON")->required();
    add_common(run, rc);

    std::string preset = "bulk-glass";
    double g_a = 200, length = 0.03;
    auto* feas = app.add_subcommand("feasibility", "platform feasibility report");
    feas->add_option("--preset", preset, "bulk-glass, fiber or nanowire");
    feas->add_option("--g-a", g_a, "coupling g_a in 1/m")->check(CLI::PositiveNumber);
    feas->add_option("--length", length, "device length in m")->check(CLI::PositiveNumber);
    add_common(feas, fc);

    std::string fig_id;
    auto* fig = app.add_subcommand("fig", "reproduce a figure from its canned config");
    fig->add_option("--id", fig_id, "figure id")->required()->check(CLI::IsMember(std::vector<std::string>(
        std::begin(fig_ids), std::end(fig_ids))));
    add_common(fig, gc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run) {
            execute(read_json(config_path), rc, "");
        } else if (*feas) {
            json cfg = {{"solver", "feasibility"},
                        {"feasibility", {{"preset", preset}, {"g_a_per_m", g_a}, {"length_m", length}}}};
            auto res = execute(cfg, fc, "", false);
            const auto& r = res.meta["report"];
            std::cout << "platform " << r["platform"].get<std::string>() << "\n";
            for (const char* k : {"U", "gamma1", "Gamma", "gamma2", "gamma3", "n0_Y1", "energy_J", "X", "Q"})
                std::cout << "  " << k << " = " << format_double(r[k].get<double>()) << "\n";
        } else if (*fig) {
            fs::path p = config_dir() / ("fig" + fig_id + ".json");
            execute(read_json(p), gc, "fig" + fig_id + ".csv");
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
