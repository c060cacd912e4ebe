#include "pppci/ci.hpp"
#include "pppci/error.hpp"
#include "pppci/measure_spec.hpp"
#include "pppci/sim.hpp"
#include "pppci/suites.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifndef PPPCI_BUILD_ID
#define PPPCI_BUILD_ID "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pppci;

namespace {

constexpr int kExitHolds = 0;
constexpr int kExitFails = 1;
constexpr int kExitAssumption = 2;
constexpr int kExitConfig = 64;
constexpr int kExitDisagree = 70;

struct Options {
    std::string config;
    std::string measure;
    std::string query;
    std::optional<int> depth;
    std::size_t replicates = 100000;
    std::uint64_t seed = 20261014;
    std::string out = "pppci-out";
    std::vector<std::string> windows;
    std::string suite;
    std::string mode = "depth";
    std::size_t dumps = 1;
    std::size_t block = 10000;
    std::size_t random_measures = 100;
};

std::string fnv_digest(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

// Values given in --config fill in whatever was not set on the command line.
void merge_config(Options& o, const CLI::App& cmd) {
    if (o.config.empty()) return;
    std::ifstream in(o.config);
    if (!in) throw ConfigError("cannot open config '" + o.config + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    auto unset = [&](const char* flag) { return cmd.count(flag) == 0; };
    try {
        if (j.contains("measure") && unset("--measure"))
            o.measure = j["measure"].is_string() ? j["measure"].get<std::string>() : j["measure"].dump();
        if (j.contains("query") && unset("--query")) o.query = j["query"].get<std::string>();
        if (j.contains("depth") && unset("--depth")) o.depth = j["depth"].get<int>();
        if (j.contains("replicates") && unset("--replicates")) o.replicates = j["replicates"].get<std::size_t>();
        if (j.contains("seed") && unset("--seed")) o.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("out") && unset("--out")) o.out = j["out"].get<std::string>();
        if (j.contains("windows") && unset("--window")) o.windows = j["windows"].get<std::vector<std::string>>();
        if (j.contains("suite") && unset("--suite")) o.suite = j["suite"].get<std::string>();
        if (j.contains("mode") && unset("--mode")) o.mode = j["mode"].get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

json resolved_config(const std::string& command, const Options& o) {
    json j = {{"command", command}, {"seed", o.seed}, {"replicates", o.replicates}};
    if (!o.measure.empty()) j["measure"] = load_measure_spec(o.measure);
    if (!o.query.empty()) j["query"] = o.query;
    if (o.depth) j["depth"] = *o.depth;
    if (!o.windows.empty()) j["windows"] = o.windows;
    if (!o.suite.empty()) j["suite"] = o.suite;
    if (command == "simulate") {
        j["mode"] = o.mode;
        j["dumps"] = o.dumps;
        j["block"] = o.block;
    }
    if (command == "verify") j["random_measures"] = o.random_measures;
    return j;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2) << '\n';
}

void write_manifest(const Options& o, const json& config, const std::vector<std::string>& outputs) {
    fs::create_directories(o.out);
    json m = {{"config", config},
              {"config_digest", fnv_digest(config.dump())},
              {"seed", o.seed},
              {"build_id", PPPCI_BUILD_ID},
              {"outputs", outputs}};
    write_json(fs::path(o.out) / "manifest.json", m);
}

json witness_json(const CiWitness& w) {
    json j;
    switch (w.kind) {
        case CiWitness::Kind::Face:
            j = {{"kind", "face"}, {"face", w.face.to_string()}, {"mass", w.face_mass.to_string()}};
            break;
        case CiWitness::Kind::Rectangle:
            j = {{"kind", "rectangle"}, {"h", w.h}, {"v", w.v + 1}};
            break;
        case CiWitness::Kind::KernelCell:
            j = {{"kind", "kernel_cell"}, {"layer", w.h}};
            break;
    }
    if (w.kind != CiWitness::Kind::Face) {
        j["a"] = point_json(w.a);
        j["b"] = point_json(w.b);
        j["c"] = point_json(w.c);
        j["lhs"] = to_string(w.lhs);
        j["rhs"] = to_string(w.rhs);
    }
    j["description"] = w.describe();
    return j;
}

json verdict_json(const CiVerdict& v) {
    json j = {{"query", v.query.to_string()},
              {"method", to_string(v.method)},
              {"depth", v.depth},
              {"holds", v.holds},
              {"witness", nullptr},
              {"wall_time_ms", v.wall_time_ms}};
    if (v.witness) j["witness"] = witness_json(*v.witness);
    return j;
}

int cmd_check_ci(const Options& o) {
    if (o.measure.empty()) throw ConfigError("--measure is required");
    if (o.query.empty()) throw ConfigError("--query is required");
    int depth = o.depth.value_or(6);
    if (depth < 1) throw ConfigError("--depth must be >= 1");
    auto config = resolved_config("check-ci", o);
    auto m = load_measure(o.measure);
    auto q = CiQuery::parse(o.query, m.dims());

    json report;
    int code;
    try {
        auto rep = equivalence_crosscheck(m, q, depth);
        report = verdict_json(rep.kernel);
        report["agree"] = rep.agree;
        report["methods"] = {verdict_json(rep.definition), verdict_json(rep.reduced), verdict_json(rep.kernel)};
        code = !rep.agree ? kExitDisagree : rep.kernel.holds ? kExitHolds : kExitFails;
        std::cout << q.to_string() << " at depth H=" << depth << ": "
                  << (rep.kernel.holds ? "holds (no violation up to H)" : "fails") << '\n';
        for (const auto* v : {&rep.definition, &rep.reduced, &rep.kernel}) {
            std::cout << "  " << to_string(v->method) << ": " << (v->holds ? "holds" : "fails");
            if (v->witness) std::cout << "  witness " << v->witness->describe();
            std::cout << '\n';
        }
        if (!rep.agree) std::cout << "checkers disagree\n";
    } catch (const AssumptionViolation& e) {
        report = {{"query", q.to_string()}, {"method", nullptr}, {"depth", depth}, {"holds", nullptr},
                  {"witness", nullptr},     {"wall_time_ms", 0},   {"assumption_violation", e.what()}};
        std::cout << "assumption violation: " << e.what() << '\n';
        code = kExitAssumption;
    }
    fs::create_directories(o.out);
    write_json(fs::path(o.out) / "report.json", report);
    write_manifest(o, config, {"report.json"});
    return code;
}

int cmd_simulate(const Options& o) {
    if (o.measure.empty()) throw ConfigError("--measure is required");
    if (o.replicates < 1) throw ConfigError("--replicates must be >= 1");
    if (o.mode != "depth" && o.mode != "window") throw ConfigError("--mode must be depth or window");
    auto config = resolved_config("simulate", o);
    auto m = load_measure(o.measure);
    std::vector<Rectangle> windows;
    for (const auto& w : o.windows) {
        auto r = Rectangle::parse(w);
        if (r.dims() != m.dims()) throw ConfigError("window '" + w + "' has wrong dimension");
        windows.push_back(r);
    }

    PatternSampler sampler;
    int depth = o.depth.value_or(4);
    if (o.mode == "window") {
        if (windows.size() != 1) throw ConfigError("--mode window needs exactly one --window");
        auto ws = std::make_shared<WindowSampler>(m, windows.front());
        int dims = m.dims();
        sampler = [ws, dims](RandomSource& g) {
            PointPattern p;
            p.dims = dims;
            ws->sample_into(g, p.points);
            return p;
        };
    } else {
        if (depth < 0) throw ConfigError("--depth must be >= 0");
        auto ds = std::make_shared<DepthSampler>(m, depth);
        sampler = [ds](RandomSource& g) { return ds->sample(g); };
    }

    fs::create_directories(o.out);
    std::vector<std::string> outputs;
    RandomSource root(o.seed);
    for (std::size_t r = 0; r < std::min(o.dumps, o.replicates); ++r) {
        auto g = root.substream(r);
        auto p = sampler(g);
        p.seed = o.seed;
        if (o.mode == "depth") p.depth = depth;
        char name[32];
        std::snprintf(name, sizeof name, "pattern_%06zu.tsv", r);
        std::ofstream out(fs::path(o.out) / name);
        write_pattern(out, p, m.digest());
        outputs.push_back(name);
    }
    if (!windows.empty()) {
        auto counts = sample_counts(sampler, windows, o.replicates, o.seed, m.provenance());
        std::ofstream out(fs::path(o.out) / "counts.csv");
        write_count_csv(out, counts, o.block);
        outputs.push_back("counts.csv");
        for (std::size_t w = 0; w < windows.size(); ++w) {
            auto s = summarize(counts.column(w));
            std::cout << counts.windows[w] << " " << o.windows[w] << ": mean " << s.mean << " (stderr " << s.stderr_
                      << "), var " << s.var << '\n';
        }
    }
    write_manifest(o, config, outputs);
    std::cout << "wrote " << outputs.size() << " files to " << o.out << '\n';
    return kExitHolds;
}

int cmd_verify(const Options& o) {
    if (o.suite.empty()) throw ConfigError("--suite is required");
    std::vector<std::string> names;
    if (o.suite == "all") {
        names = suite_names();
    } else {
        auto known = suite_names();
        if (std::find(known.begin(), known.end(), o.suite) == known.end())
            throw ConfigError("unknown suite '" + o.suite + "'");
        names = {o.suite};
    }
    SuiteOptions so;
    so.replicates = o.replicates;
    so.seed = o.seed;
    so.random_measures = o.random_measures;
    if (o.depth) so.depth = *o.depth;
    auto config = resolved_config("verify", o);

    std::vector<SuiteResult> results;
    json report = json::array();
    bool pass = true;
    for (const auto& n : names) {
        auto r = run_suite(n, so);
        for (const auto& c : r.checks)
            std::cout << (c.pass ? "PASS " : "FAIL ") << r.suite << ": " << c.name << "  [" << c.detail << "]\n";
        std::cout << r.suite << ": " << (r.pass() ? "pass" : "fail") << " in " << std::fixed << std::setprecision(1)
                  << r.wall_ms / 1000 << " s\n";
        std::cout.unsetf(std::ios::fixed);
        pass = pass && r.pass();
        report.push_back({{"suite", r.suite}, {"pass", r.pass()}, {"wall_ms", r.wall_ms}, {"details", r.details}});
        results.push_back(std::move(r));
    }
    fs::create_directories(o.out);
    {
        std::ofstream out(fs::path(o.out) / "summary.csv");
        write_suite_csv(out, results);
    }
    write_json(fs::path(o.out) / "report.json", report);
    write_manifest(o, config, {"summary.csv", "report.json"});
    return pass ? kExitHolds : kExitFails;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conditional independence for infinite measures and Poisson processes"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_option("--config", o.config, "JSON file with default values for the flags");
        c->add_option("--measure", o.measure, "builtin:NAME, inline JSON or a spec file");
        c->add_option("--depth", o.depth, "truncation depth H");
        c->add_option("--seed", o.seed, "master seed");
        c->add_option("--out", o.out, "output directory");
    };
    auto* check = app.add_subcommand("check-ci", "decide a CI statement with all three checkers");
    common(check);
    check->add_option("--query", o.query, "\"A _|_ B | C\", 1-based comma-separated indices");

    auto* sim = app.add_subcommand("simulate", "sample the Poisson process, dump patterns and window counts");
    common(sim);
    sim->add_option("--replicates", o.replicates, "number of replicates N");
    sim->add_option("--window", o.windows, "count window, e.g. \"(1/2,inf);*;{0}\" (repeatable)");
    sim->add_option("--mode", o.mode, "depth (layers 1..H) or window (one finite-mass window)");
    sim->add_option("--dumps", o.dumps, "number of replicate patterns to write");
    sim->add_option("--block", o.block, "replicates per CSV block");

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    common(verify);
    verify->add_option("--suite", o.suite, "suite name or 'all'");
    verify->add_option("--replicates", o.replicates, "Monte-Carlo replicates");
    verify->add_option("--random-measures", o.random_measures, "random measures in the equivalence suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (check->parsed()) {
            merge_config(o, *check);
            return cmd_check_ci(o);
        }
        if (sim->parsed()) {
            merge_config(o, *sim);
            return cmd_simulate(o);
        }
        merge_config(o, *verify);
        return cmd_verify(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const AssumptionViolation& e) {
        std::cerr << "assumption violation: " << e.what() << '\n';
        return kExitAssumption;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const UndecidableMass& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDisagree;
    }
}
