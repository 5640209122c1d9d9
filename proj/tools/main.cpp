#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <limtdd/simulate.hpp>

#include "report.hpp"

using namespace limtdd;

namespace {

struct Source {
    std::string file;
    std::string gen;
    int n = 0;
    std::uint64_t seed = 0;
    int gates = 400;
    double t_prob = 0.02;

    Circuit load() const {
        if (!file.empty() && !gen.empty()) throw CLI::ValidationError("give either a QASM file or --gen, not both");
        if (!file.empty()) return load_qasm_file(file);
        if (gen.empty()) throw CLI::ValidationError("missing circuit: give a QASM file or --gen");
        if (n < 1) throw CLI::ValidationError("--gen needs --n >= 1");
        return generate_named(gen, n, seed, gates, t_prob);
    }
};

struct Engine {
    std::string mode = "limtdd";
    std::uint32_t precision = 8;
    std::string stab = "fast";
    std::size_t stab_cap = 512;

    ManagerConfig config() const {
        ManagerConfig cfg;
        cfg.mode = parse_mode(mode);
        cfg.precision = precision;
        cfg.stab = parse_stab_mode(stab);
        cfg.stab_cap = stab_cap;
        return cfg;
    }
};

void source_flags(CLI::App* cmd, Source& src) {
    cmd->add_option("file", src.file, "OpenQASM 2.0 input");
    cmd->add_option("--gen", src.gen, "built-in generator")
        ->check(CLI::IsMember({"ghz", "qft", "fig9", "remark2", "cliffordt"}));
    cmd->add_option("--n", src.n, "generator size");
    cmd->add_option("--seed", src.seed, "generator seed");
    cmd->add_option("--gates", src.gates, "gate count for cliffordt");
    cmd->add_option("--t-prob", src.t_prob, "T probability for cliffordt")->check(CLI::Range(0.0, 1.0));
}

void engine_flags(CLI::App* cmd, Engine& e) {
    cmd->add_option("--mode", e.mode, "tdd or limtdd")->check(CLI::IsMember({"tdd", "limtdd"}));
    cmd->add_option("--precision", e.precision, "XP precision N (power of two)");
    cmd->add_option("--stab", e.stab, "stabilizer mode")->check(CLI::IsMember({"fast", "full"}));
    cmd->add_option("--stab-cap", e.stab_cap, "largest enumerated stabilizer group");
}

void print_report(const cli::RunReport& r, const std::string& format) {
    if (format == "csv") {
        std::cout << cli::kCsvHeader << '\n' << cli::report_csv_row(0, r) << '\n';
    } else {
        std::cout << cli::report_to_json(r) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LimTDD circuit simulation and functionality construction"};
    app.require_subcommand(1);
    std::string format = "json";
    app.add_option("--report", format, "output format")->check(CLI::IsMember({"json", "csv"}));

    Source src;
    Engine eng;
    bool verify = false;
    std::size_t amplitudes = 0;

    auto* sim = app.add_subcommand("sim", "simulate a circuit on |0...0>");
    source_flags(sim, src);
    engine_flags(sim, eng);
    sim->add_flag("--verify", verify, "compare with the dense simulator");
    sim->add_option("--amplitudes", amplitudes, "print the first k basis amplitudes");

    auto* func = app.add_subcommand("func", "build the circuit unitary");
    source_flags(func, src);
    engine_flags(func, eng);
    func->add_flag("--verify", verify, "compare with the dense unitary");

    cli::BenchSpec bench_spec;
    bench_spec.threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::string> bench_modes = {"tdd", "limtdd"};
    std::string bench_stab = "fast";
    auto* bench = app.add_subcommand("bench", "seeded random-circuit benchmark");
    bench->add_option("--gen", bench_spec.generator, "generator")
        ->check(CLI::IsMember({"ghz", "qft", "fig9", "remark2", "cliffordt"}));
    bench->add_option("--runs", bench_spec.runs, "runs per cell")->check(CLI::PositiveNumber);
    bench->add_option("--seed", bench_spec.seed, "seed of run 0");
    bench->add_option("--qubits", bench_spec.qubits, "qubit count")->check(CLI::PositiveNumber);
    bench->add_option("--gates", bench_spec.gates, "gates per circuit");
    bench->add_option("--t-prob", bench_spec.t_prob, "T probability")->check(CLI::Range(0.0, 1.0));
    bench->add_option("--precisions", bench_spec.precisions, "precision list")->delimiter(',');
    bench->add_option("--modes", bench_modes, "mode list")->delimiter(',')->check(CLI::IsMember({"tdd", "limtdd"}));
    bench->add_option("--stab", bench_stab, "stabilizer mode")->check(CLI::IsMember({"fast", "full"}));
    bench->add_option("--threads", bench_spec.threads, "worker threads")->check(CLI::PositiveNumber);

    std::string out_path;
    std::string what = "state";
    auto* dot = app.add_subcommand("export-dot", "write a diagram as Graphviz DOT");
    source_flags(dot, src);
    engine_flags(dot, eng);
    dot->add_option("-o,--out", out_path, "output path")->required();
    dot->add_option("--what", what, "state or functionality")->check(CLI::IsMember({"state", "functionality"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed() || func->parsed()) {
            const std::string cmd = sim->parsed() ? "sim" : "func";
            const Circuit c = src.load();
            std::optional<std::uint64_t> seed;
            if (src.gen == "cliffordt") seed = src.seed;
            const cli::RunReport r = cli::run_circuit(cmd, c, eng.config(), verify, seed);
            print_report(r, format);
            if (amplitudes) {
                DDManager mgr(eng.config());
                const CircuitRun run = simulate(c, 0, mgr);
                const auto amps = state_amplitudes(mgr, run, amplitudes);
                for (std::size_t i = 0; i < amps.size(); ++i)
                    std::cout << i << ' ' << amps[i].real() << ' ' << amps[i].imag() << '\n';
            }
            return 0;
        }
        if (bench->parsed()) {
            bench_spec.modes.clear();
            for (const auto& m : bench_modes) bench_spec.modes.push_back(parse_mode(m));
            bench_spec.stab = parse_stab_mode(bench_stab);
            const auto cells = cli::run_bench(bench_spec);
            if (format == "csv") {
                cli::bench_to_csv(std::cout, cells);
            } else {
                std::cout << cli::bench_to_json(bench_spec, cells) << '\n';
            }
            return 0;
        }
        if (dot->parsed()) {
            const Circuit c = src.load();
            DDManager mgr(eng.config());
            const CircuitRun run = what == "state" ? simulate(c, 0, mgr) : functionality(c, mgr);
            const std::string text = mgr.export_dot(run.result);
            std::ofstream out(out_path);
            if (!out || !(out << text) || !out.flush()) {
                std::cerr << "error: cannot write '" << out_path << "'\n";
                return 1;
            }
            return 0;
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
