#include "report.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <limtdd/simulate.hpp>

namespace limtdd::cli {

using nlohmann::json;

std::string report_to_json(const RunReport& r, int indent) {
    json j = {{"command", r.command},         {"circuit", r.circuit},     {"n_qubits", r.n_qubits},
              {"n_gates", r.n_gates},         {"precision", r.precision}, {"mode", r.mode},
              {"stab_mode", r.stab_mode},     {"final_nodes", r.final_nodes},
              {"peak_nodes", r.peak_nodes},   {"wall_time_ms", r.wall_time_ms}};
    j["seed"] = r.seed ? json(*r.seed) : json(nullptr);
    j["fidelity_vs_oracle"] = r.fidelity_vs_oracle ? json(*r.fidelity_vs_oracle) : json(nullptr);
    return j.dump(indent);
}

RunReport report_from_json(const std::string& text) {
    const json j = json::parse(text);
    RunReport r;
    r.command = j.at("command").get<std::string>();
    r.circuit = j.at("circuit").get<std::string>();
    r.n_qubits = j.at("n_qubits").get<int>();
    r.n_gates = j.at("n_gates").get<std::size_t>();
    r.precision = j.at("precision").get<std::uint32_t>();
    r.mode = j.at("mode").get<std::string>();
    r.stab_mode = j.at("stab_mode").get<std::string>();
    if (!j.at("seed").is_null()) r.seed = j["seed"].get<std::uint64_t>();
    r.final_nodes = j.at("final_nodes").get<std::size_t>();
    r.peak_nodes = j.at("peak_nodes").get<std::size_t>();
    r.wall_time_ms = j.at("wall_time_ms").get<double>();
    if (!j.at("fidelity_vs_oracle").is_null()) r.fidelity_vs_oracle = j["fidelity_vs_oracle"].get<double>();
    return r;
}

std::string report_csv_row(std::size_t run, const RunReport& r) {
    std::ostringstream os;
    os << run << ',' << (r.seed ? std::to_string(*r.seed) : std::string()) << ',' << r.mode << ',' << r.precision
       << ',' << r.final_nodes << ',' << r.peak_nodes << ',' << r.wall_time_ms;
    return os.str();
}

namespace {

double state_error(DDManager& mgr, const CircuitRun& run, const Circuit& c) {
    const auto want = dense_simulate(c, 0);
    const auto got = state_amplitudes(mgr, run, want.size());
    double err = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i) err = std::max(err, std::abs(want[i] - got[i]));
    return err;
}

double unitary_error(DDManager& mgr, const CircuitRun& run, const Circuit& c) {
    const CMatrix u = dense_unitary(c);
    const std::size_t n = std::size_t(c.n_qubits);
    const std::size_t dim = std::size_t{1} << n;
    // result indices interleave (out, in) per qubit, highest qubit first
    std::vector<std::uint8_t> bits(2 * n);
    double err = 0.0;
    for (std::size_t row = 0; row < dim; ++row)
        for (std::size_t col = 0; col < dim; ++col) {
            for (std::size_t i = 0; i < n; ++i) {
                bits[2 * i] = std::uint8_t((row >> (n - 1 - i)) & 1u);
                bits[2 * i + 1] = std::uint8_t((col >> (n - 1 - i)) & 1u);
            }
            err = std::max(err, std::abs(u(row, col) - mgr.amplitude_bits(run.result, bits)));
        }
    return err;
}

}  // namespace

RunReport run_circuit(const std::string& command, const Circuit& c, const ManagerConfig& cfg, bool verify,
                      std::optional<std::uint64_t> seed) {
    const bool func = command == "func";
    if (verify && c.n_qubits > (func ? int(kDenseRankCap) / 2 : int(kDenseRankCap)))
        throw DenseError("--verify needs at most " + std::to_string(func ? kDenseRankCap / 2 : kDenseRankCap) +
                         " qubits");
    DDManager mgr(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const CircuitRun run = func ? functionality(c, mgr) : simulate(c, 0, mgr);
    const auto t1 = std::chrono::steady_clock::now();

    RunReport r;
    r.command = command;
    r.circuit = c.name;
    r.n_qubits = c.n_qubits;
    r.n_gates = c.gates.size();
    r.precision = mgr.precision();
    r.mode = to_string(cfg.mode);
    r.stab_mode = to_string(cfg.stab);
    r.seed = seed;
    r.final_nodes = mgr.size(run.result);
    r.peak_nodes = std::max(mgr.peak_nodes(), r.final_nodes);
    r.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    if (verify) r.fidelity_vs_oracle = func ? unitary_error(mgr, run, c) : state_error(mgr, run, c);
    return r;
}

std::vector<BenchCell> run_bench(const BenchSpec& spec) {
    std::vector<BenchCell> cells;
    for (Mode m : spec.modes) {
        if (m == Mode::tdd) {
            cells.push_back(BenchCell{to_string(m), 0, {}});
            continue;
        }
        for (auto p : spec.precisions) cells.push_back(BenchCell{to_string(m), p, {}});
    }
    for (auto& cell : cells) cell.runs.resize(std::size_t(spec.runs));

    const std::size_t total = cells.size() * std::size_t(spec.runs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t job; (job = next++) < total;) {
            BenchCell& cell = cells[job / std::size_t(spec.runs)];
            const std::size_t i = job % std::size_t(spec.runs);
            const std::uint64_t seed = spec.seed + i;
            const Circuit c = generate_named(spec.generator, spec.qubits, seed, spec.gates, spec.t_prob);
            ManagerConfig cfg;
            cfg.mode = parse_mode(cell.mode);
            cfg.precision = cell.precision;
            cfg.stab = spec.stab;
            cell.runs[i] = run_circuit("bench", c, cfg, false, seed);
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(spec.threads, unsigned(total)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (auto& cell : cells) {
        std::vector<double> peaks;
        for (const auto& r : cell.runs) {
            peaks.push_back(double(r.peak_nodes));
            cell.mean_final += double(r.final_nodes);
            cell.mean_time_ms += r.wall_time_ms;
        }
        const double k = double(cell.runs.size());
        for (double p : peaks) cell.mean_peak += p;
        cell.mean_peak /= k;
        cell.mean_final /= k;
        cell.mean_time_ms /= k;
        std::sort(peaks.begin(), peaks.end());
        const std::size_t h = peaks.size() / 2;
        cell.median_peak = peaks.size() % 2 ? peaks[h] : 0.5 * (peaks[h - 1] + peaks[h]);
    }
    return cells;
}

std::string bench_to_json(const BenchSpec& spec, const std::vector<BenchCell>& cells) {
    json out = {{"generator", spec.generator}, {"runs", spec.runs},   {"seed", spec.seed},
                {"qubits", spec.qubits},       {"gates", spec.gates}, {"t_prob", spec.t_prob},
                {"stab_mode", to_string(spec.stab)}};
    out["cells"] = json::array();
    for (const auto& cell : cells) {
        json c = {{"mode", cell.mode},
                  {"precision", cell.precision},
                  {"mean_peak_nodes", cell.mean_peak},
                  {"median_peak_nodes", cell.median_peak},
                  {"mean_final_nodes", cell.mean_final},
                  {"mean_time_ms", cell.mean_time_ms}};
        c["runs"] = json::array();
        for (const auto& r : cell.runs) c["runs"].push_back(json::parse(report_to_json(r, -1)));
        out["cells"].push_back(std::move(c));
    }
    return out.dump(2);
}

void bench_to_csv(std::ostream& os, const std::vector<BenchCell>& cells) {
    os << kCsvHeader << '\n';
    for (const auto& cell : cells)
        for (std::size_t i = 0; i < cell.runs.size(); ++i) os << report_csv_row(i, cell.runs[i]) << '\n';
}

}  // namespace limtdd::cli
