#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <limtdd/circuit.hpp>
#include <limtdd/dd.hpp>

namespace limtdd::cli {

struct RunReport {
    std::string command;
    std::string circuit;
    int n_qubits = 0;
    std::size_t n_gates = 0;
    std::uint32_t precision = 0;
    std::string mode;
    std::string stab_mode;
    std::optional<std::uint64_t> seed;
    std::size_t final_nodes = 0;
    std::size_t peak_nodes = 0;
    double wall_time_ms = 0.0;
    /// Max-abs deviation from the dense simulator, when verified.
    std::optional<double> fidelity_vs_oracle;
};

std::string report_to_json(const RunReport& r, int indent = 2);
RunReport report_from_json(const std::string& text);

inline constexpr const char* kCsvHeader = "run,seed,mode,precision,final_nodes,peak_nodes,time_ms";
std::string report_csv_row(std::size_t run, const RunReport& r);

/// Simulates (or builds the functionality of) c in a fresh manager.
/// verify compares against the dense simulator; throws when the circuit is
/// too wide for it.
RunReport run_circuit(const std::string& command, const Circuit& c, const ManagerConfig& cfg, bool verify,
                      std::optional<std::uint64_t> seed = {});

struct BenchCell {
    std::string mode;
    std::uint32_t precision = 0;
    std::vector<RunReport> runs;
    double mean_peak = 0.0;
    double median_peak = 0.0;
    double mean_final = 0.0;
    double mean_time_ms = 0.0;
};

struct BenchSpec {
    std::string generator = "cliffordt";
    int runs = 10;
    std::uint64_t seed = 0;
    int qubits = 10;
    int gates = 400;
    double t_prob = 0.02;
    std::vector<std::uint32_t> precisions = {8};
    std::vector<Mode> modes = {Mode::tdd, Mode::limtdd};
    StabMode stab = StabMode::fast;
    unsigned threads = 1;
};

/// One cell per (mode, precision); tdd mode gets a single cell. Run i uses
/// seed + i. Runs are spread over `threads` workers, one manager per run.
std::vector<BenchCell> run_bench(const BenchSpec& spec);

std::string bench_to_json(const BenchSpec& spec, const std::vector<BenchCell>& cells);
void bench_to_csv(std::ostream& os, const std::vector<BenchCell>& cells);

}  // namespace limtdd::cli
