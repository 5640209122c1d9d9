#include <benchmark/benchmark.h>

#include <limtdd/simulate.hpp>

using namespace limtdd;

namespace {

ManagerConfig config(std::int64_t precision, StabMode stab = StabMode::fast) {
    ManagerConfig c;
    if (precision == 0) {
        c.mode = Mode::tdd;
    } else {
        c.precision = std::uint32_t(precision);
    }
    c.stab = stab;
    return c;
}

std::vector<std::string> names(std::size_t r) {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < r; ++i) v.push_back("i" + std::to_string(i));
    return v;
}

// args: rank, precision (0 = tdd)
void BM_generate(benchmark::State& st) {
    const DenseTensor t = random_tensor(names(std::size_t(st.range(0))), 7);
    for (auto _ : st) {
        DDManager m(config(st.range(1)));
        benchmark::DoNotOptimize(m.generate(t));
    }
}
BENCHMARK(BM_generate)->ArgsProduct({{4, 8, 12}, {0, 8}});

void BM_add(benchmark::State& st) {
    const auto idx = names(std::size_t(st.range(0)));
    DDManager m(config(st.range(1)));
    const Diagram a = m.generate(random_tensor(idx, 1));
    const Diagram b = m.generate(random_tensor(idx, 2));
    for (auto _ : st) {
        m.clear_caches();
        benchmark::DoNotOptimize(m.add(a, b));
    }
}
BENCHMARK(BM_add)->ArgsProduct({{4, 8, 12}, {0, 8}});

void BM_contract(benchmark::State& st) {
    const std::size_t r = std::size_t(st.range(0));
    const auto all = names(2 * r);
    const std::vector<std::string> ia(all.begin(), all.begin() + std::ptrdiff_t(r + r / 2));
    const std::vector<std::string> ib(all.begin() + std::ptrdiff_t(r / 2), all.end());
    const std::vector<std::string> var(all.begin() + std::ptrdiff_t(r / 2), all.begin() + std::ptrdiff_t(r + r / 2));
    DDManager m(config(st.range(1)));
    const Diagram a = m.generate(random_tensor(ia, 3));
    const Diagram b = m.generate(random_tensor(ib, 4));
    for (auto _ : st) {
        m.clear_caches();
        benchmark::DoNotOptimize(m.contract(a, b, var));
    }
}
BENCHMARK(BM_contract)->ArgsProduct({{4, 6, 8}, {0, 8}});

// args: qubits, precision (0 = tdd)
void BM_simulate_cliffordt(benchmark::State& st) {
    const Circuit c = gen_random_cliffordt(int(st.range(0)), 400, 0.02, 11);
    std::size_t peak = 0;
    for (auto _ : st) {
        DDManager m(config(st.range(1)));
        benchmark::DoNotOptimize(simulate(c, 0, m).result);
        peak = m.peak_nodes();
    }
    st.counters["peak_nodes"] = double(peak);
}
BENCHMARK(BM_simulate_cliffordt)->ArgsProduct({{10}, {0, 2, 8}})->Unit(benchmark::kMillisecond);

void BM_qft_functionality(benchmark::State& st) {
    const int n = int(st.range(0));
    const Circuit c = gen_qft(n);
    std::size_t nodes = 0;
    for (auto _ : st) {
        DDManager m(config(std::int64_t{1} << n));
        const Diagram u = functionality(c, m).result;
        nodes = m.size(u);
    }
    st.counters["nodes"] = double(nodes);
}
BENCHMARK(BM_qft_functionality)->DenseRange(6, 12, 2)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
