#include <doctest.h>

#include <limtdd/dd.hpp>

#include "support.hpp"

using namespace limtdd;

namespace {

const double kS = 1.0 / (2.0 * std::sqrt(2.0));
const cplx kI(0.0, 1.0);

ManagerConfig cfg(Mode m, std::uint32_t n, StabMode s = StabMode::fast) {
    ManagerConfig c;
    c.mode = m;
    c.precision = m == Mode::tdd ? 0 : n;
    c.stab = s;
    return c;
}

std::vector<std::string> names(std::size_t r, const std::string& prefix = "i") {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < r; ++i) v.push_back(prefix + std::to_string(i));
    return v;
}

LimWeight random_lim(std::mt19937_64& rng, std::uint32_t N, std::size_t rank) {
    std::uniform_real_distribution<double> mag(0.2, 2.0), ang(0.0, 1.0);
    return LimWeight(mag(rng), ang(rng), ref::random_xp(rng, N, rank));
}

// Every (mode, precision, stab) combination the property tests sweep.
std::vector<ManagerConfig> all_configs() {
    std::vector<ManagerConfig> out = {cfg(Mode::tdd, 0)};
    for (std::uint32_t n : {1u, 2u, 4u, 8u}) {
        out.push_back(cfg(Mode::limtdd, n, StabMode::fast));
        out.push_back(cfg(Mode::limtdd, n, StabMode::full));
    }
    return out;
}

DenseTensor example_state() {
    return DenseTensor({"x3", "x2", "x1"}, {kS, kS, kS, -kS, -kS * kI, kS * kI, -kS, -kS});
}

}  // namespace

TEST_CASE("three-qubit example state") {
    DDManager m(cfg(Mode::limtdd, 8));
    const Diagram f = m.generate(example_state());
    CHECK(m.size(f) == 4);
    CHECK(m.indices(f) == std::vector<std::string>{"x3", "x2", "x1"});
    // tower: each node points twice to the same child
    NodeId v = f.node;
    for (int level = 0; level < 3; ++level) {
        CHECK(m.node(v).lo == m.node(v).hi);
        v = m.node(v).lo;
    }
    CHECK(v == kTerminal);
    CHECK(dense_max_diff(m.to_tensor(f), example_state()) < 1e-12);

    const DenseTensor s1 = m.to_tensor(m.slice(f, "x3", 1));
    const std::vector<cplx> want = {-kS * kI, kS * kI, -kS, -kS};
    for (int i = 0; i < 4; ++i) CHECK(std::abs(s1.data[i] - want[i]) < 1e-12);

    const std::uint8_t b000[3] = {0, 0, 0}, b100[3] = {1, 0, 0};
    CHECK(std::abs(m.amplitude_bits(f, b000) - kS) < 1e-12);
    CHECK(std::abs(m.amplitude_bits(f, b100) + kS * kI) < 1e-12);
    CHECK(std::abs(m.amplitude(f, {{"x3", 0}, {"x2", 1}, {"x1", 1}}) + kS) < 1e-12);

    const std::string dot = m.export_dot(f);
    CHECK(dot.find("digraph") != std::string::npos);
}

TEST_CASE("loc_norm basics") {
    DDManager m(cfg(Mode::limtdd, 8));
    const std::uint32_t x = m.order().ensure("x");
    const Diagram plus = m.loc_norm(x, m.constant(1.0), m.constant(1.0));
    const Diagram minus = m.loc_norm(x, m.constant(1.0), m.constant(-1.0));
    CHECK(plus.node == minus.node);
    CHECK(m.weight(minus).op() == XPOperator(8, 0, {0}, {4}));
    CHECK(std::abs(m.weight(minus).magnitude() - 1.0) < 1e-12);

    // a zero branch always lands on the low side
    const Diagram lo_only = m.loc_norm(x, m.constant(2.0), m.zero(0));
    const Diagram hi_only = m.loc_norm(x, m.zero(0), m.constant(3.0));
    CHECK(lo_only.node == hi_only.node);
    CHECK(m.node(hi_only.node).lo_zero);
    CHECK(m.weight(lo_only).op() == XPOperator(8, 0, {1}, {0}));
    CHECK(std::abs(m.weight(hi_only).magnitude() - 3.0) < 1e-12);

    const Diagram z = m.loc_norm(x, m.zero(0), m.zero(0));
    CHECK(z.is_zero());
    CHECK(m.size(z) == 1);

    DDManager t(cfg(Mode::tdd, 0));
    const std::uint32_t tx = t.order().ensure("x");
    CHECK(t.loc_norm(tx, t.constant(1.0), t.constant(1.0)).node !=
          t.loc_norm(tx, t.constant(1.0), t.constant(-1.0)).node);

    const std::uint32_t y = m.order().ensure("y");
    const Diagram below = m.loc_norm(y, m.constant(1.0), m.constant(2.0));
    CHECK_THROWS_AS(m.loc_norm(y, below, below), DDError);
    CHECK_THROWS_AS(m.loc_norm(x, below, m.constant(1.0)), DDError);
}

TEST_CASE("generate and read back") {
    std::mt19937_64 rng(1);
    for (const auto& c : all_configs()) {
        DDManager m(c);
        for (int it = 0; it < 40; ++it) {
            const std::size_t r = rng() % 6;
            const DenseTensor t = random_tensor(names(r), rng());
            const Diagram f = m.generate(t);
            CHECK(dense_max_diff(m.to_tensor(f), t) < 1e-9);
            CHECK(m.generate(t) == f);
        }
    }
}

TEST_CASE("sparse and structured tensors read back") {
    std::mt19937_64 rng(2);
    for (const auto& c : all_configs()) {
        DDManager m(c);
        for (int it = 0; it < 40; ++it) {
            DenseTensor t = random_tensor(names(4), rng());
            // knock out entries and snap others to roots of unity
            for (auto& v : t.data) {
                const auto roll = rng() % 4;
                if (roll == 0) v = 0.0;
                if (roll == 1) v = ref::omega(8, std::int64_t(rng() % 16));
            }
            const Diagram f = m.generate(t);
            CHECK(dense_max_diff(m.to_tensor(f), t) < 1e-9);
        }
    }
}

TEST_CASE("slice, add and contract agree with the dense versions") {
    std::mt19937_64 rng(3);
    const auto pool = names(5, "v");
    for (const auto& c : all_configs()) {
        DDManager m(c);
        auto registered = pool;
        m.order().sort(registered);
        for (int it = 0; it < 25; ++it) {
            std::vector<std::string> ia, ib, shared;
            for (const auto& n : pool) {
                switch (rng() % 3) {
                    case 0: ia.push_back(n); break;
                    case 1: ib.push_back(n); break;
                    default:
                        ia.push_back(n);
                        ib.push_back(n);
                        shared.push_back(n);
                }
            }
            const DenseTensor a = random_tensor(ia, rng()), b = random_tensor(ib, rng());
            const Diagram fa = m.generate(a), fb = m.generate(b);

            if (!ia.empty()) {
                const std::string& x = ia[rng() % ia.size()];
                const int v = int(rng() % 2);
                CHECK(dense_max_diff(m.to_tensor(m.slice(fa, x, v)), dense_slice(a, x, v)) < 1e-9);
            }
            CHECK(dense_max_diff(m.to_tensor(m.add(fa, fb)), dense_add(a, b)) < 1e-9);

            std::vector<std::string> var;
            for (const auto& n : shared)
                if (rng() & 1) var.push_back(n);
            CHECK(dense_max_diff(m.to_tensor(m.contract(fa, fb, var)), dense_contract(a, b, var)) < 1e-9);
        }
    }
}

TEST_CASE("addition edge cases") {
    DDManager m(cfg(Mode::limtdd, 4));
    const DenseTensor a = random_tensor({"p", "q"}, 11);
    const Diagram fa = m.generate(a);
    const Diagram neg = m.scale(-1.0, fa);
    const Diagram sum = m.add(fa, neg);
    CHECK(sum.is_zero());
    CHECK(m.indices(sum) == std::vector<std::string>{"p", "q"});
    CHECK(m.add(fa, m.zero(fa.set)) == fa);
    CHECK(dense_max_diff(m.to_tensor(m.add(fa, fa)), dense_scale(a, 2.0)) < 1e-12);
}

TEST_CASE("weights applied to diagrams") {
    std::mt19937_64 rng(4);
    for (std::uint32_t N : {1u, 2u, 4u, 8u}) {
        DDManager m(cfg(Mode::limtdd, N));
        for (int it = 0; it < 30; ++it) {
            const DenseTensor t = random_tensor(names(3), rng());
            const LimWeight w = random_lim(rng, N, 3);
            CHECK(dense_max_diff(m.to_tensor(m.apply(w, m.generate(t))), dense_apply_lim(w, t)) < 1e-9);
        }
    }
}

TEST_CASE("normalization rewrites") {
    std::mt19937_64 rng(5);
    for (std::uint32_t N : {2u, 4u, 8u}) {
        for (StabMode s : {StabMode::fast, StabMode::full}) {
            DDManager m(cfg(Mode::limtdd, N, s));
            const std::uint32_t x = m.order().ensure("x");
            for (int it = 0; it < 30; ++it) {
                const Diagram f0 = m.generate(random_tensor({"a", "b"}, rng()));
                const Diagram f1 = m.generate(random_tensor({"a", "b"}, rng()));
                const Diagram d = m.loc_norm(x, f0, f1);
                const LimWeight w = m.weight(d);

                // a common LIM on both children moves onto the incoming edge
                const LimWeight o = random_lim(rng, N, 2);
                const Diagram d1 = m.loc_norm(x, m.apply(o, f0), m.apply(o, f1));
                CHECK(d1.node == d.node);
                const LimWeight lifted(o.magnitude(), o.angle(), xp_tensor(xp_identity(N, 1), o.op()));
                CHECK(lim_equal(m.weight(d1), lim_mul(lifted, w)));

                // an even phase on the high child becomes P^k on top
                const std::int64_t k = std::int64_t(rng() % N);
                const Diagram d2 = m.loc_norm(x, f0, m.scale(ref::omega(N, 2 * k), f1));
                CHECK(d2.node == d.node);
                const LimWeight pk(1.0, 0.0, XPOperator(N, 0, {0, 0, 0}, {std::uint32_t(k), 0, 0}));
                CHECK(lim_equal(m.weight(d2), lim_mul(pk, w)));

                // swapping the children puts X on top
                const Diagram d3 = m.loc_norm(x, f1, f0);
                CHECK(d3.node == d.node);
                const LimWeight xw(1.0, 0.0, XPOperator(N, 0, {1, 0, 0}, {0, 0, 0}));
                CHECK(lim_equal(m.weight(d3), lim_mul(xw, w)));
            }
        }
    }
}

TEST_CASE("top slices renormalize to the same diagram") {
    std::mt19937_64 rng(6);
    for (const auto& c : all_configs()) {
        DDManager m(c);
        for (int it = 0; it < 30; ++it) {
            const auto idx = names(1 + rng() % 4);
            const Diagram f = m.generate(random_tensor(idx, rng()));
            const std::uint32_t top = m.order().position(idx[0]);
            const Diagram g = m.loc_norm(top, m.slice_pos(f, top, 0), m.slice_pos(f, top, 1));
            CHECK(g.node == f.node);
            CHECK(lim_equal(m.weight(g), m.weight(f)));
        }
    }
}

TEST_CASE("equivalent tensors share a root in full mode") {
    std::mt19937_64 rng(7);
    for (std::uint32_t N : {1u, 2u, 4u}) {
        DDManager m(cfg(Mode::limtdd, N, StabMode::full));
        for (int it = 0; it < 40; ++it) {
            const std::size_t r = 1 + rng() % 3;
            const DenseTensor t = random_tensor(names(r), rng());
            const LimWeight o = random_lim(rng, N, r);
            CHECK(m.generate(t).node == m.generate(dense_apply_lim(o, t)).node);
        }
    }
}

TEST_CASE("scalar multiples share a root in every mode") {
    std::mt19937_64 rng(8);
    for (const auto& c : all_configs()) {
        DDManager m(c);
        for (int it = 0; it < 20; ++it) {
            const DenseTensor t = random_tensor(names(3), rng());
            const cplx s = std::polar(0.5 + double(rng() % 100) / 50.0, double(rng() % 1000) / 100.0);
            CHECK(m.generate(t).node == m.generate(dense_scale(t, s)).node);
        }
    }
}

TEST_CASE("sizes") {
    DDManager m(cfg(Mode::limtdd, 4));
    CHECK(m.size(m.zero(m.set_of_names({"a", "b"}))) == 1);
    CHECK(m.size(m.constant(2.0)) == 1);

    // product states form a tower
    DenseTensor prod = DenseTensor::scalar(1.0);
    std::mt19937_64 rng(9);
    const auto idx = names(5, "t");
    for (const auto& n : idx) {
        const DenseTensor q({n}, {cplx(double(rng() % 7) + 1.0, 0.5), cplx(0.25, double(rng() % 5))});
        prod = dense_contract(prod, q, {});
    }
    CHECK(m.size(m.generate(prod)) == 6);

    const DenseTensor ones({"a", "b", "c"}, std::vector<cplx>(8, 1.0));
    CHECK(m.size(m.generate(ones)) == 4);
    DDManager t(cfg(Mode::tdd, 0));
    CHECK(t.size(t.generate(ones)) == 1);
    const DenseTensor half({"a", "b"}, {1.0, 1.0, 2.0, 3.0});
    CHECK(t.size(t.generate(half)) == 3);
}

TEST_CASE("random tensors are no larger than in a plain TDD") {
    std::mt19937_64 rng(10);
    for (int it = 0; it < 30; ++it) {
        const DenseTensor t = random_tensor(names(1 + rng() % 5), rng());
        DDManager td(cfg(Mode::tdd, 0));
        std::size_t prev = td.size(td.generate(t));
        for (std::uint32_t N : {1u, 2u, 4u, 8u}) {
            DDManager lm(cfg(Mode::limtdd, N, StabMode::full));
            const std::size_t s = lm.size(lm.generate(t));
            CHECK(s <= prev);
            prev = s;
        }
    }
}

TEST_CASE("structurally equal nodes are shared") {
    DDManager m(cfg(Mode::limtdd, 2));
    const DenseTensor t = random_tensor({"a", "b", "c"}, 12);
    const Diagram f = m.generate(t);
    const std::size_t before = m.node_count();
    const Diagram g = m.generate(dense_permute(t, {"c", "b", "a"}));
    CHECK(g == f);
    CHECK(m.node_count() == before);

    // checkpoint tracks a running maximum
    m.reset_peak();
    CHECK(m.checkpoint(f) == m.size(f));
    m.checkpoint(m.constant(1.0));
    CHECK(m.peak_nodes() == m.size(f));
}
