#include <doctest.h>

#include <Eigen/Dense>
#include <limtdd/lim_weight.hpp>

#include "support.hpp"

using namespace limtdd;

namespace {

XPOperator xp(std::uint32_t N, std::int64_t p, std::vector<std::uint8_t> x, std::vector<std::uint32_t> z) {
    return XPOperator(N, p, std::move(x), std::move(z));
}

Eigen::MatrixXcd to_eigen(const ref::Mat& m) {
    Eigen::MatrixXcd e(m.size(), m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) e(i, j) = m[i][j];
    return e;
}

bool reduced(const XPOperator& a) {
    const std::uint32_t N = a.precision();
    if (a.phase() >= 2 * N) return false;
    for (std::size_t i = 0; i < a.rank(); ++i)
        if (a.x(i) > 1 || a.z(i) >= N) return false;
    return true;
}

LimWeight random_weight(std::mt19937_64& rng, std::uint32_t N, std::size_t rank) {
    std::uniform_real_distribution<double> mag(0.1, 3.0), ang(0.0, 1.0);
    return LimWeight(mag(rng), ang(rng), ref::random_xp(rng, N, rank));
}

ref::Mat lim_matrix(const LimWeight& w) {
    ref::Mat m = ref::xp_matrix(w.op());
    const cplx s = w.scalar();
    for (auto& row : m)
        for (auto& v : row) v *= s;
    return m;
}

}  // namespace

TEST_CASE("identity operator") {
    const XPOperator id = xp_identity(8, 2);
    CHECK(id == xp(8, 0, {0, 0}, {0, 0}));
    CHECK(to_string(id) == "XP_8(0|00|0,0)");
    CHECK(ref::max_diff(xp_to_dense(xp_identity(8, 1)), ref::eye(2)) == 0.0);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 20; ++i) {
        const XPOperator a = ref::random_xp(rng, 8, 3);
        CHECK(xp_mul(xp_identity(8, 3), a) == a);
        CHECK(xp_mul(a, xp_identity(8, 3)) == a);
    }
}

TEST_CASE("components are reduced on construction") {
    const XPOperator a = xp(4, 11, {3}, {9});
    CHECK(a.phase() == 3);
    CHECK(a.x(0) == 1);
    CHECK(a.z(0) == 1);
    CHECK(xp(4, -1, {0}, {0}).phase() == 7);
    CHECK(xp(8, 0, {1, 0}, {2, 3}) != xp(8, 0, {1, 0}, {2, 4}));
}

TEST_CASE("multiplication examples") {
    CHECK(xp_mul(xp(8, 0, {1}, {0}), xp(8, 0, {0}, {1})) == xp(8, 0, {1}, {1}));
    const ref::Mat XP = ref::matmul(ref::Mat{{0, 1}, {1, 0}}, ref::Mat{{1, 0}, {0, ref::omega(8, 2)}});
    CHECK(ref::max_diff(xp_to_dense(xp(8, 0, {1}, {1})), XP) < 1e-12);
    // -I squared
    CHECK(xp_mul(xp(8, 8, {0}, {0}), xp(8, 8, {0}, {0})) == xp_identity(8, 1));
}

TEST_CASE("mismatched operands are rejected") {
    CHECK_THROWS_AS(xp_mul(xp_identity(8, 1), xp_identity(8, 2)), XPError);
    CHECK_THROWS_AS(xp_mul(xp_identity(4, 1), xp_identity(8, 1)), XPError);
}

TEST_CASE("inverse examples") {
    CHECK(xp_inverse(xp_identity(8, 2)) == xp_identity(8, 2));
    CHECK(xp_inverse(xp(8, 0, {0}, {4})) == xp(8, 0, {0}, {4}));
    std::mt19937_64 rng(2);
    for (std::uint32_t N : {2u, 4u, 8u})
        for (int i = 0; i < 100; ++i) {
            const XPOperator a = ref::random_xp(rng, N, 3);
            CHECK(xp_mul(a, xp_inverse(a)) == xp_identity(N, 3));
            CHECK(xp_mul(xp_inverse(a), a) == xp_identity(N, 3));
        }
}

TEST_CASE("antisymmetric correction operator") {
    const std::vector<std::int64_t> zero = {0, 0}, two = {2};
    CHECK(xp_antisym(8, zero) == xp(8, 0, {0, 0}, {0, 0}));
    CHECK(xp_antisym(8, two) == xp(8, 2, {0}, {6}));
    // closes the product rule: XP(u1) XP(u2) = XP(u1 + u2) D(2 x2 z1)
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const XPOperator a = ref::random_xp(rng, 8, 3), b = ref::random_xp(rng, 8, 3);
        std::vector<std::uint8_t> x(3);
        std::vector<std::uint32_t> z(3);
        std::vector<std::int64_t> corr(3);
        for (int j = 0; j < 3; ++j) {
            x[j] = a.x(j) ^ b.x(j);
            z[j] = a.z(j) + b.z(j);
            corr[j] = 2 * std::int64_t(b.x(j)) * a.z(j);
        }
        const XPOperator sum = xp(8, std::int64_t(a.phase()) + b.phase(), x, z);
        const ref::Mat lhs = ref::matmul(ref::xp_matrix(a), ref::xp_matrix(b));
        const ref::Mat rhs = ref::matmul(ref::xp_matrix(sum), ref::xp_matrix(xp_antisym(8, corr)));
        CHECK(ref::max_diff(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("dense realization examples") {
    CHECK(ref::max_diff(xp_to_dense(xp(8, 0, {1}, {0})), ref::Mat{{0, 1}, {1, 0}}) == 0.0);
    CHECK(ref::max_diff(xp_to_dense(xp(8, 0, {0}, {2})), ref::Mat{{1, 0}, {0, cplx(0, 1)}}) < 1e-15);
    CHECK(ref::max_diff(xp_to_dense(xp(8, 4, {0}, {0})), ref::Mat{{cplx(0, 1), 0}, {0, cplx(0, 1)}}) < 1e-15);
}

TEST_CASE("group laws on random operators") {
    std::mt19937_64 rng(4);
    for (std::uint32_t N : {1u, 2u, 4u, 8u})
        for (int i = 0; i < 50; ++i) {
            const XPOperator a = ref::random_xp(rng, N, 3), b = ref::random_xp(rng, N, 3),
                             c = ref::random_xp(rng, N, 3);
            CHECK(xp_mul(xp_mul(a, b), c) == xp_mul(a, xp_mul(b, c)));
            CHECK(xp_mul(a, xp_identity(N, 3)) == a);
        }
}

TEST_CASE("products and inverses agree with dense matrices") {
    std::mt19937_64 rng(5);
    for (std::uint32_t N : {1u, 2u, 4u, 8u})
        for (std::size_t rank = 0; rank <= 4; ++rank)
            for (int i = 0; i < 20; ++i) {
                const XPOperator a = ref::random_xp(rng, N, rank), b = ref::random_xp(rng, N, rank);
                const XPOperator ab = xp_mul(a, b);
                CHECK(reduced(ab));
                CHECK(ref::max_diff(ref::xp_matrix(ab), ref::matmul(ref::xp_matrix(a), ref::xp_matrix(b))) < 1e-12);
                CHECK(ref::max_diff(xp_to_dense(a), ref::xp_matrix(a)) < 1e-12);
                const XPOperator inv = xp_inverse(a);
                CHECK(reduced(inv));
                const Eigen::MatrixXcd want = to_eigen(ref::xp_matrix(a)).inverse();
                CHECK((to_eigen(ref::xp_matrix(inv)) - want).cwiseAbs().maxCoeff() < 1e-12);
            }
}

TEST_CASE("transpose matches the dense transpose") {
    std::mt19937_64 rng(6);
    for (std::uint32_t N : {2u, 4u, 8u})
        for (int i = 0; i < 50; ++i) {
            const XPOperator a = ref::random_xp(rng, N, 3);
            const ref::Mat m = ref::xp_matrix(a);
            ref::Mat t = m;
            for (std::size_t r = 0; r < m.size(); ++r)
                for (std::size_t c = 0; c < m.size(); ++c) t[r][c] = m[c][r];
            CHECK(ref::max_diff(ref::xp_matrix(xp_transpose(a)), t) < 1e-12);
        }
}

TEST_CASE("tensor, select, embed and drop") {
    const XPOperator a = xp(8, 3, {1}, {2}), b = xp(8, 5, {0, 1}, {1, 7});
    const XPOperator ab = xp_tensor(a, b);
    CHECK(ab == xp(8, 8, {1, 0, 1}, {2, 1, 7}));
    CHECK(ref::max_diff(ref::xp_matrix(ab), ref::kron(ref::xp_matrix(a), ref::xp_matrix(b))) < 1e-12);
    const std::vector<std::uint32_t> pos = {0, 2};
    CHECK(ab.select(pos) == xp(8, 0, {1, 1}, {2, 7}));
    CHECK(xp(8, 0, {1, 1}, {2, 7}).embed(3, pos) == xp(8, 0, {1, 0, 1}, {2, 0, 7}));
    CHECK(ab.drop_top() == xp(8, 8, {0, 1}, {1, 7}));
    CHECK(ab.drop_top().prepend(1, 2) == ab);
}

TEST_CASE("precision zero is the scalar group") {
    const XPOperator a = xp(0, 5, {1, 1}, {3, 4});
    CHECK(a.is_identity());
    CHECK(xp_mul(a, a).is_identity());
    CHECK(xp_inverse(a).is_identity());
}

TEST_CASE("weight canonical form") {
    std::mt19937_64 rng(7);
    for (std::uint32_t N : {1u, 2u, 4u, 8u})
        for (int i = 0; i < 100; ++i) {
            const LimWeight w = random_weight(rng, N, 2);
            CHECK(w.angle() >= 0.0);
            CHECK(w.angle() < 1.0 / (2.0 * N));
            const LimWeight again(w.magnitude(), w.angle(), w.op());
            CHECK(lim_equal(again, w));
            CHECK(again.op() == w.op());
        }
    const LimWeight neg(-2.0, 0.0, xp_identity(8, 1));
    CHECK(neg.magnitude() == doctest::Approx(2.0));
    CHECK(neg.op().phase() == 8);
    CHECK(LimWeight::zero(8, 2).op().is_identity());
    CHECK(LimWeight::zero(8, 2).is_zero());
    CHECK(LimWeight(0.0, 0.3, xp(8, 3, {1, 0}, {1, 1})).op().is_identity());
}

TEST_CASE("weight product and inverse") {
    const LimWeight a(0.5, 0.0, xp(8, 2, {1}, {3}));
    const LimWeight b(2.0, 0.0, xp_identity(8, 1));
    const LimWeight ab = lim_mul(a, b);
    CHECK(ab.magnitude() == doctest::Approx(1.0));
    CHECK(ab.angle() == doctest::Approx(0.0));
    CHECK(ab.op() == xp(8, 2, {1}, {3}));
    CHECK_THROWS(lim_inverse(LimWeight::zero(8, 1)));

    std::mt19937_64 rng(8);
    for (std::uint32_t N : {2u, 4u, 8u})
        for (int i = 0; i < 50; ++i) {
            const LimWeight u = random_weight(rng, N, 2), v = random_weight(rng, N, 2);
            CHECK(lim_mul(u, lim_inverse(u)).is_unit());
            CHECK(ref::max_diff(lim_to_dense(lim_mul(u, v)), ref::matmul(lim_matrix(u), lim_matrix(v))) < 1e-12);
        }
}

TEST_CASE("weight order") {
    const LimWeight z4(1.0, 0.0, xp(8, 0, {0}, {4}));
    CHECK(lim_compare(z4, z4) == std::strong_ordering::equal);
    // -i folds to phase 12 with zero residual angle; the phase breaks the tie
    const LimWeight minus_i = LimWeight::from_complex(cplx(0, -1), xp(8, 0, {0}, {4}));
    CHECK(minus_i.angle() == doctest::Approx(0.0));
    CHECK(minus_i.op().phase() == 12);
    CHECK(lim_compare(z4, minus_i) == std::strong_ordering::less);
    CHECK(lim_compare(LimWeight(1.0, 0.0, xp(8, 0, {0}, {7})), LimWeight(1.0, 0.0, xp(8, 0, {1}, {0}))) ==
          std::strong_ordering::less);

    std::mt19937_64 rng(9);
    std::vector<LimWeight> ws;
    for (int i = 0; i < 40; ++i) ws.push_back(random_weight(rng, 4, 1));
    for (const auto& a : ws)
        for (const auto& b : ws) {
            CHECK((lim_compare(a, b) < 0) == (lim_compare(b, a) > 0));
            for (const auto& c : ws)
                if (lim_compare(a, b) < 0 && lim_compare(b, c) < 0) CHECK(lim_compare(a, c) < 0);
        }
}

TEST_CASE("phase extraction") {
    const auto minus_one = phase_extract(LimWeight::from_complex(-1.0, xp_identity(8, 1)));
    CHECK(minus_one.k == 4);
    CHECK(minus_one.residual.coefficient().real() == doctest::Approx(1.0));
    const auto i_split = phase_extract(LimWeight::from_complex(cplx(0, 1), xp_identity(8, 1)));
    CHECK(i_split.k == 2);
    CHECK(std::abs(i_split.residual.coefficient() - 1.0) < 1e-12);
    const LimWeight plain(1.5, 0.0, xp(8, 0, {1}, {3}));
    const auto same = phase_extract(plain);
    CHECK(same.k == 0);
    CHECK(lim_equal(same.residual, plain));

    std::mt19937_64 rng(10);
    for (std::uint32_t N : {1u, 2u, 4u, 8u})
        for (int i = 0; i < 100; ++i) {
            const LimWeight w = random_weight(rng, N, 2);
            const auto s = phase_extract(w);
            CHECK(s.residual.combined_angle() >= 0.0);
            CHECK(s.residual.combined_angle() < 1.0 / N + 1e-12);
            ref::Mat m = lim_matrix(s.residual);
            for (auto& row : m)
                for (auto& v : row) v *= ref::omega(N, 2 * s.k);
            CHECK(ref::max_diff(m, lim_matrix(w)) < 1e-12);
        }
}

TEST_CASE("split into factor groups") {
    const std::vector<std::uint32_t> first = {0};
    const auto id = lim_split(LimWeight::unit(8, 3), first);
    CHECK(id.on_part.is_unit());
    CHECK(id.off_part.is_unit());

    const LimWeight w(0.7, 0.01, xp(8, 5, {1, 0, 1}, {2, 3, 4}));
    const auto s = lim_split(w, first);
    CHECK(s.on_part.op().x() == std::vector<std::uint8_t>{1, 0, 0});
    CHECK(s.on_part.op().z() == std::vector<std::uint32_t>{2, 0, 0});
    CHECK(s.off_part.op().z() == std::vector<std::uint32_t>{0, 3, 4});
    CHECK(s.off_part.magnitude() == doctest::Approx(1.0));

    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int i = 0; i < 100; ++i) {
        const LimWeight u = random_weight(rng, 4, 3);
        std::vector<std::uint32_t> part;
        for (std::uint32_t j = 0; j < 3; ++j)
            if (bit(rng)) part.push_back(j);
        const auto p = lim_split(u, part);
        CHECK(ref::max_diff(ref::matmul(lim_matrix(p.on_part), lim_matrix(p.off_part)), lim_matrix(u)) < 1e-12);
    }
}

TEST_CASE("angle folding") {
    auto [k, rest] = fold_angle(0.75, 8);
    CHECK(k == 12);
    CHECK(rest == doctest::Approx(0.0));
    auto [k2, rest2] = fold_angle(1.0 / 16 - 1e-13, 8);
    CHECK(k2 == 1);
    CHECK(rest2 == 0.0);
    auto [k3, rest3] = fold_angle(0.3, 0);
    CHECK(k3 == 0);
    CHECK(rest3 == doctest::Approx(0.3));
    CHECK(to_string(LimWeight(1.0, 0.0, xp(8, 2, {1, 0}, {3, 0}))).find("XP_8(2|10|3,0)") != std::string::npos);
}
