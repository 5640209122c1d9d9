#pragma once

// Independent reference code for the tests. Nothing here calls into the
// library's dense or XP routines, so the checks cannot share a bug with the
// code under test.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <limtdd/xp_operator.hpp>

namespace ref {

using cplx = std::complex<double>;
using Mat = std::vector<std::vector<cplx>>;

inline cplx omega(std::uint32_t N, std::int64_t k) {
    if (N == 0) return 1.0;
    return std::polar(1.0, std::numbers::pi * double(k) / double(N));
}

inline Mat eye(std::size_t d) {
    Mat m(d, std::vector<cplx>(d));
    for (std::size_t i = 0; i < d; ++i) m[i][i] = 1.0;
    return m;
}

inline Mat matmul(const Mat& a, const Mat& b) {
    const std::size_t d = a.size();
    Mat r(d, std::vector<cplx>(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k)
            if (a[i][k] != cplx{})
                for (std::size_t j = 0; j < d; ++j) r[i][j] += a[i][k] * b[k][j];
    return r;
}

inline Mat kron(const Mat& a, const Mat& b) {
    const std::size_t da = a.size(), db = b.size();
    Mat r(da * db, std::vector<cplx>(da * db));
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j < da; ++j)
            for (std::size_t k = 0; k < db; ++k)
                for (std::size_t l = 0; l < db; ++l) r[i * db + k][j * db + l] = a[i][j] * b[k][l];
    return r;
}

/// w^p (X^x0 P^z0) (x) ... built from 2x2 blocks; factor 0 most significant.
inline Mat xp_matrix(std::uint32_t N, std::int64_t p, const std::vector<int>& x, const std::vector<int>& z) {
    Mat m = {{omega(N, p)}};
    for (std::size_t i = 0; i < x.size(); ++i) {
        Mat X = x[i] ? Mat{{0, 1}, {1, 0}} : eye(2);
        Mat P = {{1, 0}, {0, omega(N, 2 * std::int64_t(z[i]))}};
        m = kron(m, matmul(X, P));
    }
    return m;
}

inline Mat xp_matrix(const limtdd::XPOperator& a) {
    std::vector<int> x, z;
    for (std::size_t i = 0; i < a.rank(); ++i) {
        x.push_back(a.x(i));
        z.push_back(int(a.z(i)));
    }
    return xp_matrix(a.precision(), a.phase(), x, z);
}

inline double max_diff(const Mat& a, const Mat& b) {
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) e = std::max(e, std::abs(a[i][j] - b[i][j]));
    return e;
}

inline double max_diff(const limtdd::CMatrix& a, const Mat& b) {
    double e = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) e = std::max(e, std::abs(a(i, j) - b[i][j]));
    return e;
}

inline std::vector<cplx> matvec(const Mat& m, const std::vector<cplx>& v) {
    std::vector<cplx> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) r[i] += m[i][j] * v[j];
    return r;
}

inline limtdd::XPOperator random_xp(std::mt19937_64& rng, std::uint32_t N, std::size_t rank) {
    std::uniform_int_distribution<std::int64_t> p(0, 2 * std::int64_t(N) - 1);
    std::uniform_int_distribution<int> bit(0, 1);
    std::uniform_int_distribution<std::uint32_t> zd(0, N - 1);
    std::vector<std::uint8_t> x(rank);
    std::vector<std::uint32_t> z(rank);
    for (std::size_t i = 0; i < rank; ++i) {
        x[i] = std::uint8_t(bit(rng));
        z[i] = zd(rng);
    }
    return limtdd::XPOperator(N, p(rng), x, z);
}

/// Every operator of rank r at precision N: 2N * 2^r * N^r of them.
inline void for_each_xp(std::uint32_t N, std::size_t rank, const std::function<void(const limtdd::XPOperator&)>& f) {
    std::size_t count = 1;
    for (std::size_t i = 0; i < rank; ++i) count *= 2 * N;
    for (std::int64_t p = 0; p < 2 * std::int64_t(N); ++p)
        for (std::size_t c = 0; c < count; ++c) {
            std::vector<std::uint8_t> x(rank);
            std::vector<std::uint32_t> z(rank);
            std::size_t r = c;
            for (std::size_t i = 0; i < rank; ++i) {
                x[i] = std::uint8_t(r % 2);
                r /= 2;
                z[i] = std::uint32_t(r % N);
                r /= N;
            }
            f(limtdd::XPOperator(N, p, x, z));
        }
}

/// All operators O with O v == v, by exhaustive scan.
inline std::vector<limtdd::XPOperator> brute_stabilizers(const std::vector<cplx>& v, std::uint32_t N,
                                                         std::size_t rank, double tol = 1e-9) {
    std::vector<limtdd::XPOperator> out;
    for_each_xp(N, rank, [&](const limtdd::XPOperator& o) {
        const auto w = matvec(xp_matrix(o), v);
        double e = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) e = std::max(e, std::abs(w[i] - v[i]));
        if (e < tol) out.push_back(o);
    });
    return out;
}

/// A named tensor as a map from full assignments to values.
struct Table {
    std::vector<std::string> idx;
    std::vector<cplx> data;  // idx[0] most significant

    cplx get(const std::map<std::string, int>& a) const {
        std::size_t pos = 0;
        for (const auto& n : idx) pos = (pos << 1) | std::size_t(a.at(n));
        return data[pos];
    }
};

/// Sum over `var` of a*b by enumeration of every index in play. Result
/// indices: union minus var, in `out` order.
inline std::vector<cplx> einsum(const Table& a, const Table& b, const std::vector<std::string>& var,
                                const std::vector<std::string>& out) {
    std::vector<cplx> r(std::size_t{1} << out.size());
    for (std::size_t o = 0; o < r.size(); ++o) {
        for (std::size_t s = 0; s < (std::size_t{1} << var.size()); ++s) {
            std::map<std::string, int> asg;
            for (std::size_t i = 0; i < out.size(); ++i) asg[out[i]] = int((o >> (out.size() - 1 - i)) & 1u);
            for (std::size_t i = 0; i < var.size(); ++i) asg[var[i]] = int((s >> i) & 1u);
            r[o] += a.get(asg) * b.get(asg);
        }
    }
    return r;
}

}  // namespace ref
