#include "limtdd/xp_operator.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace limtdd {

namespace {

std::int64_t mod(std::int64_t v, std::int64_t m) {
    if (m <= 0) return 0;
    std::int64_t r = v % m;
    return r < 0 ? r + m : r;
}

void require_compatible(const XPOperator& a, const XPOperator& b, const char* what) {
    if (a.precision() != b.precision()) {
        throw XPError(std::string(what) + ": precision mismatch");
    }
    if (a.rank() != b.rank()) {
        throw XPError(std::string(what) + ": rank mismatch");
    }
}

}  // namespace

CMatrix CMatrix::identity(std::size_t d) {
    CMatrix m(d);
    for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix operator*(const CMatrix& lhs, const CMatrix& rhs) {
    CMatrix out(lhs.dim);
    for (std::size_t i = 0; i < lhs.dim; ++i) {
        for (std::size_t k = 0; k < lhs.dim; ++k) {
            const cplx v = lhs(i, k);
            if (v == cplx{}) continue;
            for (std::size_t j = 0; j < lhs.dim; ++j) out(i, j) += v * rhs(k, j);
        }
    }
    return out;
}

CMatrix kron(const CMatrix& lhs, const CMatrix& rhs) {
    CMatrix out(lhs.dim * rhs.dim);
    for (std::size_t i = 0; i < lhs.dim; ++i)
        for (std::size_t j = 0; j < lhs.dim; ++j)
            for (std::size_t k = 0; k < rhs.dim; ++k)
                for (std::size_t l = 0; l < rhs.dim; ++l)
                    out(i * rhs.dim + k, j * rhs.dim + l) = lhs(i, j) * rhs(k, l);
    return out;
}

double max_abs_diff(const CMatrix& lhs, const CMatrix& rhs) {
    if (lhs.dim != rhs.dim) return INFINITY;
    double m = 0.0;
    for (std::size_t i = 0; i < lhs.a.size(); ++i) m = std::max(m, std::abs(lhs.a[i] - rhs.a[i]));
    return m;
}

XPOperator::XPOperator(std::uint32_t precision, std::int64_t phase, std::vector<std::uint8_t> x,
                       std::vector<std::uint32_t> z)
    : precision_(precision), x_(std::move(x)), z_(std::move(z)) {
    if (x_.size() != z_.size()) throw XPError("XPOperator: x and z lengths differ");
    const std::int64_t n = precision_;
    phase_ = static_cast<std::uint32_t>(mod(phase, 2 * n));
    for (auto& b : x_) b = (n == 0) ? 0 : (b & 1u);
    for (auto& v : z_) v = static_cast<std::uint32_t>(mod(v, n));
}

XPOperator XPOperator::identity(std::uint32_t precision, std::size_t rank) {
    return XPOperator(precision, 0, std::vector<std::uint8_t>(rank, 0),
                      std::vector<std::uint32_t>(rank, 0));
}

bool XPOperator::is_identity() const { return phase_ == 0 && is_diagonal_scalar(); }

bool XPOperator::is_diagonal_scalar() const {
    for (std::size_t i = 0; i < x_.size(); ++i)
        if (x_[i] != 0 || z_[i] != 0) return false;
    return true;
}

bool XPOperator::is_diagonal() const {
    for (auto b : x_)
        if (b != 0) return false;
    return true;
}

XPOperator XPOperator::with_phase(std::int64_t p) const {
    XPOperator r = *this;
    r.phase_ = static_cast<std::uint32_t>(mod(p, 2 * static_cast<std::int64_t>(precision_)));
    return r;
}

XPOperator XPOperator::select(std::span<const std::uint32_t> positions) const {
    std::vector<std::uint8_t> x;
    std::vector<std::uint32_t> z;
    x.reserve(positions.size());
    z.reserve(positions.size());
    for (auto p : positions) {
        if (p >= x_.size()) throw XPError("select: position out of range");
        x.push_back(x_[p]);
        z.push_back(z_[p]);
    }
    return XPOperator(precision_, 0, std::move(x), std::move(z));
}

XPOperator XPOperator::embed(std::size_t rank, std::span<const std::uint32_t> positions) const {
    if (positions.size() != x_.size()) throw XPError("embed: position count mismatch");
    std::vector<std::uint8_t> x(rank, 0);
    std::vector<std::uint32_t> z(rank, 0);
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (positions[i] >= rank) throw XPError("embed: position out of range");
        x[positions[i]] = x_[i];
        z[positions[i]] = z_[i];
    }
    return XPOperator(precision_, phase_, std::move(x), std::move(z));
}

XPOperator XPOperator::prepend(std::uint8_t x, std::uint32_t z) const {
    std::vector<std::uint8_t> nx;
    std::vector<std::uint32_t> nz;
    nx.reserve(x_.size() + 1);
    nz.reserve(z_.size() + 1);
    nx.push_back(x);
    nz.push_back(z);
    nx.insert(nx.end(), x_.begin(), x_.end());
    nz.insert(nz.end(), z_.begin(), z_.end());
    return XPOperator(precision_, phase_, std::move(nx), std::move(nz));
}

XPOperator XPOperator::drop_top() const {
    if (x_.empty()) throw XPError("drop_top: rank 0");
    return XPOperator(precision_, phase_, std::vector<std::uint8_t>(x_.begin() + 1, x_.end()),
                      std::vector<std::uint32_t>(z_.begin() + 1, z_.end()));
}

std::size_t XPOperator::hash() const {
    std::size_t h = std::hash<std::uint64_t>{}((std::uint64_t(precision_) << 32) | phase_);
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    for (std::size_t i = 0; i < x_.size(); ++i) mix((std::size_t(z_[i]) << 1) | x_[i]);
    return h;
}

XPOperator xp_identity(std::uint32_t precision, std::size_t rank) {
    return XPOperator::identity(precision, rank);
}

XPOperator xp_mul(const XPOperator& a, const XPOperator& b) {
    require_compatible(a, b, "xp_mul");
    const std::size_t n = a.rank();
    std::int64_t phase = std::int64_t(a.phase()) + b.phase();
    std::vector<std::uint8_t> x(n);
    std::vector<std::uint32_t> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t z1 = a.z(i);
        const std::int64_t x2 = b.x(i);
        // P^z1 X = w^{2 z1} X P^{-z1}
        phase += 2 * x2 * z1;
        x[i] = a.x(i) ^ b.x(i);
        z[i] = static_cast<std::uint32_t>(
            mod(z1 + b.z(i) - 2 * x2 * z1, std::max<std::int64_t>(a.precision(), 1)));
    }
    return XPOperator(a.precision(), phase, std::move(x), std::move(z));
}

XPOperator xp_inverse(const XPOperator& a) {
    const std::size_t n = a.rank();
    std::int64_t phase = -std::int64_t(a.phase());
    std::vector<std::uint8_t> x(a.x());
    std::vector<std::int64_t> zz(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t xi = a.x(i), zi = a.z(i);
        phase -= 2 * xi * zi;
        zz[i] = -zi + 2 * xi * zi;
    }
    std::vector<std::uint32_t> z(n);
    const std::int64_t m = std::max<std::int64_t>(a.precision(), 1);
    for (std::size_t i = 0; i < n; ++i) z[i] = static_cast<std::uint32_t>(mod(zz[i], m));
    return XPOperator(a.precision(), phase, std::move(x), std::move(z));
}

XPOperator xp_antisym(std::uint32_t precision, std::span<const std::int64_t> z) {
    std::int64_t sum = 0;
    std::vector<std::uint32_t> neg(z.size());
    const std::int64_t m = std::max<std::int64_t>(precision, 1);
    for (std::size_t i = 0; i < z.size(); ++i) {
        sum += z[i];
        neg[i] = static_cast<std::uint32_t>(mod(-z[i], m));
    }
    return XPOperator(precision, sum, std::vector<std::uint8_t>(z.size(), 0), std::move(neg));
}

XPOperator xp_transpose(const XPOperator& a) {
    // (X^x P^z)^T = P^z X^x
    XPOperator diag(a.precision(), a.phase(), std::vector<std::uint8_t>(a.rank(), 0), a.z());
    XPOperator flips(a.precision(), 0, a.x(), std::vector<std::uint32_t>(a.rank(), 0));
    return xp_mul(diag, flips);
}

XPOperator xp_tensor(const XPOperator& a, const XPOperator& b) {
    if (a.precision() != b.precision()) throw XPError("xp_tensor: precision mismatch");
    std::vector<std::uint8_t> x(a.x());
    x.insert(x.end(), b.x().begin(), b.x().end());
    std::vector<std::uint32_t> z(a.z());
    z.insert(z.end(), b.z().begin(), b.z().end());
    return XPOperator(a.precision(), std::int64_t(a.phase()) + b.phase(), std::move(x),
                      std::move(z));
}

cplx root_of_unity(std::uint32_t precision, std::int64_t k) {
    if (precision == 0) return 1.0;
    const std::int64_t m = mod(k, 2 * std::int64_t(precision));
    if (m == 0) return 1.0;
    if (2 * m == 2 * std::int64_t(precision)) return -1.0;
    const double ang = std::numbers::pi * double(m) / double(precision);
    return {std::cos(ang), std::sin(ang)};
}

CMatrix xp_to_dense(const XPOperator& a) {
    const std::size_t n = a.rank();
    if (n > 12) throw XPError("xp_to_dense: rank above 12");
    const std::size_t dim = std::size_t{1} << n;
    CMatrix m(dim);
    std::size_t flip = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (a.x(i)) flip |= std::size_t{1} << (n - 1 - i);
    for (std::size_t col = 0; col < dim; ++col) {
        std::int64_t k = a.phase();
        for (std::size_t i = 0; i < n; ++i)
            if ((col >> (n - 1 - i)) & 1u) k += 2 * std::int64_t(a.z(i));
        m(col ^ flip, col) = root_of_unity(a.precision(), k);
    }
    return m;
}

std::string to_string(const XPOperator& a) {
    std::ostringstream os;
    os << "XP_" << a.precision() << "(" << a.phase() << "|";
    for (auto b : a.x()) os << int(b);
    os << "|";
    for (std::size_t i = 0; i < a.rank(); ++i) os << (i ? "," : "") << a.z(i);
    os << ")";
    return os.str();
}

}  // namespace limtdd
