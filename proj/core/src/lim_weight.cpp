#include "limtdd/lim_weight.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace limtdd {

std::pair<std::int64_t, double> fold_angle(double turns, std::uint32_t precision) {
    turns -= std::floor(turns);
    if (precision == 0) {
        if (turns < kTolerance || 1.0 - turns < kTolerance) turns = 0.0;
        return {0, turns};
    }
    const double steps = 2.0 * precision;
    double q = turns * steps;
    const double nearest = std::round(q);
    if (std::abs(q - nearest) < kTolerance * steps) q = nearest;
    double p = std::floor(q);
    double rest = (q - p) / steps;
    std::int64_t k = static_cast<std::int64_t>(p) % static_cast<std::int64_t>(steps);
    return {k, rest};
}

LimWeight::LimWeight(double magnitude, double angle, XPOperator op) {
    if (magnitude < 0) {
        magnitude = -magnitude;
        angle += 0.5;
    }
    if (!(magnitude >= kTolerance)) {
        op_ = XPOperator::identity(op.precision(), op.rank());
        return;
    }
    mag_ = magnitude;
    auto [k, rest] = fold_angle(angle, op.precision());
    angle_ = rest;
    op_ = op.with_phase(std::int64_t(op.phase()) + k);
}

LimWeight LimWeight::from_complex(cplx scalar, XPOperator op) {
    const double m = std::abs(scalar);
    if (m < kTolerance) return LimWeight(0.0, 0.0, std::move(op));
    return LimWeight(m, std::arg(scalar) / (2 * std::numbers::pi), std::move(op));
}

LimWeight LimWeight::unit(std::uint32_t precision, std::size_t rank) {
    return LimWeight(1.0, 0.0, XPOperator::identity(precision, rank));
}

LimWeight LimWeight::zero(std::uint32_t precision, std::size_t rank) {
    return LimWeight(0.0, 0.0, XPOperator::identity(precision, rank));
}

bool LimWeight::is_unit() const {
    return std::abs(mag_ - 1.0) < kTolerance && angle_ < kTolerance && op_.is_identity();
}

cplx LimWeight::scalar() const {
    if (mag_ == 0.0) return 0.0;
    if (angle_ == 0.0) return mag_;
    return std::polar(mag_, 2 * std::numbers::pi * angle_);
}

cplx LimWeight::coefficient() const {
    return scalar() * root_of_unity(op_.precision(), op_.phase());
}

double LimWeight::combined_angle() const {
    double a = angle_;
    if (op_.precision() > 0) a += double(op_.phase()) / (2.0 * op_.precision());
    return a - std::floor(a);
}

LimWeight lim_mul(const LimWeight& a, const LimWeight& b) {
    if (a.is_zero() || b.is_zero()) {
        if (a.precision() != b.precision() || a.rank() != b.rank())
            throw XPError("lim_mul: shape mismatch");
        return LimWeight::zero(a.precision(), a.rank());
    }
    return LimWeight(a.magnitude() * b.magnitude(), a.angle() + b.angle(), xp_mul(a.op(), b.op()));
}

LimWeight lim_inverse(const LimWeight& a) {
    if (a.is_zero()) throw XPError("lim_inverse: zero weight");
    return LimWeight(1.0 / a.magnitude(), -a.angle(), xp_inverse(a.op()));
}

namespace {

std::strong_ordering real_cmp(double a, double b) {
    if (std::abs(a - b) < kTolerance) return std::strong_ordering::equal;
    return a < b ? std::strong_ordering::less : std::strong_ordering::greater;
}

}  // namespace

std::strong_ordering lim_compare(const LimWeight& a, const LimWeight& b) {
    if (auto c = a.op().x() <=> b.op().x(); c != 0) return c;
    if (auto c = a.op().z() <=> b.op().z(); c != 0) return c;
    if (auto c = real_cmp(a.magnitude(), b.magnitude()); c != 0) return c;
    if (auto c = real_cmp(a.angle(), b.angle()); c != 0) return c;
    return a.op().phase() <=> b.op().phase();
}

bool lim_equal(const LimWeight& a, const LimWeight& b) {
    return a.precision() == b.precision() && a.rank() == b.rank() && lim_compare(a, b) == 0;
}

PhaseSplit phase_extract(const LimWeight& w) {
    const std::int64_t p = w.op().phase();
    const std::int64_t k = p / 2;
    PhaseSplit out;
    out.k = k;
    out.residual = LimWeight(w.magnitude(), w.angle(), w.op().with_phase(p - 2 * k));
    return out;
}

LimSplit lim_split(const LimWeight& w, std::span<const std::uint32_t> part) {
    const std::size_t n = w.rank();
    std::vector<bool> on(n, false);
    for (auto p : part) {
        if (p >= n) throw XPError("lim_split: position out of range");
        on[p] = true;
    }
    std::vector<std::uint8_t> xa(n, 0), xb(n, 0);
    std::vector<std::uint32_t> za(n, 0), zb(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto& x = on[i] ? xa : xb;
        auto& z = on[i] ? za : zb;
        x[i] = w.op().x(i);
        z[i] = w.op().z(i);
    }
    const auto N = w.precision();
    if (w.is_zero()) return {LimWeight::zero(N, n), LimWeight::unit(N, n)};
    return {LimWeight(w.magnitude(), w.angle(), XPOperator(N, w.op().phase(), xa, za)),
            LimWeight(1.0, 0.0, XPOperator(N, 0, xb, zb))};
}

CMatrix lim_to_dense(const LimWeight& w) {
    CMatrix m = xp_to_dense(w.op());
    const cplx s = w.scalar();
    for (auto& v : m.a) v *= s;
    return m;
}

std::string to_string(const LimWeight& w) {
    std::ostringstream os;
    os << w.magnitude() << "∠" << w.angle() << " · " << to_string(w.op());
    return os.str();
}

}  // namespace limtdd
