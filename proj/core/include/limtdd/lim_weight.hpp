#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <utility>

#include "limtdd/xp_operator.hpp"

namespace limtdd {

/// Absolute tolerance for every real comparison on weights.
inline constexpr double kTolerance = 1e-10;

/// Local invertible map r * e^{2 pi i theta} * op.
///
/// Canonical form: theta lies in [0, 1/(2N)); whole multiples of 1/(2N) in the
/// scalar angle are carried by op's phase. At precision 0 theta spans [0, 1)
/// and op is the identity. The zero weight is r = 0, theta = 0, identity op.
class LimWeight {
public:
    LimWeight() = default;
    /// Canonicalizes (r, theta in turns, op).
    LimWeight(double magnitude, double angle, XPOperator op);

    static LimWeight from_complex(cplx scalar, XPOperator op);
    static LimWeight unit(std::uint32_t precision, std::size_t rank);
    static LimWeight zero(std::uint32_t precision, std::size_t rank);

    double magnitude() const { return mag_; }
    double angle() const { return angle_; }
    const XPOperator& op() const { return op_; }
    std::uint32_t precision() const { return op_.precision(); }
    std::size_t rank() const { return op_.rank(); }

    bool is_zero() const { return mag_ < kTolerance; }
    bool is_unit() const;

    /// Scalar r * e^{2 pi i theta} (without the op phase).
    cplx scalar() const;
    /// Scalar including the op phase w^p.
    cplx coefficient() const;
    /// Combined angle theta + p/(2N), in turns within [0, 1).
    double combined_angle() const;

private:
    double mag_ = 0.0;
    double angle_ = 0.0;
    XPOperator op_;
};

LimWeight lim_mul(const LimWeight& a, const LimWeight& b);
LimWeight lim_inverse(const LimWeight& a);
/// Lexicographic order on (x | z | r | theta | p); reals within kTolerance tie.
std::strong_ordering lim_compare(const LimWeight& a, const LimWeight& b);
bool lim_equal(const LimWeight& a, const LimWeight& b);

struct PhaseSplit {
    std::int64_t k = 0;
    LimWeight residual;
};
/// w = w^{2k} * residual with the residual's combined angle in [0, 1/N).
PhaseSplit phase_extract(const LimWeight& w);

struct LimSplit {
    LimWeight on_part;
    LimWeight off_part;
};
/// Factors on `part` (plus the whole scalar and phase) vs. the rest. Both
/// halves keep the full rank, padded with identity factors.
LimSplit lim_split(const LimWeight& w, std::span<const std::uint32_t> part);

CMatrix lim_to_dense(const LimWeight& w);

/// "r∠theta · XP_N(p|x|z)".
std::string to_string(const LimWeight& w);

/// Folds an angle in turns into (phase steps of 1/(2N), residual in [0, 1/(2N))).
/// Values within tolerance of a grid point snap onto it.
std::pair<std::int64_t, double> fold_angle(double turns, std::uint32_t precision);

}  // namespace limtdd
