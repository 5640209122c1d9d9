#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace limtdd {

using cplx = std::complex<double>;

/// Square complex matrix in row-major order. Only used as a bridge to dense
/// checks, never on the hot path.
struct CMatrix {
    std::size_t dim = 0;
    std::vector<cplx> a;

    CMatrix() = default;
    explicit CMatrix(std::size_t d) : dim(d), a(d * d) {}

    cplx& operator()(std::size_t r, std::size_t c) { return a[r * dim + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return a[r * dim + c]; }

    static CMatrix identity(std::size_t d);
};

CMatrix operator*(const CMatrix& lhs, const CMatrix& rhs);
CMatrix kron(const CMatrix& lhs, const CMatrix& rhs);
double max_abs_diff(const CMatrix& lhs, const CMatrix& rhs);

/// Thrown when operands of an XP operation disagree on rank or precision.
class XPError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// n-factor operator w^p * (X^x[0] P^z[0]) (x) ... (x) (X^x[n-1] P^z[n-1])
/// with w = exp(i*pi/N). Factor 0 acts on the most significant index.
///
/// Precision 0 denotes the scalar-only group used by plain TDDs: every
/// component is forced to zero and the operator is the identity.
class XPOperator {
public:
    XPOperator() = default;
    XPOperator(std::uint32_t precision, std::int64_t phase, std::vector<std::uint8_t> x,
               std::vector<std::uint32_t> z);

    static XPOperator identity(std::uint32_t precision, std::size_t rank);

    std::uint32_t precision() const { return precision_; }
    std::size_t rank() const { return x_.size(); }
    std::uint32_t phase() const { return phase_; }
    const std::vector<std::uint8_t>& x() const { return x_; }
    const std::vector<std::uint32_t>& z() const { return z_; }
    std::uint8_t x(std::size_t i) const { return x_[i]; }
    std::uint32_t z(std::size_t i) const { return z_[i]; }

    bool is_identity() const;
    /// True when the operator is a pure phase times identity.
    bool is_diagonal_scalar() const;
    /// True when every X-component is zero.
    bool is_diagonal() const;

    /// Operator with the phase component replaced.
    XPOperator with_phase(std::int64_t p) const;

    /// Factors at the given positions (phase dropped).
    XPOperator select(std::span<const std::uint32_t> positions) const;
    /// Embeds this operator into a larger rank, factor i landing on positions[i].
    /// The phase is kept.
    XPOperator embed(std::size_t rank, std::span<const std::uint32_t> positions) const;
    /// Prepends a top factor X^x P^z.
    XPOperator prepend(std::uint8_t x, std::uint32_t z) const;
    /// Drops factor 0; the phase is kept.
    XPOperator drop_top() const;

    std::size_t hash() const;

    friend bool operator==(const XPOperator&, const XPOperator&) = default;

private:
    std::uint32_t precision_ = 0;
    std::uint32_t phase_ = 0;
    std::vector<std::uint8_t> x_;
    std::vector<std::uint32_t> z_;
};

XPOperator xp_identity(std::uint32_t precision, std::size_t rank);
XPOperator xp_mul(const XPOperator& a, const XPOperator& b);
XPOperator xp_inverse(const XPOperator& a);
/// D_N(z) = XP_N(sum z | 0 | -z).
XPOperator xp_antisym(std::uint32_t precision, std::span<const std::int64_t> z);
/// Transpose of every factor, renormalized to XP form.
XPOperator xp_transpose(const XPOperator& a);
/// Tensor product a (x) b, a on the most significant factors.
XPOperator xp_tensor(const XPOperator& a, const XPOperator& b);

/// 2^n x 2^n realization. Guarded to n <= 12.
CMatrix xp_to_dense(const XPOperator& a);

/// w^k for the operator's precision, as a complex number.
cplx root_of_unity(std::uint32_t precision, std::int64_t k);

/// "XP_N(p|x|z)" with x as bit string and z comma separated.
std::string to_string(const XPOperator& a);

struct XPOperatorHash {
    std::size_t operator()(const XPOperator& a) const { return a.hash(); }
};

}  // namespace limtdd
