#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "limtdd/index_order.hpp"
#include "limtdd/lim_weight.hpp"

namespace limtdd {

/// Largest rank the dense routines accept.
inline constexpr std::size_t kDenseRankCap = 12;

class DenseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Rank-n complex tensor over named binary indices. indices[0] is the most
/// significant bit of the position in `data`.
struct DenseTensor {
    std::vector<std::string> indices;
    std::vector<cplx> data;

    DenseTensor() : data(1, cplx{}) {}
    DenseTensor(std::vector<std::string> idx, std::vector<cplx> values);

    static DenseTensor scalar(cplx v);
    static DenseTensor zeros(std::vector<std::string> idx);

    std::size_t rank() const { return indices.size(); }
    /// -1 when absent.
    int find(std::string_view name) const;
    cplx at(std::span<const std::uint8_t> bits) const;
};

DenseTensor dense_slice(const DenseTensor& t, std::string_view x, int c);
/// Reorders the axes to `order` (a permutation of t.indices).
DenseTensor dense_permute(const DenseTensor& t, const std::vector<std::string>& order);
/// Broadcasts t onto a superset of its indices, laid out in `order`.
DenseTensor dense_expand(const DenseTensor& t, const std::vector<std::string>& order);
/// Sums over `var`; indices shared but not in `var` are multiplied pointwise.
/// The result lists a's remaining indices followed by b's new ones, or follows
/// `order` when given.
DenseTensor dense_contract(const DenseTensor& a, const DenseTensor& b,
                           const std::vector<std::string>& var,
                           const IndexOrder* order = nullptr);
/// Applies w to the vectorization of t (factor i acts on t.indices[i]).
DenseTensor dense_apply_lim(const LimWeight& w, const DenseTensor& t);
/// Pointwise sum over the index union, absent indices broadcast.
DenseTensor dense_add(const DenseTensor& a, const DenseTensor& b,
                      const IndexOrder* order = nullptr);
DenseTensor dense_scale(const DenseTensor& t, cplx s);
/// Entries with real and imaginary parts uniform in [0, 1).
DenseTensor random_tensor(const std::vector<std::string>& indices, std::uint64_t seed);
/// Max-abs difference after aligning b's axes to a's; broadcasting fills
/// indices present on one side only.
double dense_max_diff(const DenseTensor& a, const DenseTensor& b);
bool dense_equal(const DenseTensor& a, const DenseTensor& b, double tol);
double dense_norm(const DenseTensor& t);

std::string dense_to_json(const DenseTensor& t);
DenseTensor dense_from_json(std::string_view text);

}  // namespace limtdd
