#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "limtdd/dd.hpp"
#include "limtdd/lim_weight.hpp"
#include "limtdd/xp_operator.hpp"

namespace limtdd {

/// Explicitly enumerated group of XP operators fixing one tensor.
class StabGroup {
public:
    StabGroup() = default;
    StabGroup(std::uint32_t precision, std::size_t rank);

    static StabGroup trivial(std::uint32_t precision, std::size_t rank);

    std::uint32_t precision() const { return precision_; }
    std::size_t rank() const { return rank_; }
    const std::vector<XPOperator>& elements() const { return elements_; }
    std::size_t size() const { return elements_.size(); }
    /// Set when enumeration hit the cap and the group was replaced by {I}.
    bool degraded() const { return degraded_; }

    /// Element sharing a's x and z components, if any. A stabilizer group
    /// holds at most one element per (x, z) pair.
    const XPOperator* find_xz(const XPOperator& a) const;
    bool contains(const XPOperator& a) const;

    void insert(XPOperator a);
    /// Drops every element but the identity.
    void mark_degraded();
    /// Keeps the (sound but possibly incomplete) elements.
    void flag_degraded() { degraded_ = true; }

private:
    std::uint32_t precision_ = 0;
    std::size_t rank_ = 0;
    std::vector<XPOperator> elements_;
    std::unordered_map<XPOperator, std::size_t, XPOperatorHash> by_xz_;
    bool degraded_ = false;
};

/// Group of the rank-1 tensor [low; high] for scalar (rank 0) weights.
StabGroup stab_rank1(const LimWeight& low, const LimWeight& high, std::uint32_t precision);

/// Per-node group memo owned by a manager.
class StabCache {
public:
    explicit StabCache(DDManager& mgr) : mgr_(mgr) {}
    const StabGroup& group(NodeId v);
    std::size_t degraded_count() const { return degraded_; }

private:
    StabGroup compute(NodeId v);

    DDManager& mgr_;
    std::unordered_map<NodeId, StabGroup> memo_;
    std::size_t degraded_ = 0;
};

const StabGroup& stab_node(DDManager& mgr, NodeId v);

struct MinWeight {
    /// Chosen high-edge weight before the w^{2k} phase is pulled out.
    LimWeight w_min;
    XPOperator g0;
    XPOperator g1;
    bool swapped = false;
};

/// Smallest g0^-1 w0^-1 w1 g1 over both groups, compared after the even part
/// of the phase is removed. With allow_swap the reversed products are
/// considered too and win only when strictly smaller. Ties between pairs go
/// to the smallest resulting incoming weight (w0 g0, or w1 g1 when swapped).
MinWeight min_weight(DDManager& mgr, const LimWeight& w0, NodeId v0, const LimWeight& w1,
                     NodeId v1, bool allow_swap);

std::string dump(const StabGroup& g);

}  // namespace limtdd
