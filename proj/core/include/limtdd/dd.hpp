#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "limtdd/dense_tensor.hpp"
#include "limtdd/index_order.hpp"
#include "limtdd/lim_weight.hpp"

namespace limtdd {

enum class Mode { tdd, limtdd };
enum class StabMode { fast, full };

std::string to_string(Mode m);
std::string to_string(StabMode m);
Mode parse_mode(std::string_view s);
StabMode parse_stab_mode(std::string_view s);

struct ManagerConfig {
    Mode mode = Mode::limtdd;
    /// Ignored in tdd mode (forced to 0). Must be a power of two otherwise.
    std::uint32_t precision = 8;
    StabMode stab = StabMode::fast;
    /// Largest stabilizer group enumerated per node before falling back to
    /// the trivial group.
    std::size_t stab_cap = 512;
    /// Computed tables are flushed once their combined size passes this.
    std::size_t cache_limit = std::size_t{1} << 22;
};

class DDError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using NodeId = std::uint32_t;
using SetId = std::uint32_t;
using OpId = std::uint32_t;
inline constexpr NodeId kTerminal = 0;

/// Interned edge weight: snapped (magnitude, angle) plus an operator id from
/// the manager's operator table. Zero has magnitude 0 and the identity op.
struct Wt {
    double mag = 0.0;
    double ang = 0.0;
    OpId op = 0;

    bool is_zero() const { return mag == 0.0; }
    friend bool operator==(const Wt&, const Wt&) = default;
};

/// A diagram: incoming weight, root node and the index set it ranges over.
/// For a nonzero diagram `set` equals the root's index set; the zero diagram
/// targets the terminal and keeps its nominal set.
struct Diagram {
    Wt w;
    NodeId node = kTerminal;
    SetId set = 0;

    bool is_zero() const { return w.is_zero(); }
    friend bool operator==(const Diagram&, const Diagram&) = default;
};

struct Node {
    std::uint32_t level = 0;  // index position
    SetId set = 0;
    SetId child_set = 0;
    NodeId lo = kTerminal;
    NodeId hi = kTerminal;
    Wt hw;
    bool lo_zero = false;
};

struct ManagerStats {
    std::size_t nodes = 0;
    std::size_t peak_nodes = 0;
    std::size_t unique_hits = 0;
    std::size_t add_hits = 0;
    std::size_t cont_hits = 0;
    std::size_t cache_flushes = 0;
};

class StabCache;

/// Owns every table behind a family of diagrams. Single threaded; separate
/// managers are independent.
class DDManager {
public:
    explicit DDManager(ManagerConfig cfg = {});
    ~DDManager();
    DDManager(const DDManager&) = delete;
    DDManager& operator=(const DDManager&) = delete;

    const ManagerConfig& config() const { return cfg_; }
    std::uint32_t precision() const { return cfg_.precision; }
    Mode mode() const { return cfg_.mode; }
    IndexOrder& order() { return order_; }
    const IndexOrder& order() const { return order_; }
    const ManagerStats& stats() const { return stats_; }

    // ---- index sets -------------------------------------------------------
    SetId set_of(std::span<const std::uint32_t> positions);
    SetId set_of_names(const std::vector<std::string>& names);
    const std::vector<std::uint32_t>& positions(SetId s) const { return sets_[s]; }
    std::vector<std::string> names(SetId s) const;
    std::vector<std::string> indices(const Diagram& d) const { return names(d.set); }

    // ---- weights ----------------------------------------------------------
    OpId intern_op(const XPOperator& op);
    const XPOperator& op(OpId id) const { return ops_[id]; }
    OpId identity_op(std::size_t rank);
    Wt to_wt(const LimWeight& w);
    LimWeight to_lim(const Wt& w) const;
    Wt unit_wt(std::size_t rank);
    Wt zero_wt(std::size_t rank);
    Wt wmul(const Wt& a, const Wt& b);
    Wt winv(const Wt& a);
    std::size_t rank_of(const Wt& w) const { return ops_[w.op].rank(); }
    LimWeight weight(const Diagram& d) const { return to_lim(d.w); }

    // ---- nodes ------------------------------------------------------------
    const Node& node(NodeId id) const { return nodes_[id]; }
    std::size_t node_count() const { return nodes_.size(); }
    Diagram low(NodeId id);
    Diagram high(NodeId id);

    // ---- construction -----------------------------------------------------
    Diagram zero(SetId set);
    Diagram constant(cplx c);
    /// Normalized node for index `x` over two children sharing one index set.
    Diagram loc_norm(std::uint32_t x, const Diagram& f0, const Diagram& f1);
    Diagram make_dd(const LimWeight& w, std::string_view x, const Diagram& f0, const Diagram& f1);
    Diagram generate(const DenseTensor& t);
    /// w applied to the diagram (rank of w equals the diagram's rank).
    Diagram apply(const LimWeight& w, const Diagram& d);
    Diagram scale(cplx c, const Diagram& d);

    // ---- operations -------------------------------------------------------
    Diagram slice(const Diagram& d, std::string_view x, int c);
    Diagram slice_pos(const Diagram& d, std::uint32_t x, int c);
    Diagram add(const Diagram& f, const Diagram& g);
    /// Sums over `var`; indices shared and not in `var` are multiplied pointwise.
    Diagram contract(const Diagram& f, const Diagram& g, const std::vector<std::string>& var);
    Diagram contract_set(const Diagram& f, const Diagram& g, SetId var);

    // ---- inspection -------------------------------------------------------
    DenseTensor to_tensor(const Diagram& d);
    cplx amplitude(const Diagram& d, const std::unordered_map<std::string, int>& assignment);
    cplx amplitude_bits(const Diagram& d, std::span<const std::uint8_t> bits);
    /// Distinct reachable nodes, terminal included.
    std::size_t size(const Diagram& d);
    /// Records size(d) into the running peak and returns it.
    std::size_t checkpoint(const Diagram& d);
    std::size_t peak_nodes() const { return stats_.peak_nodes; }
    void reset_peak() { stats_.peak_nodes = 0; }
    std::string export_dot(const Diagram& d);

    void clear_caches();

    StabCache& stab_cache();

private:
    friend class StabCache;
    struct Impl;

    Wt canon(double mag, double ang, OpId op);
    OpId op_with_phase(OpId id, std::int64_t phase);
    OpId op_prepend(OpId id, std::uint8_t x, std::uint32_t z);
    SetId set_insert(SetId s, std::uint32_t pos);
    SetId set_remove(SetId s, std::uint32_t pos);
    SetId set_union(SetId a, SetId b);
    SetId set_minus(SetId a, SetId b);
    int set_find(SetId s, std::uint32_t pos) const;
    bool set_subset(SetId a, SetId b) const;
    NodeId find_or_make(const Node& n);
    Diagram slice_node(NodeId v, std::uint32_t x, int d);
    Diagram add_core(const Diagram& f, const Diagram& g);
    Diagram cont_core(const Diagram& f, const Diagram& g, SetId var);
    OpId op_drop(OpId id, std::size_t j, std::int64_t add_phase);
    int cmp_residual(const Wt& a, const Wt& b) const;
    void maybe_flush();

    ManagerConfig cfg_;
    IndexOrder order_;
    ManagerStats stats_;

    std::vector<std::vector<std::uint32_t>> sets_;
    std::vector<XPOperator> ops_;
    std::vector<std::uint8_t> op_is_identity_;
    std::vector<Node> nodes_;

    std::unique_ptr<Impl> impl_;
    std::unique_ptr<StabCache> stab_;
};

}  // namespace limtdd
