#include "limtdd/dd.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include <absl/container/flat_hash_map.h>

#include "limtdd/stabilizer.hpp"

namespace limtdd {

std::string to_string(Mode m) { return m == Mode::tdd ? "tdd" : "limtdd"; }
std::string to_string(StabMode m) { return m == StabMode::fast ? "fast" : "full"; }

Mode parse_mode(std::string_view s) {
    if (s == "tdd") return Mode::tdd;
    if (s == "limtdd") return Mode::limtdd;
    throw DDError("unknown mode '" + std::string(s) + "'");
}

StabMode parse_stab_mode(std::string_view s) {
    if (s == "fast") return StabMode::fast;
    if (s == "full") return StabMode::full;
    throw DDError("unknown stabilizer mode '" + std::string(s) + "'");
}

namespace {

constexpr std::uint32_t kNoLevel = std::numeric_limits<std::uint32_t>::max();

inline void mix(std::size_t& h, std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
}

inline std::size_t bits_of(double d) { return std::bit_cast<std::uint64_t>(d); }

inline std::size_t hash_wt(const Wt& w) {
    std::size_t h = bits_of(w.mag);
    mix(h, bits_of(w.ang));
    mix(h, w.op);
    return h;
}

// Snaps reals onto previously seen values within kTolerance so that equal
// weights get bit-identical keys. Values above 1 are compared in log space.
class RealTable {
public:
    double snap(double v) {
        if (v == 0.0) return 0.0;
        if (std::abs(v - 1.0) < kTolerance) return 1.0;
        const double key = v > 1.0 ? 1.0 + std::log(v) : v;
        const auto k = static_cast<std::int64_t>(std::llround(key / kTolerance));
        for (std::int64_t dk : {0, -1, 1}) {
            auto it = map_.find(k + dk);
            if (it != map_.end() && std::abs(it->second.first - key) < kTolerance)
                return it->second.second;
        }
        map_.emplace(k, std::make_pair(key, v));
        return v;
    }
    void clear() { map_.clear(); }

private:
    absl::flat_hash_map<std::int64_t, std::pair<double, double>> map_;
};

struct NodeKey {
    std::uint32_t level;
    NodeId lo, hi;
    Wt hw;
    bool lo_zero;
    bool operator==(const NodeKey&) const = default;
};
struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const {
        std::size_t h = k.level;
        mix(h, k.lo);
        mix(h, k.hi);
        mix(h, hash_wt(k.hw));
        mix(h, k.lo_zero);
        return h;
    }
};

struct PairKey {
    NodeId a, b;
    Wt wa, wb;
    SetId sa, sb, var;
    bool operator==(const PairKey&) const = default;
};
struct PairKeyHash {
    std::size_t operator()(const PairKey& k) const {
        std::size_t h = k.a;
        mix(h, k.b);
        mix(h, hash_wt(k.wa));
        mix(h, hash_wt(k.wb));
        mix(h, k.sa);
        mix(h, k.sb);
        mix(h, k.var);
        return h;
    }
};

// Operator split of a contraction: depends only on the two incoming ops and
// the index sets involved.
struct SplitKey {
    OpId fo, go;
    SetId sf, sg, var;
    bool operator==(const SplitKey&) const = default;
};
struct SplitKeyHash {
    std::size_t operator()(const SplitKey& k) const {
        std::size_t h = k.fo;
        mix(h, k.go);
        mix(h, k.sf);
        mix(h, k.sg);
        mix(h, k.var);
        return h;
    }
};
struct SplitOps {
    OpId mf, mg, ro;
};

struct U64Hash {
    std::size_t operator()(std::uint64_t v) const {
        v ^= v >> 33;
        v *= 0xff51afd7ed558ccdULL;
        v ^= v >> 33;
        return v;
    }
};

struct VecHash {
    std::size_t operator()(const std::vector<std::uint32_t>& v) const {
        std::size_t h = v.size();
        for (auto x : v) mix(h, x);
        return h;
    }
};

std::vector<cplx> apply_vec(const LimWeight& w, const std::vector<cplx>& v) {
    const std::size_t n = w.rank();
    std::vector<cplx> out(v.size());
    if (w.is_zero()) return out;
    const auto& op = w.op();
    std::size_t flip = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (op.x(i)) flip |= std::size_t{1} << (n - 1 - i);
    const cplx s = w.scalar();
    for (std::size_t col = 0; col < v.size(); ++col) {
        std::int64_t k = op.phase();
        for (std::size_t i = 0; i < n; ++i)
            if ((col >> (n - 1 - i)) & 1u) k += 2 * std::int64_t(op.z(i));
        out[col ^ flip] = s * root_of_unity(op.precision(), k) * v[col];
    }
    return out;
}

}  // namespace

struct DDManager::Impl {
    RealTable mags;
    RealTable angs;
    absl::flat_hash_map<XPOperator, OpId, XPOperatorHash> op_index;
    std::vector<OpId> identity_by_rank;
    absl::flat_hash_map<std::uint64_t, OpId, U64Hash> op_mul;
    absl::flat_hash_map<OpId, OpId> op_inv;
    absl::flat_hash_map<std::uint64_t, OpId, U64Hash> op_phase;
    absl::flat_hash_map<std::uint64_t, OpId, U64Hash> op_pre;
    absl::flat_hash_map<std::uint64_t, OpId, U64Hash> op_drop;

    absl::flat_hash_map<std::vector<std::uint32_t>, SetId, VecHash> set_index;
    absl::flat_hash_map<std::uint64_t, SetId, U64Hash> set_ins;
    absl::flat_hash_map<std::uint64_t, SetId, U64Hash> set_rem;
    absl::flat_hash_map<std::uint64_t, SetId, U64Hash> set_uni;
    absl::flat_hash_map<std::uint64_t, SetId, U64Hash> set_min;

    absl::flat_hash_map<NodeKey, NodeId, NodeKeyHash> unique;
    absl::flat_hash_map<std::uint64_t, Diagram, U64Hash> slice_cache;
    absl::flat_hash_map<PairKey, Diagram, PairKeyHash> add_cache;
    absl::flat_hash_map<PairKey, Diagram, PairKeyHash> cont_cache;
    absl::flat_hash_map<SplitKey, SplitOps, SplitKeyHash> split_cache;

    std::vector<std::uint32_t> stamp;
    std::uint32_t epoch = 0;
};

DDManager::DDManager(ManagerConfig cfg) : cfg_(cfg), impl_(std::make_unique<Impl>()) {
    if (cfg_.mode == Mode::tdd) {
        cfg_.precision = 0;
        cfg_.stab = StabMode::fast;
    } else {
        const auto n = cfg_.precision;
        if (n == 0 || !std::has_single_bit(n) || n > (1u << 20))
            throw DDError("precision must be a power of two between 1 and 2^20");
    }
    sets_.push_back({});
    impl_->set_index.emplace(std::vector<std::uint32_t>{}, 0);
    identity_op(0);
    Node term;
    term.level = kNoLevel;
    nodes_.push_back(term);
    stats_.nodes = 1;
}

DDManager::~DDManager() = default;

StabCache& DDManager::stab_cache() {
    if (!stab_) stab_ = std::make_unique<StabCache>(*this);
    return *stab_;
}

// ---- sets -------------------------------------------------------------------

SetId DDManager::set_of(std::span<const std::uint32_t> positions) {
    std::vector<std::uint32_t> v(positions.begin(), positions.end());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    auto it = impl_->set_index.find(v);
    if (it != impl_->set_index.end()) return it->second;
    const auto id = static_cast<SetId>(sets_.size());
    sets_.push_back(v);
    impl_->set_index.emplace(std::move(v), id);
    return id;
}

SetId DDManager::set_of_names(const std::vector<std::string>& names) {
    std::vector<std::uint32_t> p;
    for (const auto& n : names) p.push_back(order_.ensure(n));
    return set_of(p);
}

std::vector<std::string> DDManager::names(SetId s) const {
    std::vector<std::string> out;
    for (auto p : sets_[s]) out.push_back(order_.name(p));
    return out;
}

SetId DDManager::set_insert(SetId s, std::uint32_t pos) {
    const std::uint64_t key = (std::uint64_t(s) << 32) | pos;
    auto it = impl_->set_ins.find(key);
    if (it != impl_->set_ins.end()) return it->second;
    std::vector<std::uint32_t> v = sets_[s];
    v.push_back(pos);
    const SetId r = set_of(v);
    impl_->set_ins.emplace(key, r);
    return r;
}

SetId DDManager::set_remove(SetId s, std::uint32_t pos) {
    const std::uint64_t key = (std::uint64_t(s) << 32) | pos;
    auto it = impl_->set_rem.find(key);
    if (it != impl_->set_rem.end()) return it->second;
    std::vector<std::uint32_t> v = sets_[s];
    v.erase(std::remove(v.begin(), v.end(), pos), v.end());
    const SetId r = set_of(v);
    impl_->set_rem.emplace(key, r);
    return r;
}

SetId DDManager::set_union(SetId a, SetId b) {
    if (a == b) return a;
    const std::uint64_t key = (std::uint64_t(a) << 32) | b;
    auto it = impl_->set_uni.find(key);
    if (it != impl_->set_uni.end()) return it->second;
    std::vector<std::uint32_t> v = sets_[a];
    v.insert(v.end(), sets_[b].begin(), sets_[b].end());
    const SetId r = set_of(v);
    impl_->set_uni.emplace(key, r);
    return r;
}

SetId DDManager::set_minus(SetId a, SetId b) {
    const std::uint64_t key = (std::uint64_t(a) << 32) | b;
    auto it = impl_->set_min.find(key);
    if (it != impl_->set_min.end()) return it->second;
    std::vector<std::uint32_t> v;
    const auto& sb = sets_[b];
    for (auto p : sets_[a])
        if (!std::binary_search(sb.begin(), sb.end(), p)) v.push_back(p);
    const SetId r = set_of(v);
    impl_->set_min.emplace(key, r);
    return r;
}

int DDManager::set_find(SetId s, std::uint32_t pos) const {
    const auto& v = sets_[s];
    auto it = std::lower_bound(v.begin(), v.end(), pos);
    if (it == v.end() || *it != pos) return -1;
    return int(it - v.begin());
}

bool DDManager::set_subset(SetId a, SetId b) const {
    if (a == b) return true;
    const auto& va = sets_[a];
    const auto& vb = sets_[b];
    return std::includes(vb.begin(), vb.end(), va.begin(), va.end());
}

// ---- weights ----------------------------------------------------------------

OpId DDManager::intern_op(const XPOperator& op) {
    if (op.precision() != cfg_.precision) throw DDError("operator precision differs from manager");
    auto it = impl_->op_index.find(op);
    if (it != impl_->op_index.end()) return it->second;
    const auto id = static_cast<OpId>(ops_.size());
    ops_.push_back(op);
    op_is_identity_.push_back(op.is_identity());
    impl_->op_index.emplace(op, id);
    return id;
}

OpId DDManager::identity_op(std::size_t rank) {
    auto& v = impl_->identity_by_rank;
    while (v.size() <= rank) v.push_back(intern_op(XPOperator::identity(cfg_.precision, v.size())));
    return v[rank];
}

OpId DDManager::op_with_phase(OpId id, std::int64_t phase) {
    const std::int64_t m = 2 * std::int64_t(cfg_.precision);
    if (m == 0) return id;
    phase %= m;
    if (phase < 0) phase += m;
    if (phase == ops_[id].phase()) return id;
    const std::uint64_t key = (std::uint64_t(id) << 32) | std::uint64_t(phase);
    auto it = impl_->op_phase.find(key);
    if (it != impl_->op_phase.end()) return it->second;
    const XPOperator o = ops_[id].with_phase(phase);
    const OpId r = intern_op(o);
    impl_->op_phase.emplace(key, r);
    return r;
}

OpId DDManager::op_prepend(OpId id, std::uint8_t x, std::uint32_t z) {
    if (cfg_.precision == 0) return identity_op(ops_[id].rank() + 1);
    z %= cfg_.precision;
    const std::uint64_t key = (std::uint64_t(id) << 32) | (std::uint64_t(z) << 1) | (x & 1u);
    auto it = impl_->op_pre.find(key);
    if (it != impl_->op_pre.end()) return it->second;
    const XPOperator o = ops_[id].prepend(x, z);
    const OpId r = intern_op(o);
    impl_->op_pre.emplace(key, r);
    return r;
}

OpId DDManager::op_drop(OpId id, std::size_t j, std::int64_t add_phase) {
    const std::size_t rank = ops_[id].rank();
    if (cfg_.precision == 0) return identity_op(rank - 1);
    const std::int64_t m = 2 * std::int64_t(cfg_.precision);
    add_phase = ((add_phase % m) + m) % m;
    const std::uint64_t key = (std::uint64_t(id) << 32) | (std::uint64_t(j) << 21) | std::uint64_t(add_phase);
    auto it = impl_->op_drop.find(key);
    if (it != impl_->op_drop.end()) return it->second;
    const XPOperator& src = ops_[id];
    std::vector<std::uint8_t> x;
    std::vector<std::uint32_t> z;
    x.reserve(rank - 1);
    z.reserve(rank - 1);
    for (std::size_t i = 0; i < rank; ++i) {
        if (i == j) continue;
        x.push_back(src.x(i));
        z.push_back(src.z(i));
    }
    const XPOperator o(cfg_.precision, std::int64_t(src.phase()) + add_phase, std::move(x), std::move(z));
    const OpId r = intern_op(o);
    impl_->op_drop.emplace(key, r);
    return r;
}

Wt DDManager::canon(double mag, double ang, OpId op) {
    if (mag < 0) {
        mag = -mag;
        ang += 0.5;
    }
    if (!(mag >= kTolerance)) return zero_wt(ops_[op].rank());
    auto [k, rest] = fold_angle(ang, cfg_.precision);
    if (k != 0) op = op_with_phase(op, std::int64_t(ops_[op].phase()) + k);
    Wt w;
    w.mag = impl_->mags.snap(mag);
    w.ang = impl_->angs.snap(rest);
    w.op = op;
    return w;
}

Wt DDManager::to_wt(const LimWeight& w) {
    if (w.is_zero()) return zero_wt(w.rank());
    return canon(w.magnitude(), w.angle(), intern_op(w.op()));
}

LimWeight DDManager::to_lim(const Wt& w) const {
    return LimWeight(w.mag, w.ang, ops_[w.op]);
}

Wt DDManager::unit_wt(std::size_t rank) { return Wt{1.0, 0.0, identity_op(rank)}; }
Wt DDManager::zero_wt(std::size_t rank) { return Wt{0.0, 0.0, identity_op(rank)}; }

Wt DDManager::wmul(const Wt& a, const Wt& b) {
    if (a.is_zero() || b.is_zero()) return zero_wt(ops_[a.op].rank());
    OpId op;
    if (cfg_.precision == 0 || op_is_identity_[b.op]) {
        op = a.op;
    } else if (op_is_identity_[a.op]) {
        op = b.op;
    } else {
        const std::uint64_t key = (std::uint64_t(a.op) << 32) | b.op;
        auto it = impl_->op_mul.find(key);
        if (it != impl_->op_mul.end()) {
            op = it->second;
        } else {
            const XPOperator o = xp_mul(ops_[a.op], ops_[b.op]);
            op = intern_op(o);
            impl_->op_mul.emplace(key, op);
        }
    }
    return canon(a.mag * b.mag, a.ang + b.ang, op);
}

Wt DDManager::winv(const Wt& a) {
    if (a.is_zero()) throw DDError("inverse of zero weight");
    OpId op = a.op;
    if (cfg_.precision != 0 && !op_is_identity_[a.op]) {
        auto it = impl_->op_inv.find(a.op);
        if (it != impl_->op_inv.end()) {
            op = it->second;
        } else {
            const XPOperator o = xp_inverse(ops_[a.op]);
            op = intern_op(o);
            impl_->op_inv.emplace(a.op, op);
        }
    }
    return canon(1.0 / a.mag, -a.ang, op);
}

int DDManager::cmp_residual(const Wt& a, const Wt& b) const {
    const XPOperator& oa = ops_[a.op];
    const XPOperator& ob = ops_[b.op];
    if (auto c = oa.x() <=> ob.x(); c != 0) return c < 0 ? -1 : 1;
    if (auto c = oa.z() <=> ob.z(); c != 0) return c < 0 ? -1 : 1;
    if (a.mag != b.mag) return a.mag < b.mag ? -1 : 1;
    if (a.ang != b.ang) return a.ang < b.ang ? -1 : 1;
    const auto pa = oa.phase() % 2, pb = ob.phase() % 2;
    if (pa != pb) return pa < pb ? -1 : 1;
    return 0;
}

// ---- nodes ------------------------------------------------------------------

NodeId DDManager::find_or_make(const Node& n) {
    NodeKey key{n.level, n.lo, n.hi, n.hw, n.lo_zero};
    auto it = impl_->unique.find(key);
    if (it != impl_->unique.end()) {
        ++stats_.unique_hits;
        return it->second;
    }
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(n);
    impl_->unique.emplace(key, id);
    stats_.nodes = nodes_.size();
    return id;
}

Diagram DDManager::low(NodeId id) {
    const Node n = nodes_[id];
    if (id == kTerminal) throw DDError("terminal has no children");
    if (n.lo_zero) return zero(n.child_set);
    return Diagram{unit_wt(sets_[n.child_set].size()), n.lo, n.child_set};
}

Diagram DDManager::high(NodeId id) {
    const Node n = nodes_[id];
    if (id == kTerminal) throw DDError("terminal has no children");
    if (n.hw.is_zero()) return zero(n.child_set);
    return Diagram{n.hw, n.hi, n.child_set};
}

Diagram DDManager::zero(SetId set) { return Diagram{zero_wt(sets_[set].size()), kTerminal, set}; }

Diagram DDManager::constant(cplx c) {
    const double m = std::abs(c);
    if (m < kTolerance) return zero(0);
    return Diagram{canon(m, std::arg(c) / (2 * std::numbers::pi), identity_op(0)), kTerminal, 0};
}

Diagram DDManager::loc_norm(std::uint32_t x, const Diagram& f0, const Diagram& f1) {
    if (f0.set != f1.set) throw DDError("loc_norm: children range over different indices");
    const SetId cs = f0.set;
    if (!sets_[cs].empty() && sets_[cs].front() <= x)
        throw DDError("loc_norm: index must precede the children's indices");
    const SetId s = set_insert(cs, x);
    const std::size_t crank = sets_[cs].size();
    if (f0.is_zero() && f1.is_zero()) return zero(s);

    Node n;
    n.level = x;
    n.set = s;
    n.child_set = cs;
    Wt incoming;

    if (cfg_.mode == Mode::tdd) {
        if (!f0.is_zero()) {
            n.lo = f0.node;
            n.hw = f1.is_zero() ? zero_wt(crank) : wmul(winv(f0.w), f1.w);
            n.hi = n.hw.is_zero() ? kTerminal : f1.node;
            incoming = Wt{f0.w.mag, f0.w.ang, identity_op(crank + 1)};
        } else {
            n.lo_zero = true;
            n.hi = f1.node;
            n.hw = unit_wt(crank);
            incoming = Wt{f1.w.mag, f1.w.ang, identity_op(crank + 1)};
        }
        return Diagram{incoming, find_or_make(n), s};
    }

    if (f0.is_zero() || f1.is_zero()) {
        // The surviving child always lands on the high edge.
        const Diagram& f = f0.is_zero() ? f1 : f0;
        const std::uint8_t b = f0.is_zero() ? 0 : 1;
        n.lo_zero = true;
        n.hi = f.node;
        n.hw = unit_wt(crank);
        incoming = Wt{f.w.mag, f.w.ang, op_prepend(f.w.op, b, 0)};
        return Diagram{incoming, find_or_make(n), s};
    }

    Diagram a = f0, c = f1;
    std::uint8_t b = 0;
    if (a.node > c.node) {
        std::swap(a, c);
        b = 1;
    }
    const bool same = a.node == c.node;
    Wt w;
    Wt base;
    bool swapped = false;
    if (cfg_.stab == StabMode::full) {
        MinWeight mw = min_weight(*this, to_lim(a.w), a.node, to_lim(c.w), c.node, same);
        swapped = mw.swapped;
        w = to_wt(mw.w_min);
        base = swapped ? to_wt(lim_mul(to_lim(c.w), LimWeight(1.0, 0.0, mw.g1)))
                       : to_wt(lim_mul(to_lim(a.w), LimWeight(1.0, 0.0, mw.g0)));
    } else {
        w = wmul(winv(a.w), c.w);
        base = a.w;
        if (same) {
            Wt w1 = wmul(winv(c.w), a.w);
            if (cmp_residual(w1, w) < 0) {
                w = w1;
                base = c.w;
                swapped = true;
            }
        }
    }
    const std::int64_t p = ops_[w.op].phase();
    const std::int64_t k = p / 2;
    n.lo = a.node;
    n.hi = c.node;
    n.hw = Wt{w.mag, w.ang, op_with_phase(w.op, p - 2 * k)};
    const std::uint8_t top_x = b ^ (swapped ? 1 : 0);
    incoming = Wt{base.mag, base.ang, op_prepend(base.op, top_x, static_cast<std::uint32_t>(k))};
    return Diagram{incoming, find_or_make(n), s};
}

Diagram DDManager::make_dd(const LimWeight& w, std::string_view x, const Diagram& f0,
                           const Diagram& f1) {
    const std::uint32_t pos = order_.ensure(x);
    return apply(w, loc_norm(pos, f0, f1));
}

Diagram DDManager::apply(const LimWeight& w, const Diagram& d) {
    if (w.rank() != sets_[d.set].size()) throw DDError("apply: weight rank differs from diagram rank");
    if (d.is_zero()) return d;
    const Wt r = wmul(to_wt(w), d.w);
    if (r.is_zero()) return zero(d.set);
    return Diagram{r, d.node, d.set};
}

Diagram DDManager::scale(cplx c, const Diagram& d) {
    return apply(LimWeight::from_complex(c, XPOperator::identity(cfg_.precision, sets_[d.set].size())), d);
}

Diagram DDManager::generate(const DenseTensor& t) {
    std::vector<std::string> sorted = t.indices;
    order_.sort(sorted);
    const DenseTensor s = dense_permute(t, sorted);
    std::vector<std::uint32_t> pos;
    for (const auto& n : sorted) pos.push_back(order_.position(n));
    const std::size_t n = pos.size();
    std::vector<SetId> suffix(n + 1, 0);
    for (std::size_t i = n; i-- > 0;) suffix[i] = set_insert(suffix[i + 1], pos[i]);

    auto rec = [&](auto&& self, std::size_t level, std::size_t offset) -> Diagram {
        if (level == n) return constant(s.data[offset]);
        const std::size_t half = std::size_t{1} << (n - level - 1);
        Diagram lo = self(self, level + 1, offset);
        Diagram hi = self(self, level + 1, offset + half);
        return loc_norm(pos[level], lo, hi);
    };
    Diagram d = rec(rec, 0, 0);
    if (d.is_zero()) return zero(suffix[0]);
    return d;
}

// ---- slicing ----------------------------------------------------------------

Diagram DDManager::slice(const Diagram& d, std::string_view x, int c) {
    auto p = order_.find(x);
    if (!p) return d;
    return slice_pos(d, *p, c);
}

Diagram DDManager::slice_pos(const Diagram& d, std::uint32_t x, int c) {
    const int j = set_find(d.set, x);
    if (j < 0) return d;
    const SetId rest_set = set_remove(d.set, x);
    if (d.is_zero()) return zero(rest_set);
    const XPOperator& op = ops_[d.w.op];
    const int b = cfg_.precision ? op.x(std::size_t(j)) : 0;
    const std::int64_t z = cfg_.precision ? op.z(std::size_t(j)) : 0;
    const int dd = (c & 1) ^ b;
    const Wt rest{d.w.mag, d.w.ang, op_drop(d.w.op, std::size_t(j), 2 * z * dd)};
    Diagram sub;
    if (j == 0) {
        sub = dd ? high(d.node) : low(d.node);
    } else {
        sub = slice_node(d.node, x, dd);
    }
    if (sub.is_zero()) return zero(rest_set);
    const Wt w = wmul(rest, sub.w);
    if (w.is_zero()) return zero(rest_set);
    return Diagram{w, sub.node, rest_set};
}

Diagram DDManager::slice_node(NodeId v, std::uint32_t x, int d) {
    const std::uint64_t key = (std::uint64_t(v) << 32) | (std::uint64_t(x) << 1) | std::uint64_t(d);
    auto it = impl_->slice_cache.find(key);
    if (it != impl_->slice_cache.end()) return it->second;
    const Node n = nodes_[v];
    Diagram lo = slice_pos(low(v), x, d);
    Diagram hi = slice_pos(high(v), x, d);
    Diagram r = loc_norm(n.level, lo, hi);
    impl_->slice_cache.emplace(key, r);
    maybe_flush();
    return r;
}

// ---- addition ---------------------------------------------------------------

Diagram DDManager::add(const Diagram& f, const Diagram& g) {
    if (f.is_zero() && g.is_zero()) return zero(set_union(f.set, g.set));
    if (f.is_zero() && set_subset(f.set, g.set)) return g;
    if (g.is_zero() && set_subset(g.set, f.set)) return f;

    if (f.set == g.set && !f.is_zero() && !g.is_zero()) {
        const XPOperator& of = ops_[f.w.op];
        const XPOperator& og = ops_[g.w.op];
        if (f.node == g.node && of.x() == og.x() && of.z() == og.z()) {
            const cplx sum = to_lim(f.w).coefficient() + to_lim(g.w).coefficient();
            if (std::abs(sum) < kTolerance) return zero(f.set);
            const OpId bare = op_with_phase(f.w.op, 0);
            return Diagram{canon(std::abs(sum), std::arg(sum) / (2 * std::numbers::pi), bare), f.node,
                           f.set};
        }
        const Diagram* a = &f;
        const Diagram* b = &g;
        if (g.node < f.node || (g.node == f.node && lim_compare(to_lim(g.w), to_lim(f.w)) < 0))
            std::swap(a, b);
        const Wt rel = wmul(winv(a->w), b->w);
        const Wt unit = unit_wt(sets_[f.set].size());
        PairKey key{a->node, b->node, unit, rel, f.set, f.set, 0};
        Diagram r;
        auto it = impl_->add_cache.find(key);
        if (it != impl_->add_cache.end()) {
            ++stats_.add_hits;
            r = it->second;
        } else {
            r = add_core(Diagram{unit, a->node, f.set}, Diagram{rel, b->node, f.set});
            impl_->add_cache.emplace(key, r);
            maybe_flush();
        }
        if (r.is_zero()) return r;
        const Wt w = wmul(a->w, r.w);
        if (w.is_zero()) return zero(r.set);
        return Diagram{w, r.node, r.set};
    }

    PairKey key{f.node, g.node, f.w, g.w, f.set, g.set, 0};
    auto it = impl_->add_cache.find(key);
    if (it != impl_->add_cache.end()) {
        ++stats_.add_hits;
        return it->second;
    }
    Diagram r = add_core(f, g);
    impl_->add_cache.emplace(key, r);
    maybe_flush();
    return r;
}

Diagram DDManager::add_core(const Diagram& f, const Diagram& g) {
    const SetId u = set_union(f.set, g.set);
    if (sets_[u].empty()) {
        const cplx sum = to_lim(f.w).coefficient() + to_lim(g.w).coefficient();
        return constant(sum);
    }
    const std::uint32_t x = sets_[u].front();
    Diagram lo = add(slice_pos(f, x, 0), slice_pos(g, x, 0));
    Diagram hi = add(slice_pos(f, x, 1), slice_pos(g, x, 1));
    return loc_norm(x, lo, hi);
}

// ---- contraction ------------------------------------------------------------

Diagram DDManager::contract(const Diagram& f, const Diagram& g, const std::vector<std::string>& var) {
    std::vector<std::uint32_t> p;
    for (const auto& n : var) {
        auto pos = order_.find(n);
        if (!pos || set_find(f.set, *pos) < 0 || set_find(g.set, *pos) < 0)
            throw DDError("contract: index '" + n + "' is not shared by both operands");
        p.push_back(*pos);
    }
    return contract_set(f, g, set_of(p));
}

Diagram DDManager::contract_set(const Diagram& f, const Diagram& g, SetId var) {
    const SetId both = set_union(f.set, g.set);
    const SetId result_set = set_minus(both, var);
    if (f.is_zero() || g.is_zero()) return zero(result_set);

    const SetId absent = set_minus(var, both);
    const std::size_t doubling = sets_[absent].size();
    if (doubling) var = set_minus(var, absent);

    const auto& sf = sets_[f.set];
    const auto& sg = sets_[g.set];
    const auto& sr = sets_[result_set];
    const std::uint32_t N = cfg_.precision;
    OpId mf, mg, ro;
    const SplitKey skey{f.w.op, g.w.op, f.set, g.set, var};
    if (auto hit = impl_->split_cache.find(skey); hit != impl_->split_cache.end()) {
        mf = hit->second.mf;
        mg = hit->second.mg;
        ro = hit->second.ro;
    } else {
        std::int64_t phase = 0;
        if (N == 0) {
            mf = identity_op(sf.size());
            mg = identity_op(sg.size());
            ro = identity_op(sr.size());
        } else {
            const XPOperator fo = ops_[f.w.op];
            const XPOperator go = ops_[g.w.op];
            phase = std::int64_t(fo.phase()) + go.phase();
            std::vector<std::uint8_t> fx(sf.size(), 0), gx(sg.size(), 0), rx(sr.size(), 0);
            std::vector<std::uint32_t> fz(sf.size(), 0), gz(sg.size(), 0), rz(sr.size(), 0);
            const std::int64_t n = N;
            auto in = [](const std::vector<std::uint32_t>& v, std::uint32_t p) {
                auto it = std::lower_bound(v.begin(), v.end(), p);
                return it != v.end() && *it == p ? int(it - v.begin()) : -1;
            };
            const auto& sv = sets_[var];
            for (std::size_t i = 0; i < sf.size(); ++i) {
                const std::uint32_t pos = sf[i];
                const int jg = in(sg, pos);
                if (in(sv, pos) >= 0) {
                    if (jg >= 0) {
                        // transpose(B) * A lands on F; G keeps the identity there
                        const std::int64_t bx = go.x(jg), bz = go.z(jg);
                        const std::int64_t ax = fo.x(i), az = fo.z(i);
                        // (X P^z)^T = w^{2z} X P^{-z}; a bare P^z is symmetric
                        const std::int64_t tz = bx ? ((-bz) % n + n) % n : bz;
                        phase += 2 * bx * bz + 2 * ax * tz;
                        fx[i] = std::uint8_t(bx ^ ax);
                        fz[i] = std::uint32_t((((tz + az - 2 * ax * tz) % n) + n) % n);
                    } else {
                        fx[i] = fo.x(i);
                        fz[i] = fo.z(i);
                    }
                } else if (jg >= 0) {
                    fx[i] = fo.x(i);
                    fz[i] = fo.z(i);
                } else {
                    const int r = in(sr, pos);
                    rx[r] = fo.x(i);
                    rz[r] = fo.z(i);
                }
            }
            for (std::size_t j = 0; j < sg.size(); ++j) {
                const std::uint32_t pos = sg[j];
                const bool shared = in(sf, pos) >= 0;
                if (in(sv, pos) >= 0) {
                    if (!shared) {
                        gx[j] = go.x(j);
                        gz[j] = go.z(j);
                    }
                } else if (shared) {
                    gx[j] = go.x(j);
                    gz[j] = go.z(j);
                } else {
                    const int r = in(sr, pos);
                    rx[r] = go.x(j);
                    rz[r] = go.z(j);
                }
            }
            mf = intern_op(XPOperator(N, 0, std::move(fx), std::move(fz)));
            mg = intern_op(XPOperator(N, 0, std::move(gx), std::move(gz)));
            ro = intern_op(XPOperator(N, phase, std::move(rx), std::move(rz)));
        }
        impl_->split_cache.emplace(skey, SplitOps{mf, mg, ro});
    }

    const Wt uf{1.0, 0.0, mf};
    const Wt ug{1.0, 0.0, mg};
    PairKey key{f.node, g.node, uf, ug, f.set, g.set, var};
    Diagram r;
    auto it = impl_->cont_cache.find(key);
    if (it != impl_->cont_cache.end()) {
        ++stats_.cont_hits;
        r = it->second;
    } else {
        r = cont_core(Diagram{uf, f.node, f.set}, Diagram{ug, g.node, g.set}, var);
        impl_->cont_cache.emplace(key, r);
        maybe_flush();
    }
    if (r.is_zero()) return zero(result_set);
    const Wt outer = canon(f.w.mag * g.w.mag * std::ldexp(1.0, int(doubling)), f.w.ang + g.w.ang, ro);
    const Wt w = wmul(outer, r.w);
    if (w.is_zero()) return zero(result_set);
    return Diagram{w, r.node, result_set};
}

Diagram DDManager::cont_core(const Diagram& f, const Diagram& g, SetId var) {
    const auto& sf = sets_[f.set];
    const auto& sg = sets_[g.set];
    if (sf.empty() && sg.empty()) {
        const Wt w = wmul(f.w, g.w);
        if (w.is_zero()) return zero(0);
        return Diagram{w, kTerminal, 0};
    }
    std::uint32_t x = kNoLevel;
    if (!sf.empty()) x = sf.front();
    if (!sg.empty()) x = std::min(x, sg.front());
    const Diagram f0 = slice_pos(f, x, 0), f1 = slice_pos(f, x, 1);
    const Diagram g0 = slice_pos(g, x, 0), g1 = slice_pos(g, x, 1);
    if (set_find(var, x) >= 0) {
        const SetId rest = set_remove(var, x);
        const Diagram a = contract_set(f0, g0, rest);
        const Diagram b = contract_set(f1, g1, rest);
        return add(a, b);
    }
    const Diagram a = contract_set(f0, g0, var);
    const Diagram b = contract_set(f1, g1, var);
    return loc_norm(x, a, b);
}

void DDManager::maybe_flush() {
    auto& im = *impl_;
    if (im.add_cache.size() + im.cont_cache.size() + im.slice_cache.size() > cfg_.cache_limit) {
        clear_caches();
        ++stats_.cache_flushes;
    }
}

void DDManager::clear_caches() {
    impl_->add_cache.clear();
    impl_->cont_cache.clear();
    impl_->slice_cache.clear();
    impl_->split_cache.clear();
}

// ---- inspection -------------------------------------------------------------

DenseTensor DDManager::to_tensor(const Diagram& d) {
    std::vector<std::string> idx = names(d.set);
    if (idx.size() > kDenseRankCap) throw DDError("to_tensor: rank above dense cap");
    if (d.is_zero()) return DenseTensor::zeros(idx);
    std::unordered_map<NodeId, std::vector<cplx>> memo;
    auto vec = [&](auto&& self, NodeId v) -> const std::vector<cplx>& {
        auto it = memo.find(v);
        if (it != memo.end()) return it->second;
        std::vector<cplx> out;
        if (v == kTerminal) {
            out = {1.0};
        } else {
            const Node n = nodes_[v];
            const std::size_t half = std::size_t{1} << sets_[n.child_set].size();
            std::vector<cplx> lo(half), hi(half);
            if (!n.lo_zero) lo = self(self, n.lo);
            if (!n.hw.is_zero()) hi = apply_vec(to_lim(n.hw), self(self, n.hi));
            out = std::move(lo);
            out.insert(out.end(), hi.begin(), hi.end());
        }
        return memo.emplace(v, std::move(out)).first->second;
    };
    std::vector<cplx> data = apply_vec(to_lim(d.w), vec(vec, d.node));
    return DenseTensor(std::move(idx), std::move(data));
}

cplx DDManager::amplitude(const Diagram& d, const std::unordered_map<std::string, int>& assignment) {
    std::vector<std::uint8_t> bits;
    for (auto p : sets_[d.set]) {
        auto it = assignment.find(order_.name(p));
        if (it == assignment.end()) throw DDError("amplitude: no value for index '" + order_.name(p) + "'");
        bits.push_back(std::uint8_t(it->second & 1));
    }
    return amplitude_bits(d, bits);
}

cplx DDManager::amplitude_bits(const Diagram& d, std::span<const std::uint8_t> bits) {
    if (bits.size() != sets_[d.set].size()) throw DDError("amplitude: assignment length mismatch");
    if (d.is_zero()) return 0.0;
    Wt w = d.w;
    NodeId v = d.node;
    std::size_t i = 0;
    while (v != kTerminal) {
        const XPOperator& op = ops_[w.op];
        const int b = cfg_.precision ? op.x(0) : 0;
        const std::int64_t z = cfg_.precision ? op.z(0) : 0;
        const int dd = bits[i] ^ b;
        const Wt rest{w.mag, w.ang, op_drop(w.op, 0, 2 * z * dd)};
        const Diagram child = dd ? high(v) : low(v);
        if (child.is_zero()) return 0.0;
        w = wmul(rest, child.w);
        v = child.node;
        ++i;
    }
    return to_lim(w).coefficient();
}

std::size_t DDManager::size(const Diagram& d) {
    if (d.is_zero() || d.node == kTerminal) return 1;
    auto& im = *impl_;
    if (im.stamp.size() < nodes_.size()) im.stamp.resize(nodes_.size() + nodes_.size() / 2, 0);
    if (++im.epoch == 0) {
        std::fill(im.stamp.begin(), im.stamp.end(), 0);
        im.epoch = 1;
    }
    std::size_t count = 1;  // terminal
    std::vector<NodeId> stack{d.node};
    im.stamp[d.node] = im.epoch;
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        const Node& n = nodes_[v];
        // tdd mode keeps every level; the reduced TDD has no node where both
        // branches are the same unit-weighted child
        const bool redundant = cfg_.mode == Mode::tdd && !n.lo_zero && n.lo == n.hi && n.hw.mag == 1.0 &&
                               n.hw.ang == 0.0;
        if (!redundant) ++count;
        for (NodeId c : {n.lo_zero ? kTerminal : n.lo, n.hw.is_zero() ? kTerminal : n.hi}) {
            if (c == kTerminal || im.stamp[c] == im.epoch) continue;
            im.stamp[c] = im.epoch;
            stack.push_back(c);
        }
    }
    return count;
}

std::size_t DDManager::checkpoint(const Diagram& d) {
    const std::size_t s = size(d);
    stats_.peak_nodes = std::max(stats_.peak_nodes, s);
    return s;
}

std::string DDManager::export_dot(const Diagram& d) {
    std::vector<NodeId> reach;
    if (!d.is_zero()) {
        std::vector<NodeId> stack{d.node};
        std::unordered_map<NodeId, bool> seen{{d.node, true}};
        while (!stack.empty()) {
            const NodeId v = stack.back();
            stack.pop_back();
            reach.push_back(v);
            if (v == kTerminal) continue;
            const Node& n = nodes_[v];
            for (NodeId c : {n.lo_zero ? kTerminal : n.lo, n.hw.is_zero() ? kTerminal : n.hi}) {
                if (seen.emplace(c, true).second) stack.push_back(c);
            }
        }
    }
    if (std::find(reach.begin(), reach.end(), kTerminal) == reach.end()) reach.push_back(kTerminal);
    std::sort(reach.begin(), reach.end());

    auto label = [this](const Wt& w) -> std::string {
        if (w.is_zero()) return "0";
        if (w.mag == 1.0 && w.ang == 0.0 && op_is_identity_[w.op]) return "";
        if (cfg_.mode == Mode::tdd) {
            std::ostringstream os;
            os << w.mag << "∠" << w.ang;
            return os.str();
        }
        return to_string(to_lim(w));
    };
    auto edge = [&](std::ostringstream& os, const std::string& from, NodeId to, const Wt& w,
                    bool dashed) {
        os << "  " << from << " -> n" << to << " [";
        if (dashed) os << "style=dashed";
        const std::string l = label(w);
        if (!l.empty()) os << (dashed ? ", " : "") << "label=\"" << l << "\"";
        os << "];\n";
    };

    std::ostringstream os;
    os << "digraph LimTDD {\n";
    os << "  root [shape=point];\n";
    for (NodeId v : reach) {
        if (v == kTerminal) {
            os << "  n0 [shape=box, label=\"1\"];\n";
        } else {
            os << "  n" << v << " [shape=circle, label=\"" << order_.name(nodes_[v].level) << "\"];\n";
        }
    }
    edge(os, "root", d.is_zero() ? kTerminal : d.node, d.w, false);
    for (NodeId v : reach) {
        if (v == kTerminal) continue;
        const Node n = nodes_[v];
        const std::string from = "n" + std::to_string(v);
        edge(os, from, n.lo_zero ? kTerminal : n.lo,
             n.lo_zero ? zero_wt(0) : unit_wt(0), true);
        edge(os, from, n.hw.is_zero() ? kTerminal : n.hi, n.hw, false);
    }
    os << "}\n";
    return os.str();
}

}  // namespace limtdd
