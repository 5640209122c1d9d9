#include "limtdd/stabilizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

namespace limtdd {

StabGroup::StabGroup(std::uint32_t precision, std::size_t rank) : precision_(precision), rank_(rank) {}

StabGroup StabGroup::trivial(std::uint32_t precision, std::size_t rank) {
    StabGroup g(precision, rank);
    g.insert(XPOperator::identity(precision, rank));
    return g;
}

const XPOperator* StabGroup::find_xz(const XPOperator& a) const {
    auto it = by_xz_.find(a.with_phase(0));
    return it == by_xz_.end() ? nullptr : &elements_[it->second];
}

bool StabGroup::contains(const XPOperator& a) const {
    const XPOperator* e = find_xz(a);
    return e && *e == a;
}

void StabGroup::insert(XPOperator a) {
    XPOperator key = a.with_phase(0);
    if (by_xz_.count(key)) return;
    by_xz_.emplace(std::move(key), elements_.size());
    elements_.push_back(std::move(a));
}

void StabGroup::mark_degraded() {
    elements_.clear();
    by_xz_.clear();
    degraded_ = true;
    insert(XPOperator::identity(precision_, rank_));
}

StabGroup stab_rank1(const LimWeight& low, const LimWeight& high, std::uint32_t precision) {
    StabGroup g(precision, 1);
    const std::int64_t n = precision;
    if (low.is_zero() && high.is_zero()) {
        // Every diagonal-free operator fixes the zero vector; not a node.
        g.insert(XPOperator::identity(precision, 1));
        return g;
    }
    if (low.is_zero()) {
        // [0, 1]: w^{-2z} P^z
        for (std::int64_t z = 0; z < n; ++z) g.insert(XPOperator(precision, -2 * z, {0}, {std::uint32_t(z)}));
        return g;
    }
    const LimWeight c = lim_mul(lim_inverse(low), high);
    if (c.is_zero()) {
        for (std::int64_t z = 0; z < n; ++z) g.insert(XPOperator(precision, 0, {0}, {std::uint32_t(z)}));
        return g;
    }
    g.insert(XPOperator::identity(precision, 1));
    if (std::abs(c.magnitude() - 1.0) < kTolerance && c.angle() < kTolerance) {
        // c = w^p: w^p X P^{-p}
        const std::int64_t p = c.op().phase();
        const std::int64_t z = n ? ((-p) % n + n) % n : 0;
        g.insert(XPOperator(precision, p, {1}, {std::uint32_t(z)}));
    }
    return g;
}

const StabGroup& StabCache::group(NodeId v) {
    auto it = memo_.find(v);
    if (it != memo_.end()) return it->second;
    StabGroup g = compute(v);
    if (g.degraded()) ++degraded_;
    return memo_.emplace(v, std::move(g)).first->second;
}

StabGroup StabCache::compute(NodeId v) {
    const std::uint32_t N = mgr_.precision();
    if (v == kTerminal) return StabGroup::trivial(N, 0);
    const Node n = mgr_.node(v);
    const std::size_t crank = mgr_.positions(n.child_set).size();
    const std::size_t cap = mgr_.config().stab_cap;
    StabGroup out(N, crank + 1);
    const std::int64_t two_n = 2 * std::int64_t(N);
    auto lift_phase = [two_n](std::int64_t target, std::int64_t have) -> std::int64_t {
        // z with 2z = target - have (mod 2N), or -1
        if (two_n == 0) return target == have ? 0 : -1;
        const std::int64_t diff = ((target - have) % two_n + two_n) % two_n;
        return diff % 2 == 0 ? diff / 2 : -1;
    };

    if (N == 0) return StabGroup::trivial(N, crank + 1);

    const StabGroup& g1 = group(n.hi);
    if (n.lo_zero) {
        // [0; u]: P^z (x) w^{-2z} t for t in stab(u)
        if (g1.size() * N > cap) {
            out.mark_degraded();
            return out;
        }
        for (std::int64_t z = 0; z < std::int64_t(N); ++z)
            for (const auto& t : g1.elements())
                out.insert(t.with_phase(std::int64_t(t.phase()) - 2 * z).prepend(0, std::uint32_t(z)));
        if (g1.degraded()) out.flag_degraded();
        return out;
    }

    const StabGroup& g0 = group(n.lo);
    const LimWeight h = mgr_.to_lim(n.hw);
    const XPOperator& hop = h.op();
    const XPOperator hinv = xp_inverse(hop);

    // Diagonal top factor: s in stab(v0) and w^{2z} h^-1 s h in stab(v1).
    for (const auto& s : g0.elements()) {
        const XPOperator t = xp_mul(xp_mul(hinv, s), hop);
        const XPOperator* u = g1.find_xz(t);
        if (!u) continue;
        const std::int64_t z = lift_phase(u->phase(), t.phase());
        if (z < 0) continue;
        out.insert(s.prepend(0, std::uint32_t(z)));
        if (out.size() > cap) {
            out.mark_degraded();
            return out;
        }
    }
    // Flipping top factor: only possible when both halves are the same node
    // and the high weight has no leftover scalar.
    if (n.lo == n.hi && std::abs(h.magnitude() - 1.0) < kTolerance && h.angle() < kTolerance) {
        for (const auto& s : g0.elements()) {
            const XPOperator gp = xp_mul(hop, s);
            const XPOperator t = xp_mul(gp, hop);
            const XPOperator* u = g0.find_xz(t);
            if (!u) continue;
            const std::int64_t z = lift_phase(u->phase(), t.phase());
            if (z < 0) continue;
            out.insert(gp.prepend(1, std::uint32_t(z)));
            if (out.size() > cap) {
                out.mark_degraded();
                return out;
            }
        }
    }
    if (g0.degraded() || g1.degraded()) out.flag_degraded();
    return out;
}

const StabGroup& stab_node(DDManager& mgr, NodeId v) { return mgr.stab_cache().group(v); }

namespace {

LimWeight residual_of(const LimWeight& w) { return phase_extract(w).residual; }

}  // namespace

MinWeight min_weight(DDManager& mgr, const LimWeight& w0, NodeId v0, const LimWeight& w1, NodeId v1,
                     bool allow_swap) {
    const bool full = mgr.config().stab == StabMode::full && mgr.mode() == Mode::limtdd;
    const std::uint32_t N = w0.precision();
    const std::size_t rank = w0.rank();
    StabGroup triv = StabGroup::trivial(N, rank);
    const StabGroup& s0 = full ? stab_node(mgr, v0) : triv;
    const StabGroup& s1 = full ? stab_node(mgr, v1) : triv;

    struct Best {
        bool set = false;
        LimWeight w, res;
        XPOperator g0, g1;
    };
    // Scans g_a^-1 wa^-1 wb g_b. The scalar part is the same for every pair,
    // so candidates are ranked on (x, z, phase parity) with integer keys and
    // only the winner is built as a weight. Ties go to the smaller wa g_a.
    auto scan = [N](const LimWeight& wa, const StabGroup& ga, const LimWeight& wb, const StabGroup& gb) {
        const LimWeight m = lim_mul(lim_inverse(wa), wb);
        const std::size_t r = m.rank();
        const std::int64_t n = std::max<std::int64_t>(N, 1), two_n = 2 * n;
        std::vector<std::uint8_t> bx(r), cx(r);
        std::vector<std::uint32_t> bz(r), cz(r);
        std::int64_t bp = 0;
        const XPOperator* best_a = nullptr;
        const XPOperator* best_b = nullptr;
        XPOperator best_base;
        for (const auto& a : ga.elements()) {
            const XPOperator left = xp_mul(xp_inverse(a), m.op());
            for (const auto& b : gb.elements()) {
                int c = best_a ? 0 : -1;
                for (std::size_t i = 0; i < r; ++i) {
                    cx[i] = left.x(i) ^ b.x(i);
                    if (c == 0 && cx[i] != bx[i]) c = cx[i] < bx[i] ? -1 : 1;
                }
                if (c > 0) continue;
                std::int64_t ph = std::int64_t(left.phase()) + b.phase();
                for (std::size_t i = 0; i < r; ++i) {
                    const std::int64_t z1 = left.z(i), x2 = b.x(i);
                    ph += 2 * x2 * z1;
                    cz[i] = std::uint32_t((((z1 + b.z(i) - 2 * x2 * z1) % n) + n) % n);
                    if (c == 0 && cz[i] != bz[i]) c = cz[i] < bz[i] ? -1 : 1;
                }
                if (c > 0) continue;
                const std::int64_t cp = ((ph % two_n) + two_n) % two_n % 2;
                if (c == 0 && cp != bp) c = cp < bp ? -1 : 1;
                if (c > 0) continue;
                if (c == 0) {
                    XPOperator base = xp_mul(wa.op(), a);
                    const bool smaller = std::tie(base.x(), base.z()) < std::tie(best_base.x(), best_base.z()) ||
                                         (base.x() == best_base.x() && base.z() == best_base.z() &&
                                          base.phase() < best_base.phase());
                    if (!smaller) continue;
                    best_base = std::move(base);
                } else {
                    best_base = xp_mul(wa.op(), a);
                }
                best_a = &a;
                best_b = &b;
                std::swap(bx, cx);
                std::swap(bz, cz);
                bp = cp;
            }
        }
        Best best;
        best.set = true;
        best.g0 = *best_a;
        best.g1 = *best_b;
        best.w = lim_mul(lim_mul(LimWeight(1.0, 0.0, xp_inverse(*best_a)), m), LimWeight(1.0, 0.0, *best_b));
        best.res = residual_of(best.w);
        return best;
    };

    Best fwd = scan(w0, s0, w1, s1);
    MinWeight out{fwd.w, fwd.g0, fwd.g1, false};
    if (allow_swap && v0 == v1) {
        Best rev = scan(w1, s1, w0, s0);
        if (lim_compare(rev.res, fwd.res) < 0) {
            out.w_min = rev.w;
            out.g0 = rev.g1;
            out.g1 = rev.g0;
            out.swapped = true;
        }
    }
    return out;
}

std::string dump(const StabGroup& g) {
    std::ostringstream os;
    os << "stab group, rank " << g.rank() << ", " << g.size() << " elements";
    if (g.degraded()) os << " (degraded)";
    os << "\n";
    for (const auto& e : g.elements()) os << "  " << to_string(e) << "\n";
    return os.str();
}

}  // namespace limtdd
