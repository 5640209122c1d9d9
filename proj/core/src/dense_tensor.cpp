#include "limtdd/dense_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include <json.hpp>

namespace limtdd {

std::uint32_t IndexOrder::ensure(std::string_view name) {
    std::string key(name);
    auto it = pos_.find(key);
    if (it != pos_.end()) return it->second;
    const auto p = static_cast<std::uint32_t>(names_.size());
    names_.push_back(key);
    pos_.emplace(std::move(key), p);
    return p;
}

std::optional<std::uint32_t> IndexOrder::find(std::string_view name) const {
    auto it = pos_.find(std::string(name));
    if (it == pos_.end()) return std::nullopt;
    return it->second;
}

std::uint32_t IndexOrder::position(std::string_view name) const {
    auto p = find(name);
    if (!p) throw std::out_of_range("unknown index '" + std::string(name) + "'");
    return *p;
}

void IndexOrder::sort(std::vector<std::string>& names) {
    for (const auto& n : names) ensure(n);
    std::sort(names.begin(), names.end(),
              [this](const std::string& a, const std::string& b) { return position(a) < position(b); });
}

namespace {

void check_rank(std::size_t n, const char* what) {
    if (n > kDenseRankCap) throw DenseError(std::string(what) + ": rank above dense cap");
}

// Bit of axis `axis` in a rank-n linear position.
inline std::size_t bit_of(std::size_t pos, std::size_t axis, std::size_t n) {
    return (pos >> (n - 1 - axis)) & 1u;
}

// For every axis of `src`, the axis in `dst` carrying the same name, or -1.
std::vector<int> axis_map(const std::vector<std::string>& src, const std::vector<std::string>& dst) {
    std::vector<int> m(src.size(), -1);
    for (std::size_t i = 0; i < src.size(); ++i) {
        auto it = std::find(dst.begin(), dst.end(), src[i]);
        if (it != dst.end()) m[i] = int(it - dst.begin());
    }
    return m;
}

// Linear position in a tensor with axes mapped onto the bits of `pos` (a
// rank-n assignment). Axes mapped to -1 must not occur.
std::size_t gather(std::size_t pos, std::size_t n, const std::vector<int>& map) {
    std::size_t out = 0;
    for (int a : map) out = (out << 1) | bit_of(pos, std::size_t(a), n);
    return out;
}

void check_unique(const std::vector<std::string>& idx) {
    std::unordered_set<std::string> seen;
    for (const auto& s : idx)
        if (!seen.insert(s).second) throw DenseError("duplicate index '" + s + "'");
}

std::vector<std::string> union_indices(const DenseTensor& a, const DenseTensor& b,
                                       const std::vector<std::string>& skip) {
    std::vector<std::string> out;
    auto keep = [&](const std::string& s) {
        return std::find(skip.begin(), skip.end(), s) == skip.end() &&
               std::find(out.begin(), out.end(), s) == out.end();
    };
    for (const auto& s : a.indices)
        if (keep(s)) out.push_back(s);
    for (const auto& s : b.indices)
        if (keep(s)) out.push_back(s);
    return out;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::string> idx, std::vector<cplx> values)
    : indices(std::move(idx)), data(std::move(values)) {
    check_rank(indices.size(), "DenseTensor");
    check_unique(indices);
    if (data.size() != (std::size_t{1} << indices.size()))
        throw DenseError("DenseTensor: data length is not 2^rank");
}

DenseTensor DenseTensor::scalar(cplx v) { return DenseTensor({}, {v}); }

DenseTensor DenseTensor::zeros(std::vector<std::string> idx) {
    check_rank(idx.size(), "zeros");
    const std::size_t len = std::size_t{1} << idx.size();
    return DenseTensor(std::move(idx), std::vector<cplx>(len));
}

int DenseTensor::find(std::string_view name) const {
    for (std::size_t i = 0; i < indices.size(); ++i)
        if (indices[i] == name) return int(i);
    return -1;
}

cplx DenseTensor::at(std::span<const std::uint8_t> bits) const {
    if (bits.size() != rank()) throw DenseError("at: assignment length mismatch");
    std::size_t pos = 0;
    for (auto b : bits) pos = (pos << 1) | (b & 1u);
    return data[pos];
}

DenseTensor dense_slice(const DenseTensor& t, std::string_view x, int c) {
    const int axis = t.find(x);
    if (axis < 0) return t;
    const std::size_t n = t.rank();
    std::vector<std::string> idx;
    for (std::size_t i = 0; i < n; ++i)
        if (int(i) != axis) idx.push_back(t.indices[i]);
    DenseTensor out = DenseTensor::zeros(idx);
    const std::size_t low_bits = n - 1 - std::size_t(axis);
    for (std::size_t r = 0; r < out.data.size(); ++r) {
        const std::size_t hi = r >> low_bits, lo = r & ((std::size_t{1} << low_bits) - 1);
        const std::size_t src = (((hi << 1) | std::size_t(c & 1)) << low_bits) | lo;
        out.data[r] = t.data[src];
    }
    return out;
}

DenseTensor dense_permute(const DenseTensor& t, const std::vector<std::string>& order) {
    if (order.size() != t.rank()) throw DenseError("permute: not a permutation");
    auto map = axis_map(t.indices, order);
    for (int m : map)
        if (m < 0) throw DenseError("permute: not a permutation");
    DenseTensor out = DenseTensor::zeros(order);
    for (std::size_t pos = 0; pos < out.data.size(); ++pos)
        out.data[pos] = t.data[gather(pos, order.size(), map)];
    return out;
}

DenseTensor dense_expand(const DenseTensor& t, const std::vector<std::string>& order) {
    auto map = axis_map(t.indices, order);
    for (int m : map)
        if (m < 0) throw DenseError("expand: target misses an index");
    DenseTensor out = DenseTensor::zeros(order);
    for (std::size_t pos = 0; pos < out.data.size(); ++pos)
        out.data[pos] = t.data[gather(pos, order.size(), map)];
    return out;
}

DenseTensor dense_contract(const DenseTensor& a, const DenseTensor& b,
                           const std::vector<std::string>& var, const IndexOrder* order) {
    check_unique(var);
    for (const auto& v : var)
        if (a.find(v) < 0 || b.find(v) < 0) throw DenseError("contract: '" + v + "' is not shared");
    std::vector<std::string> res = union_indices(a, b, var);
    if (order) {
        for (const auto& s : res)
            if (!order->find(s)) throw DenseError("contract: index missing from order");
        std::sort(res.begin(), res.end(), [order](const std::string& l, const std::string& r) {
            return order->position(l) < order->position(r);
        });
    }
    check_rank(res.size(), "contract");
    // Enumerate (result bits, var bits) as one combined assignment.
    std::vector<std::string> all = res;
    all.insert(all.end(), var.begin(), var.end());
    const std::size_t n = all.size();
    auto ma = axis_map(a.indices, all);
    auto mb = axis_map(b.indices, all);
    DenseTensor out = DenseTensor::zeros(res);
    const std::size_t nv = var.size();
    for (std::size_t r = 0; r < out.data.size(); ++r) {
        cplx acc{};
        for (std::size_t v = 0; v < (std::size_t{1} << nv); ++v) {
            const std::size_t pos = (r << nv) | v;
            acc += a.data[gather(pos, n, ma)] * b.data[gather(pos, n, mb)];
        }
        out.data[r] = acc;
    }
    return out;
}

DenseTensor dense_apply_lim(const LimWeight& w, const DenseTensor& t) {
    const std::size_t n = t.rank();
    if (w.rank() != n) throw DenseError("apply_lim: rank mismatch");
    DenseTensor out = DenseTensor::zeros(t.indices);
    if (w.is_zero()) return out;
    const auto& op = w.op();
    std::size_t flip = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (op.x(i)) flip |= std::size_t{1} << (n - 1 - i);
    const cplx s = w.scalar();
    for (std::size_t col = 0; col < t.data.size(); ++col) {
        std::int64_t k = op.phase();
        for (std::size_t i = 0; i < n; ++i)
            if (bit_of(col, i, n)) k += 2 * std::int64_t(op.z(i));
        out.data[col ^ flip] = s * root_of_unity(op.precision(), k) * t.data[col];
    }
    return out;
}

DenseTensor dense_add(const DenseTensor& a, const DenseTensor& b, const IndexOrder* order) {
    std::vector<std::string> res = union_indices(a, b, {});
    if (order) {
        std::sort(res.begin(), res.end(), [order](const std::string& l, const std::string& r) {
            return order->position(l) < order->position(r);
        });
    }
    DenseTensor ea = dense_expand(a, res);
    DenseTensor eb = dense_expand(b, res);
    for (std::size_t i = 0; i < ea.data.size(); ++i) ea.data[i] += eb.data[i];
    return ea;
}

DenseTensor dense_scale(const DenseTensor& t, cplx s) {
    DenseTensor out = t;
    for (auto& v : out.data) v *= s;
    return out;
}

DenseTensor random_tensor(const std::vector<std::string>& indices, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DenseTensor t = DenseTensor::zeros(indices);
    for (auto& v : t.data) {
        const double re = u(rng);
        v = cplx(re, u(rng));
    }
    return t;
}

double dense_max_diff(const DenseTensor& a, const DenseTensor& b) {
    std::vector<std::string> res = union_indices(a, b, {});
    DenseTensor ea = dense_expand(a, res);
    DenseTensor eb = dense_expand(b, res);
    double m = 0.0;
    for (std::size_t i = 0; i < ea.data.size(); ++i) m = std::max(m, std::abs(ea.data[i] - eb.data[i]));
    return m;
}

bool dense_equal(const DenseTensor& a, const DenseTensor& b, double tol) {
    return dense_max_diff(a, b) < tol;
}

double dense_norm(const DenseTensor& t) {
    double s = 0.0;
    for (const auto& v : t.data) s += std::norm(v);
    return std::sqrt(s);
}

std::string dense_to_json(const DenseTensor& t) {
    nlohmann::json j;
    j["indices"] = t.indices;
    auto data = nlohmann::json::array();
    for (const auto& v : t.data) data.push_back({v.real(), v.imag()});
    j["data"] = std::move(data);
    return j.dump();
}

DenseTensor dense_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DenseError(std::string("tensor json: ") + e.what());
    }
    if (!j.contains("indices") || !j.contains("data"))
        throw DenseError("tensor json: expected 'indices' and 'data'");
    std::vector<std::string> idx = j.at("indices").get<std::vector<std::string>>();
    std::vector<cplx> data;
    for (const auto& e : j.at("data")) {
        if (!e.is_array() || e.size() != 2) throw DenseError("tensor json: entries must be [re, im]");
        data.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return DenseTensor(std::move(idx), std::move(data));
}

}  // namespace limtdd
