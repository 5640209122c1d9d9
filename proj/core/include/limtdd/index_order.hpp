#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace limtdd {

/// Append-only total order over index names. A smaller position sits nearer
/// the root of every diagram and is the more significant bit of a dense
/// vectorization.
class IndexOrder {
public:
    /// Position of `name`, registering it at the end when unknown.
    std::uint32_t ensure(std::string_view name);
    std::optional<std::uint32_t> find(std::string_view name) const;
    std::uint32_t position(std::string_view name) const;
    const std::string& name(std::uint32_t pos) const { return names_.at(pos); }
    std::size_t size() const { return names_.size(); }

    /// Sorts names by position; unknown names are registered first, in the
    /// order given.
    void sort(std::vector<std::string>& names);

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint32_t> pos_;
};

}  // namespace limtdd
