#pragma once

#include "sft/group.hpp"

#include <cstdint>
#include <vector>

namespace sft {

// Interned elements of one group with a memoized product table against a
// fixed list of right factors.
class ElementTable {
public:
    static constexpr std::uint32_t kNone = UINT32_MAX;

    ElementTable(Group g, std::vector<Element> right) : group_(std::move(g)), right_(std::move(right)) {}

    std::uint32_t id(const Element& x)
    {
        auto [it, fresh] = ids_.emplace(x, static_cast<std::uint32_t>(elems_.size()));
        if (fresh) {
            elems_.push_back(x);
            table_.resize(table_.size() + right_.size(), kNone);
        }
        return it->second;
    }

    // id of elems[a] * right[j]
    std::uint32_t mul(std::uint32_t a, std::size_t j)
    {
        const std::size_t slot = a * right_.size() + j;
        if (table_[slot] == kNone) {
            const std::uint32_t r = id(group_.multiply(elems_[a], right_[j]));
            table_[slot] = r;
        }
        return table_[slot];
    }

    const Element& at(std::uint32_t a) const { return elems_[a]; }
    const Group& group() const { return group_; }

private:
    Group group_;
    std::vector<Element> right_;
    std::vector<Element> elems_;
    ElementMap<std::uint32_t> ids_;
    std::vector<std::uint32_t> table_;
};

} // namespace sft
