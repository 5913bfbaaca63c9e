#pragma once

#include "sft/group.hpp"

#include <optional>
#include <vector>

namespace sft {

/// Completed coset table of the trivial subgroup, i.e. the regular action of
/// a finite group on itself. Row 0 is the identity.
class CosetTable {
public:
    /// Runs HLT coset enumeration. Returns nullopt when more than `budget`
    /// cosets would have to be defined (always the case for infinite groups).
    static std::optional<CosetTable> enumerate(const GroupSpec& spec, std::size_t budget);

    std::size_t size() const { return table_.size(); }
    int act(std::size_t coset, int generator) const
    {
        return table_[coset][static_cast<std::size_t>(generator)];
    }
    std::size_t walk(std::size_t coset, const Word& w) const;

    /// Shortlex-least word and word length for each coset.
    const Word& word(std::size_t coset) const { return words_[coset]; }
    int length(std::size_t coset) const { return static_cast<int>(words_[coset].size()); }

private:
    std::vector<std::vector<int>> table_;
    std::vector<Word> words_;
};

} // namespace sft
