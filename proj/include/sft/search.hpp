#pragma once

#include "sft/sft.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sft {

/// Maps group elements onto the cells of a finite search space. Regions give
/// every element its own cell; tori and tied regions identify translates, so
/// a solution is a periodic (or partially periodic) coloring.
class Layout {
public:
    /// One cell per element; constraints are placed wherever they fit.
    static Layout region(const Group& g, std::vector<Element> elements);
    /// Z modulo p, for a rank-one lattice.
    static Layout torus(const Group& g, std::int64_t p);
    /// Z^2 modulo p x q.
    static Layout torus(const Group& g, std::int64_t p, std::int64_t q);
    /// A finite group, every element a cell.
    static Layout whole(const Group& g);
    /// Region in which each element x of `from` shares its cell with t x.
    static Layout tied(const Group& g, std::vector<Element> elements, const std::vector<Element>& from, const Element& t);

    const Group& group() const { return group_; }
    std::size_t cell_count() const { return cells_.size(); }
    /// A representative element of each cell.
    const Element& element(std::size_t cell) const { return cells_[cell]; }
    std::optional<std::uint32_t> cell(const Element& x) const;
    /// Translates at which constraints are instantiated.
    const std::vector<Element>& anchors() const { return anchors_; }

private:
    enum class Kind { Region, Torus1, Torus2 };
    explicit Layout(Group g) : group_(std::move(g)) {}

    Group group_;
    Kind kind_ = Kind::Region;
    std::int64_t p_ = 0, q_ = 0;
    std::vector<Element> cells_;
    ElementMap<std::uint32_t> index_;
    std::vector<Element> anchors_;
};

enum class SearchResult { Found, Exhausted, BudgetOut };

struct SearchOutcome {
    SearchResult result = SearchResult::Exhausted;
    std::vector<Letter> cells; // full coloring when Found
    std::uint64_t nodes = 0;
};

/// Depth-first search for a coloring of the layout's cells under which no
/// instantiated constraint is violated. Variables are (cell, component)
/// pairs, branched on in the order the constraints ask for them; values are
/// tried in alphabet order. `fixed` pins cells before the search starts.
SearchOutcome solve(const PatternSet& ps, const Layout& layout, std::uint64_t node_budget,
    const std::vector<std::pair<std::uint32_t, Letter>>& fixed = {});

/// The coloring as a patch on the layout's cell representatives.
Patch to_patch(const Layout& layout, const std::vector<Letter>& cells);

} // namespace sft
