#include "sft/search.hpp"

#include <algorithm>

namespace sft {

namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t m)
{
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

} // namespace

Layout Layout::region(const Group& g, std::vector<Element> elements)
{
    Layout l(g);
    for (auto& x : elements) {
        if (l.index_.emplace(x, static_cast<std::uint32_t>(l.cells_.size())).second)
            l.cells_.push_back(x);
    }
    l.anchors_ = l.cells_;
    return l;
}

Layout Layout::torus(const Group& g, std::int64_t p)
{
    if (!g.is_rank_one_lattice() || p < 1)
        throw Error(Errc::InvalidArgument, "rank-one torus needs a rank-one lattice and p >= 1");
    Layout l(g);
    l.kind_ = Kind::Torus1;
    l.p_ = p;
    for (std::int64_t i = 0; i < p; ++i)
        l.cells_.push_back(g.from_coordinates({i}));
    l.anchors_ = l.cells_;
    return l;
}

Layout Layout::torus(const Group& g, std::int64_t p, std::int64_t q)
{
    if (!g.is_rank_two_lattice() || p < 1 || q < 1)
        throw Error(Errc::InvalidArgument, "rank-two torus needs Z^2 and p, q >= 1");
    Layout l(g);
    l.kind_ = Kind::Torus2;
    l.p_ = p;
    l.q_ = q;
    for (std::int64_t j = 0; j < q; ++j) {
        for (std::int64_t i = 0; i < p; ++i)
            l.cells_.push_back(g.from_coordinates({i, j}));
    }
    l.anchors_ = l.cells_;
    return l;
}

Layout Layout::whole(const Group& g)
{
    if (!g.is_finite())
        throw Error(Errc::InvalidArgument, "whole-group layout needs a finite group");
    std::size_t prev = 0;
    for (int r = 0;; ++r) {
        const std::size_t sz = g.ball_size(r);
        if (sz == prev)
            return region(g, g.ball_members(r));
        prev = sz;
    }
}

Layout Layout::tied(const Group& g, std::vector<Element> elements, const std::vector<Element>& from, const Element& t)
{
    ElementSet targets;
    for (const auto& x : from)
        targets.insert(g.multiply(t, x));
    Layout l(g);
    for (const auto& x : elements) {
        if (targets.count(x) || l.index_.count(x))
            continue;
        l.index_.emplace(x, static_cast<std::uint32_t>(l.cells_.size()));
        l.cells_.push_back(x);
    }
    for (const auto& x : from) {
        auto it = l.index_.find(x);
        if (it == l.index_.end())
            throw Error(Errc::InvalidArgument, "tied element outside the region");
        l.index_.emplace(g.multiply(t, x), it->second);
    }
    ElementSet seen;
    for (auto& x : elements) {
        if (seen.insert(x).second)
            l.anchors_.push_back(x);
    }
    return l;
}

std::optional<std::uint32_t> Layout::cell(const Element& x) const
{
    switch (kind_) {
    case Kind::Torus1:
        return static_cast<std::uint32_t>(floor_mod(x.code[0], p_));
    case Kind::Torus2:
        return static_cast<std::uint32_t>(floor_mod(x.code[0], p_) + p_ * floor_mod(x.code[1], q_));
    case Kind::Region: {
        auto it = index_.find(x);
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }
    }
    return std::nullopt;
}

namespace {

struct Instance {
    int pattern = -1; // index into ps.patterns, or -1 for the predicate
    std::vector<std::uint32_t> cells;
};

class Engine {
public:
    Engine(const PatternSet& ps, const Layout& layout) : ps_(ps), layout_(layout)
    {
        comps_ = ps.alphabet.component_count();
        values_.assign(layout.cell_count() * comps_, kUnset);
        watch_.resize(values_.size());
        build_instances();
        status_.assign(instances_.size(), 0);
    }

    SearchOutcome run(std::uint64_t budget, const std::vector<std::pair<std::uint32_t, Letter>>& fixed)
    {
        SearchOutcome out;
        for (const auto& [cell, a] : fixed) {
            for (std::size_t c = 0; c < comps_; ++c) {
                const std::size_t v = cell * comps_ + c;
                if (values_[v] != kUnset && values_[v] != a[c])
                    return out;
                if (values_[v] == kUnset && !assign(v, a[c]))
                    return out;
            }
        }
        for (std::size_t i = 0; i < instances_.size(); ++i) {
            if (status_[i])
                continue;
            const Probe p = evaluate(i);
            if (p.verdict == Verdict::Violated)
                return out;
            if (p.verdict == Verdict::Satisfied)
                satisfy(i);
        }

        struct Frame {
            std::size_t var;
            std::uint32_t next;
            std::size_t vmark, smark, cursor;
        };
        std::vector<Frame> stack;
        std::size_t cursor = 0;
        bool descend = true;
        for (;;) {
            if (descend) {
                while (cursor < instances_.size() && status_[cursor])
                    ++cursor;
                if (cursor == instances_.size()) {
                    out.result = SearchResult::Found;
                    out.nodes = nodes_;
                    out.cells = letters();
                    return out;
                }
                const Probe p = evaluate(cursor);
                if (p.verdict == Verdict::Satisfied) {
                    satisfy(cursor);
                    continue;
                }
                if (p.verdict == Verdict::Violated) {
                    descend = false;
                    if (stack.empty())
                        break;
                    undo(stack.back().vmark, stack.back().smark);
                    cursor = stack.back().cursor;
                    continue;
                }
                stack.push_back({request_var(cursor, p), 0, var_trail_.size(), sat_trail_.size(), cursor});
            }
            Frame& f = stack.back();
            const std::uint32_t dom = static_cast<std::uint32_t>(ps_.alphabet.component_size(f.var % comps_));
            descend = false;
            while (f.next < dom) {
                const std::uint32_t val = f.next++;
                if (++nodes_ > budget) {
                    out.result = SearchResult::BudgetOut;
                    out.nodes = nodes_;
                    return out;
                }
                if (assign(f.var, val)) {
                    descend = true;
                    break;
                }
                undo(f.vmark, f.smark);
            }
            if (descend)
                continue;
            stack.pop_back();
            if (stack.empty())
                break;
            undo(stack.back().vmark, stack.back().smark);
            cursor = stack.back().cursor;
        }
        out.result = SearchResult::Exhausted;
        out.nodes = nodes_;
        return out;
    }

private:
    class CellWindow : public Window {
    public:
        CellWindow(const Engine& e, const Instance& inst) : e_(e), inst_(inst) {}
        std::uint32_t value(std::size_t cell, std::size_t component) const override
        {
            return e_.values_[inst_.cells[cell] * e_.comps_ + component];
        }

    private:
        const Engine& e_;
        const Instance& inst_;
    };

    void build_instances()
    {
        const Group& g = ps_.group;
        if (ps_.is_explicit()) {
            std::vector<Element> first_inv;
            for (const auto& p : ps_.patterns)
                first_inv.push_back(g.invert(p.support[0]));
            // anchor-major order, so the search grows outward from the first anchor
            for (const auto& x : layout_.anchors()) {
                for (std::size_t pi = 0; pi < ps_.patterns.size(); ++pi) {
                    const Pattern& p = ps_.patterns[pi];
                    const Element t = g.multiply(x, first_inv[pi]);
                    Instance inst;
                    inst.pattern = static_cast<int>(pi);
                    bool fits = true;
                    for (const auto& s : p.support) {
                        auto c = layout_.cell(g.multiply(t, s));
                        if (!c) {
                            fits = false;
                            break;
                        }
                        inst.cells.push_back(*c);
                    }
                    if (fits)
                        add(std::move(inst));
                }
            }
            return;
        }
        const auto& ball = g.ball_members(ps_.radius);
        for (const auto& x : layout_.anchors()) {
            Instance inst;
            bool fits = true;
            for (const auto& b : ball) {
                auto c = layout_.cell(g.multiply(x, b));
                if (!c) {
                    fits = false;
                    break;
                }
                inst.cells.push_back(*c);
            }
            if (fits)
                add(std::move(inst));
        }
    }

    void add(Instance inst)
    {
        const auto id = static_cast<std::uint32_t>(instances_.size());
        std::vector<std::uint32_t> cells = inst.cells;
        std::sort(cells.begin(), cells.end());
        cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
        for (auto c : cells) {
            for (std::size_t k = 0; k < comps_; ++k)
                watch_[c * comps_ + k].push_back(id);
        }
        instances_.push_back(std::move(inst));
    }

    Probe evaluate(std::size_t i) const
    {
        const Instance& inst = instances_[i];
        if (inst.pattern < 0)
            return ps_.predicate->evaluate(CellWindow(*this, inst));
        const Pattern& p = ps_.patterns[static_cast<std::size_t>(inst.pattern)];
        std::optional<std::pair<std::size_t, std::size_t>> unset;
        for (std::size_t j = 0; j < inst.cells.size(); ++j) {
            for (std::size_t c = 0; c < comps_; ++c) {
                const std::uint32_t v = values_[inst.cells[j] * comps_ + c];
                if (v == kUnset) {
                    if (!unset)
                        unset.emplace(j, c);
                } else if (v != p.assign[j][c]) {
                    return Probe::satisfied();
                }
            }
        }
        if (!unset)
            return Probe::violated();
        return Probe::need(unset->first, unset->second);
    }

    std::size_t request_var(std::size_t i, const Probe& p) const
    {
        const Instance& inst = instances_[i];
        const std::size_t v = inst.cells.at(p.cell) * comps_ + p.component;
        if (values_[v] == kUnset)
            return v;
        for (auto c : inst.cells) {
            for (std::size_t k = 0; k < comps_; ++k) {
                if (values_[c * comps_ + k] == kUnset)
                    return c * comps_ + k;
            }
        }
        throw Error(Errc::VerificationFailed, "constraint undetermined on a full window");
    }

    bool assign(std::size_t var, std::uint32_t val)
    {
        values_[var] = val;
        var_trail_.push_back(var);
        for (auto id : watch_[var]) {
            if (status_[id])
                continue;
            const Probe p = evaluate(id);
            if (p.verdict == Verdict::Violated)
                return false;
            if (p.verdict == Verdict::Satisfied)
                satisfy(id);
        }
        return true;
    }

    void satisfy(std::size_t id)
    {
        status_[id] = 1;
        sat_trail_.push_back(id);
    }

    void undo(std::size_t vmark, std::size_t smark)
    {
        while (var_trail_.size() > vmark) {
            values_[var_trail_.back()] = kUnset;
            var_trail_.pop_back();
        }
        while (sat_trail_.size() > smark) {
            status_[sat_trail_.back()] = 0;
            sat_trail_.pop_back();
        }
    }

    std::vector<Letter> letters() const
    {
        std::vector<Letter> out(layout_.cell_count());
        for (std::size_t c = 0; c < out.size(); ++c) {
            for (std::size_t k = 0; k < comps_; ++k) {
                const std::uint32_t v = values_[c * comps_ + k];
                out[c].push_back(v == kUnset ? 0 : v);
            }
        }
        return out;
    }

    const PatternSet& ps_;
    const Layout& layout_;
    std::size_t comps_ = 1;
    std::vector<std::uint32_t> values_;
    std::vector<std::vector<std::uint32_t>> watch_;
    std::vector<Instance> instances_;
    std::vector<char> status_;
    std::vector<std::size_t> var_trail_;
    std::vector<std::size_t> sat_trail_;
    std::uint64_t nodes_ = 0;
};

} // namespace

SearchOutcome solve(const PatternSet& ps, const Layout& layout, std::uint64_t node_budget,
    const std::vector<std::pair<std::uint32_t, Letter>>& fixed)
{
    if (ps.group != layout.group())
        throw Error(Errc::MixedGroups, "layout and pattern set live on different groups");
    Engine e(ps, layout);
    return e.run(node_budget, fixed);
}

Patch to_patch(const Layout& layout, const std::vector<Letter>& cells)
{
    Patch p(layout.group());
    for (std::size_t c = 0; c < cells.size(); ++c)
        p.set(layout.element(c), cells[c]);
    return p;
}

} // namespace sft
