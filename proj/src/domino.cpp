#include "sft/domino.hpp"

#include "sft/ends.hpp"
#include "sft/search.hpp"

#include <algorithm>
#include <deque>

namespace sft {

std::string_view to_string(DominoVerdict v)
{
    switch (v) {
    case DominoVerdict::Empty:
        return "empty";
    case DominoVerdict::Nonempty:
        return "nonempty";
    case DominoVerdict::Unknown:
        return "unknown";
    }
    return "?";
}

std::vector<Letter> all_letters(const Alphabet& a)
{
    const auto total = a.size();
    if (!total || *total > (1U << 20))
        throw Error(Errc::SizeLimit, "alphabet too large to enumerate");
    std::vector<Letter> out;
    out.reserve(*total);
    Letter cur(a.component_count(), 0);
    for (std::uint64_t i = 0; i < *total; ++i) {
        out.push_back(cur);
        // last component varies fastest
        for (std::size_t c = a.component_count(); c-- > 0;) {
            if (++cur[c] < a.component_size(c))
                break;
            cur[c] = 0;
        }
    }
    return out;
}

Certificate emptiness_certificate(const PatternSet& ps, int r, std::uint64_t node_budget)
{
    if (r < ps.radius)
        throw Error(Errc::InvalidArgument, "certificate radius below the pattern radius");
    const Layout layout = Layout::region(ps.group, ps.group.ball_members(r));
    const SearchOutcome out = solve(ps, layout, node_budget);
    if (out.result == SearchResult::BudgetOut)
        throw Error(Errc::SizeLimit, "colorings of B(" + std::to_string(r) + ") exceed the node budget");
    Certificate c;
    c.radius = r;
    c.nodes = out.nodes;
    c.empty = out.result == SearchResult::Exhausted;
    if (!c.empty)
        c.witness = to_patch(layout, out.cells);
    return c;
}

ZOracleResult z_transition_oracle(const PatternSet& ps)
{
    const Group& g = ps.group;
    if (!g.is_rank_one_lattice() || g.norm(g.from_coordinates({1})) != 1)
        throw Error(Errc::InvalidArgument, "transition oracle needs Z with a unit generator");
    if (!ps.is_explicit())
        throw Error(Errc::InvalidArgument, "transition oracle needs explicit patterns");
    std::int64_t lo = 0, hi = 0;
    bool first = true;
    for (const auto& p : ps.patterns) {
        for (const auto& e : p.support) {
            const std::int64_t x = g.coordinates(e)[0];
            lo = first ? x : std::min(lo, x);
            hi = first ? x : std::max(hi, x);
            first = false;
        }
    }
    const std::size_t L = static_cast<std::size_t>(std::max<std::int64_t>(2, hi - lo + 1));
    const std::vector<Letter> letters = all_letters(ps.alphabet);
    const std::size_t A = letters.size();
    std::size_t nodes = 1;
    for (std::size_t i = 0; i + 1 < L; ++i) {
        nodes *= A;
        if (nodes > (1U << 20))
            throw Error(Errc::SizeLimit, "too many windows for the transition graph");
    }

    // node = (L-1)-word in base A, first letter most significant
    std::vector<std::vector<std::size_t>> succ(nodes);
    std::vector<std::uint32_t> digits(L);
    for (std::size_t code = 0; code < nodes * A; ++code) {
        std::size_t rest = code;
        for (std::size_t i = L; i-- > 0;) {
            digits[i] = static_cast<std::uint32_t>(rest % A);
            rest /= A;
        }
        Patch w(g);
        for (std::size_t i = 0; i < L; ++i)
            w.set(g.from_coordinates({static_cast<std::int64_t>(i)}), letters[digits[i]]);
        if (locally_admissible(w, ps))
            succ[code / A].push_back(code % nodes);
    }

    ZOracleResult res;
    std::vector<std::size_t> best;
    for (std::size_t s = 0; s < nodes; ++s) {
        std::vector<std::size_t> parent(nodes, nodes);
        std::deque<std::size_t> queue{s};
        std::vector<bool> seen(nodes, false);
        seen[s] = true;
        std::optional<std::size_t> closing;
        while (!queue.empty() && !closing) {
            const std::size_t u = queue.front();
            queue.pop_front();
            for (std::size_t v : succ[u]) {
                if (v == s) {
                    closing = u;
                    break;
                }
                if (!seen[v]) {
                    seen[v] = true;
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if (!closing)
            continue;
        std::vector<std::size_t> cycle;
        for (std::size_t u = *closing; u != s; u = parent[u])
            cycle.push_back(u);
        cycle.push_back(s);
        std::reverse(cycle.begin(), cycle.end());
        if (best.empty() || cycle.size() < best.size())
            best = std::move(cycle);
    }
    if (best.empty())
        return res;
    res.nonempty = true;
    std::size_t top = nodes / A;
    for (std::size_t u : best)
        res.word.push_back(letters[u / top]);
    return res;
}

namespace {

std::optional<PeriodicConfig> torus_witness(const PatternSet& ps, const Layout& layout, const SearchOutcome& found,
    Element period, std::vector<Element> extra)
{
    PeriodicConfig pc(ps.group, std::move(period), to_patch(layout, found.cells));
    pc.extra_periods = std::move(extra);
    for (std::size_t c = 0; c < layout.cell_count(); ++c)
        pc.representatives.push_back(layout.element(c));
    if (!verify_periodic_point(pc, ps))
        return std::nullopt;
    return pc;
}

bool multi_ended_family(const Group& g)
{
    const Family f = g.spec().family;
    return (f == Family::Free || f == Family::FreeProduct) && !g.is_finite();
}

} // namespace

DominoOutcome decide_domino(const PatternSet& ps, const DominoBudget& budget)
{
    const Group& g = ps.group;
    DominoOutcome out;
    std::uint64_t left = budget.nodes;
    auto spend = [&](std::uint64_t n) {
        out.nodes += n;
        left = n >= left ? 0 : left - n;
    };

    if (g.is_finite()) {
        try {
            const Layout layout = Layout::whole(g);
            const SearchOutcome s = solve(ps, layout, left);
            spend(s.nodes);
            out.rounds = 1;
            out.method = "whole-group";
            if (s.result == SearchResult::Exhausted) {
                out.verdict = DominoVerdict::Empty;
                int r = 0;
                while (g.ball_size(r) < layout.cell_count())
                    ++r;
                out.radius = std::max(r, ps.radius);
            } else if (s.result == SearchResult::Found) {
                Patch p = to_patch(layout, s.cells);
                if (locally_admissible(p, ps)) {
                    out.verdict = DominoVerdict::Nonempty;
                    out.patch = std::move(p);
                }
            }
        } catch (const Error&) {
        }
        return out;
    }

    const int n = std::max(ps.radius, 1);
    std::optional<AxialElement> axial;
    Element step;
    if (multi_ended_family(g)) {
        try {
            axial = find_axial(g, n, 2 * n + 3);
            step = g.power(axial->g, disjoint_power(g, axial->g, n));
        } catch (const Error&) {
            axial.reset();
        }
    }

    bool certificates = true;
    for (int k = 1; k <= budget.rounds && left > 0; ++k) {
        out.rounds = k;
        const std::uint64_t slice = std::max<std::uint64_t>(left / 8, std::min<std::uint64_t>(left, 1000));

        if (certificates) {
            const int r = std::max(ps.radius, 1) + k - 1;
            try {
                const Certificate c = emptiness_certificate(ps, r, slice);
                spend(c.nodes);
                if (c.empty) {
                    out.verdict = DominoVerdict::Empty;
                    out.radius = r;
                    out.method = "certificate";
                    return out;
                }
            } catch (const Error&) {
                spend(slice);
                certificates = false;
            }
        }

        try {
            if (g.is_rank_one_lattice()) {
                const Layout layout = Layout::torus(g, k);
                const SearchOutcome s = solve(ps, layout, slice);
                spend(s.nodes);
                if (s.result == SearchResult::Found) {
                    if (auto pc = torus_witness(ps, layout, s, g.from_coordinates({k}), {})) {
                        out.verdict = DominoVerdict::Nonempty;
                        out.periodic = std::move(pc);
                        out.method = "torus";
                        return out;
                    }
                }
            } else if (g.is_rank_two_lattice()) {
                std::vector<std::pair<int, int>> shapes;
                for (int p = 1; p < k; ++p) {
                    shapes.emplace_back(p, k);
                    shapes.emplace_back(k, p);
                }
                shapes.emplace_back(k, k);
                for (const auto& [a, b] : shapes) {
                    if (left == 0)
                        break;
                    const Layout layout = Layout::torus(g, a, b);
                    const SearchOutcome s = solve(ps, layout, std::min(slice, left));
                    spend(s.nodes);
                    if (s.result != SearchResult::Found)
                        continue;
                    if (auto pc = torus_witness(ps, layout, s, g.from_coordinates({a, 0}),
                            {g.from_coordinates({0, b})})) {
                        out.verdict = DominoVerdict::Nonempty;
                        out.periodic = std::move(pc);
                        out.method = "torus";
                        return out;
                    }
                }
            } else if (axial) {
                std::uint64_t used = 0;
                const auto seed = tied_seed(ps, step, k, n, slice, &used);
                spend(used);
                if (seed) {
                    PeriodicPoint pp = construct_periodic_point(ps, *seed, *axial);
                    out.verdict = DominoVerdict::Nonempty;
                    out.periodic = std::move(pp.config);
                    out.method = "ends";
                    return out;
                }
            }
        } catch (const Error&) {
            // construction or layout trouble at this size; try the next round
        }
    }
    out.method = "budget";
    return out;
}

} // namespace sft
