#include "sft/sft.hpp"

#include <algorithm>
#include <set>

namespace sft {

Alphabet::Alphabet(std::vector<std::string> letters)
{
    if (letters.empty())
        throw Error(Errc::InvalidArgument, "alphabet must be nonempty");
    std::set<std::string> seen(letters.begin(), letters.end());
    if (seen.size() != letters.size())
        throw Error(Errc::InvalidArgument, "duplicate letter in alphabet");
    components_.push_back({"letter", std::move(letters)});
}

Alphabet Alphabet::product(std::vector<Component> components)
{
    if (components.empty())
        throw Error(Errc::InvalidArgument, "product alphabet needs a component");
    for (const auto& c : components) {
        if (c.values.empty())
            throw Error(Errc::InvalidArgument, "empty alphabet component " + c.name);
    }
    Alphabet a;
    a.components_ = std::move(components);
    return a;
}

std::optional<std::uint64_t> Alphabet::size() const
{
    std::uint64_t total = 1;
    for (const auto& c : components_) {
        if (total > std::numeric_limits<std::uint64_t>::max() / c.values.size())
            return std::nullopt;
        total *= c.values.size();
    }
    return total;
}

std::string Alphabet::format(const Letter& a) const
{
    std::string out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i > 0)
            out += '|';
        out += a[i] == kUnset ? std::string("?") : components_[i].values.at(a[i]);
    }
    return out;
}

Letter Alphabet::parse(std::string_view text) const
{
    Letter out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < components_.size(); ++i) {
        std::size_t end = (i + 1 == components_.size()) ? text.size() : text.find('|', start);
        if (end == std::string_view::npos)
            throw Error(Errc::Parse, "letter '" + std::string(text) + "' has too few components");
        const auto part = text.substr(start, end - start);
        const auto& vals = components_[i].values;
        auto it = std::find(vals.begin(), vals.end(), part);
        if (it == vals.end())
            throw Error(Errc::Parse, "unknown letter '" + std::string(part) + "'");
        out.push_back(static_cast<std::uint32_t>(it - vals.begin()));
        start = end + 1;
    }
    return out;
}

bool operator==(const Alphabet& a, const Alphabet& b)
{
    if (a.components_.size() != b.components_.size())
        return false;
    for (std::size_t i = 0; i < a.components_.size(); ++i) {
        if (a.components_[i].values != b.components_[i].values)
            return false;
    }
    return true;
}

PatternSet PatternSet::forbidden(Group g, Alphabet a, std::vector<Pattern> patterns, std::optional<int> radius)
{
    int needed = 0;
    for (const auto& p : patterns) {
        if (p.support.empty() || p.support.size() != p.assign.size())
            throw Error(Errc::InvalidArgument, "pattern support and assignment differ in size");
        ElementSet distinct(p.support.begin(), p.support.end());
        if (distinct.size() != p.support.size())
            throw Error(Errc::InvalidArgument, "pattern support has repeated elements");
        for (const auto& x : p.support)
            needed = std::max(needed, g.norm(x));
        for (const auto& l : p.assign) {
            if (l.size() != a.component_count())
                throw Error(Errc::InvalidArgument, "pattern letter has wrong arity");
            for (std::size_t i = 0; i < l.size(); ++i) {
                if (l[i] >= a.component_size(i))
                    throw Error(Errc::InvalidArgument, "pattern letter outside alphabet");
            }
        }
    }
    if (radius && *radius < needed)
        throw Error(Errc::InvalidArgument, "pattern support leaves the declared radius");
    PatternSet ps{std::move(g), std::move(a), std::move(patterns), nullptr, radius.value_or(needed)};
    return ps;
}

PatternSet PatternSet::local(Group g, Alphabet a, std::shared_ptr<const LocalPredicate> p)
{
    const int r = p->radius();
    return PatternSet{std::move(g), std::move(a), {}, std::move(p), r};
}

const Letter* Patch::find(const Element& x) const
{
    auto it = cells.find(x);
    return it == cells.end() ? nullptr : &it->second;
}

Patch Patch::translated(const Element& h) const
{
    Patch out(group);
    for (const auto& [x, a] : cells)
        out.cells.emplace(group.multiply(h, x), a);
    return out;
}

Patch patch_from_string(const Group& g, const Alphabet& a, std::string_view letters, std::int64_t start)
{
    if (!g.is_rank_one_lattice())
        throw Error(Errc::InvalidArgument, "string patches need a rank-one lattice");
    Patch p(g);
    for (std::size_t i = 0; i < letters.size(); ++i)
        p.set(g.from_coordinates({start + static_cast<std::int64_t>(i)}), a.parse(letters.substr(i, 1)));
    return p;
}

bool occurs(const Patch& patch, const Pattern& p, const Element& g)
{
    bool all = true;
    for (std::size_t i = 0; i < p.support.size(); ++i) {
        const Letter* a = patch.find(patch.group.multiply(g, p.support[i]));
        if (a == nullptr)
            throw Error(Errc::SupportNotCovered, "pattern support leaves the patch at " + patch.group.format(g));
        if (*a != p.assign[i])
            all = false;
    }
    return all;
}

namespace {

class PatchWindow : public Window {
public:
    PatchWindow(const Patch& patch, const Element& g, const std::vector<Element>& ball) : patch_(patch)
    {
        cells_.reserve(ball.size());
        for (const auto& x : ball)
            cells_.push_back(patch.find(patch.group.multiply(g, x)));
    }
    bool complete() const
    {
        return std::all_of(cells_.begin(), cells_.end(), [](const Letter* a) { return a != nullptr; });
    }
    std::uint32_t value(std::size_t cell, std::size_t component) const override
    {
        const Letter* a = cells_[cell];
        return a == nullptr ? kUnset : (*a)[component];
    }

private:
    const Patch& patch_;
    std::vector<const Letter*> cells_;
};

bool covered(const Patch& patch, const Pattern& p, const Element& g)
{
    for (const auto& x : p.support) {
        if (!patch.contains(patch.group.multiply(g, x)))
            return false;
    }
    return true;
}

} // namespace

Verdict predicate_verdict(const Patch& patch, const PatternSet& ps, const Element& g)
{
    PatchWindow w(patch, g, ps.group.ball_members(ps.radius));
    return ps.predicate->evaluate(w).verdict;
}

bool predicate_holds(const Patch& patch, const PatternSet& ps, const Element& g)
{
    PatchWindow w(patch, g, ps.group.ball_members(ps.radius));
    if (!w.complete())
        throw Error(Errc::SupportNotCovered, "predicate window leaves the patch at " + ps.group.format(g));
    const Probe pr = ps.predicate->evaluate(w);
    if (pr.verdict == Verdict::Undetermined)
        throw Error(Errc::VerificationFailed, ps.predicate->name() + " undetermined on a full window");
    return pr.verdict == Verdict::Satisfied;
}

bool locally_admissible(const Patch& patch, const PatternSet& ps)
{
    if (ps.is_explicit()) {
        for (const auto& p : ps.patterns) {
            const Element first_inv = ps.group.invert(p.support[0]);
            for (const auto& [x, a] : patch.cells) {
                if (a != p.assign[0])
                    continue;
                const Element g = ps.group.multiply(x, first_inv);
                if (covered(patch, p, g) && occurs(patch, p, g))
                    return false;
            }
        }
        return true;
    }
    const auto& ball = ps.group.ball_members(ps.radius);
    for (const auto& [g, a] : patch.cells) {
        PatchWindow w(patch, g, ball);
        if (!w.complete())
            continue;
        const Probe pr = ps.predicate->evaluate(w);
        if (pr.verdict == Verdict::Undetermined)
            throw Error(Errc::VerificationFailed, ps.predicate->name() + " undetermined on a full window");
        if (pr.verdict == Verdict::Violated)
            return false;
    }
    return true;
}

PatternSet materialize(const PatternSet& ps, std::uint64_t guard)
{
    if (ps.is_explicit())
        return ps;
    const auto& ball = ps.group.ball_members(ps.radius);
    const std::size_t comps = ps.alphabet.component_count();
    const std::size_t vars = ball.size() * comps;
    std::uint64_t total = 1;
    for (std::size_t v = 0; v < vars; ++v) {
        const std::uint64_t d = ps.alphabet.component_size(v % comps);
        if (total > guard / d)
            throw Error(Errc::SizeLimit, "materializing " + ps.predicate->name() + " exceeds the pattern guard");
        total *= d;
    }

    struct VecWindow : Window {
        const std::vector<std::uint32_t>* vals;
        std::size_t comps;
        std::uint32_t value(std::size_t cell, std::size_t component) const override
        {
            return (*vals)[cell * comps + component];
        }
    };
    std::vector<std::uint32_t> vals(vars, 0);
    VecWindow w;
    w.vals = &vals;
    w.comps = comps;
    std::vector<Pattern> forbidden;
    for (std::uint64_t i = 0; i < total; ++i) {
        if (ps.predicate->evaluate(w).verdict != Verdict::Satisfied) {
            Pattern p;
            p.support = ball;
            for (std::size_t c = 0; c < ball.size(); ++c)
                p.assign.emplace_back(vals.begin() + static_cast<std::ptrdiff_t>(c * comps),
                    vals.begin() + static_cast<std::ptrdiff_t>((c + 1) * comps));
            forbidden.push_back(std::move(p));
        }
        for (std::size_t v = vars; v-- > 0;) {
            if (++vals[v] < ps.alphabet.component_size(v % comps))
                break;
            vals[v] = 0;
        }
    }
    return PatternSet{ps.group, ps.alphabet, std::move(forbidden), nullptr, ps.radius};
}

PatternSet wang_to_sft(const WangTileSet& ts, const Group& z2)
{
    if (!z2.is_rank_two_lattice())
        throw Error(Errc::InvalidArgument, "Wang tiles live on Z^2");
    if (ts.tiles.empty())
        throw Error(Errc::InvalidArgument, "empty tile set");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < ts.tiles.size(); ++i)
        names.push_back("t" + std::to_string(i));
    const Element origin = z2.identity();
    const Element right = z2.from_coordinates({1, 0});
    const Element up = z2.from_coordinates({0, 1});
    std::vector<Pattern> patterns;
    const auto n = static_cast<std::uint32_t>(ts.tiles.size());
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) {
            if (ts.tiles[i].east != ts.tiles[j].west)
                patterns.push_back({{origin, right}, {Letter{i}, Letter{j}}});
        }
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) {
            if (ts.tiles[i].north != ts.tiles[j].south)
                patterns.push_back({{origin, up}, {Letter{i}, Letter{j}}});
        }
    }
    return PatternSet{z2, Alphabet(names), std::move(patterns), nullptr, 1};
}

namespace {

template <class F>
void scan_single(const PeriodicConfig& pc, const Element& x, F&& visit)
{
    const Group& g = pc.group;
    const Element inv = g.invert(pc.period);
    visit(x);
    Element up = x;
    Element down = x;
    for (int k = 1; k <= pc.lookup_budget; ++k) {
        up = g.multiply(pc.period, up);
        down = g.multiply(inv, down);
        visit(up);
        visit(down);
    }
}

} // namespace

std::optional<Letter> periodic_lookup(const PeriodicConfig& pc, const Element& x)
{
    std::optional<Letter> found;
    auto visit = [&](const Element& y) {
        const Letter* a = pc.domain_data.find(y);
        if (a == nullptr)
            return;
        if (found && *found != *a)
            throw Error(Errc::InconsistentPeriod, "translates of " + pc.group.format(x) + " disagree");
        if (!found)
            found = *a;
    };
    if (pc.extra_periods.empty()) {
        scan_single(pc, x, visit);
        return found;
    }
    if (pc.extra_periods.size() != 1)
        throw Error(Errc::InvalidArgument, "at most two periods are supported");
    const Group& g = pc.group;
    const Element q = pc.extra_periods[0];
    const int b = pc.lookup_budget;
    Element row = g.multiply(g.power(q, -b), x);
    for (int j = -b; j <= b; ++j) {
        scan_single(pc, row, visit);
        row = g.multiply(q, row);
    }
    return found;
}

Patch resolve(const PeriodicConfig& pc, const std::vector<Element>& around, int r)
{
    Patch out(pc.group);
    const auto& ball = pc.group.ball_members(r);
    for (const auto& x : around) {
        for (const auto& b : ball) {
            const Element y = pc.group.multiply(x, b);
            if (out.contains(y))
                continue;
            auto a = periodic_lookup(pc, y);
            if (!a)
                throw Error(Errc::CoverageGap, "no translate of " + pc.group.format(y) + " in the domain data");
            out.set(y, *a);
        }
    }
    return out;
}

bool verify_periodic_point(const PeriodicConfig& pc, const PatternSet& ps)
{
    if (pc.group != ps.group)
        throw Error(Errc::MixedGroups, "configuration and pattern set live on different groups");
    if (pc.group.is_identity(pc.period))
        throw Error(Errc::InvalidArgument, "period must be nontrivial");
    const Patch local = resolve(pc, pc.representatives, ps.radius);
    for (const auto& x : pc.representatives) {
        if (ps.is_explicit()) {
            for (const auto& p : ps.patterns) {
                if (occurs(local, p, x))
                    return false;
            }
        } else if (!predicate_holds(local, ps, x)) {
            return false;
        }
    }
    return true;
}

} // namespace sft
