#include "sft/ends.hpp"

#include "sft/search.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace sft {

namespace {

// Connected components of region \ removed in the Cayley graph, plus which
// components reach the region's boundary.
struct Labelling {
    std::vector<int> label; // per region index; -1 for removed cells
    std::vector<std::vector<std::size_t>> comps;
    std::vector<bool> at_boundary;
};

template <class Removed, class Boundary>
Labelling label_components(const Group& g, const std::vector<Element>& region, const ElementMap<std::size_t>& index,
    Removed&& removed, Boundary&& on_boundary)
{
    Labelling out;
    out.label.assign(region.size(), -2);
    const int gens = static_cast<int>(g.generator_count());
    for (std::size_t i = 0; i < region.size(); ++i) {
        if (removed(i))
            out.label[i] = -1;
    }
    for (std::size_t start = 0; start < region.size(); ++start) {
        if (out.label[start] != -2)
            continue;
        const int id = static_cast<int>(out.comps.size());
        out.comps.emplace_back();
        out.at_boundary.push_back(false);
        std::deque<std::size_t> queue{start};
        out.label[start] = id;
        while (!queue.empty()) {
            const std::size_t i = queue.front();
            queue.pop_front();
            out.comps.back().push_back(i);
            if (on_boundary(i))
                out.at_boundary.back() = true;
            for (int s = 0; s < gens; ++s) {
                auto it = index.find(g.multiply_generator(region[i], s));
                if (it == index.end() || out.label[it->second] != -2)
                    continue;
                out.label[it->second] = id;
                queue.push_back(it->second);
            }
        }
    }
    return out;
}

ElementMap<std::size_t> index_of(const std::vector<Element>& v)
{
    ElementMap<std::size_t> idx;
    idx.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        idx.emplace(v[i], i);
    return idx;
}

struct AnnulusCount {
    int count = 0;
    Labelling lab;
};

// Components of B(R) \ B(n), using the first `size(R)` entries of `ball`.
AnnulusCount annulus(const Group& g, const std::vector<Element>& ball, const ElementMap<std::size_t>& index, int n,
    int R)
{
    const std::size_t inner = g.ball_size(n);
    const std::size_t outer = g.ball_size(R);
    const std::size_t shell = R > 0 ? g.ball_size(R - 1) : 0;
    const std::vector<Element> region(ball.begin(), ball.begin() + static_cast<std::ptrdiff_t>(outer));
    AnnulusCount out;
    out.lab = label_components(
        g, region, index, [&](std::size_t i) { return i < inner; }, [&](std::size_t i) { return i >= shell; });
    // index may contain elements beyond `outer`; those are never labelled
    for (bool b : out.lab.at_boundary)
        out.count += b ? 1 : 0;
    return out;
}

} // namespace

EndsEstimate estimate_ends(const Group& g, int n, int R)
{
    if (n < 0 || R <= n)
        throw Error(Errc::InvalidArgument, "estimate_ends needs R > n >= 0");
    const int top = std::max(R, n + 2);
    const auto& ball = g.ball_members(top);
    ElementMap<std::size_t> index;
    index.reserve(g.ball_size(R));
    for (std::size_t i = 0; i < g.ball_size(R); ++i)
        index.emplace(ball[i], i);

    EndsEstimate e;
    e.inner_radius = n;
    e.outer_radius = R;
    const AnnulusCount main = annulus(g, ball, index, n, R);
    e.component_count = main.count;
    for (std::size_t c = 0; c < main.lab.comps.size(); ++c) {
        std::vector<Element> members;
        for (auto i : main.lab.comps[c])
            members.push_back(ball[i]);
        e.components.push_back(std::move(members));
        e.unbounded.push_back(main.lab.at_boundary[c]);
    }
    if (R - 1 > n) {
        ElementMap<std::size_t> smaller;
        for (std::size_t i = 0; i < g.ball_size(R - 1); ++i)
            smaller.emplace(ball[i], i);
        e.truncation_stable = annulus(g, ball, smaller, n, R - 1).count == e.component_count;
    }
    if (R > n + 1) {
        e.next_count = annulus(g, ball, index, n + 1, R).count;
    } else {
        for (std::size_t i = g.ball_size(R); i < g.ball_size(R + 1); ++i)
            index.emplace(ball[i], i);
        e.next_count = annulus(g, ball, index, n + 1, R + 1).count;
    }
    e.stable = e.truncation_stable && e.next_count == e.component_count;
    return e;
}

std::vector<Element> tube(const Group& g, const std::vector<Element>& centers, int R)
{
    std::vector<Element> path;
    if (!centers.empty())
        path.push_back(centers[0]);
    for (std::size_t i = 0; i + 1 < centers.size(); ++i) {
        Element at = centers[i];
        for (int s : g.geodesic_word(g.multiply(g.invert(centers[i]), centers[i + 1]))) {
            at = g.multiply_generator(at, s);
            path.push_back(at);
        }
    }
    const auto& ball = g.ball_members(R);
    std::vector<Element> out;
    ElementSet seen;
    for (const auto& p : path) {
        for (const auto& b : ball) {
            Element x = g.multiply(p, b);
            if (seen.insert(x).second)
                out.push_back(std::move(x));
        }
    }
    return out;
}

namespace {

bool balls_meet(const Group& g, const BallRef& a, const BallRef& b)
{
    return g.distance(a.center, b.center) <= a.radius + b.radius;
}

// 0: same component, 1: different and one of them bounded, 2: different, both reach the boundary
int separation_state(const Group& g, const BallRef& b0, const BallRef& b1, const BallRef& b2, int R)
{
    const std::vector<Element> region = tube(g, {b0.center, b1.center, b2.center}, R);
    const auto index = index_of(region);
    const int gens = static_cast<int>(g.generator_count());
    auto in_b1 = [&](std::size_t i) { return g.distance(b1.center, region[i]) <= b1.radius; };
    auto boundary = [&](std::size_t i) {
        for (int s = 0; s < gens; ++s) {
            if (!index.count(g.multiply_generator(region[i], s)))
                return true;
        }
        return false;
    };
    const Labelling lab = label_components(g, region, index, in_b1, boundary);
    const int l0 = lab.label[index.at(b0.center)];
    const int l2 = lab.label[index.at(b2.center)];
    if (l0 == l2)
        return 0;
    if (!lab.at_boundary[static_cast<std::size_t>(l0)] || !lab.at_boundary[static_cast<std::size_t>(l2)])
        return 1;
    return 2;
}

} // namespace

bool separates(const Group& g, const BallRef& b0, const BallRef& b1, const BallRef& b2, int R)
{
    if (R <= std::max({b0.radius, b1.radius, b2.radius}))
        throw Error(Errc::TruncationTooSmall, "tube radius must exceed every ball radius");
    if (balls_meet(g, b0, b1) || balls_meet(g, b2, b1))
        return false;
    const int state = separation_state(g, b0, b1, b2, R);
    if (state != 2)
        return state == 1;
    // both sides reach the tube boundary; a wider tube either joins them or not
    return separation_state(g, b0, b1, b2, R + 1) != 0;
}

bool is_axial(const Group& g, const Element& x, int n, int range, int R)
{
    // by translation equivariance it is enough to look at triples starting at 0
    for (int i = 1; i < 2 * range; ++i) {
        for (int j = 1; i + j <= 2 * range; ++j) {
            const BallRef b0{g.identity(), n};
            const BallRef b1{g.power(x, i), n};
            const BallRef b2{g.power(x, i + j), n};
            if (!separates(g, b0, b1, b2, R))
                return false;
        }
    }
    return true;
}

AxialElement find_axial(const Group& g, int n, int R)
{
    if (R <= 2 * n)
        throw Error(Errc::TruncationTooSmall, "truncation must exceed 2n to find elements of norm > 2n");
    const EndsEstimate e = estimate_ends(g, n, R);
    if (e.component_count < 2)
        throw Error(Errc::NotMultiEnded, "B(" + std::to_string(R) + ") \\ B(" + std::to_string(n) + ") has " +
                std::to_string(e.component_count) + " unbounded components");
    if (!e.truncation_stable)
        throw Error(Errc::TruncationTooSmall, "component count still changes at R = " + std::to_string(R));
    std::vector<Element> picks;
    for (std::size_t c = 0; c < e.components.size() && picks.size() < 2; ++c) {
        if (!e.unbounded[c])
            continue;
        for (const auto& x : e.components[c]) {
            if (g.norm(x) > 2 * n) {
                picks.push_back(x);
                break;
            }
        }
    }
    if (picks.size() < 2)
        throw Error(Errc::TruncationTooSmall, "no elements of norm > 2n in two unbounded components");

    AxialElement ax;
    ax.n = n;
    ax.provenance = {picks[0], picks[1]};
    ax.from_provenance = g.multiply(g.invert(picks[0]), picks[1]);
    const int tube_radius = 2 * n + 1;
    if (!is_axial(g, ax.from_provenance, n, ax.checked_range, tube_radius))
        throw Error(Errc::TruncationTooSmall, "x^-1 y failed the axiality check at this truncation");
    ax.g = ax.from_provenance;
    const int limit = g.norm(ax.from_provenance);
    for (const auto& h : g.ball_members(limit)) {
        if (g.norm(h) <= 2 * n)
            continue;
        if (is_axial(g, h, n, ax.checked_range, tube_radius)) {
            ax.g = h;
            break;
        }
    }
    return ax;
}

int disjoint_power(const Group& g, const Element& x, int n, int range)
{
    for (int p = 1; p <= 1000; ++p) {
        bool ok = true;
        for (int k = 1; k <= range && ok; ++k)
            ok = g.norm(g.power(x, static_cast<std::int64_t>(p) * k)) > 4 * n;
        if (ok)
            return p;
    }
    throw Error(Errc::DisjointnessFailure, "no power of " + g.format(x) + " moves B(2n) off itself");
}

FundamentalDomain fundamental_domain(const Group& g, const Element& x, int m1, int m2, int n, int R)
{
    if (m1 >= m2)
        throw Error(Errc::InvalidArgument, "fundamental_domain needs m1 < m2");
    if (R <= n)
        throw Error(Errc::TruncationTooSmall, "truncation must exceed n");
    FundamentalDomain fd;
    fd.g = x;
    fd.m1 = m1;
    fd.m2 = m2;
    fd.n = n;
    fd.truncation = R;
    fd.period = g.power(x, m2 - m1);
    for (int k = 1; k <= 3; ++k) {
        if (g.norm(g.power(fd.period, k)) <= 4 * n)
            throw Error(Errc::DisjointnessFailure, "translates of B(2n) by the period overlap");
    }

    const int lo = -2;
    const int hi = 3;
    std::vector<Element> centers;
    for (int k = lo; k <= hi; ++k)
        centers.push_back(g.power(x, m1 + static_cast<std::int64_t>(k) * (m2 - m1)));
    const std::vector<Element> region = tube(g, centers, R);
    const auto index = index_of(region);

    std::vector<int> block(region.size(), std::numeric_limits<int>::min());
    for (int k = lo; k <= hi; ++k) {
        const Element& c = centers[static_cast<std::size_t>(k - lo)];
        for (const auto& b : g.ball_members(n))
            block[index.at(g.multiply(c, b))] = k;
    }
    auto in_block = [&](std::size_t i) { return block[i] != std::numeric_limits<int>::min(); };
    const Labelling lab = label_components(g, region, index, in_block, [](std::size_t) { return false; });

    const int gens = static_cast<int>(g.generator_count());
    for (std::size_t c = 0; c < lab.comps.size(); ++c) {
        FundamentalDomain::Piece piece;
        for (auto i : lab.comps[c]) {
            piece.members.push_back(region[i]);
            for (int s = 0; s < gens; ++s) {
                auto it = index.find(g.multiply_generator(region[i], s));
                if (it != index.end() && in_block(it->second))
                    piece.touches.insert(block[it->second]);
            }
        }
        if (!piece.touches.empty() && *piece.touches.rbegin() - *piece.touches.begin() > 1)
            throw Error(Errc::TruncationTooSmall, "a component touches non-consecutive blocks");
        fd.pieces.push_back(std::move(piece));
    }

    for (std::size_t i = 0; i < region.size(); ++i) {
        if (block[i] == 0)
            fd.members.push_back(region[i]);
    }
    for (const auto& piece : fd.pieces) {
        if (piece.touches == std::set<int>{0} || piece.touches == std::set<int>{0, 1})
            fd.members.insert(fd.members.end(), piece.members.begin(), piece.members.end());
    }
    fd.member_set = ElementSet(fd.members.begin(), fd.members.end());

    for (const auto& y : fd.members) {
        for (int k : {-2, -1, 1, 2}) {
            if (fd.member_set.count(g.multiply(g.power(fd.period, k), y)))
                throw Error(Errc::DisjointnessFailure, "a period translate of the domain meets the domain");
        }
    }
    for (const auto& h : tube(g, {centers[2], centers[3]}, R - n)) {
        bool hit = false;
        for (int k = -2; k <= 2 && !hit; ++k)
            hit = fd.member_set.count(g.multiply(g.power(fd.period, k), h)) != 0;
        if (!hit)
            throw Error(Errc::TruncationTooSmall, "no period translate of " + g.format(h) + " lies in the domain");
    }
    return fd;
}

std::optional<Patch> tied_seed(const PatternSet& ps, const Element& x, int d, int n, std::uint64_t budget,
    std::uint64_t* nodes)
{
    const Group& g = ps.group;
    const Element t = g.power(x, d);
    const int R = 2 * n + 1;
    std::vector<Element> region = tube(g, {g.identity(), t}, R);
    for (const auto& c : {g.identity(), t}) {
        for (const auto& b : g.ball_members(R + n))
            region.push_back(g.multiply(c, b));
    }
    const Layout layout = Layout::tied(g, region, g.ball_members(2 * n), t);
    const SearchOutcome out = solve(ps, layout, budget);
    if (nodes)
        *nodes += out.nodes;
    if (out.result != SearchResult::Found)
        return std::nullopt;
    Patch seed(g);
    for (const auto& y : region)
        seed.set(y, out.cells[*layout.cell(y)]);
    return seed;
}

PeriodicPoint construct_periodic_point(const PatternSet& ps, const Patch& seed, const AxialElement& ax)
{
    const Group& g = ps.group;
    const int n = ax.n;
    if (ps.radius > n)
        throw Error(Errc::InvalidArgument, "the pattern radius exceeds the axial radius n");
    if (!locally_admissible(seed, ps))
        throw Error(Errc::InvalidArgument, "seed patch is not locally admissible");
    const Element x = g.power(ax.g, disjoint_power(g, ax.g, n));
    const auto& b2 = g.ball_members(2 * n);

    std::map<int, std::vector<Letter>> windows;
    for (int m = -64; m <= 64; ++m) {
        const Element c = g.power(x, m);
        std::vector<Letter> w;
        for (const auto& b : b2) {
            const Letter* a = seed.find(g.multiply(c, b));
            if (!a)
                break;
            w.push_back(*a);
        }
        if (w.size() == b2.size())
            windows.emplace(m, std::move(w));
    }
    std::optional<std::pair<int, int>> pick;
    for (int gap = 1; gap <= 128 && !pick; ++gap) {
        for (const auto& [m, w] : windows) {
            auto it = windows.find(m + gap);
            if (it != windows.end() && it->second == w) {
                pick = {m, m + gap};
                break;
            }
        }
    }
    if (!pick)
        throw Error(Errc::NeedLargerPatch, "no two translates of B(2n) along the axis carry the same pattern");

    const int R = 2 * n + 1;
    FundamentalDomain fd = fundamental_domain(g, x, pick->first, pick->second, n, R);
    const bool lattice = g.spec().family == Family::FreeAbelian;

    Patch data(g);
    std::vector<Element> extended = fd.members;
    for (const int m : {pick->first, pick->second}) {
        const Element c = g.power(x, m);
        for (const auto& b : b2)
            extended.push_back(g.multiply(c, b));
    }
    for (const auto& y : extended) {
        const Letter* a = seed.find(y);
        if (a)
            data.set(y, *a);
        else if (lattice)
            throw Error(Errc::NeedLargerPatch, "seed does not cover the fundamental domain at " + g.format(y));
    }

    PeriodicConfig pc(g, fd.period, std::move(data));
    const auto& rball = g.ball_members(ps.radius);
    for (const auto& y : fd.members) {
        if (!pc.domain_data.contains(y))
            continue;
        bool resolvable = true;
        for (const auto& b : rball) {
            if (!periodic_lookup(pc, g.multiply(y, b))) {
                resolvable = false;
                break;
            }
        }
        if (resolvable)
            pc.representatives.push_back(y);
        else if (lattice)
            throw Error(Errc::NeedLargerPatch, "neighbourhood of " + g.format(y) + " is not resolvable");
    }
    bool ok = false;
    try {
        ok = verify_periodic_point(pc, ps);
    } catch (const Error& err) {
        throw Error(Errc::VerificationFailed, std::string("periodic point check raised ") + err.what());
    }
    if (!ok)
        throw Error(Errc::VerificationFailed, "constructed configuration displays a forbidden pattern");
    return PeriodicPoint{std::move(pc), std::move(fd), x};
}

} // namespace sft
