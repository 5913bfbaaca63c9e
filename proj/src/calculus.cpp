#include "sft/calculus.hpp"

#include "element_table.hpp"

#include <mutex>

namespace sft {

void FunctionPatch::check_lipschitz() const
{
    const int gens = static_cast<int>(source.generator_count());
    for (const auto& [g, v] : values) {
        for (int s = 0; s < gens; ++s) {
            auto it = values.find(source.multiply_generator(g, s));
            if (it == values.end())
                continue;
            const int d = target.distance(v, it->second);
            if (d > n)
                throw Error(Errc::LipschitzViolation, "d(f(" + source.format(g) + "), f(" + source.format(g) + " " +
                        source.format_word({s}) + ")) = " + std::to_string(d) + " > " + std::to_string(n));
        }
    }
}

const Element* DerivativePatch::at(const Element& g, int s) const
{
    auto it = cells.find(g);
    if (it == cells.end() || !it->second[static_cast<std::size_t>(s)])
        return nullptr;
    return &*it->second[static_cast<std::size_t>(s)];
}

void DerivativePatch::set(const Element& g, int s, Element v)
{
    auto& row = cells[g];
    row.resize(source.generator_count());
    row[static_cast<std::size_t>(s)] = std::move(v);
}

DerivativePatch derivative(const FunctionPatch& f)
{
    f.check_lipschitz();
    DerivativePatch d(f.source, f.target, f.n);
    const int gens = static_cast<int>(f.source.generator_count());
    for (const auto& [g, v] : f.values) {
        for (int s = 0; s < gens; ++s) {
            auto it = f.values.find(f.source.multiply_generator(g, s));
            if (it != f.values.end())
                d.set(g, s, f.target.multiply(f.target.invert(v), it->second));
        }
    }
    return d;
}

Element integrate(const DerivativePatch& sigma, const Element& g, const Word& w)
{
    Element acc = sigma.target.identity();
    Element at = g;
    for (int s : w) {
        const Element* step = sigma.at(at, s);
        if (!step)
            throw Error(Errc::SupportNotCovered, "no value for generator " + sigma.source.format_word({s}) + " at " +
                    sigma.source.format(at));
        acc = sigma.target.multiply(acc, *step);
        at = sigma.source.multiply_generator(at, s);
    }
    return acc;
}

Alphabet derivative_alphabet(const Group& g, const Group& h, int n)
{
    std::vector<std::string> values;
    for (const auto& b : h.ball_members(n))
        values.push_back(h.format(b));
    std::vector<Alphabet::Component> comps;
    for (std::size_t s = 0; s < g.generator_count(); ++s)
        comps.push_back({g.format_word({static_cast<int>(s)}), values});
    return Alphabet::product(std::move(comps));
}

int relator_bound(const Group& g) { return std::max(2, g.max_relator_len()); }

std::vector<std::pair<Word, Word>> equal_word_pairs(const Group& g)
{
    const int K = relator_bound(g);
    const int gens = static_cast<int>(g.generator_count());
    ElementMap<Word> first;
    std::vector<std::pair<Word, Word>> pairs;
    std::vector<Word> layer{Word{}};
    first.emplace(g.identity(), Word{});
    for (int len = 1; len <= K; ++len) {
        std::vector<Word> next;
        for (const auto& w : layer) {
            for (int s = 0; s < gens; ++s) {
                Word v = w;
                v.push_back(s);
                const Element e = g.normal_form(v);
                auto [it, fresh] = first.emplace(e, v);
                if (!fresh)
                    pairs.emplace_back(it->second, v);
                next.push_back(std::move(v));
            }
        }
        layer = std::move(next);
    }
    return pairs;
}

namespace {

// Integrals along words of length <= K from the window center depend only
// on the endpoint iff there is a potential phi on B(K) with
// phi(x) D(x, s) = phi(x s) for every x in B(K-1). phi is read off a BFS
// tree; every other edge out of B(K-1) is checked against it.
class EqualIntegrals : public LocalPredicate {
public:
    EqualIntegrals(const Group& g, const Group& h, int n)
        : table_(h, h.ball_members(n)), radius_(relator_bound(g))
    {
        one_ = table_.id(h.identity());
        const auto& ball = g.ball_members(radius_);
        const std::size_t inner = g.ball_size(radius_ - 1);
        std::vector<bool> reached(ball.size(), false);
        reached[0] = true;
        for (std::size_t x = 0; x < inner; ++x) {
            for (std::size_t s = 0; s < g.generator_count(); ++s) {
                const std::size_t y = *g.ball_index(g.multiply_generator(ball[x], static_cast<int>(s)), radius_);
                if (!reached[y]) {
                    reached[y] = true;
                    tree_.push_back({x, s, y});
                } else {
                    edges_.push_back({x, s, y});
                }
            }
        }
        cells_ = ball.size();
    }

    int radius() const override { return radius_; }
    std::string name() const override { return "equal-integrals"; }

    Probe evaluate(const Window& w) const override
    {
        std::lock_guard lock(mutex_);
        phi_.assign(cells_, ElementTable::kNone);
        phi_[0] = one_;
        std::optional<Probe> pending;
        for (const Edge& e : tree_) {
            if (phi_[e.from] == ElementTable::kNone)
                continue;
            const std::uint32_t v = w.value(e.from, e.gen);
            if (v == kUnset) {
                if (!pending)
                    pending = Probe::need(e.from, e.gen);
                continue;
            }
            phi_[e.to] = table_.mul(phi_[e.from], v);
        }
        for (const Edge& e : edges_) {
            if (phi_[e.from] == ElementTable::kNone || phi_[e.to] == ElementTable::kNone)
                continue;
            const std::uint32_t v = w.value(e.from, e.gen);
            if (v == kUnset) {
                if (!pending)
                    pending = Probe::need(e.from, e.gen);
                continue;
            }
            if (table_.mul(phi_[e.from], v) != phi_[e.to])
                return Probe::violated();
        }
        return pending ? *pending : Probe::satisfied();
    }

private:
    struct Edge {
        std::size_t from, gen, to;
    };

    mutable ElementTable table_;
    mutable std::mutex mutex_;
    mutable std::vector<std::uint32_t> phi_;
    std::uint32_t one_ = 0;
    int radius_;
    std::size_t cells_ = 0;
    std::vector<Edge> tree_, edges_;
};

} // namespace

std::shared_ptr<const LocalPredicate> derivative_predicate(const Group& g, const Group& h, int n)
{
    return std::make_shared<EqualIntegrals>(g, h, n);
}

PatternSet compile_derivative_sft(const Group& g, const Group& h, int n)
{
    return PatternSet::local(g, derivative_alphabet(g, h, n), derivative_predicate(g, h, n));
}

Patch to_patch(const DerivativePatch& sigma)
{
    Patch p(sigma.source);
    for (const auto& [g, row] : sigma.cells) {
        Letter l;
        bool full = true;
        for (const auto& v : row) {
            if (!v) {
                full = false;
                break;
            }
            const auto idx = sigma.target.ball_index(*v, sigma.n);
            if (!idx)
                throw Error(Errc::InvalidArgument, "derivative value outside B_H(n)");
            l.push_back(static_cast<std::uint32_t>(*idx));
        }
        if (full && row.size() == sigma.source.generator_count())
            p.set(g, l);
    }
    return p;
}

DerivativePatch from_patch(const Patch& p, const Group& h, int n)
{
    DerivativePatch d(p.group, h, n);
    const auto& hball = h.ball_members(n);
    for (const auto& [g, l] : p.cells) {
        for (std::size_t s = 0; s < l.size(); ++s)
            d.set(g, static_cast<int>(s), hball.at(l[s]));
    }
    return d;
}

FunctionPatch integrate_to_function(const DerivativePatch& sigma, const std::vector<Element>& region)
{
    const Group& G = sigma.source;
    const Group& H = sigma.target;
    const ElementSet inside(region.begin(), region.end());
    if (!inside.count(G.identity()))
        throw Error(Errc::InvalidArgument, "region must contain the identity");

    auto path_dependent = [&](const Element& at, const Word& w1, const Word& w2, const Element& v1, const Element& v2) {
        return Error(Errc::PathDependent, "at " + G.format(at) + ": " + G.format_word(w1) + " -> " + H.format(v1) +
                ", " + G.format_word(w2) + " -> " + H.format(v2));
    };

    FunctionPatch f(G, H, sigma.n);
    for (const auto& x : region) {
        const Word w = G.geodesic_word(x);
        const Element v = integrate(sigma, G.identity(), w);
        const Word other = G.reverse_geodesic_word(x);
        if (other != w) {
            try {
                const Element v2 = integrate(sigma, G.identity(), other);
                if (!(v2 == v))
                    throw path_dependent(G.identity(), w, other, v, v2);
            } catch (const Error& e) {
                if (e.code() != Errc::SupportNotCovered)
                    throw;
            }
        }
        f.values.emplace(x, v);
    }

    // loops: relators and their inverses, plus s s^-1, at every point of the region
    std::vector<Word> loops;
    for (const auto& r : G.spec().relators) {
        loops.push_back(r);
        loops.push_back(G.inverse_word(r));
    }
    for (std::size_t s = 0; s < G.generator_count(); ++s)
        loops.push_back({static_cast<int>(s), G.inverse_generator(static_cast<int>(s))});
    for (const auto& x : region) {
        for (const auto& loop : loops) {
            Element at = x;
            bool covered = true;
            for (int s : loop) {
                if (!sigma.at(at, s) || !inside.count(at)) {
                    covered = false;
                    break;
                }
                at = G.multiply_generator(at, s);
            }
            if (!covered)
                continue;
            const Element v = integrate(sigma, x, loop);
            if (!H.is_identity(v))
                throw path_dependent(x, loop, {}, v, H.identity());
        }
    }
    return f;
}

} // namespace sft
