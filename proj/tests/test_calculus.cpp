#include <doctest.h>

#include "sft/calculus.hpp"

#include <random>

using namespace sft;

namespace {

template <class F>
Errc code_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return Errc::InvalidArgument;
}

// the 1-Lipschitz map Z^2 -> Z drawn on a 4 x 3 block, rows y = 0, 1, 2
const int drawn_map[3][4] = {{0, 1, 1, 1}, {0, 1, 1, 1}, {0, 1, 2, 2}};
// its derivative as labelled in the drawing: east steps per row, north steps per column
const int drawn_east[3][3] = {{1, 0, 0}, {1, 0, 0}, {1, 1, 0}};
const int drawn_north[2][4] = {{0, 0, 0, 0}, {0, 0, 1, 1}};

FunctionPatch drawn_function(const Group& z2, const Group& z)
{
    FunctionPatch f(z2, z, 1);
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 4; ++x)
            f.values.emplace(z2.from_coordinates({x, y}), z.from_coordinates({drawn_map[y][x]}));
    }
    return f;
}

std::vector<Element> box(const Group& z2, int w, int h)
{
    std::vector<Element> out;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x)
            out.push_back(z2.from_coordinates({x, y}));
    }
    return out;
}

// 1-Lipschitz maps into Z: distance to a point, optionally negated and shifted
FunctionPatch distance_map(const Group& g, const Group& z, const std::vector<Element>& domain, const Element& p,
    int sign, int shift)
{
    FunctionPatch f(g, z, 1);
    for (const auto& x : domain)
        f.values.emplace(x, z.from_coordinates({sign * g.distance(p, x) + shift}));
    return f;
}

} // namespace

TEST_CASE("derivative of simple maps")
{
    const auto z = Group::free_abelian(1);
    FunctionPatch id(z, z, 1);
    for (const auto& x : z.ball_members(5))
        id.values.emplace(x, x);
    const auto d = derivative(id);
    for (const auto& x : z.ball_members(4)) {
        for (int s = 0; s < 2; ++s)
            CHECK(*d.at(x, s) == z.normal_form({s}));
    }

    FunctionPatch constant(z, z, 1);
    for (const auto& x : z.ball_members(5))
        constant.values.emplace(x, z.from_coordinates({7}));
    for (const auto& [x, row] : derivative(constant).cells) {
        for (const auto& v : row) {
            if (v)
                CHECK(z.is_identity(*v));
        }
    }

    FunctionPatch steep(z, z, 1);
    steep.values.emplace(z.identity(), z.identity());
    steep.values.emplace(z.from_coordinates({1}), z.from_coordinates({2}));
    CHECK(code_of([&] { derivative(steep); }) == Errc::LipschitzViolation);
}

TEST_CASE("derivative of the drawn Z^2 map")
{
    const auto z2 = Group::free_abelian(2);
    const auto z = Group::free_abelian(1);
    const auto d = derivative(drawn_function(z2, z));
    const int east = z2.parse_word("a")[0];
    const int west = z2.parse_word("A")[0];
    const int north = z2.parse_word("b")[0];
    const int south = z2.parse_word("B")[0];
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 3; ++x) {
            CHECK(*d.at(z2.from_coordinates({x, y}), east) == z.from_coordinates({drawn_east[y][x]}));
            CHECK(*d.at(z2.from_coordinates({x + 1, y}), west) == z.from_coordinates({-drawn_east[y][x]}));
        }
    }
    for (int y = 0; y < 2; ++y) {
        for (int x = 0; x < 4; ++x) {
            CHECK(*d.at(z2.from_coordinates({x, y}), north) == z.from_coordinates({drawn_north[y][x]}));
            CHECK(*d.at(z2.from_coordinates({x, y + 1}), south) == z.from_coordinates({-drawn_north[y][x]}));
        }
    }
    CHECK(d.at(z2.from_coordinates({3, 0}), east) == nullptr);

    // integrating back recovers the map, normalized at the origin
    const auto f = integrate_to_function(d, box(z2, 4, 3));
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 4; ++x)
            CHECK(f.values.at(z2.from_coordinates({x, y})) == z.from_coordinates({drawn_map[y][x]}));
    }

    const auto ps = compile_derivative_sft(z2, z, 1);
    CHECK(ps.radius == 4);
    const Patch p = to_patch(d);
    for (const auto& x : box(z2, 4, 3))
        CHECK(predicate_verdict(p, ps, x) != Verdict::Violated);
}

TEST_CASE("integrals: additivity and the fundamental theorem")
{
    std::mt19937 rng(11);
    const auto z = Group::free_abelian(1);
    const std::vector<Group> groups{Group::free_abelian(1), Group::free_abelian(2), Group::free(2)};
    for (const auto& g : groups) {
        const auto& domain = g.ball_members(8);
        const auto& near = g.ball_members(2);
        std::uniform_int_distribution<std::size_t> pick(0, near.size() - 1);
        std::vector<FunctionPatch> maps;
        maps.push_back(distance_map(g, z, domain, near[pick(rng)], 1, 0));
        maps.push_back(distance_map(g, z, domain, near[pick(rng)], -1, 3));
        FunctionPatch left(g, g, 1);
        const Element h = near[pick(rng)];
        for (const auto& x : domain)
            left.values.emplace(x, g.multiply(h, x));
        maps.push_back(left);

        std::uniform_int_distribution<int> gen(0, static_cast<int>(g.generator_count()) - 1);
        for (const auto& f : maps) {
            const auto d = derivative(f);
            const Group& H = f.target;
            CHECK(H.is_identity(integrate(d, g.identity(), {})));
            for (int trial = 0; trial < 60; ++trial) {
                const Element base = near[pick(rng)];
                Word w1, w2;
                const int len = std::uniform_int_distribution<int>(0, 6)(rng);
                for (int i = 0; i < len; ++i)
                    (i % 2 ? w2 : w1).push_back(gen(rng));
                Word w = w1;
                w.insert(w.end(), w2.begin(), w2.end());
                const Element end = g.multiply(base, g.normal_form(w));
                CHECK(integrate(d, base, w) == H.multiply(H.invert(f.values.at(base)), f.values.at(end)));
                const Element mid = g.multiply(base, g.normal_form(w1));
                CHECK(H.multiply(integrate(d, base, w1), integrate(d, mid, w2)) == integrate(d, base, w));
            }
        }
    }
    const auto z1 = Group::free_abelian(1);
    DerivativePatch empty(z1, z1, 1);
    CHECK(code_of([&] { integrate(empty, z1.identity(), {0}); }) == Errc::SupportNotCovered);
}

TEST_CASE("derivative subshift on Z -> Z")
{
    const auto z = Group::free_abelian(1);
    const auto ps = compile_derivative_sft(z, z, 1);
    CHECK(ps.radius == 2);
    CHECK(ps.alphabet.component_count() == 2);

    FunctionPatch id(z, z, 1);
    for (const auto& x : z.ball_members(6))
        id.values.emplace(x, x);
    CHECK(locally_admissible(to_patch(derivative(id)), ps));

    // a step of +1 from 0 to 1 must be undone by -1 from 1 back to 0
    DerivativePatch bad(z, z, 1);
    for (const auto& x : z.ball_members(6)) {
        bad.set(x, 0, z.from_coordinates({1}));
        bad.set(x, 1, z.identity());
    }
    CHECK_FALSE(locally_admissible(to_patch(bad), ps));
    CHECK(code_of([&] { integrate_to_function(bad, z.ball_members(3)); }) == Errc::PathDependent);

    const auto expl = materialize(ps, 1'000'000);
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> step(-1, 1);
    for (int trial = 0; trial < 50; ++trial) {
        DerivativePatch sigma(z, z, 1);
        for (const auto& x : z.ball_members(4)) {
            for (int s = 0; s < 2; ++s)
                sigma.set(x, s, z.from_coordinates({step(rng)}));
        }
        const Patch p = to_patch(sigma);
        CHECK(locally_admissible(p, ps) == locally_admissible(p, expl));
    }
}

TEST_CASE("commutator loops must close")
{
    const auto z2 = Group::free_abelian(2);
    const auto z = Group::free_abelian(1);
    DerivativePatch up(z2, z, 1);
    for (const auto& x : z2.ball_members(6)) {
        for (int s = 0; s < 4; ++s)
            up.set(x, s, z.from_coordinates({1}));
    }
    CHECK(integrate(up, z2.identity(), z2.parse_word("abAB")) == z.from_coordinates({4}));
    CHECK_FALSE(locally_admissible(to_patch(up), compile_derivative_sft(z2, z, 1)));
    CHECK(code_of([&] { integrate_to_function(up, z2.ball_members(3)); }) == Errc::PathDependent);
}

TEST_CASE("round trips and the local path criterion")
{
    const auto z2 = Group::free_abelian(2);
    const auto z = Group::free_abelian(1);
    const auto ps = compile_derivative_sft(z2, z, 1);
    std::mt19937 rng(29);
    const auto& region = z2.ball_members(6);

    // derivative then integral recovers f(1)^-1 f
    for (int trial = 0; trial < 10; ++trial) {
        const auto& near = z2.ball_members(3);
        const Element p = near[std::uniform_int_distribution<std::size_t>(0, near.size() - 1)(rng)];
        const auto f = distance_map(z2, z, region, p, trial % 2 ? 1 : -1, trial);
        const auto back = integrate_to_function(derivative(f), region);
        for (const auto& x : region)
            CHECK(back.values.at(x) == z.multiply(z.invert(f.values.at(z2.identity())), f.values.at(x)));
        const auto again = derivative(back);
        for (const auto& [x, row] : again.cells) {
            for (int s = 0; s < 4; ++s) {
                if (row[static_cast<std::size_t>(s)])
                    CHECK(*row[static_cast<std::size_t>(s)] == *derivative(f).at(x, s));
            }
        }
    }

    // the predicate at g holds iff the integral along any word of length <= 4
    // from g depends only on where the word ends
    std::vector<Word> words{Word{}};
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (words[i].size() == 4)
            continue;
        for (int s = 0; s < 4; ++s) {
            Word w = words[i];
            w.push_back(s);
            words.push_back(std::move(w));
        }
    }
    std::uniform_int_distribution<int> value(-1, 1);
    std::bernoulli_distribution flip(0.02);
    int rejected = 0;
    for (int trial = 0; trial < 40; ++trial) {
        // start from a genuine derivative, then perturb a few entries
        const auto f = distance_map(z2, z, z2.ball_members(7), z2.from_coordinates({trial % 3, -1}), 1, 0);
        DerivativePatch sigma = derivative(f);
        for (auto& [x, row] : sigma.cells) {
            for (auto& v : row) {
                if (v && flip(rng))
                    v = z.from_coordinates({value(rng)});
            }
        }
        const Patch p = to_patch(sigma);
        for (const auto& g : z2.ball_members(2)) {
            const bool predicate = predicate_holds(p, ps, g);
            bool endpoint_only = true;
            ElementMap<Element> seen;
            for (const auto& w : words) {
                const Element v = integrate(sigma, g, w);
                auto [it, fresh] = seen.emplace(z2.normal_form(w), v);
                endpoint_only = endpoint_only && (fresh || it->second == v);
            }
            CHECK(predicate == endpoint_only);
            rejected += predicate ? 0 : 1;
        }
    }
    CHECK(rejected > 0);
}
