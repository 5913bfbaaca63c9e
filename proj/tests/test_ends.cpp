#include <doctest.h>

#include "sft/ends.hpp"

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

Element at(const Group& g, std::int64_t x) { return g.from_coordinates({x}); }

PatternSet forbid_words(const Group& g, const Alphabet& a, const std::vector<std::string>& words)
{
    std::vector<Pattern> ps;
    for (const auto& w : words) {
        Pattern p;
        for (std::size_t i = 0; i < w.size(); ++i) {
            p.support.push_back(at(g, static_cast<std::int64_t>(i)));
            p.assign.push_back(a.parse(w.substr(i, 1)));
        }
        ps.push_back(std::move(p));
    }
    return PatternSet::forbidden(g, a, std::move(ps));
}

// adjacent cells along a differ
PatternSet proper_along_a(const Group& g)
{
    Alphabet bits({"0", "1"});
    std::vector<Pattern> ps;
    for (const char* v : {"0", "1"})
        ps.push_back(Pattern{{g.identity(), g.parse("a")}, {bits.parse(v), bits.parse(v)}});
    return PatternSet::forbidden(g, bits, std::move(ps));
}

} // namespace

TEST_CASE("counting ends")
{
    const auto z4 = estimate_ends(Group::cyclic(4), 1, 4);
    CHECK(z4.component_count == 0);
    CHECK(z4.stable);

    const auto z2 = estimate_ends(Group::free_abelian(2), 2, 8);
    CHECK(z2.component_count == 1);
    CHECK(z2.stable);

    const auto z = estimate_ends(Group::free_abelian(1), 1, 8);
    CHECK(z.component_count == 2);
    CHECK(z.stable);

    // in F2 every element of the sphere of radius n+1 starts its own branch
    const auto f2 = Group::free(2);
    int power = 12;
    for (int n = 1; n <= 3; ++n, power *= 3) {
        const auto e = estimate_ends(f2, n, n + 3);
        CHECK(e.component_count == power);
        CHECK(e.truncation_stable);
        CHECK(e.next_count == 3 * power);
        CHECK_FALSE(e.stable);
    }
    CHECK(code_of([&] { estimate_ends(f2, 2, 2); }) == Errc::InvalidArgument);
}

TEST_CASE("separation on Z and F2")
{
    const auto z = Group::free_abelian(1);
    CHECK(separates(z, {at(z, 0), 1}, {at(z, 5), 1}, {at(z, 10), 1}, 3));
    CHECK_FALSE(separates(z, {at(z, 0), 1}, {at(z, 10), 1}, {at(z, 5), 1}, 3));
    CHECK_FALSE(separates(z, {at(z, 0), 1}, {at(z, 2), 1}, {at(z, 10), 1}, 3));

    const auto f2 = Group::free(2);
    CHECK(separates(f2, {f2.identity(), 1}, {f2.parse("aaa"), 1}, {f2.parse("aaaaaa"), 1}, 3));
    CHECK_FALSE(separates(f2, {f2.identity(), 1}, {f2.parse("aaa"), 1}, {f2.parse("bbb"), 1}, 3));
    CHECK(separates(f2, {f2.parse("b"), 1}, {f2.parse("aaa"), 1}, {f2.parse("aaaaB"), 0}, 3));

    const auto z2 = Group::free_abelian(2);
    CHECK_FALSE(separates(z2, {z2.identity(), 1}, {z2.from_coordinates({4, 0}), 1},
        {z2.from_coordinates({8, 0}), 1}, 4));
}

TEST_CASE("separation is translation equivariant and chains")
{
    const auto f2 = Group::free(2);
    std::mt19937 rng(5);
    const auto& ball = f2.ball_members(3);
    std::uniform_int_distribution<std::size_t> pick(0, ball.size() - 1);
    for (int trial = 0; trial < 40; ++trial) {
        const Element c0 = ball[pick(rng)];
        const Element c1 = ball[pick(rng)];
        const Element c2 = ball[pick(rng)];
        const Element h = ball[pick(rng)];
        const bool plain = separates(f2, {c0, 1}, {c1, 0}, {c2, 1}, 2);
        const bool moved = separates(f2, {f2.multiply(h, c0), 1}, {f2.multiply(h, c1), 0}, {f2.multiply(h, c2), 1}, 2);
        CHECK(plain == moved);
    }

    const auto z = Group::free_abelian(1);
    std::uniform_int_distribution<int> coord(-12, 12);
    for (int trial = 0; trial < 100; ++trial) {
        int c[4];
        for (int& v : c)
            v = coord(rng);
        auto sep = [&](int a, int b, int d) { return separates(z, {at(z, a), 1}, {at(z, b), 1}, {at(z, d), 1}, 3); };
        if (sep(c[0], c[1], c[2]) && sep(c[1], c[2], c[3]))
            CHECK(sep(c[0], c[1], c[3]));
        const bool between = (c[0] < c[1] - 2 && c[1] + 2 < c[2]) || (c[2] < c[1] - 2 && c[1] + 2 < c[0]);
        CHECK(sep(c[0], c[1], c[2]) == between);
    }
}

TEST_CASE("axial elements")
{
    const auto z = Group::free_abelian(1);
    const auto az = find_axial(z, 1, 8);
    CHECK(z.norm(az.g) == 3);
    CHECK(az.from_provenance == z.multiply(z.invert(az.provenance.first), az.provenance.second));
    CHECK(is_axial(z, az.from_provenance, 1, 3, 3));
    CHECK_FALSE(is_axial(z, at(z, 2), 1, 3, 3));

    const auto f2 = Group::free(2);
    const auto af = find_axial(f2, 1, 5);
    CHECK(f2.norm(af.g) == 3);
    CHECK(is_axial(f2, af.g, 1, 3, 3));
    CHECK(f2.norm(af.g) <= f2.norm(af.from_provenance));

    CHECK(code_of([] { find_axial(Group::free_abelian(2), 1, 6); }) == Errc::NotMultiEnded);
    CHECK(code_of([] { find_axial(Group::free_abelian(1), 2, 4); }) == Errc::TruncationTooSmall);

    CHECK(disjoint_power(z, at(z, 3), 1) == 2);
    CHECK(disjoint_power(z, at(z, 5), 1) == 1);
    CHECK(code_of([] {
        const auto c = Group::cyclic(5);
        disjoint_power(c, c.parse("a"), 1);
    }) == Errc::DisjointnessFailure);
}

TEST_CASE("fundamental domains")
{
    const auto z = Group::free_abelian(1);
    const auto fd = fundamental_domain(z, at(z, 1), 0, 5, 1, 3);
    std::set<std::int64_t> got;
    for (const auto& e : fd.members)
        got.insert(z.coordinates(e)[0]);
    CHECK(got == std::set<std::int64_t>{-1, 0, 1, 2, 3});

    // every integer has exactly one translate in the domain
    for (int h = -30; h <= 30; ++h) {
        int hits = 0;
        for (int k = -10; k <= 10; ++k)
            hits += fd.member_set.count(at(z, h + 5 * k)) ? 1 : 0;
        CHECK(hits == 1);
    }
    CHECK(code_of([&] { fundamental_domain(z, at(z, 1), 0, 2, 1, 3); }) == Errc::DisjointnessFailure);

    const auto f2 = Group::free(2);
    const auto x = f2.parse("aaaaaa");
    const auto tree = fundamental_domain(f2, x, 0, 1, 1, 3);
    for (const auto& b : f2.ball_members(1))
        CHECK(tree.member_set.count(b));
    for (const auto& y : tree.members) {
        for (int k : {-1, 1})
            CHECK_FALSE(tree.member_set.count(f2.multiply(f2.power(x, k), y)));
    }
}

TEST_CASE("periodic points on Z")
{
    const auto z = Group::free_abelian(1);
    const auto ax = find_axial(z, 1, 8);
    Alphabet bits({"0", "1"});
    const auto golden = forbid_words(z, bits, {"11"});
    CHECK(code_of([&] {
        construct_periodic_point(golden, patch_from_string(z, bits, std::string(13, '0'), -6), ax);
    }) == Errc::NeedLargerPatch);

    const auto zeros = construct_periodic_point(golden, patch_from_string(z, bits, std::string(41, '0'), -20), ax);
    for (int x = -50; x <= 50; ++x)
        CHECK(periodic_lookup(zeros.config, at(z, x)) == bits.parse("0"));

    Alphabet ab({"a", "b"});
    const auto alternating = forbid_words(z, ab, {"aa", "bb"});
    std::string abab;
    for (int i = 0; i < 41; ++i)
        abab += (i % 2 == 0) ? 'a' : 'b';
    const auto pp = construct_periodic_point(alternating, patch_from_string(z, ab, abab, -20), ax);
    for (int x = -50; x <= 50; ++x)
        CHECK(periodic_lookup(pp.config, at(z, x)) == ab.parse((x % 2 == 0) ? "a" : "b"));

    const auto bad = forbid_words(z, ab, {"ab"});
    CHECK(code_of([&] { construct_periodic_point(bad, patch_from_string(z, ab, abab, -20), ax); }) ==
        Errc::InvalidArgument);
}

TEST_CASE("periodic points on F2 from a tied seed")
{
    const auto f2 = Group::free(2);
    const auto ps = proper_along_a(f2);
    const auto ax = find_axial(f2, 1, 5);
    const Element step = f2.power(ax.g, disjoint_power(f2, ax.g, 1));
    const auto seed = tied_seed(ps, step, 1, 1, 100000);
    REQUIRE(seed.has_value());
    const auto pp = construct_periodic_point(ps, *seed, ax);
    CHECK(verify_periodic_point(pp.config, ps));

    std::mt19937 rng(9);
    const auto& ball = f2.ball_members(4);
    std::uniform_int_distribution<std::size_t> pick(0, ball.size() - 1);
    for (int trial = 0; trial < 50; ++trial) {
        const Element x = ball[pick(rng)];
        const auto v = periodic_lookup(pp.config, x);
        if (v)
            CHECK(v == periodic_lookup(pp.config, f2.multiply(pp.config.period, x)));
    }
}
