#include <doctest.h>

#include "sft/search.hpp"
#include "sft/sft.hpp"

#include <random>

using namespace sft;

namespace {

Group z() { return Group::free_abelian(1); }

Pattern word_pattern(const Group& g, const Alphabet& a, std::string_view w)
{
    Pattern p;
    for (std::size_t i = 0; i < w.size(); ++i) {
        p.support.push_back(g.from_coordinates({static_cast<std::int64_t>(i)}));
        p.assign.push_back(a.parse(w.substr(i, 1)));
    }
    return p;
}

PatternSet forbid_words(const Group& g, const Alphabet& a, std::vector<std::string> words)
{
    std::vector<Pattern> ps;
    for (const auto& w : words)
        ps.push_back(word_pattern(g, a, w));
    return PatternSet::forbidden(g, a, std::move(ps));
}

} // namespace

TEST_CASE("occurs")
{
    auto g = z();
    Alphabet ab({"a", "b"});
    const Pattern p = word_pattern(g, ab, "ab");
    CHECK(occurs(patch_from_string(g, ab, "ab"), p, g.identity()));
    CHECK_FALSE(occurs(patch_from_string(g, ab, "aba"), p, g.from_coordinates({1})));
    CHECK_THROWS_AS(occurs(patch_from_string(g, ab, "ab"), p, g.from_coordinates({1})), Error);
}

TEST_CASE("locally admissible")
{
    auto g = z();
    Alphabet bits({"0", "1"});
    const auto golden = forbid_words(g, bits, {"11"});
    CHECK(locally_admissible(patch_from_string(g, bits, "0101"), golden));
    CHECK_FALSE(locally_admissible(patch_from_string(g, bits, "0110"), golden));
    CHECK(locally_admissible(Patch(g), golden));
}

TEST_CASE("admissibility is monotone under restriction and translation compatible")
{
    auto g = z();
    Alphabet abc({"a", "b", "c"});
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> letter(0, 2);
    const auto ps = forbid_words(g, abc, {"ab", "cc", "bab"});
    for (int trial = 0; trial < 200; ++trial) {
        std::string s;
        for (int i = 0; i < 8; ++i)
            s += static_cast<char>('a' + letter(rng));
        const Patch p = patch_from_string(g, abc, s);
        const bool whole = locally_admissible(p, ps);
        const bool has_forbidden = s.find("ab") != std::string::npos || s.find("cc") != std::string::npos;
        CHECK(whole == !has_forbidden);
        if (whole) {
            for (std::size_t cut = 0; cut < s.size(); ++cut)
                CHECK(locally_admissible(patch_from_string(g, abc, s.substr(cut)), ps));
        }
        const Element h = g.from_coordinates({trial % 5 - 2});
        const Patch moved = p.translated(h);
        for (const auto& pat : ps.patterns) {
            for (std::int64_t x = 0; x + static_cast<std::int64_t>(pat.support.size()) <= 8; ++x) {
                const Element at = g.from_coordinates({x});
                CHECK(occurs(moved, pat, g.multiply(h, at)) == occurs(p, pat, at));
            }
        }
    }
}

TEST_CASE("Wang tiles")
{
    auto z2 = Group::free_abelian(2);
    const auto one = wang_to_sft({{{0, 0, 0, 0}}}, z2);
    CHECK(one.patterns.empty());
    CHECK(one.radius == 1);

    // each tile matches only the other horizontally and itself vertically
    WangTileSet two{{{0, 1, 0, 2}, {0, 2, 0, 1}}};
    const auto ps = wang_to_sft(two, z2);
    std::size_t horizontal = 0;
    std::size_t vertical = 0;
    for (const auto& p : ps.patterns)
        (p.support[1] == z2.from_coordinates({1, 0}) ? horizontal : vertical) += 1;
    CHECK(horizontal == 2);
    CHECK(vertical == 0);

    // brute force over 2x2 torus blocks: every row alternates, rows are independent
    int tilings = 0;
    for (int mask = 0; mask < 16; ++mask) {
        auto t = [&](int i, int j) { return (mask >> (2 * j + i)) & 1; };
        bool ok = true;
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                const auto& a = two.tiles[static_cast<std::size_t>(t(i, j))];
                ok = ok && a.east == two.tiles[static_cast<std::size_t>(t((i + 1) % 2, j))].west;
                ok = ok && a.north == two.tiles[static_cast<std::size_t>(t(i, (j + 1) % 2))].south;
            }
        }
        if (ok) {
            ++tilings;
            CHECK(t(0, 0) != t(1, 0));
            CHECK(t(0, 1) != t(1, 1));
        }
    }
    CHECK(tilings == 4);
    auto found = solve(ps, Layout::torus(z2, 2, 2), 1000);
    REQUIRE(found.result == SearchResult::Found);
    CHECK(found.cells[0] != found.cells[1]);
    CHECK(found.cells[2] != found.cells[3]);
    CHECK(solve(ps, Layout::torus(z2, 1, 1), 1000).result == SearchResult::Exhausted);
}

TEST_CASE("Wang round trip against a direct color scan")
{
    auto z2 = Group::free_abelian(2);
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> color(0, 1);
    for (int trial = 0; trial < 30; ++trial) {
        WangTileSet ts;
        for (int i = 0; i < 3; ++i)
            ts.tiles.push_back({color(rng), color(rng), color(rng), color(rng)});
        const auto ps = wang_to_sft(ts, z2);
        std::uniform_int_distribution<std::uint32_t> tile(0, 2);
        for (int k = 0; k < 20; ++k) {
            Patch p(z2);
            std::uint32_t grid[3][3];
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    grid[i][j] = tile(rng);
                    p.set(z2.from_coordinates({i, j}), Letter{grid[i][j]});
                }
            }
            bool matches = true;
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    if (i + 1 < 3)
                        matches = matches && ts.tiles[grid[i][j]].east == ts.tiles[grid[i + 1][j]].west;
                    if (j + 1 < 3)
                        matches = matches && ts.tiles[grid[i][j]].north == ts.tiles[grid[i][j + 1]].south;
                }
            }
            CHECK(locally_admissible(p, ps) == matches);
        }
    }
}

TEST_CASE("periodic lookup")
{
    auto g = z();
    Alphabet ab({"a", "b"});
    PeriodicConfig pc(g, g.from_coordinates({2}), patch_from_string(g, ab, "ab"));
    pc.representatives = {g.from_coordinates({0}), g.from_coordinates({1})};
    CHECK(periodic_lookup(pc, g.from_coordinates({7})) == ab.parse("b"));
    CHECK(periodic_lookup(pc, g.identity()) == ab.parse("a"));
    for (int x = -30; x <= 30; ++x) {
        const Element e = g.from_coordinates({x});
        CHECK(periodic_lookup(pc, e) == periodic_lookup(pc, g.multiply(pc.period, e)));
    }
    pc.lookup_budget = 3;
    CHECK_FALSE(periodic_lookup(pc, g.from_coordinates({20})).has_value());

    PeriodicConfig bad(g, g.from_coordinates({2}), patch_from_string(g, ab, "aab"));
    CHECK_THROWS_AS(periodic_lookup(bad, g.identity()), Error);
}

TEST_CASE("verify periodic points")
{
    auto g = z();
    Alphabet ab({"a", "b"});
    PeriodicConfig pc(g, g.from_coordinates({2}), patch_from_string(g, ab, "ab"));
    pc.representatives = {g.from_coordinates({0}), g.from_coordinates({1})};
    CHECK(verify_periodic_point(pc, forbid_words(g, ab, {"aa", "bb"})));
    CHECK_FALSE(verify_periodic_point(pc, forbid_words(g, ab, {"ab"})));

    Alphabet bits({"0", "1"});
    PeriodicConfig zeros(g, g.from_coordinates({1}), patch_from_string(g, bits, "0"));
    zeros.representatives = {g.identity()};
    const auto golden = forbid_words(g, bits, {"11"});
    CHECK(verify_periodic_point(zeros, golden));

    // a verified point stays admissible on the doubled neighborhood
    const Patch wide = resolve(pc, pc.representatives, 4);
    CHECK(locally_admissible(wide, forbid_words(g, ab, {"aa", "bb"})));

    PeriodicConfig gap(g, g.from_coordinates({3}), patch_from_string(g, ab, "ab"));
    gap.representatives = {g.identity()};
    CHECK_THROWS_AS(verify_periodic_point(gap, forbid_words(g, ab, {"aa"})), Error);
}

TEST_CASE("materialized predicates agree with the predicate")
{
    struct NoEqualNeighbours : LocalPredicate {
        int radius() const override { return 1; }
        std::string name() const override { return "no-equal-neighbours"; }
        Probe evaluate(const Window& w) const override
        {
            // cells of B(1) in Z: 0 -> 0, 1 -> +1, 2 -> -1
            for (std::size_t c : {0U, 1U}) {
                if (w.value(c, 0) == kUnset)
                    return Probe::need(c, 0);
            }
            return w.value(0, 0) == w.value(1, 0) ? Probe::violated() : Probe::satisfied();
        }
    };
    auto g = z();
    Alphabet ab({"a", "b"});
    const auto local = PatternSet::local(g, ab, std::make_shared<NoEqualNeighbours>());
    const auto expl = materialize(local, 1000);
    CHECK(expl.patterns.size() == 4);
    for (const std::string s : {"abab", "abba", "aaab", "baba"}) {
        const Patch p = patch_from_string(g, ab, s);
        CHECK(locally_admissible(p, local) == locally_admissible(p, expl));
    }
    CHECK_THROWS_AS(materialize(local, 3), Error);
}

TEST_CASE("search engine on regions and tori")
{
    auto g = z();
    Alphabet ab({"a", "b"});
    const auto alternating = forbid_words(g, ab, {"aa", "bb"});
    CHECK(solve(alternating, Layout::torus(g, 1), 100).result == SearchResult::Exhausted);
    CHECK(solve(alternating, Layout::torus(g, 3), 100).result == SearchResult::Exhausted);
    auto even = solve(alternating, Layout::torus(g, 2), 100);
    REQUIRE(even.result == SearchResult::Found);
    CHECK(even.cells[0] != even.cells[1]);

    const auto all = forbid_words(g, ab, {"aa", "ab", "ba", "bb"});
    CHECK(solve(all, Layout::region(g, g.ball_members(1)), 100).result == SearchResult::Exhausted);
    const auto region = solve(alternating, Layout::region(g, g.ball_members(5)), 100);
    REQUIRE(region.result == SearchResult::Found);
    CHECK(locally_admissible(to_patch(Layout::region(g, g.ball_members(5)), region.cells), alternating));

    auto tight = solve(forbid_words(g, ab, {"aa", "bb", "ab"}), Layout::region(g, g.ball_members(8)), 3);
    CHECK(tight.result == SearchResult::BudgetOut);

    // ties make a region behave like a torus
    std::vector<Element> seg;
    for (int i = 0; i <= 3; ++i)
        seg.push_back(g.from_coordinates({i}));
    const auto tied = Layout::tied(g, seg, {g.identity()}, g.from_coordinates({3}));
    CHECK(tied.cell_count() == 3);
    CHECK(solve(alternating, tied, 100).result == SearchResult::Exhausted);
}
