#include <doctest.h>

#include "sft/domino.hpp"

#include <random>

using namespace sft;

namespace {

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

PatternSet random_z_sft(std::mt19937& rng)
{
    const auto z = Group::free_abelian(1);
    const int letters = std::uniform_int_distribution<int>(1, 3)(rng);
    std::vector<std::string> names;
    for (int i = 0; i < letters; ++i)
        names.push_back(std::string(1, static_cast<char>('a' + i)));
    Alphabet a(names);
    std::vector<Pattern> ps;
    const int count = std::uniform_int_distribution<int>(1, 6)(rng);
    for (int i = 0; i < count; ++i) {
        Pattern p;
        const int mask = std::uniform_int_distribution<int>(1, 7)(rng);
        for (int x = 0; x < 3; ++x) {
            if (mask & (1 << x)) {
                p.support.push_back(at(z, x));
                p.assign.push_back(a.letter(std::uniform_int_distribution<std::uint32_t>(0, letters - 1)(rng)));
            }
        }
        ps.push_back(std::move(p));
    }
    return PatternSet::forbidden(z, a, std::move(ps));
}

bool repeated_word_admissible(const PatternSet& ps, const std::vector<Letter>& w)
{
    Patch p(ps.group);
    for (std::int64_t x = 0; x < static_cast<std::int64_t>(w.size()) * 4 + 6; ++x)
        p.set(at(ps.group, x), w[static_cast<std::size_t>(x) % w.size()]);
    return locally_admissible(p, ps);
}

} // namespace

TEST_CASE("emptiness certificates")
{
    const auto z = Group::free_abelian(1);
    Alphabet ab({"a", "b"});
    const auto all = forbid_words(z, ab, {"aa", "ab", "ba", "bb"});
    const auto c1 = emptiness_certificate(all, 1);
    CHECK(c1.empty);
    CHECK(c1.radius == 1);

    Alphabet bits({"0", "1"});
    const auto golden = emptiness_certificate(forbid_words(z, bits, {"11"}), 3);
    CHECK_FALSE(golden.empty);
    REQUIRE(golden.witness.has_value());
    CHECK(golden.witness->size() == 7);
    CHECK(locally_admissible(*golden.witness, forbid_words(z, bits, {"11"})));

    const auto only_10 = forbid_words(z, bits, {"00", "01", "11"});
    CHECK(emptiness_certificate(only_10, 2).empty);
    CHECK(emptiness_certificate(only_10, 3).empty);
    CHECK_FALSE(emptiness_certificate(forbid_words(z, bits, {"00", "01", "11"}), 1).witness.has_value());

    CHECK_THROWS_AS(emptiness_certificate(forbid_words(z, ab, {"aba"}), 0), Error);
}

TEST_CASE("transition oracle")
{
    const auto z = Group::free_abelian(1);
    Alphabet bits({"0", "1"});
    const auto golden = z_transition_oracle(forbid_words(z, bits, {"11"}));
    CHECK(golden.nonempty);
    CHECK(golden.word == std::vector<Letter>{bits.parse("0")});

    const auto alt = z_transition_oracle(forbid_words(z, bits, {"00", "11"}));
    CHECK(alt.nonempty);
    CHECK(alt.word == std::vector<Letter>{bits.parse("0"), bits.parse("1")});

    CHECK_FALSE(z_transition_oracle(forbid_words(z, bits, {"00", "01", "10", "11"})).nonempty);
    CHECK_FALSE(z_transition_oracle(forbid_words(z, bits, {"00", "01", "11"})).nonempty);
}

TEST_CASE("decide_domino on Z examples")
{
    const auto z = Group::free_abelian(1);
    Alphabet bits({"0", "1"});
    const auto golden = decide_domino(forbid_words(z, bits, {"11"}));
    REQUIRE(golden.verdict == DominoVerdict::Nonempty);
    REQUIRE(golden.periodic.has_value());
    CHECK(golden.periodic->period == at(z, 1));
    CHECK(periodic_lookup(*golden.periodic, at(z, 5)) == bits.parse("0"));

    Alphabet ab({"a", "b"});
    const auto alt = decide_domino(forbid_words(z, ab, {"aa", "bb"}));
    REQUIRE(alt.verdict == DominoVerdict::Nonempty);
    CHECK(alt.periodic->period == at(z, 2));
    CHECK(periodic_lookup(*alt.periodic, at(z, 0)) != periodic_lookup(*alt.periodic, at(z, 1)));

    const auto none = decide_domino(forbid_words(z, ab, {"aa", "ab", "ba", "bb"}));
    CHECK(none.verdict == DominoVerdict::Empty);
    CHECK(none.radius == 1);
}

TEST_CASE("decide_domino agrees with the transition oracle")
{
    std::mt19937 rng(2024);
    int unknown = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto ps = random_z_sft(rng);
        const auto oracle = z_transition_oracle(ps);
        if (oracle.nonempty)
            CHECK(repeated_word_admissible(ps, oracle.word));
        const auto out = decide_domino(ps, DominoBudget{200'000, 24});
        if (out.verdict == DominoVerdict::Unknown) {
            ++unknown;
            continue;
        }
        CHECK((out.verdict == DominoVerdict::Nonempty) == oracle.nonempty);
        if (out.verdict == DominoVerdict::Nonempty) {
            REQUIRE(out.periodic.has_value());
            CHECK(verify_periodic_point(*out.periodic, ps));
        } else {
            // the certificate still holds one radius further out
            CHECK(emptiness_certificate(ps, out.radius + 1).empty);
        }
    }
    MESSAGE("unknown verdicts: " << unknown << " of 200");
    CHECK(unknown <= 10);
}

TEST_CASE("decide_domino on Z^2 Wang tiles")
{
    const auto z2 = Group::free_abelian(2);
    const auto stripes = decide_domino(wang_to_sft({{{0, 1, 0, 2}, {0, 2, 0, 1}}}, z2));
    REQUIRE(stripes.verdict == DominoVerdict::Nonempty);
    CHECK(stripes.periodic->extra_periods.size() == 1);

    const auto clash = decide_domino(wang_to_sft({{{0, 1, 1, 0}}}, z2));
    CHECK(clash.verdict == DominoVerdict::Empty);
}

TEST_CASE("decide_domino on free groups, free products and finite groups")
{
    Alphabet bits({"0", "1"});
    const auto f2 = Group::free(2);
    std::vector<Pattern> proper;
    for (const char* v : {"0", "1"})
        proper.push_back(Pattern{{f2.identity(), f2.parse("a")}, {bits.parse(v), bits.parse(v)}});
    const auto out = decide_domino(PatternSet::forbidden(f2, bits, proper));
    REQUIRE(out.verdict == DominoVerdict::Nonempty);
    REQUIRE(out.periodic.has_value());
    CHECK(out.method == "ends");

    std::vector<Pattern> every;
    for (const char* u : {"0", "1"}) {
        for (const char* v : {"0", "1"})
            every.push_back(Pattern{{f2.identity(), f2.parse("b")}, {bits.parse(u), bits.parse(v)}});
    }
    CHECK(decide_domino(PatternSet::forbidden(f2, bits, every)).verdict == DominoVerdict::Empty);

    const auto dihedral = Group::free_product({2, 2});
    const auto one = decide_domino(PatternSet::forbidden(dihedral, Alphabet({"x"}), {}));
    REQUIRE(one.verdict == DominoVerdict::Nonempty);
    CHECK(one.periodic.has_value());

    const auto c3 = Group::cyclic(3);
    auto coloring = [&](Alphabet a) {
        std::vector<Pattern> ps;
        for (std::uint32_t i = 0; i < *a.size(); ++i)
            ps.push_back(Pattern{{c3.identity(), c3.parse("a")}, {a.letter(i), a.letter(i)}});
        return PatternSet::forbidden(c3, a, ps);
    };
    CHECK(decide_domino(coloring(Alphabet({"r", "g"}))).verdict == DominoVerdict::Empty);
    const auto three = decide_domino(coloring(Alphabet({"r", "g", "b"})));
    REQUIRE(three.verdict == DominoVerdict::Nonempty);
    CHECK(three.patch->size() == 3);
}
