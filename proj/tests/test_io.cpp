#include <doctest.h>

#include "sft/io.hpp"

using namespace sft;

namespace {

const std::string fixtures = FIXTURE_DIR;

std::string fixture(const std::string& name) { return fixtures + "/" + name; }

template <class F>
std::string parse_message(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        CHECK(e.code() == Errc::Parse);
        return e.what();
    }
    FAIL("expected a parse error");
    return {};
}

bool same_patterns(const PatternSet& a, const PatternSet& b)
{
    if (!(a.alphabet == b.alphabet) || a.radius != b.radius || a.patterns.size() != b.patterns.size())
        return false;
    for (std::size_t i = 0; i < a.patterns.size(); ++i) {
        if (a.patterns[i].support != b.patterns[i].support || a.patterns[i].assign != b.patterns[i].assign)
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("group files round trip")
{
    for (const char* name : {"z.json", "z2.json", "z4.json", "f2.json", "z_star_z.json", "z_steps23.json",
             "z_lattice.json", "heisenberg.json"}) {
        CAPTURE(name);
        const auto file = group_file_from_json(read_json_file(fixture(name)));
        const auto again = group_file_from_json(parse_json(to_json(file).dump(2), "serialized"));
        CHECK(again == file);
    }
    const Group steps = build_group(group_file_from_json(read_json_file(fixture("z_steps23.json"))));
    const Group lattice = build_group(group_file_from_json(read_json_file(fixture("z_lattice.json"))));
    CHECK(steps.ball_size(3) == lattice.ball_size(3));
    CHECK(build_group(group_file_from_json(read_json_file(fixture("z4.json")))).is_finite());

    const auto unknown = group_file_from_json(json{{"family", "sphere"}});
    CHECK(parse_message([&] { build_group(unknown); }).find("group.family") != std::string::npos);
    const auto missing = group_file_from_json(json{{"family", "free"}, {"params", json::object()}});
    CHECK(parse_message([&] { build_group(missing); }).find("rank") != std::string::npos);
}

TEST_CASE("pattern files round trip")
{
    const Group z = Group::free_abelian(1);
    const Group z2 = Group::free_abelian(2);
    for (const auto& [name, g] : {std::pair{"golden_mean.json", z}, std::pair{"all_pairs.json", z},
             std::pair{"no_runs_z2.json", z2}, std::pair{"product_alphabet.json", z}}) {
        CAPTURE(name);
        const auto ps = patterns_from_json(read_json_file(fixture(name)), g);
        const auto text = to_json(ps).dump();
        const auto again = patterns_from_json(parse_json(text, "serialized"), g);
        CHECK(same_patterns(ps, again));
        CHECK(to_json(again).dump() == text);
    }
    const auto gm = patterns_from_json(read_json_file(fixture("golden_mean.json")), z);
    CHECK(gm.radius == 1);
    CHECK(gm.patterns[0].support[1] == z.from_coordinates({1}));
}

TEST_CASE("diagnostics point at the input")
{
    const std::string syntax = parse_message([] { read_json_file(fixture("malformed.json")); });
    CHECK(syntax.find("malformed.json:3:") != std::string::npos);
    const Group z = Group::free_abelian(1);
    const std::string field =
        parse_message([&] { patterns_from_json(read_json_file(fixture("bad_field.json")), z); });
    CHECK(field.find("patterns.patterns[0].support[1]") != std::string::npos);
    const std::string missing = parse_message([&] { patterns_from_json(json{{"alphabet", {"0"}}}, z); });
    CHECK(missing.find("patterns") != std::string::npos);
    const auto open = parse_message([] { read_json_file(fixture("no_such_file.json")); });
    CHECK(open.find("cannot open") != std::string::npos);
    CHECK(parse_message([] { wang_from_json(json::array({json::array({1, 2, 3})})); }).find("wang.tiles[0]") !=
        std::string::npos);
}

TEST_CASE("Wang files and patches")
{
    const auto ts = wang_from_json(read_json_file(fixture("wang_checker.json")));
    CHECK(ts.tiles.size() == 2);
    CHECK(ts.tiles[0].south == 1);
    const auto back = wang_from_json(to_json(ts));
    CHECK(to_json(back) == to_json(ts));
    CHECK(wang_from_json(read_json_file(fixture("wang_stuck.json"))).tiles.size() == 1);

    const Group z2 = Group::free_abelian(2);
    const Alphabet a({"0", "1"});
    Patch p(z2);
    for (int x = 0; x < 3; ++x) {
        for (int y = 0; y < 2; ++y)
            p.set(z2.from_coordinates({x, y}), a.letter(static_cast<std::uint32_t>((x + y) % 2)));
    }
    const auto pj = to_json(p, a);
    const Patch q = patch_from_json(pj, z2, a);
    CHECK(q.cells == p.cells);
    CHECK(to_json(q, a) == pj);

    const std::string svg = patch_svg(p, a);
    CHECK(svg.find("width=\"72\" height=\"48\"") != std::string::npos);
    std::size_t rects = 0;
    for (auto pos = svg.find("<rect"); pos != std::string::npos; pos = svg.find("<rect", pos + 1))
        ++rects;
    CHECK(rects == 6);
    // north is up: (0, 1) sits in the top row
    CHECK(svg.find("x=\"0\" y=\"0\" width=\"24\" height=\"24\" fill=\"#1f77b4\"") != std::string::npos);
    CHECK_THROWS_AS(patch_svg(Patch(Group::free_abelian(1)), a), Error);
}

TEST_CASE("outcomes serialize their witnesses")
{
    const Group z = Group::free_abelian(1);
    const auto gm = patterns_from_json(read_json_file(fixture("golden_mean.json")), z);
    const auto out = decide_domino(gm);
    const json j = to_json(out, gm.alphabet);
    CHECK(j["verdict"] == "nonempty");
    CHECK(j.contains("witness"));
    CHECK(j["witness"]["period"] == "a");

    const auto none = decide_domino(patterns_from_json(read_json_file(fixture("all_pairs.json")), z));
    const json k = to_json(none, gm.alphabet);
    CHECK(k["verdict"] == "empty");
    CHECK(k["certificate_radius"] == 1);
}
