#include "sft/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace sft {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what)
{
    throw Error(Errc::Parse, where + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& where)
{
    if (!j.is_object())
        bad(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end())
        bad(where, std::string("missing field '") + key + "'");
    return *it;
}

template <class T>
T get(const json& j, const std::string& where)
{
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        bad(where, std::string("unexpected ") + j.type_name());
    }
}

const json& array_at(const json& j, const std::string& where)
{
    if (!j.is_array())
        bad(where, std::string("expected an array, got ") + j.type_name());
    return j;
}

Element parse_element(const Group& g, const json& j, const std::string& where)
{
    try {
        return g.parse(get<std::string>(j, where));
    } catch (const Error& e) {
        if (e.code() == Errc::Parse)
            bad(where, e.what());
        throw;
    }
}

Letter parse_letter(const Alphabet& a, const json& j, const std::string& where)
{
    try {
        return a.parse(get<std::string>(j, where));
    } catch (const Error& e) {
        if (e.code() == Errc::Parse)
            bad(where, e.what());
        throw;
    }
}

std::vector<std::pair<Element, Letter>> sorted_cells(const Patch& p)
{
    std::vector<std::pair<Element, Letter>> cells(p.cells.begin(), p.cells.end());
    std::sort(cells.begin(), cells.end(), [&](const auto& x, const auto& y) {
        const int nx = p.group.norm(x.first);
        const int ny = p.group.norm(y.first);
        return nx != ny ? nx < ny : x.first.code < y.first.code;
    });
    return cells;
}

std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

json parse_json(const std::string& text, const std::string& source)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        const auto nl = text.rfind('\n', upto == 0 ? 0 : upto - 1);
        const std::size_t col = nl == std::string::npos ? upto + 1 : upto - nl;
        bad(source + ":" + std::to_string(line) + ":" + std::to_string(col), e.what());
    }
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::Parse, path + ": cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_json(buf.str(), path);
}

GroupFile group_file_from_json(const json& j)
{
    GroupFile f;
    f.family = get<std::string>(field(j, "family", "group"), "group.family");
    if (auto it = j.find("params"); it != j.end()) {
        if (!it->is_object())
            bad("group.params", "expected an object");
        f.params = *it;
    }
    if (auto it = j.find("generators"); it != j.end())
        f.generators = get<std::vector<std::string>>(*it, "group.generators");
    if (auto it = j.find("relators"); it != j.end())
        f.relators = get<std::vector<std::string>>(*it, "group.relators");
    if (auto it = j.find("wp_budget"); it != j.end())
        f.wp_budget = get<std::size_t>(*it, "group.wp_budget");
    return f;
}

json to_json(const GroupFile& f)
{
    json j{{"family", f.family}, {"params", f.params}};
    if (f.generators)
        j["generators"] = *f.generators;
    if (f.relators)
        j["relators"] = *f.relators;
    if (f.wp_budget)
        j["wp_budget"] = *f.wp_budget;
    return j;
}

Group build_group(const GroupFile& f)
{
    auto param = [&](const char* key) -> const json& { return field(f.params, key, "group.params"); };
    const std::string where = std::string("group.params");
    if (f.family == "free_abelian")
        return Group::free_abelian(get<int>(param("rank"), where + ".rank"));
    if (f.family == "integers_with_steps")
        return Group::integers_with_steps(get<std::vector<std::int64_t>>(param("steps"), where + ".steps"));
    if (f.family == "free")
        return Group::free(get<int>(param("rank"), where + ".rank"));
    if (f.family == "cyclic")
        return Group::cyclic(get<int>(param("modulus"), where + ".modulus"));
    if (f.family == "free_product")
        return Group::free_product(get<std::vector<int>>(param("orders"), where + ".orders"));
    if (f.family == "lattice") {
        const auto vectors = get<std::vector<std::vector<std::int64_t>>>(param("vectors"), where + ".vectors");
        if (!f.generators)
            bad("group", "lattice needs generator names");
        const Group names = Group::lattice(vectors, *f.generators, {});
        std::vector<Word> relators;
        for (std::size_t i = 0; f.relators && i < f.relators->size(); ++i) {
            try {
                relators.push_back(names.parse_word((*f.relators)[i]));
            } catch (const Error& e) {
                bad("group.relators[" + std::to_string(i) + "]", e.what());
            }
        }
        return Group::lattice(vectors, *f.generators, std::move(relators));
    }
    if (f.family == "presentation") {
        if (!f.generators)
            bad("group", "presentation needs generators");
        return Group::presentation(*f.generators, f.relators.value_or(std::vector<std::string>{}),
            f.wp_budget.value_or(100000));
    }
    bad("group.family", "unknown family '" + f.family + "'");
}

Alphabet alphabet_from_json(const json& j, const std::string& where)
{
    array_at(j, where);
    if (j.empty())
        bad(where, "empty alphabet");
    if (j.front().is_string())
        return Alphabet(get<std::vector<std::string>>(j, where));
    std::vector<Alphabet::Component> comps;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string at = where + "[" + std::to_string(i) + "]";
        comps.push_back({get<std::string>(field(j[i], "name", at), at + ".name"),
            get<std::vector<std::string>>(field(j[i], "values", at), at + ".values")});
    }
    return Alphabet::product(std::move(comps));
}

json to_json(const Alphabet& a)
{
    if (a.is_simple())
        return a.component(0).values;
    json out = json::array();
    for (std::size_t i = 0; i < a.component_count(); ++i)
        out.push_back({{"name", a.component(i).name}, {"values", a.component(i).values}});
    return out;
}

PatternSet patterns_from_json(const json& j, const Group& g)
{
    const Alphabet a = alphabet_from_json(field(j, "alphabet", "patterns"), "patterns.alphabet");
    if (j.contains("predicate"))
        bad("patterns", "predicate pattern sets cannot be read back; write them with --materialize-patterns");
    const json& list = array_at(field(j, "patterns", "patterns"), "patterns.patterns");
    std::vector<Pattern> patterns;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string at = "patterns.patterns[" + std::to_string(i) + "]";
        const json& support = array_at(field(list[i], "support", at), at + ".support");
        const json& assign = array_at(field(list[i], "assign", at), at + ".assign");
        if (support.size() != assign.size())
            bad(at, "support and assign differ in length");
        if (support.empty())
            bad(at, "empty support");
        Pattern p;
        for (std::size_t k = 0; k < support.size(); ++k) {
            p.support.push_back(parse_element(g, support[k], at + ".support[" + std::to_string(k) + "]"));
            p.assign.push_back(parse_letter(a, assign[k], at + ".assign[" + std::to_string(k) + "]"));
        }
        patterns.push_back(std::move(p));
    }
    std::optional<int> radius;
    if (auto it = j.find("radius"); it != j.end())
        radius = get<int>(*it, "patterns.radius");
    return PatternSet::forbidden(g, a, std::move(patterns), radius);
}

json to_json(const PatternSet& ps)
{
    json j{{"alphabet", to_json(ps.alphabet)}, {"radius", ps.radius}};
    if (!ps.is_explicit()) {
        j["predicate"] = ps.predicate->name();
        return j;
    }
    json list = json::array();
    for (const auto& p : ps.patterns) {
        json support = json::array(), assign = json::array();
        for (std::size_t k = 0; k < p.support.size(); ++k) {
            support.push_back(ps.group.format(p.support[k]));
            assign.push_back(ps.alphabet.format(p.assign[k]));
        }
        list.push_back({{"support", support}, {"assign", assign}});
    }
    j["patterns"] = list;
    return j;
}

WangTileSet wang_from_json(const json& j)
{
    const json& list = j.is_object() ? field(j, "tiles", "wang") : j;
    array_at(list, "wang.tiles");
    WangTileSet ts;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string at = "wang.tiles[" + std::to_string(i) + "]";
        const auto c = get<std::vector<int>>(list[i], at);
        if (c.size() != 4)
            bad(at, "a tile has four colors: north, east, south, west");
        ts.tiles.push_back({c[0], c[1], c[2], c[3]});
    }
    return ts;
}

json to_json(const WangTileSet& ts)
{
    json list = json::array();
    for (const auto& t : ts.tiles)
        list.push_back({t.north, t.east, t.south, t.west});
    return {{"tiles", list}};
}

json to_json(const Patch& p, const Alphabet& a)
{
    json cells = json::array();
    for (const auto& [x, l] : sorted_cells(p))
        cells.push_back({p.group.format(x), a.format(l)});
    return {{"cells", cells}};
}

Patch patch_from_json(const json& j, const Group& g, const Alphabet& a)
{
    const json& cells = array_at(field(j, "cells", "patch"), "patch.cells");
    Patch p(g);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::string at = "patch.cells[" + std::to_string(i) + "]";
        if (!cells[i].is_array() || cells[i].size() != 2)
            bad(at, "expected [word, letter]");
        p.set(parse_element(g, cells[i][0], at + "[0]"), parse_letter(a, cells[i][1], at + "[1]"));
    }
    return p;
}

json to_json(const PeriodicConfig& pc, const Alphabet& a)
{
    json extra = json::array(), reps = json::array();
    for (const auto& e : pc.extra_periods)
        extra.push_back(pc.group.format(e));
    for (const auto& r : pc.representatives)
        reps.push_back(pc.group.format(r));
    return {{"period", pc.group.format(pc.period)}, {"extra_periods", extra}, {"representatives", reps},
        {"domain", to_json(pc.domain_data, a)}};
}

json to_json(const DominoOutcome& o, const Alphabet& a)
{
    json j{{"verdict", std::string(to_string(o.verdict))}, {"method", o.method}, {"nodes", o.nodes},
        {"rounds", o.rounds}};
    if (o.verdict == DominoVerdict::Empty)
        j["certificate_radius"] = o.radius;
    if (o.periodic)
        j["witness"] = to_json(*o.periodic, a);
    if (o.patch)
        j["witness_patch"] = to_json(*o.patch, a);
    return j;
}

std::string patch_svg(const Patch& p, const Alphabet& a)
{
    if (!p.group.is_rank_two_lattice())
        throw Error(Errc::InvalidArgument, "SVG output is for patches on Z^2");
    static const char* const palette[] = {"#f2f2f2", "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
        "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79"};
    constexpr int cell = 24;
    std::int64_t x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    bool first = true;
    for (const auto& [e, l] : p.cells) {
        const auto c = p.group.coordinates(e);
        x0 = first ? c[0] : std::min(x0, c[0]);
        x1 = first ? c[0] : std::max(x1, c[0]);
        y0 = first ? c[1] : std::min(y0, c[1]);
        y1 = first ? c[1] : std::max(y1, c[1]);
        first = false;
    }
    const std::int64_t w = p.cells.empty() ? 0 : (x1 - x0 + 1) * cell;
    const std::int64_t h = p.cells.empty() ? 0 : (y1 - y0 + 1) * cell;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
        << ' ' << h << "\">\n";
    for (const auto& [e, l] : sorted_cells(p)) {
        const auto c = p.group.coordinates(e);
        std::size_t index = 0;
        for (std::size_t k = 0; k < l.size(); ++k)
            index = index * a.component_size(k) + l[k];
        out << "  <rect x=\"" << (c[0] - x0) * cell << "\" y=\"" << (y1 - c[1]) * cell << "\" width=\"" << cell
            << "\" height=\"" << cell << "\" fill=\"" << palette[index % std::size(palette)]
            << "\" stroke=\"#333\" stroke-width=\"0.5\"><title>" << xml_escape("(" + std::to_string(c[0]) + ", " + std::to_string(c[1]) + "): " + a.format(l))
            << "</title></rect>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace sft
