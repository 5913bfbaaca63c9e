#include "sft/calculus.hpp"
#include "sft/domino.hpp"
#include "sft/ends.hpp"
#include "sft/io.hpp"
#include "sft/qi.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace sft;

namespace {

constexpr int kExitNonempty = 0;
constexpr int kExitEmpty = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 64;
constexpr int kExitInternal = 70;

int exit_for(DominoVerdict v)
{
    switch (v) {
    case DominoVerdict::Nonempty: return kExitNonempty;
    case DominoVerdict::Empty: return kExitEmpty;
    case DominoVerdict::Unknown: return kExitUnknown;
    }
    return kExitUnknown;
}

std::string sha256_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string data = buf.str();
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

struct Options {
    std::uint64_t budget_nodes = DominoBudget{}.nodes;
    std::optional<int> radius;
    std::optional<int> n;
    std::uint64_t seed = 0;
    std::string emit_svg;
    bool materialize = false;
};

// Inputs, parameters and statistics of one run, printed with every result.
class Manifest {
public:
    Manifest(std::string command, const Options& opt) : command_(std::move(command)), start_(clock::now())
    {
        params_["budget_nodes"] = opt.budget_nodes;
        params_["seed"] = opt.seed;
        if (opt.radius)
            params_["radius"] = *opt.radius;
        if (opt.n)
            params_["n"] = *opt.n;
        if (opt.materialize)
            params_["materialize_patterns"] = true;
    }

    json read(const std::string& role, const std::string& path)
    {
        json j = read_json_file(path);
        inputs_.push_back({{"role", role}, {"path", path}, {"sha256", sha256_file(path)}});
        return j;
    }

    Group group(const std::string& role, const std::string& path)
    {
        return build_group(group_file_from_json(read(role, path)));
    }

    json& params() { return params_; }
    void add_nodes(std::uint64_t n) { nodes_ += n; }

    json finish(json result, const std::string& verdict) const
    {
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start_).count();
        return {{"result", std::move(result)},
            {"manifest",
                {{"command", command_}, {"inputs", inputs_}, {"parameters", params_}, {"verdict", verdict},
                    {"nodes", nodes_}, {"wall_ms", ms}}}};
    }

private:
    using clock = std::chrono::steady_clock;
    std::string command_;
    clock::time_point start_;
    json inputs_ = json::array();
    json params_ = json::object();
    std::uint64_t nodes_ = 0;
};

json qi_params_json(const QIParams& q)
{
    return {{"n", q.n}, {"M", q.M}, {"N", q.N}, {"check_radius", q.check_radius}};
}

std::string show(const Group& g, const Element& e)
{
    std::string s = g.format(e);
    return s.empty() ? "1" : s;
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_domino(const Options& opt, const std::string& group_path, const std::string& patterns_path)
{
    Manifest m("domino", opt);
    const Group g = m.group("group", group_path);
    const json input = m.read("patterns", patterns_path);
    const bool tiles = input.is_array() || input.contains("tiles");
    const PatternSet ps = tiles ? wang_to_sft(wang_from_json(input), g) : patterns_from_json(input, g);
    const DominoOutcome out = decide_domino(ps, DominoBudget{opt.budget_nodes, DominoBudget{}.rounds});
    m.add_nodes(out.nodes);
    json result = to_json(out, ps.alphabet);
    if (!opt.emit_svg.empty()) {
        if (g.is_rank_two_lattice() && out.periodic) {
            std::ofstream(opt.emit_svg) << patch_svg(out.periodic->domain_data, ps.alphabet);
            result["svg"] = opt.emit_svg;
        } else {
            result["svg"] = nullptr;
        }
    }
    emit(m.finish(result, std::string(to_string(out.verdict))));
    return exit_for(out.verdict);
}

int cmd_ends(const Options& opt, const std::string& group_path)
{
    Manifest m("ends", opt);
    const Group g = m.group("group", group_path);
    const int n = opt.n.value_or(1);
    const int R = opt.radius.value_or(n + 3);
    const EndsEstimate e = estimate_ends(g, n, R);
    json sizes = json::array();
    for (const auto& c : e.components)
        sizes.push_back(c.size());
    json result{{"count", e.component_count}, {"stable", e.stable}, {"truncation_stable", e.truncation_stable},
        {"next_count", e.next_count}, {"inner_radius", e.inner_radius}, {"outer_radius", e.outer_radius},
        {"component_sizes", sizes}};
    emit(m.finish(result, e.stable ? "stable" : "unstable"));
    return 0;
}

int cmd_axial(const Options& opt, const std::string& group_path)
{
    Manifest m("axial", opt);
    const Group g = m.group("group", group_path);
    const int n = opt.n.value_or(1);
    const int R = opt.radius.value_or(2 * n + 3);
    const AxialElement ax = find_axial(g, n, R);
    json result{{"element", show(g, ax.g)}, {"norm", g.norm(ax.g)},
        {"provenance", {show(g, ax.provenance.first), show(g, ax.provenance.second)}},
        {"from_provenance", show(g, ax.from_provenance)}, {"checked_range", ax.checked_range},
        {"disjoint_power", disjoint_power(g, ax.g, n)}};
    emit(m.finish(result, "found"));
    return 0;
}

int cmd_periodic_point(const Options& opt, const std::string& group_path, const std::string& patterns_path)
{
    Manifest m("periodic-point", opt);
    const Group g = m.group("group", group_path);
    const PatternSet ps = patterns_from_json(m.read("patterns", patterns_path), g);
    const int n = opt.n.value_or(std::max(1, ps.radius));
    const AxialElement ax = find_axial(g, n, 2 * n + 3);

    std::optional<Patch> seed;
    if (g.is_rank_one_lattice()) {
        const Certificate c = emptiness_certificate(ps, opt.radius.value_or(20), opt.budget_nodes);
        m.add_nodes(c.nodes);
        if (c.empty) {
            emit(m.finish({{"verdict", "empty"}, {"certificate_radius", c.radius}}, "empty"));
            return kExitEmpty;
        }
        seed = c.witness;
    } else {
        const Element step = g.power(ax.g, disjoint_power(g, ax.g, n));
        std::uint64_t nodes = 0;
        seed = tied_seed(ps, step, 1, n, opt.budget_nodes, &nodes);
        m.add_nodes(nodes);
        if (!seed) {
            emit(m.finish({{"verdict", "unknown"}, {"reason", "no tied seed within the node budget"}}, "unknown"));
            return kExitUnknown;
        }
    }
    const PeriodicPoint pp = construct_periodic_point(ps, *seed, ax);
    const bool verified = verify_periodic_point(pp.config, ps);
    if (!verified)
        throw Error(Errc::VerificationFailed, "constructed configuration violates a pattern");
    json members = json::array();
    for (const auto& x : pp.domain.members)
        members.push_back(show(g, x));
    json result{{"verdict", "nonempty"}, {"axial", show(g, ax.g)}, {"step", show(g, pp.step)},
        {"period", show(g, pp.config.period)}, {"fundamental_domain", members}, {"verified", verified},
        {"config", to_json(pp.config, ps.alphabet)}};
    emit(m.finish(result, "nonempty"));
    return kExitNonempty;
}

PatternSet maybe_materialize(const PatternSet& ps, const Options& opt)
{
    return opt.materialize ? materialize(ps, opt.budget_nodes) : ps;
}

int cmd_compile_derivative(const Options& opt, const std::string& g_path, const std::string& h_path)
{
    Manifest m("compile-derivative", opt);
    const Group g = m.group("source", g_path);
    const Group h = m.group("target", h_path);
    const int n = opt.n.value_or(1);
    const PatternSet ps = maybe_materialize(compile_derivative_sft(g, h, n), opt);
    json pairs = json::array();
    for (const auto& [a, b] : equal_word_pairs(g))
        pairs.push_back({g.format_word(a), g.format_word(b)});
    json result{{"parameters", {{"n", n}, {"K", relator_bound(g)}}}, {"word_pairs", pairs},
        {"patterns", to_json(ps)}};
    emit(m.finish(result, "compiled"));
    return 0;
}

int cmd_compile_qipair(const Options& opt, const std::string& g_path, const std::string& h_path)
{
    Manifest m("compile-qipair", opt);
    const Group g = m.group("source", g_path);
    const Group h = m.group("target", h_path);
    const int n = opt.n.value_or(1);
    const QIParams q = qi_params(h, n);
    m.params()["qi"] = qi_params_json(q);
    const PatternSet ps = maybe_materialize(compile_qipair_sft(g, h, n), opt);
    emit(m.finish({{"parameters", qi_params_json(q)}, {"patterns", to_json(ps)}}, "compiled"));
    return 0;
}

int cmd_compile_pullback(const Options& opt, const std::string& g_path, const std::string& h_path,
    const std::string& patterns_path)
{
    Manifest m("compile-pullback", opt);
    const Group g = m.group("source", g_path);
    const Group h = m.group("target", h_path);
    const PatternSet ps_h = patterns_from_json(m.read("patterns", patterns_path), h);
    const int n = opt.n.value_or(1);
    const QIParams q = qi_params(h, n);
    m.params()["qi"] = qi_params_json(q);
    const PatternSet ps = maybe_materialize(compile_pullback_sft(g, ps_h, n), opt);
    emit(m.finish({{"parameters", qi_params_json(q)}, {"patterns", to_json(ps)}}, "compiled"));
    return 0;
}

int cmd_transfer(const Options& opt, const std::string& g_path, const std::string& h_path,
    const std::string& patterns_path)
{
    Manifest m("transfer", opt);
    const Group g = m.group("source", g_path);
    const Group h = m.group("target", h_path);
    const PatternSet ps_h = patterns_from_json(m.read("patterns", patterns_path), h);
    const int max_n = opt.n.value_or(3);
    std::uint64_t nodes = 0;
    const DominoSolver solver = [&](const PatternSet& ps) {
        DominoOutcome o = decide_domino(ps, DominoBudget{opt.budget_nodes, DominoBudget{}.rounds});
        nodes += o.nodes;
        return o;
    };
    const TransferOutcome t = domino_transfer(g, ps_h, solver, max_n);
    m.add_nodes(nodes);
    json tried = json::array(), verdicts = json::array();
    for (std::size_t i = 0; i < t.qipair_verdicts.size(); ++i) {
        tried.push_back(qi_params_json(qi_params(h, static_cast<int>(i) + 1)));
        verdicts.push_back(std::string(to_string(t.qipair_verdicts[i])));
    }
    m.params()["qi"] = tried;
    json result{{"verdict", std::string(to_string(t.outcome.verdict))}, {"n", t.n}, {"qipair_verdicts", verdicts},
        {"parameters", tried}};
    if (t.n > 0)
        result["pullback"] = to_json(t.outcome, pullback_alphabet(g, ps_h, t.n));
    emit(m.finish(result, std::string(to_string(t.outcome.verdict))));
    return exit_for(t.outcome.verdict);
}

int cmd_integrate(const Options& opt, const std::string& g_path, const std::string& h_path,
    const std::string& patch_path, const std::string& from, const std::string& word)
{
    Manifest m("integrate", opt);
    const Group g = m.group("source", g_path);
    const Group h = m.group("target", h_path);
    const int n = opt.n.value_or(1);
    Patch p(g);
    if (!patch_path.empty())
        p = patch_from_json(m.read("derivative", patch_path), g, derivative_alphabet(g, h, n));
    const Element start = g.parse(from);
    const Word w = g.parse_word(word);
    const Element v = integrate(from_patch(p, h, n), start, w);
    m.params()["from"] = from;
    m.params()["word"] = word;
    emit(m.finish({{"value", show(h, v)}, {"end", show(g, g.multiply(start, g.normal_form(w)))}}, "evaluated"));
    return 0;
}

int cmd_wang(const Options& opt, const std::string& tiles_path)
{
    Manifest m("wang", opt);
    const WangTileSet ts = wang_from_json(m.read("tiles", tiles_path));
    const PatternSet ps = wang_to_sft(ts, Group::free_abelian(2));
    emit(m.finish({{"patterns", to_json(ps)}, {"group", to_json(GroupFile{"free_abelian", {{"rank", 2}}, {}, {}, {}})}},
        "converted"));
    return 0;
}

int run(int argc, char** argv)
{
    CLI::App app{"Subshifts of finite type on finitely generated groups"};
    app.require_subcommand(1);
    Options opt;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--budget-nodes", opt.budget_nodes, "search node budget");
        sub->add_option("--radius", opt.radius, "truncation or certificate radius");
        sub->add_option("--n", opt.n, "ball radius / Lipschitz constant");
        sub->add_option("--seed", opt.seed, "recorded in the manifest");
        sub->add_option("--emit-svg", opt.emit_svg, "write a Z^2 witness as SVG");
        sub->add_flag("--materialize-patterns", opt.materialize, "expand predicates into explicit patterns");
    };
    std::string a, b, c, from = "1", word;
    std::function<int()> action;

    auto* domino = app.add_subcommand("domino", "decide emptiness of an SFT or a Wang tile set on Z^2");
    domino->add_option("group", a)->required();
    domino->add_option("patterns", b)->required();
    common(domino);
    domino->callback([&] { action = [&] { return cmd_domino(opt, a, b); }; });

    auto* ends = app.add_subcommand("ends", "count unbounded components outside B(n)");
    ends->add_option("group", a)->required();
    common(ends);
    ends->callback([&] { action = [&] { return cmd_ends(opt, a); }; });

    auto* axial = app.add_subcommand("axial", "find an n-axial element");
    axial->add_option("group", a)->required();
    common(axial);
    axial->callback([&] { action = [&] { return cmd_axial(opt, a); }; });

    auto* periodic = app.add_subcommand("periodic-point", "build a periodic configuration on a multi-ended group");
    periodic->add_option("group", a)->required();
    periodic->add_option("patterns", b)->required();
    common(periodic);
    periodic->callback([&] { action = [&] { return cmd_periodic_point(opt, a, b); }; });

    auto* deriv = app.add_subcommand("compile-derivative", "derivative subshift of G -> H");
    deriv->add_option("source", a)->required();
    deriv->add_option("target", b)->required();
    common(deriv);
    deriv->callback([&] { action = [&] { return cmd_compile_derivative(opt, a, b); }; });

    auto* qipair = app.add_subcommand("compile-qipair", "QI-pair subshift of G -> H");
    qipair->add_option("source", a)->required();
    qipair->add_option("target", b)->required();
    common(qipair);
    qipair->callback([&] { action = [&] { return cmd_compile_qipair(opt, a, b); }; });

    auto* pull = app.add_subcommand("compile-pullback", "pullback of an SFT on H to G");
    pull->add_option("source", a)->required();
    pull->add_option("target", b)->required();
    pull->add_option("patterns", c)->required();
    common(pull);
    pull->callback([&] { action = [&] { return cmd_compile_pullback(opt, a, b, c); }; });

    auto* transfer = app.add_subcommand("transfer", "decide an SFT on H through G");
    transfer->add_option("source", a)->required();
    transfer->add_option("target", b)->required();
    transfer->add_option("patterns", c)->required();
    common(transfer);
    transfer->callback([&] { action = [&] { return cmd_transfer(opt, a, b, c); }; });

    auto* integ = app.add_subcommand("integrate", "integrate a derivative patch along a word");
    integ->add_option("source", a)->required();
    integ->add_option("target", b)->required();
    integ->add_option("--patch", c, "derivative patch JSON");
    integ->add_option("--from", from, "start element");
    integ->add_option("--word", word, "word to integrate along");
    common(integ);
    integ->callback([&] { action = [&] { return cmd_integrate(opt, a, b, c, from, word); }; });

    auto* wang = app.add_subcommand("wang", "convert Wang tiles to patterns on Z^2");
    wang->add_option("tiles", a)->required();
    common(wang);
    wang->callback([&] { action = [&] { return cmd_wang(opt, a); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        return action();
    } catch (const Error& e) {
        switch (e.code()) {
        case Errc::Parse:
        case Errc::InvalidArgument:
        case Errc::MixedGroups:
            std::cerr << "sftc: " << e.what() << '\n';
            return kExitUsage;
        case Errc::VerificationFailed:
            std::cerr << "sftc: " << e.what() << '\n';
            emit({{"result", {{"verdict", "error"}, {"error", std::string(to_string(e.code()))}, {"message", e.what()}}}});
            return kExitInternal;
        default:
            emit({{"result", {{"verdict", "unknown"}, {"error", std::string(to_string(e.code()))}, {"message", e.what()}}}});
            return kExitUnknown;
        }
    } catch (const std::exception& e) {
        std::cerr << "sftc: internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

} // namespace

int main(int argc, char** argv) { return run(argc, argv); }
