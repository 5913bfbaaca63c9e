#include "sft/group.hpp"

#include "todd_coxeter.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

namespace sft {

std::string_view to_string(Errc code)
{
    switch (code) {
    case Errc::BudgetExhausted: return "BudgetExhausted";
    case Errc::MixedGroups: return "MixedGroups";
    case Errc::SizeLimit: return "SizeLimit";
    case Errc::SupportNotCovered: return "SupportNotCovered";
    case Errc::InconsistentPeriod: return "InconsistentPeriod";
    case Errc::CoverageGap: return "CoverageGap";
    case Errc::NotMultiEnded: return "NotMultiEnded";
    case Errc::TruncationTooSmall: return "TruncationTooSmall";
    case Errc::DisjointnessFailure: return "DisjointnessFailure";
    case Errc::NeedLargerPatch: return "NeedLargerPatch";
    case Errc::VerificationFailed: return "VerificationFailed";
    case Errc::LipschitzViolation: return "LipschitzViolation";
    case Errc::PathDependent: return "PathDependent";
    case Errc::WordProblemUnknown: return "WordProblemUnknown";
    case Errc::NotQuasiSurjective: return "NotQuasiSurjective";
    case Errc::NotPeriodic: return "NotPeriodic";
    case Errc::DomainTooSmall: return "DomainTooSmall";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Parse: return "Parse";
    }
    return "Unknown";
}

std::string_view to_string(Family f)
{
    switch (f) {
    case Family::FreeAbelian: return "FreeAbelian";
    case Family::Free: return "Free";
    case Family::FiniteCyclic: return "FiniteCyclic";
    case Family::FreeProduct: return "FreeProduct";
    case Family::Generic: return "GenericPresentation";
    }
    return "?";
}

struct Group::Cache {
    std::mutex mu;
    // balls_[r] holds B(r, 1) in BFS order; each is a prefix of the next
    std::vector<std::unique_ptr<const std::vector<Element>>> balls;
    ElementMap<std::uint32_t> position;

    bool cosets_tried = false;
    std::optional<CosetTable> cosets;
};

namespace {

std::string letter_name(int i, bool upper)
{
    char c = static_cast<char>('a' + i);
    if (upper)
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return std::string(1, c);
}

void add_pair(GroupSpec& spec, const std::string& lower, const std::string& upper)
{
    const int i = static_cast<int>(spec.generators.size());
    spec.generators.push_back({lower, i + 1});
    spec.generators.push_back({upper, i});
}

std::int64_t floor_mod(std::int64_t a, std::int64_t m)
{
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

int word_max(const std::vector<Word>& relators)
{
    int k = 2;
    for (const auto& r : relators)
        k = std::max(k, static_cast<int>(r.size()));
    return k;
}

bool is_standard_lattice(const GroupSpec& s)
{
    if (s.family != Family::FreeAbelian || s.vectors.empty())
        return false;
    const std::size_t d = s.vectors[0].size();
    if (s.generators.size() != 2 * d)
        return false;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const std::int64_t want = (i == j) ? 1 : 0;
            if (s.vectors[2 * i][j] != want || s.vectors[2 * i + 1][j] != -want)
                return false;
        }
    }
    return true;
}

// canonical exponent of a syllable in a factor of the given order
std::int32_t canonical_exponent(std::int64_t e, int order)
{
    if (order == 0)
        return static_cast<std::int32_t>(e);
    return static_cast<std::int32_t>(floor_mod(e, order));
}

void push_syllable(Code& code, std::int32_t factor, std::int64_t exponent, const std::vector<int>& orders)
{
    const int order = orders[static_cast<std::size_t>(factor)];
    if (!code.empty() && code[code.size() - 2] == factor) {
        const std::int32_t e = canonical_exponent(code.back() + exponent, order);
        if (e == 0) {
            code.pop_back();
            code.pop_back();
        } else {
            code.back() = e;
        }
        return;
    }
    const std::int32_t e = canonical_exponent(exponent, order);
    if (e != 0) {
        code.push_back(factor);
        code.push_back(e);
    }
}

} // namespace

Group::Group(GroupSpec spec) : spec_(std::make_shared<GroupSpec>(std::move(spec))), cache_(std::make_shared<Cache>())
{
    auto& s = *spec_;
    const auto n = static_cast<int>(s.generators.size());
    if (n == 0)
        throw Error(Errc::InvalidArgument, "group needs at least one generator");
    for (int i = 0; i < n; ++i) {
        const int inv = s.generators[static_cast<std::size_t>(i)].inverse;
        if (inv < 0 || inv >= n || s.generators[static_cast<std::size_t>(inv)].inverse != i)
            throw Error(Errc::InvalidArgument, "generating set is not symmetric at " + s.generators[static_cast<std::size_t>(i)].name);
    }
    for (const auto& r : s.relators) {
        for (int x : r) {
            if (x < 0 || x >= n)
                throw Error(Errc::InvalidArgument, "relator uses an unknown generator");
        }
    }
    s.max_relator_len = std::max(s.max_relator_len, word_max(s.relators));
    if (s.family == Family::FreeAbelian) {
        if (s.vectors.size() != s.generators.size())
            throw Error(Errc::InvalidArgument, "lattice needs one vector per generator");
        for (int i = 0; i < n; ++i) {
            const auto& v = s.vectors[static_cast<std::size_t>(i)];
            const auto& w = s.vectors[static_cast<std::size_t>(s.generators[static_cast<std::size_t>(i)].inverse)];
            if (v.size() != s.vectors[0].size())
                throw Error(Errc::InvalidArgument, "lattice vectors differ in dimension");
            for (std::size_t j = 0; j < v.size(); ++j) {
                if (v[j] != -w[j])
                    throw Error(Errc::InvalidArgument, "inverse generator vectors must be negatives");
            }
        }
        for (const auto& r : s.relators) {
            if (!is_identity(normal_form(r)))
                throw Error(Errc::InvalidArgument, "relator does not vanish in the lattice");
        }
    }
}

Group Group::free_abelian(int rank)
{
    if (rank < 1)
        throw Error(Errc::InvalidArgument, "rank must be positive");
    GroupSpec s;
    s.family = Family::FreeAbelian;
    for (int i = 0; i < rank; ++i) {
        add_pair(s, letter_name(i, false), letter_name(i, true));
        std::vector<std::int64_t> e(static_cast<std::size_t>(rank), 0);
        e[static_cast<std::size_t>(i)] = 1;
        s.vectors.push_back(e);
        e[static_cast<std::size_t>(i)] = -1;
        s.vectors.push_back(e);
    }
    for (int i = 0; i < rank; ++i) {
        for (int j = i + 1; j < rank; ++j)
            s.relators.push_back({2 * i, 2 * j, 2 * i + 1, 2 * j + 1});
    }
    return Group(std::move(s));
}

Group Group::lattice(std::vector<std::vector<std::int64_t>> vectors, std::vector<std::string> names, std::vector<Word> relators)
{
    if (vectors.size() != names.size())
        throw Error(Errc::InvalidArgument, "one name per lattice generator");
    GroupSpec s;
    s.family = Family::FreeAbelian;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        std::string upper = names[i];
        std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        if (upper == names[i])
            upper = names[i] + "'";
        add_pair(s, names[i], upper);
        s.vectors.push_back(vectors[i]);
        auto neg = vectors[i];
        for (auto& x : neg)
            x = -x;
        s.vectors.push_back(neg);
    }
    s.relators = std::move(relators);
    return Group(std::move(s));
}

Group Group::integers_with_steps(const std::vector<std::int64_t>& steps)
{
    if (steps.size() == 1) {
        if (steps[0] != 1 && steps[0] != -1)
            throw Error(Errc::InvalidArgument, "a single step must be +-1 to generate Z");
        return lattice({{steps[0]}}, {"a"}, {});
    }
    if (steps.size() != 2)
        throw Error(Errc::InvalidArgument, "integers_with_steps supports one or two steps");
    const std::int64_t p = steps[0];
    const std::int64_t q = steps[1];
    if (p <= 0 || q <= 0 || std::gcd(p, q) != 1)
        throw Error(Errc::InvalidArgument, "steps must be positive and coprime");
    // <x, y | [x, y], x^q y^-p> is Z^2 / <(q, -p)>, which is Z when gcd = 1
    Word comm{0, 2, 1, 3};
    Word bezout;
    for (std::int64_t i = 0; i < q; ++i)
        bezout.push_back(0);
    for (std::int64_t i = 0; i < p; ++i)
        bezout.push_back(3);
    return lattice({{p}, {q}}, {"x", "y"}, {comm, bezout});
}

Group Group::free(int rank)
{
    if (rank < 1)
        throw Error(Errc::InvalidArgument, "rank must be positive");
    GroupSpec s;
    s.family = Family::Free;
    for (int i = 0; i < rank; ++i)
        add_pair(s, letter_name(i, false), letter_name(i, true));
    return Group(std::move(s));
}

Group Group::cyclic(int modulus)
{
    if (modulus < 1)
        throw Error(Errc::InvalidArgument, "modulus must be positive");
    GroupSpec s;
    s.family = Family::FiniteCyclic;
    s.modulus = modulus;
    if (modulus <= 2) {
        s.generators.push_back({"a", 0});
        s.relators.push_back(Word(static_cast<std::size_t>(modulus), 0));
    } else {
        add_pair(s, "a", "A");
        s.relators.push_back(Word(static_cast<std::size_t>(modulus), 0));
    }
    return Group(std::move(s));
}

Group Group::free_product(std::vector<int> orders)
{
    if (orders.empty())
        throw Error(Errc::InvalidArgument, "free product needs a factor");
    GroupSpec s;
    s.family = Family::FreeProduct;
    s.factor_orders = orders;
    for (std::size_t f = 0; f < orders.size(); ++f) {
        const int m = orders[f];
        if (m < 0 || m == 1)
            throw Error(Errc::InvalidArgument, "factor orders must be 0 (infinite) or >= 2");
        const int first = static_cast<int>(s.generators.size());
        if (m == 2) {
            s.generators.push_back({letter_name(static_cast<int>(f), false), first});
            s.gen_factor.push_back(static_cast<int>(f));
            s.gen_exponent.push_back(1);
        } else {
            add_pair(s, letter_name(static_cast<int>(f), false), letter_name(static_cast<int>(f), true));
            s.gen_factor.insert(s.gen_factor.end(), {static_cast<int>(f), static_cast<int>(f)});
            s.gen_exponent.insert(s.gen_exponent.end(), {1, -1});
        }
        if (m != 0)
            s.relators.push_back(Word(static_cast<std::size_t>(m), first));
    }
    return Group(std::move(s));
}

Group Group::presentation(std::vector<std::string> generator_names, const std::vector<std::string>& relators, std::size_t wp_budget)
{
    GroupSpec s;
    s.family = Family::Generic;
    s.wp_budget = wp_budget;
    for (auto& name : generator_names) {
        std::string upper = name;
        std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        if (upper == name)
            upper = name + "'";
        add_pair(s, name, upper);
    }
    Group probe(s);
    for (const auto& r : relators)
        s.relators.push_back(probe.parse_word(r));
    return Group(std::move(s));
}

void Group::check_same(const Element& a) const
{
    if (a.spec != spec_.get())
        throw Error(Errc::MixedGroups, "element belongs to a different group");
}

Element Group::identity() const
{
    Element e{spec_.get(), {}};
    switch (spec_->family) {
    case Family::FreeAbelian: e.code.assign(spec_->vectors[0].size(), 0); break;
    case Family::FiniteCyclic: e.code.assign(1, 0); break;
    case Family::Generic: e.code.assign(1, 0); break;
    default: break;
    }
    return e;
}

Element Group::generic_element(std::size_t coset) const
{
    return Element{spec_.get(), Code{static_cast<std::int32_t>(coset)}};
}

Element Group::normal_form(const Word& w) const
{
    const auto& s = *spec_;
    for (int x : w) {
        if (x < 0 || x >= static_cast<int>(s.generators.size()))
            throw Error(Errc::InvalidArgument, "letter outside the generating set");
    }
    Element e = identity();
    switch (s.family) {
    case Family::FreeAbelian:
        for (int x : w) {
            const auto& v = s.vectors[static_cast<std::size_t>(x)];
            for (std::size_t j = 0; j < v.size(); ++j)
                e.code[j] = static_cast<std::int32_t>(e.code[j] + v[j]);
        }
        return e;
    case Family::Free:
        for (int x : w) {
            if (!e.code.empty() && e.code.back() == s.generators[static_cast<std::size_t>(x)].inverse)
                e.code.pop_back();
            else
                e.code.push_back(x);
        }
        return e;
    case Family::FiniteCyclic: {
        std::int64_t sum = 0;
        for (int x : w)
            sum += (s.modulus <= 2 || x == 0) ? 1 : -1;
        e.code[0] = static_cast<std::int32_t>(floor_mod(sum, s.modulus));
        return e;
    }
    case Family::FreeProduct:
        for (int x : w)
            push_syllable(e.code, s.gen_factor[static_cast<std::size_t>(x)], s.gen_exponent[static_cast<std::size_t>(x)], s.factor_orders);
        return e;
    case Family::Generic: {
        std::lock_guard lock(cache_->mu);
        if (!cache_->cosets_tried) {
            cache_->cosets = CosetTable::enumerate(s, s.wp_budget);
            cache_->cosets_tried = true;
        }
        if (!cache_->cosets)
            throw Error(Errc::BudgetExhausted, "coset enumeration exceeded wp_budget");
        e.code[0] = static_cast<std::int32_t>(cache_->cosets->walk(0, w));
        return e;
    }
    }
    return e;
}

Element Group::generator(int s) const { return normal_form(Word{s}); }

Element Group::multiply(const Element& a, const Element& b) const
{
    check_same(a);
    check_same(b);
    const auto& s = *spec_;
    Element r = a;
    switch (s.family) {
    case Family::FreeAbelian:
        for (std::size_t j = 0; j < r.code.size(); ++j)
            r.code[j] += b.code[j];
        return r;
    case Family::Free:
        for (auto x : b.code) {
            if (!r.code.empty() && r.code.back() == s.generators[static_cast<std::size_t>(x)].inverse)
                r.code.pop_back();
            else
                r.code.push_back(x);
        }
        return r;
    case Family::FiniteCyclic:
        r.code[0] = static_cast<std::int32_t>(floor_mod(std::int64_t{a.code[0]} + b.code[0], s.modulus));
        return r;
    case Family::FreeProduct:
        for (std::size_t i = 0; i < b.code.size(); i += 2)
            push_syllable(r.code, b.code[i], b.code[i + 1], s.factor_orders);
        return r;
    case Family::Generic: {
        std::lock_guard lock(cache_->mu);
        const auto& t = *cache_->cosets;
        r.code[0] = static_cast<std::int32_t>(t.walk(static_cast<std::size_t>(a.code[0]), t.word(static_cast<std::size_t>(b.code[0]))));
        return r;
    }
    }
    return r;
}

Element Group::multiply_generator(const Element& a, int x) const
{
    check_same(a);
    const auto& s = *spec_;
    Element r = a;
    switch (s.family) {
    case Family::FreeAbelian: {
        const auto& v = s.vectors[static_cast<std::size_t>(x)];
        for (std::size_t j = 0; j < v.size(); ++j)
            r.code[j] = static_cast<std::int32_t>(r.code[j] + v[j]);
        return r;
    }
    case Family::Free:
        if (!r.code.empty() && r.code.back() == s.generators[static_cast<std::size_t>(x)].inverse)
            r.code.pop_back();
        else
            r.code.push_back(x);
        return r;
    case Family::FreeProduct:
        push_syllable(r.code, s.gen_factor[static_cast<std::size_t>(x)], s.gen_exponent[static_cast<std::size_t>(x)], s.factor_orders);
        return r;
    default:
        return multiply(a, generator(x));
    }
}

Element Group::invert(const Element& a) const
{
    check_same(a);
    const auto& s = *spec_;
    Element r{spec_.get(), {}};
    switch (s.family) {
    case Family::FreeAbelian:
        r.code = a.code;
        for (auto& c : r.code)
            c = -c;
        return r;
    case Family::Free:
        for (auto it = a.code.rbegin(); it != a.code.rend(); ++it)
            r.code.push_back(s.generators[static_cast<std::size_t>(*it)].inverse);
        return r;
    case Family::FiniteCyclic:
        r.code.assign(1, static_cast<std::int32_t>(floor_mod(-std::int64_t{a.code[0]}, s.modulus)));
        return r;
    case Family::FreeProduct:
        for (std::size_t i = a.code.size(); i >= 2; i -= 2)
            push_syllable(r.code, a.code[i - 2], -std::int64_t{a.code[i - 1]}, s.factor_orders);
        return r;
    case Family::Generic: {
        std::lock_guard lock(cache_->mu);
        const auto& t = *cache_->cosets;
        r.code.assign(1, static_cast<std::int32_t>(t.walk(0, inverse_word(t.word(static_cast<std::size_t>(a.code[0]))))));
        return r;
    }
    }
    return r;
}

Element Group::power(const Element& a, std::int64_t k) const
{
    Element base = k < 0 ? invert(a) : a;
    std::uint64_t e = static_cast<std::uint64_t>(k < 0 ? -k : k);
    Element acc = identity();
    while (e != 0) {
        if (e & 1U)
            acc = multiply(acc, base);
        e >>= 1U;
        if (e != 0)
            base = multiply(base, base);
    }
    return acc;
}

int Group::norm(const Element& a) const
{
    check_same(a);
    const auto& s = *spec_;
    switch (s.family) {
    case Family::FreeAbelian:
        if (is_standard_lattice(s)) {
            int total = 0;
            for (auto c : a.code)
                total += c < 0 ? -c : c;
            return total;
        }
        return norm_by_search(a);
    case Family::Free:
        return static_cast<int>(a.code.size());
    case Family::FiniteCyclic:
        if (s.modulus <= 2)
            return a.code[0];
        return std::min(a.code[0], s.modulus - a.code[0]);
    case Family::FreeProduct: {
        int total = 0;
        for (std::size_t i = 0; i < a.code.size(); i += 2) {
            const int m = s.factor_orders[static_cast<std::size_t>(a.code[i])];
            const int e = a.code[i + 1];
            if (m == 0)
                total += e < 0 ? -e : e;
            else if (m == 2)
                total += 1;
            else
                total += std::min(e, m - e);
        }
        return total;
    }
    case Family::Generic: {
        std::lock_guard lock(cache_->mu);
        return cache_->cosets->length(static_cast<std::size_t>(a.code[0]));
    }
    }
    return 0;
}

int Group::norm_by_search(const Element& a) const
{
    for (int r = 0;; ++r) {
        const auto& b = ball_members(r);
        {
            std::lock_guard lock(cache_->mu);
            auto it = cache_->position.find(a);
            if (it != cache_->position.end() && it->second < b.size())
                return r;
        }
    }
}

std::optional<int> Group::distance(const Element& g, const Element& h, int budget) const
{
    const Element d = multiply(invert(g), h);
    if (spec_->family == Family::FreeAbelian && !is_standard_lattice(*spec_)) {
        auto idx = ball_index(d, budget);
        if (!idx)
            return std::nullopt;
    }
    const int n = norm(d);
    if (n > budget)
        return std::nullopt;
    return n;
}

namespace {

Word greedy_geodesic(const Group& g, const Element& target, bool reversed)
{
    Word w;
    Element rest = target;
    int remaining = g.norm(rest);
    const int gens = static_cast<int>(g.generator_count());
    while (remaining > 0) {
        bool moved = false;
        for (int i = 0; i < gens && !moved; ++i) {
            const int x = reversed ? gens - 1 - i : i;
            Element next = g.multiply(g.generator(g.inverse_generator(x)), rest);
            if (g.norm(next) == remaining - 1) {
                w.push_back(x);
                rest = std::move(next);
                --remaining;
                moved = true;
            }
        }
        if (!moved)
            throw Error(Errc::InvalidArgument, "norm is not a word metric");
    }
    return w;
}

} // namespace

Word Group::geodesic_word(const Element& g) const
{
    check_same(g);
    if (spec_->family == Family::Generic) {
        std::lock_guard lock(cache_->mu);
        return cache_->cosets->word(static_cast<std::size_t>(g.code[0]));
    }
    return greedy_geodesic(*this, g, false);
}

Word Group::reverse_geodesic_word(const Element& g) const
{
    check_same(g);
    return greedy_geodesic(*this, g, true);
}

Word Group::inverse_word(const Word& w) const
{
    Word r;
    r.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it)
        r.push_back(inverse_generator(*it));
    return r;
}

namespace {

// Bounded search for a derivation of w = 1 using relator insertions and free
// reduction. Success is a proof of equality; failure proves nothing.
bool rewrite_to_identity(const GroupSpec& s, const Word& w, std::size_t budget)
{
    auto reduce = [&](Word v) {
        Word out;
        for (int x : v) {
            if (!out.empty() && out.back() == s.generators[static_cast<std::size_t>(x)].inverse)
                out.pop_back();
            else
                out.push_back(x);
        }
        return out;
    };
    std::vector<Word> inserts;
    for (const auto& r : s.relators) {
        Word inv;
        for (auto it = r.rbegin(); it != r.rend(); ++it)
            inv.push_back(s.generators[static_cast<std::size_t>(*it)].inverse);
        for (const Word* base : std::initializer_list<const Word*>{&r, &inv}) {
            for (std::size_t k = 0; k < base->size(); ++k) {
                Word rot(base->begin() + static_cast<std::ptrdiff_t>(k), base->end());
                rot.insert(rot.end(), base->begin(), base->begin() + static_cast<std::ptrdiff_t>(k));
                inserts.push_back(rot);
            }
        }
    }
    const Word start = reduce(w);
    if (start.empty())
        return true;
    const std::size_t max_len = start.size() + static_cast<std::size_t>(s.max_relator_len);
    std::set<Word> seen{start};
    std::deque<Word> queue{start};
    while (!queue.empty() && seen.size() < budget) {
        Word cur = queue.front();
        queue.pop_front();
        for (std::size_t pos = 0; pos <= cur.size(); ++pos) {
            for (const auto& ins : inserts) {
                Word next(cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(pos));
                next.insert(next.end(), ins.begin(), ins.end());
                next.insert(next.end(), cur.begin() + static_cast<std::ptrdiff_t>(pos), cur.end());
                next = reduce(std::move(next));
                if (next.empty())
                    return true;
                if (next.size() > max_len || seen.count(next))
                    continue;
                seen.insert(next);
                queue.push_back(std::move(next));
                if (seen.size() >= budget)
                    return false;
            }
        }
    }
    return false;
}

} // namespace

WordProblemAnswer Group::word_problem(const Word& w1, const Word& w2) const
{
    if (spec_->family != Family::Generic)
        return normal_form(w1) == normal_form(w2) ? WordProblemAnswer::Equal : WordProblemAnswer::NotEqual;
    try {
        return normal_form(w1) == normal_form(w2) ? WordProblemAnswer::Equal : WordProblemAnswer::NotEqual;
    } catch (const Error& e) {
        if (e.code() != Errc::BudgetExhausted)
            throw;
    }
    Word w = w1;
    const Word inv = inverse_word(w2);
    w.insert(w.end(), inv.begin(), inv.end());
    return rewrite_to_identity(*spec_, w, spec_->wp_budget) ? WordProblemAnswer::Equal : WordProblemAnswer::Unknown;
}

const std::vector<Element>& Group::ball_members(int n) const
{
    if (n < 0)
        throw Error(Errc::InvalidArgument, "negative radius");
    std::lock_guard lock(cache_->mu);
    auto& c = *cache_;
    if (c.balls.empty()) {
        Element one = identity();
        c.position.emplace(one, 0);
        c.balls.push_back(std::make_unique<const std::vector<Element>>(std::vector<Element>{one}));
    }
    while (static_cast<int>(c.balls.size()) <= n) {
        const auto& prev = *c.balls.back();
        const std::size_t prev_prev = c.balls.size() >= 2 ? c.balls[c.balls.size() - 2]->size() : 0;
        std::vector<Element> next = prev;
        for (std::size_t i = prev_prev; i < prev.size(); ++i) {
            for (int x = 0; x < static_cast<int>(spec_->generators.size()); ++x) {
                Element y;
                if (spec_->family == Family::Generic) {
                    const auto& t = *c.cosets;
                    y = Element{spec_.get(), Code{t.act(static_cast<std::size_t>(prev[i].code[0]), x)}};
                } else {
                    y = multiply_generator(prev[i], x);
                }
                if (c.position.count(y))
                    continue;
                if (next.size() >= spec_->ball_cap)
                    throw Error(Errc::SizeLimit, "ball exceeds " + std::to_string(spec_->ball_cap) + " elements");
                c.position.emplace(y, static_cast<std::uint32_t>(next.size()));
                next.push_back(std::move(y));
            }
        }
        c.balls.push_back(std::make_unique<const std::vector<Element>>(std::move(next)));
    }
    return *c.balls[static_cast<std::size_t>(n)];
}

std::optional<std::size_t> Group::ball_index(const Element& x, int n) const
{
    const auto& b = ball_members(n);
    std::lock_guard lock(cache_->mu);
    auto it = cache_->position.find(x);
    if (it == cache_->position.end() || it->second >= b.size())
        return std::nullopt;
    return it->second;
}

Ball Group::ball(int n, const Element& center) const
{
    check_same(center);
    if (spec_->family == Family::Generic)
        normal_form({}); // make sure the coset table exists
    const auto& base = ball_members(n);
    Ball b;
    b.center = center;
    b.radius = n;
    b.members.reserve(base.size());
    ElementMap<std::size_t> index;
    for (const auto& x : base) {
        index.emplace(multiply(center, x), b.members.size());
        b.members.push_back(multiply(center, x));
    }
    for (std::size_t i = 0; i < b.members.size(); ++i) {
        for (int s = 0; s < static_cast<int>(generator_count()); ++s) {
            auto it = index.find(multiply_generator(b.members[i], s));
            if (it != index.end())
                b.edges.emplace_back(i, it->second);
        }
    }
    return b;
}

Word Group::parse_word(std::string_view text) const
{
    Word w;
    const auto& gens = spec_->generators;
    auto lookup = [&](std::string_view tok) -> int {
        for (std::size_t i = 0; i < gens.size(); ++i) {
            if (gens[i].name == tok)
                return static_cast<int>(i);
        }
        return -1;
    };
    const bool spaced = text.find_first_of(" \t") != std::string_view::npos;
    if (text.empty() || text == "1")
        return w;
    if (spaced) {
        std::istringstream in{std::string(text)};
        std::string tok;
        while (in >> tok) {
            bool inverse = false;
            if (tok.size() > 3 && tok.substr(tok.size() - 3) == "^-1") {
                inverse = true;
                tok.resize(tok.size() - 3);
            }
            const int x = lookup(tok);
            if (x < 0)
                throw Error(Errc::Parse, "unknown generator '" + tok + "'");
            w.push_back(inverse ? inverse_generator(x) : x);
        }
        return w;
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
        int best = -1;
        std::size_t best_len = 0;
        for (std::size_t i = 0; i < gens.size(); ++i) {
            const auto& name = gens[i].name;
            if (name.size() > best_len && text.substr(pos, name.size()) == name) {
                best = static_cast<int>(i);
                best_len = name.size();
            }
        }
        if (best < 0)
            throw Error(Errc::Parse, "cannot parse word '" + std::string(text) + "' at offset " + std::to_string(pos));
        w.push_back(best);
        pos += best_len;
    }
    return w;
}

std::string Group::format_word(const Word& w) const
{
    bool single = true;
    for (const auto& g : spec_->generators)
        single = single && g.name.size() == 1;
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!single && i > 0)
            out += ' ';
        out += spec_->generators[static_cast<std::size_t>(w[i])].name;
    }
    return out;
}

bool Group::is_rank_one_lattice() const
{
    return spec_->family == Family::FreeAbelian && spec_->vectors[0].size() == 1;
}

bool Group::is_rank_two_lattice() const
{
    return spec_->family == Family::FreeAbelian && spec_->vectors[0].size() == 2;
}

bool Group::is_finite() const
{
    switch (spec_->family) {
    case Family::FiniteCyclic: return true;
    case Family::FreeProduct: return spec_->factor_orders.size() == 1 && spec_->factor_orders[0] != 0;
    case Family::Generic:
        try {
            normal_form({});
            return true;
        } catch (const Error&) {
            return false;
        }
    default: return false;
    }
}

bool Group::is_tree_like() const
{
    return spec_->family == Family::Free || spec_->family == Family::FreeProduct;
}

std::vector<std::int64_t> Group::coordinates(const Element& e) const
{
    check_same(e);
    if (spec_->family != Family::FreeAbelian)
        throw Error(Errc::InvalidArgument, "coordinates are only defined for lattices");
    return {e.code.begin(), e.code.end()};
}

Element Group::from_coordinates(const std::vector<std::int64_t>& c) const
{
    if (spec_->family != Family::FreeAbelian || c.size() != spec_->vectors[0].size())
        throw Error(Errc::InvalidArgument, "coordinate dimension mismatch");
    Element e{spec_.get(), {}};
    for (auto x : c)
        e.code.push_back(static_cast<std::int32_t>(x));
    return e;
}

} // namespace sft
