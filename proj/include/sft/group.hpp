#pragma once

#include "sft/error.hpp"

#include <boost/container/small_vector.hpp>
#include <boost/container_hash/hash.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace sft {

/// A word over the generating set, as indices into `GroupSpec::generators`.
using Word = std::vector<int>;

enum class Family { FreeAbelian, Free, FiniteCyclic, FreeProduct, Generic };

std::string_view to_string(Family f);

struct Generator {
    std::string name;
    int inverse = 0; // index of the formal inverse; may be the generator itself
};

/// Finitely generated group with a symmetric generating set.
///
/// The family determines how normal forms are computed. For the built-in
/// families the relators are filled in by the factory functions; for
/// `Generic` they are user data and the word problem is only semi-decided
/// within `wp_budget`.
struct GroupSpec {
    Family family = Family::Free;
    std::vector<Generator> generators;
    std::vector<Word> relators;
    int max_relator_len = 2; // K, never below 2
    std::size_t wp_budget = 100000;

    // FreeAbelian: image of each generator in Z^d.
    std::vector<std::vector<std::int64_t>> vectors;
    // FiniteCyclic modulus.
    int modulus = 0;
    // FreeProduct: order of each cyclic factor, 0 for infinite; and for each
    // generator the factor it belongs to and its exponent (+1 or -1).
    std::vector<int> factor_orders;
    std::vector<int> gen_factor;
    std::vector<int> gen_exponent;

    std::size_t ball_cap = 200000;
};

using Code = boost::container::small_vector<std::int32_t, 6>;

/// Group element in canonical form. Elements borrow the spec of the `Group`
/// that produced them; that group must outlive them.
struct Element {
    const GroupSpec* spec = nullptr;
    Code code;

    friend bool operator==(const Element& a, const Element& b)
    {
        return a.spec == b.spec && a.code == b.code;
    }
    friend bool operator!=(const Element& a, const Element& b) { return !(a == b); }
    friend bool operator<(const Element& a, const Element& b) { return a.code < b.code; }
};

struct ElementHash {
    std::size_t operator()(const Element& e) const noexcept
    {
        return boost::hash_range(e.code.begin(), e.code.end());
    }
};

template <class T>
using ElementMap = std::unordered_map<Element, T, ElementHash>;
using ElementSet = std::unordered_set<Element, ElementHash>;

enum class WordProblemAnswer { Equal, NotEqual, Unknown };

struct Ball {
    Element center;
    int radius = 0;
    std::vector<Element> members; // BFS order from the center
    std::vector<std::pair<std::size_t, std::size_t>> edges; // (i, j) with members[j] = members[i]*s
};

class CosetTable;

/// Shared handle to a group. Copies are cheap and refer to the same spec and
/// caches; all operations are const and thread-compatible.
class Group {
public:
    explicit Group(GroupSpec spec);

    static Group free_abelian(int rank);
    /// Z^d with generators mapped to the given vectors; relators must present
    /// the group and are validated.
    static Group lattice(std::vector<std::vector<std::int64_t>> vectors, std::vector<std::string> names,
        std::vector<Word> relators);
    /// Z generated by {+-s : s in steps}, with relators computed for one or two steps.
    static Group integers_with_steps(const std::vector<std::int64_t>& steps);
    static Group free(int rank);
    static Group cyclic(int modulus);
    static Group free_product(std::vector<int> orders);
    static Group presentation(std::vector<std::string> generator_names, const std::vector<std::string>& relators,
        std::size_t wp_budget);

    const GroupSpec& spec() const { return *spec_; }
    std::size_t generator_count() const { return spec_->generators.size(); }
    int inverse_generator(int s) const { return spec_->generators[static_cast<std::size_t>(s)].inverse; }
    int max_relator_len() const { return spec_->max_relator_len; }

    Element identity() const;
    Element normal_form(const Word& w) const;
    Element generator(int s) const;
    Element multiply(const Element& a, const Element& b) const;
    Element multiply_generator(const Element& a, int s) const;
    Element invert(const Element& a) const;
    Element power(const Element& a, std::int64_t k) const;
    bool is_identity(const Element& a) const { return a == identity(); }

    /// Word-metric length of `a`. Exact for the built-in families.
    int norm(const Element& a) const;
    std::optional<int> distance(const Element& g, const Element& h, int budget) const;
    int distance(const Element& g, const Element& h) const { return norm(multiply(invert(g), h)); }

    /// Shortlex-least geodesic word representing `g`.
    Word geodesic_word(const Element& g) const;
    /// Same length as `geodesic_word`, but generators are tried in reverse
    /// order; gives a second, generally different, geodesic.
    Word reverse_geodesic_word(const Element& g) const;

    WordProblemAnswer word_problem(const Word& w1, const Word& w2) const;

    /// Members of B(n, 1) in BFS order (deterministic).
    const std::vector<Element>& ball_members(int n) const;
    std::size_t ball_size(int n) const { return ball_members(n).size(); }
    Ball ball(int n, const Element& center) const;
    /// Index of `x` in `ball_members(n)`, or nullopt when |x| > n.
    std::optional<std::size_t> ball_index(const Element& x, int n) const;

    Word parse_word(std::string_view text) const;
    std::string format_word(const Word& w) const;
    std::string format(const Element& e) const { return format_word(geodesic_word(e)); }
    Element parse(std::string_view text) const { return normal_form(parse_word(text)); }
    Word inverse_word(const Word& w) const;

    /// True for groups whose elements are integers (code holds one coordinate).
    bool is_rank_one_lattice() const;
    bool is_rank_two_lattice() const;
    bool is_finite() const;
    /// Free groups and free products, whose Cayley graphs are tree-like.
    bool is_tree_like() const;
    /// Lattice coordinates of an abelian element.
    std::vector<std::int64_t> coordinates(const Element& e) const;
    Element from_coordinates(const std::vector<std::int64_t>& c) const;

    friend bool operator==(const Group& a, const Group& b) { return a.spec_ == b.spec_; }
    friend bool operator!=(const Group& a, const Group& b) { return !(a == b); }

private:
    struct Cache;

    void check_same(const Element& a) const;
    Element generic_element(std::size_t coset) const;
    int norm_by_search(const Element& a) const;

    std::shared_ptr<GroupSpec> spec_;
    std::shared_ptr<Cache> cache_;
};

} // namespace sft
