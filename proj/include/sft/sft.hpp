#pragma once

#include "sft/group.hpp"

#include <array>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sft {

inline constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();

/// One value per alphabet component. Simple alphabets have one component.
using Letter = boost::container::small_vector<std::uint32_t, 4>;

/// Finite alphabet, stored as a product of named components so that compiled
/// alphabets such as B_H(n)^S never have to be listed letter by letter.
class Alphabet {
public:
    struct Component {
        std::string name;
        std::vector<std::string> values;
    };

    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> letters);
    static Alphabet product(std::vector<Component> components);

    std::size_t component_count() const { return components_.size(); }
    const Component& component(std::size_t i) const { return components_[i]; }
    std::size_t component_size(std::size_t i) const { return components_[i].values.size(); }
    bool is_simple() const { return components_.size() == 1; }

    /// Number of letters, or nullopt if it does not fit in 64 bits.
    std::optional<std::uint64_t> size() const;

    std::string format(const Letter& a) const;
    /// Simple alphabets take a letter name; product alphabets take the
    /// component values joined by '|'.
    Letter parse(std::string_view text) const;
    Letter letter(std::uint32_t index) const { return Letter{index}; }

    friend bool operator==(const Alphabet& a, const Alphabet& b);

private:
    std::vector<Component> components_;
};

struct Pattern {
    std::vector<Element> support;
    std::vector<Letter> assign; // parallel to support
};

enum class Verdict { Violated, Satisfied, Undetermined };

/// Read access to a (possibly partial) coloring of B(r, g), addressed by the
/// index of g^-1 x in Group::ball_members(r). Missing values read as kUnset.
class Window {
public:
    virtual ~Window() = default;
    virtual std::uint32_t value(std::size_t cell, std::size_t component) const = 0;
};

struct Probe {
    Verdict verdict = Verdict::Undetermined;
    // variable the predicate needs next when undetermined
    std::size_t cell = 0;
    std::size_t component = 0;

    static Probe violated() { return {Verdict::Violated, 0, 0}; }
    static Probe satisfied() { return {Verdict::Satisfied, 0, 0}; }
    static Probe need(std::size_t cell, std::size_t component) { return {Verdict::Undetermined, cell, component}; }
};

/// Bounded-radius local rule. `evaluate` sees the window around a cell in
/// relative coordinates, so every rule is shift invariant.
///
/// Partial evaluation must be sound: Violated and Satisfied are only returned
/// when every extension of the window agrees. Undetermined must name an unset
/// variable that the verdict depends on.
class LocalPredicate {
public:
    virtual ~LocalPredicate() = default;
    virtual int radius() const = 0;
    virtual Probe evaluate(const Window& w) const = 0;
    virtual std::string name() const = 0;
};

struct PatternSet {
    Group group;
    Alphabet alphabet;
    std::vector<Pattern> patterns;
    std::shared_ptr<const LocalPredicate> predicate; // null in explicit mode
    int radius = 0;

    bool is_explicit() const { return predicate == nullptr; }

    /// Forbidden-pattern list; the radius defaults to the smallest ball
    /// containing every support.
    static PatternSet forbidden(Group g, Alphabet a, std::vector<Pattern> patterns, std::optional<int> radius = {});
    static PatternSet local(Group g, Alphabet a, std::shared_ptr<const LocalPredicate> p);
};

/// Finite partial configuration. Absent cells are simply not in the map.
struct Patch {
    Group group;
    ElementMap<Letter> cells;

    explicit Patch(Group g) : group(std::move(g)) {}
    const Letter* find(const Element& x) const;
    bool contains(const Element& x) const { return cells.count(x) != 0; }
    void set(const Element& x, Letter a) { cells[x] = std::move(a); }
    std::size_t size() const { return cells.size(); }
    /// h * patch, i.e. the patch whose value at h x is this patch's value at x.
    Patch translated(const Element& h) const;
};

/// Patch on a rank-one lattice reading `letters` left to right from coordinate `start`.
Patch patch_from_string(const Group& g, const Alphabet& a, std::string_view letters, std::int64_t start = 0);

bool occurs(const Patch& patch, const Pattern& p, const Element& g);
bool locally_admissible(const Patch& patch, const PatternSet& ps);
/// Predicate verdict at g for a fully covered window; throws SupportNotCovered otherwise.
bool predicate_holds(const Patch& patch, const PatternSet& ps, const Element& g);
/// Verdict at g on a possibly incomplete window (missing cells read as unset).
Verdict predicate_verdict(const Patch& patch, const PatternSet& ps, const Element& g);

/// Expands a local predicate into an explicit forbidden list by enumerating
/// every coloring of B(r). Throws SizeLimit above `guard` colorings.
PatternSet materialize(const PatternSet& ps, std::uint64_t guard);

struct WangTile {
    int north = 0, east = 0, south = 0, west = 0;
};

struct WangTileSet {
    std::vector<WangTile> tiles;
};

/// Horizontal patterns on {(0,0),(1,0)}, vertical ones on {(0,0),(0,1)}.
PatternSet wang_to_sft(const WangTileSet& ts, const Group& z2);

/// Configuration invariant under the period (and the extra periods, used for
/// tori in Z^2). Values outside `domain_data` are found by translating into it.
struct PeriodicConfig {
    Group group;
    Element period;
    std::vector<Element> extra_periods;
    Patch domain_data;
    // One point per orbit that must be checked; within truncation for
    // groups where the orbit space is infinite.
    std::vector<Element> representatives;
    int lookup_budget = 64;

    PeriodicConfig(Group g, Element p, Patch d) : group(g), period(std::move(p)), domain_data(std::move(d)) {}
};

std::optional<Letter> periodic_lookup(const PeriodicConfig& pc, const Element& x);
bool verify_periodic_point(const PeriodicConfig& pc, const PatternSet& ps);
/// Resolves B(r, x) for every x in `around` through periodic_lookup.
Patch resolve(const PeriodicConfig& pc, const std::vector<Element>& around, int r);

} // namespace sft
