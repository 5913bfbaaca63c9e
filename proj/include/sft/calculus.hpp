#pragma once

#include "sft/sft.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace sft {

/// Finite partial map G -> H, expected to be n-Lipschitz on its domain.
struct FunctionPatch {
    Group source;
    Group target;
    ElementMap<Element> values;
    int n = 1;

    FunctionPatch(Group g, Group h, int lip) : source(std::move(g)), target(std::move(h)), n(lip) {}
    /// Throws LipschitzViolation naming the first offending edge.
    void check_lipschitz() const;
};

/// Partial coloring of G by maps S -> B_H(n); entry s of a cell may be absent.
struct DerivativePatch {
    Group source;
    Group target;
    int n = 1;
    ElementMap<std::vector<std::optional<Element>>> cells; // indexed by generator

    DerivativePatch(Group g, Group h, int lip) : source(std::move(g)), target(std::move(h)), n(lip) {}
    const Element* at(const Element& g, int s) const;
    void set(const Element& g, int s, Element v);
};

DerivativePatch derivative(const FunctionPatch& f);

/// Product over the path g, g s0, g s0 s1, ... of the recorded steps.
Element integrate(const DerivativePatch& sigma, const Element& g, const Word& w);

/// B_H(n)^S, one component per generator of G, values listed in ball order.
Alphabet derivative_alphabet(const Group& g, const Group& h, int n);

/// Pairs (w1, w2) of words of length <= K_G with equal value in G; each word
/// is paired with the first word of its class.
std::vector<std::pair<Word, Word>> equal_word_pairs(const Group& g);
/// max(2, longest relator).
int relator_bound(const Group& g);

/// The derivative subshift: integrals along equal words agree at every cell.
PatternSet compile_derivative_sft(const Group& g, const Group& h, int n);
/// Its rule alone. Reads components 0 .. |S|-1 and cells of B(K_G), so it can
/// run on any wider window whose first components are the derivative.
std::shared_ptr<const LocalPredicate> derivative_predicate(const Group& g, const Group& h, int n);

/// Cells whose every generator entry is present, as letters of derivative_alphabet.
Patch to_patch(const DerivativePatch& sigma);
DerivativePatch from_patch(const Patch& p, const Group& h, int n);

/// f(1) = 1_H and f(x) = integral along a geodesic to x; cross-checked along a
/// second path and around every relator loop and backtrack inside the region.
FunctionPatch integrate_to_function(const DerivativePatch& sigma, const std::vector<Element>& region);

} // namespace sft
