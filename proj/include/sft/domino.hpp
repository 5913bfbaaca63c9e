#pragma once

#include "sft/sft.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sft {

enum class DominoVerdict { Empty, Nonempty, Unknown };

struct DominoOutcome {
    DominoVerdict verdict = DominoVerdict::Unknown;
    int radius = -1; // for Empty: no admissible coloring of B(radius) exists
    std::optional<PeriodicConfig> periodic;
    std::optional<Patch> patch; // whole-group colorings of finite groups
    std::string method;         // which search produced the verdict
    std::uint64_t nodes = 0;
    int rounds = 0;
};

struct Certificate {
    bool empty = false;
    int radius = 0;
    std::optional<Patch> witness;
    std::uint64_t nodes = 0;
};

/// Exhaustive search over colorings of B(r). Throws SizeLimit when the node
/// budget runs out before the search space does.
Certificate emptiness_certificate(const PatternSet& ps, int r, std::uint64_t node_budget = 1'000'000);

struct DominoBudget {
    std::uint64_t nodes = 2'000'000;
    int rounds = 24;
};

/// Interleaves emptiness certificates on growing balls with periodic-witness
/// searches suited to the group. Never throws on budget trouble; the verdict
/// is Unknown instead.
DominoOutcome decide_domino(const PatternSet& ps, const DominoBudget& budget = {});

struct ZOracleResult {
    bool nonempty = false;
    std::vector<Letter> word; // shortest cycle, repeated gives a periodic point
};

/// Transition-graph decision for explicit pattern sets on Z with the
/// standard generator.
ZOracleResult z_transition_oracle(const PatternSet& ps);

std::vector<Letter> all_letters(const Alphabet& a);

std::string_view to_string(DominoVerdict v);

} // namespace sft
