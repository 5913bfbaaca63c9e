#pragma once

#include "sft/sft.hpp"

#include <set>
#include <utility>
#include <vector>

namespace sft {

struct EndsEstimate {
    int inner_radius = 0;
    int outer_radius = 0;
    /// Components of B(R) \ B(n) that meet the sphere of radius R.
    int component_count = 0;
    /// Count at R equals count at R - 1.
    bool truncation_stable = false;
    /// Count for n + 1 (same truncation); larger than component_count for
    /// groups with infinitely many ends.
    int next_count = 0;
    /// truncation_stable and next_count == component_count.
    bool stable = false;
    std::vector<std::vector<Element>> components; // BFS order, all components
    std::vector<bool> unbounded;                  // parallel to components
};

EndsEstimate estimate_ends(const Group& g, int n, int R);

struct BallRef {
    Element center;
    int radius = 0;
};

/// True when B0 and B2 lie in different components of the Cayley graph with
/// B1 removed. Connectivity is computed inside the R-neighbourhood of the
/// geodesics c0 -> c1 -> c2, which is exact for tree-like Cayley graphs and Z.
bool separates(const Group& g, const BallRef& b0, const BallRef& b1, const BallRef& b2, int R);

struct AxialElement {
    Element g;
    int n = 0;
    std::pair<Element, Element> provenance; // x, y with x^-1 y axial
    Element from_provenance;                // x^-1 y itself
    int checked_range = 3;
};

/// Checks that g^b B(n) separates g^a B(n) from g^c B(n) for -c <= a < b < c' <= c.
bool is_axial(const Group& g, const Element& x, int n, int range, int R);

/// The x^-1 y construction, followed by a search for the shortest
/// verified-axial element no longer than x^-1 y.
AxialElement find_axial(const Group& g, int n, int R);

/// Smallest p >= 1 with |g^{pk}| > 4n for 0 < |k| <= range.
int disjoint_power(const Group& g, const Element& x, int n, int range = 3);

/// Union of B(R, x) over the points x of the geodesics joining consecutive centers.
std::vector<Element> tube(const Group& g, const std::vector<Element>& centers, int R);

struct FundamentalDomain {
    Element g;
    int m1 = 0, m2 = 0, n = 0, truncation = 0;
    Element period; // g^{m2 - m1}
    std::vector<Element> members;
    ElementSet member_set;
    struct Piece {
        std::vector<Element> members;
        std::set<int> touches; // indices k of the blocks B_k it is adjacent to
    };
    std::vector<Piece> pieces;
};

FundamentalDomain fundamental_domain(const Group& g, const Element& x, int m1, int m2, int n, int R);

/// Colors the tube from 1 to x^d (plus margins) with the ball B(2n) at 1
/// tied to its translate at x^d, so a solution repeats along x^d.
std::optional<Patch> tied_seed(const PatternSet& ps, const Element& x, int d, int n, std::uint64_t budget,
    std::uint64_t* nodes = nullptr);

struct PeriodicPoint {
    PeriodicConfig config;
    FundamentalDomain domain;
    Element step; // power of the axial element actually used
};

PeriodicPoint construct_periodic_point(const PatternSet& ps, const Patch& seed, const AxialElement& ax);

} // namespace sft
