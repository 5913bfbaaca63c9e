#pragma once

#include "sft/calculus.hpp"
#include "sft/domino.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sft {

struct QIPair {
    FunctionPatch f; // G -> H
    FunctionPatch F; // H -> G
    int n = 1;
};

struct QICheck {
    bool ok = true;
    std::string witness; // first violated condition, empty when ok
};

/// The three QI-pair conditions (both maps n-Lipschitz, F f and f F within n
/// of the identity), checked wherever the compositions are defined.
QICheck verify_qi_pair(const QIPair& p);

/// Picks F(h) among the domain of f, minimizing d(f(g), h), then |g|, then
/// the normal form. Returns the pair with n = max{2N, 3N^2+N, N, N^2+N} + 1.
/// Throws NotQuasiSurjective when some h has no preimage within N, and
/// LipschitzViolation when f is not an N-quasi-isometric embedding.
QIPair synthesize_quasi_inverse(const FunctionPatch& f, int N, const std::vector<Element>& h_region);
int quasi_inverse_constant(int N);

/// Per cell g and k in B_H(n) (ball order): g^-1 F(f(g) k).
struct LocalRecord {
    int n = 1;
    ElementMap<std::vector<Element>> cells;
};
LocalRecord local_record(const QIPair& p);

/// (h0 f, F(h0^-1 .)), which has the same derivative and local record.
QIPair retranslate(const QIPair& p, const Element& h0);

struct QIParams {
    int n = 1;
    int M = 2;
    int N = 3;
    int check_radius = 0; // n + N + nM + n^2
};
/// M = max(n, K_H) + 1, N = nM + 1.
QIParams qi_params(const Group& h, int n);

/// B_H(n)^S x B_G(n^2+n)^{B_H(n)}: derivative components, then one record
/// component per k in B_H(n).
Alphabet qipair_alphabet(const Group& g, const Group& h, int n);
PatternSet compile_qipair_sft(const Group& g, const Group& h, int n);
/// (df, l) on the cells of `region` where both are defined.
Patch encode_qipair(const QIPair& p, const std::vector<Element>& region);

/// Per cell h covered together with B(n, h): the letters of sigma on h B(n).
struct HigherBlock {
    int n = 0;
    ElementMap<std::vector<Letter>> cells;
};
HigherBlock higher_block(const Patch& sigma, int n);
Patch pullback(const FunctionPatch& f, const Patch& sigma);

/// The qipair alphabet extended by one component per k in B_H(n) carrying a
/// letter of ps_h (letters numbered as in all_letters).
Alphabet pullback_alphabet(const Group& g, const PatternSet& ps_h, int n);
PatternSet compile_pullback_sft(const Group& g, const PatternSet& ps_h, int n);
/// encode_qipair plus x[k](g) = sigma(f(g) k) on the cells where sigma covers f(g) B(n).
Patch encode_pullback(const QIPair& p, const Alphabet& a, const Patch& sigma, const std::vector<Element>& region);
/// sigma_0(h) = sigma_X(F(h))((f F(h))^-1 h), on every h the patch determines.
Patch reconstruct_pullback(const Patch& patch, const PatternSet& ps_h, int n);

using DominoSolver = std::function<DominoOutcome(const PatternSet&)>;

struct TransferOutcome {
    DominoOutcome outcome; // verdict about ps_h
    int n = 0;             // QI constant used, 0 if none was found
    std::vector<DominoVerdict> qipair_verdicts; // per n tried, starting at 1
};

/// Tries n = 1, 2, ... up to max_n: first the QI-pair subshift, then, once it
/// is nonempty, the pullback subshift, whose emptiness equals that of ps_h.
TransferOutcome domino_transfer(const Group& g, const PatternSet& ps_h, const DominoSolver& solver, int max_n = 3);

struct PeriodCheck {
    bool ok = true;
    Element h_pi;
    std::string witness;
};

/// Checks f(pi g) = f(pi) f(1)^-1 f(g) wherever defined. Throws NotPeriodic
/// when (df, l) is not pi-periodic on the domain and DomainTooSmall when the
/// domain has no g with pi g in it. With `sigma`, also checks
/// sigma(f(g) k) = sigma(h_pi f(g) k).
PeriodCheck periodic_homomorphism_check(const QIPair& p, const Element& pi, const Patch* sigma = nullptr);

} // namespace sft
