#include "sft/qi.hpp"

#include "element_table.hpp"

#include <algorithm>
#include <mutex>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace sft {

namespace {

std::size_t letter_index(const std::vector<Letter>& letters, const Letter& a)
{
    auto it = std::find(letters.begin(), letters.end(), a);
    if (it == letters.end())
        throw Error(Errc::InvalidArgument, "letter outside the alphabet");
    return static_cast<std::size_t>(it - letters.begin());
}

} // namespace

QICheck verify_qi_pair(const QIPair& p)
{
    const Group& G = p.f.source;
    const Group& H = p.f.target;
    QICheck out;
    auto fail = [&](std::string why) {
        out.ok = false;
        out.witness = std::move(why);
        return out;
    };
    for (const auto& [x, v] : p.f.values) {
        for (std::size_t s = 0; s < G.generator_count(); ++s) {
            auto it = p.f.values.find(G.multiply_generator(x, static_cast<int>(s)));
            if (it != p.f.values.end() && H.distance(v, it->second) > p.n)
                return fail("f is not " + std::to_string(p.n) + "-Lipschitz at " + G.format(x));
        }
    }
    for (const auto& [y, v] : p.F.values) {
        for (std::size_t t = 0; t < H.generator_count(); ++t) {
            auto it = p.F.values.find(H.multiply_generator(y, static_cast<int>(t)));
            if (it != p.F.values.end() && G.distance(v, it->second) > p.n)
                return fail("F is not " + std::to_string(p.n) + "-Lipschitz at " + H.format(y));
        }
    }
    for (const auto& [x, v] : p.f.values) {
        auto it = p.F.values.find(v);
        if (it != p.F.values.end() && G.distance(it->second, x) > p.n)
            return fail("F f moves " + G.format(x) + " to " + G.format(it->second));
    }
    for (const auto& [y, v] : p.F.values) {
        auto it = p.f.values.find(v);
        if (it != p.f.values.end() && H.distance(it->second, y) > p.n)
            return fail("f F moves " + H.format(y) + " to " + H.format(it->second));
    }
    return out;
}

int quasi_inverse_constant(int N) { return std::max({2 * N, 3 * N * N + N, N, N * N + N}) + 1; }

QIPair synthesize_quasi_inverse(const FunctionPatch& f, int N, const std::vector<Element>& h_region)
{
    const Group& G = f.source;
    const Group& H = f.target;
    std::vector<std::pair<Element, Element>> graph(f.values.begin(), f.values.end());
    for (std::size_t i = 0; i < graph.size(); ++i) {
        for (std::size_t j = i + 1; j < graph.size(); ++j) {
            const int dg = G.distance(graph[i].first, graph[j].first);
            const int dh = H.distance(graph[i].second, graph[j].second);
            if (dh > N * dg + N || dg > N * (dh + N))
                throw Error(Errc::LipschitzViolation, "f is not an " + std::to_string(N) + "-quasi-isometric embedding at " +
                        G.format(graph[i].first) + ", " + G.format(graph[j].first));
        }
    }
    const int n = quasi_inverse_constant(N);
    QIPair out{FunctionPatch(G, H, n), FunctionPatch(H, G, n), n};
    out.f.values = f.values;
    for (const auto& h : h_region) {
        std::optional<std::tuple<int, int, Code>> best_key;
        const Element* best = nullptr;
        for (const auto& [x, v] : graph) {
            const int d = H.distance(v, h);
            if (d > N)
                continue;
            auto key = std::make_tuple(d, G.norm(x), x.code);
            if (!best_key || key < *best_key) {
                best_key = std::move(key);
                best = &x;
            }
        }
        if (!best)
            throw Error(Errc::NotQuasiSurjective, "no point of the domain maps within " + std::to_string(N) + " of " +
                    H.format(h));
        out.F.values.emplace(h, *best);
    }
    return out;
}

LocalRecord local_record(const QIPair& p)
{
    const Group& G = p.f.source;
    const Group& H = p.f.target;
    const auto& ks = H.ball_members(p.n);
    LocalRecord rec;
    rec.n = p.n;
    for (const auto& [x, v] : p.f.values) {
        std::vector<Element> row;
        for (const auto& k : ks) {
            auto it = p.F.values.find(H.multiply(v, k));
            if (it == p.F.values.end())
                break;
            Element rel = G.multiply(G.invert(x), it->second);
            if (G.norm(rel) > p.n * p.n + p.n)
                throw Error(Errc::VerificationFailed, "local record at " + G.format(x) + " leaves B(n^2+n)");
            row.push_back(std::move(rel));
        }
        if (row.size() == ks.size())
            rec.cells.emplace(x, std::move(row));
    }
    return rec;
}

QIPair retranslate(const QIPair& p, const Element& h0)
{
    const Group& H = p.f.target;
    QIPair out{FunctionPatch(p.f.source, H, p.n), FunctionPatch(H, p.f.source, p.n), p.n};
    for (const auto& [x, v] : p.f.values)
        out.f.values.emplace(x, H.multiply(h0, v));
    for (const auto& [y, v] : p.F.values)
        out.F.values.emplace(H.multiply(h0, y), v);
    return out;
}

QIParams qi_params(const Group& h, int n)
{
    QIParams q;
    q.n = n;
    q.M = std::max(n, relator_bound(h)) + 1;
    q.N = n * q.M + 1;
    q.check_radius = n + q.N + n * q.M + n * n;
    return q;
}

Alphabet qipair_alphabet(const Group& g, const Group& h, int n)
{
    std::vector<Alphabet::Component> comps;
    const Alphabet d = derivative_alphabet(g, h, n);
    for (std::size_t i = 0; i < d.component_count(); ++i)
        comps.push_back(d.component(i));
    std::vector<std::string> records;
    for (const auto& x : g.ball_members(n * n + n))
        records.push_back(g.format(x));
    for (const auto& k : h.ball_members(n))
        comps.push_back({"l[" + h.format(k) + "]", records});
    return Alphabet::product(std::move(comps));
}

Alphabet pullback_alphabet(const Group& g, const PatternSet& ps_h, int n)
{
    const Alphabet base = qipair_alphabet(g, ps_h.group, n);
    std::vector<Alphabet::Component> comps;
    for (std::size_t i = 0; i < base.component_count(); ++i)
        comps.push_back(base.component(i));
    std::vector<std::string> letters;
    for (const auto& a : all_letters(ps_h.alphabet))
        letters.push_back(ps_h.alphabet.format(a));
    for (const auto& k : ps_h.group.ball_members(n))
        comps.push_back({"x[" + ps_h.group.format(k) + "]", letters});
    return Alphabet::product(std::move(comps));
}

Patch encode_qipair(const QIPair& p, const std::vector<Element>& region)
{
    const Group& G = p.f.source;
    const Group& H = p.f.target;
    const LocalRecord rec = local_record(p);
    Patch out(G);
    for (const auto& x : region) {
        auto fx = p.f.values.find(x);
        auto lx = rec.cells.find(x);
        if (fx == p.f.values.end() || lx == rec.cells.end())
            continue;
        Letter a;
        bool ok = true;
        for (std::size_t s = 0; s < G.generator_count() && ok; ++s) {
            auto it = p.f.values.find(G.multiply_generator(x, static_cast<int>(s)));
            ok = it != p.f.values.end();
            if (ok)
                a.push_back(static_cast<std::uint32_t>(
                    H.ball_index(H.multiply(H.invert(fx->second), it->second), p.n).value()));
        }
        if (!ok)
            continue;
        for (const auto& rel : lx->second)
            a.push_back(static_cast<std::uint32_t>(G.ball_index(rel, p.n * p.n + p.n).value()));
        out.set(x, a);
    }
    return out;
}

HigherBlock higher_block(const Patch& sigma, int n)
{
    const Group& H = sigma.group;
    HigherBlock out;
    out.n = n;
    const auto& ks = H.ball_members(n);
    for (const auto& [h, a] : sigma.cells) {
        std::vector<Letter> row;
        for (const auto& k : ks) {
            const Letter* b = sigma.find(H.multiply(h, k));
            if (!b)
                break;
            row.push_back(*b);
        }
        if (row.size() == ks.size())
            out.cells.emplace(h, std::move(row));
    }
    return out;
}

Patch pullback(const FunctionPatch& f, const Patch& sigma)
{
    Patch out(f.source);
    for (const auto& [x, v] : f.values) {
        const Letter* a = sigma.find(v);
        if (!a)
            throw Error(Errc::SupportNotCovered, "sigma has no value at f(" + f.source.format(x) + ")");
        out.set(x, *a);
    }
    return out;
}

Patch encode_pullback(const QIPair& p, const Alphabet& a, const Patch& sigma, const std::vector<Element>& region)
{
    const Group& H = p.f.target;
    const auto letters = all_letters(a);
    const auto& ks = H.ball_members(p.n);
    Patch base = encode_qipair(p, region);
    Patch out(p.f.source);
    for (const auto& [x, b] : base.cells) {
        Letter c = b;
        const Element& fx = p.f.values.at(x);
        for (const auto& k : ks) {
            const Letter* s = sigma.find(H.multiply(fx, k));
            if (!s)
                break;
            c.push_back(static_cast<std::uint32_t>(letter_index(letters, *s)));
        }
        if (c.size() == b.size() + ks.size())
            out.set(x, std::move(c));
    }
    return out;
}

namespace {

// The QI-pair rule, and with a pattern set on H also the pullback rules, in
// coordinates relative to the window center. Cells are indices into the
// window ball; points of H are interned ids, with ids below |B_H(M)| being
// the ball members in ball order.
class QIRule : public LocalPredicate {
public:
    QIRule(const Group& g, const Group& h, int n, const PatternSet* ps_h)
        : G_(g), n_(n), q_(qi_params(h, n)), deriv_(derivative_predicate(g, h, n))
    {
        nS_ = G_.generator_count();
        const auto& hM = h.ball_members(q_.M);
        hn_size_ = h.ball_size(n);
        hM_size_ = hM.size();
        lball_size_ = G_.ball_size(n * n + n);
        codomain_ = n + q_.N + n * q_.M;
        radius_ = std::max(q_.check_radius, relator_bound(g));

        std::vector<Element> right(hM.begin(), hM.end());
        if (ps_h) {
            pullback_ = true;
            consistency_ = 2 * n * n + 2 * n;
            radius_ = std::max(radius_, consistency_);
            const auto letters = all_letters(ps_h->alphabet);
            for (const auto& pat : ps_h->patterns) {
                Forbidden fb;
                int diam = 0;
                const Element first_inv = h.invert(pat.support[0]);
                for (std::size_t i = 0; i < pat.support.size(); ++i) {
                    fb.letters.push_back(static_cast<std::uint32_t>(letter_index(letters, pat.assign[i])));
                    fb.offsets.push_back(right.size());
                    right.push_back(h.multiply(first_inv, pat.support[i]));
                    for (std::size_t j = 0; j < pat.support.size(); ++j)
                        diam = std::max(diam, h.distance(pat.support[i], pat.support[j]));
                }
                transfer_ = std::max(transfer_, n * (diam + 2 * n) + 2 * n);
                forbidden_.push_back(std::move(fb));
            }
            radius_ = std::max(radius_, transfer_);
        }
        table_.emplace(h, std::move(right));
        for (const auto& m : hM)
            table_->id(m);
        for (std::size_t t = 0; t < h.generator_count(); ++t)
            gen_right_.push_back(*h.ball_index(h.normal_form({static_cast<int>(t)}), q_.M));

        const auto& ball = G_.ball_members(radius_);
        const std::size_t cells = ball.size();
        ElementMap<std::uint32_t> index;
        for (std::size_t i = 0; i < cells; ++i)
            index.emplace(ball[i], static_cast<std::uint32_t>(i));
        auto find = [&](const Element& x) {
            auto it = index.find(x);
            return it == index.end() ? ElementTable::kNone : it->second;
        };
        parent_.assign(cells, 0);
        gen_.assign(cells, 0);
        std::vector<bool> done(cells, false);
        done[0] = true;
        for (std::size_t i = 0; i < cells; ++i) {
            for (std::size_t s = 0; s < nS_; ++s) {
                const std::uint32_t j = find(G_.multiply_generator(ball[i], static_cast<int>(s)));
                if (j == ElementTable::kNone || done[j])
                    continue;
                done[j] = true;
                parent_[j] = i;
                gen_[j] = s;
            }
        }
        size_N_ = G_.ball_size(q_.N);
        size_check_ = G_.ball_size(q_.check_radius);
        size_codomain_ = G_.ball_size(codomain_);
        size_cons_ = pullback_ ? G_.ball_size(consistency_) : 0;
        size_transfer_ = pullback_ ? G_.ball_size(transfer_) : 0;

        auto neighbours = [&](std::size_t count, int r, std::size_t limit) {
            std::vector<std::vector<std::uint32_t>> out(count);
            const auto& b = G_.ball_members(r);
            for (std::size_t x = 0; x < count; ++x) {
                for (const auto& e : b) {
                    const std::uint32_t y = find(G_.multiply(ball[x], e));
                    if (y < limit)
                        out[x].push_back(y);
                }
                std::sort(out[x].begin(), out[x].end());
            }
            return out;
        };
        near_n_ = neighbours(size_codomain_, n, cells);
        near_2n_ = neighbours(size_N_, 2 * n, size_N_);

        const auto& lball = G_.ball_members(n * n + n);
        record_.assign(size_check_ * lball_size_, ElementTable::kNone);
        for (std::size_t x = 0; x < size_check_; ++x) {
            for (std::size_t v = 0; v < lball_size_; ++v) {
                const std::uint32_t y = find(G_.multiply(ball[x], lball[v]));
                if (y < size_codomain_)
                    record_[x * lball_size_ + v] = y;
            }
        }
    }

    int radius() const override { return radius_; }
    std::string name() const override { return pullback_ ? "pullback" : "qi-pair"; }

    Probe evaluate(const Window& w) const override
    {
        struct Slot {
            bool set = false;
            std::size_t cell = 0, comp = 0;
            void note(std::size_t c, std::size_t k)
            {
                if (!set)
                    *this = {true, c, k};
            }
        };
        Slot need_x, need_other;
        constexpr std::uint32_t none = ElementTable::kNone;

        const Probe dp = deriv_->evaluate(w);
        if (dp.verdict == Verdict::Violated)
            return Probe::violated();

        std::lock_guard lock(mutex_);
        ElementTable& H = *table_;

        // f relative to the center along the BFS tree of the window
        const std::size_t cells = parent_.size();
        f_.assign(cells, none);
        fneed_.resize(cells);
        f_[0] = 0;
        for (std::size_t i = 1; i < cells; ++i) {
            const std::size_t p = parent_[i];
            if (f_[p] == none) {
                fneed_[i] = fneed_[p];
                continue;
            }
            const std::uint32_t v = w.value(p, gen_[i]);
            if (v == kUnset) {
                fneed_[i] = {p, gen_[i]};
                continue;
            }
            f_[i] = H.mul(f_[p], v);
        }
        auto note_f = [&](Slot& slot, std::size_t i) { slot.note(fneed_[i].first, fneed_[i].second); };
        const std::size_t loff = nS_;
        const std::size_t xoff = nS_ + hn_size_;

        if (pullback_) {
            // letters recorded for the same point of H agree
            for (std::size_t x = 0; x < size_cons_; ++x) {
                if (f_[x] == none) {
                    note_f(need_other, x);
                    continue;
                }
                for (std::size_t k2 = 0; k2 < hn_size_; ++k2) {
                    const std::uint32_t k1 = H.mul(f_[x], k2);
                    if (k1 >= hn_size_)
                        continue;
                    const std::uint32_t a = w.value(0, xoff + k1);
                    const std::uint32_t b = w.value(x, xoff + k2);
                    if (a == kUnset)
                        need_x.note(0, xoff + k1);
                    else if (b == kUnset)
                        need_x.note(x, xoff + k2);
                    else if (a != b)
                        return Probe::violated();
                }
            }
            // no forbidden pattern of H shows up among the recorded letters,
            // wherever it is placed among the points the window records
            reps_.clear();
            for (std::size_t x = 0; x < size_transfer_; ++x) {
                if (f_[x] == none) {
                    note_f(need_other, x);
                    continue;
                }
                for (std::size_t k = 0; k < hn_size_; ++k)
                    reps_[H.mul(f_[x], k)].emplace_back(x, k);
            }
            for (const auto& [origin, unused] : reps_) {
                for (const auto& fb : forbidden_) {
                    bool all_matched = true;
                    for (std::size_t i = 0; i < fb.offsets.size() && all_matched; ++i) {
                        auto it = reps_.find(H.mul(origin, fb.offsets[i]));
                        bool matched = false;
                        if (it != reps_.end()) {
                            for (const auto& [x, k] : it->second) {
                                const std::uint32_t v = w.value(x, xoff + k);
                                if (v == kUnset)
                                    need_x.note(x, xoff + k);
                                else if (v == fb.letters[i])
                                    matched = true;
                            }
                        }
                        all_matched = matched;
                    }
                    if (all_matched)
                        return Probe::violated();
                }
            }
        }

        // points of B(N) that share an f value lie within 2n of each other
        fibers_.clear();
        bool complete = true;
        for (std::size_t x = 0; x < size_N_; ++x) {
            if (f_[x] == none) {
                complete = false;
                note_f(need_other, x);
                continue;
            }
            auto& fiber = fibers_[f_[x]];
            for (std::uint32_t y : fiber) {
                if (!std::binary_search(near_2n_[x].begin(), near_2n_[x].end(), y))
                    return Probe::violated();
            }
            fiber.push_back(static_cast<std::uint32_t>(x));
        }
        dom_.clear();
        for (const auto& [v, xs] : fibers_) {
            for (std::size_t m = 0; m < hM_size_; ++m)
                dom_.insert(H.mul(v, m));
        }

        // values of the local inverse forced by the records
        L_.clear();
        for (std::size_t x = 0; x < size_check_; ++x) {
            if (f_[x] == none) {
                complete = false;
                note_f(need_other, x);
                continue;
            }
            for (std::size_t k = 0; k < hn_size_; ++k) {
                const std::uint32_t h = H.mul(f_[x], k);
                if (!dom_.count(h))
                    continue;
                const std::uint32_t v = w.value(x, loff + k);
                if (v == kUnset) {
                    complete = false;
                    need_other.note(x, loff + k);
                    continue;
                }
                const std::uint32_t y = record_[x * lball_size_ + v];
                if (y == none)
                    return Probe::violated();
                auto [it, fresh] = L_.emplace(h, y);
                if (!fresh && it->second != y)
                    return Probe::violated();
            }
        }
        for (const auto& [h, y] : L_) {
            const auto& near = near_n_[y];
            for (std::size_t t : gen_right_) {
                auto it = L_.find(H.mul(h, t));
                if (it != L_.end() && !std::binary_search(near.begin(), near.end(), it->second))
                    return Probe::violated();
            }
            if (f_[y] == none) {
                note_f(need_other, y);
                continue;
            }
            bool close = false;
            for (std::size_t k = 0; k < hn_size_ && !close; ++k)
                close = H.mul(h, k) == f_[y];
            if (!close)
                return Probe::violated();
        }
        for (const auto& [v, xs] : fibers_) {
            auto it = L_.find(v);
            if (it == L_.end())
                continue;
            const auto& near = near_n_[it->second];
            for (std::uint32_t x : xs) {
                if (!std::binary_search(near.begin(), near.end(), x))
                    return Probe::violated();
            }
        }
        if (complete) {
            for (std::uint32_t h : dom_) {
                if (!L_.count(h))
                    return Probe::violated();
            }
        }

        if (need_x.set)
            return Probe::need(need_x.cell, need_x.comp);
        if (dp.verdict == Verdict::Undetermined)
            return dp;
        if (need_other.set)
            return Probe::need(need_other.cell, need_other.comp);
        return Probe::satisfied();
    }

private:
    struct Forbidden {
        std::vector<std::uint32_t> letters;
        std::vector<std::size_t> offsets; // right factors h_1^-1 h_i
    };

    Group G_;
    int n_;
    QIParams q_;
    std::shared_ptr<const LocalPredicate> deriv_;
    mutable std::optional<ElementTable> table_;
    mutable std::mutex mutex_;
    std::size_t nS_ = 0, hn_size_ = 0, hM_size_ = 0, lball_size_ = 0;
    std::vector<std::size_t> gen_right_;
    std::vector<std::size_t> parent_, gen_;
    std::vector<std::vector<std::uint32_t>> near_n_, near_2n_;
    std::vector<std::uint32_t> record_; // cell x, record v -> cell of x * v, if within the codomain
    int codomain_ = 0, radius_ = 0, consistency_ = 0, transfer_ = 0;
    bool pullback_ = false;
    std::vector<Forbidden> forbidden_;
    std::size_t size_N_ = 0, size_check_ = 0, size_codomain_ = 0, size_cons_ = 0, size_transfer_ = 0;

    mutable std::vector<std::uint32_t> f_;
    mutable std::vector<std::pair<std::size_t, std::size_t>> fneed_;
    mutable std::unordered_map<std::uint32_t, std::vector<std::pair<std::uint32_t, std::uint32_t>>> reps_;
    mutable std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> fibers_;
    mutable std::unordered_set<std::uint32_t> dom_;
    mutable std::unordered_map<std::uint32_t, std::uint32_t> L_;
};

} // namespace

PatternSet compile_qipair_sft(const Group& g, const Group& h, int n)
{
    return PatternSet::local(g, qipair_alphabet(g, h, n), std::make_shared<QIRule>(g, h, n, nullptr));
}

PatternSet compile_pullback_sft(const Group& g, const PatternSet& ps_h, int n)
{
    if (!ps_h.is_explicit())
        throw Error(Errc::InvalidArgument, "pullback needs an explicit forbidden-pattern list");
    return PatternSet::local(g, pullback_alphabet(g, ps_h, n), std::make_shared<QIRule>(g, ps_h.group, n, &ps_h));
}

Patch reconstruct_pullback(const Patch& patch, const PatternSet& ps_h, int n)
{
    const Group& G = patch.group;
    const Group& H = ps_h.group;
    const std::size_t nS = G.generator_count();
    const auto& ks = H.ball_members(n);
    const auto& lball = G.ball_members(n * n + n);
    const auto letters = all_letters(ps_h.alphabet);
    const std::size_t xoff = nS + ks.size();

    DerivativePatch d(G, H, n);
    std::vector<Element> region;
    for (const auto& [x, a] : patch.cells) {
        if (a.size() != xoff + ks.size())
            throw Error(Errc::InvalidArgument, "letter at " + G.format(x) + " is not a pullback letter");
        for (std::size_t s = 0; s < nS; ++s)
            d.set(x, static_cast<int>(s), ks.at(a[s]));
        region.push_back(x);
    }
    const FunctionPatch f = integrate_to_function(d, region);

    Patch out(H);
    for (const auto& [x, a] : patch.cells) {
        const Element& fx = f.values.at(x);
        for (std::size_t k = 0; k < ks.size(); ++k) {
            const Element h = H.multiply(fx, ks[k]);
            const Element gstar = G.multiply(x, lball.at(a[nS + k]));
            const Letter* b = patch.find(gstar);
            if (!b)
                continue;
            const auto kstar = H.ball_index(H.multiply(H.invert(f.values.at(gstar)), h), n);
            if (!kstar)
                throw Error(Errc::VerificationFailed, "f F moves " + H.format(h) + " further than " + std::to_string(n));
            const Letter& value = letters.at((*b)[xoff + *kstar]);
            if (const Letter* old = out.find(h); old && !(*old == value))
                throw Error(Errc::VerificationFailed, "two records disagree at " + H.format(h));
            out.set(h, value);
        }
    }
    return out;
}

TransferOutcome domino_transfer(const Group& g, const PatternSet& ps_h, const DominoSolver& solver, int max_n)
{
    TransferOutcome out;
    out.outcome.verdict = DominoVerdict::Unknown;
    out.outcome.method = "transfer";
    for (int n = 1; n <= max_n; ++n) {
        const DominoOutcome qp = solver(compile_qipair_sft(g, ps_h.group, n));
        out.qipair_verdicts.push_back(qp.verdict);
        if (qp.verdict != DominoVerdict::Nonempty)
            continue;
        out.n = n;
        out.outcome = solver(compile_pullback_sft(g, ps_h, n));
        return out;
    }
    return out;
}

PeriodCheck periodic_homomorphism_check(const QIPair& p, const Element& pi, const Patch* sigma)
{
    const Group& G = p.f.source;
    const Group& H = p.f.target;
    const auto& f = p.f.values;
    auto fpi = f.find(pi);
    auto f1 = f.find(G.identity());
    if (fpi == f.end() || f1 == f.end())
        throw Error(Errc::DomainTooSmall, "f must be defined at 1 and at the period");

    const LocalRecord rec = local_record(p);
    auto step = [&](const Element& x, std::size_t s) -> std::optional<Element> {
        auto a = f.find(x);
        auto b = f.find(G.multiply_generator(x, static_cast<int>(s)));
        if (a == f.end() || b == f.end())
            return std::nullopt;
        return H.multiply(H.invert(a->second), b->second);
    };
    bool compared = false;
    for (const auto& [x, v] : f) {
        const Element y = G.multiply(pi, x);
        if (!f.count(y))
            continue;
        compared = true;
        for (std::size_t s = 0; s < G.generator_count(); ++s) {
            auto a = step(x, s);
            auto b = step(y, s);
            if (a && b && !(*a == *b))
                throw Error(Errc::NotPeriodic, "derivative differs at " + G.format(x) + " and " + G.format(y));
        }
        auto ra = rec.cells.find(x);
        auto rb = rec.cells.find(y);
        if (ra != rec.cells.end() && rb != rec.cells.end() && ra->second != rb->second)
            throw Error(Errc::NotPeriodic, "local record differs at " + G.format(x) + " and " + G.format(y));
    }
    if (!compared)
        throw Error(Errc::DomainTooSmall, "no g with pi g in the domain");

    PeriodCheck out;
    out.h_pi = H.multiply(fpi->second, H.invert(f1->second));
    for (const auto& [x, v] : f) {
        auto it = f.find(G.multiply(pi, x));
        if (it == f.end())
            continue;
        const Element expect = H.multiply(out.h_pi, v);
        if (!(it->second == expect)) {
            out.ok = false;
            out.witness = "f(pi " + G.format(x) + ") = " + H.format(it->second) + ", expected " + H.format(expect);
            return out;
        }
    }
    if (sigma) {
        const auto& ks = H.ball_members(p.n);
        for (const auto& [x, v] : f) {
            for (const auto& k : ks) {
                const Element h = H.multiply(v, k);
                const Letter* a = sigma->find(h);
                const Letter* b = sigma->find(H.multiply(out.h_pi, h));
                if (a && b && !(*a == *b)) {
                    out.ok = false;
                    out.witness = "sigma differs at " + H.format(h) + " and its translate by " + H.format(out.h_pi);
                    return out;
                }
            }
        }
    }
    return out;
}

} // namespace sft
