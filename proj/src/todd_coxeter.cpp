#include "todd_coxeter.hpp"

#include <deque>

namespace sft {

namespace {

// Hasse-Lewis-Todd enumeration with coincidence processing, after the
// formulation in Holt's handbook (scan-and-fill plus union-find on cosets).
class Enumerator {
public:
    Enumerator(const GroupSpec& spec, std::size_t budget) : spec_(spec), budget_(budget)
    {
        gens_ = spec.generators.size();
        new_coset();
    }

    bool run()
    {
        for (std::size_t c = 0; c < table_.size(); ++c) {
            if (!live(c))
                continue;
            for (const Word& r : spec_.relators) {
                if (!scan_and_fill(static_cast<int>(c), r))
                    return false;
                if (!live(c))
                    break;
            }
            if (!live(c))
                continue;
            for (std::size_t x = 0; x < gens_; ++x) {
                if (table_[c][x] < 0 && !define(static_cast<int>(c), static_cast<int>(x)))
                    return false;
            }
        }
        return true;
    }

    std::vector<std::vector<int>> compact() const
    {
        std::vector<int> renumber(table_.size(), -1);
        int next = 0;
        for (std::size_t c = 0; c < table_.size(); ++c) {
            if (live(c))
                renumber[c] = next++;
        }
        std::vector<std::vector<int>> out;
        out.reserve(static_cast<std::size_t>(next));
        for (std::size_t c = 0; c < table_.size(); ++c) {
            if (!live(c))
                continue;
            std::vector<int> row(gens_);
            for (std::size_t x = 0; x < gens_; ++x)
                row[x] = renumber[static_cast<std::size_t>(table_[c][x])];
            out.push_back(std::move(row));
        }
        return out;
    }

private:
    bool live(std::size_t c) const { return parent_[c] == static_cast<int>(c); }
    int inv(int x) const { return spec_.generators[static_cast<std::size_t>(x)].inverse; }

    int new_coset()
    {
        table_.emplace_back(gens_, -1);
        parent_.push_back(static_cast<int>(parent_.size()));
        return static_cast<int>(table_.size() - 1);
    }

    bool define(int c, int x)
    {
        if (table_.size() >= budget_)
            return false;
        const int d = new_coset();
        set(c, x, d);
        return true;
    }

    void set(int c, int x, int d)
    {
        table_[static_cast<std::size_t>(c)][static_cast<std::size_t>(x)] = d;
        table_[static_cast<std::size_t>(d)][static_cast<std::size_t>(inv(x))] = c;
    }

    int& at(int c, int x) { return table_[static_cast<std::size_t>(c)][static_cast<std::size_t>(x)]; }

    int rep(int c)
    {
        int root = c;
        while (parent_[static_cast<std::size_t>(root)] != root)
            root = parent_[static_cast<std::size_t>(root)];
        while (parent_[static_cast<std::size_t>(c)] != c) {
            const int next = parent_[static_cast<std::size_t>(c)];
            parent_[static_cast<std::size_t>(c)] = root;
            c = next;
        }
        return root;
    }

    void merge(int k, int l, std::deque<int>& queue)
    {
        k = rep(k);
        l = rep(l);
        if (k == l)
            return;
        const int lo = std::min(k, l);
        const int hi = std::max(k, l);
        parent_[static_cast<std::size_t>(hi)] = lo;
        queue.push_back(hi);
    }

    void coincidence(int a, int b)
    {
        std::deque<int> queue;
        merge(a, b, queue);
        while (!queue.empty()) {
            const int dead = queue.front();
            queue.pop_front();
            for (int x = 0; x < static_cast<int>(gens_); ++x) {
                const int d = at(dead, x);
                if (d < 0)
                    continue;
                if (at(d, inv(x)) == dead)
                    at(d, inv(x)) = -1;
                const int mu = rep(dead);
                const int nu = rep(d);
                if (at(mu, x) >= 0) {
                    merge(nu, at(mu, x), queue);
                } else if (at(nu, inv(x)) >= 0) {
                    merge(mu, at(nu, inv(x)), queue);
                } else {
                    at(mu, x) = nu;
                    at(nu, inv(x)) = mu;
                }
            }
        }
    }

    bool scan_and_fill(int alpha, const Word& w)
    {
        if (w.empty())
            return true;
        int f = alpha;
        int b = alpha;
        int i = 0;
        int j = static_cast<int>(w.size()) - 1;
        for (;;) {
            while (i <= j && at(f, w[static_cast<std::size_t>(i)]) >= 0) {
                f = at(f, w[static_cast<std::size_t>(i)]);
                ++i;
            }
            if (i > j) {
                if (f != alpha)
                    coincidence(f, alpha);
                return true;
            }
            while (j >= i && at(b, inv(w[static_cast<std::size_t>(j)])) >= 0) {
                b = at(b, inv(w[static_cast<std::size_t>(j)]));
                --j;
            }
            if (j < i) {
                coincidence(f, b);
                return true;
            }
            if (i == j) {
                set(f, w[static_cast<std::size_t>(i)], b);
                return true;
            }
            if (!define(f, w[static_cast<std::size_t>(i)]))
                return false;
        }
    }

    const GroupSpec& spec_;
    std::size_t budget_;
    std::size_t gens_ = 0;
    std::vector<std::vector<int>> table_;
    std::vector<int> parent_;
};

} // namespace

std::optional<CosetTable> CosetTable::enumerate(const GroupSpec& spec, std::size_t budget)
{
    Enumerator e(spec, budget);
    if (!e.run())
        return std::nullopt;
    CosetTable t;
    t.table_ = e.compact();

    // shortlex words by BFS in generator order
    t.words_.assign(t.table_.size(), Word{});
    std::vector<bool> seen(t.table_.size(), false);
    std::deque<std::size_t> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
        const std::size_t c = queue.front();
        queue.pop_front();
        for (std::size_t x = 0; x < spec.generators.size(); ++x) {
            const auto d = static_cast<std::size_t>(t.table_[c][x]);
            if (seen[d])
                continue;
            seen[d] = true;
            t.words_[d] = t.words_[c];
            t.words_[d].push_back(static_cast<int>(x));
            queue.push_back(d);
        }
    }
    return t;
}

std::size_t CosetTable::walk(std::size_t coset, const Word& w) const
{
    for (int x : w)
        coset = static_cast<std::size_t>(table_[coset][static_cast<std::size_t>(x)]);
    return coset;
}

} // namespace sft
