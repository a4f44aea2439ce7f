#include "tabhash/search.hpp"

#include "tabhash/independence.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace tabhash {

namespace {

// C(n, k), saturating at uint64 max.
std::uint64_t binom_sat(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 acc = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        acc = acc * (n - k + i) / i;
        if (acc > std::numeric_limits<std::uint64_t>::max())
            return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(acc);
}

std::uint64_t universe_size(const DerivationSpec& spec, std::int64_t n) {
    unsigned __int128 total = 1;
    for (int i = 0; i < spec.q; ++i) {
        total *= static_cast<std::uint64_t>(n);
        // Keys, cells, and last-touch arrays are materialized up front;
        // refuse universes too large to hold rather than thrashing.
        if (total > (std::uint64_t(1) << 22))
            throw BudgetExceeded("search: universe n^q too large to enumerate");
    }
    return static_cast<std::uint64_t>(total);
}

void check_budget(std::uint64_t N, int k, std::uint64_t budget) {
    const std::uint64_t leaves = binom_sat(N, static_cast<std::uint64_t>(k));
    if (leaves > budget) {
        std::ostringstream msg;
        msg << "search: C(" << N << ", " << k << ") = " << leaves
            << " exceeds the budget of " << budget << " subsets";
        throw BudgetExceeded(msg.str());
    }
}

Key key_at(std::int64_t n, int q, std::uint64_t pos) {
    Key key;
    key.chars.resize(q);
    for (int i = q - 1; i >= 0; --i) {
        key.chars[i] = static_cast<Char>(pos % n);
        pos /= n;
    }
    return key;
}

// Universe keys materialized in a chosen order, with per-key cell ids over
// the global (table, value) cell set and per-cell metadata.
struct Ground {
    int q = 0, d = 0;
    std::vector<Key> keys;                 // keys[pos]
    std::vector<std::size_t> cells;        // keys.size() * d cell ids
    std::vector<int> cell_table;           // cell id -> table index
    std::vector<std::uint64_t> last_touch; // cell id -> max pos touching it
    std::size_t ncells = 0;
};

Ground build_ground(const DerivationSpec& spec, std::int64_t n,
                    bool slope_major_desc) {
    const std::uint64_t N = universe_size(spec, n);
    Ground g;
    g.q = spec.q;
    g.d = spec.d;
    g.keys.reserve(N);
    for (std::uint64_t p = 0; p < N; ++p) g.keys.push_back(key_at(n, spec.q, p));
    if (slope_major_desc) {
        // q = 2 curves: descending (slope, intercept); the first chosen key
        // of any subset is then a maximum-slope key, which the slope prune
        // needs as its anchor.
        std::sort(g.keys.begin(), g.keys.end(),
                  [](const Key& a, const Key& b) {
                      if (a.chars[1] != b.chars[1])
                          return a.chars[1] > b.chars[1];
                      return a.chars[0] > b.chars[0];
                  });
    }
    std::map<ColLabel, std::size_t> ids;
    std::vector<Char> buf(spec.d);
    g.cells.resize(N * spec.d);
    for (std::uint64_t p = 0; p < N; ++p) {
        derive_into(spec, g.keys[p], buf);
        for (int i = 0; i < spec.d; ++i) {
            auto [it, fresh] =
                ids.emplace(ColLabel{i, buf[i]}, ids.size());
            g.cells[p * spec.d + i] = it->second;
            if (fresh) g.cell_table.push_back(i);
        }
    }
    g.ncells = ids.size();
    g.last_touch.assign(g.ncells, 0);
    for (std::uint64_t p = 0; p < N; ++p)
        for (int i = 0; i < spec.d; ++i)
            g.last_touch[g.cells[p * spec.d + i]] = p;
    return g;
}

std::optional<std::vector<Key>> witness_keys(const Ground& g,
                                             const std::vector<std::uint64_t>&
                                                 chosen) {
    std::vector<Key> w;
    w.reserve(chosen.size());
    for (std::uint64_t p : chosen) w.push_back(g.keys[p]);
    std::sort(w.begin(), w.end());
    return w;
}

// ---- serial reference: plain subset enumeration, no pruning ----

struct SerialDfs {
    const Ground& g;
    int k;
    std::vector<std::uint8_t> parity;
    int odd_total = 0;
    std::vector<std::uint64_t> chosen;
    std::uint64_t nodes = 0;
    std::optional<std::vector<Key>> found;

    explicit SerialDfs(const Ground& gr, int kk)
        : g(gr), k(kk), parity(gr.ncells, 0) {}

    void toggle(std::uint64_t pos) {
        for (int i = 0; i < g.d; ++i) {
            const std::size_t c = g.cells[pos * g.d + i];
            parity[c] ^= 1;
            odd_total += parity[c] ? 1 : -1;
        }
    }

    void run(std::uint64_t next_min) {
        if (found) return;
        if (static_cast<int>(chosen.size()) == k) {
            if (odd_total == 0) found = witness_keys(g, chosen);
            return;
        }
        const std::uint64_t remaining =
            static_cast<std::uint64_t>(k) - chosen.size();
        if (g.keys.size() < remaining ||
            next_min > g.keys.size() - remaining)
            return;
        for (std::uint64_t p = next_min;
             p + remaining <= g.keys.size() && !found; ++p) {
            ++nodes;
            chosen.push_back(p);
            toggle(p);
            run(p + 1);
            toggle(p);
            chosen.pop_back();
        }
    }
};

// ---- pruned kernel ----

struct PrunedDfs {
    const Ground& g;
    int k;
    bool slope_prune;            // q = 2 curve, slope-major-desc ordering
    std::vector<std::uint8_t> parity;
    std::vector<int> odd_by_table;
    int odd_total = 0;
    std::vector<std::uint64_t> chosen;
    std::vector<int> above, equal; // vs anchor line, per column
    std::uint64_t nodes = 0;
    std::optional<std::vector<Key>> found;
    const std::atomic<std::uint64_t>* stop_before; // abort if anchor >= this

    PrunedDfs(const Ground& gr, int kk, bool slope,
              const std::atomic<std::uint64_t>* stop)
        : g(gr), k(kk), slope_prune(slope), parity(gr.ncells, 0),
          odd_by_table(gr.d, 0), above(gr.d, 0), equal(gr.d, 0),
          stop_before(stop) {}

    // Curve value of key at column c (q = 2 only).
    Char value_at(std::uint64_t pos, int c) const {
        const Key& key = g.keys[pos];
        return key.chars[0] + key.chars[1] * c;
    }

    void toggle(std::uint64_t pos) {
        for (int i = 0; i < g.d; ++i) {
            const std::size_t c = g.cells[pos * g.d + i];
            parity[c] ^= 1;
            const int delta = parity[c] ? 1 : -1;
            odd_total += delta;
            odd_by_table[g.cell_table[c]] += delta;
        }
    }

    void classify(std::uint64_t pos, int dir) {
        const std::uint64_t anchor = chosen[0];
        for (int c = 0; c < g.d; ++c) {
            const Char diff = value_at(pos, c) - value_at(anchor, c);
            if (diff > 0)
                above[c] += dir;
            else if (diff == 0)
                equal[c] += dir;
        }
    }

    bool dead() const {
        const int r = k - static_cast<int>(chosen.size());
        if (odd_total > r * g.d) return true;
        for (int i = 0; i < g.d; ++i) {
            // Every key toggles exactly one cell of table i, so the odd-cell
            // count of table i moves by exactly 1 per added key.
            if (odd_by_table[i] > r || ((odd_by_table[i] - r) & 1)) return true;
        }
        // A cell that no later key touches must already be even.
        const std::uint64_t frontier = chosen.back();
        for (std::uint64_t p : chosen)
            for (int i = 0; i < g.d; ++i) {
                const std::size_t c = g.cells[p * g.d + i];
                if (parity[c] && g.last_touch[c] <= frontier) return true;
            }
        if (slope_prune) {
            // Anchor has maximum slope. In any completed bad arrangement the
            // strictly-below class at column c has >= 2c members, all classes
            // are even, and chosen above/equal members never migrate below.
            for (int c = 1; c < g.d; ++c)
                if (k - above[c] - equal[c] < 2 * c) return true;
        }
        return false;
    }

    void run() {
        if (found) return;
        if (stop_before &&
            stop_before->load(std::memory_order_relaxed) <= chosen[0])
            return;
        if (static_cast<int>(chosen.size()) == k) {
            if (odd_total == 0) found = witness_keys(g, chosen);
            return;
        }
        const std::uint64_t remaining =
            static_cast<std::uint64_t>(k) - chosen.size();
        const std::uint64_t frontier = chosen.back();
        for (std::uint64_t p = frontier + 1;
             p + remaining <= g.keys.size() && !found; ++p) {
            ++nodes;
            chosen.push_back(p);
            toggle(p);
            if (slope_prune) classify(p, +1);
            if (!dead()) run();
            if (slope_prune) classify(p, -1);
            toggle(p);
            chosen.pop_back();
        }
    }

    void seed_and_run(std::uint64_t p0) {
        ++nodes;
        chosen.assign(1, p0);
        toggle(p0);
        if (slope_prune) {
            // anchor sits in its own equality class at every column
            for (int c = 0; c < g.d; ++c) equal[c] = 1;
        }
        if (!dead()) run();
        if (slope_prune)
            for (int c = 0; c < g.d; ++c) equal[c] = 0;
        toggle(p0);
        chosen.clear();
    }
};

SearchResult search_pruned(const DerivationSpec& spec, std::int64_t n, int k,
                           std::uint64_t budget) {
    SearchResult res;
    const std::uint64_t N = universe_size(spec, n);
    check_budget(N, k, budget);
    if (static_cast<std::uint64_t>(k) > N) return res; // too few keys exist
    if (k == 1) {
        // A single key occupies each table exactly once: always odd.
        res.nodes = N;
        return res;
    }
    const bool slope = (spec.variant == Variant::curve && spec.q == 2);
    const Ground g = build_ground(spec, n, slope);

    const std::uint64_t first_max = N - static_cast<std::uint64_t>(k) + 1;
    std::atomic<std::uint64_t> best_first{
        std::numeric_limits<std::uint64_t>::max()};
    std::vector<std::optional<std::vector<Key>>> found_at(first_max);
    std::atomic<std::uint64_t> total_nodes{0};

#pragma omp parallel for schedule(dynamic, 1)
    for (std::uint64_t p0 = 0; p0 < first_max; ++p0) {
        if (best_first.load(std::memory_order_relaxed) <= p0) continue;
        PrunedDfs dfs(g, k, slope, &best_first);
        dfs.seed_and_run(p0);
        total_nodes.fetch_add(dfs.nodes, std::memory_order_relaxed);
        if (dfs.found) {
            found_at[p0] = std::move(dfs.found);
            // Keep the smallest first-position witness for determinism.
            std::uint64_t cur = best_first.load();
            while (p0 < cur && !best_first.compare_exchange_weak(cur, p0)) {
            }
        }
    }
    res.nodes = total_nodes.load();
    const std::uint64_t b = best_first.load();
    if (b != std::numeric_limits<std::uint64_t>::max())
        res.witness = std::move(found_at[b]);
    return res;
}

} // namespace

SearchResult find_bad_arrangement_serial(const DerivationSpec& spec,
                                         std::int64_t n, int k,
                                         std::uint64_t budget) {
    if (n < 1) throw std::invalid_argument("search: n must be >= 1");
    if (k < 1) throw std::invalid_argument("search: k must be >= 1");
    SearchResult res;
    const std::uint64_t N = universe_size(spec, n);
    check_budget(N, k, budget);
    if (static_cast<std::uint64_t>(k) > N) return res;
    const Ground g = build_ground(spec, n, false);
    SerialDfs dfs(g, k);
    dfs.run(0);
    res.nodes = dfs.nodes;
    res.witness = std::move(dfs.found);
    return res;
}

SearchResult find_bad_arrangement(const DerivationSpec& spec, std::int64_t n,
                                  int k, const SearchOptions& opt) {
    if (n < 1) throw std::invalid_argument("search: n must be >= 1");
    if (k < 1) throw std::invalid_argument("search: k must be >= 1");
    const std::string key =
        opt.cache_key.empty() ? spec_cache_key(spec) : opt.cache_key;
    if (opt.cache) {
        if (auto hit = opt.cache->lookup(key, n, k)) {
            SearchResult res;
            res.witness = *hit;
            res.from_cache = true;
            return res;
        }
    }
    SearchResult res = search_pruned(spec, n, k, opt.budget);
    if (opt.cache) opt.cache->record(key, n, k, res.witness);
    return res;
}

int k_max_bounded(const DerivationSpec& spec, std::int64_t n, int k_limit,
                  const SearchOptions& opt) {
    if (k_limit < 1)
        throw std::invalid_argument("k_max_bounded: k_limit must be >= 1");
    // Odd sizes cannot be bad: each key covers exactly one cell of table 0,
    // so a zero parity sum forces even cardinality.
    for (int k = 2; k <= k_limit; k += 2) {
        SearchResult r = find_bad_arrangement(spec, n, k, opt);
        if (r.witness) return k - 1;
    }
    return k_limit;
}

std::string spec_cache_key(const DerivationSpec& spec) {
    std::ostringstream os;
    switch (spec.variant) {
    case Variant::curve:
        os << "curve:q=" << spec.q << ",d=" << spec.d;
        break;
    case Variant::identity:
        os << "id:q=" << spec.q;
        break;
    case Variant::tz5:
        os << "tz5";
        break;
    case Variant::tz_linear:
        os << "tz:c=" << spec.field->width() << ",q=" << spec.q
           << ",d=" << spec.d << ",m=" << std::hex << spec.field->modulus();
        break;
    }
    return os.str();
}

SearchCache::SearchCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key, verdict;
        std::int64_t n;
        int k;
        if (!(ls >> key >> n >> k >> verdict)) continue;
        std::ostringstream id;
        id << key << ' ' << n << ' ' << k;
        if (verdict == "none") {
            entries_[id.str()] = std::nullopt;
        } else if (verdict == "found") {
            int q;
            if (!(ls >> q) || q < 1) continue;
            std::vector<Key> keys(k, Key{});
            bool ok = true;
            for (int i = 0; i < k && ok; ++i) {
                keys[i].chars.resize(q);
                for (int j = 0; j < q; ++j)
                    if (!(ls >> keys[i].chars[j])) { ok = false; break; }
            }
            if (ok) entries_[id.str()] = std::move(keys);
        }
    }
}

std::optional<std::optional<std::vector<Key>>>
SearchCache::lookup(const std::string& key, std::int64_t n, int k) const {
    std::ostringstream id;
    id << key << ' ' << n << ' ' << k;
    auto it = entries_.find(id.str());
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void SearchCache::record(const std::string& key, std::int64_t n, int k,
                         const std::optional<std::vector<Key>>& verdict) {
    if (key.find(' ') != std::string::npos ||
        key.find('\n') != std::string::npos)
        throw std::invalid_argument("SearchCache: key must not contain spaces");
    std::ostringstream id;
    id << key << ' ' << n << ' ' << k;
    if (entries_.count(id.str())) return;
    entries_[id.str()] = verdict;
    std::ofstream out(path_, std::ios::app);
    if (!out)
        throw std::runtime_error("SearchCache: cannot open " + path_);
    out << key << ' ' << n << ' ' << k;
    if (!verdict) {
        out << " none\n";
    } else {
        out << " found " << (verdict->empty() ? 0 : (*verdict)[0].chars.size());
        for (const Key& kk : *verdict)
            for (Char c : kk.chars) out << ' ' << c;
        out << '\n';
    }
}

} // namespace tabhash
