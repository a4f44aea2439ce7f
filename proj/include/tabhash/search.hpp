#pragma once

#include "tabhash/derivation.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tabhash {

// Raised when a search would enumerate more than the configured budget of
// C(n^q, k) subsets.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kDefaultSearchBudget = 10'000'000'000ULL;

// Text ledger of finished search verdicts keyed by (family key, n, k), so
// repeated suites skip exhaustions they have already proved. Lines:
//   <key> <n> <k> none
//   <key> <n> <k> found <q> <char...>
class SearchCache {
public:
    explicit SearchCache(std::string path);

    // nullopt: not cached. Otherwise the verdict: a witness or "none".
    std::optional<std::optional<std::vector<Key>>>
    lookup(const std::string& key, std::int64_t n, int k) const;

    void record(const std::string& key, std::int64_t n, int k,
                const std::optional<std::vector<Key>>& verdict);

    const std::string& path() const { return path_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::string path_;
    std::map<std::string, std::optional<std::vector<Key>>> entries_;
};

struct SearchOptions {
    std::uint64_t budget = kDefaultSearchBudget;
    SearchCache* cache = nullptr;
    std::string cache_key; // identifies the derivation in the cache
};

struct SearchResult {
    std::optional<std::vector<Key>> witness;
    std::uint64_t nodes = 0;
    bool from_cache = false;
};

// Exhaustive search for k distinct keys in [n]^q whose derivations cover
// every used cell an even number of times (equivalently: incidence rows XOR
// to zero). An absent result proves exhaustion of this bounded universe; a
// returned witness refutes k-wise independence in any universe containing
// it. This kernel prunes (per-table parities, unreachable odd cells, and a
// slope argument for q = 2 curves) and splits the subset space by first key
// across OpenMP threads; it must agree with the serial reference below,
// which is enforced by tests over an instance grid.
SearchResult find_bad_arrangement(const DerivationSpec& spec, std::int64_t n,
                                  int k, const SearchOptions& opt = {});

// Unpruned depth-first reference enumeration. Slow but obviously correct;
// kept as the testing baseline for the parallel kernel.
SearchResult find_bad_arrangement_serial(
    const DerivationSpec& spec, std::int64_t n, int k,
    std::uint64_t budget = kDefaultSearchBudget);

// Largest k <= k_limit such that no bad arrangement of size <= k exists in
// [n]^q. Odd sizes cannot be bad (each key hits table 0 exactly once), so
// only even sizes are searched; tests assert the odd cases once.
int k_max_bounded(const DerivationSpec& spec, std::int64_t n, int k_limit,
                  const SearchOptions& opt = {});

// Canonical cache key for a spec (families also pass their own names).
std::string spec_cache_key(const DerivationSpec& spec);

} // namespace tabhash
