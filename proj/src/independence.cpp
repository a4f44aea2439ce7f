#include "tabhash/independence.hpp"

#include <omp.h>

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace tabhash {

Rational make_rational(std::uint64_t num, std::uint64_t den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    const std::uint64_t g = std::gcd(num == 0 ? den : num, den);
    return Rational{num / g, den / g};
}

namespace {

std::vector<DerivedKey> derive_all(const DerivationSpec& spec,
                                   const std::vector<Key>& keys) {
    std::set<Key> seen;
    for (const Key& k : keys)
        if (!seen.insert(k).second)
            throw std::invalid_argument(
                "incidence_matrix: duplicate keys rejected");
    std::vector<DerivedKey> derived;
    derived.reserve(keys.size());
    for (const Key& k : keys) derived.push_back(derive(spec, k));
    return derived;
}

// Rows as lists of global cell ids, plus the sorted cell labels.
struct CellIndex {
    std::vector<ColLabel> labels;
    std::vector<std::vector<std::size_t>> rows;
};

CellIndex index_cells(const std::vector<DerivedKey>& derived) {
    std::size_t d = derived.empty() ? 0 : derived[0].values.size();
    std::map<ColLabel, std::size_t> id;
    for (const DerivedKey& dk : derived) {
        if (dk.values.size() != d)
            throw std::invalid_argument(
                "incidence: derived keys of unequal length");
        for (std::size_t i = 0; i < d; ++i)
            id.emplace(ColLabel{static_cast<int>(i), dk.values[i]}, 0);
    }
    CellIndex ci;
    ci.labels.reserve(id.size());
    for (auto& [label, slot] : id) {
        slot = ci.labels.size();
        ci.labels.push_back(label);
    }
    ci.rows.resize(derived.size());
    for (std::size_t r = 0; r < derived.size(); ++r) {
        ci.rows[r].reserve(d);
        for (std::size_t i = 0; i < d; ++i)
            ci.rows[r].push_back(
                id[ColLabel{static_cast<int>(i), derived[r].values[i]}]);
    }
    return ci;
}

} // namespace

BitMatrix incidence_from_derived(const std::vector<DerivedKey>& derived) {
    CellIndex ci = index_cells(derived);
    BitMatrix m(derived.size(), ci.labels.size());
    m.col_labels = ci.labels;
    for (std::size_t r = 0; r < ci.rows.size(); ++r)
        for (std::size_t c : ci.rows[r]) m.set(r, c, true);
    return m;
}

BitMatrix incidence_matrix(const DerivationSpec& spec,
                           const std::vector<Key>& keys) {
    return incidence_from_derived(derive_all(spec, keys));
}

IndependenceVerdict verdict_from_derived(
    const std::vector<DerivedKey>& derived) {
    BitMatrix m = incidence_from_derived(derived);
    IndependenceVerdict v;
    v.rank = rank(m);
    v.used_cells = m.cols();
    v.independent = (v.rank == m.rows());
    if (!v.independent) v.witness_rows = find_dependent_rows(m);
    return v;
}

IndependenceVerdict is_independent_set(const DerivationSpec& spec,
                                       const std::vector<Key>& keys) {
    IndependenceVerdict v = verdict_from_derived(derive_all(spec, keys));
    if (v.witness_rows) {
        std::vector<Key> w;
        w.reserve(v.witness_rows->size());
        for (std::size_t r : *v.witness_rows) w.push_back(keys[r]);
        v.witness = std::move(w);
    }
    return v;
}

bool is_peelable_derived(const std::vector<DerivedKey>& derived) {
    CellIndex ci = index_cells(derived);
    std::vector<std::size_t> cell_count(ci.labels.size(), 0);
    for (const auto& row : ci.rows)
        for (std::size_t c : row) ++cell_count[c];
    std::vector<bool> alive(derived.size(), true);
    std::size_t remaining = derived.size();
    bool progress = true;
    while (remaining > 0 && progress) {
        progress = false;
        for (std::size_t r = 0; r < ci.rows.size(); ++r) {
            if (!alive[r]) continue;
            bool unique = false;
            for (std::size_t c : ci.rows[r])
                if (cell_count[c] == 1) { unique = true; break; }
            if (!unique) continue;
            alive[r] = false;
            --remaining;
            for (std::size_t c : ci.rows[r]) --cell_count[c];
            progress = true;
        }
    }
    return remaining == 0;
}

bool is_peelable(const DerivationSpec& spec, const std::vector<Key>& keys) {
    return is_peelable_derived(derive_all(spec, keys));
}

Rational JointDistribution::probability(
    const std::vector<std::uint32_t>& outcome) const {
    if (static_cast<int>(outcome.size()) != k)
        throw std::invalid_argument("probability: outcome has wrong arity");
    std::uint64_t packed = 0;
    for (int j = 0; j < k; ++j) {
        if (outcome[j] >= (1u << ell))
            throw std::invalid_argument("probability: outcome value too wide");
        packed |= static_cast<std::uint64_t>(outcome[j]) << (j * ell);
    }
    return probability_packed(packed);
}

Rational JointDistribution::probability_packed(std::uint64_t packed) const {
    if (packed >= counts.size())
        throw std::invalid_argument("probability: outcome out of range");
    return make_rational(counts[packed], total);
}

bool JointDistribution::is_uniform() const {
    if (total == 0 || counts.empty()) return false;
    if (total % counts.size() != 0) return false;
    const std::uint64_t want = total / counts.size();
    for (std::uint64_t c : counts)
        if (c != want) return false;
    return true;
}

JointDistribution joint_from_derived(const std::vector<DerivedKey>& derived,
                                     int ell, bool parallel) {
    if (ell < 1 || ell > kJointBudgetBits)
        throw std::invalid_argument("exact_joint_distribution: bad ell");
    const int k = static_cast<int>(derived.size());
    if (k == 0)
        throw std::invalid_argument("exact_joint_distribution: no keys");
    CellIndex ci = index_cells(derived);
    const int w = static_cast<int>(ci.labels.size());
    if (ell * w > kJointBudgetBits)
        throw std::length_error(
            "exact_joint_distribution: ell * used_cells = " +
            std::to_string(ell * w) + " exceeds the budget of " +
            std::to_string(kJointBudgetBits) + " bits");
    if (ell * k > kJointBudgetBits)
        throw std::length_error(
            "exact_joint_distribution: ell * k exceeds the outcome budget");

    // spread[c]: for cell c, a word with a 1 at bit j*ell for every key j
    // whose row contains c. XORing delta * spread[c] into the packed outcome
    // applies a change of cell c's value to every affected key at once
    // (cell deltas are < 2^ell and lanes are ell bits wide, so the product
    // cannot carry across lanes).
    std::vector<std::uint64_t> spread(w, 0);
    for (int r = 0; r < k; ++r)
        for (std::size_t c : ci.rows[r])
            spread[c] |= 1ULL << (r * ell);

    const std::uint64_t fills = 1ULL << (ell * w);
    const std::uint32_t cell_mask = (1u << ell) - 1u;
    JointDistribution out;
    out.k = k;
    out.ell = ell;
    out.total = fills;
    out.counts.assign(1ULL << (ell * k), 0);

    // Fill f assigns cell c the value (f >> c*ell) & cell_mask. A chunk
    // walks its fill range in order, rippling base-2^ell digit increments
    // into the packed outcome.
    auto outcome_of = [&](std::uint64_t f) {
        std::uint64_t o = 0;
        for (int c = 0; c < w; ++c)
            o ^= ((f >> (c * ell)) & cell_mask) * spread[c];
        return o;
    };
    auto run_chunk = [&](std::uint64_t lo, std::uint64_t hi,
                         std::vector<std::uint64_t>& counts) {
        std::uint64_t outcome = outcome_of(lo);
        for (std::uint64_t f = lo;;) {
            ++counts[outcome];
            if (++f == hi) break;
            // Ripple: digits that wrapped 2^ell-1 -> 0, then one +1 digit.
            std::uint64_t changed = f ^ (f - 1);
            int c = 0;
            while (changed != 0 && c < w) {
                const std::uint32_t oldv =
                    static_cast<std::uint32_t>((f - 1) >> (c * ell)) &
                    cell_mask;
                const std::uint32_t newv =
                    static_cast<std::uint32_t>(f >> (c * ell)) & cell_mask;
                if (oldv != newv)
                    outcome ^= static_cast<std::uint64_t>(oldv ^ newv) *
                               spread[c];
                changed >>= ell;
                ++c;
            }
        }
    };

    // Serial when small (parallel overhead dominates) or when per-thread
    // outcome arrays would be large.
    if (!parallel || fills < (1ULL << 16) ||
        out.counts.size() > (1ULL << 20)) {
        run_chunk(0, fills, out.counts);
        return out;
    }

    int nchunks = 1;
#pragma omp parallel
    {
#pragma omp single
        nchunks = std::max(1, omp_get_num_threads() * 4);
    }
    if (static_cast<std::uint64_t>(nchunks) > fills)
        nchunks = static_cast<int>(fills);
    std::vector<std::vector<std::uint64_t>> partial(
        nchunks, std::vector<std::uint64_t>(out.counts.size(), 0));
    const std::uint64_t per = fills / nchunks;
#pragma omp parallel for schedule(static)
    for (int ch = 0; ch < nchunks; ++ch) {
        const std::uint64_t lo = per * ch;
        const std::uint64_t hi =
            (ch == nchunks - 1) ? fills : per * (ch + 1);
        run_chunk(lo, hi, partial[ch]);
    }
    for (const auto& p : partial)
        for (std::size_t i = 0; i < out.counts.size(); ++i)
            out.counts[i] += p[i];
    return out;
}

JointDistribution exact_joint_distribution(const DerivationSpec& spec,
                                           const std::vector<Key>& keys,
                                           int ell) {
    return joint_from_derived(derive_all(spec, keys), ell, true);
}

JointDistribution exact_joint_distribution_serial(const DerivationSpec& spec,
                                                  const std::vector<Key>& keys,
                                                  int ell) {
    return joint_from_derived(derive_all(spec, keys), ell, false);
}

} // namespace tabhash
