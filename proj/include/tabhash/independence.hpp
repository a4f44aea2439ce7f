#pragma once

#include "tabhash/bitmatrix.hpp"
#include "tabhash/derivation.hpp"

#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

namespace tabhash {

// Exact probability with a power-of-two denominator, kept reduced.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    friend bool operator==(const Rational&, const Rational&) = default;
};

Rational make_rational(std::uint64_t num, std::uint64_t den);

// 0/1 matrix with one row per key and one column per distinct pair
// (table index, derived character), columns sorted lexicographically.
// Row r has a 1 exactly in the columns its derived key touches.
BitMatrix incidence_matrix(const DerivationSpec& spec,
                           const std::vector<Key>& keys);

// Same, over already-derived keys (all of equal length d).
BitMatrix incidence_from_derived(const std::vector<DerivedKey>& derived);

struct IndependenceVerdict {
    bool independent = false;
    std::size_t rank = 0;
    std::size_t used_cells = 0;
    // Indices into the input key vector of a dependent subset, if any.
    std::optional<std::vector<std::size_t>> witness_rows;
    std::optional<std::vector<Key>> witness;
};

// Full row rank of the incidence matrix <=> the keys hash uniformly and
// independently whenever the tables are filled with >= |keys|-wise
// independent values. A rank-deficient set comes with a dependent subset
// whose hash values satisfy a forced XOR relation under every table fill.
IndependenceVerdict is_independent_set(const DerivationSpec& spec,
                                       const std::vector<Key>& keys);
IndependenceVerdict verdict_from_derived(const std::vector<DerivedKey>& derived);

// Iterated removal of keys holding a derived character no other remaining
// key shares; true if everything peels away. Peelable implies independent,
// but not conversely.
bool is_peelable(const DerivationSpec& spec, const std::vector<Key>& keys);
bool is_peelable_derived(const std::vector<DerivedKey>& derived);

// Joint distribution of (h(x_0), ..., h(x_{k-1})) over all table fills.
struct JointDistribution {
    int k = 0;
    int ell = 1;
    std::uint64_t total = 0;            // number of fills enumerated
    std::vector<std::uint64_t> counts;  // indexed by packed outcome tuple

    std::uint64_t outcome_space() const { return counts.size(); }
    // Probability of the outcome (y_0, ..., y_{k-1}).
    Rational probability(const std::vector<std::uint32_t>& outcome) const;
    Rational probability_packed(std::uint64_t packed) const;
    // Exactly uniform: every outcome has probability 2^{-k*ell}.
    bool is_uniform() const;
};

constexpr int kJointBudgetBits = 24; // ell * used_cells (and ell * k) cap

// Exact joint distribution by enumerating all 2^{ell * w} fills of the w
// used cells. Throws std::length_error when the 2^24-fill budget would be
// exceeded. The parallel version splits the fill range across threads and is
// count-identical to the serial reference.
JointDistribution exact_joint_distribution(const DerivationSpec& spec,
                                           const std::vector<Key>& keys,
                                           int ell);
JointDistribution exact_joint_distribution_serial(const DerivationSpec& spec,
                                                  const std::vector<Key>& keys,
                                                  int ell);
JointDistribution joint_from_derived(const std::vector<DerivedKey>& derived,
                                     int ell, bool parallel);

} // namespace tabhash
