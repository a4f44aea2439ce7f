#pragma once

#include "tabhash/gf2field.hpp"

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace tabhash {

using Char = std::int64_t;

// A key is a q-tuple of input characters. Universe keys are non-negative;
// negative characters only appear transiently inside arrangement
// constructions, which work over the integers.
struct Key {
    std::vector<Char> chars;
    Key() = default;
    explicit Key(std::vector<Char> c) : chars(std::move(c)) {}
    Key(std::initializer_list<Char> c) : chars(c) {}
    friend auto operator<=>(const Key&, const Key&) = default;
};

// Derived key: position i holds the character fed to lookup table i, so the
// implicit label of entry i is the pair (i, values[i]).
struct DerivedKey {
    std::vector<Char> values;
    friend auto operator<=>(const DerivedKey&, const DerivedKey&) = default;
};

enum class Variant { curve, tz_linear, tz5, identity };

// Which derived characters a hash function computes from a key. tz_linear
// carries its field and q x d matrix; the other variants need only (q, d).
struct DerivationSpec {
    Variant variant = Variant::identity;
    int q = 1;
    int d = 1;
    std::shared_ptr<const BinaryField> field;          // tz_linear only
    std::vector<std::vector<std::uint32_t>> matrix;    // tz_linear: q x d

    static DerivationSpec curve(int q, int d);
    static DerivationSpec identity(int q);
    static DerivationSpec tz5();
    // Vandermonde-style linear map over GF(2^c).
    static DerivationSpec tz_linear(std::shared_ptr<const BinaryField> f,
                                    int q, int d);
    static DerivationSpec tz_linear_matrix(
        std::shared_ptr<const BinaryField> f,
        std::vector<std::vector<std::uint32_t>> m);
};

// Entry i of the derived key is sum_r a_r * i^r over the integers; overflow
// throws instead of wrapping.
DerivedKey derive_curve(const Key& key, int d);

DerivedKey derive_tz(const Key& key, const DerivationSpec& spec);

// ((0, a), (1, b), (2, a + b)) with ordinary integer addition.
DerivedKey derive_tz5(const Key& key);

DerivedKey derive(const DerivationSpec& spec, const Key& key);

// Allocation-free variant writing into out (size spec.d); hot paths use this.
void derive_into(const DerivationSpec& spec, const Key& key,
                 std::span<Char> out);

// Per-table sizes covering every derived character of the universe [n]^q.
// For curve: exactly 1 + (n-1) * sum_r i^r. For identity and tz5 the bounds
// are exact as well. For tz_linear a column whose only nonzero entry is in
// row i is exact (max over x_i in [n]); other columns use the safe bound 2^c.
std::vector<std::uint64_t> table_index_bounds(const DerivationSpec& spec,
                                              std::int64_t n);

} // namespace tabhash
