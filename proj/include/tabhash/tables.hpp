#pragma once

#include "tabhash/derivation.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace tabhash {

// The d lookup tables of one hash function; every entry is below 2^ell.
struct LookupTables {
    std::vector<std::vector<std::uint32_t>> tables;
    int ell = 1; // output bits, 1..32
};

// Fully random fill: each cell is an independent uniform ell-bit value.
// Table i draws from its own stream of `seed`, so fills are reproducible
// and tables are mutually independent.
LookupTables fill_tables_random(std::uint64_t seed,
                                std::span<const std::uint64_t> sizes, int ell);

// k-wise independent fill: table i holds the low ell bits of a uniformly
// random polynomial of degree <= k-1 over GF(2^b) evaluated at the points
// 0..sizes[i]-1, with b = max(ell, ceil(log2 sizes[i])). Any k cells of one
// table are independent and uniform. b > 16 is rejected.
LookupTables fill_tables_kwise(std::uint64_t seed,
                               std::span<const std::uint64_t> sizes, int ell,
                               int k);

// Binary format: magic "TBH1", then d and ell as little-endian u64, then d
// table lengths as little-endian u64, then all entries as little-endian u32.
void save_tables(std::ostream& os, const LookupTables& t);
LookupTables load_tables(std::istream& is);

// A concrete hash function: derivation spec plus filled tables.
// h(x) = XOR over i of tables[i][derived_i(x)]. Immutable after
// construction; concurrent evaluation is safe.
class Hasher {
public:
    Hasher(DerivationSpec spec, LookupTables tables);

    const DerivationSpec& spec() const { return spec_; }
    const LookupTables& tables() const { return tables_; }
    int lookups_per_key() const { return spec_.d; }

    std::uint32_t operator()(const Key& key) const;

    // Same result while adding every table read to `lookups`. Only reads of
    // the d lookup tables count; derivation arithmetic does not.
    std::uint32_t hash_counted(const Key& key, std::uint64_t& lookups) const;

    // Hash a contiguous stream of keys (q characters each, row-major) and
    // XOR-fold the values: the timed benchmark kernel. The whole stream is
    // validated against the table sizes once up front, then the inner loop
    // runs unchecked.
    std::uint32_t checksum_stream(std::span<const std::uint32_t> flat) const;

private:
    DerivationSpec spec_;
    LookupTables tables_;

    // tz_linear with c == 8: per input character a row of packed bytes, one
    // byte per derived character, so a key needs q packed XORs instead of
    // q*d field multiplications.
    int pack_words_ = 0;
    std::vector<std::vector<std::uint64_t>> pack_;
    // tz_linear with c == 16: premultiplied tables, premul_[i*d+j][x] =
    // x * matrix[i][j] in the field.
    std::vector<std::vector<std::uint32_t>> premul_;

    void build_pack();
    void build_premul();
    template <bool Counted>
    std::uint32_t eval(const Key& key, std::uint64_t* lookups) const;
};

inline std::uint32_t hash(const Hasher& h, const Key& key) { return h(key); }

} // namespace tabhash
