#pragma once

#include "tabhash/derivation.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tabhash {

// A named, ready-to-instantiate hash family: the derivation recipe, the
// width of the input characters its keys are drawn from, and the
// independence level that holds whenever the tables are filled with
// guaranteed_k-wise independent values (mutually independent tables).
struct HashFamily {
    std::string id;
    DerivationSpec spec;
    int char_bits = 0;    // input characters are drawn from [2^char_bits]
    int guaranteed_k = 0; // provable independence under suitable filling
};

// Independence guaranteed for a (q,d)-curve family. q = 2 is the tight
// 2d-1 result; q > 2 uses the general sufficiency bound
//   d >= ceil(2(q-1)(k-1)/(2q-1)) * (q-1) + 1,
// with an even guarantee lifted to the next odd level (an even-independent,
// odd-suitable tabulation class is automatically odd-independent).
int curve_guaranteed_k(int q, int d);

// Independence guaranteed for the linear-map scheme with q input and d
// derived characters: the largest k with
//   ((k odd ? k-2 : k-1) * (q-1)) + 1 <= d,
// the odd case already reflecting the even-to-odd lift.
int tz_guaranteed_k(int q, int d);

// Resolve a family identifier:
//   curve<q>_<d>  polynomial-curve derivation over the integers
//   tz2_<d>       linear-map scheme, two 16-bit characters, no packing
//   tz4_<d>       linear-map scheme, four 8-bit characters, packed rows
//   tz5           T0(a) ^ T1(b) ^ T2(a+b) with integer addition
//   id            simple tabulation (two characters, identity derivation)
// Throws std::invalid_argument with a descriptive message for unknown ids
// or out-of-range parameters.
HashFamily parse_family(const std::string& id);

// Per-table entry counts for the family over its full character domain
// [2^char_bits]^q.
std::vector<std::uint64_t> family_table_sizes(const HashFamily& fam);

// One-line summary of the accepted identifiers, for usage messages.
std::string family_grammar();

} // namespace tabhash
