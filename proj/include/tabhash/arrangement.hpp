#pragma once

#include "tabhash/derivation.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace tabhash {

// A set of integer key curves claimed to partition every column 0..d-1 into
// even-size value classes ("bad"): a concrete refutation certificate for
// |keys|-wise independence of the (q,d)-curve family. Characters may be
// negative while a construction is in flight.
struct Arrangement {
    int q = 2;
    int d = 1;
    std::vector<Key> keys;
    bool verified = false; // set after verify_bad has confirmed badness
};

// sum_i chars[i] * z^i over the integers; overflow throws.
std::int64_t curve_value(const Key& key, std::int64_t z);

// True iff every column z in 0..d-1 splits the keys into even-size classes
// of equal curve value. Equivalent to the incidence rows XORing to zero.
bool verify_bad(const Arrangement& arr);

// Doubling step: returns arr's keys plus their translates by the polynomial
// Q(z) = scale * prod_{i in [q-1]} (z - (d + i)), which is zero on the q-1
// new columns d..d+q-2. The result is bad on d+q-1 columns. Throws if the
// translate set collides with the original (scale too small in magnitude).
Arrangement double_arrangement(const Arrangement& arr, std::int64_t scale);

// Doubling with an automatic scale: starts at 1 + (max first-character
// spread) and doubles until the translate set is disjoint.
Arrangement double_arrangement(const Arrangement& arr);

// Bad (2, d, 2^d)-arrangement with characters in [2^{d-1}(d-2)+2] for d >= 3
// and in [3] for d <= 2. Base cases for d <= 3, then doubling with
// Q(z) = 2^{d'-1}(d'-z) and a +2^{d'-1} shift of the second characters.
// Guard: 1 <= d <= 12 (the result has 2^d keys).
Arrangement construct_bad_arrangement(int d);

// Shift all second characters so the minimum is zero (q = 2 only); first
// characters are untouched and badness is preserved.
Arrangement normalize_nonneg(const Arrangement& arr);

// Text format: optional '#' comment lines, a "q d k" header line, then k
// lines of q space-separated integers. Round-trips losslessly.
void write_arrangement(std::ostream& os, const Arrangement& arr);
Arrangement read_arrangement(std::istream& is);

} // namespace tabhash
