#include "tabhash/arrangement.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tabhash {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw std::overflow_error("arrangement: integer overflow");
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw std::overflow_error("arrangement: integer overflow");
    return r;
}

void check_shape(const Arrangement& arr) {
    if (arr.q < 2) throw std::invalid_argument("arrangement: q must be >= 2");
    if (arr.d < 1) throw std::invalid_argument("arrangement: d must be >= 1");
    for (const Key& k : arr.keys)
        if (static_cast<int>(k.chars.size()) != arr.q)
            throw std::invalid_argument(
                "arrangement: key arity does not match q");
    std::set<Key> uniq(arr.keys.begin(), arr.keys.end());
    if (uniq.size() != arr.keys.size())
        throw std::invalid_argument("arrangement: keys must be distinct");
}

// Coefficients of scale * prod_{i in [q-1]} (z - (d + i)), degree q-1.
std::vector<std::int64_t> doubling_polynomial(int q, int d,
                                              std::int64_t scale) {
    std::vector<std::int64_t> coeff{scale};
    for (int i = 0; i < q - 1; ++i) {
        const std::int64_t root = d + i;
        std::vector<std::int64_t> next(coeff.size() + 1, 0);
        for (std::size_t j = 0; j < coeff.size(); ++j) {
            next[j + 1] = checked_add(next[j + 1], coeff[j]);
            next[j] = checked_add(next[j], checked_mul(coeff[j], -root));
        }
        coeff = std::move(next);
    }
    return coeff;
}

} // namespace

std::int64_t curve_value(const Key& key, std::int64_t z) {
    std::int64_t acc = 0;
    for (std::size_t r = key.chars.size(); r-- > 0;)
        acc = checked_add(checked_mul(acc, z), key.chars[r]);
    return acc;
}

bool verify_bad(const Arrangement& arr) {
    check_shape(arr);
    for (int c = 0; c < arr.d; ++c) {
        std::map<std::int64_t, int> classes;
        for (const Key& k : arr.keys) ++classes[curve_value(k, c)];
        for (const auto& [value, count] : classes)
            if (count % 2 != 0) return false;
    }
    return true;
}

Arrangement double_arrangement(const Arrangement& arr, std::int64_t scale) {
    check_shape(arr);
    if (scale == 0)
        throw std::invalid_argument("double_arrangement: scale must be nonzero");
    Arrangement base = arr;
    if (!base.verified) {
        if (!verify_bad(base))
            throw std::invalid_argument(
                "double_arrangement: input is not a bad arrangement");
        base.verified = true;
    }
    const std::vector<std::int64_t> qpoly =
        doubling_polynomial(base.q, base.d, scale);
    Arrangement out;
    out.q = base.q;
    out.d = base.d + base.q - 1;
    out.keys = base.keys;
    std::set<Key> originals(base.keys.begin(), base.keys.end());
    for (const Key& k : base.keys) {
        Key shifted;
        shifted.chars.resize(base.q);
        for (int r = 0; r < base.q; ++r)
            shifted.chars[r] = checked_add(k.chars[r], qpoly[r]);
        if (originals.count(shifted))
            throw std::invalid_argument(
                "double_arrangement: translate collides with the original "
                "set (|scale| too small)");
        out.keys.push_back(std::move(shifted));
    }
    std::set<Key> all(out.keys.begin(), out.keys.end());
    if (all.size() != out.keys.size())
        throw std::invalid_argument(
            "double_arrangement: translates collide with each other");
    if (!verify_bad(out))
        throw std::logic_error(
            "double_arrangement: result failed verification");
    out.verified = true;
    return out;
}

Arrangement double_arrangement(const Arrangement& arr) {
    check_shape(arr);
    std::int64_t spread = 0;
    if (!arr.keys.empty()) {
        auto [lo, hi] = std::minmax_element(
            arr.keys.begin(), arr.keys.end(),
            [](const Key& a, const Key& b) {
                return a.chars[0] < b.chars[0];
            });
        spread = hi->chars[0] - lo->chars[0];
    }
    std::int64_t scale = spread + 1;
    for (int attempt = 0; attempt < 62; ++attempt) {
        try {
            return double_arrangement(arr, scale);
        } catch (const std::invalid_argument&) {
            scale = checked_mul(scale, 2);
        }
    }
    throw std::logic_error("double_arrangement: no workable scale found");
}

Arrangement construct_bad_arrangement(int d) {
    if (d < 1 || d > 12)
        throw std::invalid_argument(
            "construct_bad_arrangement: d must be in [1, 12] (2^d keys)");
    Arrangement arr;
    arr.q = 2;
    if (d == 1) {
        arr.d = 1;
        arr.keys = {Key{0, 0}, Key{0, 1}};
    } else if (d == 2) {
        arr.d = 2;
        arr.keys = {Key{0, 1}, Key{0, 2}, Key{1, 0}, Key{1, 1}};
    } else {
        arr.d = 3;
        arr.keys = {Key{0, 3}, Key{0, 4}, Key{1, 2}, Key{1, 3},
                    Key{4, 1}, Key{4, 2}, Key{5, 0}, Key{5, 1}};
    }
    if (!verify_bad(arr))
        throw std::logic_error("construct_bad_arrangement: base case invalid");
    arr.verified = true;
    for (int dd = arr.d; dd < d; ++dd) {
        // Q(z) = 2^{dd-1}(dd - z) = -2^{dd-1} (z - dd); afterwards shift the
        // second characters up by 2^{dd-1} to restore non-negativity.
        const std::int64_t half = std::int64_t(1) << (dd - 1);
        arr = normalize_nonneg(double_arrangement(arr, -half));
    }
    return arr;
}

Arrangement normalize_nonneg(const Arrangement& arr) {
    check_shape(arr);
    if (arr.q != 2)
        throw std::invalid_argument("normalize_nonneg: q = 2 only");
    Arrangement out = arr;
    if (out.keys.empty()) return out;
    std::int64_t mn = out.keys[0].chars[1];
    for (const Key& k : out.keys) mn = std::min(mn, k.chars[1]);
    for (Key& k : out.keys) k.chars[1] = checked_add(k.chars[1], -mn);
    if (arr.verified) {
        if (!verify_bad(out))
            throw std::logic_error("normalize_nonneg: badness lost");
        out.verified = true;
    }
    return out;
}

void write_arrangement(std::ostream& os, const Arrangement& arr) {
    check_shape(arr);
    os << arr.q << ' ' << arr.d << ' ' << arr.keys.size() << '\n';
    for (const Key& k : arr.keys) {
        for (int r = 0; r < arr.q; ++r) {
            if (r) os << ' ';
            os << k.chars[r];
        }
        os << '\n';
    }
    if (!os) throw std::runtime_error("write_arrangement: write failed");
}

Arrangement read_arrangement(std::istream& is) {
    auto next_line = [&is](std::string& line) {
        while (std::getline(is, line)) {
            std::size_t i = line.find_first_not_of(" \t\r");
            if (i == std::string::npos || line[i] == '#') continue;
            return true;
        }
        return false;
    };
    std::string line;
    if (!next_line(line))
        throw std::runtime_error("read_arrangement: missing header line");
    std::istringstream hs(line);
    int q, d;
    std::size_t k;
    if (!(hs >> q >> d >> k))
        throw std::runtime_error("read_arrangement: malformed header (want "
                                 "\"q d k\")");
    if (q < 2 || d < 1)
        throw std::runtime_error("read_arrangement: invalid q or d");
    Arrangement arr;
    arr.q = q;
    arr.d = d;
    arr.keys.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (!next_line(line))
            throw std::runtime_error("read_arrangement: expected " +
                                     std::to_string(k) + " keys, got " +
                                     std::to_string(i));
        std::istringstream ks(line);
        Key key;
        key.chars.resize(q);
        for (int r = 0; r < q; ++r)
            if (!(ks >> key.chars[r]))
                throw std::runtime_error(
                    "read_arrangement: malformed key line: " + line);
        std::string extra;
        if (ks >> extra)
            throw std::runtime_error(
                "read_arrangement: trailing characters on key line: " + line);
        arr.keys.push_back(std::move(key));
    }
    std::set<Key> uniq(arr.keys.begin(), arr.keys.end());
    if (uniq.size() != arr.keys.size())
        throw std::runtime_error("read_arrangement: duplicate keys");
    return arr;
}

} // namespace tabhash
