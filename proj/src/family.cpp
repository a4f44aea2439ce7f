#include "tabhash/family.hpp"

#include "tabhash/gf2field.hpp"

#include <charconv>
#include <stdexcept>

namespace tabhash {

namespace {

// Parse a decimal integer spanning exactly [first, last).
bool parse_int(const char* first, const char* last, int& out) {
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

[[noreturn]] void bad_family(const std::string& id, const std::string& why) {
    throw std::invalid_argument("unknown family '" + id + "': " + why +
                                "; expected " + family_grammar());
}

} // namespace

int curve_guaranteed_k(int q, int d) {
    if (q < 2 || d < 1)
        throw std::invalid_argument("curve_guaranteed_k: need q >= 2, d >= 1");
    if (q == 2) return 2 * d - 1;
    int best = 0;
    for (int k = 1;; ++k) {
        const long long num = 2LL * (q - 1) * (k - 1);
        const long long den = 2LL * q - 1;
        const long long needed = ((num + den - 1) / den) * (q - 1) + 1;
        if (needed > d) break;
        best = k;
    }
    if (best % 2 == 0) ++best; // even guarantees lift to the next odd level
    return best;
}

int tz_guaranteed_k(int q, int d) {
    if (q < 2 || d < q)
        throw std::invalid_argument("tz_guaranteed_k: need q >= 2, d >= q");
    int best = 0;
    for (int k = 1;; ++k) {
        long long eff = (k % 2 == 1) ? k - 2 : k - 1;
        if (eff < 0) eff = 0;
        const long long needed = eff * (q - 1) + 1;
        if (needed > d) break;
        best = k;
    }
    return best;
}

HashFamily parse_family(const std::string& id) {
    if (id == "id") {
        return HashFamily{id, DerivationSpec::identity(2), 16, 3};
    }
    if (id == "tz5") {
        return HashFamily{id, DerivationSpec::tz5(), 16, 5};
    }
    auto tail_int = [&](std::size_t prefix_len, int& out) {
        return parse_int(id.data() + prefix_len, id.data() + id.size(), out);
    };
    if (id.rfind("curve", 0) == 0) {
        // curve<q>_<d>
        const auto us = id.find('_');
        int q = 0, d = 0;
        if (us == std::string::npos ||
            !parse_int(id.data() + 5, id.data() + us, q) ||
            !parse_int(id.data() + us + 1, id.data() + id.size(), d))
            bad_family(id, "malformed curve<q>_<d>");
        if (q < 2 || q > 8) bad_family(id, "curve q must be in [2, 8]");
        if (d < 1 || d > 64) bad_family(id, "curve d must be in [1, 64]");
        return HashFamily{id, DerivationSpec::curve(q, d), 32 / q,
                          curve_guaranteed_k(q, d)};
    }
    if (id.rfind("tz2_", 0) == 0) {
        int d = 0;
        if (!tail_int(4, d)) bad_family(id, "malformed tz2_<d>");
        if (d < 2 || d > 64) bad_family(id, "tz2 d must be in [2, 64]");
        return HashFamily{id, DerivationSpec::tz_linear(shared_field(16), 2, d),
                          16, tz_guaranteed_k(2, d)};
    }
    if (id.rfind("tz4_", 0) == 0) {
        int d = 0;
        if (!tail_int(4, d)) bad_family(id, "malformed tz4_<d>");
        if (d < 4 || d > 64) bad_family(id, "tz4 d must be in [4, 64]");
        return HashFamily{id, DerivationSpec::tz_linear(shared_field(8), 4, d),
                          8, tz_guaranteed_k(4, d)};
    }
    bad_family(id, "unrecognized prefix");
}

std::vector<std::uint64_t> family_table_sizes(const HashFamily& fam) {
    return table_index_bounds(fam.spec, std::uint64_t{1} << fam.char_bits);
}

std::string family_grammar() {
    return "curve<q>_<d>, tz2_<d>, tz4_<d>, tz5, or id "
           "(e.g. curve2_4, tz2_6, tz4_16)";
}

} // namespace tabhash
