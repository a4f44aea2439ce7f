#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tabhash/gf2field.hpp"
#include "tabhash/rng.hpp"
#include "tabhash/tables.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace tabhash;

namespace {

std::vector<std::uint32_t> random_stream(std::mt19937_64& eng, int q,
                                         std::size_t nkeys, std::uint32_t n) {
    std::vector<std::uint32_t> flat(nkeys * q);
    for (auto& c : flat) c = draw_bits(eng, 30) % n;
    return flat;
}

Key key_at(const std::vector<std::uint32_t>& flat, int q, std::size_t i) {
    Key key;
    key.chars.resize(q);
    for (int r = 0; r < q; ++r)
        key.chars[r] = static_cast<Char>(flat[i * q + r]);
    return key;
}

void check_stream_matches_pointwise(const Hasher& h,
                                    const std::vector<std::uint32_t>& flat) {
    const int q = h.spec().q;
    std::uint32_t expect = 0;
    for (std::size_t i = 0; i < flat.size() / q; ++i)
        expect ^= h(key_at(flat, q, i));
    CHECK(h.checksum_stream(flat) == expect);
}

} // namespace

TEST_CASE("fill_tables_random: deterministic, stream-per-table, in range") {
    const std::vector<std::uint64_t> sizes{8, 16, 4};
    const auto a = fill_tables_random(42, sizes, 5);
    const auto b = fill_tables_random(42, sizes, 5);
    const auto c = fill_tables_random(43, sizes, 5);
    REQUIRE(a.tables.size() == 3);
    CHECK(a.ell == 5);
    CHECK(a.tables == b.tables);
    CHECK(a.tables != c.tables);
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        CHECK(a.tables[i].size() == sizes[i]);
        for (std::uint32_t v : a.tables[i]) CHECK(v < 32u);
    }
    // Table i depends only on (seed, i), not on the other sizes: shrinking
    // the list must not change the shared prefix tables.
    const std::vector<std::uint64_t> prefix{8, 16};
    const auto p = fill_tables_random(42, prefix, 5);
    CHECK(p.tables[0] == a.tables[0]);
    CHECK(p.tables[1] == a.tables[1]);

    const auto empty =
        fill_tables_random(42, std::vector<std::uint64_t>{}, 5);
    CHECK(empty.tables.empty());

    const auto wide = fill_tables_random(7, std::vector<std::uint64_t>{4}, 32);
    CHECK(wide.tables[0].size() == 4);

    CHECK_THROWS_AS(fill_tables_random(1, sizes, 0), std::invalid_argument);
    CHECK_THROWS_AS(fill_tables_random(1, sizes, 33), std::invalid_argument);
}

TEST_CASE("fill_tables_random: single-bit cells are balanced") {
    const auto t =
        fill_tables_random(2026, std::vector<std::uint64_t>{100000}, 1);
    std::uint64_t ones = 0;
    for (std::uint32_t v : t.tables[0]) {
        CHECK(v <= 1u);
        ones += v;
    }
    const double mean = static_cast<double>(ones) / 100000.0;
    CHECK(mean > 0.49);
    CHECK(mean < 0.51);
}

TEST_CASE("fill_tables_kwise: k=1 gives one constant per table") {
    const std::vector<std::uint64_t> sizes{8, 8};
    for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
        const auto t = fill_tables_kwise(seed, sizes, 3, 1);
        for (const auto& table : t.tables)
            for (std::uint32_t v : table) CHECK(v == table[0]);
    }
    // Across seeds the constant is uniform over the 8 possible values.
    std::array<int, 8> counts{};
    const int trials = 4096;
    for (int s = 0; s < trials; ++s) {
        const auto t = fill_tables_kwise(1000 + s, sizes, 3, 1);
        ++counts[t.tables[0][5]];
    }
    // Binomial(4096, 1/8): mean 512, five sigma ~ 106.
    for (int v = 0; v < 8; ++v) {
        CHECK(counts[v] > 406);
        CHECK(counts[v] < 618);
    }
}

TEST_CASE("fill_tables_kwise: k=2 tables are degree-1 polynomials") {
    // Oracle for the design itself: over GF(4), the 16 polynomials
    // c0 + c1*x hit every output pair at two distinct points exactly once,
    // which is exactly pairwise independence of the table cells.
    const auto f = shared_field(2);
    for (std::uint32_t x = 0; x < 4; ++x) {
        for (std::uint32_t y = 0; y < 4; ++y) {
            if (x == y) continue;
            std::map<std::pair<std::uint32_t, std::uint32_t>, int> seen;
            for (std::uint32_t c0 = 0; c0 < 4; ++c0)
                for (std::uint32_t c1 = 0; c1 < 4; ++c1)
                    ++seen[{c0 ^ f->mul(c1, x), c0 ^ f->mul(c1, y)}];
            REQUIRE(seen.size() == 16);
            for (const auto& [pair, count] : seen) CHECK(count == 1);
        }
    }

    // The produced tables really are such polynomials: interpolate the two
    // coefficients from T(0), T(1) and confirm they reproduce T(2), T(3).
    // Across seeds every coefficient pair appears at the uniform rate.
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> coeffs;
    const int trials = 4096;
    for (int s = 0; s < trials; ++s) {
        const auto t =
            fill_tables_kwise(77000 + s, std::vector<std::uint64_t>{4}, 2, 2);
        const auto& tab = t.tables[0];
        const std::uint32_t c0 = tab[0];
        const std::uint32_t c1 = tab[0] ^ tab[1];
        CHECK(tab[2] == (c0 ^ f->mul(c1, 2)));
        CHECK(tab[3] == (c0 ^ f->mul(c1, 3)));
        ++coeffs[{c0, c1}];
    }
    REQUIRE(coeffs.size() == 16);
    // Binomial(4096, 1/16): mean 256, five sigma ~ 77.
    for (const auto& [pair, count] : coeffs) {
        CHECK(count > 178);
        CHECK(count < 334);
    }
}

TEST_CASE("fill_tables_kwise: rejects field widths above 16") {
    CHECK_THROWS_AS(
        fill_tables_kwise(1, std::vector<std::uint64_t>{1ULL << 17}, 2, 2),
        std::invalid_argument);
    CHECK_THROWS_AS(fill_tables_kwise(1, std::vector<std::uint64_t>{4}, 17, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(fill_tables_kwise(1, std::vector<std::uint64_t>{4}, 2, 0),
                    std::invalid_argument);
    // Width exactly 16 is fine.
    const auto ok =
        fill_tables_kwise(1, std::vector<std::uint64_t>{1ULL << 16}, 2, 2);
    CHECK(ok.tables[0].size() == 1ULL << 16);
}

TEST_CASE("Hasher: known cells XOR to the known value") {
    const auto spec = DerivationSpec::curve(2, 3);
    LookupTables t;
    t.ell = 3;
    t.tables = {std::vector<std::uint32_t>(6, 0),
                std::vector<std::uint32_t>(11, 0),
                std::vector<std::uint32_t>(16, 0)};
    t.tables[0][3] = 5;
    t.tables[1][8] = 6;
    t.tables[2][13] = 3;
    const Hasher h(spec, t);
    // Key (3,5) derives to (3, 8, 13), so h = 5 xor 6 xor 3 = 0.
    CHECK(h(Key{3, 5}) == 0u);
    CHECK(hash(h, Key{3, 5}) == 0u);
    // Moving one character changes exactly which cells are read.
    CHECK(h(Key{3, 4}) == 5u); // derives (3, 7, 11): only T0 cell is set
    CHECK(h(Key{0, 0}) == 0u);
    CHECK(h.lookups_per_key() == 3);
}

TEST_CASE("Hasher: all-zero tables hash everything to zero") {
    const auto spec = DerivationSpec::tz5();
    LookupTables t;
    t.ell = 4;
    t.tables = {std::vector<std::uint32_t>(8, 0),
                std::vector<std::uint32_t>(8, 0),
                std::vector<std::uint32_t>(15, 0)};
    const Hasher h(spec, t);
    auto eng = make_engine(20260819, 21);
    for (int i = 0; i < 50; ++i)
        CHECK(h(Key{draw_bits(eng, 3), draw_bits(eng, 3)}) == 0u);
}

TEST_CASE("Hasher: single-table function is plain table lookup") {
    const auto spec = DerivationSpec::identity(1);
    const auto t =
        fill_tables_random(5, std::vector<std::uint64_t>{32}, 8);
    const Hasher h(spec, t);
    for (Char x = 0; x < 32; ++x)
        CHECK(h(Key{x}) == t.tables[0][static_cast<std::size_t>(x)]);
}

TEST_CASE("hash_counted counts exactly d table reads on every path") {
    struct Case {
        DerivationSpec spec;
        Char n;
    };
    std::vector<Case> cases;
    cases.push_back({DerivationSpec::curve(2, 4), 16});
    cases.push_back({DerivationSpec::curve(3, 5), 8});
    cases.push_back({DerivationSpec::identity(3), 16});
    cases.push_back({DerivationSpec::tz5(), 16});
    // tz_linear: direct (c=4), packed (c=8), premultiplied (c=16).
    cases.push_back({DerivationSpec::tz_linear(shared_field(4), 3, 5), 16});
    cases.push_back({DerivationSpec::tz_linear(shared_field(8), 4, 16), 64});
    cases.push_back({DerivationSpec::tz_linear(shared_field(16), 2, 6), 256});
    auto eng = make_engine(20260819, 22);
    for (const auto& [spec, n] : cases) {
        const auto sizes = table_index_bounds(spec, n);
        const auto tabs = fill_tables_random(99, sizes, 10);
        const Hasher h(spec, tabs);
        std::uint64_t lookups = 0;
        std::uint64_t keys = 0;
        for (int iter = 0; iter < 25; ++iter, ++keys) {
            Key key;
            key.chars.resize(spec.q);
            for (int r = 0; r < spec.q; ++r)
                key.chars[r] = static_cast<Char>(
                    draw_bits(eng, 20) % static_cast<std::uint32_t>(n));
            const std::uint32_t plain = h(key);
            const std::uint64_t before = lookups;
            CHECK(h.hash_counted(key, lookups) == plain);
            CHECK(lookups - before == static_cast<std::uint64_t>(spec.d));
        }
        CHECK(lookups == keys * static_cast<std::uint64_t>(spec.d));
    }
}

TEST_CASE("Hasher constructor and evaluation validate their inputs") {
    const auto spec = DerivationSpec::curve(2, 3);
    LookupTables two;
    two.ell = 2;
    two.tables = {std::vector<std::uint32_t>(4, 0),
                  std::vector<std::uint32_t>(4, 0)};
    CHECK_THROWS_AS(Hasher(spec, two), std::invalid_argument);

    const auto small = fill_tables_random(
        3, std::vector<std::uint64_t>{4, 8}, 2);
    const Hasher h(DerivationSpec::curve(2, 2), small);
    CHECK_THROWS_AS(h(Key{5, 1}), std::out_of_range);  // derived 5 >= 4
    CHECK_THROWS_AS(h(Key{0, 9}), std::out_of_range);  // derived 9 >= 8
    CHECK_THROWS_AS(h(Key{-1, 0}), std::out_of_range); // negative index
    CHECK_THROWS_AS(h(Key{1}), std::invalid_argument); // arity
    CHECK(h(Key{3, 4}) ==
          (small.tables[0][3] ^ small.tables[1][7]));
}

TEST_CASE("serialization: round trip preserves tables") {
    const auto t = fill_tables_random(
        11, std::vector<std::uint64_t>{16, 1, 9}, 7);
    std::stringstream ss;
    save_tables(ss, t);
    const auto back = load_tables(ss);
    CHECK(back.ell == t.ell);
    CHECK(back.tables == t.tables);
}

TEST_CASE("serialization: exact byte layout") {
    LookupTables t;
    t.ell = 3;
    t.tables = {{5}, {6, 7}};
    std::stringstream ss;
    save_tables(ss, t);
    std::string expect = "TBH1";
    auto u64 = [&](std::uint64_t v) {
        for (int i = 0; i < 8; ++i)
            expect.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    auto u32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i)
            expect.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    u64(2); // number of tables
    u64(3); // ell
    u64(1); // length of table 0
    u64(2); // length of table 1
    u32(5);
    u32(6);
    u32(7);
    CHECK(ss.str() == expect);
    CHECK(ss.str().size() == 48u);
}

TEST_CASE("serialization: corrupt inputs are rejected") {
    LookupTables t;
    t.ell = 2;
    t.tables = {{1, 2}};
    std::stringstream good;
    save_tables(good, t);
    const std::string bytes = good.str();

    auto load_str = [](std::string s) {
        std::stringstream ss(std::move(s));
        return load_tables(ss);
    };

    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(load_str(bad_magic), std::runtime_error);

    std::string bad_ell = bytes;
    bad_ell[12] = 33; // ell field low byte
    CHECK_THROWS_AS(load_str(bad_ell), std::runtime_error);
    bad_ell[12] = 0;
    CHECK_THROWS_AS(load_str(bad_ell), std::runtime_error);

    std::string huge_d = bytes;
    huge_d[7] = 0x7f; // d = 0x7f00...0000000000
    CHECK_THROWS_AS(load_str(huge_d), std::runtime_error);

    CHECK_THROWS_AS(load_str(bytes.substr(0, bytes.size() - 2)),
                    std::runtime_error);
    CHECK_THROWS_AS(load_str(bytes.substr(0, 10)), std::runtime_error);

    std::string big_entry = bytes;
    big_entry[bytes.size() - 4] = 9; // entry 9 > 2^2 - 1
    CHECK_THROWS_AS(load_str(big_entry), std::runtime_error);
}

TEST_CASE("checksum_stream matches per-key hashing on every path") {
    auto eng = make_engine(20260819, 23);
    struct Case {
        DerivationSpec spec;
        std::uint32_t n;
    };
    std::vector<Case> cases;
    cases.push_back({DerivationSpec::curve(2, 3), 16});
    cases.push_back({DerivationSpec::curve(3, 4), 8});
    cases.push_back({DerivationSpec::identity(3), 16});
    cases.push_back({DerivationSpec::tz5(), 16});
    cases.push_back({DerivationSpec::tz_linear(shared_field(4), 3, 5), 16});
    cases.push_back({DerivationSpec::tz_linear(shared_field(8), 2, 10), 256});
    cases.push_back(
        {DerivationSpec::tz_linear(shared_field(16), 2, 3), 1u << 16});
    for (const auto& [spec, n] : cases) {
        const auto sizes = table_index_bounds(spec, n);
        const Hasher h(spec, fill_tables_random(4242, sizes, 16));
        const auto flat = random_stream(eng, spec.q, 300, n);
        check_stream_matches_pointwise(h, flat);
        CHECK(h.checksum_stream(std::vector<std::uint32_t>{}) == 0u);
    }
}

TEST_CASE("checksum_stream validates the stream up front") {
    const auto spec = DerivationSpec::curve(2, 2);
    const auto sizes = table_index_bounds(spec, 4);
    const Hasher h(spec, fill_tables_random(1, sizes, 4));
    CHECK_THROWS_AS(h.checksum_stream(std::vector<std::uint32_t>{1, 2, 3}),
                    std::invalid_argument); // length not a multiple of q
    CHECK_THROWS_AS(h.checksum_stream(std::vector<std::uint32_t>{9, 0}),
                    std::out_of_range); // character beyond table size

    const auto fspec = DerivationSpec::tz_linear(shared_field(2), 2, 3);
    const Hasher fh(fspec, fill_tables_random(2, table_index_bounds(fspec, 4),
                                              4));
    CHECK_THROWS_AS(fh.checksum_stream(std::vector<std::uint32_t>{4, 0}),
                    std::domain_error); // outside GF(4)

    const auto wide = DerivationSpec::curve(9, 9);
    const Hasher wh(wide, fill_tables_random(3, table_index_bounds(wide, 2),
                                             4));
    CHECK_THROWS_AS(
        wh.checksum_stream(std::vector<std::uint32_t>(9, 0)),
        std::invalid_argument); // q > 8 unsupported in the stream kernel
}
