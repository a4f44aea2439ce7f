#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tabhash/derivation.hpp"
#include "tabhash/gf2field.hpp"
#include "tabhash/rng.hpp"

#include <set>
#include <stdexcept>
#include <vector>

using namespace tabhash;

namespace {

Key random_key(std::mt19937_64& eng, int q, Char n) {
    Key key;
    key.chars.resize(q);
    for (int r = 0; r < q; ++r)
        key.chars[r] = static_cast<Char>(draw_bits(eng, 16) %
                                         static_cast<std::uint32_t>(n));
    return key;
}

} // namespace

TEST_CASE("curve derivation: fixed examples") {
    const auto spec = DerivationSpec::curve(2, 3);
    CHECK(derive(spec, Key{3, 5}).values == std::vector<Char>{3, 8, 13});
    CHECK(derive(spec, Key{0, 0}).values == std::vector<Char>{0, 0, 0});

    const auto spec3 = DerivationSpec::curve(3, 3);
    CHECK(derive(spec3, Key{1, 2, 3}).values[2] == 17); // 1 + 2*2 + 3*4

    const auto spec22 = DerivationSpec::curve(2, 2);
    CHECK(derive(spec22, Key{1, 1}).values == std::vector<Char>{1, 2});
}

TEST_CASE("curve q=2: consecutive derived characters differ by the slope") {
    auto eng = make_engine(20260819, 10);
    for (int d : {1, 2, 3, 5, 8}) {
        const auto spec = DerivationSpec::curve(2, d);
        for (int iter = 0; iter < 100; ++iter) {
            const Key key = random_key(eng, 2, 1000);
            const DerivedKey dk = derive(spec, key);
            for (int i = 1; i < d; ++i)
                CHECK(dk.values[i] - dk.values[i - 1] == key.chars[1]);
        }
    }
}

TEST_CASE("curve derivation overflow is reported, not wrapped") {
    const auto spec = DerivationSpec::curve(2, 3);
    const Char big = std::int64_t{1} << 62;
    CHECK_THROWS_AS(derive(spec, Key{big, big}), std::overflow_error);
    // Large but safe values still work.
    CHECK(derive(spec, Key{big, 0}).values ==
          std::vector<Char>{big, big, big});
}

TEST_CASE("tz derivation: fixed G over GF(4)") {
    const auto f = shared_field(2);
    const auto spec = DerivationSpec::tz_linear(f, 2, 3);
    REQUIRE(spec.matrix ==
            std::vector<std::vector<std::uint32_t>>{{1, 1, 1}, {0, 1, 2}});
    CHECK(derive(spec, Key{1, 1}).values == std::vector<Char>{1, 0, 3});
    CHECK(derive(spec, Key{0, 0}).values == std::vector<Char>{0, 0, 0});
    CHECK(derive(spec, Key{2, 0}).values == std::vector<Char>{2, 2, 2});
    // Derived character 0 is always input character 0.
    auto eng = make_engine(20260819, 11);
    for (int iter = 0; iter < 50; ++iter) {
        const Key key = random_key(eng, 2, 4);
        CHECK(derive(spec, key).values[0] == key.chars[0]);
    }
    CHECK_THROWS_AS(derive(spec, Key{4, 0}), std::domain_error);
}

TEST_CASE("tz derivation is XOR-linear in the key") {
    const auto f = shared_field(4);
    const auto spec = DerivationSpec::tz_linear(f, 3, 5);
    auto eng = make_engine(20260819, 12);
    for (int iter = 0; iter < 200; ++iter) {
        const Key x = random_key(eng, 3, 16);
        const Key y = random_key(eng, 3, 16);
        Key xy;
        xy.chars.resize(3);
        for (int r = 0; r < 3; ++r) xy.chars[r] = x.chars[r] ^ y.chars[r];
        const DerivedKey dx = derive(spec, x);
        const DerivedKey dy = derive(spec, y);
        const DerivedKey dxy = derive(spec, xy);
        for (int j = 0; j < 5; ++j)
            CHECK(dxy.values[j] == (dx.values[j] ^ dy.values[j]));
    }
}

TEST_CASE("tz5 derivation: fixed examples") {
    const auto spec = DerivationSpec::tz5();
    CHECK(spec.q == 2);
    CHECK(spec.d == 3);
    CHECK(derive(spec, Key{4, 7}).values == std::vector<Char>{4, 7, 11});
    CHECK(derive(spec, Key{0, 0}).values == std::vector<Char>{0, 0, 0});
    CHECK(derive(spec, Key{1, 0}).values == std::vector<Char>{1, 0, 1});
    CHECK(derive(spec, Key{2, 3}).values == std::vector<Char>{2, 3, 5});
}

TEST_CASE("identity derivation returns the characters themselves") {
    const auto spec = DerivationSpec::identity(3);
    CHECK(spec.d == 3);
    CHECK(derive(spec, Key{7, 8, 9}).values == std::vector<Char>{7, 8, 9});
}

TEST_CASE("arity is validated") {
    const auto spec = DerivationSpec::curve(2, 3);
    CHECK_THROWS_AS(derive(spec, Key{1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(derive(spec, Key{1}), std::invalid_argument);
}

TEST_CASE("table_index_bounds: fixed examples") {
    CHECK(table_index_bounds(DerivationSpec::curve(2, 3), 4) ==
          std::vector<std::uint64_t>{4, 7, 10});
    CHECK(table_index_bounds(DerivationSpec::identity(2), 16) ==
          std::vector<std::uint64_t>{16, 16});
    CHECK(table_index_bounds(DerivationSpec::tz5(), 8) ==
          std::vector<std::uint64_t>{8, 8, 15});
}

TEST_CASE("table_index_bounds dominate every derived character") {
    auto eng = make_engine(20260819, 13);
    std::vector<DerivationSpec> specs;
    specs.push_back(DerivationSpec::curve(2, 4));
    specs.push_back(DerivationSpec::curve(3, 5));
    specs.push_back(DerivationSpec::identity(2));
    specs.push_back(DerivationSpec::tz5());
    specs.push_back(DerivationSpec::tz_linear(shared_field(4), 2, 5));
    for (const auto& spec : specs) {
        const Char n = spec.variant == Variant::tz_linear ? 16 : 9;
        const auto bounds = table_index_bounds(spec, n);
        REQUIRE(bounds.size() == static_cast<std::size_t>(spec.d));
        for (int iter = 0; iter < 300; ++iter) {
            const Key key = random_key(eng, spec.q, n);
            const DerivedKey dk = derive(spec, key);
            for (int i = 0; i < spec.d; ++i) {
                CHECK(dk.values[i] >= 0);
                CHECK(static_cast<std::uint64_t>(dk.values[i]) < bounds[i]);
            }
        }
    }
}

TEST_CASE("distinct keys derive distinctly when d >= q") {
    auto eng = make_engine(20260819, 14);
    std::vector<DerivationSpec> specs;
    specs.push_back(DerivationSpec::curve(2, 2));
    specs.push_back(DerivationSpec::curve(3, 3));
    specs.push_back(DerivationSpec::tz_linear(shared_field(3), 2, 4));
    for (const auto& spec : specs) {
        const Char n = spec.variant == Variant::tz_linear ? 8 : 9;
        std::set<Key> keys;
        while (keys.size() < 40u) keys.insert(random_key(eng, spec.q, n));
        std::set<DerivedKey> derived;
        for (const Key& key : keys) derived.insert(derive(spec, key));
        CHECK(derived.size() == keys.size());
    }
}

TEST_CASE("spec factories validate their parameters") {
    CHECK_THROWS_AS(DerivationSpec::curve(1, 3), std::invalid_argument);
    CHECK_THROWS_AS(DerivationSpec::curve(2, 0), std::invalid_argument);
    CHECK_THROWS_AS(DerivationSpec::identity(0), std::invalid_argument);
    CHECK_THROWS_AS(DerivationSpec::tz_linear(shared_field(2), 2, 5),
                    std::invalid_argument); // d exceeds field size
    CHECK_THROWS_AS(
        DerivationSpec::tz_linear_matrix(shared_field(2), {{1, 1}, {0}}),
        std::invalid_argument); // ragged matrix
}
