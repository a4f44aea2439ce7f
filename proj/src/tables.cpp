#include "tabhash/tables.hpp"

#include "tabhash/rng.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace tabhash {

namespace {

constexpr std::uint64_t kSaltRandom = 0x7261'6e64'6f6d'3031ULL;
constexpr std::uint64_t kSaltKwise = 0x6b77'6973'6530'3131ULL;

void check_ell(int ell) {
    if (ell < 1 || ell > 32)
        throw std::invalid_argument("ell must be in [1, 32]");
}

int ceil_log2(std::uint64_t n) {
    if (n <= 1) return 0;
    return 64 - std::countl_zero(n - 1);
}

void write_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint64_t read_u64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8))
        throw std::runtime_error("load_tables: truncated header");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw std::runtime_error("load_tables: truncated entries");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

} // namespace

LookupTables fill_tables_random(std::uint64_t seed,
                                std::span<const std::uint64_t> sizes,
                                int ell) {
    check_ell(ell);
    LookupTables out;
    out.ell = ell;
    out.tables.resize(sizes.size());
    std::uint64_t total = 0;
    for (std::uint64_t s : sizes) total += s;
    const int n = static_cast<int>(sizes.size());
    // Each table has its own seed stream, so the parallel fill is
    // bit-identical to the serial one; tiny fills skip the parallel region.
    if (total >= (1u << 16)) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) {
            auto eng = make_engine(seed, kSaltRandom, i);
            auto& t = out.tables[i];
            t.resize(sizes[i]);
            for (auto& cell : t) cell = draw_bits(eng, ell);
        }
    } else {
        for (int i = 0; i < n; ++i) {
            auto eng = make_engine(seed, kSaltRandom, i);
            auto& t = out.tables[i];
            t.resize(sizes[i]);
            for (auto& cell : t) cell = draw_bits(eng, ell);
        }
    }
    return out;
}

LookupTables fill_tables_kwise(std::uint64_t seed,
                               std::span<const std::uint64_t> sizes, int ell,
                               int k) {
    check_ell(ell);
    if (k < 1) throw std::invalid_argument("fill_tables_kwise: k must be >= 1");
    LookupTables out;
    out.ell = ell;
    out.tables.resize(sizes.size());
    const std::uint32_t mask =
        ell >= 32 ? 0xffffffffu : ((1u << ell) - 1u);
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const int b = std::max(ell, ceil_log2(sizes[i]));
        if (b > 16)
            throw std::invalid_argument(
                "fill_tables_kwise: table " + std::to_string(i) +
                " needs field width " + std::to_string(b) +
                " > 16; use fill_tables_random for wide tables");
        auto f = shared_field(std::max(b, 1));
        auto eng = make_engine(seed, kSaltKwise, i);
        std::vector<std::uint32_t> coeff(k);
        for (auto& c : coeff) c = draw_bits(eng, std::max(b, 1));
        auto& t = out.tables[i];
        t.resize(sizes[i]);
        for (std::uint64_t x = 0; x < sizes[i]; ++x) {
            std::uint32_t acc = 0;
            for (int r = k - 1; r >= 0; --r)
                acc = f->mul(acc, static_cast<std::uint32_t>(x)) ^ coeff[r];
            t[x] = acc & mask;
        }
    }
    return out;
}

void save_tables(std::ostream& os, const LookupTables& t) {
    os.write("TBH1", 4);
    write_u64(os, t.tables.size());
    write_u64(os, static_cast<std::uint64_t>(t.ell));
    for (const auto& table : t.tables) write_u64(os, table.size());
    for (const auto& table : t.tables)
        for (std::uint32_t v : table) write_u32(os, v);
    if (!os) throw std::runtime_error("save_tables: write failed");
}

LookupTables load_tables(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::string(magic, 4) != "TBH1")
        throw std::runtime_error("load_tables: bad magic (expected TBH1)");
    const std::uint64_t d = read_u64(is);
    const std::uint64_t ell = read_u64(is);
    if (ell < 1 || ell > 32)
        throw std::runtime_error("load_tables: ell out of range");
    if (d > (1u << 20))
        throw std::runtime_error("load_tables: implausible table count");
    LookupTables out;
    out.ell = static_cast<int>(ell);
    std::vector<std::uint64_t> lengths(d);
    for (auto& len : lengths) len = read_u64(is);
    const std::uint64_t limit =
        ell >= 32 ? 0xffffffffULL : ((1ULL << ell) - 1);
    out.tables.resize(d);
    for (std::uint64_t i = 0; i < d; ++i) {
        out.tables[i].resize(lengths[i]);
        for (auto& v : out.tables[i]) {
            v = read_u32(is);
            if (v > limit)
                throw std::runtime_error(
                    "load_tables: entry exceeds 2^ell - 1");
        }
    }
    return out;
}

Hasher::Hasher(DerivationSpec spec, LookupTables tables)
    : spec_(std::move(spec)), tables_(std::move(tables)) {
    if (static_cast<int>(tables_.tables.size()) != spec_.d)
        throw std::invalid_argument(
            "Hasher: expected " + std::to_string(spec_.d) + " tables, got " +
            std::to_string(tables_.tables.size()));
    if (spec_.variant == Variant::tz_linear && spec_.field->width() == 8 &&
        spec_.d <= 64)
        build_pack();
    else if (spec_.variant == Variant::tz_linear &&
             spec_.field->width() == 16)
        build_premul();
}

void Hasher::build_premul() {
    const BinaryField& f = *spec_.field;
    premul_.assign(static_cast<std::size_t>(spec_.q) * spec_.d,
                   std::vector<std::uint32_t>(f.order(), 0));
    for (int i = 0; i < spec_.q; ++i)
        for (int j = 0; j < spec_.d; ++j) {
            auto& t = premul_[static_cast<std::size_t>(i) * spec_.d + j];
            for (std::uint32_t x = 0; x < f.order(); ++x)
                t[x] = f.mul(x, spec_.matrix[i][j]);
        }
}

void Hasher::build_pack() {
    const BinaryField& f = *spec_.field;
    pack_words_ = (spec_.d + 7) / 8;
    pack_.assign(spec_.q,
                 std::vector<std::uint64_t>(256ULL * pack_words_, 0));
    for (int i = 0; i < spec_.q; ++i) {
        for (std::uint32_t x = 0; x < 256; ++x) {
            for (int j = 0; j < spec_.d; ++j) {
                const std::uint64_t byte = f.mul(x, spec_.matrix[i][j]);
                pack_[i][x * pack_words_ + j / 8] |=
                    byte << (8 * (j % 8));
            }
        }
    }
}

template <bool Counted>
std::uint32_t Hasher::eval(const Key& key, std::uint64_t* lookups) const {
    const auto& tt = tables_.tables;
    auto read = [&](int i, Char v) -> std::uint32_t {
        if (v < 0 || static_cast<std::uint64_t>(v) >= tt[i].size())
            throw std::out_of_range(
                "hash: derived character " + std::to_string(v) +
                " out of range for table " + std::to_string(i) +
                " of length " + std::to_string(tt[i].size()) +
                " (mis-sized tables?)");
        if constexpr (Counted) ++*lookups;
        return tt[i][static_cast<std::size_t>(v)];
    };
    std::uint32_t h = 0;
    switch (spec_.variant) {
    case Variant::curve: {
        if (static_cast<int>(key.chars.size()) != spec_.q)
            throw std::invalid_argument("hash: key arity mismatch");
        if (spec_.q == 2) {
            Char v = key.chars[0];
            const Char step = key.chars[1];
            for (int i = 0; i < spec_.d; ++i) {
                h ^= read(i, v);
                if (__builtin_add_overflow(v, step, &v))
                    throw std::overflow_error("hash: curve overflow");
            }
        } else {
            for (int i = 0; i < spec_.d; ++i) {
                Char acc = 0;
                for (int r = spec_.q - 1; r >= 0; --r) {
                    if (__builtin_mul_overflow(acc, i, &acc) ||
                        __builtin_add_overflow(acc, key.chars[r], &acc))
                        throw std::overflow_error("hash: curve overflow");
                }
                h ^= read(i, acc);
            }
        }
        return h;
    }
    case Variant::identity: {
        if (static_cast<int>(key.chars.size()) != spec_.q)
            throw std::invalid_argument("hash: key arity mismatch");
        for (int i = 0; i < spec_.q; ++i) h ^= read(i, key.chars[i]);
        return h;
    }
    case Variant::tz5: {
        if (key.chars.size() != 2)
            throw std::invalid_argument("hash: key arity mismatch");
        h ^= read(0, key.chars[0]);
        h ^= read(1, key.chars[1]);
        Char sum;
        if (__builtin_add_overflow(key.chars[0], key.chars[1], &sum))
            throw std::overflow_error("hash: tz5 overflow");
        h ^= read(2, sum);
        return h;
    }
    case Variant::tz_linear: {
        if (static_cast<int>(key.chars.size()) != spec_.q)
            throw std::invalid_argument("hash: key arity mismatch");
        const BinaryField& f = *spec_.field;
        for (int i = 0; i < spec_.q; ++i) {
            const Char x = key.chars[i];
            if (x < 0 || static_cast<std::uint64_t>(x) >= f.order())
                throw std::domain_error(
                    "hash: character outside field range");
        }
        if (pack_words_ > 0) {
            std::uint64_t acc[8] = {0}; // d <= 64 in the packed path
            for (int i = 0; i < spec_.q; ++i) {
                const std::uint64_t* row =
                    &pack_[i][static_cast<std::size_t>(key.chars[i]) *
                              pack_words_];
                for (int w = 0; w < pack_words_; ++w) acc[w] ^= row[w];
            }
            for (int j = 0; j < spec_.d; ++j)
                h ^= read(j, (acc[j / 8] >> (8 * (j % 8))) & 0xff);
        } else if (!premul_.empty()) {
            for (int j = 0; j < spec_.d; ++j) {
                std::uint32_t v = 0;
                for (int i = 0; i < spec_.q; ++i)
                    v ^= premul_[static_cast<std::size_t>(i) * spec_.d + j]
                                [static_cast<std::size_t>(key.chars[i])];
                h ^= read(j, v);
            }
        } else {
            for (int j = 0; j < spec_.d; ++j) {
                std::uint32_t v = 0;
                for (int i = 0; i < spec_.q; ++i)
                    v ^= f.mul(static_cast<std::uint32_t>(key.chars[i]),
                               spec_.matrix[i][j]);
                h ^= read(j, v);
            }
        }
        return h;
    }
    }
    throw std::logic_error("hash: unknown variant");
}

std::uint32_t Hasher::operator()(const Key& key) const {
    return eval<false>(key, nullptr);
}

std::uint32_t Hasher::hash_counted(const Key& key,
                                   std::uint64_t& lookups) const {
    return eval<true>(key, &lookups);
}

std::uint32_t
Hasher::checksum_stream(std::span<const std::uint32_t> flat) const {
    const int q = spec_.q;
    const int d = spec_.d;
    if (flat.size() % q != 0)
        throw std::invalid_argument(
            "checksum_stream: stream length not a multiple of q");
    const std::size_t nkeys = flat.size() / q;
    const auto& tt = tables_.tables;

    // Validate the whole stream once: the per-position character maxima
    // bound every derived index the loops below can produce.
    std::uint32_t mx[8] = {0};
    if (q > 8) throw std::invalid_argument("checksum_stream: q > 8");
    for (std::size_t i = 0; i < flat.size(); ++i) {
        const int pos = static_cast<int>(i % q);
        mx[pos] = std::max(mx[pos], flat[i]);
    }
    auto require = [&](int table, std::uint64_t max_index) {
        if (max_index >= tt[table].size())
            throw std::out_of_range(
                "checksum_stream: derived character " +
                std::to_string(max_index) + " out of range for table " +
                std::to_string(table) + " (mis-sized tables?)");
    };

    std::uint32_t acc = 0;
    switch (spec_.variant) {
    case Variant::curve: {
        if (q == 2) {
            for (int i = 0; i < d; ++i)
                require(i, static_cast<std::uint64_t>(mx[0]) +
                               static_cast<std::uint64_t>(mx[1]) * i);
            const std::uint32_t* p = flat.data();
            for (std::size_t key = 0; key < nkeys; ++key, p += 2) {
                std::uint64_t v = p[0];
                const std::uint64_t b = p[1];
                std::uint32_t h = 0;
                for (int i = 0; i < d; ++i) {
                    h ^= tt[i][v];
                    v += b;
                }
                acc ^= h;
            }
        } else {
            for (int i = 0; i < d; ++i) {
                std::uint64_t bound = 0, pw = 1;
                for (int r = 0; r < q; ++r) {
                    bound += mx[r] * pw;
                    pw *= static_cast<std::uint64_t>(i);
                }
                require(i, bound);
            }
            const std::uint32_t* p = flat.data();
            for (std::size_t key = 0; key < nkeys; ++key, p += q) {
                std::uint32_t h = 0;
                for (int i = 0; i < d; ++i) {
                    std::uint64_t v = 0;
                    for (int r = q - 1; r >= 0; --r) v = v * i + p[r];
                    h ^= tt[i][v];
                }
                acc ^= h;
            }
        }
        return acc;
    }
    case Variant::identity: {
        for (int i = 0; i < q; ++i) require(i, mx[i]);
        const std::uint32_t* p = flat.data();
        for (std::size_t key = 0; key < nkeys; ++key, p += q) {
            std::uint32_t h = 0;
            for (int i = 0; i < q; ++i) h ^= tt[i][p[i]];
            acc ^= h;
        }
        return acc;
    }
    case Variant::tz5: {
        require(0, mx[0]);
        require(1, mx[1]);
        require(2, static_cast<std::uint64_t>(mx[0]) + mx[1]);
        const std::uint32_t* p = flat.data();
        for (std::size_t key = 0; key < nkeys; ++key, p += 2)
            acc ^= tt[0][p[0]] ^ tt[1][p[1]] ^
                   tt[2][static_cast<std::uint64_t>(p[0]) + p[1]];
        return acc;
    }
    case Variant::tz_linear: {
        const BinaryField& f = *spec_.field;
        for (int i = 0; i < q; ++i)
            if (mx[i] >= f.order())
                throw std::domain_error(
                    "checksum_stream: character outside field range");
        for (int j = 0; j < d; ++j) require(j, f.order() - 1);
        const std::uint32_t* p = flat.data();
        if (pack_words_ > 0) {
            const int w = pack_words_;
            for (std::size_t key = 0; key < nkeys; ++key, p += q) {
                std::uint64_t accw[8] = {0};
                for (int i = 0; i < q; ++i) {
                    const std::uint64_t* row =
                        &pack_[i][static_cast<std::size_t>(p[i]) * w];
                    for (int ww = 0; ww < w; ++ww) accw[ww] ^= row[ww];
                }
                std::uint32_t h = 0;
                for (int j = 0; j < d; ++j)
                    h ^= tt[j][(accw[j / 8] >> (8 * (j % 8))) & 0xff];
                acc ^= h;
            }
        } else if (!premul_.empty()) {
            for (std::size_t key = 0; key < nkeys; ++key, p += q) {
                std::uint32_t h = 0;
                for (int j = 0; j < d; ++j) {
                    std::uint32_t v = 0;
                    for (int i = 0; i < q; ++i)
                        v ^= premul_[static_cast<std::size_t>(i) * d + j][p[i]];
                    h ^= tt[j][v];
                }
                acc ^= h;
            }
        } else {
            for (std::size_t key = 0; key < nkeys; ++key, p += q) {
                std::uint32_t h = 0;
                for (int j = 0; j < d; ++j) {
                    std::uint32_t v = 0;
                    for (int i = 0; i < q; ++i)
                        v ^= f.mul(p[i], spec_.matrix[i][j]);
                    h ^= tt[j][v];
                }
                acc ^= h;
            }
        }
        return acc;
    }
    }
    throw std::logic_error("checksum_stream: unknown variant");
}

} // namespace tabhash
