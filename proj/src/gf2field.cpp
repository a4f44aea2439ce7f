#include "tabhash/gf2field.hpp"

#include <bit>
#include <mutex>
#include <stdexcept>
#include <string>

namespace tabhash {

namespace {

// Minimal-weight irreducible polynomials, one per degree.
constexpr std::uint32_t kDefaultModulus[17] = {
    0,
    0x3,      // x + 1
    0x7,      // x^2 + x + 1
    0xB,      // x^3 + x + 1
    0x13,     // x^4 + x + 1
    0x25,     // x^5 + x^2 + 1
    0x43,     // x^6 + x + 1
    0x89,     // x^7 + x^3 + 1
    0x11B,    // x^8 + x^4 + x^3 + x + 1
    0x211,    // x^9 + x^4 + 1
    0x409,    // x^10 + x^3 + 1
    0x805,    // x^11 + x^2 + 1
    0x1053,   // x^12 + x^6 + x^4 + x + 1
    0x201B,   // x^13 + x^4 + x^3 + x + 1
    0x4443,   // x^14 + x^10 + x^6 + x + 1
    0x8003,   // x^15 + x + 1
    0x1100B,  // x^16 + x^12 + x^3 + x + 1
};

int poly_degree(std::uint32_t p) { return 31 - std::countl_zero(p); }

// Remainder of a modulo b, both GF(2) polynomials in binary encoding.
std::uint32_t poly_mod(std::uint64_t a, std::uint32_t b) {
    const int db = poly_degree(b);
    while (true) {
        const int da = a == 0 ? -1 : 63 - std::countl_zero(a);
        if (da < db) break;
        a ^= static_cast<std::uint64_t>(b) << (da - db);
    }
    return static_cast<std::uint32_t>(a);
}

bool is_irreducible(std::uint32_t p, int c) {
    // Exhaustive trial division by every polynomial of degree 1..c/2.
    for (int e = 1; 2 * e <= c; ++e) {
        for (std::uint32_t q = 1u << e; q < (2u << e); ++q) {
            if (poly_mod(p, q) == 0) return false;
        }
    }
    return true;
}

} // namespace

std::uint32_t BinaryField::default_modulus(int c) {
    if (c < 1 || c > 16)
        throw std::invalid_argument("BinaryField: width must be in [1, 16]");
    return kDefaultModulus[c];
}

BinaryField::BinaryField(int c) : BinaryField(c, default_modulus(c)) {}

BinaryField::BinaryField(int c, std::uint32_t irreducible)
    : c_(c), irreducible_(irreducible) {
    if (c < 1 || c > 16)
        throw std::invalid_argument("BinaryField: width must be in [1, 16]");
    order_ = 1u << c;
    if (poly_degree(irreducible) != c)
        throw std::invalid_argument(
            "BinaryField: modulus must have degree exactly " +
            std::to_string(c));
    if (!is_irreducible(irreducible, c))
        throw std::invalid_argument("BinaryField: modulus is reducible");
    build_tables();
}

std::uint32_t BinaryField::mul_ref(std::uint32_t a, std::uint32_t b) const {
    check_element(a);
    check_element(b);
    std::uint32_t acc = 0;
    while (b) {
        if (b & 1u) acc ^= a;
        b >>= 1;
        a <<= 1;
        if (a & order_) a ^= irreducible_;
    }
    return acc;
}

void BinaryField::build_tables() {
    const std::uint32_t n = order_ - 1; // multiplicative group order
    log_.assign(order_, 0);
    exp_.assign(n > 0 ? 2 * n : 1, 1);
    if (n == 1) { // GF(2): the group is trivial
        generator_ = 1;
        log_[1] = 0;
        exp_[0] = 1;
        return;
    }
    for (std::uint32_t g = 2; g < order_; ++g) {
        std::uint32_t x = 1;
        std::uint32_t i = 0;
        bool full_cycle = true;
        for (; i < n; ++i) {
            exp_[i] = static_cast<std::uint16_t>(x);
            log_[x] = static_cast<std::uint16_t>(i);
            x = mul_ref(x, g);
            if (x == 1 && i + 1 < n) { full_cycle = false; break; }
        }
        if (full_cycle && x == 1) {
            generator_ = g;
            for (std::uint32_t j = 0; j < n; ++j) exp_[n + j] = exp_[j];
            return;
        }
    }
    throw std::logic_error("BinaryField: no generator found (not a field?)");
}

void BinaryField::check_element(std::uint32_t a) const {
    if (a >= order_)
        throw std::domain_error("BinaryField: element " + std::to_string(a) +
                                " out of range for width " +
                                std::to_string(c_));
}

std::uint32_t BinaryField::mul(std::uint32_t a, std::uint32_t b) const {
    check_element(a);
    check_element(b);
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
}

std::uint32_t BinaryField::inv(std::uint32_t a) const {
    check_element(a);
    if (a == 0) throw std::domain_error("BinaryField: zero has no inverse");
    const std::uint32_t n = order_ - 1;
    return exp_[(n - log_[a]) % n];
}

std::uint32_t BinaryField::pow(std::uint32_t a, std::uint64_t e) const {
    check_element(a);
    std::uint32_t acc = 1;
    std::uint32_t base = a;
    while (e) {
        if (e & 1u) acc = mul(acc, base);
        base = mul(base, base);
        e >>= 1;
    }
    return acc;
}

std::shared_ptr<const BinaryField> shared_field(int c) {
    static std::mutex mu;
    static std::shared_ptr<const BinaryField> cache[17];
    std::lock_guard<std::mutex> lock(mu);
    if (c < 1 || c > 16)
        throw std::invalid_argument("shared_field: width must be in [1, 16]");
    if (!cache[c]) cache[c] = std::make_shared<BinaryField>(c);
    return cache[c];
}

std::vector<std::vector<std::uint32_t>>
build_vandermonde(const BinaryField& f, int q, int d) {
    if (q < 1 || d < 1)
        throw std::invalid_argument("build_vandermonde: q and d must be >= 1");
    if (static_cast<std::uint64_t>(d) > f.order())
        throw std::invalid_argument(
            "build_vandermonde: d exceeds field size (needs d distinct "
            "evaluation points)");
    std::vector<std::vector<std::uint32_t>> m(
        q, std::vector<std::uint32_t>(d, 0));
    for (int j = 0; j < d; ++j) {
        m[0][j] = 1; // alpha^0, including 0^0 = 1
        for (int i = 1; i < q; ++i)
            m[i][j] = f.mul(m[i - 1][j], static_cast<std::uint32_t>(j));
    }
    return m;
}

} // namespace tabhash
