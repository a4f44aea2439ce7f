#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace tabhash {

// GF(2^c) for 1 <= c <= 16, elements encoded as integers in [0, 2^c).
// Multiplication goes through log/antilog tables built once per field from a
// searched group generator, so the modulus only has to be irreducible, not
// primitive. mul_ref is the slow shift-xor reference used to build the
// tables; it stays public as the independent oracle for tests.
class BinaryField {
public:
    explicit BinaryField(int c);                       // default modulus
    BinaryField(int c, std::uint32_t irreducible);     // caller-chosen modulus

    int width() const { return c_; }
    std::uint32_t order() const { return order_; }     // 2^c
    std::uint32_t modulus() const { return irreducible_; }
    std::uint32_t generator() const { return generator_; }

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const;
    std::uint32_t mul_ref(std::uint32_t a, std::uint32_t b) const;
    std::uint32_t inv(std::uint32_t a) const;          // a != 0
    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const;

    // Default modulus for width c (degree-c irreducible polynomial with the
    // leading coefficient included in the encoding).
    static std::uint32_t default_modulus(int c);

private:
    int c_;
    std::uint32_t order_;
    std::uint32_t irreducible_;
    std::uint32_t generator_ = 0;
    std::vector<std::uint16_t> log_;  // index: element, log_[0] unused
    std::vector<std::uint16_t> exp_;  // doubled so mul never reduces mod ord-1

    void check_element(std::uint32_t a) const;
    void build_tables();
};

std::shared_ptr<const BinaryField> shared_field(int c);

// q x d matrix over `f` with entry (i, j) = alpha_j^i for alpha_j = j.
// Row 0 is all ones (0^0 = 1 here) and column 0 below row 0 is all zeros;
// any q columns form an invertible q x q matrix because the alpha_j are
// distinct. Requires d <= 2^c so the evaluation points exist.
std::vector<std::vector<std::uint32_t>>
build_vandermonde(const BinaryField& f, int q, int d);

} // namespace tabhash
