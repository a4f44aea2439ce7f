#include "tabhash/bitmatrix.hpp"

#include <stdexcept>

namespace tabhash {

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), words_((cols + 63) / 64),
      bits_(rows * ((cols + 63) / 64), 0) {}

bool BitMatrix::get(std::size_t r, std::size_t c) const {
    if (r >= rows_ || c >= cols_)
        throw std::out_of_range("BitMatrix::get: index out of range");
    return (bits_[r * words_ + c / 64] >> (c % 64)) & 1u;
}

void BitMatrix::set(std::size_t r, std::size_t c, bool v) {
    if (r >= rows_ || c >= cols_)
        throw std::out_of_range("BitMatrix::set: index out of range");
    std::uint64_t& w = bits_[r * words_ + c / 64];
    const std::uint64_t mask = 1ULL << (c % 64);
    if (v)
        w |= mask;
    else
        w &= ~mask;
}

void BitMatrix::xor_rows(std::size_t dst, std::size_t src) {
    if (dst >= rows_ || src >= rows_)
        throw std::out_of_range("BitMatrix::xor_rows: index out of range");
    for (std::size_t w = 0; w < words_; ++w)
        bits_[dst * words_ + w] ^= bits_[src * words_ + w];
}

bool BitMatrix::row_is_zero(std::size_t r) const {
    if (r >= rows_)
        throw std::out_of_range("BitMatrix::row_is_zero: index out of range");
    for (std::size_t w = 0; w < words_; ++w)
        if (bits_[r * words_ + w] != 0) return false;
    return true;
}

std::size_t rank(const BitMatrix& m) {
    if (m.rows_ == 0 || m.cols_ == 0) return 0;
    std::vector<std::uint64_t> a(m.bits_);
    const std::size_t words = m.words_;
    std::size_t rk = 0;
    for (std::size_t c = 0; c < m.cols_ && rk < m.rows_; ++c) {
        const std::size_t w = c / 64;
        const std::uint64_t mask = 1ULL << (c % 64);
        std::size_t pivot = rk;
        while (pivot < m.rows_ && !(a[pivot * words + w] & mask)) ++pivot;
        if (pivot == m.rows_) continue;
        if (pivot != rk)
            for (std::size_t i = 0; i < words; ++i)
                std::swap(a[pivot * words + i], a[rk * words + i]);
        for (std::size_t r = 0; r < m.rows_; ++r) {
            if (r == rk) continue;
            if (a[r * words + w] & mask)
                for (std::size_t i = 0; i < words; ++i)
                    a[r * words + i] ^= a[rk * words + i];
        }
        ++rk;
    }
    return rk;
}

std::optional<std::vector<std::size_t>>
find_dependent_rows(const BitMatrix& m) {
    if (m.rows_ == 0) return std::nullopt;
    // Augment each row with an identity block tracking which original rows
    // have been XORed into it; a row that reduces to zero yields its
    // combination as a dependency witness.
    const std::size_t words = m.words_;
    const std::size_t idw = (m.rows_ + 63) / 64;
    std::vector<std::uint64_t> a(m.bits_);
    std::vector<std::uint64_t> combo(m.rows_ * idw, 0);
    for (std::size_t r = 0; r < m.rows_; ++r)
        combo[r * idw + r / 64] |= 1ULL << (r % 64);

    std::size_t rk = 0;
    std::vector<std::size_t> row_of(m.rows_); // elimination order bookkeeping
    for (std::size_t r = 0; r < m.rows_; ++r) row_of[r] = r;

    for (std::size_t c = 0; c < m.cols_ && rk < m.rows_; ++c) {
        const std::size_t w = c / 64;
        const std::uint64_t mask = 1ULL << (c % 64);
        std::size_t pivot = rk;
        while (pivot < m.rows_ && !(a[pivot * words + w] & mask)) ++pivot;
        if (pivot == m.rows_) continue;
        if (pivot != rk) {
            for (std::size_t i = 0; i < words; ++i)
                std::swap(a[pivot * words + i], a[rk * words + i]);
            for (std::size_t i = 0; i < idw; ++i)
                std::swap(combo[pivot * idw + i], combo[rk * idw + i]);
        }
        for (std::size_t r = rk + 1; r < m.rows_; ++r) {
            if (a[r * words + w] & mask) {
                for (std::size_t i = 0; i < words; ++i)
                    a[r * words + i] ^= a[rk * words + i];
                for (std::size_t i = 0; i < idw; ++i)
                    combo[r * idw + i] ^= combo[rk * idw + i];
            }
        }
        ++rk;
    }

    for (std::size_t r = 0; r < m.rows_; ++r) {
        bool zero = true;
        for (std::size_t i = 0; i < words; ++i)
            if (a[r * words + i] != 0) { zero = false; break; }
        if (!zero) continue;
        std::vector<std::size_t> witness;
        for (std::size_t j = 0; j < m.rows_; ++j)
            if ((combo[r * idw + j / 64] >> (j % 64)) & 1u)
                witness.push_back(j);
        if (!witness.empty()) return witness;
    }
    return std::nullopt;
}

} // namespace tabhash
