#pragma once

#include <compare>
#include <cstdint>
#include <cstddef>
#include <optional>
#include <vector>

namespace tabhash {

// Column label of an incidence matrix: (table index, derived character).
struct ColLabel {
    int table = 0;
    std::int64_t value = 0;
    friend auto operator<=>(const ColLabel&, const ColLabel&) = default;
};

// Dense 0/1 matrix over GF(2), rows packed into 64-bit words.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t r, std::size_t c) const;
    void set(std::size_t r, std::size_t c, bool v);

    // XOR row `src` into row `dst` (in-place row operation).
    void xor_rows(std::size_t dst, std::size_t src);

    bool row_is_zero(std::size_t r) const;

    // Column labels; either empty or exactly cols() distinct entries.
    std::vector<ColLabel> col_labels;

private:
    std::size_t rows_ = 0, cols_ = 0, words_ = 0;
    std::vector<std::uint64_t> bits_;

    friend std::size_t rank(const BitMatrix& m);
    friend std::optional<std::vector<std::size_t>>
    find_dependent_rows(const BitMatrix& m);
};

// Rank over GF(2) via Gaussian elimination on a copy.
std::size_t rank(const BitMatrix& m);

// A nonempty set of row indices whose XOR is the zero vector, or nullopt if
// the rows are linearly independent. The witness is exact and deterministic.
std::optional<std::vector<std::size_t>> find_dependent_rows(const BitMatrix& m);

} // namespace tabhash
