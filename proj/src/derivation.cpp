#include "tabhash/derivation.hpp"

#include <stdexcept>
#include <string>

namespace tabhash {

namespace {

Char checked_add(Char a, Char b) {
    Char r;
    if (__builtin_add_overflow(a, b, &r))
        throw std::overflow_error("derive: integer overflow in addition");
    return r;
}

Char checked_mul(Char a, Char b) {
    Char r;
    if (__builtin_mul_overflow(a, b, &r))
        throw std::overflow_error("derive: integer overflow in multiplication");
    return r;
}

void check_arity(const Key& key, int q, const char* who) {
    if (static_cast<int>(key.chars.size()) != q)
        throw std::invalid_argument(std::string(who) + ": key has " +
                                    std::to_string(key.chars.size()) +
                                    " characters, expected " +
                                    std::to_string(q));
}

} // namespace

DerivationSpec DerivationSpec::curve(int q, int d) {
    if (q < 2) throw std::invalid_argument("curve: q must be >= 2");
    if (d < 1) throw std::invalid_argument("curve: d must be >= 1");
    DerivationSpec s;
    s.variant = Variant::curve;
    s.q = q;
    s.d = d;
    return s;
}

DerivationSpec DerivationSpec::identity(int q) {
    if (q < 1) throw std::invalid_argument("identity: q must be >= 1");
    DerivationSpec s;
    s.variant = Variant::identity;
    s.q = q;
    s.d = q;
    return s;
}

DerivationSpec DerivationSpec::tz5() {
    DerivationSpec s;
    s.variant = Variant::tz5;
    s.q = 2;
    s.d = 3;
    return s;
}

DerivationSpec DerivationSpec::tz_linear(
    std::shared_ptr<const BinaryField> f, int q, int d) {
    if (!f) throw std::invalid_argument("tz_linear: field required");
    return tz_linear_matrix(f, build_vandermonde(*f, q, d));
}

DerivationSpec DerivationSpec::tz_linear_matrix(
    std::shared_ptr<const BinaryField> f,
    std::vector<std::vector<std::uint32_t>> m) {
    if (!f) throw std::invalid_argument("tz_linear: field required");
    if (m.empty() || m[0].empty())
        throw std::invalid_argument("tz_linear: matrix must be nonempty");
    const std::size_t d = m[0].size();
    for (const auto& row : m) {
        if (row.size() != d)
            throw std::invalid_argument("tz_linear: ragged matrix");
        for (std::uint32_t v : row)
            if (v >= f->order())
                throw std::invalid_argument(
                    "tz_linear: matrix entry out of field range");
    }
    DerivationSpec s;
    s.variant = Variant::tz_linear;
    s.q = static_cast<int>(m.size());
    s.d = static_cast<int>(d);
    s.field = std::move(f);
    s.matrix = std::move(m);
    return s;
}

DerivedKey derive_curve(const Key& key, int d) {
    if (key.chars.size() < 2)
        throw std::invalid_argument("derive_curve: q must be >= 2");
    DerivedKey out;
    out.values.resize(d);
    DerivationSpec s = DerivationSpec::curve(
        static_cast<int>(key.chars.size()), d);
    derive_into(s, key, out.values);
    return out;
}

DerivedKey derive_tz(const Key& key, const DerivationSpec& spec) {
    if (spec.variant != Variant::tz_linear)
        throw std::invalid_argument("derive_tz: spec is not tz_linear");
    DerivedKey out;
    out.values.resize(spec.d);
    derive_into(spec, key, out.values);
    return out;
}

DerivedKey derive_tz5(const Key& key) {
    DerivedKey out;
    out.values.resize(3);
    derive_into(DerivationSpec::tz5(), key, out.values);
    return out;
}

DerivedKey derive(const DerivationSpec& spec, const Key& key) {
    DerivedKey out;
    out.values.resize(spec.d);
    derive_into(spec, key, out.values);
    return out;
}

void derive_into(const DerivationSpec& spec, const Key& key,
                 std::span<Char> out) {
    if (static_cast<int>(out.size()) != spec.d)
        throw std::invalid_argument("derive_into: output span has wrong size");
    switch (spec.variant) {
    case Variant::curve: {
        check_arity(key, spec.q, "derive_curve");
        for (int i = 0; i < spec.d; ++i) {
            // Horner evaluation of sum_r a_r * i^r at z = i.
            Char acc = 0;
            for (int r = spec.q - 1; r >= 0; --r)
                acc = checked_add(checked_mul(acc, i), key.chars[r]);
            out[i] = acc;
        }
        return;
    }
    case Variant::identity: {
        check_arity(key, spec.q, "derive(identity)");
        for (int i = 0; i < spec.q; ++i) out[i] = key.chars[i];
        return;
    }
    case Variant::tz5: {
        check_arity(key, 2, "derive_tz5");
        out[0] = key.chars[0];
        out[1] = key.chars[1];
        out[2] = checked_add(key.chars[0], key.chars[1]);
        return;
    }
    case Variant::tz_linear: {
        check_arity(key, spec.q, "derive_tz");
        const BinaryField& f = *spec.field;
        for (int i = 0; i < spec.q; ++i) {
            const Char x = key.chars[i];
            if (x < 0 || static_cast<std::uint64_t>(x) >= f.order())
                throw std::domain_error(
                    "derive_tz: character " + std::to_string(x) +
                    " outside field of width " + std::to_string(f.width()));
        }
        for (int j = 0; j < spec.d; ++j) {
            std::uint32_t acc = 0;
            for (int i = 0; i < spec.q; ++i)
                acc ^= f.mul(static_cast<std::uint32_t>(key.chars[i]),
                             spec.matrix[i][j]);
            out[j] = acc;
        }
        return;
    }
    }
    throw std::logic_error("derive_into: unknown variant");
}

std::vector<std::uint64_t> table_index_bounds(const DerivationSpec& spec,
                                              std::int64_t n) {
    if (n < 1) throw std::invalid_argument("table_index_bounds: n must be >= 1");
    std::vector<std::uint64_t> bounds(spec.d, 0);
    switch (spec.variant) {
    case Variant::curve: {
        for (int i = 0; i < spec.d; ++i) {
            // max over [n]^q is attained at the all-(n-1) key since every
            // i^r is non-negative.
            Char pw = 1, sum = 0;
            for (int r = 0; r < spec.q; ++r) {
                sum = checked_add(sum, pw);
                pw = checked_mul(pw, i);
            }
            bounds[i] = static_cast<std::uint64_t>(
                checked_add(1, checked_mul(n - 1, sum)));
        }
        return bounds;
    }
    case Variant::identity: {
        for (int i = 0; i < spec.d; ++i)
            bounds[i] = static_cast<std::uint64_t>(n);
        return bounds;
    }
    case Variant::tz5: {
        bounds[0] = static_cast<std::uint64_t>(n);
        bounds[1] = static_cast<std::uint64_t>(n);
        bounds[2] = static_cast<std::uint64_t>(2 * n - 1);
        return bounds;
    }
    case Variant::tz_linear: {
        const BinaryField& f = *spec.field;
        if (static_cast<std::uint64_t>(n) > f.order())
            throw std::invalid_argument(
                "table_index_bounds: universe exceeds field size");
        for (int j = 0; j < spec.d; ++j) {
            int nonzero_row = -1;
            int nonzero_count = 0;
            for (int i = 0; i < spec.q; ++i) {
                if (spec.matrix[i][j] != 0) {
                    nonzero_row = i;
                    ++nonzero_count;
                }
            }
            if (nonzero_count == 0) {
                bounds[j] = 1; // column derives the constant 0
            } else if (nonzero_count == 1) {
                std::uint32_t mx = 0;
                for (std::int64_t x = 0; x < n; ++x)
                    mx = std::max(mx, f.mul(static_cast<std::uint32_t>(x),
                                            spec.matrix[nonzero_row][j]));
                bounds[j] = static_cast<std::uint64_t>(mx) + 1;
            } else {
                bounds[j] = f.order(); // safe cover; XOR of several terms
            }
        }
        return bounds;
    }
    }
    throw std::logic_error("table_index_bounds: unknown variant");
}

} // namespace tabhash
