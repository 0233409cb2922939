#pragma once

/**
 * @file grassmann.hpp
 * @brief Finite real Grassmann algebra Lambda_N.
 *
 * Monomials are bitmasks over the generators (bit i = generator i, zero
 * based); a monomial is always read with its generators in increasing
 * order. Products pick up the Koszul sign of sorting the concatenation.
 */

#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

namespace supersigma {

using Mask = std::uint64_t;

inline constexpr int kMaxGenerators = 63;

enum class Parity { Even, Odd, Mixed };

const char* to_string(Parity p);

inline int mask_degree(Mask m) { return std::popcount(m); }

inline Parity mask_parity(Mask m) { return (mask_degree(m) & 1) ? Parity::Odd : Parity::Even; }

// Sign of sorting the concatenated word (a)(b) into increasing order; 0 if
// the words share a generator.
int koszul_sign(Mask a, Mask b);

class GrassmannNumber {
public:
    GrassmannNumber() = default;
    explicit GrassmannNumber(int generators);

    static GrassmannNumber scalar(int generators, double c);
    static GrassmannNumber generator(int generators, int index, double c = 1.0);
    static GrassmannNumber monomial(int generators, Mask m, double c = 1.0);

    int generators() const { return n_; }
    // Sorted by mask, no explicit zeros.
    const std::vector<std::pair<Mask, double>>& terms() const { return terms_; }
    double coeff(Mask m) const;
    bool is_zero() const { return terms_.empty(); }

    // Adds c to the coefficient of m (drops the term if it becomes exactly 0).
    void add_term(Mask m, double c);

    GrassmannNumber& operator+=(const GrassmannNumber& o);
    GrassmannNumber& operator-=(const GrassmannNumber& o);
    GrassmannNumber& operator*=(double s);

    bool operator==(const GrassmannNumber& o) const = default;

private:
    int n_ = 0;
    std::vector<std::pair<Mask, double>> terms_;
};

GrassmannNumber gmul(const GrassmannNumber& a, const GrassmannNumber& b);

GrassmannNumber operator+(GrassmannNumber a, const GrassmannNumber& b);
GrassmannNumber operator-(GrassmannNumber a, const GrassmannNumber& b);
GrassmannNumber operator-(GrassmannNumber a);
GrassmannNumber operator*(const GrassmannNumber& a, const GrassmannNumber& b);
GrassmannNumber operator*(double s, GrassmannNumber a);
GrassmannNumber operator*(GrassmannNumber a, double s);

double body(const GrassmannNumber& a);
GrassmannNumber soul(const GrassmannNumber& a);
Parity parity_of(const GrassmannNumber& a);

// Largest coefficient magnitude (0 for the zero element).
double max_abs(const GrassmannNumber& a);

// Coefficient of the ordered product of the generators in `integration`,
// taken from the left. The result lives over the remaining generators,
// renumbered in increasing order.
GrassmannNumber top_coefficient(const GrassmannNumber& a, Mask integration);
// Convenience: integrate over generators 0..k-1.
GrassmannNumber top_coefficient(const GrassmannNumber& a, int k);

// Multiplicative inverse; requires a nonzero body.
GrassmannNumber inverse(const GrassmannNumber& a);
// a^p for a with positive body, via the binomial series in the soul.
GrassmannNumber pow(const GrassmannNumber& a, double p);

// Reads a over a larger (or equal) algebra; masks are unchanged.
GrassmannNumber extend(const GrassmannNumber& a, int generators);

nlohmann::json to_json(const GrassmannNumber& a);
GrassmannNumber grassmann_from_json(const nlohmann::json& j, int generators);

}  // namespace supersigma
