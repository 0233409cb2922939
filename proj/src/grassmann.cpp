#include "supersigma/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "supersigma/errors.hpp"

namespace supersigma {

const char* to_string(Parity p) {
    switch (p) {
        case Parity::Even: return "even";
        case Parity::Odd: return "odd";
        default: return "mixed";
    }
}

int koszul_sign(Mask a, Mask b) {
    if (a & b) return 0;
    // Each generator j of b must hop over every generator of a above it.
    int inversions = 0;
    while (b) {
        int j = std::countr_zero(b);
        b &= b - 1;
        inversions += std::popcount(j >= 63 ? Mask{0} : (a >> (j + 1)));
    }
    return (inversions & 1) ? -1 : 1;
}

namespace {

void check_generators(int n) {
    if (n < 0 || n > kMaxGenerators)
        throw DimensionError("generator count must lie in [0, 63], got " + std::to_string(n));
}

void check_same(const GrassmannNumber& a, const GrassmannNumber& b) {
    if (a.generators() != b.generators())
        throw DimensionError("Grassmann operands over different algebras (" +
                             std::to_string(a.generators()) + " vs " +
                             std::to_string(b.generators()) + " generators)");
}

}  // namespace

GrassmannNumber::GrassmannNumber(int generators) : n_(generators) { check_generators(generators); }

GrassmannNumber GrassmannNumber::scalar(int generators, double c) {
    GrassmannNumber r(generators);
    r.add_term(0, c);
    return r;
}

GrassmannNumber GrassmannNumber::generator(int generators, int index, double c) {
    if (index < 0 || index >= generators)
        throw RangeError("generator index " + std::to_string(index) + " outside algebra");
    return monomial(generators, Mask{1} << index, c);
}

GrassmannNumber GrassmannNumber::monomial(int generators, Mask m, double c) {
    GrassmannNumber r(generators);
    if (generators < 64 && (m >> generators) != 0)
        throw RangeError("monomial uses generators outside the algebra");
    r.add_term(m, c);
    return r;
}

double GrassmannNumber::coeff(Mask m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const auto& t, Mask k) { return t.first < k; });
    return (it != terms_.end() && it->first == m) ? it->second : 0.0;
}

void GrassmannNumber::add_term(Mask m, double c) {
    if (c == 0.0) return;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const auto& t, Mask k) { return t.first < k; });
    if (it != terms_.end() && it->first == m) {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    } else {
        terms_.insert(it, {m, c});
    }
}

GrassmannNumber& GrassmannNumber::operator+=(const GrassmannNumber& o) {
    check_same(*this, o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

GrassmannNumber& GrassmannNumber::operator-=(const GrassmannNumber& o) {
    check_same(*this, o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

GrassmannNumber& GrassmannNumber::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& t : terms_) t.second *= s;
    return *this;
}

GrassmannNumber gmul(const GrassmannNumber& a, const GrassmannNumber& b) {
    check_same(a, b);
    std::map<Mask, double> acc;
    for (const auto& [ma, ca] : a.terms()) {
        for (const auto& [mb, cb] : b.terms()) {
            int s = koszul_sign(ma, mb);
            if (s != 0) acc[ma | mb] += s * ca * cb;
        }
    }
    GrassmannNumber r(a.generators());
    for (const auto& [m, c] : acc) r.add_term(m, c);
    return r;
}

GrassmannNumber operator+(GrassmannNumber a, const GrassmannNumber& b) { return a += b; }
GrassmannNumber operator-(GrassmannNumber a, const GrassmannNumber& b) { return a -= b; }
GrassmannNumber operator-(GrassmannNumber a) { return a *= -1.0; }
GrassmannNumber operator*(const GrassmannNumber& a, const GrassmannNumber& b) { return gmul(a, b); }
GrassmannNumber operator*(double s, GrassmannNumber a) { return a *= s; }
GrassmannNumber operator*(GrassmannNumber a, double s) { return a *= s; }

double body(const GrassmannNumber& a) { return a.coeff(0); }

GrassmannNumber soul(const GrassmannNumber& a) {
    GrassmannNumber r(a.generators());
    for (const auto& [m, c] : a.terms())
        if (m != 0) r.add_term(m, c);
    return r;
}

Parity parity_of(const GrassmannNumber& a) {
    bool even = false, odd = false;
    for (const auto& [m, c] : a.terms()) (mask_degree(m) & 1 ? odd : even) = true;
    if (even && odd) return Parity::Mixed;
    return odd ? Parity::Odd : Parity::Even;
}

double max_abs(const GrassmannNumber& a) {
    double r = 0.0;
    for (const auto& t : a.terms()) r = std::max(r, std::abs(t.second));
    return r;
}

namespace {

// Packs the bits of m that are not in `removed` into consecutive low bits.
Mask compress_mask(Mask m, Mask removed) {
    Mask out = 0;
    int k = 0;
    for (int i = 0; i < 64; ++i) {
        Mask bit = Mask{1} << i;
        if (removed & bit) continue;
        if (m & bit) out |= Mask{1} << k;
        ++k;
    }
    return out;
}

}  // namespace

GrassmannNumber top_coefficient(const GrassmannNumber& a, Mask integration) {
    int n = a.generators();
    int k = mask_degree(integration);
    if (k > n || (n < 64 && (integration >> n) != 0))
        throw DimensionError("integration generators exceed the algebra");
    GrassmannNumber r(n - k);
    for (const auto& [m, c] : a.terms()) {
        if ((m & integration) != integration) continue;
        Mask rest = m & ~integration;
        r.add_term(compress_mask(rest, integration), koszul_sign(integration, rest) * c);
    }
    return r;
}

GrassmannNumber top_coefficient(const GrassmannNumber& a, int k) {
    if (k < 0 || k > a.generators()) throw DimensionError("cannot integrate over more generators than N");
    return top_coefficient(a, k == 64 ? ~Mask{0} : (Mask{1} << k) - 1);
}

GrassmannNumber inverse(const GrassmannNumber& a) {
    double b = body(a);
    if (b == 0.0) throw std::domain_error("Grassmann inverse needs a nonzero body");
    GrassmannNumber x = soul(a) * (-1.0 / b);
    GrassmannNumber sum = GrassmannNumber::scalar(a.generators(), 1.0);
    GrassmannNumber power = sum;
    for (int k = 1; k <= a.generators(); ++k) {
        power = gmul(power, x);
        if (power.is_zero()) break;
        sum += power;
    }
    return sum * (1.0 / b);
}

GrassmannNumber pow(const GrassmannNumber& a, double p) {
    double b = body(a);
    if (!(b > 0.0)) throw std::domain_error("Grassmann power needs a positive body");
    GrassmannNumber x = soul(a) * (1.0 / b);
    GrassmannNumber sum = GrassmannNumber::scalar(a.generators(), 1.0);
    GrassmannNumber power = sum;
    double binom = 1.0;
    for (int k = 1; k <= a.generators(); ++k) {
        power = gmul(power, x);
        if (power.is_zero()) break;
        binom *= (p - (k - 1)) / k;
        sum += power * binom;
    }
    return sum * std::pow(b, p);
}

GrassmannNumber extend(const GrassmannNumber& a, int generators) {
    if (generators < a.generators()) throw DimensionError("cannot shrink a Grassmann algebra");
    GrassmannNumber r(generators);
    for (const auto& [m, c] : a.terms()) r.add_term(m, c);
    return r;
}

nlohmann::json to_json(const GrassmannNumber& a) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [m, c] : a.terms()) {
        nlohmann::json idx = nlohmann::json::array();
        for (int i = 0; i < 64; ++i)
            if (m & (Mask{1} << i)) idx.push_back(i + 1);
        terms.push_back({{"idx", idx}, {"c", c}});
    }
    return {{"terms", terms}};
}

GrassmannNumber grassmann_from_json(const nlohmann::json& j, int generators) {
    GrassmannNumber r(generators);
    for (const auto& t : j.at("terms")) {
        Mask m = 0;
        int prev = 0;
        for (int i : t.at("idx")) {
            if (i <= prev || i > generators)
                throw RangeError("Grassmann index list must be strictly increasing within 1..N");
            m |= Mask{1} << (i - 1);
            prev = i;
        }
        r.add_term(m, t.at("c").get<double>());
    }
    return r;
}

}  // namespace supersigma
