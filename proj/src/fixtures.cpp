#include "supersigma/fixtures.hpp"

#include <cmath>
#include <vector>

#include "supersigma/errors.hpp"

namespace supersigma {

double FixtureRng::uniform(double lo, double hi) {
    // Built from raw engine bits so the stream does not depend on the
    // standard library's distribution implementation.
    double u = static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0);
    return lo + (hi - lo) * u;
}

int FixtureRng::integer(int lo, int hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
}

namespace {

std::vector<Mask> monomials(int generators, Parity parity, Mask allowed) {
    std::vector<Mask> out;
    const Mask all = generators >= 64 ? ~Mask{0} : (Mask{1} << generators) - 1;
    allowed &= all;
    // Enumerate subsets of `allowed`.
    for (Mask m = allowed;; m = (m - 1) & allowed) {
        if (parity == Parity::Mixed || mask_parity(m) == parity) out.push_back(m);
        if (m == 0) break;
    }
    return out;
}

}  // namespace

GrassmannNumber random_grassmann(FixtureRng& rng, int generators, Parity parity, int max_terms, Mask allowed) {
    GrassmannNumber r(generators);
    auto pool = monomials(generators, parity, allowed);
    if (pool.empty()) return r;
    int terms = rng.integer(1, max_terms);
    for (int t = 0; t < terms; ++t) {
        Mask m = pool[rng.integer(0, static_cast<int>(pool.size()) - 1)];
        // Small integers keep exact-arithmetic laws exact in floating point.
        r.add_term(m, static_cast<double>(rng.integer(-4, 4)));
    }
    return r;
}

Array cos_mode(const Grid& grid, const std::vector<int>& k) {
    Array phase(grid.size(), 0.0);
    for (int a = 0; a < grid.dim(); ++a) {
        Array x = grid.coordinate(a);
        double w = kTwoPi / grid.period[a] * k.at(a);
        for (std::size_t i = 0; i < phase.size(); ++i) phase[i] += w * x[i];
    }
    for (double& p : phase) p = std::cos(p);
    return phase;
}

Array sin_mode(const Grid& grid, const std::vector<int>& k) {
    Array phase(grid.size(), 0.0);
    for (int a = 0; a < grid.dim(); ++a) {
        Array x = grid.coordinate(a);
        double w = kTwoPi / grid.period[a] * k.at(a);
        for (std::size_t i = 0; i < phase.size(); ++i) phase[i] += w * x[i];
    }
    for (double& p : phase) p = std::sin(p);
    return phase;
}

Array random_trig(FixtureRng& rng, const Grid& grid, int max_mode, double amp) {
    Array out(grid.size(), 0.0);
    std::vector<int> k(grid.dim(), -max_mode);
    while (true) {
        double a = rng.uniform(-amp, amp), b = rng.uniform(-amp, amp);
        Array c = cos_mode(grid, k), s = sin_mode(grid, k);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * c[i] + b * s[i];
        int axis = grid.dim() - 1;
        while (axis >= 0 && k[axis] == max_mode) k[axis--] = -max_mode;
        if (axis < 0) break;
        ++k[axis];
    }
    return out;
}

GridField random_field(FixtureRng& rng, const Grid& grid, int generators, Parity parity, int terms, int max_mode,
                       double amp, Mask allowed) {
    GridField f(grid, generators);
    auto pool = monomials(generators, parity, allowed);
    if (pool.empty()) return f;
    for (int t = 0; t < terms; ++t) {
        Mask m = pool[rng.integer(0, static_cast<int>(pool.size()) - 1)];
        Array v = random_trig(rng, grid, max_mode, amp);
        Array& dst = f.component(m);
        for (std::size_t i = 0; i < v.size(); ++i) dst[i] += v[i];
    }
    return f;
}

}  // namespace supersigma
