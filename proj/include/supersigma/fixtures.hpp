#pragma once

/**
 * @file fixtures.hpp
 * @brief Seeded generators for band-limited Grassmann-valued test data.
 */

#include <cstdint>
#include <random>

#include "supersigma/grid_field.hpp"

namespace supersigma {

class FixtureRng {
public:
    explicit FixtureRng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi);
    int integer(int lo, int hi);  // inclusive
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

// Random element with terms drawn from monomials over the generators in
// `allowed`, restricted to the requested parity (Mixed allows both).
GrassmannNumber random_grassmann(FixtureRng& rng, int generators, Parity parity, int max_terms,
                                 Mask allowed = ~Mask{0});

// Real trig polynomial with random amplitudes in [-amp, amp] on every mode
// |k_a| <= max_mode (each axis).
Array random_trig(FixtureRng& rng, const Grid& grid, int max_mode, double amp);

// Sum of random trig polynomials times random monomials of the given parity
// over the allowed generators.
GridField random_field(FixtureRng& rng, const Grid& grid, int generators, Parity parity, int terms, int max_mode,
                       double amp, Mask allowed = ~Mask{0});

// cos / sin of k . x sampled on the grid.
Array cos_mode(const Grid& grid, const std::vector<int>& k);
Array sin_mode(const Grid& grid, const std::vector<int>& k);

}  // namespace supersigma
