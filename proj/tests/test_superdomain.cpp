#include <doctest.h>

#include <cmath>

#include "supersigma/errors.hpp"
#include "supersigma/fixtures.hpp"
#include "supersigma/superdomain.hpp"

using namespace supersigma;

namespace {

constexpr int kParams = 4;

Array apply_fn(const Grid& g, double (*fn)(double)) {
    Array x = g.coordinate(0);
    for (double& v : x) v = fn(v);
    return x;
}

double max_abs(const Array& a) {
    double r = 0;
    for (double v : a) r = std::max(r, std::abs(v));
    return r;
}

// phi + eta psi from two Lambda_N fields.
SuperFunction superfield(const GridField& phi, const GridField& psi) {
    SuperFunction f = SuperFunction::lift(phi, 1);
    f.add_coefficient(1, psi);
    return f;
}

SuperFunction random_superfunction(FixtureRng& rng, const Grid& g, Parity p) {
    SuperFunction f(g, 1, kParams);
    f.field() = random_field(rng, g, 1 + kParams, p, 4, 2, 1.0, 0b0111);
    return f;
}

// Q with q stripped: d_eta - sigma eta d_x.
SuperFunction stripped_Q(const SuperFunction& f, int sigma) {
    SuperFunction eta_dx(f.grid(), 1, f.parameters());
    eta_dx.field() = left_multiply_generator(partial_even(f, 0).field(), 0);
    return partial_odd(f, 0) - static_cast<double>(sigma) * eta_dx;
}

double grade(const SuperFunction& f) { return parity_of(f) == Parity::Odd ? 1.0 : 0.0; }

}  // namespace

TEST_CASE("even partial derivative is spectral on trig data") {
    Grid g = Grid::circle(32);
    SuperFunction f = SuperFunction::real(g, 1, kParams, apply_fn(g, [](double x) { return std::sin(x); }));
    SuperFunction df = partial_even(f, 0);
    CHECK(max_abs(df.field() - GridField::real(g, 1 + kParams, apply_fn(g, [](double x) { return std::cos(x); }))) <
          1e-12);
    GridField c = GridField::constant(g, GrassmannNumber::generator(kParams, 0, 2.0));
    SuperFunction eta_c = SuperFunction::odd_coordinate(g, 1, kParams, 0) * SuperFunction::lift(c, 1);
    CHECK(max_abs(partial_even(eta_c, 0)) < 1e-13);
    CHECK(max_abs(partial_even(SuperFunction::lift(c, 1), 0)) < 1e-13);
    CHECK_THROWS_AS(partial_even(f, 1), RangeError);
}

TEST_CASE("odd partial derivative is a left derivative") {
    Grid g = Grid::circle(16);
    FixtureRng rng(3);
    GridField phi = random_field(rng, g, kParams, Parity::Even, 3, 2, 1.0);
    GridField psi = random_field(rng, g, kParams, Parity::Odd, 3, 2, 1.0);
    CHECK(max_abs(partial_odd(superfield(phi, psi), 0).field() - SuperFunction::lift(psi, 1).field()) == 0.0);
    CHECK(max_abs(partial_odd(SuperFunction::lift(phi, 1), 0)) == 0.0);

    // d/deta^1 (eta^2 eta^1 g) = -eta^2 g
    SuperFunction e1 = SuperFunction::odd_coordinate(g, 2, kParams, 0);
    SuperFunction e2 = SuperFunction::odd_coordinate(g, 2, kParams, 1);
    SuperFunction gf = SuperFunction::lift(phi, 2);
    SuperFunction lhs = partial_odd(e2 * e1 * gf, 0);
    CHECK(max_abs(lhs + e2 * gf) == 0.0);
    CHECK_THROWS_AS(partial_odd(gf, 2), RangeError);
}

TEST_CASE("D and Q act on phi + eta psi as expected") {
    Grid g = Grid::circle(32);
    FixtureRng rng(5);
    GridField phi = random_field(rng, g, kParams, Parity::Even, 3, 3, 1.0);
    GridField psi = random_field(rng, g, kParams, Parity::Odd, 3, 3, 1.0);
    SuperFunction Phi = superfield(phi, psi);
    SuperFunction eta = SuperFunction::odd_coordinate(g, 1, kParams, 0);

    SuperFunction expected_D = SuperFunction::lift(psi, 1) + eta * SuperFunction::lift(derivative(phi, 0), 1);
    CHECK(max_abs(apply_D(Phi) - expected_D) < 1e-12);

    GrassmannNumber q = GrassmannNumber::generator(kParams, 3);
    SuperFunction ql = SuperFunction::lift(g, 1, q);
    SuperFunction expected_Q = ql * SuperFunction::lift(psi, 1) + eta * ql * SuperFunction::lift(derivative(phi, 0), 1);
    CHECK(max_abs(apply_Q(Phi, q) - expected_Q) < 1e-12);

    CHECK_THROWS_AS(apply_Q(Phi, GrassmannNumber::scalar(kParams, 1.0)), ParityError);
    CHECK(max_abs(apply_Q(Phi, GrassmannNumber(kParams))) == 0.0);
}

TEST_CASE("D squares to the even derivative") {
    Grid g = Grid::circle(32);
    FixtureRng rng(9);
    for (int t = 0; t < 20; ++t) {
        SuperFunction f = random_superfunction(rng, g, Parity::Mixed);
        CHECK(max_abs(apply_D(apply_D(f)) - partial_even(f, 0)) < 1e-11);
        CHECK(max_abs(apply_D(apply_D(f, -1), -1) + partial_even(f, 0)) < 1e-11);
    }
}

TEST_CASE("vector field form of D matches apply_D") {
    Grid g = Grid::circle(16);
    FixtureRng rng(10);
    SuperFunction f = random_superfunction(rng, g, Parity::Mixed);
    CHECK(max_abs(apply(vector_field_D(g, kParams), f) - apply_D(f)) < 1e-12);
    CHECK(max_abs(apply(vector_field_D(g, kParams, -1), f) - apply_D(f, -1)) < 1e-12);
}

TEST_CASE("graded Leibniz rule for d_x, d_eta, D and Q") {
    Grid g = Grid::circle(32);
    FixtureRng rng(13);
    GrassmannNumber q = GrassmannNumber::generator(kParams, 3);
    for (int t = 0; t < 20; ++t) {
        SuperFunction f = random_superfunction(rng, g, t % 2 ? Parity::Odd : Parity::Even);
        SuperFunction h = random_superfunction(rng, g, t % 3 ? Parity::Odd : Parity::Even);
        double s = grade(f) ? -1.0 : 1.0;  // sign for odd derivations
        CHECK(max_abs(partial_even(f * h, 0) - (partial_even(f, 0) * h + f * partial_even(h, 0))) < 1e-10);
        CHECK(max_abs(partial_odd(f * h, 0) - (partial_odd(f, 0) * h + s * (f * partial_odd(h, 0)))) < 1e-10);
        for (int sigma : {1, -1}) {
            CHECK(max_abs(apply_D(f * h, sigma) - (apply_D(f, sigma) * h + s * (f * apply_D(h, sigma)))) < 1e-10);
            CHECK(max_abs(apply_Q(f * h, q, sigma) - (apply_Q(f, q, sigma) * h + f * apply_Q(h, q, sigma))) <
                  1e-10);
        }
    }
}

TEST_CASE("D commutes with the SUSY field Q") {
    Grid g = Grid::circle(32);
    FixtureRng rng(17);
    GrassmannNumber q = GrassmannNumber::generator(kParams, 3);
    for (int t = 0; t < 20; ++t) {
        SuperFunction f = random_superfunction(rng, g, Parity::Mixed);
        for (int sigma : {1, -1}) {
            CHECK(max_abs(apply_D(apply_Q(f, q, sigma), sigma) - apply_Q(apply_D(f, sigma), q, sigma)) < 1e-10);
            CHECK(max_abs(apply_D(stripped_Q(f, sigma), sigma) + stripped_Q(apply_D(f, sigma), sigma)) < 1e-10);
        }
        CHECK(max_abs(partial_odd(partial_odd(f, 0), 0)) == 0.0);
    }
}

TEST_CASE("pullback along coordinate changes") {
    Grid g = Grid::circle(32);
    FixtureRng rng(21);
    GridField phi = random_field(rng, g, kParams, Parity::Even, 3, 3, 1.0, 0b0011);
    GridField psi = random_field(rng, g, kParams, Parity::Odd, 3, 3, 1.0, 0b0011);
    SuperFunction f = superfield(phi, psi);
    SuperFunction eta = SuperFunction::odd_coordinate(g, 1, kParams, 0);
    GridField xi1 = GridField::constant(g, GrassmannNumber::generator(kParams, 2));
    GridField xi2 = GridField::constant(g, GrassmannNumber::generator(kParams, 3));

    SUBCASE("identity") {
        CHECK(max_abs(pullback_coordinate_change(f, CoordinateChange11::identity(g, kParams)) - f) < 1e-12);
    }
    SUBCASE("odd translation of eta") {
        auto c = CoordinateChange11::identity(g, kParams);
        c.gamma0 = xi1;
        SuperFunction expected = SuperFunction::lift(phi + xi1 * psi, 1) + eta * SuperFunction::lift(psi, 1);
        CHECK(max_abs(pullback_coordinate_change(f, c) - expected) < 1e-12);
    }
    SUBCASE("odd shift of x") {
        auto c = CoordinateChange11::identity(g, kParams);
        c.g1 = xi2;
        GridField coeff = pullback_coordinate_change(f, c).coefficient(1);
        CHECK(max_abs(coeff - (derivative(phi, 0) * xi2 + psi)) < 1e-12);
    }
    SUBCASE("both odd parts: full expansion keeps the gamma0 psi' g1 term") {
        auto c = CoordinateChange11::identity(g, kParams);
        c.g1 = xi2;
        c.gamma0 = xi1;
        SuperFunction r = pullback_coordinate_change(f, c);
        GridField top = derivative(phi, 0) * xi2 + psi + xi1 * derivative(psi, 0) * xi2;
        CHECK(max_abs(r.coefficient(1) - top) < 1e-12);
        CHECK(max_abs(r.coefficient(0) - (phi + xi1 * psi)) < 1e-12);
    }
    SUBCASE("round trip through the inverse change") {
        const double shift = 0.7;
        GrassmannNumber one = GrassmannNumber::scalar(kParams, 1.0);
        GrassmannNumber gam1 = one + GrassmannNumber::monomial(kParams, 0b1100, 0.5);
        GrassmannNumber g1 = GrassmannNumber::generator(kParams, 2, 0.8);
        GrassmannNumber gam0 = GrassmannNumber::generator(kParams, 3, -1.3);
        CoordinateChange11 c{GridField::constant(g, shift * one), GridField::constant(g, g1),
                             GridField::constant(g, gam0), GridField::constant(g, gam1)};
        GrassmannNumber inv1 = inverse(gam1);
        CoordinateChange11 back{GridField::constant(g, -shift * one + inv1 * gam0 * g1),
                                GridField::constant(g, -(inv1 * g1)), GridField::constant(g, -(inv1 * gam0)),
                                GridField::constant(g, inv1)};
        SuperFunction there = pullback_coordinate_change(f, c);
        CHECK(max_abs(there - f) > 1e-3);
        CHECK(max_abs(pullback_coordinate_change(there, back) - f) < 1e-8);
    }
    SUBCASE("general body map uses trigonometric interpolation") {
        auto c = CoordinateChange11::identity(g, kParams);
        c.displacement = GridField::real(g, kParams, apply_fn(g, [](double x) { return 0.3 * std::sin(x); }));
        SuperFunction s = SuperFunction::real(g, 1, kParams, apply_fn(g, [](double x) { return std::sin(x); }));
        Array expected = apply_fn(g, [](double x) { return std::sin(x + 0.3 * std::sin(x)); });
        Array got = body(pullback_coordinate_change(s, c).coefficient(0));
        for (std::size_t k = 0; k < got.size(); ++k) got[k] -= expected[k];
        CHECK(max_abs(got) < 1e-12);
        auto bad = CoordinateChange11::identity(g, kParams);
        bad.displacement = GridField::real(g, kParams, apply_fn(g, [](double x) { return -2.0 * std::sin(x); }));
        CHECK_THROWS_AS(pullback_coordinate_change(s, bad), RegimeError);
    }
}

TEST_CASE("restriction along embeddings") {
    Grid g = Grid::circle(16);
    FixtureRng rng(23);
    GridField phi = random_field(rng, g, kParams, Parity::Even, 3, 2, 1.0, 0b0011);
    GridField psi = random_field(rng, g, kParams, Parity::Odd, 3, 2, 1.0, 0b0011);
    CHECK(max_abs(restrict(superfield(phi, psi), Embedding::trivial(g, 1, kParams)) - phi) == 0.0);

    GridField xi = random_field(rng, g, kParams, Parity::Odd, 2, 2, 1.0, 0b1100);
    Embedding i{{xi}};
    CHECK(max_abs(restrict(SuperFunction::odd_coordinate(g, 1, kParams, 0), i) - xi) == 0.0);

    Grid t = Grid::torus(8, 8);
    GridField F = random_field(rng, t, kParams, Parity::Even, 2, 1, 1.0, 0b0011);
    GridField x1 = GridField::constant(t, GrassmannNumber::generator(kParams, 2));
    GridField x2 = GridField::constant(t, GrassmannNumber::generator(kParams, 3));
    SuperFunction top = SuperFunction::odd_coordinate(t, 2, kParams, 0) *
                        SuperFunction::odd_coordinate(t, 2, kParams, 1) * SuperFunction::lift(F, 2);
    CHECK(max_abs(restrict(top, Embedding{{x1, x2}}) - x1 * x2 * F) == 0.0);

    Embedding wrong{{GridField::constant(g, GrassmannNumber::scalar(kParams, 1.0))}};
    CHECK_THROWS_AS(restrict(superfield(phi, psi), wrong), ParityError);
}

TEST_CASE("adapted coordinates turn restriction into the eta-free part") {
    Grid t = Grid::torus(8, 8);
    FixtureRng rng(29);
    SuperFunction f(t, 2, kParams);
    f.field() = random_field(rng, t, 2 + kParams, Parity::Mixed, 6, 1, 1.0, 0b001111);
    Embedding i{{random_field(rng, t, kParams, Parity::Odd, 2, 1, 1.0, 0b1100),
                 random_field(rng, t, kParams, Parity::Odd, 2, 1, 1.0, 0b1100)}};
    CHECK(max_abs(adapt_to_embedding(f, i).coefficient(0) - restrict(f, i)) < 1e-12);
}
