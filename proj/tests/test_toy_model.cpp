#include <doctest.h>

#include <cmath>

#include "supersigma/berezin.hpp"
#include "supersigma/errors.hpp"
#include "supersigma/fixtures.hpp"
#include "supersigma/toy_model.hpp"

using namespace supersigma;

namespace {

constexpr int kParams = 4;
constexpr double kPi = kTwoPi / 2;
const Grid kCircle = Grid::circle(64);

GrassmannNumber xi(int i) { return GrassmannNumber::generator(kParams, i); }
GrassmannNumber one() { return GrassmannNumber::scalar(kParams, 1.0); }

GridField wave(const Array& a, const GrassmannNumber& c) { return GridField::real(kCircle, kParams, a) * c; }

ToyFields random_toy(FixtureRng& rng) {
    // Field content on generators 0..2; generator 3 is reserved for q.
    return {random_field(rng, kCircle, kParams, Parity::Even, 3, 4, 1.0, 0b0111),
            random_field(rng, kCircle, kParams, Parity::Odd, 3, 4, 1.0, 0b0111)};
}

}  // namespace

TEST_CASE("component action on closed-form fixtures") {
    GridField zero(kCircle, kParams);
    ToyFields s{wave(sin_mode(kCircle, {1}), one()), zero};
    CHECK(max_abs(toy_action_component(s) - kPi / 2 * one()) < 1e-12);

    GridField psi = wave(cos_mode(kCircle, {1}), xi(0)) + wave(sin_mode(kCircle, {1}), xi(1));
    ToyFields f{zero, psi};
    CHECK(max_abs(toy_action_component(f) - kPi * (xi(0) * xi(1))) < 1e-12);

    ToyFields c{GridField::constant(kCircle, 3.0 * one()), zero};
    CHECK(max_abs(toy_action_component(c)) < 1e-12);

    ToyFields bad{psi, zero};
    CHECK_THROWS_AS(toy_action_component(bad), ParityError);
}

TEST_CASE("superfield action on closed-form fixtures") {
    GridField zero(kCircle, kParams);
    GridField phi = wave(sin_mode(kCircle, {1}), one());
    GridField psi = wave(cos_mode(kCircle, {1}), xi(0)) + wave(sin_mode(kCircle, {1}), xi(1));
    GrassmannNumber target = kPi / 2 * one() + kPi * (xi(0) * xi(1));
    CHECK(max_abs(toy_action_superfield(toy_superfield({phi, zero})) - kPi / 2 * one()) < 1e-12);
    CHECK(max_abs(toy_action_superfield(toy_superfield({zero, psi})) - kPi * (xi(0) * xi(1))) < 1e-12);
    CHECK(max_abs(toy_action_superfield(toy_superfield({phi, psi})) - target) < 1e-12);
    CHECK(max_abs(toy_action_superfield(toy_superfield({GridField::constant(kCircle, one()), zero}))) < 1e-12);
    // With D = d_eta + eta d_x the even part flips sign.
    CHECK(max_abs(toy_action_superfield(toy_superfield({phi, psi}), 1) -
                  (-kPi / 2 * one() + kPi * (xi(0) * xi(1)))) < 1e-12);
}

TEST_CASE("superfield and component actions agree on random fixtures") {
    FixtureRng rng(31);
    for (int t = 0; t < 100; ++t) {
        ToyFields f = random_toy(rng);
        CHECK(max_abs(toy_action_superfield(toy_superfield(f)) - toy_action_component(f)) < 1e-10);
    }
}

TEST_CASE("SUSY variation as written") {
    GridField zero(kCircle, kParams);
    GrassmannNumber kappa = xi(3);
    ToyFields a{zero, wave(cos_mode(kCircle, {1}), xi(0))};
    ToyFields da = toy_susy(a, kappa);
    CHECK(max_abs(da.phi - wave(cos_mode(kCircle, {1}), kappa * xi(0))) < 1e-13);
    CHECK(max_abs(da.psi) < 1e-13);

    ToyFields b{wave(sin_mode(kCircle, {1}), one()), zero};
    ToyFields db = toy_susy(b, kappa);
    CHECK(max_abs(db.phi) < 1e-13);
    CHECK(max_abs(db.psi - wave(cos_mode(kCircle, {1}), kappa)) < 1e-12);

    CHECK_THROWS_AS(toy_susy(b, one()), ParityError);
}

TEST_CASE("SUSY variation agrees with the geometric form") {
    FixtureRng rng(37);
    GrassmannNumber kappa = xi(3);
    Embedding i = Embedding::trivial(kCircle, 1, kParams);
    for (int sigma : {1, -1}) {
        for (int t = 0; t < 10; ++t) {
            ToyFields f = random_toy(rng);
            SuperFunction Phi = toy_superfield(f);
            ToyFields d = toy_susy(f, kappa, sigma);
            CHECK(max_abs(restrict(apply_Q(Phi, kappa, sigma), i) - d.phi) < 1e-12);
            CHECK(max_abs(restrict(apply_Q(apply_D(Phi, sigma), kappa, sigma), i) - d.psi) < 1e-12);
        }
    }
}

TEST_CASE("invariance residual") {
    FixtureRng rng(41);
    GrassmannNumber kappa = xi(3);
    for (int t = 0; t < 100; ++t) CHECK(toy_invariance_residual(random_toy(rng), kappa) < 1e-10);
    ToyFields f = random_toy(rng);
    CHECK(toy_invariance_residual(f, GrassmannNumber(kParams)) == 0.0);
    ToyFields bosonic{f.phi, GridField(kCircle, kParams)};
    CHECK(toy_invariance_residual(bosonic, kappa) < 1e-10);
    CHECK(toy_invariance_residual(bosonic, kappa, 1) < 1e-10);
}

TEST_CASE("invariance residual matches the hand expansion on monomial data") {
    // phi = a sin kx, psi = b xi sin kx: dA = (1 + sigma) q int phi' psi'
    // = (1 + sigma) a b k^2 pi q xi.
    const double a = 0.7, b = -1.3;
    for (int k = 1; k <= 3; ++k) {
        ToyFields f{wave(sin_mode(kCircle, {k}), a * one()), wave(sin_mode(kCircle, {k}), b * xi(0))};
        for (int sigma : {1, -1}) {
            double expected = std::abs((1 + sigma) * a * b * k * k * kPi);
            CHECK(toy_invariance_residual(f, xi(3), sigma) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("action does not depend on the embedding") {
    FixtureRng rng(43);
    BerezinDomain plain(kCircle, 1);
    for (int t = 0; t < 20; ++t) {
        ToyFields f = random_toy(rng);
        SuperFunction Phi = toy_superfield(f);
        SuperFunction density = partial_even(Phi, 0) * apply_D(Phi, kToyOrientation);

        Embedding moving{{random_field(rng, kCircle, kParams, Parity::Odd, 2, 3, 1.0, 0b1000)}};
        BerezinDomain adapted(kCircle, 1, moving);
        CHECK(max_abs(berezin_integrate(density, adapted) - berezin_integrate(density, plain)) < 1e-10);

        Embedding rigid{{GridField::constant(kCircle, xi(3))}};
        ToyFields along = toy_components(Phi, rigid);
        CHECK(max_abs(toy_action_component(along) - toy_action_superfield(Phi)) < 1e-10);
    }
}

TEST_CASE("orientation calibration") {
    FixtureRng rng(47);
    std::vector<ToyFields> battery;
    for (int t = 0; t < 5; ++t) battery.push_back(random_toy(rng));
    ToyCalibration c = calibrate_toy_orientation(battery, xi(3));
    CHECK(c.orientation == kToyOrientation);
    CHECK(c.residual_minus < 1e-10);
    CHECK(c.residual_plus > 1e-3);

    CHECK_THROWS_AS(calibrate_toy_orientation({}, xi(3)), CalibrationError);
    GridField zero(kCircle, kParams);
    CHECK_THROWS_WITH_AS(calibrate_toy_orientation({ToyFields{zero, zero}}, xi(3)),
                         doctest::Contains("underdetermined"), CalibrationError);
}
