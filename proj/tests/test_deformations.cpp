#include <doctest.h>

#include <cmath>

#include "supersigma/deformations.hpp"
#include "supersigma/errors.hpp"
#include "supersigma/fixtures.hpp"

using namespace supersigma;

namespace {

constexpr int kN = 4;
const Grid kTorus = Grid::torus(16, 16);

GridField real(const Array& a, int n = kN, const Grid& g = kTorus) { return GridField::real(g, n, a); }
GrassmannNumber xi(int i, int n = kN) { return GrassmannNumber::generator(n, i); }
SurfaceGeometry flat(int n = kN, const Grid& g = kTorus) { return SurfaceGeometry::flat(g, n); }

SymmetricTensor zero_tensor(int n = kN) { return {GridField(kTorus, n), GridField(kTorus, n), GridField(kTorus, n)}; }

SpinorField odd_spinor(FixtureRng& rng, int n, Mask allowed, int max_mode) {
    return {{random_field(rng, kTorus, n, Parity::Odd, 2, max_mode, 1.0, allowed),
             random_field(rng, kTorus, n, Parity::Odd, 2, max_mode, 1.0, allowed)},
            Parity::Odd};
}

}  // namespace

TEST_CASE("Lie derivative of the flat metric") {
    SurfaceGeometry geo = flat();
    VectorField c = sample_vector_field(kTorus, kN, [](double, double) { return std::array<double, 2>{1.5, -2.0}; });
    CHECK(max_abs(lie_derivative_metric(geo, c)) < 1e-12);

    VectorField s = sample_vector_field(kTorus, kN, [](double, double y) { return std::array<double, 2>{std::sin(y), 0.0}; });
    SymmetricTensor L = lie_derivative_metric(geo, s);
    CHECK(max_abs(L.t11) < 1e-12);
    CHECK(max_abs(L.t22) < 1e-12);
    CHECK(max_abs(L.t12 - real(cos_mode(kTorus, {0, 1}))) < 1e-12);

    CHECK_THROWS_AS(sample_vector_field(kTorus, kN, [](double x, double y) { return std::array<double, 2>{-y, x}; }),
                    RegimeError);

    GravitinoField none = GravitinoField::zero(kTorus, kN);
    CHECK(max_abs(lie_derivative_gravitino(geo, none, s)) == 0.0);
}

TEST_CASE("Lie derivative of a gravitino under a translation is the directional derivative") {
    SurfaceGeometry geo = flat();
    FixtureRng rng(5);
    GravitinoField chi{{odd_spinor(rng, kN, 0b1111, 2), odd_spinor(rng, kN, 0b1111, 2)}};
    VectorField X = sample_vector_field(kTorus, kN, [](double, double) { return std::array<double, 2>{0.5, 0.0}; });
    GravitinoField L = lie_derivative_gravitino(geo, chi, X);
    for (int a = 0; a < 2; ++a) CHECK(max_abs(L.chi[a] - 0.5 * derivative(chi.chi[a], 0)) < 1e-12);
}

TEST_CASE("Non-flat frames are rejected") {
    SurfaceGeometry geo = flat();
    geo.frame[0][0] = 2.0 * geo.frame[0][0];
    VectorField X = VectorField::zero(kTorus, kN);
    CHECK_THROWS_AS(lie_derivative_metric(geo, X), RegimeError);
    CHECK_THROWS_AS(true_deformation_dimensions(geo), RegimeError);
}

TEST_CASE("Metric decomposition") {
    SurfaceGeometry geo = flat();
    GravitinoField none = GravitinoField::zero(kTorus, kN);
    GridField one = real(Array(kTorus.size(), 1.0));
    GridField zero(kTorus, kN);

    SUBCASE("pure Weyl") {
        MetricDecomposition d = decompose_metric(geo, none, {3.0 * one, zero, 3.0 * one});
        CHECK(max_abs(d.lambda - 3.0 * one) < 1e-10);
        CHECK(max_abs(d.D) < 1e-10);
    }
    SUBCASE("pure diffeomorphism") {
        VectorField X = sample_vector_field(kTorus, kN, [](double x, double y) {
            return std::array<double, 2>{std::sin(x + y), std::cos(2 * y)};
        });
        MetricDecomposition d = decompose_metric(geo, none, lie_derivative_metric(geo, X));
        CHECK(max_abs(d.D) < 1e-9);
        CHECK(d.null_directions >= 2);  // translations
    }
    SUBCASE("constant traceless tensor is a true deformation") {
        SymmetricTensor dg{one, zero, -1.0 * one};
        MetricDecomposition d = decompose_metric(geo, none, dg);
        CHECK(max_abs(d.D - dg) < 1e-10);
        CHECK(d.trace < 1e-10);
        CHECK(d.divergence < 1e-10);
    }
    SUBCASE("random Grassmann-valued input") {
        FixtureRng rng(11);
        for (int t = 0; t < 3; ++t) {
            SymmetricTensor dg{random_field(rng, kTorus, kN, Parity::Even, 3, 3, 1.0, 0b0011),
                               random_field(rng, kTorus, kN, Parity::Even, 3, 3, 1.0, 0b0011),
                               random_field(rng, kTorus, kN, Parity::Even, 3, 3, 1.0, 0b0011)};
            MetricDecomposition d = decompose_metric(geo, none, dg);
            CHECK(d.reassembly < 1e-8);
            CHECK(d.trace < 1e-8);
            CHECK(d.divergence < 1e-8);
        }
    }
    SUBCASE("odd input is rejected") {
        SymmetricTensor dg = zero_tensor();
        dg.t11 = one * xi(0);
        CHECK_THROWS_AS(decompose_metric(geo, none, dg), ParityError);
    }
}

TEST_CASE("Metric decomposition with a gravitino") {
    SurfaceGeometry geo = flat();
    FixtureRng rng(17);
    GravitinoField chi{{odd_spinor(rng, kN, 0b0011, 1), odd_spinor(rng, kN, 0b0011, 1)}};
    SpinorField q{{real(cos_mode(kTorus, {1, 0})) * xi(2), real(Array(kTorus.size(), 1.0)) * xi(3)}, Parity::Odd};
    SymmetricTensor dg = susy_metric_image(geo, chi, q);
    REQUIRE(max_abs(dg) > 1e-3);
    MetricDecomposition d = decompose_metric(geo, chi, dg);
    CHECK(max_abs(d.D) < 1e-9);
    CHECK(d.reassembly < 1e-8);

    GravitinoField none = GravitinoField::zero(kTorus, kN);
    CHECK(max_abs(susy_metric_image(geo, none, q)) == 0.0);
}

TEST_CASE("Gravitino decomposition") {
    SurfaceGeometry geo = flat();
    GravitinoField none = GravitinoField::zero(kTorus, kN);
    FixtureRng rng(23);

    SUBCASE("super Weyl part is recovered") {
        SpinorField t = odd_spinor(rng, kN, 0b0011, 2);
        GravitinoDecomposition d = decompose_gravitino(geo, none, super_weyl(none, t));
        CHECK(max_abs(d.D) < 1e-9);
        CHECK(max_abs(super_weyl(none, d.t) + susy_gravitino_image(geo, none, d.q) - super_weyl(none, t)) < 1e-9);
    }
    SUBCASE("SUSY image has no true part") {
        SpinorField q = odd_spinor(rng, kN, 0b0011, 2);
        GravitinoDecomposition d = decompose_gravitino(geo, none, susy_gravitino_image(geo, none, q));
        CHECK(max_abs(d.D) < 1e-9);
    }
    SUBCASE("constant gamma-traceless input is a true deformation") {
        // gamma^1 chi_1 + gamma^2 chi_2 = 0 for chi_1 = (1, 0) eta, chi_2 = (0, -1) eta
        GridField one = real(Array(kTorus.size(), 1.0)) * xi(0), zero(kTorus, kN);
        GravitinoField dchi{{SpinorField{{one, zero}, Parity::Odd}, SpinorField{{zero, -1.0 * one}, Parity::Odd}}};
        REQUIRE(max_abs(gamma_trace(dchi)) < 1e-14);
        GravitinoDecomposition d = decompose_gravitino(geo, none, dchi);
        CHECK(max_abs(d.D - dchi) < 1e-10);
    }
    SUBCASE("random input") {
        for (int t = 0; t < 2; ++t) {
            GravitinoField dchi{{odd_spinor(rng, kN, 0b0111, 3), odd_spinor(rng, kN, 0b0111, 3)}};
            GravitinoDecomposition d = decompose_gravitino(geo, none, dchi);
            CHECK(d.reassembly < 1e-8);
            CHECK(d.gamma_trace < 1e-8);
            CHECK(d.divergence < 1e-8);
        }
    }
}

TEST_CASE("Gravitino decomposition with a background gravitino") {
    SurfaceGeometry geo = flat();
    FixtureRng rng(29);
    GravitinoField chi{{odd_spinor(rng, kN, 0b0001, 1), odd_spinor(rng, kN, 0b0001, 1)}};
    VectorField X = sample_vector_field(kTorus, kN, [](double x, double) { return std::array<double, 2>{0.0, std::sin(x)}; });
    for (auto& c : X.x) c = c * xi(1) * xi(2);
    GravitinoField dchi = lie_derivative_gravitino(geo, chi, X);
    REQUIRE(max_abs(dchi) > 1e-3);
    GravitinoDecomposition d = decompose_gravitino(geo, chi, dchi);
    CHECK(max_abs(d.D) < 1e-9);
    CHECK(d.reassembly < 1e-8);
}

TEST_CASE("Dimensions of the true deformation spaces") {
    for (int n : {32, 64}) {
        Grid g = Grid::torus(n, n);
        DeformationDimensions d = true_deformation_dimensions(SurfaceGeometry::flat(g, 0));
        CHECK(d.even == 2);
        CHECK(d.odd == 2);
    }
    CHECK(fourier_cutoff(Grid::torus(32, 32)) == 8);
}
