#include <doctest.h>

#include <cmath>

#include "supersigma/errors.hpp"
#include "supersigma/fixtures.hpp"
#include "supersigma/spin_surface.hpp"

using namespace supersigma;

namespace {

constexpr int kParams = 6;
const Grid kTorus = Grid::torus(16, 16);

SpinorField random_spinor(FixtureRng& rng, const Grid& g, Parity p, int max_mode = 2, Mask allowed = 0b001111) {
    return {{random_field(rng, g, kParams, p, 3, max_mode, 1.0, allowed),
             random_field(rng, g, kParams, p, 3, max_mode, 1.0, allowed)},
            p};
}

GravitinoField random_gravitino(FixtureRng& rng, const Grid& g, int max_mode = 1, Mask allowed = 0b001111) {
    return {{random_spinor(rng, g, Parity::Odd, max_mode, allowed), random_spinor(rng, g, Parity::Odd, max_mode, allowed)}};
}

SpinorField constant_spinor(const Grid& g, const GrassmannNumber& a, const GrassmannNumber& b) {
    return {{GridField::constant(g, a), GridField::constant(g, b)}, parity_of(a) == Parity::Odd ? Parity::Odd : parity_of(b)};
}

// <s,t> for C = [[0,1],[-1,0]] written out: s1 t2 - s2 t1.
GridField pairing_oracle(const SpinorField& s, const SpinorField& t) { return s.c[0] * t.c[1] - s.c[1] * t.c[0]; }

// gamma^1 gamma^2 s = (s2, -s1)
SpinorField volume_oracle(const SpinorField& s) { return {{s.c[1], -s.c[0]}, s.parity}; }

// gamma^1 s = (s1, -s2), gamma^2 s = (s2, s1)
SpinorField gamma_oracle(int a, const SpinorField& s) {
    if (a == 0) return {{s.c[0], -s.c[1]}, s.parity};
    return {{s.c[1], s.c[0]}, s.parity};
}

GridField real_field(const Array& v) { return GridField::real(kTorus, kParams, v); }

Array exp_of(const Array& u, double k) {
    Array r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = std::exp(k * u[i]);
    return r;
}

}  // namespace

TEST_CASE("Clifford relations for the standard matrices") {
    CliffordConvention c = CliffordConvention::standard();
    CHECK(c.clifford_defect() == 0.0);
    Mat2 v = c.volume();
    Mat2 vv = matmul(v, v);
    CHECK(vv[0][0] == -1.0);
    CHECK(vv[1][1] == -1.0);
    CHECK(vv[0][1] == 0.0);
    CHECK(vv[1][0] == 0.0);
    CHECK(v == c.pairing);

    FixtureRng rng(1);
    SpinorField s = random_spinor(rng, kTorus, Parity::Odd);
    CHECK(max_abs(clifford(0, clifford(0, s)) - s) == 0.0);
    CHECK(max_abs(clifford(0, clifford(1, s)) + clifford(1, clifford(0, s))) == 0.0);
    SpinorField vs = clifford(0, clifford(1, s));
    CHECK(max_abs(clifford(0, clifford(1, vs)) + s) == 0.0);
    for (int a = 0; a < 2; ++a) CHECK(max_abs(clifford(a, s) - gamma_oracle(a, s)) == 0.0);
    CHECK(max_abs(bilinear(s, c.pairing, s) - pairing_oracle(s, s)) == 0.0);
    CHECK_THROWS_AS(clifford(2, s), RangeError);
}

TEST_CASE("super Weyl shifts") {
    FixtureRng rng(3);
    GravitinoField chi = random_gravitino(rng, kTorus);
    SpinorField t = random_spinor(rng, kTorus, Parity::Odd);
    SpinorField t2 = random_spinor(rng, kTorus, Parity::Odd);
    SpinorField zero = SpinorField::zero(kTorus, kParams, Parity::Odd);

    CHECK(max_abs(super_weyl(chi, zero) - chi) == 0.0);
    GravitinoField pure = super_weyl(GravitinoField::zero(kTorus, kParams), t);
    for (int a = 0; a < 2; ++a) CHECK(max_abs(pure.chi[a] - gamma_oracle(a, t)) == 0.0);
    // gamma^a gamma_a t = 2t
    SpinorField trace = clifford(0, pure.chi[0]) + clifford(1, pure.chi[1]);
    CHECK(max_abs(trace - 2.0 * t) == 0.0);
    CHECK(max_abs(super_weyl(super_weyl(chi, t), t2) - super_weyl(chi, t + t2)) == 0.0);
    CHECK_THROWS_AS(super_weyl(chi, random_spinor(rng, kTorus, Parity::Even)), ParityError);
}

TEST_CASE("corrected spin connection") {
    FixtureRng rng(5);
    SurfaceGeometry flat = SurfaceGeometry::flat(kTorus, kParams);
    GravitinoField none = GravitinoField::zero(kTorus, kParams);
    SpinorField s = random_spinor(rng, kTorus, Parity::Odd, 3);

    for (int a = 0; a < 2; ++a) CHECK(max_abs(spin_connection_derivative(flat, none, s, a) - derivative(s, a)) == 0.0);

    SUBCASE("constant spinor picks up only the torsion term") {
        GravitinoField chi = random_gravitino(rng, kTorus);
        SpinorField c = constant_spinor(kTorus, GrassmannNumber::generator(kParams, 4),
                                        GrassmannNumber::generator(kParams, 5, -2.0));
        for (int a = 0; a < 2; ++a) {
            SpinorField trace = gamma_oracle(0, chi.chi[0]) + gamma_oracle(1, chi.chi[1]);
            GridField torsion = pairing_oracle(trace, chi.chi[a]);
            SpinorField expected = torsion * volume_oracle(c);
            CHECK(max_abs(spin_connection_derivative(flat, chi, c, a) - expected) < 1e-12);
            CHECK(max_abs(spin_connection_derivative(flat, chi, c, a, CliffordConvention::standard(),
                                                     TorsionFactor::Identity) -
                          torsion * c) < 1e-12);
        }
    }
    SUBCASE("parity bookkeeping of the torsion term") {
        GravitinoField chi{{constant_spinor(kTorus, GrassmannNumber::generator(kParams, 0),
                                            GrassmannNumber::generator(kParams, 1)),
                            constant_spinor(kTorus, GrassmannNumber::generator(kParams, 1, 3.0),
                                            GrassmannNumber::generator(kParams, 0, -1.0))}};
        SpinorField c = constant_spinor(kTorus, GrassmannNumber::generator(kParams, 2),
                                        GrassmannNumber::generator(kParams, 2, 0.5));
        for (int a = 0; a < 2; ++a) {
            SpinorField r = spin_connection_derivative(flat, chi, c, a);
            CHECK(max_abs(r) > 0.0);
            for (const auto& comp : r.c)
                for (const auto& [m, v] : comp.terms())
                    for (double x : v)
                        if (std::abs(x) > 1e-12) CHECK(m == Mask{0b111});
        }
    }
    SUBCASE("flat connection commutes with Clifford multiplication") {
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                CHECK(max_abs(spin_connection_derivative(flat, none, clifford(b, s), a) -
                              clifford(b, spin_connection_derivative(flat, none, s, a))) < 1e-10);
    }
}

TEST_CASE("Levi-Civita lift on a conformal frame") {
    // Frame e^{-u} delta: the Dirac operator satisfies
    // Dslash_{e^{2u} g}(e^{-u/2} psi) = e^{-3u/2} Dslash_g psi.
    Grid g = Grid::torus(32, 32);
    FixtureRng rng(7);
    Array x = g.coordinate(0), y = g.coordinate(1);
    Array u(x.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = 0.2 * std::sin(x[i]) + 0.1 * std::cos(y[i] + x[i]);
    SurfaceGeometry flat = SurfaceGeometry::flat(g, kParams);
    SurfaceGeometry conformal = flat;
    for (int a = 0; a < 2; ++a)
        for (int mu = 0; mu < 2; ++mu)
            conformal.frame[a][mu] = GridField::real(g, kParams, exp_of(u, -1.0)) * conformal.frame[a][mu];
    GravitinoField none = GravitinoField::zero(g, kParams);
    SpinorField psi = random_spinor(rng, g, Parity::Odd, 2);
    auto dirac = [&](const SurfaceGeometry& geo, const SpinorField& s) {
        return clifford(0, spin_connection_derivative(geo, none, s, 0)) +
               clifford(1, spin_connection_derivative(geo, none, s, 1));
    };
    SpinorField lhs = dirac(conformal, GridField::real(g, kParams, exp_of(u, -0.5)) * psi);
    SpinorField rhs = GridField::real(g, kParams, exp_of(u, -1.5)) * dirac(flat, psi);
    CHECK(max_abs(lhs - rhs) < 1e-10);

    // The lift is skew for the pairing: f_a <s,t> = <nabla s, t> + <s, nabla t>.
    SpinorField t = random_spinor(rng, g, Parity::Odd, 2);
    CliffordConvention c = CliffordConvention::standard();
    for (int a = 0; a < 2; ++a) {
        GridField lhs_a = conformal.along(a, bilinear(psi, c.pairing, t));
        GridField rhs_a = bilinear(spin_connection_derivative(conformal, none, psi, a), c.pairing, t) +
                          bilinear(psi, c.pairing, spin_connection_derivative(conformal, none, t, a));
        CHECK(max_abs(lhs_a - rhs_a) < 1e-10);
    }
}

TEST_CASE("SUSY variation of frame and gravitino") {
    FixtureRng rng(11);
    SurfaceGeometry flat = SurfaceGeometry::flat(kTorus, kParams);
    SpinorField q = random_spinor(rng, kTorus, Parity::Odd, 2, 0b110000);

    auto none = susy_metric_gravitino(flat, GravitinoField::zero(kTorus, kParams), q);
    for (int a = 0; a < 2; ++a) {
        for (int mu = 0; mu < 2; ++mu) CHECK(max_abs(none.frame[a][mu]) == 0.0);
        CHECK(max_abs(none.chi.chi[a] - derivative(q, a)) == 0.0);
    }

    GravitinoField chi = random_gravitino(rng, kTorus);
    auto zero = susy_metric_gravitino(flat, chi, SpinorField::zero(kTorus, kParams, Parity::Odd));
    for (int a = 0; a < 2; ++a) {
        for (int mu = 0; mu < 2; ++mu) CHECK(max_abs(zero.frame[a][mu]) == 0.0);
        CHECK(max_abs(zero.chi.chi[a]) == 0.0);
    }

    SUBCASE("constant data against the written formula") {
        GravitinoField cchi{{constant_spinor(kTorus, GrassmannNumber::generator(kParams, 0),
                                             GrassmannNumber::generator(kParams, 1, 2.0)),
                             constant_spinor(kTorus, GrassmannNumber::generator(kParams, 2, -1.0),
                                             GrassmannNumber::generator(kParams, 3))}};
        SpinorField cq = constant_spinor(kTorus, GrassmannNumber::generator(kParams, 4),
                                         GrassmannNumber::generator(kParams, 5, 0.5));
        auto v = susy_metric_gravitino(flat, cchi, cq);
        for (int a = 0; a < 2; ++a) {
            for (int mu = 0; mu < 2; ++mu) {
                // df_a = -2 <gamma^b q, chi_a> f_b with f_b = d_b
                GridField expected = -2.0 * pairing_oracle(gamma_oracle(mu, cq), cchi.chi[a]);
                CHECK(max_abs(v.frame[a][mu] - expected) < 1e-12);
            }
            SpinorField trace = gamma_oracle(0, cchi.chi[0]) + gamma_oracle(1, cchi.chi[1]);
            SpinorField expected = pairing_oracle(trace, cchi.chi[a]) * volume_oracle(cq);
            CHECK(max_abs(v.chi.chi[a] - expected) < 1e-12);
        }
        auto w = susy_metric_gravitino(flat, cchi, cq, CliffordConvention::standard(), SusyConvention::calibrated());
        for (int a = 0; a < 2; ++a)
            for (int mu = 0; mu < 2; ++mu) CHECK(max_abs(w.frame[a][mu] + v.frame[a][mu]) < 1e-12);
    }
    SUBCASE("output parities") {
        for (int t = 0; t < 5; ++t) {
            GravitinoField c = random_gravitino(rng, kTorus);
            SpinorField qq = random_spinor(rng, kTorus, Parity::Odd, 1, 0b110000);
            auto v = susy_metric_gravitino(flat, c, qq);
            for (int a = 0; a < 2; ++a) {
                for (int mu = 0; mu < 2; ++mu) CHECK(parity_of(v.frame[a][mu]) == Parity::Even);
                for (const auto& comp : v.chi.chi[a].c) CHECK(parity_of(comp) == Parity::Odd);
            }
        }
    }
    CHECK_THROWS_AS(susy_metric_gravitino(flat, chi, random_spinor(rng, kTorus, Parity::Even)), ParityError);
}

TEST_CASE("Weyl rescaling") {
    SurfaceGeometry flat = SurfaceGeometry::flat(kTorus, kParams);
    SurfaceGeometry same = weyl(flat, real_field(Array(kTorus.size(), 1.0)));
    for (int a = 0; a < 2; ++a)
        for (int mu = 0; mu < 2; ++mu) CHECK(max_abs(same.frame[a][mu] - flat.frame[a][mu]) < 1e-15);

    SurfaceGeometry four = weyl(flat, real_field(Array(kTorus.size(), 4.0)));
    for (int a = 0; a < 2; ++a)
        for (int mu = 0; mu < 2; ++mu) CHECK(max_abs(four.frame[a][mu] - 0.5 * flat.frame[a][mu]) < 1e-15);

    FixtureRng rng(13);
    Array lam = random_trig(rng, kTorus, 1, 0.2);
    for (double& v : lam) v += 2.0;
    GridField lambda = real_field(lam) + random_field(rng, kTorus, kParams, Parity::Even, 2, 1, 0.1, 0b0011);
    SurfaceGeometry scaled = weyl(flat, lambda);
    CHECK(max_abs(scaled.volume_density() - lambda * flat.volume_density()) < 1e-12);

    CHECK_THROWS_AS(weyl(flat, real_field(Array(kTorus.size(), -1.0))), RegimeError);
}
