#include "supersigma/spin_surface.hpp"

#include <algorithm>
#include <cmath>

#include "supersigma/errors.hpp"

namespace supersigma {

Mat2 matmul(const Mat2& a, const Mat2& b) {
    Mat2 r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) r[i][j] += a[i][k] * b[k][j];
    return r;
}

Mat2 transpose(const Mat2& a) { return {{{a[0][0], a[1][0]}, {a[0][1], a[1][1]}}}; }

CliffordConvention CliffordConvention::standard() {
    CliffordConvention c;
    c.gamma[0] = {{{1.0, 0.0}, {0.0, -1.0}}};
    c.gamma[1] = {{{0.0, 1.0}, {1.0, 0.0}}};
    c.pairing = c.volume();
    return c;
}

double CliffordConvention::clifford_defect() const {
    double worst = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Mat2 ab = matmul(gamma[a], gamma[b]), ba = matmul(gamma[b], gamma[a]);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    double target = (a == b && i == j) ? 2.0 : 0.0;
                    worst = std::max(worst, std::abs(ab[i][j] + ba[i][j] - target));
                }
        }
    return worst;
}

SpinorField SpinorField::zero(const Grid& grid, int generators, Parity parity) {
    return {{GridField(grid, generators), GridField(grid, generators)}, parity};
}

void validate(const SpinorField& s) {
    check_compatible(s.c[0], s.c[1]);
    if (s.parity == Parity::Mixed) throw ParityError("spinor fields carry a definite parity");
    for (const auto& comp : s.c)
        if (max_abs(comp) != 0.0 && parity_of(comp) != s.parity)
            throw ParityError(std::string("spinor component is not ") + to_string(s.parity));
}

SpinorField operator+(const SpinorField& a, const SpinorField& b) {
    if (a.parity != b.parity) throw ParityError("adding spinors of different parity");
    return {{a.c[0] + b.c[0], a.c[1] + b.c[1]}, a.parity};
}

SpinorField operator-(const SpinorField& a, const SpinorField& b) {
    if (a.parity != b.parity) throw ParityError("subtracting spinors of different parity");
    return {{a.c[0] - b.c[0], a.c[1] - b.c[1]}, a.parity};
}

SpinorField operator*(double k, const SpinorField& s) { return {{k * s.c[0], k * s.c[1]}, s.parity}; }

SpinorField operator*(const GridField& u, const SpinorField& s) { return {{u * s.c[0], u * s.c[1]}, s.parity}; }

SpinorField apply_matrix(const Mat2& m, const SpinorField& s) {
    SpinorField r = SpinorField::zero(s.grid(), s.generators(), s.parity);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (m[i][j] != 0.0) r.c[i] += m[i][j] * s.c[j];
    return r;
}

SpinorField derivative(const SpinorField& s, int axis) {
    return {{derivative(s.c[0], axis), derivative(s.c[1], axis)}, s.parity};
}

double max_abs(const SpinorField& s) { return std::max(max_abs(s.c[0]), max_abs(s.c[1])); }

GridField bilinear(const SpinorField& s, const Mat2& m, const SpinorField& t) {
    GridField r(s.grid(), s.generators());
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (m[i][j] != 0.0) r += m[i][j] * (s.c[i] * t.c[j]);
    return r;
}

GravitinoField GravitinoField::zero(const Grid& grid, int generators) {
    return {{SpinorField::zero(grid, generators, Parity::Odd), SpinorField::zero(grid, generators, Parity::Odd)}};
}

void validate(const GravitinoField& chi) {
    for (const auto& s : chi.chi) {
        validate(s);
        if (s.parity != Parity::Odd) throw ParityError("the gravitino is odd");
    }
    check_compatible(chi.chi[0].c[0], chi.chi[1].c[0]);
}

GravitinoField operator+(const GravitinoField& a, const GravitinoField& b) {
    return {{a.chi[0] + b.chi[0], a.chi[1] + b.chi[1]}};
}

GravitinoField operator-(const GravitinoField& a, const GravitinoField& b) {
    return {{a.chi[0] - b.chi[0], a.chi[1] - b.chi[1]}};
}

double max_abs(const GravitinoField& chi) { return std::max(max_abs(chi.chi[0]), max_abs(chi.chi[1])); }

SurfaceGeometry SurfaceGeometry::flat(const Grid& grid, int generators) {
    if (grid.dim() != 2) throw ShapeError("surfaces need a 2D grid");
    SurfaceGeometry g;
    g.grid = grid;
    for (int a = 0; a < 2; ++a)
        for (int mu = 0; mu < 2; ++mu)
            g.frame[a][mu] = GridField::real(grid, generators, Array(grid.size(), a == mu ? 1.0 : 0.0));
    return g;
}

GridField SurfaceGeometry::along(int a, const GridField& u) const {
    return frame[a][0] * derivative(u, 0) + frame[a][1] * derivative(u, 1);
}

SpinorField SurfaceGeometry::along(int a, const SpinorField& s) const {
    return {{along(a, s.c[0]), along(a, s.c[1])}, s.parity};
}

GridField SurfaceGeometry::frame_determinant() const {
    return frame[0][0] * frame[1][1] - frame[0][1] * frame[1][0];
}

GridField SurfaceGeometry::volume_density() const {
    GridField d = frame_determinant();
    Array b = body(d);
    for (double v : b)
        if (v == 0.0) throw RegimeError("frame is degenerate");
    GridField inv = inverse(d);
    if (b[0] < 0.0) inv *= -1.0;
    return inv;
}

bool SurfaceGeometry::is_uniform() const {
    for (const auto& row : frame)
        for (const auto& e : row)
            for (const auto& [m, a] : e.terms())
                if (std::any_of(a.begin(), a.end(), [&](double x) { return x != a[0]; })) return false;
    return true;
}

std::array<GridField, 2> SurfaceGeometry::structure_coefficients() const {
    if (is_uniform()) return {GridField(grid, generators()), GridField(grid, generators())};
    // w^nu = f_1(e_2^nu) - f_2(e_1^nu), then c^a = w^nu (e^{-1})_nu^a.
    std::array<GridField, 2> w;
    for (int nu = 0; nu < 2; ++nu) w[nu] = along(0, frame[1][nu]) - along(1, frame[0][nu]);
    GridField rdet = inverse(frame_determinant());
    // e^{-1} = (1/det) [[e_11, -e_01], [-e_10, e_00]] in [nu][a] layout.
    std::array<GridField, 2> c;
    c[0] = rdet * (w[0] * frame[1][1] - w[1] * frame[1][0]);
    c[1] = rdet * (w[1] * frame[0][0] - w[0] * frame[0][1]);
    return c;
}

void validate(const SurfaceGeometry& geom) {
    if (geom.grid.dim() != 2) throw ShapeError("surfaces need a 2D grid");
    for (const auto& row : geom.frame)
        for (const auto& e : row) {
            if (!(e.grid() == geom.grid)) throw ShapeError("frame sampled on a different grid");
            if (max_abs(e) != 0.0 && parity_of(e) != Parity::Even) throw ParityError("frame must be even");
        }
    for (double v : body(geom.frame_determinant()))
        if (v == 0.0) throw RegimeError("frame body is not invertible");
}

SpinorField clifford(int a, const SpinorField& s, const CliffordConvention& conv) {
    if (a < 0 || a > 1) throw RangeError("frame index must be 0 or 1");
    return apply_matrix(conv.gamma[a], s);
}

GravitinoField super_weyl(const GravitinoField& chi, const SpinorField& t, const CliffordConvention& conv) {
    validate(t);
    if (t.parity != Parity::Odd) throw ParityError("super Weyl parameter must be odd");
    return {{chi.chi[0] + clifford(0, t, conv), chi.chi[1] + clifford(1, t, conv)}};
}

GridField gravitino_torsion(const GravitinoField& chi, int a, const CliffordConvention& conv) {
    SpinorField trace = clifford(0, chi.chi[0], conv) + clifford(1, chi.chi[1], conv);
    return bilinear(trace, conv.pairing, chi.chi[a]);
}

SpinorField spin_connection_derivative(const SurfaceGeometry& geom, const GravitinoField& chi, const SpinorField& s,
                                       int a, const CliffordConvention& conv, TorsionFactor factor) {
    if (a < 0 || a > 1) throw RangeError("frame index must be 0 or 1");
    SpinorField r = geom.along(a, s);
    auto c = geom.structure_coefficients();
    if (max_abs(c[a]) != 0.0) r = r + (0.5 * c[a]) * apply_matrix(conv.volume(), s);
    GridField torsion = gravitino_torsion(chi, a, conv);
    if (max_abs(torsion) != 0.0) {
        SpinorField ms = factor == TorsionFactor::VolumeElement ? apply_matrix(conv.volume(), s) : s;
        r = r + torsion * ms;
    }
    return r;
}

MetricGravitinoVariation susy_metric_gravitino(const SurfaceGeometry& geom, const GravitinoField& chi,
                                               const SpinorField& q, const CliffordConvention& conv,
                                               const SusyConvention& susy) {
    validate(q);
    validate(chi);
    if (q.parity != Parity::Odd) throw ParityError("SUSY parameter q must be odd");
    MetricGravitinoVariation v;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            v.frame_mix[a][b] = susy.frame_coefficient * bilinear(clifford(b, q, conv), conv.pairing, chi.chi[a]);
    for (int a = 0; a < 2; ++a)
        for (int mu = 0; mu < 2; ++mu)
            v.frame[a][mu] = v.frame_mix[a][0] * geom.frame[0][mu] + v.frame_mix[a][1] * geom.frame[1][mu];
    for (int a = 0; a < 2; ++a) v.chi.chi[a] = spin_connection_derivative(geom, chi, q, a, conv, susy.torsion);
    return v;
}

SurfaceGeometry weyl(const SurfaceGeometry& geom, const GridField& lambda) {
    if (max_abs(lambda) != 0.0 && parity_of(lambda) != Parity::Even) throw ParityError("Weyl factor must be even");
    for (double v : body(lambda))
        if (!(v > 0.0)) throw RegimeError("Weyl factor needs a positive body");
    GridField scale = pow(lambda, -0.5);
    SurfaceGeometry r = geom;
    for (auto& row : r.frame)
        for (auto& e : row) e = scale * e;
    return r;
}

}  // namespace supersigma
