#pragma once

/**
 * @file spin_surface.hpp
 * @brief Frames, real rank-2 spinors and the gravitino on a periodic surface.
 *
 * The frame is stored as e_a^mu with f_a = e_a^mu d/dx^mu. Spinor fields are
 * pairs of Grassmann-valued grid fields; the pairing is <s,t> = s^T C t with
 * the factors kept in that order.
 */

#include <array>

#include "supersigma/grid_field.hpp"

namespace supersigma {

using Mat2 = std::array<std::array<double, 2>, 2>;

Mat2 matmul(const Mat2& a, const Mat2& b);
Mat2 transpose(const Mat2& a);

struct CliffordConvention {
    std::array<Mat2, 2> gamma;
    Mat2 pairing;

    // gamma^1 = diag(1,-1), gamma^2 = [[0,1],[1,0]], C = gamma^1 gamma^2.
    static CliffordConvention standard();

    Mat2 volume() const { return matmul(gamma[0], gamma[1]); }
    // Largest entry of gamma^a gamma^b + gamma^b gamma^a - 2 delta^ab.
    double clifford_defect() const;
};

struct SpinorField {
    std::array<GridField, 2> c;
    Parity parity = Parity::Odd;

    static SpinorField zero(const Grid& grid, int generators, Parity parity);
    const Grid& grid() const { return c[0].grid(); }
    int generators() const { return c[0].generators(); }
};

void validate(const SpinorField& s);

SpinorField operator+(const SpinorField& a, const SpinorField& b);
SpinorField operator-(const SpinorField& a, const SpinorField& b);
SpinorField operator*(double k, const SpinorField& s);
// Even field times spinor (keeps the spinor's parity).
SpinorField operator*(const GridField& u, const SpinorField& s);
SpinorField apply_matrix(const Mat2& m, const SpinorField& s);
SpinorField derivative(const SpinorField& s, int axis);
double max_abs(const SpinorField& s);
// s^T M t, factors in that order.
GridField bilinear(const SpinorField& s, const Mat2& m, const SpinorField& t);

struct GravitinoField {
    std::array<SpinorField, 2> chi;  // chi_a = chi(f_a)

    static GravitinoField zero(const Grid& grid, int generators);
};

void validate(const GravitinoField& chi);
GravitinoField operator+(const GravitinoField& a, const GravitinoField& b);
GravitinoField operator-(const GravitinoField& a, const GravitinoField& b);
double max_abs(const GravitinoField& chi);

using FrameField = std::array<std::array<GridField, 2>, 2>;  // [a][mu]

struct SurfaceGeometry {
    Grid grid;
    FrameField frame;
    int orientation = 1;

    static SurfaceGeometry flat(const Grid& grid, int generators);

    int generators() const { return frame[0][0].generators(); }
    // f_a(u)
    GridField along(int a, const GridField& u) const;
    SpinorField along(int a, const SpinorField& s) const;
    GridField frame_determinant() const;
    // dvol_g / dx^1 dx^2 = 1 / det(e)
    GridField volume_density() const;
    // True when every frame entry is constant over the grid.
    bool is_uniform() const;
    // c^a with [f_1, f_2] = c^a f_a.
    std::array<GridField, 2> structure_coefficients() const;
};

void validate(const SurfaceGeometry& geom);

// Clifford factor multiplying <gamma^b chi_b, chi_a> q in the corrected
// connection.
enum class TorsionFactor { VolumeElement, Identity };

SpinorField clifford(int a, const SpinorField& s, const CliffordConvention& conv = CliffordConvention::standard());

GravitinoField super_weyl(const GravitinoField& chi, const SpinorField& t,
                          const CliffordConvention& conv = CliffordConvention::standard());

// <gamma^b chi_b, chi_a>
GridField gravitino_torsion(const GravitinoField& chi, int a,
                            const CliffordConvention& conv = CliffordConvention::standard());

// f_a(s) + 1/2 c^a gamma^1 gamma^2 s + <gamma^b chi_b, chi_a> M s, M set by
// the torsion factor.
SpinorField spin_connection_derivative(const SurfaceGeometry& geom, const GravitinoField& chi, const SpinorField& s,
                                       int a, const CliffordConvention& conv = CliffordConvention::standard(),
                                       TorsionFactor factor = TorsionFactor::VolumeElement);

struct SusyConvention {
    double frame_coefficient = -2.0;  // df_a = k <gamma^b q, chi_a> f_b
    TorsionFactor torsion = TorsionFactor::VolumeElement;
    bool transport_gravitino = false;  // chi_a follows the varied frame

    static SusyConvention printed() { return {}; }
    static SusyConvention calibrated() { return {2.0, TorsionFactor::Identity, true}; }
};

struct MetricGravitinoVariation {
    std::array<std::array<GridField, 2>, 2> frame_mix;  // H_a^b with df_a = H_a^b f_b
    FrameField frame;                                   // de_a^mu
    GravitinoField chi;                                 // (d chi)(f_a) = nabla^S_{f_a} q
};

MetricGravitinoVariation susy_metric_gravitino(const SurfaceGeometry& geom, const GravitinoField& chi,
                                               const SpinorField& q,
                                               const CliffordConvention& conv = CliffordConvention::standard(),
                                               const SusyConvention& susy = SusyConvention::printed());

// Frame rescaled by lambda^{-1/2}, so g -> lambda g.
SurfaceGeometry weyl(const SurfaceGeometry& geom, const GridField& lambda);

}  // namespace supersigma
