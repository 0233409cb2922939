#pragma once

/**
 * @file deformations.hpp
 * @brief Infinitesimal deformations of metric and gravitino on the flat
 * torus, split into Weyl, super Weyl, diffeomorphism, SUSY and true parts.
 *
 * Parameters (lambda, X, q, t) range over real Fourier modes |k_a| <= n/4
 * times Grassmann monomials; the split is the least-squares projection in
 * L^2 with the Euclidean inner product on frame components. Null directions
 * (Killing fields, constant spinors) are resolved by the minimum-norm
 * solution with relative singular-value cutoff 1e-10.
 */

#include <functional>

#include "supersigma/sigma2d.hpp"

namespace supersigma {

struct VectorField {
    std::array<GridField, 2> x;  // components along d/dx^1, d/dx^2

    static VectorField zero(const Grid& grid, int generators);
};

// Samples X on the grid; rejects fields that do not close up on the torus.
VectorField sample_vector_field(const Grid& grid, int generators,
                                const std::function<std::array<double, 2>(double, double)>& X);

// (L_X g)_ab = d_a X_b + d_b X_a for the flat metric.
SymmetricTensor lie_derivative_metric(const SurfaceGeometry& geom, const VectorField& X);

// Spinorial Lie derivative of the gravitino on the flat torus:
// X(chi_a) + (d_a X^b) chi_b - 1/4 (d_1 X^2 - d_2 X^1) gamma^1 gamma^2 chi_a.
GravitinoField lie_derivative_gravitino(const SurfaceGeometry& geom, const GravitinoField& chi, const VectorField& X);

// Metric part of the SUSY variation: dg_ab = -(H_ab + H_ba) for df_a = H_a^b f_b.
SymmetricTensor susy_metric_image(const SurfaceGeometry& geom, const GravitinoField& chi, const SpinorField& q,
                                  const Conventions& conv = Conventions::calibrated());
// Gravitino part of the SUSY variation, transport included when enabled.
GravitinoField susy_gravitino_image(const SurfaceGeometry& geom, const GravitinoField& chi, const SpinorField& q,
                                    const Conventions& conv = Conventions::calibrated());

SymmetricTensor operator+(const SymmetricTensor& a, const SymmetricTensor& b);
SymmetricTensor operator-(const SymmetricTensor& a, const SymmetricTensor& b);
SymmetricTensor operator*(const GridField& u, const SymmetricTensor& t);
double max_abs(const SymmetricTensor& t);

struct MetricDecomposition {
    GridField lambda;
    VectorField X;
    SpinorField q;
    SymmetricTensor D;  // true part
    double reassembly = 0.0;
    double trace = 0.0;       // |tr D|
    double divergence = 0.0;  // |div D|
    int null_directions = 0;
};

struct GravitinoDecomposition {
    SpinorField t;
    SpinorField q;
    VectorField X;  // only populated when chi != 0
    GravitinoField D;
    double reassembly = 0.0;
    double gamma_trace = 0.0;  // |gamma^a D_a|
    double divergence = 0.0;   // |d_a D_a|
    int null_directions = 0;
};

// dg = lambda g + L_X g + susy(q) + D
MetricDecomposition decompose_metric(const SurfaceGeometry& geom, const GravitinoField& chi, const SymmetricTensor& dg,
                                     const Conventions& conv = Conventions::calibrated());
// dchi = gamma t + L_X chi + susy(q) + D
GravitinoDecomposition decompose_gravitino(const SurfaceGeometry& geom, const GravitinoField& chi,
                                           const GravitinoField& dchi,
                                           const Conventions& conv = Conventions::calibrated());

struct DeformationDimensions {
    int even = 0;
    int odd = 0;
};

// Real dimensions of the band-limited kernels of (trace, divergence) on
// symmetric tensors and of (gamma-trace, divergence) on gravitino fields.
DeformationDimensions true_deformation_dimensions(const SurfaceGeometry& geom);

// Number of real Fourier modes per axis used for the parameter spaces.
int fourier_cutoff(const Grid& grid);

}  // namespace supersigma
