#pragma once

/**
 * @file toy_model.hpp
 * @brief The 1|1-dimensional sigma model on the circle with target R.
 *
 * The orientation sigma selects D = d_eta + sigma eta d_x, the matching
 * generator Q = q(d_eta - sigma eta d_x) and the variation
 * (dphi, dpsi) = (q psi, sigma q phi'). The component action
 * 1/2 int phi'^2 + psi psi' is invariant and equals the superfield action
 * only for sigma = -1 (kToyOrientation); sigma = +1 is kept for the
 * operators as they are usually written.
 */

#include <vector>

#include "supersigma/superdomain.hpp"

namespace supersigma {

inline constexpr int kToyOrientation = -1;

struct ToyFields {
    GridField phi;  // even
    GridField psi;  // odd
};

void validate(const ToyFields& f);

// 1/2 int phi'^2 + psi psi' dx
GrassmannNumber toy_action_component(const ToyFields& f);

// -1/2 int d_x Phi . D Phi [dx deta]
GrassmannNumber toy_action_superfield(const SuperFunction& Phi, int orientation = kToyOrientation);

// Phi = phi + eta psi
SuperFunction toy_superfield(const ToyFields& f);

// (i^# Phi, i^# D Phi)
ToyFields toy_components(const SuperFunction& Phi, const Embedding& i, int orientation = kToyOrientation);

ToyFields toy_susy(const ToyFields& f, const GrassmannNumber& q, int orientation = 1);

// Largest coefficient of the part of A(f + df) - A(f) that is linear in q.
double toy_invariance_residual(const ToyFields& f, const GrassmannNumber& q, int orientation = kToyOrientation);

// Keeps the monomials that contain exactly one generator of `support`.
GrassmannNumber linear_part(const GrassmannNumber& a, Mask support);
Mask generator_support(const GrassmannNumber& a);

struct ToyCalibration {
    int orientation = 0;
    double residual_plus = 0.0;   // worst residual at sigma = +1
    double residual_minus = 0.0;  // worst residual at sigma = -1
};

// Picks the orientation under which the component action is invariant on
// every fixture.
ToyCalibration calibrate_toy_orientation(const std::vector<ToyFields>& battery, const GrassmannNumber& q,
                                         double tolerance = 1e-6);

}  // namespace supersigma
