#include "supersigma/toy_model.hpp"

#include <algorithm>

#include "supersigma/berezin.hpp"
#include "supersigma/errors.hpp"

namespace supersigma {

void validate(const ToyFields& f) {
    check_compatible(f.phi, f.psi);
    if (f.phi.grid().dim() != 1) throw ShapeError("toy fields live on the circle");
    if (max_abs(f.phi) != 0.0 && parity_of(f.phi) != Parity::Even) throw ParityError("phi must be even");
    if (max_abs(f.psi) != 0.0 && parity_of(f.psi) != Parity::Odd) throw ParityError("psi must be odd");
}

GrassmannNumber toy_action_component(const ToyFields& f) {
    validate(f);
    GridField dphi = derivative(f.phi, 0);
    GridField density = dphi * dphi + f.psi * derivative(f.psi, 0);
    return 0.5 * integrate(density);
}

GrassmannNumber toy_action_superfield(const SuperFunction& Phi, int orientation) {
    if (Phi.even_dim() != 1 || Phi.odd_dim() != 1) throw DimensionError("toy superfield lives on R^{1|1}");
    SuperFunction density = partial_even(Phi, 0) * apply_D(Phi, orientation);
    return -0.5 * berezin_integrate(density, BerezinDomain(Phi.grid(), 1));
}

SuperFunction toy_superfield(const ToyFields& f) {
    validate(f);
    SuperFunction Phi = SuperFunction::lift(f.phi, 1);
    Phi.add_coefficient(1, f.psi);
    return Phi;
}

ToyFields toy_components(const SuperFunction& Phi, const Embedding& i, int orientation) {
    return {restrict(Phi, i), restrict(apply_D(Phi, orientation), i)};
}

ToyFields toy_susy(const ToyFields& f, const GrassmannNumber& q, int orientation) {
    validate(f);
    if (!q.is_zero() && parity_of(q) != Parity::Odd) throw ParityError("SUSY parameter q must be odd");
    return {q * f.psi, static_cast<double>(orientation) * (q * derivative(f.phi, 0))};
}

Mask generator_support(const GrassmannNumber& a) {
    Mask s = 0;
    for (const auto& t : a.terms()) s |= t.first;
    return s;
}

GrassmannNumber linear_part(const GrassmannNumber& a, Mask support) {
    GrassmannNumber r(a.generators());
    for (const auto& [m, c] : a.terms())
        if (mask_degree(m & support) == 1) r.add_term(m, c);
    return r;
}

double toy_invariance_residual(const ToyFields& f, const GrassmannNumber& q, int orientation) {
    ToyFields d = toy_susy(f, q, orientation);
    ToyFields moved{f.phi + d.phi, f.psi + d.psi};
    GrassmannNumber delta = toy_action_component(moved) - toy_action_component(f);
    return max_abs(linear_part(delta, generator_support(q)));
}

ToyCalibration calibrate_toy_orientation(const std::vector<ToyFields>& battery, const GrassmannNumber& q,
                                         double tolerance) {
    if (battery.empty()) throw CalibrationError("calibration battery is empty");
    ToyCalibration c;
    for (const auto& f : battery) {
        c.residual_plus = std::max(c.residual_plus, toy_invariance_residual(f, q, 1));
        c.residual_minus = std::max(c.residual_minus, toy_invariance_residual(f, q, -1));
    }
    bool plus = c.residual_plus < tolerance, minus = c.residual_minus < tolerance;
    if (plus && minus) throw CalibrationError("underdetermined: every orientation is invariant on this battery");
    if (!plus && !minus) throw CalibrationError("no orientation makes the toy action invariant");
    c.orientation = plus ? 1 : -1;
    return c;
}

}  // namespace supersigma
