#pragma once

/**
 * @file sigma2d.hpp
 * @brief The two-dimensional supersymmetric sigma model in components and,
 * for a flat target on the flat torus, in superfields.
 *
 * Component fields carry one entry per target coordinate. A flat target is
 * R^d; the round sphere of curvature K is handled through its embedding in
 * R^3, with tangent vectors stored as ambient 3-vectors.
 */

#include <array>
#include <json.hpp>
#include <vector>

#include "supersigma/fixtures.hpp"
#include "supersigma/spin_surface.hpp"
#include "supersigma/superdomain.hpp"

namespace supersigma {

struct Target {
    enum class Kind { Flat, Sphere };
    Kind kind = Kind::Flat;
    int dim = 1;             // number of ambient coordinates
    double curvature = 0.0;  // K for the sphere

    static Target flat(int d) { return {Kind::Flat, d, 0.0}; }
    static Target sphere(double K);
    bool is_flat() const { return kind == Kind::Flat; }
};

struct ComponentFields {
    // phi^i = winding[i] . x + phi[i], with phi[i] periodic.
    std::vector<GridField> phi;
    std::vector<std::array<double, 2>> winding;
    std::vector<SpinorField> psi;  // psi[i].c[alpha] = psi^i_alpha
    std::vector<GridField> F;

    static ComponentFields zero(const Grid& grid, int generators, int target_dim);
    int target_dim() const { return static_cast<int>(phi.size()); }
    const Grid& grid() const { return phi.at(0).grid(); }
    int generators() const { return phi.at(0).generators(); }
    bool has_winding() const;
};

void validate(const ComponentFields& f, const Target& target);
ComponentFields operator+(const ComponentFields& a, const ComponentFields& b);
double max_abs(const ComponentFields& f);
ComponentFields extend(const ComponentFields& f, int generators);

struct ActionCoefficients {
    // Dirichlet, Dirac, auxiliary, gravitino-current, quartic gravitino, curvature.
    std::array<double, 6> c{1.0, 1.0, -0.25, 2.0, 0.5, 1.0 / 6.0};
    int s1 = 1;  // sign of dphi = <q, psi>
    int s2 = 1;  // sign of dpsi

    static ActionCoefficients printed() { return {}; }
    static ActionCoefficients calibrated();
    bool operator==(const ActionCoefficients&) const = default;
};

struct Conventions {
    ActionCoefficients action;
    SusyConvention susy;
    int toy_orientation = 1;

    static Conventions printed();
    static Conventions calibrated();
};

bool operator==(const Conventions& a, const Conventions& b);
nlohmann::json to_json(const Conventions& c);
Conventions conventions_from_json(const nlohmann::json& j);

// f_a(phi^i), winding included.
GridField frame_derivative(const SurfaceGeometry& geom, const ComponentFields& f, int i, int a);

// gamma^a nabla_{f_a} s for a single spinor.
SpinorField dirac(const SurfaceGeometry& geom, const GravitinoField& chi, const SpinorField& s,
                  TorsionFactor factor = TorsionFactor::VolumeElement);
// Dirac operator on phi^*TN-valued spinors; sphere targets project onto the
// tangent plane at phi.
std::vector<SpinorField> dirac(const SurfaceGeometry& geom, const GravitinoField& chi, const ComponentFields& f,
                               const Target& target, TorsionFactor factor = TorsionFactor::VolumeElement);

// The six weighted Lagrangian terms, each already multiplied by dvol.
std::array<GridField, 6> lagrangian_terms(const SurfaceGeometry& geom, const GravitinoField& chi,
                                          const ComponentFields& f, const Target& target,
                                          const Conventions& conv = Conventions::calibrated());
GridField lagrangian_density(const SurfaceGeometry& geom, const GravitinoField& chi, const ComponentFields& f,
                             const Target& target, const Conventions& conv = Conventions::calibrated());
GrassmannNumber action_component(const SurfaceGeometry& geom, const GravitinoField& chi, const ComponentFields& f,
                                 const Target& target, const Conventions& conv = Conventions::calibrated());

// Flat R^{2|2}: D_alpha = d/deta^alpha - eta^beta (C gamma^a)_{beta alpha} d_a.
SuperFunction flat_D(const SuperFunction& f, int alpha);
// eps^{ab} D_a D_b f
SuperFunction d_laplace_flat(const SuperFunction& f);
// -1/2 int eps^{ab} <D_a Phi, D_b Phi> [d^2x d^2eta]
GrassmannNumber action_superfield_flat(const std::vector<SuperFunction>& Phi);
// Phi^i with the given components: phi = i^*Phi, psi_a = i^*D_a Phi, F = i^*Delta Phi.
std::vector<SuperFunction> superfield_flat(const ComponentFields& f);
ComponentFields components_flat(const std::vector<SuperFunction>& Phi);

// (dphi, dpsi) for F = 0 and a flat target; dF is left zero.
ComponentFields susy_fields(const ComponentFields& f, const GravitinoField& chi, const SpinorField& q,
                            const SurfaceGeometry& geom, const Target& target,
                            const ActionCoefficients& coeffs = ActionCoefficients::calibrated());

// Largest coefficient of the part of A(fields + d, metric + d, chi + d) - A
// linear in the generators of q. Those generators must not occur elsewhere.
double susy_invariance_residual(const SurfaceGeometry& geom, const GravitinoField& chi, const ComponentFields& f,
                                const SpinorField& q, const Target& target,
                                const Conventions& conv = Conventions::calibrated());

struct SusyFixture {
    SurfaceGeometry geom;
    GravitinoField chi;
    ComponentFields fields;
    SpinorField q;
};

// Generators of the standard SUSY fixtures: psi on 0-1, chi on 2-6, q = xi_7 s.
inline constexpr int kSusyGenerators = 8;

// Band-limited fields on a flat target; phi even and F even with support in
// `allowed`, psi odd.
ComponentFields random_component_fields(FixtureRng& rng, const Grid& grid, int generators, int target_dim,
                                        int max_mode, Mask allowed, bool with_F);
// Flat frame, F = 0; chi = 0 unless `gravitino`.
SusyFixture random_susy_fixture(FixtureRng& rng, const Grid& grid, bool gravitino, int max_mode = 1);
std::vector<SusyFixture> susy_battery(std::uint64_t seed, const Grid& grid, int count, bool gravitino);

struct ConventionTrial {
    Conventions conventions;
    double residual = 0.0;
    int deviations = 0;  // switches away from the printed values
};

struct ConventionCalibration {
    Conventions chosen;
    double residual = 0.0;
    double runner_up = 0.0;  // best residual among the rejected assignments
    std::vector<ConventionTrial> trials;
};

// Searches signs of s1, s2, c4, c5, the frame variation, the torsion factor
// and gravitino transport; keeps the invariant assignment closest to the
// printed one.
ConventionCalibration calibrate_conventions(const std::vector<SusyFixture>& battery, const Target& target,
                                            double tolerance = 1e-6);

struct SymmetricTensor {
    GridField t11, t12, t22;  // frame components
};

// delta A = int delta g^{ab} T_ab dvol, by central differences of the
// density under uniform symmetric frame perturbations.
SymmetricTensor energy_momentum(const SurfaceGeometry& geom, const GravitinoField& chi, const ComponentFields& f,
                                const Target& target, const Conventions& conv = Conventions::calibrated(),
                                double step = 1e-5);
// d phi (x) d phi - 1/2 |d phi|^2 g
SymmetricTensor energy_momentum_dirichlet(const SurfaceGeometry& geom, const ComponentFields& f);

struct TensorResiduals {
    double trace = 0.0;
    double divergence = 0.0;
    double antiholomorphic = 0.0;  // |d_zbar T_zz|
};

// Flat-torus residuals; derivatives along coordinate axes.
TensorResiduals tensor_residuals(const SymmetricTensor& T);

// delta A = int delta chi_{a alpha} J_{a alpha} dvol, extracted exactly.
GravitinoField super_current(const SurfaceGeometry& geom, const GravitinoField& chi, const ComponentFields& f,
                             const Target& target, const Conventions& conv = Conventions::calibrated());

// gamma^a J_a
SpinorField gamma_trace(const GravitinoField& J);
// J_a - 1/2 gamma_a gamma^b J_b
GravitinoField gamma_traceless(const GravitinoField& J);
// 1/2 (d_1 + gamma^1 gamma^2 d_2) of the traceless J_1; zero iff the
// spin-3/2 part is holomorphic.
SpinorField spin32_antiholomorphic(const GravitinoField& J);

struct FlowResult {
    ComponentFields fields;
    std::vector<double> energy;  // per step, starting with the initial map
    int steps = 0;
    double gradient = 0.0;  // sup norm of the last gradient
    bool converged = false;
};

// Dirichlet energy int |d phi|^2 dvol of the body of phi.
double dirichlet_energy(const SurfaceGeometry& geom, const ComponentFields& f);

// Explicit gradient descent phi += 2 dt tau(phi) on the body of phi.
FlowResult harmonic_flow(const SurfaceGeometry& geom, const ComponentFields& initial, const Target& target, int steps,
                         double dt, double tolerance = 1e-10);

}  // namespace supersigma
