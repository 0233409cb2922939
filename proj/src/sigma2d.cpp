#include "supersigma/sigma2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "supersigma/berezin.hpp"
#include "supersigma/errors.hpp"
#include "supersigma/toy_model.hpp"

namespace supersigma {

namespace {

const CliffordConvention& clifford_standard() {
    static const CliffordConvention c = CliffordConvention::standard();
    return c;
}

bool has_parity(const GridField& f, Parity p) { return max_abs(f) == 0.0 || parity_of(f) == p; }

Mask support_of(const GridField& f) {
    Mask s = 0;
    for (const auto& [m, a] : f.terms())
        if (std::any_of(a.begin(), a.end(), [](double x) { return x != 0.0; })) s |= m;
    return s;
}

Mask support_of(const SpinorField& s) { return support_of(s.c[0]) | support_of(s.c[1]); }

SpinorField extend(const SpinorField& s, int n) { return {{extend(s.c[0], n), extend(s.c[1], n)}, s.parity}; }

GravitinoField extend(const GravitinoField& chi, int n) { return {{extend(chi.chi[0], n), extend(chi.chi[1], n)}}; }

SurfaceGeometry extend(const SurfaceGeometry& geom, int n) {
    SurfaceGeometry r = geom;
    for (auto& row : r.frame)
        for (auto& e : row) e = extend(e, n);
    return r;
}

GridField zero_like(const ComponentFields& f) { return GridField(f.grid(), f.generators()); }

// e_a -> e_a + eps P_ab e_b
SurfaceGeometry perturb_frame(const SurfaceGeometry& geom, const Mat2& p, double eps) {
    SurfaceGeometry r = geom;
    for (int a = 0; a < 2; ++a)
        for (int mu = 0; mu < 2; ++mu)
            for (int b = 0; b < 2; ++b)
                if (p[a][b] != 0.0) r.frame[a][mu] += (eps * p[a][b]) * geom.frame[b][mu];
    return r;
}

// Target inner product of psi_alpha and psi_beta.
GridField target_pairing(const ComponentFields& f, int alpha, int beta) {
    GridField r = zero_like(f);
    for (const auto& s : f.psi) r += s.c[alpha] * s.c[beta];
    return r;
}

int epsilon(int a, int b) { return a == b ? 0 : (a == 0 ? 1 : -1); }

}  // namespace

Target Target::sphere(double K) {
    if (!(K > 0.0)) throw RangeError("sphere curvature must be positive");
    return {Kind::Sphere, 3, K};
}

ComponentFields ComponentFields::zero(const Grid& grid, int generators, int target_dim) {
    if (target_dim < 1) throw DimensionError("target dimension must be positive");
    ComponentFields f;
    for (int i = 0; i < target_dim; ++i) {
        f.phi.emplace_back(grid, generators);
        f.winding.push_back({0.0, 0.0});
        f.psi.push_back(SpinorField::zero(grid, generators, Parity::Odd));
        f.F.emplace_back(grid, generators);
    }
    return f;
}

bool ComponentFields::has_winding() const {
    for (const auto& w : winding)
        if (w[0] != 0.0 || w[1] != 0.0) return true;
    return false;
}

void validate(const ComponentFields& f, const Target& target) {
    const std::size_t d = f.phi.size();
    if (d == 0 || f.winding.size() != d || f.psi.size() != d || f.F.size() != d)
        throw ShapeError("component fields need one entry per target coordinate");
    if (static_cast<int>(d) != target.dim) throw DimensionError("component fields do not match the target dimension");
    if (f.grid().dim() != 2) throw ShapeError("component fields live on a surface");
    for (std::size_t i = 0; i < d; ++i) {
        check_compatible(f.phi[0], f.phi[i]);
        check_compatible(f.phi[0], f.F[i]);
        validate(f.psi[i]);
        check_compatible(f.phi[0], f.psi[i].c[0]);
        if (!has_parity(f.phi[i], Parity::Even)) throw ParityError("phi must be even");
        if (!has_parity(f.F[i], Parity::Even)) throw ParityError("F must be even");
        if (f.psi[i].parity != Parity::Odd) throw ParityError("psi must be odd");
    }
    if (target.kind == Target::Kind::Sphere) {
        if (f.has_winding()) throw RegimeError("sphere-valued maps carry no winding");
        Array r2(f.grid().size(), 0.0);
        for (const auto& p : f.phi) {
            Array b = body(p);
            for (std::size_t k = 0; k < b.size(); ++k) r2[k] += b[k] * b[k];
        }
        for (double v : r2)
            if (std::abs(v * target.curvature - 1.0) > 1e-8) throw RegimeError("phi leaves the sphere |x|^2 = 1/K");
    }
}

ComponentFields operator+(const ComponentFields& a, const ComponentFields& b) {
    if (a.phi.size() != b.phi.size()) throw DimensionError("adding fields with different targets");
    ComponentFields r = a;
    for (std::size_t i = 0; i < a.phi.size(); ++i) {
        r.phi[i] += b.phi[i];
        r.winding[i][0] += b.winding[i][0];
        r.winding[i][1] += b.winding[i][1];
        r.psi[i] = a.psi[i] + b.psi[i];
        r.F[i] += b.F[i];
    }
    return r;
}

double max_abs(const ComponentFields& f) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.phi.size(); ++i) {
        m = std::max({m, max_abs(f.phi[i]), max_abs(f.psi[i]), max_abs(f.F[i])});
        m = std::max({m, std::abs(f.winding[i][0]), std::abs(f.winding[i][1])});
    }
    return m;
}

ComponentFields extend(const ComponentFields& f, int generators) {
    ComponentFields r = f;
    for (std::size_t i = 0; i < f.phi.size(); ++i) {
        r.phi[i] = extend(f.phi[i], generators);
        r.psi[i] = extend(f.psi[i], generators);
        r.F[i] = extend(f.F[i], generators);
    }
    return r;
}

ActionCoefficients ActionCoefficients::calibrated() {
    ActionCoefficients c;
    c.c[3] = -2.0;
    c.c[4] = -0.5;
    return c;
}

Conventions Conventions::printed() { return {ActionCoefficients::printed(), SusyConvention::printed(), 1}; }

Conventions Conventions::calibrated() {
    return {ActionCoefficients::calibrated(), SusyConvention::calibrated(), kToyOrientation};
}

bool operator==(const Conventions& a, const Conventions& b) {
    return a.action == b.action && a.susy.frame_coefficient == b.susy.frame_coefficient &&
           a.susy.torsion == b.susy.torsion && a.susy.transport_gravitino == b.susy.transport_gravitino &&
           a.toy_orientation == b.toy_orientation;
}

nlohmann::json to_json(const Conventions& c) {
    return {{"action", {{"c", c.action.c}, {"s1", c.action.s1}, {"s2", c.action.s2}}},
            {"susy",
             {{"frame_coefficient", c.susy.frame_coefficient},
              {"torsion", c.susy.torsion == TorsionFactor::Identity ? "identity" : "volume_element"},
              {"transport_gravitino", c.susy.transport_gravitino}}},
            {"toy_orientation", c.toy_orientation}};
}

Conventions conventions_from_json(const nlohmann::json& j) {
    try {
        Conventions c;
        const auto& a = j.at("action");
        c.action.c = a.at("c").get<std::array<double, 6>>();
        c.action.s1 = a.at("s1").get<int>();
        c.action.s2 = a.at("s2").get<int>();
        const auto& s = j.at("susy");
        c.susy.frame_coefficient = s.at("frame_coefficient").get<double>();
        std::string torsion = s.at("torsion").get<std::string>();
        if (torsion == "identity")
            c.susy.torsion = TorsionFactor::Identity;
        else if (torsion == "volume_element")
            c.susy.torsion = TorsionFactor::VolumeElement;
        else
            throw ConfigError("unknown torsion factor '" + torsion + "'");
        c.susy.transport_gravitino = s.at("transport_gravitino").get<bool>();
        c.toy_orientation = j.at("toy_orientation").get<int>();
        for (int v : {c.action.s1, c.action.s2, c.toy_orientation})
            if (v != 1 && v != -1) throw ConfigError("signs must be +1 or -1");
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad conventions block: ") + e.what());
    }
}

GridField frame_derivative(const SurfaceGeometry& geom, const ComponentFields& f, int i, int a) {
    GridField r = geom.along(a, f.phi[i]);
    for (int mu = 0; mu < 2; ++mu)
        if (f.winding[i][mu] != 0.0) r += f.winding[i][mu] * geom.frame[a][mu];
    return r;
}

SpinorField dirac(const SurfaceGeometry& geom, const GravitinoField& chi, const SpinorField& s, TorsionFactor factor) {
    const auto& conv = clifford_standard();
    return clifford(0, spin_connection_derivative(geom, chi, s, 0, conv, factor), conv) +
           clifford(1, spin_connection_derivative(geom, chi, s, 1, conv, factor), conv);
}

std::vector<SpinorField> dirac(const SurfaceGeometry& geom, const GravitinoField& chi, const ComponentFields& f,
                               const Target& target, TorsionFactor factor) {
    const auto& conv = clifford_standard();
    const int d = f.target_dim();
    std::vector<SpinorField> out(d, SpinorField::zero(f.grid(), f.generators(), Parity::Odd));
    for (int a = 0; a < 2; ++a) {
        std::vector<SpinorField> v;
        for (int i = 0; i < d; ++i) v.push_back(spin_connection_derivative(geom, chi, f.psi[i], a, conv, factor));
        if (target.kind == Target::Kind::Sphere) {
            // v -> v - K phi <phi, v>
            SpinorField normal = SpinorField::zero(f.grid(), f.generators(), Parity::Odd);
            for (int j = 0; j < d; ++j) normal = normal + f.phi[j] * v[j];
            for (int i = 0; i < d; ++i) v[i] = v[i] - (target.curvature * f.phi[i]) * normal;
        }
        for (int i = 0; i < d; ++i) out[i] = out[i] + clifford(a, v[i], conv);
    }
    return out;
}

std::array<GridField, 6> lagrangian_terms(const SurfaceGeometry& geom, const GravitinoField& chi,
                                          const ComponentFields& f, const Target& target, const Conventions& conv) {
    validate(f, target);
    const auto& cl = clifford_standard();
    const auto& c = conv.action.c;
    const int d = f.target_dim();
    GridField dvol = geom.volume_density();
    std::array<GridField, 6> t;
    for (auto& x : t) x = zero_like(f);

    std::vector<std::array<GridField, 2>> dphi(d);
    for (int i = 0; i < d; ++i)
        for (int a = 0; a < 2; ++a) dphi[i][a] = frame_derivative(geom, f, i, a);

    for (int i = 0; i < d; ++i)
        for (int a = 0; a < 2; ++a) t[0] += dphi[i][a] * dphi[i][a];

    std::vector<SpinorField> dpsi = dirac(geom, chi, f, target, conv.susy.torsion);
    for (int i = 0; i < d; ++i) t[1] += bilinear(f.psi[i], cl.pairing, dpsi[i]);

    for (int i = 0; i < d; ++i) t[2] += f.F[i] * f.F[i];

    if (max_abs(chi) != 0.0) {
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                SpinorField gg = apply_matrix(matmul(cl.gamma[a], cl.gamma[b]), chi.chi[a]);
                for (int i = 0; i < d; ++i) t[3] += bilinear(gg, cl.pairing, f.psi[i]) * dphi[i][b];
            }
        GridField chichi = zero_like(f);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                chichi += bilinear(chi.chi[a], cl.pairing, apply_matrix(matmul(cl.gamma[b], cl.gamma[a]), chi.chi[b]));
        GridField psipsi = zero_like(f);
        for (int i = 0; i < d; ++i) psipsi += bilinear(f.psi[i], cl.pairing, f.psi[i]);
        t[4] = chichi * psipsi;
    }

    if (target.kind == Target::Kind::Sphere) {
        std::array<std::array<GridField, 2>, 2> p;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) p[a][b] = target_pairing(f, a, b);
        for (int al = 0; al < 2; ++al)
            for (int be = 0; be < 2; ++be)
                for (int ga = 0; ga < 2; ++ga)
                    for (int de = 0; de < 2; ++de) {
                        int e = epsilon(al, be) * epsilon(ga, de);
                        if (e == 0) continue;
                        // <R(psi_al, psi_ga) psi_de, psi_be>
                        GridField r = p[ga][de] * p[al][be] - p[al][de] * p[ga][be];
                        t[5] += (e * target.curvature) * r;
                    }
    }

    for (int k = 0; k < 6; ++k) t[k] = c[k] * (t[k] * dvol);
    return t;
}

GridField lagrangian_density(const SurfaceGeometry& geom, const GravitinoField& chi, const ComponentFields& f,
                             const Target& target, const Conventions& conv) {
    auto t = lagrangian_terms(geom, chi, f, target, conv);
    GridField r = t[0];
    for (int k = 1; k < 6; ++k) r += t[k];
    return r;
}

GrassmannNumber action_component(const SurfaceGeometry& geom, const GravitinoField& chi, const ComponentFields& f,
                                 const Target& target, const Conventions& conv) {
    return integrate(lagrangian_density(geom, chi, f, target, conv));
}

SuperFunction flat_D(const SuperFunction& f, int alpha) {
    if (f.even_dim() != 2 || f.odd_dim() != 2) throw DimensionError("the flat model lives on R^{2|2}");
    if (alpha < 0 || alpha > 1) throw RangeError("odd index must be 0 or 1");
    const auto& cl = clifford_standard();
    SuperFunction r = partial_odd(f, alpha);
    for (int a = 0; a < 2; ++a) {
        Mat2 cg = matmul(cl.pairing, cl.gamma[a]);
        SuperFunction df;
        bool have = false;
        for (int beta = 0; beta < 2; ++beta) {
            if (cg[beta][alpha] == 0.0) continue;
            if (!have) df = partial_even(f, a), have = true;
            SuperFunction eta = SuperFunction::odd_coordinate(f.grid(), 2, f.parameters(), beta);
            r -= cg[beta][alpha] * (eta * df);
        }
    }
    return r;
}

SuperFunction d_laplace_flat(const SuperFunction& f) { return flat_D(flat_D(f, 1), 0) - flat_D(flat_D(f, 0), 1); }

GrassmannNumber action_superfield_flat(const std::vector<SuperFunction>& Phi) {
    if (Phi.empty()) throw DimensionError("no target components");
    SuperFunction density(Phi[0].grid(), 2, Phi[0].parameters());
    for (const auto& p : Phi) {
        SuperFunction d0 = flat_D(p, 0), d1 = flat_D(p, 1);
        density += d0 * d1 - d1 * d0;
    }
    return -0.5 * berezin_integrate(density, BerezinDomain(Phi[0].grid(), 2));
}

std::vector<SuperFunction> superfield_flat(const ComponentFields& f) {
    validate(f, Target::flat(f.target_dim()));
    if (f.has_winding()) throw RegimeError("superfield coefficients are periodic; winding is not representable");
    std::vector<SuperFunction> out;
    for (int i = 0; i < f.target_dim(); ++i) {
        SuperFunction p = SuperFunction::lift(f.phi[i], 2);
        p.add_coefficient(0b01, f.psi[i].c[0]);
        p.add_coefficient(0b10, f.psi[i].c[1]);
        p.add_coefficient(0b11, -0.5 * f.F[i]);
        out.push_back(std::move(p));
    }
    return out;
}

ComponentFields components_flat(const std::vector<SuperFunction>& Phi) {
    if (Phi.empty()) throw DimensionError("no target components");
    ComponentFields f = ComponentFields::zero(Phi[0].grid(), Phi[0].parameters(), static_cast<int>(Phi.size()));
    for (std::size_t i = 0; i < Phi.size(); ++i) {
        f.phi[i] = Phi[i].coefficient(0);
        f.psi[i].c[0] = flat_D(Phi[i], 0).coefficient(0);
        f.psi[i].c[1] = flat_D(Phi[i], 1).coefficient(0);
        f.F[i] = d_laplace_flat(Phi[i]).coefficient(0);
    }
    return f;
}

ComponentFields susy_fields(const ComponentFields& f, const GravitinoField& chi, const SpinorField& q,
                            const SurfaceGeometry& geom, const Target& target, const ActionCoefficients& coeffs) {
    validate(f, target);
    validate(q);
    if (q.parity != Parity::Odd) throw ParityError("SUSY parameter q must be odd");
    if (!target.is_flat()) throw RegimeError("SUSY variations are implemented for flat targets only");
    for (const auto& F : f.F)
        if (max_abs(F) != 0.0) throw RegimeError("SUSY variations are implemented for F = 0 only");
    const auto& cl = clifford_standard();
    ComponentFields d = ComponentFields::zero(f.grid(), f.generators(), f.target_dim());
    for (int i = 0; i < f.target_dim(); ++i) {
        d.phi[i] = static_cast<double>(coeffs.s1) * bilinear(q, cl.pairing, f.psi[i]);
        SpinorField dpsi = SpinorField::zero(f.grid(), f.generators(), Parity::Odd);
        for (int k = 0; k < 2; ++k) {
            GridField coef = frame_derivative(geom, f, i, k) - bilinear(f.psi[i], cl.pairing, chi.chi[k]);
            dpsi = dpsi + coef * clifford(k, q, cl);
        }
        d.psi[i] = static_cast<double>(coeffs.s2) * dpsi;
    }
    return d;
}

double susy_invariance_residual(const SurfaceGeometry& geom, const GravitinoField& chi, const ComponentFields& f,
                                const SpinorField& q, const Target& target, const Conventions& conv) {
    validate(chi);
    Mask qs = support_of(q);
    if (qs == 0) return 0.0;
    Mask rest = support_of(chi.chi[0]) | support_of(chi.chi[1]);
    for (int i = 0; i < f.target_dim(); ++i) rest |= support_of(f.phi[i]) | support_of(f.psi[i]) | support_of(f.F[i]);
    for (const auto& row : geom.frame)
        for (const auto& e : row) rest |= support_of(e);
    if (rest & qs) throw ShapeError("the generators of q must not occur in the fields");

    ComponentFields d = susy_fields(f, chi, q, geom, target, conv.action);
    MetricGravitinoVariation v = susy_metric_gravitino(geom, chi, q, clifford_standard(), conv.susy);

    SurfaceGeometry moved = geom;
    for (int a = 0; a < 2; ++a)
        for (int mu = 0; mu < 2; ++mu) moved.frame[a][mu] += v.frame[a][mu];
    GravitinoField chi2 = chi + v.chi;
    if (conv.susy.transport_gravitino)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) chi2.chi[a] = chi2.chi[a] + v.frame_mix[a][b] * chi.chi[b];

    GrassmannNumber A = action_component(moved, chi2, f + d, target, conv);
    return max_abs(linear_part(A, qs));
}

ComponentFields random_component_fields(FixtureRng& rng, const Grid& grid, int generators, int target_dim,
                                        int max_mode, Mask allowed, bool with_F) {
    ComponentFields f = ComponentFields::zero(grid, generators, target_dim);
    for (int i = 0; i < target_dim; ++i) {
        f.phi[i] = GridField::real(grid, generators, random_trig(rng, grid, max_mode, 1.0));
        f.phi[i] += random_field(rng, grid, generators, Parity::Even, 2, max_mode, 0.5, allowed);
        for (auto& c : f.psi[i].c) c = random_field(rng, grid, generators, Parity::Odd, 3, max_mode, 1.0, allowed);
        if (with_F) f.F[i] = random_field(rng, grid, generators, Parity::Even, 2, max_mode, 1.0, allowed);
    }
    return f;
}

SusyFixture random_susy_fixture(FixtureRng& rng, const Grid& grid, bool gravitino, int max_mode) {
    const int n = kSusyGenerators;
    SusyFixture fx{SurfaceGeometry::flat(grid, n), GravitinoField::zero(grid, n),
                   random_component_fields(rng, grid, n, 1, max_mode, 0b11, false),
                   SpinorField::zero(grid, n, Parity::Odd)};
    if (gravitino)
        for (auto& s : fx.chi.chi)
            for (auto& c : s.c) c = random_field(rng, grid, n, Parity::Odd, 3, max_mode, 1.0, 0b1111100);
    for (auto& c : fx.q.c) c = GridField::real(grid, n, random_trig(rng, grid, max_mode, 1.0), Mask{1} << 7);
    return fx;
}

std::vector<SusyFixture> susy_battery(std::uint64_t seed, const Grid& grid, int count, bool gravitino) {
    FixtureRng rng(seed);
    std::vector<SusyFixture> out;
    for (int k = 0; k < count; ++k) out.push_back(random_susy_fixture(rng, grid, gravitino));
    return out;
}

ConventionCalibration calibrate_conventions(const std::vector<SusyFixture>& battery, const Target& target,
                                            double tolerance) {
    if (battery.empty()) throw CalibrationError("calibration battery is empty");
    const Conventions printed = Conventions::printed();
    ConventionCalibration result;
    for (int bits = 0; bits < 128; ++bits) {
        auto flip = [&](int k) { return (bits >> k) & 1; };
        ConventionTrial t;
        t.conventions = printed;
        Conventions& c = t.conventions;
        c.action.s1 = flip(0) ? -1 : 1;
        c.action.s2 = flip(1) ? -1 : 1;
        c.action.c[3] = flip(2) ? -printed.action.c[3] : printed.action.c[3];
        c.action.c[4] = flip(3) ? -printed.action.c[4] : printed.action.c[4];
        c.susy.frame_coefficient = flip(4) ? -printed.susy.frame_coefficient : printed.susy.frame_coefficient;
        c.susy.torsion = flip(5) ? TorsionFactor::Identity : TorsionFactor::VolumeElement;
        c.susy.transport_gravitino = flip(6) != 0;
        t.deviations = std::popcount(static_cast<unsigned>(bits));
        for (const auto& fx : battery)
            t.residual = std::max(t.residual, susy_invariance_residual(fx.geom, fx.chi, fx.fields, fx.q, target, c));
        result.trials.push_back(t);
    }
    const ConventionTrial* best = nullptr;
    int passing = 0;
    result.runner_up = std::numeric_limits<double>::infinity();
    for (const auto& t : result.trials) {
        if (t.residual < tolerance) {
            ++passing;
            if (!best || t.deviations < best->deviations ||
                (t.deviations == best->deviations && t.residual < best->residual))
                best = &t;
        } else {
            result.runner_up = std::min(result.runner_up, t.residual);
        }
    }
    if (passing == static_cast<int>(result.trials.size()))
        throw CalibrationError("underdetermined: every sign assignment is invariant on this battery");
    if (!best) throw CalibrationError("no sign assignment in the search space makes the action invariant");
    result.chosen = best->conventions;
    result.chosen.toy_orientation = kToyOrientation;
    result.residual = best->residual;
    return result;
}

SymmetricTensor energy_momentum(const SurfaceGeometry& geom, const GravitinoField& chi, const ComponentFields& f,
                                const Target& target, const Conventions& conv, double step) {
    if (!(step > 0.0)) throw RangeError("finite-difference step must be positive");
    const Mat2 p11{{{1.0, 0.0}, {0.0, 0.0}}}, p22{{{0.0, 0.0}, {0.0, 1.0}}}, p12{{{0.0, 1.0}, {1.0, 0.0}}};
    GridField rvol = inverse(geom.volume_density());
    auto slope = [&](const Mat2& p) {
        GridField up = lagrangian_density(perturb_frame(geom, p, step), chi, f, target, conv);
        GridField down = lagrangian_density(perturb_frame(geom, p, -step), chi, f, target, conv);
        return (1.0 / (2.0 * step)) * ((up - down) * rvol);
    };
    // delta g^{ab} = 2 eps P^{ab} for e -> (1 + eps P) e.
    return {0.5 * slope(p11), 0.25 * slope(p12), 0.5 * slope(p22)};
}

SymmetricTensor energy_momentum_dirichlet(const SurfaceGeometry& geom, const ComponentFields& f) {
    GridField g11 = zero_like(f), g12 = zero_like(f), g22 = zero_like(f);
    for (int i = 0; i < f.target_dim(); ++i) {
        GridField d1 = frame_derivative(geom, f, i, 0), d2 = frame_derivative(geom, f, i, 1);
        g11 += d1 * d1;
        g12 += d1 * d2;
        g22 += d2 * d2;
    }
    GridField half = 0.5 * (g11 + g22);
    return {g11 - half, g12, g22 - half};
}

TensorResiduals tensor_residuals(const SymmetricTensor& T) {
    TensorResiduals r;
    r.trace = max_abs(T.t11 + T.t22);
    r.divergence = std::max(max_abs(derivative(T.t11, 0) + derivative(T.t12, 1)),
                            max_abs(derivative(T.t12, 0) + derivative(T.t22, 1)));
    // d_zbar T_zz with T_zz = (A - 2iB)/4, d_zbar = (d_1 + i d_2)/2.
    GridField A = T.t11 - T.t22;
    GridField re = 0.125 * (derivative(A, 0) + 2.0 * derivative(T.t12, 1));
    GridField im = 0.125 * (derivative(A, 1) - 2.0 * derivative(T.t12, 0));
    r.antiholomorphic = std::max(max_abs(re), max_abs(im));
    return r;
}

GravitinoField super_current(const SurfaceGeometry& geom, const GravitinoField& chi, const ComponentFields& f,
                             const Target& target, const Conventions& conv) {
    validate(chi);
    const int n = f.generators();
    const Grid& grid = f.grid();
    SurfaceGeometry g2 = extend(geom, n + 1);
    GravitinoField c2 = extend(chi, n + 1);
    ComponentFields f2 = extend(f, n + 1);
    GridField eps = GridField::constant(grid, GrassmannNumber::generator(n + 1, n));
    GridField rvol = inverse(geom.volume_density());
    const Mask spare = Mask{1} << n;

    GravitinoField J = GravitinoField::zero(grid, n);
    for (int a = 0; a < 2; ++a)
        for (int alpha = 0; alpha < 2; ++alpha) {
            GravitinoField probe = c2;
            probe.chi[a].c[alpha] += eps;
            GridField L = lagrangian_density(g2, probe, f2, target, conv);
            GridField coef(grid, n);
            for (const auto& [m, v] : L.terms()) {
                if (!(m & spare)) continue;
                Mask rest = m & ~spare;
                double sign = (mask_degree(rest) & 1) ? -1.0 : 1.0;
                Array& out = coef.component(rest);
                for (std::size_t k = 0; k < v.size(); ++k) out[k] += sign * v[k];
            }
            coef.prune();
            J.chi[a].c[alpha] = coef * rvol;
        }
    return J;
}

SpinorField gamma_trace(const GravitinoField& J) { return clifford(0, J.chi[0]) + clifford(1, J.chi[1]); }

GravitinoField gamma_traceless(const GravitinoField& J) {
    SpinorField tr = gamma_trace(J);
    return {{J.chi[0] - 0.5 * clifford(0, tr), J.chi[1] - 0.5 * clifford(1, tr)}};
}

SpinorField spin32_antiholomorphic(const GravitinoField& J) {
    GravitinoField t = gamma_traceless(J);
    return 0.5 * (derivative(t.chi[0], 0) + apply_matrix(clifford_standard().volume(), derivative(t.chi[0], 1)));
}

namespace {

struct BodyFrame {
    std::array<Array, 3> ginv;  // g^{11}, g^{12}, g^{22}
    Array density;              // dvol / dx
};

BodyFrame body_frame(const SurfaceGeometry& geom) {
    std::array<std::array<Array, 2>, 2> e;
    for (int a = 0; a < 2; ++a)
        for (int mu = 0; mu < 2; ++mu) e[a][mu] = body(geom.frame[a][mu]);
    const std::size_t n = geom.grid.size();
    BodyFrame b;
    for (auto& g : b.ginv) g.assign(n, 0.0);
    b.density.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        for (int a = 0; a < 2; ++a) {
            b.ginv[0][k] += e[a][0][k] * e[a][0][k];
            b.ginv[1][k] += e[a][0][k] * e[a][1][k];
            b.ginv[2][k] += e[a][1][k] * e[a][1][k];
        }
        double det = e[0][0][k] * e[1][1][k] - e[0][1][k] * e[1][0][k];
        if (det == 0.0) throw RegimeError("frame is degenerate");
        b.density[k] = 1.0 / std::abs(det);
    }
    return b;
}

struct FlowState {
    const Grid& grid;
    const BodyFrame& frame;
    const std::vector<std::array<double, 2>>& winding;

    std::array<Array, 2> gradient(const Array& p, std::size_t i) const {
        std::array<Array, 2> d{differentiate(grid, p, 0), differentiate(grid, p, 1)};
        for (int mu = 0; mu < 2; ++mu)
            for (double& x : d[mu]) x += winding[i][mu];
        return d;
    }

    // |d phi|^2_g pointwise
    Array energy_density(const std::vector<Array>& phi) const {
        Array r(grid.size(), 0.0);
        for (std::size_t i = 0; i < phi.size(); ++i) {
            auto d = gradient(phi[i], i);
            for (std::size_t k = 0; k < r.size(); ++k)
                r[k] += frame.ginv[0][k] * d[0][k] * d[0][k] + 2.0 * frame.ginv[1][k] * d[0][k] * d[1][k] +
                        frame.ginv[2][k] * d[1][k] * d[1][k];
        }
        return r;
    }

    double energy(const std::vector<Array>& phi) const {
        Array r = energy_density(phi);
        for (std::size_t k = 0; k < r.size(); ++k) r[k] *= frame.density[k];
        return trapezoid(grid, r);
    }

    // Laplace-Beltrami operator
    Array laplacian(const Array& p, std::size_t i) const {
        auto d = gradient(p, i);
        Array v0(grid.size()), v1(grid.size());
        for (std::size_t k = 0; k < v0.size(); ++k) {
            v0[k] = frame.density[k] * (frame.ginv[0][k] * d[0][k] + frame.ginv[1][k] * d[1][k]);
            v1[k] = frame.density[k] * (frame.ginv[1][k] * d[0][k] + frame.ginv[2][k] * d[1][k]);
        }
        Array a = differentiate(grid, v0, 0), b = differentiate(grid, v1, 1);
        for (std::size_t k = 0; k < a.size(); ++k) a[k] = (a[k] + b[k]) / frame.density[k];
        return a;
    }
};

}  // namespace

double dirichlet_energy(const SurfaceGeometry& geom, const ComponentFields& f) {
    BodyFrame frame = body_frame(geom);
    std::vector<Array> phi;
    for (const auto& p : f.phi) phi.push_back(body(p));
    FlowState s{geom.grid, frame, f.winding};
    return s.energy(phi);
}

FlowResult harmonic_flow(const SurfaceGeometry& geom, const ComponentFields& initial, const Target& target, int steps,
                         double dt, double tolerance) {
    validate(initial, target);
    if (steps < 0) throw RangeError("step count must be non-negative");
    if (!(dt > 0.0)) throw RangeError("time step must be positive");
    for (std::size_t i = 0; i < initial.phi.size(); ++i)
        if (max_abs(initial.psi[i]) != 0.0 || max_abs(initial.F[i]) != 0.0)
            throw RegimeError("the flow acts on the psi = F = 0 sector");

    BodyFrame frame = body_frame(geom);
    FlowState s{geom.grid, frame, initial.winding};
    const bool sphere = target.kind == Target::Kind::Sphere;
    const double K = target.curvature;
    std::vector<Array> phi;
    for (const auto& p : initial.phi) phi.push_back(body(p));

    FlowResult r;
    r.energy.push_back(s.energy(phi));
    int rising = 0;
    for (int step = 0; step <= steps; ++step) {
        std::vector<Array> tension;
        Array e2 = sphere ? s.energy_density(phi) : Array();
        double sup = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) {
            Array t = s.laplacian(phi[i], i);
            if (sphere)
                for (std::size_t k = 0; k < t.size(); ++k) t[k] += K * e2[k] * phi[i][k];
            for (double x : t) sup = std::max(sup, 2.0 * std::abs(x));
            tension.push_back(std::move(t));
        }
        r.gradient = sup;
        if (sup < tolerance) {
            r.converged = true;
            break;
        }
        if (step == steps) break;
        for (std::size_t i = 0; i < phi.size(); ++i)
            for (std::size_t k = 0; k < phi[i].size(); ++k) phi[i][k] += 2.0 * dt * tension[i][k];
        if (sphere) {
            for (std::size_t k = 0; k < phi[0].size(); ++k) {
                double n2 = 0.0;
                for (const auto& p : phi) n2 += p[k] * p[k];
                double scale = 1.0 / std::sqrt(n2 * K);
                for (auto& p : phi) p[k] *= scale;
            }
        }
        double e = s.energy(phi);
        rising = e > r.energy.back() * (1.0 + 1e-12) + 1e-14 ? rising + 1 : 0;
        r.energy.push_back(e);
        r.steps = step + 1;
        if (rising >= 10) throw ConvergenceError("energy rose for 10 consecutive steps; reduce the time step");
    }
    r.fields = initial;
    for (std::size_t i = 0; i < phi.size(); ++i)
        r.fields.phi[i] = GridField::real(geom.grid, initial.generators(), phi[i]);
    return r;
}

}  // namespace supersigma
