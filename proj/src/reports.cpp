#include "supersigma/reports.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <set>

#include "supersigma/berezin.hpp"
#include "supersigma/errors.hpp"
#include "supersigma/fixtures.hpp"
#include "supersigma/toy_model.hpp"

namespace supersigma {

namespace {

constexpr double kPi = kTwoPi / 2;

const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> t{
        {"grassmann", 0.0},       {"exact", 0.0},      {"berezin", 1e-12},  {"toy", 1e-10},         {"reduction", 1e-8},
        {"classical", 1e-10},     {"conformal", 1e-8}, {"susy2d", 1e-8},       {"calibration", 1e-6},
        {"energy_momentum", 1e-6}, {"tensor", 1e-8},   {"current", 1e-8},      {"flow", 1e-6},
        {"monotone", 1e-12},      {"decompose", 1e-8}, {"dimensions", 0.0},
    };
    return t;
}

const std::map<std::string, int>& default_counts() {
    static const std::map<std::string, int> c{
        {"grassmann", 1000}, {"berezin", 100}, {"toy", 100},  {"reduction", 50},
        {"classical", 5},    {"susy2d", 3},    {"currents", 3}, {"decompose", 5},
    };
    return c;
}

// Offsets keep the fixture streams of different suites independent.
std::uint64_t stream(const SuiteConfig& c, std::uint64_t k) { return c.seed * 1000003ULL + k; }

constexpr double kInf = std::numeric_limits<double>::infinity();

class Checks {
public:
    explicit Checks(const SuiteConfig& c) : config_(c) {}

    // Runs `f` and records a check against the family's tolerance.
    void run(const std::string& name, const std::string& family, const std::string& provenance,
             const std::function<double()>& f) {
        CheckReport r;
        r.name = name;
        r.tolerance = config_.tolerance(family);
        r.provenance = provenance;
        auto start = std::chrono::steady_clock::now();
        try {
            r.residual = f();
            if (std::isnan(r.residual)) r.residual = kInf;
        } catch (const std::exception& e) {
            r.residual = kInf;
            r.error = e.what();
        }
        r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        r.pass = r.residual <= r.tolerance;
        out_.push_back(std::move(r));
    }

    std::vector<CheckReport> take() { return std::move(out_); }

private:
    const SuiteConfig& config_;
    std::vector<CheckReport> out_;
};

Grid torus(const SuiteConfig& c, int n) { return Grid::torus(n, n, c.period, c.period); }

GrassmannNumber generator(int n, int i) { return GrassmannNumber::generator(n, i); }

void grassmann_suite(const SuiteConfig& c, Checks& checks) {
    const int n = c.generators, count = c.count("grassmann");
    auto random_triples = [&](auto&& body) {
        FixtureRng rng(stream(c, 1));
        double worst = 0.0;
        for (int t = 0; t < count; ++t) worst = std::max(worst, body(rng));
        return worst;
    };
    checks.run("grassmann.associativity", "grassmann", "identity", [&] {
        return random_triples([&](FixtureRng& rng) {
            GrassmannNumber a = random_grassmann(rng, n, Parity::Mixed, 8);
            GrassmannNumber b = random_grassmann(rng, n, Parity::Mixed, 8);
            GrassmannNumber d = random_grassmann(rng, n, Parity::Mixed, 8);
            return max_abs(gmul(gmul(a, b), d) - gmul(a, gmul(b, d)));
        });
    });
    checks.run("grassmann.graded_commutativity", "grassmann", "identity", [&] {
        return random_triples([&](FixtureRng& rng) {
            Parity pa = rng.integer(0, 1) ? Parity::Odd : Parity::Even;
            Parity pb = rng.integer(0, 1) ? Parity::Odd : Parity::Even;
            GrassmannNumber x = random_grassmann(rng, n, pa, 6);
            GrassmannNumber y = random_grassmann(rng, n, pb, 6);
            double s = (pa == Parity::Odd && pb == Parity::Odd) ? -1.0 : 1.0;
            return max_abs(x * y - s * (y * x));
        });
    });
    checks.run("grassmann.nilpotency", "grassmann", "identity", [&] {
        double worst = random_triples([&](FixtureRng& rng) {
            GrassmannNumber x = random_grassmann(rng, n, Parity::Odd, 6);
            return max_abs(x * x);
        });
        for (int i = 0; i < n; ++i) worst = std::max(worst, max_abs(generator(n, i) * generator(n, i)));
        return worst;
    });
}

void berezin_suite(const SuiteConfig& c, Checks& checks) {
    const int n = c.generators, count = c.count("berezin");
    const Grid g = Grid::circle(c.circle_points, c.period);
    checks.run("berezin.reduction", "berezin", "closed_form", [&] {
        // f = f0 + eta f1 with f1 = c0 + oscillating modes: the integral is P c0.
        FixtureRng rng(stream(c, 2));
        double worst = 0.0;
        for (int t = 0; t < count; ++t) {
            GrassmannNumber c0 = random_grassmann(rng, n, Parity::Odd, 3);
            GridField f1 = GridField::constant(g, c0);
            for (int k = 1; k <= 5; ++k) {
                f1 += GridField::real(g, n, cos_mode(g, {k})) * random_grassmann(rng, n, Parity::Odd, 2);
                f1 += GridField::real(g, n, sin_mode(g, {k})) * random_grassmann(rng, n, Parity::Odd, 2);
            }
            SuperFunction f = SuperFunction::lift(random_field(rng, g, n, Parity::Even, 2, 3, 1.0), 1);
            f.add_coefficient(1, f1);
            worst = std::max(worst, max_abs(berezin_integrate(f, BerezinDomain(g, 1)) - c.period * c0));
        }
        return worst;
    });
    checks.run("berezin.quadrature", "berezin", "closed_form", [&] {
        Array sq = cos_mode(g, {1});
        for (double& v : sq) v *= v;
        return std::abs(body(quadrature(GridField::real(g, n, sq), BerezinDomain(g, 1))) - c.period / 2);
    });
}

void toy_suite(const SuiteConfig& c, Checks& checks) {
    const int n = c.generators, count = c.count("toy");
    const int sigma = c.active_conventions().toy_orientation;
    const Grid g = Grid::circle(c.circle_points, c.period);
    const GrassmannNumber q = generator(n, 3);
    auto battery = [&](std::uint64_t k) {
        // Field content on generators 0..2; generator 3 carries q.
        FixtureRng rng(stream(c, k));
        std::vector<ToyFields> out;
        for (int t = 0; t < count; ++t)
            out.push_back({random_field(rng, g, n, Parity::Even, 3, 4, 1.0, 0b0111),
                           random_field(rng, g, n, Parity::Odd, 3, 4, 1.0, 0b0111)});
        return out;
    };
    checks.run("toy.superfield_component", "toy", "cross_check", [&] {
        double worst = 0.0;
        for (const auto& f : battery(3))
            worst = std::max(worst, max_abs(toy_action_superfield(toy_superfield(f), sigma) - toy_action_component(f)));
        return worst;
    });
    checks.run("toy.closed_form", "toy", "closed_form", [&] {
        // phi = sin, psi = xi_1 cos + xi_2 sin: A = pi^2 / P + pi xi_1 xi_2.
        GridField phi = GridField::real(g, n, sin_mode(g, {1}));
        GridField psi = GridField::real(g, n, cos_mode(g, {1})) * generator(n, 0) +
                        GridField::real(g, n, sin_mode(g, {1})) * generator(n, 1);
        GrassmannNumber expected = GrassmannNumber::scalar(n, kPi * kPi / c.period) + kPi * (generator(n, 0) * generator(n, 1));
        ToyFields f{phi, psi};
        return std::max(max_abs(toy_action_superfield(toy_superfield(f), sigma) - expected),
                        max_abs(toy_action_component(f) - expected));
    });
    checks.run("toy.susy_invariance", "toy", "invariance", [&] {
        double worst = 0.0;
        for (const auto& f : battery(4)) worst = std::max(worst, toy_invariance_residual(f, q, sigma));
        return worst;
    });
    checks.run("toy.embedding_independence", "toy", "cross_check", [&] {
        double worst = 0.0;
        Embedding rigid{{GridField::constant(g, q)}};
        for (const auto& f : battery(5)) {
            SuperFunction Phi = toy_superfield(f);
            worst = std::max(worst, max_abs(toy_action_component(toy_components(Phi, rigid, sigma)) -
                                            toy_action_superfield(Phi, sigma)));
        }
        return worst;
    });
}

void reduction_suite(const SuiteConfig& c, Checks& checks) {
    const int n = c.generators;
    const Conventions conv = c.active_conventions();
    checks.run("reduction.superfield_component", "reduction", "cross_check", [&] {
        const Grid g = torus(c, c.reduction_points);
        SurfaceGeometry geo = SurfaceGeometry::flat(g, n);
        GravitinoField none = GravitinoField::zero(g, n);
        FixtureRng rng(stream(c, 6));
        double worst = 0.0;
        for (int t = 0; t < c.count("reduction"); ++t) {
            ComponentFields f = random_component_fields(rng, g, n, 2, 3, 0b1111, true);
            GrassmannNumber sf = action_superfield_flat(superfield_flat(f));
            worst = std::max(worst, max_abs(sf - action_component(geo, none, f, Target::flat(2), conv)));
        }
        return worst;
    });

    const Grid g = torus(c, c.torus_points);
    SurfaceGeometry geo = SurfaceGeometry::flat(g, n);
    GravitinoField none = GravitinoField::zero(g, n);
    checks.run("classical.dirichlet_closed_form", "classical", "closed_form", [&] {
        ComponentFields f = ComponentFields::zero(g, n, 1);
        f.phi[0] = GridField::real(g, n, sin_mode(g, {1, 0}));
        return max_abs(action_component(geo, none, f, Target::flat(1), conv) -
                       GrassmannNumber::scalar(n, 2 * kPi * kPi));
    });
    checks.run("classical.bosonic_limit", "classical", "cross_check", [&] {
        FixtureRng rng(stream(c, 7));
        double worst = 0.0;
        for (int t = 0; t < c.count("classical"); ++t) {
            ComponentFields f = ComponentFields::zero(g, n, 2);
            for (auto& p : f.phi) p = GridField::real(g, n, random_trig(rng, g, 3, 1.0));
            f.winding[0] = {1.0, -2.0};
            worst = std::max(worst, max_abs(action_component(geo, none, f, Target::flat(2), conv) -
                                            GrassmannNumber::scalar(n, dirichlet_energy(geo, f))));
        }
        return worst;
    });
    checks.run("classical.conformal_invariance", "conformal", "invariance", [&] {
        FixtureRng rng(stream(c, 8));
        double worst = 0.0;
        for (int t = 0; t < c.count("classical"); ++t) {
            ComponentFields f = ComponentFields::zero(g, n, 2);
            for (auto& p : f.phi) p = GridField::real(g, n, random_trig(rng, g, 3, 1.0));
            Array lam = random_trig(rng, g, 2, 0.05);
            for (double& v : lam) v += 2.0;
            SurfaceGeometry scaled = weyl(geo, GridField::real(g, n, lam));
            worst = std::max(worst, max_abs(action_component(scaled, none, f, Target::flat(2), conv) -
                                            action_component(geo, none, f, Target::flat(2), conv)));
        }
        return worst;
    });
}

void susy2d_suite(const SuiteConfig& c, Checks& checks) {
    const Conventions conv = c.active_conventions();
    const Grid g = torus(c, c.torus_points);
    const Target line = Target::flat(1);
    for (bool gravitino : {false, true}) {
        std::string name = gravitino ? "susy2d.invariance_gravitino" : "susy2d.invariance_flat";
        checks.run(name, "susy2d", "invariance", [&] {
            double worst = 0.0;
            for (const auto& fx : susy_battery(stream(c, gravitino ? 10 : 9), g, c.count("susy2d"), gravitino))
                worst = std::max(worst, susy_invariance_residual(fx.geom, fx.chi, fx.fields, fx.q, line, conv));
            return worst;
        });
    }
    checks.run("susy2d.calibration", "calibration", "calibration", [&] { return calibrate(c).residual; });
}

void currents_suite(const SuiteConfig& c, Checks& checks) {
    const int n = c.generators;
    const Conventions conv = c.active_conventions();
    const Grid g = torus(c, c.torus_points);
    SurfaceGeometry geo = SurfaceGeometry::flat(g, n);
    GravitinoField none = GravitinoField::zero(g, n);

    checks.run("energy_momentum.closed_form", "energy_momentum", "cross_check", [&] {
        FixtureRng rng(stream(c, 11));
        double worst = 0.0;
        for (int t = 0; t < c.count("currents"); ++t) {
            ComponentFields f = ComponentFields::zero(g, n, 2);
            for (auto& p : f.phi) p = GridField::real(g, n, random_trig(rng, g, 2, 1.0));
            f.winding[1] = {0.0, 1.0};
            SymmetricTensor fd = energy_momentum(geo, none, f, Target::flat(2), conv);
            SymmetricTensor closed = energy_momentum_dirichlet(geo, f);
            worst = std::max(worst, max_abs(fd - closed) / std::max(max_abs(closed), 1e-300));
        }
        return worst;
    });

    ComponentFields affine = ComponentFields::zero(g, n, 1);
    affine.winding[0] = {2.0, 1.0};
    auto harmonic_residuals = [&] { return tensor_residuals(energy_momentum(geo, none, affine, Target::flat(1), conv)); };
    checks.run("energy_momentum.harmonic_trace", "tensor", "identity", [&] { return harmonic_residuals().trace; });
    checks.run("energy_momentum.harmonic_divergence", "tensor", "identity",
               [&] { return harmonic_residuals().divergence; });
    checks.run("energy_momentum.harmonic_holomorphic", "tensor", "identity",
               [&] { return harmonic_residuals().antiholomorphic; });

    checks.run("super_current.bosonic", "exact", "identity", [&] {
        FixtureRng rng(stream(c, 12));
        Mask chi_gens = (Mask{1} << n) - 1;
        GravitinoField chi{{SpinorField{{random_field(rng, g, n, Parity::Odd, 2, 1, 1.0, chi_gens),
                                         random_field(rng, g, n, Parity::Odd, 2, 1, 1.0, chi_gens)},
                                        Parity::Odd},
                            SpinorField{{random_field(rng, g, n, Parity::Odd, 2, 1, 1.0, chi_gens),
                                         random_field(rng, g, n, Parity::Odd, 2, 1, 1.0, chi_gens)},
                                        Parity::Odd}}};
        ComponentFields bos = ComponentFields::zero(g, n, 1);
        bos.phi[0] = GridField::real(g, n, random_trig(rng, g, 2, 1.0));
        return max_abs(super_current(geo, chi, bos, Target::flat(1), conv));
    });

    // Critical point: affine phi, constant psi.
    ComponentFields crit = affine;
    crit.psi[0].c[0] = GridField::constant(g, generator(n, 0));
    crit.psi[0].c[1] = GridField::constant(g, -2.0 * generator(n, 1));
    auto crit_current = [&] { return super_current(geo, none, crit, Target::flat(1), conv); };
    checks.run("super_current.gamma_trace", "current", "identity", [&] { return max_abs(gamma_trace(crit_current())); });
    checks.run("super_current.spin32_holomorphic", "current", "identity",
               [&] { return max_abs(spin32_antiholomorphic(crit_current())); });
}

void flow_suite(const SuiteConfig& c, Checks& checks) {
    const Grid g = torus(c, c.flow_points);
    SurfaceGeometry geo = SurfaceGeometry::flat(g, 1);
    ComponentFields pert = ComponentFields::zero(g, 1, 2);
    pert.winding[0] = {1.0, 0.0};
    pert.winding[1] = {0.0, 1.0};
    Array a = sin_mode(g, {1, 1}), b = cos_mode(g, {0, 2});
    for (double& v : a) v *= 0.1;
    for (double& v : b) v *= 0.05;
    pert.phi[0] = GridField::real(g, 1, a);
    pert.phi[1] = GridField::real(g, 1, b);

    // Computed inside the first check so its runtime is attributed there.
    std::optional<FlowResult> result;
    std::string failure;
    bool attempted = false;
    auto need = [&]() -> const FlowResult& {
        if (!attempted) {
            attempted = true;
            try {
                result = harmonic_flow(geo, pert, Target::flat(2), c.flow_steps, c.flow_dt);
            } catch (const std::exception& e) {
                failure = e.what();
            }
        }
        if (!result) throw ConvergenceError(failure);
        return *result;
    };
    // The affine part x -> x has energy 2 P^2.
    checks.run("flow.final_energy", "flow", "closed_form",
               [&] { return std::abs(need().energy.back() - 2 * c.period * c.period); });
    checks.run("flow.energy_monotone", "monotone", "identity", [&] {
        const auto& e = need().energy;
        double rise = 0.0;
        for (std::size_t k = 1; k < e.size(); ++k) rise = std::max(rise, e[k] - e[k - 1]);
        return rise / std::max(e.front(), 1.0);
    });
}

void decompose_suite(const SuiteConfig& c, Checks& checks) {
    const int n = c.generators;
    const Conventions conv = c.active_conventions();
    const Grid g = torus(c, c.decompose_points);
    SurfaceGeometry geo = SurfaceGeometry::flat(g, n);
    GravitinoField none = GravitinoField::zero(g, n);

    std::vector<MetricDecomposition> metric;
    std::vector<GravitinoDecomposition> grav;
    std::string failure;
    bool attempted = false;
    auto compute = [&] {
        attempted = true;
        try {
            FixtureRng rng(stream(c, 13));
            for (int t = 0; t < c.count("decompose"); ++t) {
                SymmetricTensor dg{random_field(rng, g, n, Parity::Even, 3, 2, 1.0, 0b0011),
                                   random_field(rng, g, n, Parity::Even, 3, 2, 1.0, 0b0011),
                                   random_field(rng, g, n, Parity::Even, 3, 2, 1.0, 0b0011)};
                metric.push_back(decompose_metric(geo, none, dg, conv));
                auto spinor = [&] {
                    return SpinorField{{random_field(rng, g, n, Parity::Odd, 2, 2, 1.0, 0b0011),
                                        random_field(rng, g, n, Parity::Odd, 2, 2, 1.0, 0b0011)},
                                       Parity::Odd};
                };
                GravitinoField dchi{{spinor(), spinor()}};
                grav.push_back(decompose_gravitino(geo, none, dchi, conv));
            }
        } catch (const std::exception& e) {
            failure = e.what();
        }
    };
    auto worst = [&](const auto& v, auto field) {
        if (!attempted) compute();
        if (!failure.empty()) throw RegimeError(failure);
        double w = 0.0;
        for (const auto& d : v) w = std::max(w, d.*field);
        return w;
    };
    checks.run("decompose.metric_reassembly", "decompose", "identity",
               [&] { return worst(metric, &MetricDecomposition::reassembly); });
    checks.run("decompose.metric_trace", "decompose", "identity",
               [&] { return worst(metric, &MetricDecomposition::trace); });
    checks.run("decompose.metric_divergence", "decompose", "identity",
               [&] { return worst(metric, &MetricDecomposition::divergence); });
    checks.run("decompose.gravitino_reassembly", "decompose", "identity",
               [&] { return worst(grav, &GravitinoDecomposition::reassembly); });
    checks.run("decompose.gravitino_gamma_trace", "decompose", "identity",
               [&] { return worst(grav, &GravitinoDecomposition::gamma_trace); });
    checks.run("decompose.gravitino_divergence", "decompose", "identity",
               [&] { return worst(grav, &GravitinoDecomposition::divergence); });
    for (int pts : c.dimension_points) {
        checks.run("decompose.dimensions_" + std::to_string(pts), "dimensions", "rank", [&] {
            DeformationDimensions d = true_deformation_dimensions(SurfaceGeometry::flat(torus(c, pts), 0));
            return static_cast<double>(std::abs(d.even - 2) + std::abs(d.odd - 2));
        });
    }
}

using SuiteFn = void (*)(const SuiteConfig&, Checks&);

const std::vector<std::pair<std::string, SuiteFn>>& suites() {
    static const std::vector<std::pair<std::string, SuiteFn>> s{
        {"grassmann", grassmann_suite}, {"berezin", berezin_suite},   {"toy", toy_suite},
        {"reduction", reduction_suite}, {"susy2d", susy2d_suite},     {"currents", currents_suite},
        {"flow", flow_suite},           {"decompose", decompose_suite},
    };
    return s;
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

nlohmann::json residual_json(double r) {
    if (std::isfinite(r)) return r;
    return "inf";
}

double residual_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() != "inf") throw ConfigError("residual must be a number or \"inf\"");
        return kInf;
    }
    return j.get<double>();
}

nlohmann::json spinor_json(const SpinorField& s) { return {to_json(s.c[0]), to_json(s.c[1])}; }

SpinorField spinor_from_json(const nlohmann::json& j) {
    SpinorField s{{grid_field_from_json(j.at(0)), grid_field_from_json(j.at(1))}, Parity::Odd};
    validate(s);
    return s;
}

nlohmann::json gravitino_json(const GravitinoField& g) { return {spinor_json(g.chi[0]), spinor_json(g.chi[1])}; }

GravitinoField gravitino_from_json(const nlohmann::json& j) {
    return {{spinor_from_json(j.at(0)), spinor_from_json(j.at(1))}};
}

nlohmann::json tensor_json(const SymmetricTensor& t) {
    return {{"t11", to_json(t.t11)}, {"t12", to_json(t.t12)}, {"t22", to_json(t.t22)}};
}

nlohmann::json vector_json(const VectorField& X) { return {to_json(X.x[0]), to_json(X.x[1])}; }

}  // namespace

SuiteConfig SuiteConfig::defaults() {
    SuiteConfig c;
    c.tolerances = default_tolerances();
    c.fixtures = default_counts();
    return c;
}

double SuiteConfig::tolerance(const std::string& family) const {
    if (auto it = tolerances.find(family); it != tolerances.end()) return it->second;
    return default_tolerances().at(family);
}

int SuiteConfig::count(const std::string& family) const {
    if (auto it = fixtures.find(family); it != fixtures.end()) return it->second;
    return default_counts().at(family);
}

Conventions SuiteConfig::active_conventions() const { return conventions.value_or(Conventions::calibrated()); }

nlohmann::json to_json(const SuiteConfig& c) {
    nlohmann::json j{
        {"seed", c.seed},
        {"generators", c.generators},
        {"period", c.period},
        {"grids",
         {{"circle", c.circle_points},
          {"torus", c.torus_points},
          {"reduction", c.reduction_points},
          {"flow", c.flow_points},
          {"decompose", c.decompose_points},
          {"dimensions", c.dimension_points}}},
        {"flow", {{"steps", c.flow_steps}, {"dt", c.flow_dt}}},
        {"calibration", {{"fixtures", c.calibration_fixtures}}},
        {"tolerances", c.tolerances},
        {"fixtures", c.fixtures},
    };
    if (c.conventions) j["conventions"] = to_json(*c.conventions);
    return j;
}

SuiteConfig config_from_json(const nlohmann::json& j) {
    static const std::set<std::string> top{"seed",        "generators", "period",     "grids",      "flow",
                                           "calibration", "tolerances", "fixtures",   "conventions"};
    static const std::set<std::string> grids{"circle", "torus", "reduction", "flow", "decompose", "dimensions"};
    auto check_keys = [](const nlohmann::json& o, const std::set<std::string>& allowed, const std::string& where) {
        if (!o.is_object()) throw ConfigError(where + " must be an object");
        for (const auto& [k, v] : o.items())
            if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
    };
    SuiteConfig c = SuiteConfig::defaults();
    try {
        check_keys(j, top, "config");
        read(j, "seed", c.seed);
        read(j, "generators", c.generators);
        read(j, "period", c.period);
        if (j.contains("grids")) {
            const auto& g = j.at("grids");
            check_keys(g, grids, "grids");
            read(g, "circle", c.circle_points);
            read(g, "torus", c.torus_points);
            read(g, "reduction", c.reduction_points);
            read(g, "flow", c.flow_points);
            read(g, "decompose", c.decompose_points);
            read(g, "dimensions", c.dimension_points);
        }
        if (j.contains("flow")) {
            check_keys(j.at("flow"), {"steps", "dt"}, "flow");
            read(j.at("flow"), "steps", c.flow_steps);
            read(j.at("flow"), "dt", c.flow_dt);
        }
        if (j.contains("calibration")) {
            check_keys(j.at("calibration"), {"fixtures"}, "calibration");
            read(j.at("calibration"), "fixtures", c.calibration_fixtures);
        }
        if (j.contains("tolerances")) {
            for (const auto& [k, v] : j.at("tolerances").items()) {
                if (!default_tolerances().count(k)) throw ConfigError("unknown tolerance family '" + k + "'");
                c.tolerances[k] = v.get<double>();
            }
        }
        if (j.contains("fixtures")) {
            for (const auto& [k, v] : j.at("fixtures").items()) {
                if (!default_counts().count(k)) throw ConfigError("unknown fixture family '" + k + "'");
                c.fixtures[k] = v.get<int>();
            }
        }
        if (j.contains("conventions")) c.conventions = conventions_from_json(j.at("conventions"));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    validate(c);
    return c;
}

SuiteConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
    return config_from_json(j);
}

void validate(const SuiteConfig& c) {
    if (c.generators < 4 || c.generators > 20) throw ConfigError("generators must lie in [4, 20]");
    if (!(c.period > 0.0) || !std::isfinite(c.period)) throw ConfigError("period must be positive");
    for (int n : {c.circle_points, c.torus_points, c.reduction_points, c.flow_points, c.decompose_points})
        if (n < 8) throw ConfigError("grids need at least 8 points per axis");
    for (int n : c.dimension_points)
        if (n < 8) throw ConfigError("grids need at least 8 points per axis");
    if (c.flow_steps < 1) throw ConfigError("flow steps must be positive");
    if (!(c.flow_dt > 0.0)) throw ConfigError("flow dt must be positive");
    if (c.calibration_fixtures < 0) throw ConfigError("calibration fixture count must be non-negative");
    for (const auto& [k, v] : c.tolerances)
        if (!(v >= 0.0)) throw ConfigError("tolerance '" + k + "' must be non-negative");
    for (const auto& [k, v] : c.fixtures)
        if (v < 0) throw ConfigError("fixture count '" + k + "' must be non-negative");
}

std::string config_hash(const SuiteConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_json(c).dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool Report::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckReport& r) { return r.pass; });
}

nlohmann::json to_json(const CheckReport& r, bool timings) {
    nlohmann::json j{{"name", r.name},
                     {"residual", residual_json(r.residual)},
                     {"tolerance", r.tolerance},
                     {"pass", r.pass},
                     {"provenance", r.provenance}};
    if (!r.error.empty()) j["error"] = r.error;
    if (timings) j["runtime_ms"] = r.runtime_ms;
    return j;
}

CheckReport check_from_json(const nlohmann::json& j) {
    CheckReport r;
    r.name = j.at("name").get<std::string>();
    r.residual = residual_from_json(j.at("residual"));
    r.tolerance = j.at("tolerance").get<double>();
    r.pass = j.at("pass").get<bool>();
    r.provenance = j.at("provenance").get<std::string>();
    read(j, "error", r.error);
    read(j, "runtime_ms", r.runtime_ms);
    if (r.pass != (r.residual <= r.tolerance)) throw ConfigError("check '" + r.name + "' has an inconsistent pass flag");
    return r;
}

nlohmann::json to_json(const Report& r, bool timings) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c, timings));
    return {{"header", {{"seed", r.seed}, {"config_hash", r.config_hash}, {"conventions", to_json(r.conventions)}}},
            {"checks", checks}};
}

Report report_from_json(const nlohmann::json& j) {
    try {
        Report r;
        const auto& h = j.at("header");
        r.seed = h.at("seed").get<std::uint64_t>();
        r.config_hash = h.at("config_hash").get<std::string>();
        r.conventions = conventions_from_json(h.at("conventions"));
        for (const auto& c : j.at("checks")) r.checks.push_back(check_from_json(c));
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, fn] : suites()) v.push_back(name);
        return v;
    }();
    return names;
}

Report run_suite(const SuiteConfig& config, const std::string& suite) {
    validate(config);
    bool all = suite == "all";
    if (!all && std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
        throw ConfigError("unknown suite '" + suite + "'");
    Checks checks(config);
    for (const auto& [name, fn] : suites())
        if (all || name == suite) fn(config, checks);
    Report r;
    r.seed = config.seed;
    r.config_hash = config_hash(config);
    r.conventions = config.active_conventions();
    r.checks = checks.take();
    return r;
}

ConventionCalibration calibrate(const SuiteConfig& config) {
    validate(config);
    const Grid g = torus(config, config.torus_points);
    ConventionCalibration c =
        calibrate_conventions(susy_battery(stream(config, 14), g, config.calibration_fixtures, true), Target::flat(1),
                              config.tolerance("calibration"));

    // The toy orientation is fixed by its own invariance battery.
    const int n = config.generators;
    const Grid circle = Grid::circle(config.circle_points, config.period);
    FixtureRng rng(stream(config, 15));
    std::vector<ToyFields> toy;
    for (int t = 0; t < config.calibration_fixtures; ++t)
        toy.push_back({random_field(rng, circle, n, Parity::Even, 3, 4, 1.0, 0b0111),
                       random_field(rng, circle, n, Parity::Odd, 3, 4, 1.0, 0b0111)});
    ToyCalibration tc = calibrate_toy_orientation(toy, generator(n, 3), config.tolerance("calibration"));
    c.chosen.toy_orientation = tc.orientation;
    c.residual = std::max(c.residual, tc.orientation < 0 ? tc.residual_minus : tc.residual_plus);
    return c;
}

SuiteConfig calibrated_config(const SuiteConfig& config) {
    SuiteConfig out = config;
    out.conventions = calibrate(config).chosen;
    return out;
}

DecomposeFixture decompose_fixture_from_json(const nlohmann::json& j) {
    try {
        std::optional<SymmetricTensor> metric;
        std::optional<GravitinoField> grav;
        std::optional<GravitinoField> chi;
        if (j.contains("metric")) {
            const auto& m = j.at("metric");
            metric = SymmetricTensor{grid_field_from_json(m.at("t11")), grid_field_from_json(m.at("t12")),
                                     grid_field_from_json(m.at("t22"))};
        }
        if (j.contains("gravitino")) grav = gravitino_from_json(j.at("gravitino"));
        if (j.contains("chi")) chi = gravitino_from_json(j.at("chi"));
        const GridField* ref = metric ? &metric->t11 : grav ? &grav->chi[0].c[0] : chi ? &chi->chi[0].c[0] : nullptr;
        if (!ref) throw ConfigError("fixture needs a metric or gravitino deformation");
        const Grid& g = ref->grid();
        const int n = ref->generators();
        if (g.dim() != 2) throw ConfigError("fixture fields must live on a surface");
        DecomposeFixture f{SurfaceGeometry::flat(g, n), chi.value_or(GravitinoField::zero(g, n)), metric, grav};
        auto same = [&](const GridField& x) {
            if (!(x.grid() == g) || x.generators() != n) throw ConfigError("fixture fields disagree on grid or generators");
        };
        if (metric)
            for (const auto* x : {&metric->t11, &metric->t12, &metric->t22}) same(*x);
        for (const auto* G : {grav ? &*grav : nullptr, &f.chi})
            if (G)
                for (const auto& s : G->chi)
                    for (const auto& x : s.c) same(x);
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed fixture: ") + e.what());
    }
}

nlohmann::json to_json(const DecomposeFixture& f) {
    nlohmann::json j{{"chi", gravitino_json(f.chi)}};
    if (f.metric) j["metric"] = tensor_json(*f.metric);
    if (f.gravitino) j["gravitino"] = gravitino_json(*f.gravitino);
    return j;
}

nlohmann::json to_json(const MetricDecomposition& d) {
    return {{"lambda", to_json(d.lambda)},
            {"X", vector_json(d.X)},
            {"q", spinor_json(d.q)},
            {"D", tensor_json(d.D)},
            {"reassembly", d.reassembly},
            {"trace", d.trace},
            {"divergence", d.divergence},
            {"null_directions", d.null_directions}};
}

nlohmann::json to_json(const GravitinoDecomposition& d) {
    return {{"t", spinor_json(d.t)},
            {"q", spinor_json(d.q)},
            {"X", vector_json(d.X)},
            {"D", gravitino_json(d.D)},
            {"reassembly", d.reassembly},
            {"gamma_trace", d.gamma_trace},
            {"divergence", d.divergence},
            {"null_directions", d.null_directions}};
}

}  // namespace supersigma
