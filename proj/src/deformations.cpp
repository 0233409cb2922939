#include "supersigma/deformations.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "supersigma/errors.hpp"

namespace supersigma {

namespace {

void require_flat(const SurfaceGeometry& geom) {
    validate(geom);
    for (int a = 0; a < 2; ++a)
        for (int mu = 0; mu < 2; ++mu) {
            GridField id = GridField::real(geom.grid, geom.generators(), Array(geom.grid.size(), a == mu ? 1.0 : 0.0));
            if (max_abs(geom.frame[a][mu] - id) != 0.0)
                throw RegimeError("deformations are implemented on the flat torus with the standard frame");
        }
}

struct Mode {
    int k1, k2;
    bool sine;
};

// Real Fourier basis over the half plane of wave vectors.
std::vector<Mode> fourier_modes(int cutoff) {
    std::vector<Mode> out{{0, 0, false}};
    for (int k1 = 0; k1 <= cutoff; ++k1)
        for (int k2 = -cutoff; k2 <= cutoff; ++k2) {
            if (k1 == 0 && k2 <= 0) continue;
            out.push_back({k1, k2, false});
            out.push_back({k1, k2, true});
        }
    return out;
}

Array mode_values(const Grid& grid, const Mode& m) {
    return m.sine ? sin_mode(grid, {m.k1, m.k2}) : cos_mode(grid, {m.k1, m.k2});
}

std::vector<Array> fourier_basis(const Grid& grid) {
    std::vector<Array> out;
    for (const Mode& m : fourier_modes(fourier_cutoff(grid))) out.push_back(mode_values(grid, m));
    return out;
}

std::set<Mask> masks_of(const std::vector<GridField>& fields) {
    std::set<Mask> out;
    for (const auto& f : fields)
        for (const auto& [m, a] : f.terms())
            if (std::any_of(a.begin(), a.end(), [](double x) { return x != 0.0; })) out.insert(m);
    return out;
}

// Masks of the given parity contained in at least one of `outputs`.
std::set<Mask> submasks(const std::set<Mask>& outputs, Parity parity) {
    std::set<Mask> out;
    for (Mask o : outputs)
        for (Mask m = o;; m = (m - 1) & o) {
            if (mask_parity(m) == parity) out.insert(m);
            if (m == 0) break;
        }
    return out;
}

std::vector<GridField> components(const SymmetricTensor& t) { return {t.t11, t.t12, t.t22}; }

std::vector<GridField> components(const GravitinoField& g) {
    return {g.chi[0].c[0], g.chi[0].c[1], g.chi[1].c[0], g.chi[1].c[1]};
}

// Which parameter a column belongs to.
struct Unknown {
    int field;  // index into the parameter list of the decomposition
    int comp;
    Mask mask;
    int mode;
};

struct Projection {
    Eigen::VectorXd x;
    int null_directions = 0;
};

// Minimum-norm least squares over the (component, mask, point) entries.
Projection project(const std::vector<std::vector<GridField>>& cols, const std::vector<GridField>& target,
                   const std::vector<double>& weight) {
    const std::size_t nc = target.size(), npts = target.at(0).size();
    std::map<std::pair<std::size_t, Mask>, Eigen::Index> rows;
    auto add_rows = [&](const std::vector<GridField>& v) {
        for (std::size_t c = 0; c < nc; ++c)
            for (const auto& [m, a] : v[c].terms()) rows.emplace(std::make_pair(c, m), 0);
    };
    add_rows(target);
    for (const auto& col : cols) add_rows(col);
    Eigen::Index offset = 0;
    for (auto& [key, off] : rows) {
        off = offset;
        offset += static_cast<Eigen::Index>(npts);
    }
    auto fill = [&](const std::vector<GridField>& v, auto&& out) {
        for (std::size_t c = 0; c < nc; ++c)
            for (const auto& [m, a] : v[c].terms()) {
                Eigen::Index off = rows.at({c, m});
                for (std::size_t k = 0; k < npts; ++k) out(off + static_cast<Eigen::Index>(k)) = weight[c] * a[k];
            }
    };
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(offset, static_cast<Eigen::Index>(cols.size()));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(offset);
    for (std::size_t j = 0; j < cols.size(); ++j) fill(cols[j], A.col(static_cast<Eigen::Index>(j)));
    fill(target, b);

    Projection p;
    if (cols.empty()) return p;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(1e-10);
    cod.compute(A);
    p.x = cod.solve(b);
    p.null_directions = static_cast<int>(cols.size()) - static_cast<int>(cod.rank());
    return p;
}

GridField basis_field(const Grid& grid, int n, const Array& values, Mask m) { return GridField::real(grid, n, values, m); }

GridField divergence_sum(const GridField& a, const GridField& b) { return derivative(a, 0) + derivative(b, 1); }

}  // namespace

int fourier_cutoff(const Grid& grid) {
    int n = *std::min_element(grid.shape.begin(), grid.shape.end());
    return std::max(0, n / 4);
}

VectorField VectorField::zero(const Grid& grid, int generators) {
    return {{GridField(grid, generators), GridField(grid, generators)}};
}

VectorField sample_vector_field(const Grid& grid, int generators,
                                const std::function<std::array<double, 2>(double, double)>& X) {
    if (grid.dim() != 2) throw ShapeError("vector fields live on a surface");
    Array x = grid.coordinate(0), y = grid.coordinate(1);
    Array v0(grid.size()), v1(grid.size());
    double scale = 1.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        auto v = X(x[k], y[k]);
        v0[k] = v[0], v1[k] = v[1];
        scale = std::max({scale, std::abs(v[0]), std::abs(v[1])});
        for (int axis = 0; axis < 2; ++axis) {
            auto w = axis == 0 ? X(x[k] + grid.period[0], y[k]) : X(x[k], y[k] + grid.period[1]);
            if (std::abs(w[0] - v[0]) > 1e-9 * scale || std::abs(w[1] - v[1]) > 1e-9 * scale)
                throw RegimeError("vector field is not periodic on the torus");
        }
    }
    return {{GridField::real(grid, generators, v0), GridField::real(grid, generators, v1)}};
}

SymmetricTensor lie_derivative_metric(const SurfaceGeometry& geom, const VectorField& X) {
    require_flat(geom);
    for (const auto& c : X.x)
        if (max_abs(c) != 0.0 && parity_of(c) != Parity::Even) throw ParityError("vector field must be even");
    return {2.0 * derivative(X.x[0], 0), derivative(X.x[1], 0) + derivative(X.x[0], 1), 2.0 * derivative(X.x[1], 1)};
}

GravitinoField lie_derivative_gravitino(const SurfaceGeometry& geom, const GravitinoField& chi, const VectorField& X) {
    require_flat(geom);
    const CliffordConvention conv = CliffordConvention::standard();
    std::array<std::array<GridField, 2>, 2> dX;  // dX[a][b] = d_a X^b
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) dX[a][b] = derivative(X.x[b], a);
    GridField rot = 0.25 * (dX[0][1] - dX[1][0]);
    GravitinoField r = GravitinoField::zero(geom.grid, geom.generators());
    for (int a = 0; a < 2; ++a) {
        SpinorField s = X.x[0] * derivative(chi.chi[a], 0) + X.x[1] * derivative(chi.chi[a], 1);
        for (int b = 0; b < 2; ++b) s = s + dX[a][b] * chi.chi[b];
        r.chi[a] = s - rot * apply_matrix(conv.volume(), chi.chi[a]);
    }
    return r;
}

SymmetricTensor susy_metric_image(const SurfaceGeometry& geom, const GravitinoField& chi, const SpinorField& q,
                                  const Conventions& conv) {
    auto v = susy_metric_gravitino(geom, chi, q, CliffordConvention::standard(), conv.susy);
    const auto& H = v.frame_mix;
    return {-2.0 * H[0][0], -1.0 * (H[0][1] + H[1][0]), -2.0 * H[1][1]};
}

GravitinoField susy_gravitino_image(const SurfaceGeometry& geom, const GravitinoField& chi, const SpinorField& q,
                                    const Conventions& conv) {
    auto v = susy_metric_gravitino(geom, chi, q, CliffordConvention::standard(), conv.susy);
    GravitinoField r = v.chi;
    if (conv.susy.transport_gravitino)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) r.chi[a] = r.chi[a] + v.frame_mix[a][b] * chi.chi[b];
    return r;
}

SymmetricTensor operator+(const SymmetricTensor& a, const SymmetricTensor& b) {
    return {a.t11 + b.t11, a.t12 + b.t12, a.t22 + b.t22};
}

SymmetricTensor operator-(const SymmetricTensor& a, const SymmetricTensor& b) {
    return {a.t11 - b.t11, a.t12 - b.t12, a.t22 - b.t22};
}

SymmetricTensor operator*(const GridField& u, const SymmetricTensor& t) { return {u * t.t11, u * t.t12, u * t.t22}; }

double max_abs(const SymmetricTensor& t) { return std::max({max_abs(t.t11), max_abs(t.t12), max_abs(t.t22)}); }

MetricDecomposition decompose_metric(const SurfaceGeometry& geom, const GravitinoField& chi, const SymmetricTensor& dg,
                                     const Conventions& conv) {
    require_flat(geom);
    validate(chi);
    for (const auto& c : components(dg))
        if (max_abs(c) != 0.0 && parity_of(c) != Parity::Even) throw ParityError("metric deformation must be even");
    const Grid& grid = geom.grid;
    const int n = geom.generators();
    const auto basis = fourier_basis(grid);
    const std::set<Mask> out = masks_of(components(dg));
    const bool gravitino = max_abs(chi) != 0.0;
    const std::set<Mask> qmasks = gravitino ? submasks(out, Parity::Odd) : std::set<Mask>{};
    const GridField one = GridField::real(grid, n, Array(grid.size(), 1.0));

    // field 0: lambda, 1: X, 2: q
    std::vector<Unknown> unknowns;
    for (Mask m : out)
        for (int j = 0; j < static_cast<int>(basis.size()); ++j) {
            unknowns.push_back({0, 0, m, j});
            for (int c = 0; c < 2; ++c) unknowns.push_back({1, c, m, j});
        }
    for (Mask m : qmasks)
        for (int j = 0; j < static_cast<int>(basis.size()); ++j)
            for (int c = 0; c < 2; ++c) unknowns.push_back({2, c, m, j});

    auto image = [&](const GridField& lambda, const VectorField& X, const SpinorField& q) {
        SymmetricTensor r = lambda * SymmetricTensor{one, GridField(grid, n), one};
        r = r + lie_derivative_metric(geom, X);
        if (gravitino) r = r + susy_metric_image(geom, chi, q, conv);
        return r;
    };

    std::vector<std::vector<GridField>> cols;
    for (const Unknown& u : unknowns) {
        GridField lambda(grid, n);
        VectorField X = VectorField::zero(grid, n);
        SpinorField q = SpinorField::zero(grid, n, Parity::Odd);
        GridField f = basis_field(grid, n, basis[u.mode], u.mask);
        if (u.field == 0) lambda = f;
        if (u.field == 1) X.x[u.comp] = f;
        if (u.field == 2) q.c[u.comp] = f;
        cols.push_back(components(image(lambda, X, q)));
    }
    // The off-diagonal entry appears twice in the tensor norm.
    Projection p = project(cols, components(dg), {1.0, std::sqrt(2.0), 1.0});

    MetricDecomposition r;
    r.lambda = GridField(grid, n);
    r.X = VectorField::zero(grid, n);
    r.q = SpinorField::zero(grid, n, Parity::Odd);
    for (std::size_t j = 0; j < unknowns.size(); ++j) {
        const Unknown& u = unknowns[j];
        GridField f = p.x(static_cast<Eigen::Index>(j)) * basis_field(grid, n, basis[u.mode], u.mask);
        if (u.field == 0) r.lambda += f;
        if (u.field == 1) r.X.x[u.comp] += f;
        if (u.field == 2) r.q.c[u.comp] += f;
    }
    for (auto* f : {&r.lambda, &r.X.x[0], &r.X.x[1], &r.q.c[0], &r.q.c[1]}) f->prune();
    SymmetricTensor fitted = image(r.lambda, r.X, r.q);
    r.D = dg - fitted;
    r.reassembly = max_abs(fitted + r.D - dg);
    r.trace = max_abs(r.D.t11 + r.D.t22);
    r.divergence = std::max(max_abs(divergence_sum(r.D.t11, r.D.t12)), max_abs(divergence_sum(r.D.t12, r.D.t22)));
    r.null_directions = p.null_directions;
    return r;
}

GravitinoDecomposition decompose_gravitino(const SurfaceGeometry& geom, const GravitinoField& chi,
                                           const GravitinoField& dchi, const Conventions& conv) {
    require_flat(geom);
    validate(chi);
    validate(dchi);
    const Grid& grid = geom.grid;
    const int n = geom.generators();
    const auto basis = fourier_basis(grid);
    const std::set<Mask> out = masks_of(components(dchi));
    const bool gravitino = max_abs(chi) != 0.0;
    const std::set<Mask> qmasks = gravitino ? submasks(out, Parity::Odd) : out;
    const std::set<Mask> xmasks = gravitino ? submasks(out, Parity::Even) : std::set<Mask>{};

    // field 0: t, 1: q, 2: X
    std::vector<Unknown> unknowns;
    for (Mask m : out)
        for (int j = 0; j < static_cast<int>(basis.size()); ++j)
            for (int c = 0; c < 2; ++c) unknowns.push_back({0, c, m, j});
    for (Mask m : qmasks)
        for (int j = 0; j < static_cast<int>(basis.size()); ++j)
            for (int c = 0; c < 2; ++c) unknowns.push_back({1, c, m, j});
    for (Mask m : xmasks)
        for (int j = 0; j < static_cast<int>(basis.size()); ++j)
            for (int c = 0; c < 2; ++c) unknowns.push_back({2, c, m, j});

    const GravitinoField none = GravitinoField::zero(grid, n);
    auto image = [&](const SpinorField& t, const SpinorField& q, const VectorField& X) {
        GravitinoField r = super_weyl(none, t);
        r = r + susy_gravitino_image(geom, chi, q, conv);
        if (gravitino) r = r + lie_derivative_gravitino(geom, chi, X);
        return r;
    };

    std::vector<std::vector<GridField>> cols;
    for (const Unknown& u : unknowns) {
        SpinorField t = SpinorField::zero(grid, n, Parity::Odd), q = t;
        VectorField X = VectorField::zero(grid, n);
        GridField f = basis_field(grid, n, basis[u.mode], u.mask);
        if (u.field == 0) t.c[u.comp] = f;
        if (u.field == 1) q.c[u.comp] = f;
        if (u.field == 2) X.x[u.comp] = f;
        cols.push_back(components(image(t, q, X)));
    }
    Projection p = project(cols, components(dchi), {1.0, 1.0, 1.0, 1.0});

    GravitinoDecomposition r;
    r.t = SpinorField::zero(grid, n, Parity::Odd);
    r.q = r.t;
    r.X = VectorField::zero(grid, n);
    for (std::size_t j = 0; j < unknowns.size(); ++j) {
        const Unknown& u = unknowns[j];
        GridField f = p.x(static_cast<Eigen::Index>(j)) * basis_field(grid, n, basis[u.mode], u.mask);
        if (u.field == 0) r.t.c[u.comp] += f;
        if (u.field == 1) r.q.c[u.comp] += f;
        if (u.field == 2) r.X.x[u.comp] += f;
    }
    for (auto* f : {&r.t.c[0], &r.t.c[1], &r.q.c[0], &r.q.c[1], &r.X.x[0], &r.X.x[1]}) f->prune();
    GravitinoField fitted = image(r.t, r.q, r.X);
    r.D = dchi - fitted;
    r.reassembly = max_abs(fitted + r.D - dchi);
    r.gamma_trace = max_abs(gamma_trace(r.D));
    r.divergence = max_abs(derivative(r.D.chi[0], 0) + derivative(r.D.chi[1], 1));
    r.null_directions = p.null_directions;
    return r;
}

DeformationDimensions true_deformation_dimensions(const SurfaceGeometry& geom) {
    require_flat(geom);
    const Grid& grid = geom.grid;
    const Eigen::Index npts = static_cast<Eigen::Index>(grid.size());
    const int cutoff = fourier_cutoff(grid);

    auto nullity = [](const Eigen::MatrixXd& A) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
        const auto& s = svd.singularValues();
        double tol = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
        int rank = 0;
        for (Eigen::Index k = 0; k < s.size(); ++k)
            if (s(k) > tol) ++rank;
        return static_cast<int>(A.cols()) - rank;
    };
    auto put = [&](Eigen::MatrixXd& A, Eigen::Index col, int block, const Array& v) {
        for (Eigen::Index k = 0; k < npts; ++k) A(block * npts + k, col) += v[static_cast<std::size_t>(k)];
    };

    DeformationDimensions d;
    for (int k1 = 0; k1 <= cutoff; ++k1)
        for (int k2 = -cutoff; k2 <= cutoff; ++k2) {
            if (k1 == 0 && k2 < 0) continue;
            std::vector<Array> funcs{cos_mode(grid, {k1, k2})};
            if (k1 != 0 || k2 != 0) funcs.push_back(sin_mode(grid, {k1, k2}));
            std::vector<std::array<Array, 2>> dfuncs;
            for (const auto& f : funcs) dfuncs.push_back({differentiate(grid, f, 0), differentiate(grid, f, 1)});
            const Eigen::Index nf = static_cast<Eigen::Index>(funcs.size());

            // Symmetric tensors (g11, g12, g22) -> (trace, div_1, div_2).
            Eigen::MatrixXd E = Eigen::MatrixXd::Zero(3 * npts, 3 * nf);
            for (Eigen::Index j = 0; j < nf; ++j) {
                const auto& f = funcs[j];
                const auto& df = dfuncs[j];
                put(E, 0 * nf + j, 0, f);      // g11 in the trace
                put(E, 0 * nf + j, 1, df[0]);  // d_1 g11
                put(E, 1 * nf + j, 1, df[1]);  // d_2 g12
                put(E, 1 * nf + j, 2, df[0]);  // d_1 g12
                put(E, 2 * nf + j, 0, f);      // g22 in the trace
                put(E, 2 * nf + j, 2, df[1]);  // d_2 g22
            }
            d.even += nullity(E);

            // Gravitino (chi_a alpha) -> (gamma^a chi_a, d_a chi_a).
            const CliffordConvention conv = CliffordConvention::standard();
            Eigen::MatrixXd O = Eigen::MatrixXd::Zero(4 * npts, 4 * nf);
            for (int a = 0; a < 2; ++a)
                for (int al = 0; al < 2; ++al)
                    for (Eigen::Index j = 0; j < nf; ++j) {
                        Eigen::Index col = (2 * a + al) * nf + j;
                        for (int row = 0; row < 2; ++row) {
                            double g = conv.gamma[a][row][al];
                            if (g == 0.0) continue;
                            Array v = funcs[j];
                            for (double& x : v) x *= g;
                            put(O, col, row, v);
                        }
                        put(O, col, 2 + al, dfuncs[j][a]);
                    }
            d.odd += nullity(O);
        }
    return d;
}

}  // namespace supersigma
