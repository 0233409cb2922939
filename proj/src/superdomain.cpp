#include "supersigma/superdomain.hpp"

#include <string>

#include "supersigma/errors.hpp"

namespace supersigma {

namespace {

Mask low_bits(int n) { return n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1; }

void check_same(const SuperFunction& a, const SuperFunction& b) {
    if (a.odd_dim() != b.odd_dim()) throw DimensionError("superfunctions with different odd dimension");
    check_compatible(a.field(), b.field());
}

void require_r11(const SuperFunction& f) {
    if (f.even_dim() != 1 || f.odd_dim() != 1) throw DimensionError("operation is defined on R^{1|1} only");
}

bool has_parity(const GridField& f, Parity p) { return max_abs(f) == 0.0 || parity_of(f) == p; }

void require_odd(const GrassmannNumber& q) {
    if (!q.is_zero() && parity_of(q) != Parity::Odd) throw ParityError("SUSY parameter q must be odd");
}

}  // namespace

SuperFunction::SuperFunction(Grid grid, int odd_dim, int parameters)
    : n_(odd_dim), field_(std::move(grid), odd_dim + parameters) {
    if (odd_dim < 0 || parameters < 0) throw DimensionError("negative dimension");
}

SuperFunction SuperFunction::lift(const GridField& f, int odd_dim) {
    SuperFunction r(f.grid(), odd_dim, f.generators());
    r.add_coefficient(0, f);
    return r;
}

SuperFunction SuperFunction::lift(const Grid& grid, int odd_dim, const GrassmannNumber& c) {
    return lift(GridField::constant(grid, c), odd_dim);
}

SuperFunction SuperFunction::odd_coordinate(const Grid& grid, int odd_dim, int parameters, int alpha) {
    if (alpha < 0 || alpha >= odd_dim) throw RangeError("odd coordinate index out of range");
    SuperFunction r(grid, odd_dim, parameters);
    r.field_.component(Mask{1} << alpha) = Array(grid.size(), 1.0);
    return r;
}

SuperFunction SuperFunction::real(const Grid& grid, int odd_dim, int parameters, Array values) {
    SuperFunction r(grid, odd_dim, parameters);
    if (values.size() != grid.size()) throw ShapeError("array does not match grid");
    r.field_.component(0) = std::move(values);
    return r;
}

GridField SuperFunction::coefficient(Mask gamma) const {
    if ((gamma & ~low_bits(n_)) != 0) throw RangeError("odd multi-index outside the odd dimension");
    GridField r(grid(), parameters());
    for (const auto& [m, a] : field_.terms())
        if ((m & low_bits(n_)) == gamma) r.component(m >> n_) = a;
    return r;
}

void SuperFunction::add_coefficient(Mask gamma, const GridField& c) {
    if ((gamma & ~low_bits(n_)) != 0) throw RangeError("odd multi-index outside the odd dimension");
    if (c.generators() != parameters()) throw DimensionError("coefficient field over the wrong parameter algebra");
    if (!(c.grid() == grid())) throw ShapeError("coefficient field on a different grid");
    for (const auto& [p, a] : c.terms()) {
        Array& dst = field_.component(gamma | (p << n_));
        for (std::size_t i = 0; i < a.size(); ++i) dst[i] += a[i];
    }
}

SuperFunction& SuperFunction::operator+=(const SuperFunction& o) {
    check_same(*this, o);
    field_ += o.field_;
    return *this;
}

SuperFunction& SuperFunction::operator-=(const SuperFunction& o) {
    check_same(*this, o);
    field_ -= o.field_;
    return *this;
}

SuperFunction& SuperFunction::operator*=(double s) {
    field_ *= s;
    return *this;
}

SuperFunction operator+(SuperFunction a, const SuperFunction& b) { return a += b; }
SuperFunction operator-(SuperFunction a, const SuperFunction& b) { return a -= b; }
SuperFunction operator*(double s, SuperFunction a) { return a *= s; }

SuperFunction operator*(const SuperFunction& a, const SuperFunction& b) {
    check_same(a, b);
    SuperFunction r(a.grid(), a.odd_dim(), a.parameters());
    r.field() = a.field() * b.field();
    return r;
}

Parity parity_of(const SuperFunction& f) { return parity_of(f.field()); }

double max_abs(const SuperFunction& f) { return max_abs(f.field()); }

SuperFunction partial_even(const SuperFunction& f, int axis) {
    if (axis < 0 || axis >= f.even_dim()) throw RangeError("even axis " + std::to_string(axis) + " out of range");
    SuperFunction r(f.grid(), f.odd_dim(), f.parameters());
    r.field() = derivative(f.field(), axis);
    return r;
}

SuperFunction partial_odd(const SuperFunction& f, int alpha) {
    if (alpha < 0 || alpha >= f.odd_dim()) throw RangeError("odd index " + std::to_string(alpha) + " out of range");
    const Mask bit = Mask{1} << alpha;
    SuperFunction r(f.grid(), f.odd_dim(), f.parameters());
    for (const auto& [m, a] : f.field().terms()) {
        if (!(m & bit)) continue;
        const double s = (std::popcount(m & (bit - 1)) & 1) ? -1.0 : 1.0;
        Array& dst = r.field().component(m & ~bit);
        for (std::size_t i = 0; i < a.size(); ++i) dst[i] += s * a[i];
    }
    return r;
}

namespace {

SuperFunction times_eta(const SuperFunction& f, int alpha) {
    SuperFunction r(f.grid(), f.odd_dim(), f.parameters());
    r.field() = left_multiply_generator(f.field(), alpha);
    return r;
}

}  // namespace

SuperFunction apply_D(const SuperFunction& f, int orientation) {
    require_r11(f);
    return partial_odd(f, 0) + static_cast<double>(orientation) * times_eta(partial_even(f, 0), 0);
}

SuperFunction apply_Q(const SuperFunction& f, const GrassmannNumber& q, int orientation) {
    require_r11(f);
    require_odd(q);
    if (q.generators() != f.parameters()) throw DimensionError("q lives in a different parameter algebra");
    SuperFunction inner = partial_odd(f, 0) - static_cast<double>(orientation) * times_eta(partial_even(f, 0), 0);
    SuperFunction ql(f.grid(), 1, f.parameters());
    for (const auto& [m, c] : q.terms()) ql.field().component(m << 1) = Array(f.grid().size(), c);
    return ql * inner;
}

SuperFunction apply(const SuperVectorField& v, const SuperFunction& f) {
    if (static_cast<int>(v.even.size()) != f.even_dim() || static_cast<int>(v.odd.size()) != f.odd_dim())
        throw DimensionError("vector field components do not match the superdomain");
    SuperFunction r(f.grid(), f.odd_dim(), f.parameters());
    for (int a = 0; a < f.even_dim(); ++a) r += v.even[a] * partial_even(f, a);
    for (int al = 0; al < f.odd_dim(); ++al) r += v.odd[al] * partial_odd(f, al);
    return r;
}

SuperVectorField vector_field_D(const Grid& grid, int parameters, int orientation) {
    SuperVectorField v;
    v.even.push_back(static_cast<double>(orientation) * SuperFunction::odd_coordinate(grid, 1, parameters, 0));
    v.odd.push_back(SuperFunction::real(grid, 1, parameters, Array(grid.size(), 1.0)));
    return v;
}

CoordinateChange11 CoordinateChange11::identity(const Grid& grid, int parameters) {
    CoordinateChange11 c;
    c.displacement = GridField(grid, parameters);
    c.g1 = GridField(grid, parameters);
    c.gamma0 = GridField(grid, parameters);
    c.gamma1 = GridField::real(grid, parameters, Array(grid.size(), 1.0));
    return c;
}

namespace {

// Derivative of order k of a Lambda_N field, evaluated at arbitrary points.
GridField evaluate_at(const GridField& f, const Array& points, int k) {
    GridField r(f.grid(), f.generators());
    for (const auto& [m, a] : f.terms()) r.component(m) = trig_interpolate(f.grid(), a, points, k);
    return r;
}

// f(b + t) = sum_k f^(k)(b) t^k / k! for nilpotent t (lifted to R^{1|1}).
SuperFunction nilpotent_taylor(const GridField& f, const Array& b, const SuperFunction& t) {
    SuperFunction sum = SuperFunction::lift(evaluate_at(f, b, 0), 1);
    SuperFunction power = SuperFunction::real(f.grid(), 1, f.generators(), Array(f.size(), 1.0));
    double factorial = 1.0;
    for (int k = 1; k <= f.generators() + 1; ++k) {
        power = power * t;
        power.field().prune();
        if (power.field().terms().empty()) break;
        factorial *= k;
        sum += (1.0 / factorial) * (SuperFunction::lift(evaluate_at(f, b, k), 1) * power);
    }
    return sum;
}

}  // namespace

SuperFunction pullback_coordinate_change(const SuperFunction& f, const CoordinateChange11& c) {
    require_r11(f);
    const Grid& grid = f.grid();
    const int np = f.parameters();
    for (const GridField* g : {&c.displacement, &c.g1, &c.gamma0, &c.gamma1}) {
        if (g->generators() != np) throw DimensionError("coordinate change over a different parameter algebra");
        if (!(g->grid() == grid)) throw ShapeError("coordinate change on a different grid");
    }
    if (!has_parity(c.g1, Parity::Odd) || !has_parity(c.gamma0, Parity::Odd))
        throw ParityError("g1 and gamma0 must be odd");
    if (!has_parity(c.displacement, Parity::Even) || !has_parity(c.gamma1, Parity::Even))
        throw ParityError("g0 and gamma1 must be even");

    Array disp = body(c.displacement);
    Array slope = differentiate(grid, disp, 0);
    Array x = grid.coordinate(0);
    Array b(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(1.0 + slope[i] > 0.0)) throw RegimeError("body map of the coordinate change is not invertible");
        b[i] = x[i] + disp[i];
    }
    Array g1b = body(c.gamma1);
    for (double v : g1b)
        if (v == 0.0) throw RegimeError("gamma1 must have an invertible body");

    SuperFunction eta = SuperFunction::odd_coordinate(grid, 1, np, 0);
    SuperFunction t = SuperFunction::lift(soul(c.displacement), 1) + eta * SuperFunction::lift(c.g1, 1);
    SuperFunction new_eta = SuperFunction::lift(c.gamma0, 1) + eta * SuperFunction::lift(c.gamma1, 1);

    return nilpotent_taylor(f.coefficient(0), b, t) + new_eta * nilpotent_taylor(f.coefficient(1), b, t);
}

Embedding Embedding::trivial(const Grid& grid, int odd_dim, int parameters) {
    Embedding e;
    for (int a = 0; a < odd_dim; ++a) e.xi.emplace_back(grid, parameters);
    return e;
}

namespace {

void check_embedding(const SuperFunction& f, const Embedding& i) {
    if (static_cast<int>(i.xi.size()) != f.odd_dim()) throw DimensionError("embedding needs one xi per odd coordinate");
    for (const auto& x : i.xi) {
        if (x.generators() != f.parameters()) throw DimensionError("xi over a different parameter algebra");
        if (!(x.grid() == f.grid())) throw ShapeError("xi on a different grid");
        if (!has_parity(x, Parity::Odd)) throw ParityError("embedding images xi must be odd");
    }
}

}  // namespace

GridField restrict(const SuperFunction& f, const Embedding& i) {
    check_embedding(f, i);
    const int n = f.odd_dim();
    GridField r(f.grid(), f.parameters());
    for (Mask gamma = 0; gamma < (Mask{1} << n); ++gamma) {
        GridField c = f.coefficient(gamma);
        if (c.terms().empty()) continue;
        GridField prod = GridField::real(f.grid(), f.parameters(), Array(f.grid().size(), 1.0));
        for (int a = 0; a < n; ++a)
            if (gamma & (Mask{1} << a)) prod = prod * i.xi[a];
        r += prod * c;
    }
    return r;
}

SuperFunction adapt_to_embedding(const SuperFunction& f, const Embedding& i) {
    check_embedding(f, i);
    const int n = f.odd_dim();
    std::vector<SuperFunction> shifted;
    for (int a = 0; a < n; ++a)
        shifted.push_back(SuperFunction::odd_coordinate(f.grid(), n, f.parameters(), a) +
                          SuperFunction::lift(i.xi[a], n));
    SuperFunction r(f.grid(), n, f.parameters());
    for (Mask gamma = 0; gamma < (Mask{1} << n); ++gamma) {
        GridField c = f.coefficient(gamma);
        if (c.terms().empty()) continue;
        SuperFunction prod = SuperFunction::real(f.grid(), n, f.parameters(), Array(f.grid().size(), 1.0));
        for (int a = 0; a < n; ++a)
            if (gamma & (Mask{1} << a)) prod = prod * shifted[a];
        r += prod * SuperFunction::lift(c, n);
    }
    return r;
}

}  // namespace supersigma
