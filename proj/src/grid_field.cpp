#include "supersigma/grid_field.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>
#include <string>
#include <utility>

#include "supersigma/errors.hpp"

namespace supersigma {

Grid::Grid(std::vector<int> s, std::vector<double> p) : shape(std::move(s)), period(std::move(p)) {
    if (shape.size() != period.size()) throw ShapeError("grid shape and period lengths differ");
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (shape[i] < 1) throw ShapeError("grid axis needs at least one point");
        if (!(period[i] > 0.0)) throw ShapeError("grid period must be positive");
    }
}

Grid Grid::circle(int n, double p) { return Grid({n}, {p}); }

Grid Grid::torus(int n1, int n2, double p1, double p2) { return Grid({n1, n2}, {p1, p2}); }

std::size_t Grid::size() const {
    std::size_t s = 1;
    for (int n : shape) s *= static_cast<std::size_t>(n);
    return s;
}

double Grid::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim(); ++a) v *= spacing(a);
    return v;
}

double Grid::volume() const {
    double v = 1.0;
    for (double p : period) v *= p;
    return v;
}

std::vector<double> Grid::coordinate(int axis) const {
    if (axis < 0 || axis >= dim()) throw RangeError("grid axis out of range");
    std::vector<double> x(size());
    std::size_t stride = 1;
    for (int a = dim() - 1; a > axis; --a) stride *= shape[a];
    double h = spacing(axis);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = h * static_cast<double>((i / stride) % shape[axis]);
    return x;
}

const std::vector<double>& spectral_diff_matrix(int n, double period) {
    static std::mutex mu;
    static std::map<std::pair<int, double>, std::vector<double>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, period);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
    const double scale = kTwoPi / period;
    const double pi = kTwoPi / 2;
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            if (j == k) continue;
            int m = j - k;
            double sign = (m % 2 == 0) ? 1.0 : -1.0;
            double t = m * pi / n;
            double v = (n % 2 == 0) ? 0.5 * sign / std::tan(t) : 0.5 * sign / std::sin(t);
            d[static_cast<std::size_t>(j) * n + k] = scale * v;
        }
    }
    return cache.emplace(key, std::move(d)).first->second;
}

Array differentiate(const Grid& grid, const Array& v, int axis) {
    if (axis < 0 || axis >= grid.dim()) throw RangeError("derivative axis out of range");
    if (v.size() != grid.size()) throw ShapeError("array does not match grid");
    const int n = grid.shape[axis];
    const auto& d = spectral_diff_matrix(n, grid.period[axis]);
    std::size_t inner = 1;
    for (int a = grid.dim() - 1; a > axis; --a) inner *= grid.shape[a];
    std::size_t outer = grid.size() / (inner * n);
    Array out(v.size(), 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
        const std::size_t base = o * n * inner;
        for (int j = 0; j < n; ++j) {
            double* dst = &out[base + j * inner];
            const double* row = &d[static_cast<std::size_t>(j) * n];
            for (int k = 0; k < n; ++k) {
                const double w = row[k];
                if (w == 0.0) continue;
                const double* src = &v[base + k * inner];
                for (std::size_t i = 0; i < inner; ++i) dst[i] += w * src[i];
            }
        }
    }
    return out;
}

double trapezoid(const Grid& grid, const Array& v) {
    if (v.size() != grid.size()) throw ShapeError("array does not match grid");
    return std::accumulate(v.begin(), v.end(), 0.0) * grid.cell_volume();
}

Array trig_interpolate(const Grid& grid, const Array& v, const Array& points, int derivative) {
    if (grid.dim() != 1) throw ShapeError("trigonometric interpolation is implemented for 1D grids");
    if (v.size() != grid.size()) throw ShapeError("array does not match grid");
    const int n = grid.shape[0];
    const double w = kTwoPi / grid.period[0];
    const double h = grid.spacing(0);
    using cd = std::complex<double>;
    const int kmax = n / 2;
    std::vector<cd> c(kmax + 1);
    for (int k = 0; k <= kmax; ++k) {
        cd s = 0;
        for (int j = 0; j < n; ++j) s += v[j] * std::exp(cd(0, -k * w * h * j));
        c[k] = s / static_cast<double>(n);
    }
    Array out(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
        double x = points[p];
        double acc = 0.0;
        for (int k = 0; k <= kmax; ++k) {
            // Real signals: modes +k and -k combine into 2 Re(c_k e^{ikwx}).
            double weight = (k == 0 || (n % 2 == 0 && k == kmax)) ? 1.0 : 2.0;
            cd factor = 1.0;
            for (int d = 0; d < derivative; ++d) factor *= cd(0, k * w);
            cd term = c[k] * factor * std::exp(cd(0, k * w * x));
            if (n % 2 == 0 && k == kmax && k > 0) {
                // Nyquist mode is a pure cosine: a cos(kwx) with a = Re c_k.
                double a = c[k].real();
                double kw = k * w;
                double val = 0.0;
                switch (((derivative % 4) + 4) % 4) {
                    case 0: val = std::cos(kw * x); break;
                    case 1: val = -std::sin(kw * x); break;
                    case 2: val = -std::cos(kw * x); break;
                    default: val = std::sin(kw * x); break;
                }
                acc += a * std::pow(kw, derivative) * val;
                continue;
            }
            acc += weight * term.real();
        }
        out[p] = acc;
    }
    return out;
}

GridField::GridField(Grid grid, int generators) : grid_(std::move(grid)), n_(generators) {
    if (generators < 0 || generators > kMaxGenerators) throw DimensionError("generator count out of range");
}

GridField GridField::constant(const Grid& grid, const GrassmannNumber& c) {
    GridField f(grid, c.generators());
    for (const auto& [m, v] : c.terms()) f.terms_[m] = Array(grid.size(), v);
    return f;
}

GridField GridField::real(const Grid& grid, int generators, Array values, Mask m) {
    if (values.size() != grid.size()) throw ShapeError("array does not match grid");
    GridField f(grid, generators);
    if (generators < 64 && (m >> generators) != 0) throw RangeError("monomial outside the algebra");
    f.terms_[m] = std::move(values);
    return f;
}

Array& GridField::component(Mask m) {
    auto it = terms_.find(m);
    if (it == terms_.end()) it = terms_.emplace(m, Array(grid_.size(), 0.0)).first;
    return it->second;
}

const Array* GridField::find(Mask m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? nullptr : &it->second;
}

GrassmannNumber GridField::at(std::size_t point) const {
    GrassmannNumber r(n_);
    for (const auto& [m, a] : terms_) r.add_term(m, a[point]);
    return r;
}

void check_compatible(const GridField& a, const GridField& b) {
    if (a.generators() != b.generators())
        throw DimensionError("grid fields over different Grassmann algebras (" + std::to_string(a.generators()) +
                             " vs " + std::to_string(b.generators()) + ")");
    if (!(a.grid() == b.grid())) throw ShapeError("grid fields on different grids");
}

GridField& GridField::operator+=(const GridField& o) {
    check_compatible(*this, o);
    for (const auto& [m, a] : o.terms_) {
        Array& dst = component(m);
        for (std::size_t i = 0; i < a.size(); ++i) dst[i] += a[i];
    }
    return *this;
}

GridField& GridField::operator-=(const GridField& o) {
    check_compatible(*this, o);
    for (const auto& [m, a] : o.terms_) {
        Array& dst = component(m);
        for (std::size_t i = 0; i < a.size(); ++i) dst[i] -= a[i];
    }
    return *this;
}

GridField& GridField::operator*=(double s) {
    for (auto& [m, a] : terms_)
        for (double& x : a) x *= s;
    return *this;
}

void GridField::prune() {
    for (auto it = terms_.begin(); it != terms_.end();) {
        bool zero = std::all_of(it->second.begin(), it->second.end(), [](double x) { return x == 0.0; });
        it = zero ? terms_.erase(it) : std::next(it);
    }
}

GridField operator+(GridField a, const GridField& b) { return a += b; }
GridField operator-(GridField a, const GridField& b) { return a -= b; }
GridField operator-(GridField a) { return a *= -1.0; }
GridField operator*(double s, GridField a) { return a *= s; }
GridField operator*(GridField a, double s) { return a *= s; }

GridField operator*(const GridField& a, const GridField& b) {
    check_compatible(a, b);
    GridField r(a.grid(), a.generators());
    const std::size_t n = a.size();
    for (const auto& [ma, va] : a.terms()) {
        for (const auto& [mb, vb] : b.terms()) {
            int s = koszul_sign(ma, mb);
            if (s == 0) continue;
            Array& dst = r.component(ma | mb);
            if (s > 0)
                for (std::size_t i = 0; i < n; ++i) dst[i] += va[i] * vb[i];
            else
                for (std::size_t i = 0; i < n; ++i) dst[i] -= va[i] * vb[i];
        }
    }
    return r;
}

GridField operator*(const Array& w, GridField a) {
    if (w.size() != a.size()) throw ShapeError("weight array does not match grid");
    for (const auto& [m, v] : a.terms()) {
        Array& dst = a.component(m);
        for (std::size_t i = 0; i < w.size(); ++i) dst[i] *= w[i];
    }
    return a;
}

GridField operator*(const GridField& a, const GrassmannNumber& c) { return a * GridField::constant(a.grid(), c); }

GridField operator*(const GrassmannNumber& c, const GridField& a) { return GridField::constant(a.grid(), c) * a; }

GridField derivative(const GridField& f, int axis) {
    GridField r(f.grid(), f.generators());
    for (const auto& [m, a] : f.terms()) r.component(m) = differentiate(f.grid(), a, axis);
    return r;
}

Array body(const GridField& f) {
    const Array* b = f.find(0);
    return b ? *b : Array(f.size(), 0.0);
}

GridField soul(const GridField& f) {
    GridField r(f.grid(), f.generators());
    for (const auto& [m, a] : f.terms())
        if (m != 0) r.component(m) = a;
    return r;
}

Parity parity_of(const GridField& f) {
    bool even = false, odd = false;
    for (const auto& [m, a] : f.terms()) {
        bool nonzero = std::any_of(a.begin(), a.end(), [](double x) { return x != 0.0; });
        if (nonzero) (mask_degree(m) & 1 ? odd : even) = true;
    }
    if (even && odd) return Parity::Mixed;
    return odd ? Parity::Odd : Parity::Even;
}

double max_abs(const GridField& f) {
    double r = 0.0;
    for (const auto& [m, a] : f.terms())
        for (double x : a) r = std::max(r, std::abs(x));
    return r;
}

namespace {

// Sum_k coeffs[k] x^k with x = soul(f)/body(f), scaled pointwise by `scale`.
GridField soul_series(const GridField& f, const Array& scale, const std::vector<double>& coeffs) {
    Array b = body(f);
    Array rb(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) rb[i] = 1.0 / b[i];
    GridField x = rb * soul(f);
    GridField sum = GridField::real(f.grid(), f.generators(), Array(f.size(), coeffs[0]));
    GridField power = GridField::real(f.grid(), f.generators(), Array(f.size(), 1.0));
    for (std::size_t k = 1; k < coeffs.size(); ++k) {
        power = power * x;
        power.prune();
        if (power.terms().empty()) break;
        sum += coeffs[k] * power;
    }
    return scale * sum;
}

}  // namespace

GridField inverse(const GridField& f) {
    Array b = body(f);
    Array scale(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b[i] == 0.0) throw std::domain_error("pointwise inverse needs a nonzero body");
        scale[i] = 1.0 / b[i];
    }
    std::vector<double> coeffs(f.generators() + 1);
    for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs[k] = (k % 2 == 0) ? 1.0 : -1.0;
    return soul_series(f, scale, coeffs);
}

GridField pow(const GridField& f, double p) {
    Array b = body(f);
    Array scale(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!(b[i] > 0.0)) throw std::domain_error("pointwise power needs a positive body");
        scale[i] = std::pow(b[i], p);
    }
    std::vector<double> coeffs(f.generators() + 1);
    coeffs[0] = 1.0;
    for (std::size_t k = 1; k < coeffs.size(); ++k) coeffs[k] = coeffs[k - 1] * (p - (k - 1)) / k;
    return soul_series(f, scale, coeffs);
}

GridField extend(const GridField& f, int generators) {
    if (generators < f.generators()) throw DimensionError("cannot shrink a Grassmann algebra");
    GridField r(f.grid(), generators);
    for (const auto& [m, a] : f.terms()) r.component(m) = a;
    return r;
}

GridField left_multiply_generator(const GridField& f, int gen) {
    if (gen < 0 || gen >= f.generators()) throw RangeError("generator index outside algebra");
    const Mask bit = Mask{1} << gen;
    GridField r(f.grid(), f.generators());
    for (const auto& [m, a] : f.terms()) {
        if (m & bit) continue;
        int s = koszul_sign(bit, m);
        Array& dst = r.component(m | bit);
        for (std::size_t i = 0; i < a.size(); ++i) dst[i] = s * a[i];
    }
    return r;
}

GrassmannNumber integrate(const GridField& f) {
    GrassmannNumber r(f.generators());
    for (const auto& [m, a] : f.terms()) r.add_term(m, trapezoid(f.grid(), a));
    return r;
}

nlohmann::json to_json(const GridField& f) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [m, a] : f.terms()) {
        nlohmann::json idx = nlohmann::json::array();
        for (int i = 0; i < 64; ++i)
            if (m & (Mask{1} << i)) idx.push_back(i + 1);
        terms.push_back({{"idx", idx}, {"values", a}});
    }
    return {{"shape", f.grid().shape}, {"period", f.grid().period}, {"generators", f.generators()},
            {"terms", terms}};
}

GridField grid_field_from_json(const nlohmann::json& j) {
    Grid g(j.at("shape").get<std::vector<int>>(), j.at("period").get<std::vector<double>>());
    GridField f(g, j.at("generators").get<int>());
    for (const auto& t : j.at("terms")) {
        Mask m = 0;
        for (int i : t.at("idx")) m |= Mask{1} << (i - 1);
        Array v = t.at("values").get<Array>();
        if (v.size() != g.size()) throw ShapeError("serialized values do not match grid shape");
        f.component(m) = std::move(v);
    }
    return f;
}

}  // namespace supersigma
