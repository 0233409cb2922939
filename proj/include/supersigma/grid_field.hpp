#pragma once

/**
 * @file grid_field.hpp
 * @brief Grassmann-valued fields sampled on uniform periodic grids.
 *
 * A GridField stores one real array per Grassmann monomial, so products and
 * derivatives act on whole arrays. Derivatives use the dense spectral
 * differentiation matrix, which is exact for trig polynomials below Nyquist.
 */

#include <cstddef>
#include <map>
#include <vector>

#include <json.hpp>

#include "supersigma/grassmann.hpp"

namespace supersigma {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Grid {
    std::vector<int> shape;      // points per axis, row-major, axis 0 slowest
    std::vector<double> period;  // length of each axis

    Grid() = default;
    Grid(std::vector<int> shape, std::vector<double> period);

    static Grid circle(int n, double period = kTwoPi);
    static Grid torus(int n1, int n2, double p1 = kTwoPi, double p2 = kTwoPi);

    int dim() const { return static_cast<int>(shape.size()); }
    std::size_t size() const;
    double spacing(int axis) const { return period[axis] / shape[axis]; }
    double cell_volume() const;
    double volume() const;
    // Value of coordinate x^axis at every grid point.
    std::vector<double> coordinate(int axis) const;

    bool operator==(const Grid&) const = default;
};

using Array = std::vector<double>;

// Row-major n x n matrix D with (D v)_j = v'(x_j) for trig interpolants.
const std::vector<double>& spectral_diff_matrix(int n, double period);

Array differentiate(const Grid& grid, const Array& v, int axis);
double trapezoid(const Grid& grid, const Array& v);

// Evaluates the trigonometric interpolant of 1D periodic samples (or its
// derivative of the given order) at arbitrary points.
Array trig_interpolate(const Grid& grid, const Array& v, const Array& points, int derivative = 0);

class GridField {
public:
    GridField() = default;
    GridField(Grid grid, int generators);

    static GridField constant(const Grid& grid, const GrassmannNumber& c);
    // values * (monomial m)
    static GridField real(const Grid& grid, int generators, Array values, Mask m = 0);

    const Grid& grid() const { return grid_; }
    int generators() const { return n_; }
    std::size_t size() const { return grid_.size(); }
    const std::map<Mask, Array>& terms() const { return terms_; }

    // Array of monomial m, created as zeros if absent.
    Array& component(Mask m);
    const Array* find(Mask m) const;
    GrassmannNumber at(std::size_t point) const;

    GridField& operator+=(const GridField& o);
    GridField& operator-=(const GridField& o);
    GridField& operator*=(double s);

    // Removes monomials whose array is identically zero.
    void prune();

private:
    Grid grid_;
    int n_ = 0;
    std::map<Mask, Array> terms_;
};

GridField operator+(GridField a, const GridField& b);
GridField operator-(GridField a, const GridField& b);
GridField operator-(GridField a);
GridField operator*(double s, GridField a);
GridField operator*(GridField a, double s);
// Pointwise Grassmann product.
GridField operator*(const GridField& a, const GridField& b);
// Pointwise product with a real array.
GridField operator*(const Array& w, GridField a);
GridField operator*(const GridField& a, const GrassmannNumber& c);
GridField operator*(const GrassmannNumber& c, const GridField& a);

GridField derivative(const GridField& f, int axis);
Array body(const GridField& f);
GridField soul(const GridField& f);
Parity parity_of(const GridField& f);
double max_abs(const GridField& f);
GridField inverse(const GridField& f);
GridField pow(const GridField& f, double p);
GridField extend(const GridField& f, int generators);
// Left multiplication by generator `gen`.
GridField left_multiply_generator(const GridField& f, int gen);
// Trapezoid rule over the periodic grid, coefficient-wise.
GrassmannNumber integrate(const GridField& f);

void check_compatible(const GridField& a, const GridField& b);

nlohmann::json to_json(const GridField& f);
GridField grid_field_from_json(const nlohmann::json& j);

}  // namespace supersigma
