#pragma once

/**
 * @file superdomain.hpp
 * @brief Superfunctions on R^{m|n} x B as finite expansions in the odd
 * coordinates.
 *
 * A SuperFunction is stored as one GridField over the combined algebra of
 * n + N generators: the odd coordinates eta^1..eta^n occupy the low bits and
 * the parameter generators of Lambda_N the high bits. Every monomial is
 * therefore read as eta^gamma xi^p with the etas in front, and graded signs
 * come for free from the Grassmann product.
 */

#include <vector>

#include "supersigma/grid_field.hpp"

namespace supersigma {

class SuperFunction {
public:
    SuperFunction() = default;
    SuperFunction(Grid grid, int odd_dim, int parameters);

    // Embeds a coefficient field over Lambda_N as an eta-free superfunction.
    static SuperFunction lift(const GridField& f, int odd_dim);
    static SuperFunction lift(const Grid& grid, int odd_dim, const GrassmannNumber& c);
    // The odd coordinate eta^alpha (zero based).
    static SuperFunction odd_coordinate(const Grid& grid, int odd_dim, int parameters, int alpha);
    // Real function of the even coordinates.
    static SuperFunction real(const Grid& grid, int odd_dim, int parameters, Array values);

    int even_dim() const { return field_.grid().dim(); }
    int odd_dim() const { return n_; }
    int parameters() const { return field_.generators() - n_; }
    const Grid& grid() const { return field_.grid(); }

    const GridField& field() const { return field_; }
    GridField& field() { return field_; }

    // f_gamma with f = sum_gamma eta^gamma f_gamma; a field over Lambda_N.
    GridField coefficient(Mask gamma) const;
    // Adds eta^gamma * c.
    void add_coefficient(Mask gamma, const GridField& c);

    SuperFunction& operator+=(const SuperFunction& o);
    SuperFunction& operator-=(const SuperFunction& o);
    SuperFunction& operator*=(double s);

private:
    int n_ = 0;
    GridField field_;
};

SuperFunction operator+(SuperFunction a, const SuperFunction& b);
SuperFunction operator-(SuperFunction a, const SuperFunction& b);
SuperFunction operator*(double s, SuperFunction a);
SuperFunction operator*(const SuperFunction& a, const SuperFunction& b);

Parity parity_of(const SuperFunction& f);
double max_abs(const SuperFunction& f);

SuperFunction partial_even(const SuperFunction& f, int axis);
// Left derivative along eta^alpha.
SuperFunction partial_odd(const SuperFunction& f, int alpha);

// D f = d_eta f + sigma eta d_x f on R^{1|1}.
SuperFunction apply_D(const SuperFunction& f, int orientation = 1);
// Q f = q (d_eta f - sigma eta d_x f) on R^{1|1}, q an odd parameter.
SuperFunction apply_Q(const SuperFunction& f, const GrassmannNumber& q, int orientation = 1);

struct SuperVectorField {
    std::vector<SuperFunction> even;  // coefficient of d/dx^a
    std::vector<SuperFunction> odd;   // coefficient of d/deta^alpha
};

SuperFunction apply(const SuperVectorField& v, const SuperFunction& f);

// The field D on R^{1|1} written as a vector field.
SuperVectorField vector_field_D(const Grid& grid, int parameters, int orientation = 1);

// x = g0(x~) + eta~ g1(x~), eta = gamma0(x~) + eta~ gamma1(x~) on R^{1|1}.
// The body map is stored through its periodic displacement g0 - x~.
struct CoordinateChange11 {
    GridField displacement;  // even
    GridField g1;            // odd
    GridField gamma0;        // odd
    GridField gamma1;        // even, invertible body

    static CoordinateChange11 identity(const Grid& grid, int parameters);
};

SuperFunction pullback_coordinate_change(const SuperFunction& f, const CoordinateChange11& change);

struct Embedding {
    std::vector<GridField> xi;  // images of eta^alpha, odd fields over Lambda_N

    static Embedding trivial(const Grid& grid, int odd_dim, int parameters);
};

// i^# f = sum_gamma xi^gamma f_gamma.
GridField restrict(const SuperFunction& f, const Embedding& i);

// Rewrites f in coordinates adapted to i (eta = eta~ + xi), so that the
// restriction along i becomes the eta~-free coefficient.
SuperFunction adapt_to_embedding(const SuperFunction& f, const Embedding& i);

}  // namespace supersigma
