#pragma once

#include "supersigma/superdomain.hpp"

namespace supersigma {

// Even torus [0,P_1) x ... x [0,P_m) (taken from the grid) with n odd
// directions and an embedding of the underlying even manifold.
struct BerezinDomain {
    Grid grid;
    int odd_dim = 0;
    Embedding embedding;  // empty means xi = 0

    BerezinDomain(Grid g, int n) : grid(std::move(g)), odd_dim(n) {}
    BerezinDomain(Grid g, int n, Embedding i) : grid(std::move(g)), odd_dim(n), embedding(std::move(i)) {}
};

// Quadrature of the coefficient of eta^1...eta^n (increasing order, sign +1),
// computed in coordinates adapted to the domain's embedding.
GrassmannNumber berezin_integrate(const SuperFunction& f, const BerezinDomain& dom);

// Periodic trapezoid rule, coefficient-wise in Lambda_N.
GrassmannNumber quadrature(const GridField& g, const BerezinDomain& dom);

}  // namespace supersigma
