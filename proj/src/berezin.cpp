#include "supersigma/berezin.hpp"

#include "supersigma/errors.hpp"

namespace supersigma {

GrassmannNumber berezin_integrate(const SuperFunction& f, const BerezinDomain& dom) {
    if (!(f.grid() == dom.grid)) throw ShapeError("superfunction grid does not match the integration domain");
    if (f.odd_dim() != dom.odd_dim) throw ShapeError("odd dimension does not match the integration domain");
    const Mask top = (Mask{1} << dom.odd_dim) - 1;
    if (dom.embedding.xi.empty()) return integrate(f.coefficient(top));
    return integrate(adapt_to_embedding(f, dom.embedding).coefficient(top));
}

GrassmannNumber quadrature(const GridField& g, const BerezinDomain& dom) {
    if (!(g.grid() == dom.grid)) throw ShapeError("field grid does not match the integration domain");
    return integrate(g);
}

}  // namespace supersigma
