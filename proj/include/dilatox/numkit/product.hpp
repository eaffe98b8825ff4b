#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <type_traits>

#include "dilatox/error.hpp"

namespace dilatox::numkit {

/// Stop rule shared by every infinite product in the library.
struct ProductTruncation {
    double tol = 1e-14;           ///< stop once |term - 1| < tol
    std::size_t max_terms = 4096;

    ProductTruncation() = default;
    ProductTruncation(double tol_, std::size_t max_terms_) : tol(tol_), max_terms(max_terms_) {
        validate();
    }

    void validate() const {
        if (!(tol > 0.0) || !std::isfinite(tol)) {
            throw DomainError("ProductTruncation: tol must be positive, got " + std::to_string(tol));
        }
        if (max_terms < 1) throw DomainError("ProductTruncation: max_terms must be >= 1");
    }
};

template <class T>
struct ProductResult {
    T value{1};
    std::size_t terms_used = 0;  ///< factors multiplied, including the one that met the tolerance
    bool converged = false;      ///< false when max_terms was hit first
};

/// Multiplies term(0) * term(1) * ... until a factor satisfies |term(n) - 1| < tol.
///
/// The factor meeting the tolerance is included in the product. Indices below
/// `first_candidate` never stop the product: callers pass the index after which
/// |term - 1| is known to decrease monotonically (the argument has shrunk below
/// the first oscillation), so an accidental factor of exactly 1 at a large
/// argument cannot truncate early.
template <class Term>
auto truncated_product(Term&& term, const ProductTruncation& trunc, std::size_t first_candidate = 0)
    -> ProductResult<std::decay_t<decltype(term(std::size_t{0}))>> {
    using T = std::decay_t<decltype(term(std::size_t{0}))>;
    trunc.validate();
    ProductResult<T> out;
    T value{1};
    for (std::size_t gamma = 0; gamma < trunc.max_terms; ++gamma) {
        const T factor = term(gamma);
        value *= factor;
        if (gamma >= first_candidate && std::abs(factor - T{1}) < trunc.tol) {
            out.value = value;
            out.terms_used = gamma + 1;
            out.converged = true;
            return out;
        }
    }
    out.value = value;
    out.terms_used = trunc.max_terms;
    out.converged = false;
    return out;
}

/// Index from which kappa^gamma * scale <= threshold; used as `first_candidate`.
inline std::size_t shrink_index(double scale, double kappa, double threshold = 1.0) {
    scale = std::fabs(scale);
    if (!(scale > threshold)) return 0;
    return static_cast<std::size_t>(std::ceil(std::log(scale / threshold) / -std::log(kappa)));
}

}  // namespace dilatox::numkit
