#include "dilatox/numkit/quadrature.hpp"

#include <string>

namespace dilatox::numkit {

double quad_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                     std::size_t max_intervals) {
    const auto result = integrate(f, a, b, tol, max_intervals);
    if (!result.converged) {
        throw QuadratureError("quad_adaptive: subdivision limit reached with error estimate " +
                                  std::to_string(result.error) + " > tol " + std::to_string(tol),
                              result.value, result.error);
    }
    return result.value;
}

}  // namespace dilatox::numkit
