#pragma once

#include <functional>

#include "nlds/errors.hpp"

namespace nlds {

/// Brent's method on [a, b].  fa/fb are the (already computed) endpoint
/// values; throws NoSignChange unless fa*fb < 0.
double brent(const std::function<double(double)>& f, double a, double b,
             double fa, double fb, double xtol, int max_iter = 200);

inline double brent(const std::function<double(double)>& f, double a, double b,
                    double xtol, int max_iter = 200) {
    return brent(f, a, b, f(a), f(b), xtol, max_iter);
}

}  // namespace nlds
