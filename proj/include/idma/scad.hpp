#pragma once

#include "idma/errors.hpp"

namespace idma {

/// Default SCAD shape parameter.
inline constexpr double kScadShape = 3.7;

inline void check_scad_shape(double a) {
    if (!(a > 2.0)) throw InvalidScadShape("SCAD shape a must exceed 2");
}

/// SCAD penalty value at x >= 0:
///   lambda*x                              for x <= lambda
///   (2*a*lambda*x - x^2 - lambda^2)/(2(a-1))  for lambda < x <= a*lambda
///   lambda^2*(a+1)/2                      for x > a*lambda
inline double scad_value(double x, double lambda, double a) {
    check_scad_shape(a);
    if (x < 0.0) x = -x;
    if (x <= lambda) return lambda * x;
    if (x <= a * lambda)
        return (2.0 * a * lambda * x - x * x - lambda * lambda) / (2.0 * (a - 1.0));
    return lambda * lambda * (a + 1.0) / 2.0;
}

/// Derivative of the SCAD penalty on [0, inf): lambda, then linear decay, then 0.
inline double scad_derivative(double x, double lambda, double a) {
    check_scad_shape(a);
    if (x < 0.0) x = -x;
    if (x <= lambda) return lambda;
    if (x <= a * lambda) return (a * lambda - x) / (a - 1.0);
    return 0.0;
}

}  // namespace idma
