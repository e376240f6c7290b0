#include "condent/special.hpp"

#include <cmath>
#include <string>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "condent/errors.hpp"

namespace condent {

double log_gamma(double x) {
    if (!(x > 0.0)) throw ParameterError("log_gamma requires x > 0, got " + std::to_string(x));
    return boost::math::lgamma(x);
}

double digamma(double x) {
    if (!(x > 0.0)) throw ParameterError("digamma requires x > 0, got " + std::to_string(x));
    return boost::math::digamma(x);
}

namespace {
double checked(const std::function<double(double)>& f, double x) {
    const double v = f(x);
    if (!std::isfinite(v)) throw EvaluationError("non-finite function value at " + std::to_string(x));
    return v;
}
}  // namespace

double central_diff(const std::function<double(double)>& f, double y, double h) {
    if (!(h > 0.0)) throw ParameterError("central_diff step must be positive");
    return (checked(f, y + h) - checked(f, y - h)) / (2.0 * h);
}

double richardson_first(const std::function<double(double)>& f, double y, double h) {
    const double d1 = central_diff(f, y, h);
    const double d2 = central_diff(f, y, 2.0 * h);
    return (4.0 * d1 - d2) / 3.0;
}

double richardson_second(const std::function<double(double)>& f, double y, double h) {
    if (!(h > 0.0)) throw ParameterError("second-difference step must be positive");
    const double f0 = checked(f, y);
    const double s1 = (checked(f, y + h) - 2.0 * f0 + checked(f, y - h)) / (h * h);
    const double s2 = (checked(f, y + 2.0 * h) - 2.0 * f0 + checked(f, y - 2.0 * h)) / (4.0 * h * h);
    return (4.0 * s1 - s2) / 3.0;
}

double entropy_power(double h) { return std::exp(2.0 * h - kLog2PiE); }

}  // namespace condent
