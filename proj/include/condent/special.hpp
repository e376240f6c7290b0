#pragma once

#include <functional>

namespace condent {

// log Gamma(x) and psi(x) = d/dx log Gamma(x), for x > 0.
double log_gamma(double x);
double digamma(double x);

// (f(y+h) - f(y-h)) / (2h). Throws EvaluationError on non-finite samples.
double central_diff(const std::function<double(double)>& f, double y, double h);

// First derivative, Richardson-combined from steps h and 2h (error O(h^4)).
double richardson_first(const std::function<double(double)>& f, double y, double h);

// Second derivative (f(y+h) - 2f(y) + f(y-h))/h^2, Richardson-combined from h and 2h.
double richardson_second(const std::function<double(double)>& f, double y, double h);

inline constexpr double kLog2PiE = 2.837877066409345483560659472811;  // log(2*pi*e)

// Entropy power N = exp(2h)/(2 pi e).
double entropy_power(double h);

}  // namespace condent
