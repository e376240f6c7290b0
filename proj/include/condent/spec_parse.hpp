#pragma once
// Spec strings used on the command line.
//
//   distribution  name:key=value,...          gaussian:mu=0,var=1  gm2:var=2
//                 affine(scale=c,shift=m,<distribution>)
//   family        gamma:alpha=a | gaussian-base:var=v
//   vector input  prod(<d1>;<d2>[;<d3>]) | gauss(mean=[..],cov=[[..]])
//                 linear(L=[[..]],shift=[..],prod(..))
//   vector chan   vec:n=2,input=<vector input>,A=[[..]],Kw=[[..]]
//
// Matrices are row-major JSON arrays. Parsing is exact: unknown or repeated
// keys, missing required keys and trailing characters raise ParseError.
// Values that parse but violate a constructor precondition raise the
// constructor's ParameterError.

#include <string>
#include <string_view>
#include <vector>

#include "condent/distributions.hpp"
#include "condent/expofam.hpp"
#include "condent/vector_awgn.hpp"

namespace condent {

InputDistribution parse_distribution(std::string_view spec);
ExpoFamily parse_family(std::string_view spec);
VectorInput parse_vector_input(std::string_view spec);
VectorChannel parse_vector_channel(std::string_view spec);

double parse_number(std::string_view s);
// Comma-separated numbers, or lo:hi:count for an evenly spaced grid.
std::vector<double> parse_grid(std::string_view s);
Mat parse_matrix(std::string_view json);
Vec parse_vector(std::string_view json);

}  // namespace condent
