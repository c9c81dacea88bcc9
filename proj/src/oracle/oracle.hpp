#pragma once

#include "expr/expr.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>

namespace emalg::oracle {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- index enumeration ----------------------------------------------------------

struct EnumerationResult {
  bool equal = false;
  int assignments = 0;
  std::map<std::string, int> counterexample;  // first failing assignment of free indices
  Rational lhs_value{0}, rhs_value{0};
  std::string message;
};

/// Brute force over {1,2,3} for every free index, summing repeated ones.
/// Only Epsilon and Kronecker atoms are allowed.
EnumerationResult enumerate_identity(const Expr& lhs, const Expr& rhs);

// --- regularized deltas -------------------------------------------------------

enum class Family { Rectangle, Gaussian };

std::string to_string(Family f);

struct RegularizedDelta {
  Family family = Family::Gaussian;
  double a = 0.05;

  /// rectangle: 1/a on |u| <= a/2; gaussian: exp(-u^2/a^2)/(a sqrt(pi))
  [[nodiscard]] double operator()(double u) const;
  /// Pointwise derivative; zero almost everywhere for the rectangle.
  [[nodiscard]] double derivative(double u) const;
};

struct GridSpec {
  double extent = 8.0;
  int points = 4096;
  [[nodiscard]] double h() const { return extent / points; }
};

struct FlipResult {
  double max_error = 0;        // over all offsets
  double worst_offset = 0;     // x - y where max_error occurs
  double off_edge_error = 0;   // rectangle: max away from the jumps; gaussian: same as max_error
  double zero_offset_error = 0;
  double truncation = 0;  // max |central difference - pointwise derivative| of d/dx delta(x-y)
  double truncation_offset = 0;
};

/// |d/dy delta(y-x) + d/dx delta(x-y)| by central differences, y over the grid.
FlipResult check_delta_flip(const RegularizedDelta& d, const GridSpec& g);

struct TestFunction {
  std::function<double(double)> f;
  std::function<double(double)> df;
};

/// (1 - s^2)^4 for |s| < 1 with s = (x - c)/w.
TestFunction polynomial_bump(double center, double width);
TestFunction gaussian_bump(double center, double width);
TestFunction constant_function(double value);

struct IbpResult {
  double left = 0, middle = 0, right = 0;
  double err1 = 0, err2 = 0;  // |left - middle|, |left - right|
  double limit_error = 0;     // |middle - (-int g f')| against the sharp delta
};

/// One-dimensional members of
///   int int g(y) f(x) d/dx delta(x-y) = -int int g(y) f'(x) delta(x-y) = int int g'(y) f(x) delta(x-y)
/// with delta replaced by d.
IbpResult check_integration_by_parts(const TestFunction& f, const TestFunction& g, const RegularizedDelta& d,
                                     const GridSpec& grid);

struct OrderingResult {
  double axis_integral = 0;        // int delta_a delta_a' du
  double transverse = 0;           // int delta_a^2 du
  double transverse_expected = 0;  // closed form
  double transverse_error = 0;
};

/// The grid is internal: aligned to the edges for the rectangle, h = a/64 for
/// the gaussian.
OrderingResult check_ordering_residual(const RegularizedDelta& d);

// --- random c-number fields -----------------------------------------------------

struct FieldCheckOptions {
  GridSpec grid{16.0, 512};
  int modes = 4;  // plane waves per field component
};

/// Substitute random smooth commuting fields for E and B and compare both sides
/// by quadrature; max relative error over assignments of the free indices.
/// Sharp deltas are sifted. Throws OracleError for order-sensitive input.
double random_field_check(const Expr& lhs, const Expr& rhs, std::uint64_t seed, const FieldCheckOptions& opts = {});

}  // namespace emalg::oracle
