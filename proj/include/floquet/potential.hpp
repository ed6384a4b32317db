#pragma once

// Complex periodic potentials V(x) with period pi, written in a small
// expression language:
//
//   cos(2*x) + 0.5i*sin(2*x)      exp(2*i*x)      -x^2      2cos(x)
//
// `i` is the imaginary unit, `x` the coordinate and `pi` the constant.
// Precedence, tightest first: unary minus, `^` (right associative),
// `*` `/` and juxtaposition, then `+` `-`.

#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace floquet {

using complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
/// Every potential handled by the library has this period.
inline constexpr double kPeriod = kPi;

namespace ast {

enum class Kind { Number, Variable, Add, Sub, Mul, Div, Pow, Neg, Cos, Sin, Exp };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Kind kind;
  complex value{};  // Number only
  NodePtr lhs;      // unary operand or left operand
  NodePtr rhs;      // right operand for binary nodes
};

NodePtr number(complex v);
NodePtr variable();
NodePtr unary(Kind k, NodePtr operand);
NodePtr binary(Kind k, NodePtr lhs, NodePtr rhs);

}  // namespace ast

/// Immutable parsed potential. Cheap to copy; evaluation is thread safe.
class PotentialExpr {
 public:
  PotentialExpr(ast::NodePtr root, std::string source);

  complex operator()(double x) const { return evaluate(x); }
  complex evaluate(double x) const;
  complex evaluate(complex x) const;

  const ast::Node& root() const { return *root_; }
  ast::NodePtr root_ptr() const { return root_; }
  const std::string& source_text() const { return source_; }
  double period() const { return kPeriod; }

 private:
  ast::NodePtr root_;
  std::string source_;
};

PotentialExpr parse_potential(std::string_view text);

complex eval_potential(const PotentialExpr& p, double x);

/// Fully parenthesised rendering that parses back to an equivalent tree.
std::string to_string(const PotentialExpr& p);

struct ValidationReport {
  double periodicity_residual = 0.0;  ///< max |V(x+pi) - V(x)|
  double pt_residual = 0.0;           ///< max |conj(V(-x)) - V(x)|
  bool periodic = false;
  bool pt_symmetric = false;
  bool passed() const { return periodic && pt_symmetric; }
};

inline constexpr int kDefaultValidationGrid = 256;
inline constexpr double kDefaultValidationTol = 1e-9;

/// Grid check on x_j = j*pi/n_grid, j = 0..n_grid-1. Never throws on a
/// failing potential; n_grid < 64 is a precondition error.
ValidationReport validate_potential(const PotentialExpr& p,
                                    int n_grid = kDefaultValidationGrid,
                                    double tol = kDefaultValidationTol);

/// x -> V(x + pi/2).
PotentialExpr shift_half_period(const PotentialExpr& p);

/// V(x) ~ sum_{n=-M}^{M} c_n exp(2inx). Coefficients at round-off level
/// relative to max|V| are stored as exact zeros.
struct FourierCoeffs {
  int truncation = 0;
  std::vector<complex> coeffs;  // index n + truncation
  bool truncation_warning = false;

  complex operator[](int n) const {
    if (n < -truncation || n > truncation) return {};
    return coeffs[static_cast<std::size_t>(n + truncation)];
  }
  complex reconstruct(double x) const;
};

inline constexpr double kFourierTruncationTol = 1e-12;

FourierCoeffs fourier_coefficients(const PotentialExpr& p, int truncation, int n_samples);

}  // namespace floquet
