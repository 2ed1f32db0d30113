#pragma once

#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sttcbf {

/// Atomic proposition h(x) >= 0 over a state in R^n.
struct Predicate {
  enum class Kind { AffineHalfspace, BoxInfNorm, BallNorm2 };

  Kind kind = Kind::BallNorm2;
  std::vector<double> w;          // affine: h(x) = w'x + b
  double b = 0.0;
  std::vector<double> center;     // box / ball
  std::vector<double> halfwidth;  // box: per-axis half extents
  double radius = 0.0;            // ball

  static Predicate affine(std::vector<double> w, double b);
  /// Box with equal half extent on every axis: h(x) = hw - |x - c|_inf.
  static Predicate box(std::vector<double> center, double halfwidth);
  /// Axis-aligned box with per-axis half extents: h(x) = min_i (hw_i - |x_i - c_i|).
  static Predicate box(std::vector<double> center, std::vector<double> halfwidth);
  static Predicate box_bounds(std::span<const double> lo, std::span<const double> hi);
  static Predicate ball(std::vector<double> center, double radius);

  std::size_t dimension() const;
  double operator()(std::span<const double> x) const;

  /// Lipschitz constant of h with respect to the Euclidean norm. Box
  /// predicates are 1-Lipschitz in the infinity norm and are reported with
  /// the conservative sqrt(n) conversion.
  double lipschitz() const;
  /// Same, with respect to the infinity norm on x.
  double lipschitz_inf() const;

  bool operator==(const Predicate&) const = default;
};

enum class Op { True, Pred, Not, And, Or, Until, Eventually, Always };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Immutable STL syntax tree node. Children are shared, so subtrees may be
/// reused freely across formulas.
struct Formula {
  Op op = Op::True;
  double lo = 0.0;  // temporal interval [lo, hi]
  double hi = 0.0;
  std::string name;                      // predicate identifier
  std::shared_ptr<const Predicate> pred;  // null until bound
  FormulaPtr lhs;
  FormulaPtr rhs;
};

struct IntervalError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SemanticError : std::invalid_argument {
  SemanticError(const std::string& what, std::vector<std::string> names)
      : std::invalid_argument(what), names(std::move(names)) {}
  std::vector<std::string> names;
};

FormulaPtr make_true();
FormulaPtr make_pred(std::string name);
FormulaPtr make_pred(std::string name, Predicate p);
FormulaPtr make_not(FormulaPtr f);
FormulaPtr make_and(FormulaPtr a, FormulaPtr b);
FormulaPtr make_or(FormulaPtr a, FormulaPtr b);
FormulaPtr make_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr make_until(double lo, double hi, FormulaPtr a, FormulaPtr b);
FormulaPtr make_eventually(double lo, double hi, FormulaPtr f);
FormulaPtr make_always(double lo, double hi, FormulaPtr f);

/// Which operand of Until is checked pointwise at the witness time.
///
/// Paper: max_{t1} min(rho1(t1), min_{t2 in [t+a,t1]} rho2(t2)).
/// Standard: operands swapped, so the right operand is the pointwise one.
enum class UntilConvention { Paper, Standard };

/// Rewrite Or/Eventually/Always (recursively) in terms of Not/And/Until.
/// Eventually becomes (phi U true) under the paper convention and
/// (true U phi) under the standard one.
FormulaPtr expand_derived(const FormulaPtr& f, UntilConvention conv);

using PredicateTable = std::map<std::string, Predicate>;

/// Attach predicates from the table to every identifier. Throws
/// SemanticError listing all undeclared names.
FormulaPtr bind_predicates(const FormulaPtr& f, const PredicateTable& table);

/// Distinct identifiers in first-occurrence order.
std::vector<std::string> predicate_names(const FormulaPtr& f);

double horizon(const FormulaPtr& f);

enum class Norm { Two, Inf };

/// L such that |rho(x) - rho(y)| <= L * max_t ||x(t) - y(t)||.
double robustness_lipschitz(const FormulaPtr& f, Norm norm = Norm::Two);

std::string to_string(const FormulaPtr& f);

}  // namespace sttcbf
