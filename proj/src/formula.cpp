#include "sttcbf/formula.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace sttcbf {

Predicate Predicate::affine(std::vector<double> w, double b) {
  Predicate p;
  p.kind = Kind::AffineHalfspace;
  p.w = std::move(w);
  p.b = b;
  return p;
}

Predicate Predicate::box(std::vector<double> center, double halfwidth) {
  std::vector<double> hw(center.size(), halfwidth);
  return box(std::move(center), std::move(hw));
}

Predicate Predicate::box(std::vector<double> center, std::vector<double> halfwidth) {
  if (center.size() != halfwidth.size() || center.empty())
    throw std::invalid_argument("box predicate: center/halfwidth size mismatch");
  for (double h : halfwidth)
    if (!(h > 0.0)) throw std::invalid_argument("box predicate: halfwidth must be positive");
  Predicate p;
  p.kind = Kind::BoxInfNorm;
  p.center = std::move(center);
  p.halfwidth = std::move(halfwidth);
  return p;
}

Predicate Predicate::box_bounds(std::span<const double> lo, std::span<const double> hi) {
  if (lo.size() != hi.size()) throw std::invalid_argument("box bounds: size mismatch");
  std::vector<double> c(lo.size()), hw(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    c[i] = 0.5 * (lo[i] + hi[i]);
    hw[i] = 0.5 * (hi[i] - lo[i]);
  }
  return box(std::move(c), std::move(hw));
}

Predicate Predicate::ball(std::vector<double> center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball predicate: radius must be positive");
  Predicate p;
  p.kind = Kind::BallNorm2;
  p.center = std::move(center);
  p.radius = radius;
  return p;
}

std::size_t Predicate::dimension() const {
  return kind == Kind::AffineHalfspace ? w.size() : center.size();
}

double Predicate::operator()(std::span<const double> x) const {
  switch (kind) {
    case Kind::AffineHalfspace: {
      double v = b;
      for (std::size_t i = 0; i < w.size(); ++i) v += w[i] * x[i];
      return v;
    }
    case Kind::BoxInfNorm: {
      double v = halfwidth[0] - std::abs(x[0] - center[0]);
      for (std::size_t i = 1; i < center.size(); ++i)
        v = std::min(v, halfwidth[i] - std::abs(x[i] - center[i]));
      return v;
    }
    case Kind::BallNorm2: {
      double s = 0.0;
      for (std::size_t i = 0; i < center.size(); ++i) {
        const double d = x[i] - center[i];
        s += d * d;
      }
      return radius - std::sqrt(s);
    }
  }
  return 0.0;
}

double Predicate::lipschitz() const {
  switch (kind) {
    case Kind::AffineHalfspace: {
      double s = 0.0;
      for (double v : w) s += v * v;
      return std::sqrt(s);
    }
    case Kind::BoxInfNorm:
      return std::sqrt(static_cast<double>(center.size()));
    case Kind::BallNorm2:
      return 1.0;
  }
  return 0.0;
}

double Predicate::lipschitz_inf() const {
  switch (kind) {
    case Kind::AffineHalfspace: {
      double s = 0.0;
      for (double v : w) s += std::abs(v);
      return s;
    }
    case Kind::BoxInfNorm:
      return 1.0;
    case Kind::BallNorm2:
      return std::sqrt(static_cast<double>(center.size()));
  }
  return 0.0;
}

namespace {

FormulaPtr node(Op op, FormulaPtr a = nullptr, FormulaPtr b = nullptr) {
  auto f = std::make_shared<Formula>();
  f->op = op;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

void check_interval(double lo, double hi) {
  if (!(lo >= 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
    std::ostringstream os;
    os << "invalid temporal interval [" << lo << "," << hi << "]: need 0 <= a <= b < inf";
    throw IntervalError(os.str());
  }
}

FormulaPtr temporal(Op op, double lo, double hi, FormulaPtr a, FormulaPtr b) {
  check_interval(lo, hi);
  auto f = std::make_shared<Formula>();
  f->op = op;
  f->lo = lo;
  f->hi = hi;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

}  // namespace

FormulaPtr make_true() { return node(Op::True); }

FormulaPtr make_pred(std::string name) {
  auto f = std::make_shared<Formula>();
  f->op = Op::Pred;
  f->name = std::move(name);
  return f;
}

FormulaPtr make_pred(std::string name, Predicate p) {
  auto f = std::make_shared<Formula>();
  f->op = Op::Pred;
  f->name = std::move(name);
  f->pred = std::make_shared<const Predicate>(std::move(p));
  return f;
}

FormulaPtr make_not(FormulaPtr f) { return node(Op::Not, std::move(f)); }
FormulaPtr make_and(FormulaPtr a, FormulaPtr b) { return node(Op::And, std::move(a), std::move(b)); }
FormulaPtr make_or(FormulaPtr a, FormulaPtr b) { return node(Op::Or, std::move(a), std::move(b)); }

FormulaPtr make_implies(FormulaPtr a, FormulaPtr b) {
  return make_or(make_not(std::move(a)), std::move(b));
}

FormulaPtr make_until(double lo, double hi, FormulaPtr a, FormulaPtr b) {
  return temporal(Op::Until, lo, hi, std::move(a), std::move(b));
}

FormulaPtr make_eventually(double lo, double hi, FormulaPtr f) {
  return temporal(Op::Eventually, lo, hi, std::move(f), nullptr);
}

FormulaPtr make_always(double lo, double hi, FormulaPtr f) {
  return temporal(Op::Always, lo, hi, std::move(f), nullptr);
}

FormulaPtr expand_derived(const FormulaPtr& f, UntilConvention conv) {
  switch (f->op) {
    case Op::True:
    case Op::Pred:
      return f;
    case Op::Not:
      return make_not(expand_derived(f->lhs, conv));
    case Op::And:
      return make_and(expand_derived(f->lhs, conv), expand_derived(f->rhs, conv));
    case Op::Or:
      return make_not(make_and(make_not(expand_derived(f->lhs, conv)),
                               make_not(expand_derived(f->rhs, conv))));
    case Op::Until:
      return make_until(f->lo, f->hi, expand_derived(f->lhs, conv), expand_derived(f->rhs, conv));
    case Op::Eventually: {
      auto c = expand_derived(f->lhs, conv);
      return conv == UntilConvention::Paper ? make_until(f->lo, f->hi, c, make_true())
                                            : make_until(f->lo, f->hi, make_true(), c);
    }
    case Op::Always: {
      auto neg = make_not(expand_derived(f->lhs, conv));
      auto ev = conv == UntilConvention::Paper ? make_until(f->lo, f->hi, neg, make_true())
                                               : make_until(f->lo, f->hi, make_true(), neg);
      return make_not(ev);
    }
  }
  return f;
}

namespace {

FormulaPtr bind_rec(const FormulaPtr& f, const PredicateTable& table,
                    std::vector<std::string>& missing) {
  if (f->op == Op::Pred) {
    auto it = table.find(f->name);
    if (it == table.end()) {
      if (std::find(missing.begin(), missing.end(), f->name) == missing.end())
        missing.push_back(f->name);
      return f;
    }
    return make_pred(f->name, it->second);
  }
  if (f->op == Op::True) return f;
  auto g = std::make_shared<Formula>(*f);
  if (f->lhs) g->lhs = bind_rec(f->lhs, table, missing);
  if (f->rhs) g->rhs = bind_rec(f->rhs, table, missing);
  return g;
}

void names_rec(const FormulaPtr& f, std::vector<std::string>& out) {
  if (!f) return;
  if (f->op == Op::Pred && std::find(out.begin(), out.end(), f->name) == out.end())
    out.push_back(f->name);
  names_rec(f->lhs, out);
  names_rec(f->rhs, out);
}

}  // namespace

FormulaPtr bind_predicates(const FormulaPtr& f, const PredicateTable& table) {
  std::vector<std::string> missing;
  auto bound = bind_rec(f, table, missing);
  if (!missing.empty()) {
    std::string msg = "undeclared predicate";
    msg += missing.size() > 1 ? "s: " : ": ";
    for (std::size_t i = 0; i < missing.size(); ++i) msg += (i ? ", " : "") + missing[i];
    throw SemanticError(msg, missing);
  }
  return bound;
}

std::vector<std::string> predicate_names(const FormulaPtr& f) {
  std::vector<std::string> out;
  names_rec(f, out);
  return out;
}

double horizon(const FormulaPtr& f) {
  switch (f->op) {
    case Op::True:
    case Op::Pred:
      return 0.0;
    case Op::Not:
      return horizon(f->lhs);
    case Op::And:
    case Op::Or:
      return std::max(horizon(f->lhs), horizon(f->rhs));
    case Op::Until:
      return f->hi + std::max(horizon(f->lhs), horizon(f->rhs));
    case Op::Eventually:
    case Op::Always:
      return f->hi + horizon(f->lhs);
  }
  return 0.0;
}

// min, max and negation are all 1-Lipschitz in their arguments, so the
// composition inherits the largest predicate constant.
double robustness_lipschitz(const FormulaPtr& f, Norm norm) {
  if (!f) return 0.0;
  if (f->op == Op::Pred) {
    if (!f->pred) throw SemanticError("unbound predicate: " + f->name, {f->name});
    return norm == Norm::Two ? f->pred->lipschitz() : f->pred->lipschitz_inf();
  }
  return std::max(robustness_lipschitz(f->lhs, norm), robustness_lipschitz(f->rhs, norm));
}

namespace {

std::string num(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void print(std::ostream& os, const FormulaPtr& f) {
  auto iv = [&](const Formula& g) { os << "[" << num(g.lo) << "," << num(g.hi) << "]"; };
  switch (f->op) {
    case Op::True: os << "true"; break;
    case Op::Pred: os << f->name; break;
    case Op::Not: os << "!"; print(os, f->lhs); break;
    case Op::And:
    case Op::Or:
      os << "(";
      print(os, f->lhs);
      os << (f->op == Op::And ? " & " : " | ");
      print(os, f->rhs);
      os << ")";
      break;
    case Op::Until:
      os << "(";
      print(os, f->lhs);
      os << " U";
      iv(*f);
      os << " ";
      print(os, f->rhs);
      os << ")";
      break;
    case Op::Eventually:
    case Op::Always:
      os << (f->op == Op::Eventually ? "F" : "G");
      iv(*f);
      os << " ";
      print(os, f->lhs);
      break;
  }
}

}  // namespace

std::string to_string(const FormulaPtr& f) {
  std::ostringstream os;
  print(os, f);
  return os.str();
}

}  // namespace sttcbf
