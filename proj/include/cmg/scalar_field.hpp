#pragma once

#include <array>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>

#include "cmg/expr.hpp"

namespace cmg::jetcalc {

// A smooth scalar function on the chart R^3, held as an immutable expression
// DAG. Differentiation is symbolic and exact to any order; evaluation is the
// only place floating point enters. Fields may carry a declared period per
// coordinate; the declaration is metadata that checks verify by evaluation.
class ScalarField {
 public:
  ScalarField() : expr_(make_constant(0.0)) {}
  explicit ScalarField(double c) : expr_(make_constant(c)) {}
  explicit ScalarField(ExprPtr e) : expr_(std::move(e)) {}

  static ScalarField constant(double c) { return ScalarField(c); }
  static ScalarField coordinate(int axis) { return ScalarField(make_coord(axis)); }

  const ExprPtr& expr() const { return expr_; }

  double eval(EvalContext& ctx) const { return expr_->eval(ctx); }

  double operator()(const Vec3& p) const {
    EvalContext ctx(p);
    return expr_->eval(ctx);
  }
  double operator()(double x, double y, double z) const { return (*this)(Vec3{x, y, z}); }

  bool depends_on(int axis) const { return expr_->depends_on(axis); }

  std::optional<double> as_constant_value() const { return as_constant(expr_); }
  bool is_zero() const {
    auto c = as_constant_value();
    return c && *c == 0.0;
  }

  ScalarField derivative(int axis, DiffCache& cache) const {
    ScalarField d(expr_->derivative(axis, cache));
    d.periods_ = periods_;  // a periodic field has periodic derivatives
    return d;
  }
  ScalarField derivative(int axis) const {
    DiffCache cache;
    return derivative(axis, cache);
  }

  // declared periodicity metadata
  std::optional<double> declared_period(int axis) const { return periods_[axis]; }
  ScalarField with_period(int axis, double period) const {
    ScalarField f = *this;
    f.periods_[axis] = period;
    return f;
  }

  std::string to_string() const {
    std::string s;
    expr_->print(s);
    return s;
  }

  // Period propagation through arithmetic: keep a declared period on an axis
  // when every operand that depends on that axis declares the same one.
  static std::array<std::optional<double>, 3> combine_periods(const ScalarField& a,
                                                              const ScalarField& b) {
    std::array<std::optional<double>, 3> out{};
    for (int ax = 0; ax < 3; ++ax) {
      bool da = a.depends_on(ax), db = b.depends_on(ax);
      if (da && db) {
        if (a.periods_[ax] && b.periods_[ax] && *a.periods_[ax] == *b.periods_[ax])
          out[ax] = a.periods_[ax];
      } else if (da) {
        out[ax] = a.periods_[ax];
      } else if (db) {
        out[ax] = b.periods_[ax];
      }
    }
    return out;
  }

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    ScalarField r(make_add(a.expr_, b.expr_));
    r.periods_ = combine_periods(a, b);
    return r;
  }
  friend ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    ScalarField r(make_sub(a.expr_, b.expr_));
    r.periods_ = combine_periods(a, b);
    return r;
  }
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    ScalarField r(make_mul(a.expr_, b.expr_));
    r.periods_ = combine_periods(a, b);
    return r;
  }
  friend ScalarField operator/(const ScalarField& a, const ScalarField& b) {
    ScalarField r(make_div(a.expr_, b.expr_));
    r.periods_ = combine_periods(a, b);
    return r;
  }
  friend ScalarField operator-(const ScalarField& a) {
    ScalarField r(make_neg(a.expr_));
    r.periods_ = a.periods_;
    return r;
  }

  friend ScalarField operator+(const ScalarField& a, double c) { return a + ScalarField(c); }
  friend ScalarField operator+(double c, const ScalarField& a) { return ScalarField(c) + a; }
  friend ScalarField operator-(const ScalarField& a, double c) { return a - ScalarField(c); }
  friend ScalarField operator-(double c, const ScalarField& a) { return ScalarField(c) - a; }
  friend ScalarField operator*(const ScalarField& a, double c) { return a * ScalarField(c); }
  friend ScalarField operator*(double c, const ScalarField& a) { return ScalarField(c) * a; }
  friend ScalarField operator/(const ScalarField& a, double c) { return a / ScalarField(c); }
  friend ScalarField operator/(double c, const ScalarField& a) { return ScalarField(c) / a; }

 private:
  ExprPtr expr_;
  std::array<std::optional<double>, 3> periods_{};
};

inline ScalarField sin(const ScalarField& a) {
  ScalarField r(make_sin(a.expr()));
  for (int ax = 0; ax < 3; ++ax)
    if (a.declared_period(ax)) r = r.with_period(ax, *a.declared_period(ax));
  return r;
}
inline ScalarField cos(const ScalarField& a) {
  ScalarField r(make_cos(a.expr()));
  for (int ax = 0; ax < 3; ++ax)
    if (a.declared_period(ax)) r = r.with_period(ax, *a.declared_period(ax));
  return r;
}
inline ScalarField exp(const ScalarField& a) {
  ScalarField r(make_exp(a.expr()));
  for (int ax = 0; ax < 3; ++ax)
    if (a.declared_period(ax)) r = r.with_period(ax, *a.declared_period(ax));
  return r;
}
inline ScalarField pow_int(const ScalarField& a, long long n) {
  ScalarField r(make_pow_int(a.expr(), n));
  for (int ax = 0; ax < 3; ++ax)
    if (a.declared_period(ax)) r = r.with_period(ax, *a.declared_period(ax));
  return r;
}

inline ScalarField differentiate(const ScalarField& f, int axis) { return f.derivative(axis); }

// ---------------------------------------------------------------------------
// jets
// ---------------------------------------------------------------------------

struct MultiIndex {
  int nx, ny, nz;
  int order() const { return nx + ny + nz; }
};

// graded-lexicographic listing of all multi-indices up to order 3
inline constexpr std::array<MultiIndex, 20> kJetIndices = {{
    {0, 0, 0},
    {1, 0, 0},
    {0, 1, 0},
    {0, 0, 1},
    {2, 0, 0},
    {1, 1, 0},
    {1, 0, 1},
    {0, 2, 0},
    {0, 1, 1},
    {0, 0, 2},
    {3, 0, 0},
    {2, 1, 0},
    {2, 0, 1},
    {1, 2, 0},
    {1, 1, 1},
    {1, 0, 2},
    {0, 3, 0},
    {0, 2, 1},
    {0, 1, 2},
    {0, 0, 3},
}};

inline int jet_slot(int nx, int ny, int nz) {
  for (int s = 0; s < static_cast<int>(kJetIndices.size()); ++s) {
    const auto& m = kJetIndices[s];
    if (m.nx == nx && m.ny == ny && m.nz == nz) return s;
  }
  throw DomainError("jet_slot: multi-index outside supported order");
}

inline int jet_size(int order) {
  switch (order) {
    case 0: return 1;
    case 1: return 4;
    case 2: return 10;
    case 3: return 20;
    default: throw DomainError("jet order must be in 0..3");
  }
}

// Value plus all partial derivatives up to the requested order, stored by
// multi-index counts so permutation symmetry is structural.
struct Jet {
  int order = 0;
  std::array<double, 20> partials{};

  double value() const { return partials[0]; }

  // counts per coordinate, e.g. partial(1,0,2) = d^3 f / dx dz^2
  double partial(int nx, int ny, int nz) const {
    if (nx + ny + nz > order) throw DomainError("jet partial beyond stored order");
    return partials[jet_slot(nx, ny, nz)];
  }

  double d(int axis) const {
    return partial(axis == 0 ? 1 : 0, axis == 1 ? 1 : 0, axis == 2 ? 1 : 0);
  }
};

// Evaluates value and partials by walking differentiate-chains; a shared
// DiffCache keeps the 20 chains one DAG, and a shared EvalContext makes the
// whole jet cost one pass over it.
inline Jet eval_jet(const ScalarField& f, const Vec3& point, int order) {
  int n = jet_size(order);
  Jet jet;
  jet.order = order;
  DiffCache cache;
  std::array<ExprPtr, 20> chain;
  chain[0] = f.expr();
  for (int s = 1; s < n; ++s) {
    const auto& m = kJetIndices[s];
    int axis;
    MultiIndex parent = m;
    if (m.nx > 0) {
      axis = 0;
      parent.nx -= 1;
    } else if (m.ny > 0) {
      axis = 1;
      parent.ny -= 1;
    } else {
      axis = 2;
      parent.nz -= 1;
    }
    chain[s] = chain[jet_slot(parent.nx, parent.ny, parent.nz)]->derivative(axis, cache);
  }
  EvalContext ctx(point);
  for (int s = 0; s < n; ++s) jet.partials[s] = chain[s]->eval(ctx);
  return jet;
}

// Central difference quotient; the independent cross-check for every
// symbolic derivative in the engine. Never used as a derivative source.
inline double finite_difference_oracle(const ScalarField& f, const Vec3& point, int axis,
                                       double step) {
  if (!(step > 0)) throw DomainError("finite_difference_oracle: step must be positive");
  Vec3 hi = point, lo = point;
  hi[axis] += step;
  lo[axis] -= step;
  return (f(hi) - f(lo)) / (2.0 * step);
}

}  // namespace cmg::jetcalc

namespace cmg {
using jetcalc::DiffCache;
using jetcalc::EvalContext;
using jetcalc::eval_jet;
using jetcalc::finite_difference_oracle;
using jetcalc::Jet;
using jetcalc::ScalarField;
}  // namespace cmg
