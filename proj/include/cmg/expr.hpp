#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>

#include "cmg/errors.hpp"
#include "cmg/linalg.hpp"

namespace cmg::jetcalc {

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Every derivative in the engine is symbolic; evaluation happens only at
// the end, through a per-point context. The context memoizes node values so
// a heavily shared DAG costs one visit per node, and caches metric-inverse
// blocks so each 3x3 solve runs once per point.
inline constexpr double kDivisionGuard = 1e-13;

struct EvalContext {
  Vec3 point{};
  std::unordered_map<const Expr*, double> memo;
  std::unordered_map<const void*, Mat3> inverse_cache;

  EvalContext() = default;
  explicit EvalContext(const Vec3& p) : point(p) { memo.reserve(256); }
};

// Memo for symbolic differentiation: one slot per (node, axis). Sharing a
// cache across a whole tensor construction keeps the result a compact DAG
// instead of an exponentially re-derived tree.
struct DiffCache {
  std::unordered_map<const Expr*, ExprPtr> by_axis[3];
};

class Expr {
 public:
  virtual ~Expr() = default;

  double eval(EvalContext& ctx) const {
    auto it = ctx.memo.find(this);
    if (it != ctx.memo.end()) return it->second;
    double v = eval_impl(ctx);
    ctx.memo.emplace(this, v);
    return v;
  }

  ExprPtr derivative(int axis, DiffCache& cache) const {
    auto& memo = cache.by_axis[axis];
    auto it = memo.find(this);
    if (it != memo.end()) return it->second;
    ExprPtr d = derivative_impl(axis, cache);
    memo.emplace(this, d);
    return d;
  }

  bool depends_on(int axis) const { return (deps_ >> axis) & 1u; }
  unsigned deps() const { return deps_; }

  virtual void print(std::string& out) const = 0;

 protected:
  virtual double eval_impl(EvalContext&) const = 0;
  virtual ExprPtr derivative_impl(int axis, DiffCache&) const = 0;
  unsigned deps_ = 0;
};

// ---------------------------------------------------------------------------
// smart constructors (declared up front; nodes below use them for folding)
// ---------------------------------------------------------------------------

ExprPtr make_constant(double v);
ExprPtr make_coord(int axis);
ExprPtr make_add(ExprPtr a, ExprPtr b);
ExprPtr make_sub(ExprPtr a, ExprPtr b);
ExprPtr make_mul(ExprPtr a, ExprPtr b);
ExprPtr make_div(ExprPtr a, ExprPtr b);
ExprPtr make_neg(ExprPtr a);
ExprPtr make_pow_int(ExprPtr base, long long n);
ExprPtr make_sin(ExprPtr a);
ExprPtr make_cos(ExprPtr a);
ExprPtr make_exp(ExprPtr a);

inline std::optional<double> as_constant(const ExprPtr& e);

// ---------------------------------------------------------------------------
// nodes
// ---------------------------------------------------------------------------

class ConstantExpr final : public Expr {
 public:
  explicit ConstantExpr(double v) : value_(v) {}
  double value() const { return value_; }
  void print(std::string& out) const override {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", value_);
    out += buf;
  }

 protected:
  double eval_impl(EvalContext&) const override { return value_; }
  ExprPtr derivative_impl(int, DiffCache&) const override { return make_constant(0.0); }

 private:
  double value_;
};

class CoordExpr final : public Expr {
 public:
  explicit CoordExpr(int axis) : axis_(axis) { deps_ = 1u << axis; }
  int axis() const { return axis_; }
  void print(std::string& out) const override { out += "xyz"[axis_]; }

 protected:
  double eval_impl(EvalContext& ctx) const override { return ctx.point[axis_]; }
  ExprPtr derivative_impl(int axis, DiffCache&) const override {
    return make_constant(axis == axis_ ? 1.0 : 0.0);
  }

 private:
  int axis_;
};

class BinaryExpr : public Expr {
 public:
  BinaryExpr(ExprPtr a, ExprPtr b) : a_(std::move(a)), b_(std::move(b)) {
    deps_ = a_->deps() | b_->deps();
  }

 protected:
  ExprPtr a_, b_;
};

class AddExpr final : public BinaryExpr {
 public:
  using BinaryExpr::BinaryExpr;
  void print(std::string& out) const override {
    out += '(';
    a_->print(out);
    out += " + ";
    b_->print(out);
    out += ')';
  }

 protected:
  double eval_impl(EvalContext& ctx) const override { return a_->eval(ctx) + b_->eval(ctx); }
  ExprPtr derivative_impl(int axis, DiffCache& c) const override {
    return make_add(a_->derivative(axis, c), b_->derivative(axis, c));
  }
};

class SubExpr final : public BinaryExpr {
 public:
  using BinaryExpr::BinaryExpr;
  void print(std::string& out) const override {
    out += '(';
    a_->print(out);
    out += " - ";
    b_->print(out);
    out += ')';
  }

 protected:
  double eval_impl(EvalContext& ctx) const override { return a_->eval(ctx) - b_->eval(ctx); }
  ExprPtr derivative_impl(int axis, DiffCache& c) const override {
    return make_sub(a_->derivative(axis, c), b_->derivative(axis, c));
  }
};

class MulExpr final : public BinaryExpr {
 public:
  using BinaryExpr::BinaryExpr;
  void print(std::string& out) const override {
    out += '(';
    a_->print(out);
    out += " * ";
    b_->print(out);
    out += ')';
  }

 protected:
  double eval_impl(EvalContext& ctx) const override { return a_->eval(ctx) * b_->eval(ctx); }
  ExprPtr derivative_impl(int axis, DiffCache& c) const override {
    return make_add(make_mul(a_->derivative(axis, c), b_),
                    make_mul(a_, b_->derivative(axis, c)));
  }
};

class DivExpr final : public BinaryExpr {
 public:
  using BinaryExpr::BinaryExpr;
  void print(std::string& out) const override {
    out += '(';
    a_->print(out);
    out += " / ";
    b_->print(out);
    out += ')';
  }

 protected:
  double eval_impl(EvalContext& ctx) const override {
    double den = b_->eval(ctx);
    if (std::abs(den) < kDivisionGuard)
      throw DomainError("division guard: |denominator| < 1e-13");
    return a_->eval(ctx) / den;
  }
  ExprPtr derivative_impl(int axis, DiffCache& c) const override {
    // (u/v)' = (u'v - uv') / v^2
    return make_div(make_sub(make_mul(a_->derivative(axis, c), b_),
                             make_mul(a_, b_->derivative(axis, c))),
                    make_mul(b_, b_));
  }
};

class NegExpr final : public Expr {
 public:
  explicit NegExpr(ExprPtr a) : a_(std::move(a)) { deps_ = a_->deps(); }
  void print(std::string& out) const override {
    out += "(-";
    a_->print(out);
    out += ')';
  }

 protected:
  double eval_impl(EvalContext& ctx) const override { return -a_->eval(ctx); }
  ExprPtr derivative_impl(int axis, DiffCache& c) const override {
    return make_neg(a_->derivative(axis, c));
  }

 private:
  ExprPtr a_;
};

class PowIntExpr final : public Expr {
 public:
  PowIntExpr(ExprPtr base, long long n) : base_(std::move(base)), n_(n) {
    deps_ = base_->deps();
  }
  void print(std::string& out) const override {
    out += '(';
    base_->print(out);
    out += '^';
    out += std::to_string(n_);
    out += ')';
  }

  static double ipow(double x, long long n) {
    // exponentiation by squaring; deterministic across platforms
    bool inv = n < 0;
    unsigned long long k = inv ? static_cast<unsigned long long>(-n)
                               : static_cast<unsigned long long>(n);
    double r = 1.0, b = x;
    while (k) {
      if (k & 1ull) r *= b;
      b *= b;
      k >>= 1;
    }
    return inv ? 1.0 / r : r;
  }

 protected:
  double eval_impl(EvalContext& ctx) const override {
    double b = base_->eval(ctx);
    if (n_ < 0 && std::abs(b) < kDivisionGuard)
      throw DomainError("division guard: negative power of |base| < 1e-13");
    return ipow(b, n_);
  }
  ExprPtr derivative_impl(int axis, DiffCache& c) const override {
    // (u^n)' = n u^(n-1) u'
    return make_mul(make_constant(static_cast<double>(n_)),
                    make_mul(make_pow_int(base_, n_ - 1), base_->derivative(axis, c)));
  }

 private:
  ExprPtr base_;
  long long n_;
};

class SinExpr final : public Expr {
 public:
  explicit SinExpr(ExprPtr a) : a_(std::move(a)) { deps_ = a_->deps(); }
  void print(std::string& out) const override {
    out += "sin(";
    a_->print(out);
    out += ')';
  }

 protected:
  double eval_impl(EvalContext& ctx) const override { return std::sin(a_->eval(ctx)); }
  ExprPtr derivative_impl(int axis, DiffCache& c) const override {
    return make_mul(make_cos(a_), a_->derivative(axis, c));
  }

 private:
  ExprPtr a_;
};

class CosExpr final : public Expr {
 public:
  explicit CosExpr(ExprPtr a) : a_(std::move(a)) { deps_ = a_->deps(); }
  void print(std::string& out) const override {
    out += "cos(";
    a_->print(out);
    out += ')';
  }

 protected:
  double eval_impl(EvalContext& ctx) const override { return std::cos(a_->eval(ctx)); }
  ExprPtr derivative_impl(int axis, DiffCache& c) const override {
    return make_neg(make_mul(make_sin(a_), a_->derivative(axis, c)));
  }

 private:
  ExprPtr a_;
};

class ExpExpr final : public Expr {
 public:
  explicit ExpExpr(ExprPtr a) : a_(std::move(a)) { deps_ = a_->deps(); }
  void print(std::string& out) const override {
    out += "exp(";
    a_->print(out);
    out += ')';
  }

 protected:
  double eval_impl(EvalContext& ctx) const override { return std::exp(a_->eval(ctx)); }
  ExprPtr derivative_impl(int axis, DiffCache& c) const override {
    return make_mul(make_exp(a_), a_->derivative(axis, c));
  }

 private:
  ExprPtr a_;
};

// Symmetric 3x3 block of metric component expressions. Inverse entries refer
// to a shared block so one numeric solve per point serves all nine entries.
struct MetricBlock {
  std::array<ExprPtr, 9> g;
};

ExprPtr make_metric_inverse(std::shared_ptr<const MetricBlock> block, int i, int j);

// Entry (i,j) of the metric inverse. Evaluation solves the 3x3 system at the
// point (guarded determinant); differentiation applies the exact rule
// d(g^-1) = -g^-1 (dg) g^-1, so derivative chains stay symbolic while the
// solve itself never gets expanded into adjugate expressions.
class MetricInverseExpr final : public Expr {
 public:
  MetricInverseExpr(std::shared_ptr<const MetricBlock> block, int i, int j)
      : block_(std::move(block)), i_(i), j_(j) {
    for (const auto& e : block_->g) deps_ |= e->deps();
  }

  void print(std::string& out) const override {
    out += "ginv[";
    out += std::to_string(i_);
    out += ']';
    out += '[';
    out += std::to_string(j_);
    out += ']';
  }

 protected:
  double eval_impl(EvalContext& ctx) const override {
    auto it = ctx.inverse_cache.find(block_.get());
    if (it == ctx.inverse_cache.end()) {
      Mat3 g;
      for (int k = 0; k < 9; ++k) g[k] = block_->g[k]->eval(ctx);
      it = ctx.inverse_cache.emplace(block_.get(), invert3(g)).first;
    }
    return it->second[i_ * 3 + j_];
  }

  ExprPtr derivative_impl(int axis, DiffCache& c) const override {
    ExprPtr sum = make_constant(0.0);
    for (int p = 0; p < 3; ++p) {
      for (int q = 0; q < 3; ++q) {
        ExprPtr dg = block_->g[p * 3 + q]->derivative(axis, c);
        ExprPtr term = make_mul(make_metric_inverse(block_, i_, p),
                                make_mul(dg, make_metric_inverse(block_, q, j_)));
        sum = make_add(sum, term);
      }
    }
    return make_neg(sum);
  }

 private:
  std::shared_ptr<const MetricBlock> block_;
  int i_, j_;
};

// ---------------------------------------------------------------------------
// smart constructor definitions (light constant folding; a folded tree must
// evaluate identically to the unfolded one)
// ---------------------------------------------------------------------------

inline std::optional<double> as_constant(const ExprPtr& e) {
  if (auto* c = dynamic_cast<const ConstantExpr*>(e.get())) return c->value();
  return std::nullopt;
}

inline ExprPtr make_constant(double v) { return std::make_shared<ConstantExpr>(v); }

inline ExprPtr make_coord(int axis) { return std::make_shared<CoordExpr>(axis); }

inline ExprPtr make_add(ExprPtr a, ExprPtr b) {
  auto ca = as_constant(a), cb = as_constant(b);
  if (ca && cb) return make_constant(*ca + *cb);
  if (ca && *ca == 0.0) return b;
  if (cb && *cb == 0.0) return a;
  return std::make_shared<AddExpr>(std::move(a), std::move(b));
}

inline ExprPtr make_sub(ExprPtr a, ExprPtr b) {
  auto ca = as_constant(a), cb = as_constant(b);
  if (ca && cb) return make_constant(*ca - *cb);
  if (cb && *cb == 0.0) return a;
  if (ca && *ca == 0.0) return make_neg(std::move(b));
  return std::make_shared<SubExpr>(std::move(a), std::move(b));
}

inline ExprPtr make_mul(ExprPtr a, ExprPtr b) {
  auto ca = as_constant(a), cb = as_constant(b);
  if (ca && cb) return make_constant(*ca * *cb);
  if (ca) {
    if (*ca == 0.0) return make_constant(0.0);
    if (*ca == 1.0) return b;
    if (*ca == -1.0) return make_neg(std::move(b));
  }
  if (cb) {
    if (*cb == 0.0) return make_constant(0.0);
    if (*cb == 1.0) return a;
    if (*cb == -1.0) return make_neg(std::move(a));
  }
  return std::make_shared<MulExpr>(std::move(a), std::move(b));
}

inline ExprPtr make_div(ExprPtr a, ExprPtr b) {
  auto ca = as_constant(a), cb = as_constant(b);
  if (cb && std::abs(*cb) >= kDivisionGuard) {
    if (ca) return make_constant(*ca / *cb);
    if (*cb == 1.0) return a;
    if (*cb == -1.0) return make_neg(std::move(a));
  }
  if (ca && *ca == 0.0 && !cb) return make_constant(0.0);
  return std::make_shared<DivExpr>(std::move(a), std::move(b));
}

inline ExprPtr make_neg(ExprPtr a) {
  if (auto c = as_constant(a)) return make_constant(-*c);
  return std::make_shared<NegExpr>(std::move(a));
}

inline ExprPtr make_pow_int(ExprPtr base, long long n) {
  if (n == 0) return make_constant(1.0);
  if (n == 1) return base;
  if (auto c = as_constant(base)) {
    if (*c != 0.0 || n > 0) return make_constant(PowIntExpr::ipow(*c, n));
  }
  return std::make_shared<PowIntExpr>(std::move(base), n);
}

inline ExprPtr make_sin(ExprPtr a) {
  if (auto c = as_constant(a)) return make_constant(std::sin(*c));
  return std::make_shared<SinExpr>(std::move(a));
}

inline ExprPtr make_cos(ExprPtr a) {
  if (auto c = as_constant(a)) return make_constant(std::cos(*c));
  return std::make_shared<CosExpr>(std::move(a));
}

inline ExprPtr make_exp(ExprPtr a) {
  if (auto c = as_constant(a)) return make_constant(std::exp(*c));
  return std::make_shared<ExpExpr>(std::move(a));
}

inline ExprPtr make_metric_inverse(std::shared_ptr<const MetricBlock> block, int i, int j) {
  return std::make_shared<MetricInverseExpr>(std::move(block), i, j);
}

}  // namespace cmg::jetcalc
