#pragma once

#include <array>
#include <memory>
#include <utility>
#include <vector>

#include "cmg/scalar_field.hpp"

namespace cmg::tensorlab {

using jetcalc::DiffCache;
using jetcalc::EvalContext;
using jetcalc::ExprPtr;
using jetcalc::MetricBlock;
using jetcalc::ScalarField;

// Chart-component tensor fields on R^3. All calculus is done in the
// coordinate basis; frame fields enter only as component expressions.

struct VectorField {
  std::array<ScalarField, 3> c{};  // coefficients of dx_i-duals (d/dx, d/dy, d/dz)

  VectorField() = default;
  VectorField(ScalarField x, ScalarField y, ScalarField z)
      : c{std::move(x), std::move(y), std::move(z)} {}

  static VectorField basis(int axis) {
    VectorField v;
    v.c[axis] = ScalarField(1.0);
    return v;
  }
  static VectorField constant(const Vec3& a) {
    return {ScalarField(a[0]), ScalarField(a[1]), ScalarField(a[2])};
  }

  friend VectorField operator+(const VectorField& a, const VectorField& b) {
    return {a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2]};
  }
  friend VectorField operator-(const VectorField& a, const VectorField& b) {
    return {a.c[0] - b.c[0], a.c[1] - b.c[1], a.c[2] - b.c[2]};
  }
  friend VectorField operator*(const ScalarField& f, const VectorField& a) {
    return {f * a.c[0], f * a.c[1], f * a.c[2]};
  }
  friend VectorField operator*(double s, const VectorField& a) {
    return ScalarField(s) * a;
  }
  friend VectorField operator-(const VectorField& a) {
    return {-a.c[0], -a.c[1], -a.c[2]};
  }
};

struct OneFormField {
  std::array<ScalarField, 3> c{};  // coefficients of dx, dy, dz

  OneFormField() = default;
  OneFormField(ScalarField x, ScalarField y, ScalarField z)
      : c{std::move(x), std::move(y), std::move(z)} {}

  ScalarField operator()(const VectorField& v) const {
    return c[0] * v.c[0] + c[1] * v.c[1] + c[2] * v.c[2];
  }

  friend OneFormField operator+(const OneFormField& a, const OneFormField& b) {
    return {a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2]};
  }
  friend OneFormField operator-(const OneFormField& a, const OneFormField& b) {
    return {a.c[0] - b.c[0], a.c[1] - b.c[1], a.c[2] - b.c[2]};
  }
  friend OneFormField operator*(const ScalarField& f, const OneFormField& a) {
    return {f * a.c[0], f * a.c[1], f * a.c[2]};
  }
};

// Symmetric bilinear field, stored upper-triangle: xx, xy, xz, yy, yz, zz.
struct SymTensorField {
  std::array<ScalarField, 6> c{};

  static int slot(int i, int j) {
    if (i > j) std::swap(i, j);
    static constexpr int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    return table[i][j];
  }

  const ScalarField& entry(int i, int j) const { return c[slot(i, j)]; }
  ScalarField& entry(int i, int j) { return c[slot(i, j)]; }

  ScalarField bilinear(const VectorField& x, const VectorField& y) const {
    ScalarField s(0.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s = s + entry(i, j) * x.c[i] * y.c[j];
    return s;
  }

  friend SymTensorField operator+(const SymTensorField& a, const SymTensorField& b) {
    SymTensorField r;
    for (int k = 0; k < 6; ++k) r.c[k] = a.c[k] + b.c[k];
    return r;
  }
  friend SymTensorField operator*(const ScalarField& f, const SymTensorField& a) {
    SymTensorField r;
    for (int k = 0; k < 6; ++k) r.c[k] = f * a.c[k];
    return r;
  }
};

// (1,1)-tensor field in the chart basis: m[i*3+j] = T^i_j, column j holding
// the image of d/dx_j.
struct EndoField {
  std::array<ScalarField, 9> m{};

  const ScalarField& entry(int i, int j) const { return m[i * 3 + j]; }
  ScalarField& entry(int i, int j) { return m[i * 3 + j]; }

  static EndoField identity() {
    EndoField e;
    for (int i = 0; i < 3; ++i) e.entry(i, i) = ScalarField(1.0);
    return e;
  }
  static EndoField zero() { return EndoField{}; }

  VectorField operator()(const VectorField& v) const {
    VectorField r;
    for (int i = 0; i < 3; ++i) {
      ScalarField s(0.0);
      for (int j = 0; j < 3; ++j) s = s + entry(i, j) * v.c[j];
      r.c[i] = s;
    }
    return r;
  }

  EndoField compose(const EndoField& other) const {  // this after other
    EndoField r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        ScalarField s(0.0);
        for (int k = 0; k < 3; ++k) s = s + entry(i, k) * other.entry(k, j);
        r.entry(i, j) = s;
      }
    return r;
  }

  ScalarField trace() const { return entry(0, 0) + entry(1, 1) + entry(2, 2); }

  friend EndoField operator+(const EndoField& a, const EndoField& b) {
    EndoField r;
    for (int k = 0; k < 9; ++k) r.m[k] = a.m[k] + b.m[k];
    return r;
  }
  friend EndoField operator-(const EndoField& a, const EndoField& b) {
    EndoField r;
    for (int k = 0; k < 9; ++k) r.m[k] = a.m[k] - b.m[k];
    return r;
  }
  friend EndoField operator*(const ScalarField& f, const EndoField& a) {
    EndoField r;
    for (int k = 0; k < 9; ++k) r.m[k] = f * a.m[k];
    return r;
  }
  friend EndoField operator*(double s, const EndoField& a) { return ScalarField(s) * a; }
};

// tensor product X (x) omega as an endomorphism: (X (x) omega)(Y) = omega(Y) X
inline EndoField tensor_product(const VectorField& x, const OneFormField& omega) {
  EndoField r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.entry(i, j) = x.c[i] * omega.c[j];
  return r;
}

inline SymTensorField sym_product(const OneFormField& a, const OneFormField& b) {
  SymTensorField r;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      r.entry(i, j) = ScalarField(0.5) * (a.c[i] * b.c[j] + a.c[j] * b.c[i]);
  return r;
}

// Riemannian metric: a positive-definite SymTensorField. Positive
// definiteness is a runnable per-point check, never an assumption. Inverse
// entries are opaque solve nodes sharing one block per metric.
class MetricField {
 public:
  explicit MetricField(SymTensorField s) : s_(std::move(s)) {
    auto block = std::make_shared<MetricBlock>();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) block->g[i * 3 + j] = s_.entry(i, j).expr();
    block_ = std::move(block);
  }

  static MetricField euclidean() {
    SymTensorField s;
    s.entry(0, 0) = ScalarField(1.0);
    s.entry(1, 1) = ScalarField(1.0);
    s.entry(2, 2) = ScalarField(1.0);
    return MetricField(std::move(s));
  }

  const SymTensorField& sym() const { return s_; }
  const ScalarField& entry(int i, int j) const { return s_.entry(i, j); }

  ScalarField inverse_entry(int i, int j) const {
    return ScalarField(jetcalc::make_metric_inverse(block_, i, j));
  }

  ScalarField inner(const VectorField& x, const VectorField& y) const {
    return s_.bilinear(x, y);
  }

  // one-form g(X, .)
  OneFormField lower(const VectorField& x) const {
    OneFormField w;
    for (int j = 0; j < 3; ++j) {
      ScalarField s(0.0);
      for (int i = 0; i < 3; ++i) s = s + entry(i, j) * x.c[i];
      w.c[j] = s;
    }
    return w;
  }

  VectorField raise(const OneFormField& w) const {
    VectorField v;
    for (int i = 0; i < 3; ++i) {
      ScalarField s(0.0);
      for (int j = 0; j < 3; ++j) s = s + inverse_entry(i, j) * w.c[j];
      v.c[i] = s;
    }
    return v;
  }

  const std::shared_ptr<const MetricBlock>& block() const { return block_; }

  double smallest_eigenvalue(const Vec3& p) const {
    EvalContext ctx(p);
    Mat3 g;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g[i * 3 + j] = entry(i, j).eval(ctx);
    return sym_eigenvalues(g)[0];
  }

  double condition_number(const Vec3& p) const {
    EvalContext ctx(p);
    Mat3 g;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g[i * 3 + j] = entry(i, j).eval(ctx);
    return cond_frobenius(g);
  }

 private:
  SymTensorField s_;
  std::shared_ptr<const MetricBlock> block_;
};

// Antisymmetric 2-form, stored as the three independent components.
struct TwoFormField {
  ScalarField cxy, cxz, cyz;  // w_{xy}, w_{xz}, w_{yz}

  ScalarField entry(int i, int j) const {
    if (i == j) return ScalarField(0.0);
    bool flip = i > j;
    if (flip) std::swap(i, j);
    ScalarField v = (i == 0 && j == 1) ? cxy : (i == 0 && j == 2) ? cxz : cyz;
    return flip ? -v : v;
  }

  ScalarField operator()(const VectorField& x, const VectorField& y) const {
    ScalarField s(0.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) s = s + entry(i, j) * x.c[i] * y.c[j];
    return s;
  }
};

// exterior derivative of a one-form: (dw)_{ij} = d_i w_j - d_j w_i
inline TwoFormField exterior_derivative(const OneFormField& w, DiffCache& cache) {
  TwoFormField d;
  d.cxy = w.c[1].derivative(0, cache) - w.c[0].derivative(1, cache);
  d.cxz = w.c[2].derivative(0, cache) - w.c[0].derivative(2, cache);
  d.cyz = w.c[2].derivative(1, cache) - w.c[1].derivative(2, cache);
  return d;
}
inline TwoFormField exterior_derivative(const OneFormField& w) {
  DiffCache cache;
  return exterior_derivative(w, cache);
}

inline OneFormField exterior_derivative(const ScalarField& f, DiffCache& cache) {
  return {f.derivative(0, cache), f.derivative(1, cache), f.derivative(2, cache)};
}
inline OneFormField exterior_derivative(const ScalarField& f) {
  DiffCache cache;
  return exterior_derivative(f, cache);
}

// coefficient of eta ^ d(eta) against dx^dy^dz; nonvanishing = contact
inline ScalarField wedge_with_two_form(const OneFormField& eta, const TwoFormField& w) {
  return eta.c[0] * w.cyz - eta.c[1] * w.cxz + eta.c[2] * w.cxy;
}

// ---------------------------------------------------------------------------
// Lie calculus
// ---------------------------------------------------------------------------

// [X,Y]^k = X^i d_i Y^k - Y^i d_i X^k
inline VectorField lie_bracket(const VectorField& x, const VectorField& y, DiffCache& cache) {
  VectorField r;
  for (int k = 0; k < 3; ++k) {
    ScalarField s(0.0);
    for (int i = 0; i < 3; ++i)
      s = s + x.c[i] * y.c[k].derivative(i, cache) - y.c[i] * x.c[k].derivative(i, cache);
    r.c[k] = s;
  }
  return r;
}
inline VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  DiffCache cache;
  return lie_bracket(x, y, cache);
}

// (L_Z g)_{ij} = Z^k d_k g_{ij} + g_{kj} d_i Z^k + g_{ik} d_j Z^k
inline SymTensorField lie_derivative_metric(const VectorField& z, const SymTensorField& g,
                                            DiffCache& cache) {
  SymTensorField r;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      ScalarField s(0.0);
      for (int k = 0; k < 3; ++k) {
        s = s + z.c[k] * g.entry(i, j).derivative(k, cache);
        s = s + g.entry(k, j) * z.c[k].derivative(i, cache);
        s = s + g.entry(i, k) * z.c[k].derivative(j, cache);
      }
      r.entry(i, j) = s;
    }
  }
  return r;
}
inline SymTensorField lie_derivative_metric(const VectorField& z, const MetricField& g) {
  DiffCache cache;
  return lie_derivative_metric(z, g.sym(), cache);
}

// (L_Z T)^i_j = Z^k d_k T^i_j - T^k_j d_k Z^i + T^i_k d_j Z^k
inline EndoField lie_derivative_endo(const VectorField& z, const EndoField& t,
                                     DiffCache& cache) {
  EndoField r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      ScalarField s(0.0);
      for (int k = 0; k < 3; ++k) {
        s = s + z.c[k] * t.entry(i, j).derivative(k, cache);
        s = s - t.entry(k, j) * z.c[i].derivative(k, cache);
        s = s + t.entry(i, k) * z.c[k].derivative(j, cache);
      }
      r.entry(i, j) = s;
    }
  }
  return r;
}
inline EndoField lie_derivative_endo(const VectorField& z, const EndoField& t) {
  DiffCache cache;
  return lie_derivative_endo(z, t, cache);
}

// (L_Z w)_i = Z^k d_k w_i + w_k d_i Z^k
inline OneFormField lie_derivative_oneform(const VectorField& z, const OneFormField& w,
                                           DiffCache& cache) {
  OneFormField r;
  for (int i = 0; i < 3; ++i) {
    ScalarField s(0.0);
    for (int k = 0; k < 3; ++k) {
      s = s + z.c[k] * w.c[i].derivative(k, cache);
      s = s + w.c[k] * z.c[k].derivative(i, cache);
    }
    r.c[i] = s;
  }
  return r;
}
inline OneFormField lie_derivative_oneform(const VectorField& z, const OneFormField& w) {
  DiffCache cache;
  return lie_derivative_oneform(z, w, cache);
}

// ---------------------------------------------------------------------------
// pointwise evaluation
// ---------------------------------------------------------------------------

// One context per point; every field evaluated through the same Evaluator
// shares the node memo, so common subexpressions cost one visit. The memo is
// keyed by node address, so the evaluator retains each root it touches:
// a temporary field must not die (and free addresses for reuse) while the
// context that cached its values is still live.
struct Evaluator {
  EvalContext ctx;
  std::vector<ExprPtr> retained;

  explicit Evaluator(const Vec3& p) : ctx(p) {}

  double operator()(const ScalarField& f) {
    retained.push_back(f.expr());
    return f.eval(ctx);
  }

  Vec3 operator()(const VectorField& v) {
    return {(*this)(v.c[0]), (*this)(v.c[1]), (*this)(v.c[2])};
  }

  Vec3 operator()(const OneFormField& w) {
    return {(*this)(w.c[0]), (*this)(w.c[1]), (*this)(w.c[2])};
  }

  Mat3 operator()(const EndoField& t) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i * 3 + j] = (*this)(t.entry(i, j));
    return m;
  }

  Mat3 operator()(const SymTensorField& s) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i * 3 + j] = (*this)(s.entry(i, j));
    return m;
  }

  Mat3 operator()(const MetricField& g) { return (*this)(g.sym()); }
};

}  // namespace cmg::tensorlab

namespace cmg {
using tensorlab::EndoField;
using tensorlab::Evaluator;
using tensorlab::exterior_derivative;
using tensorlab::lie_bracket;
using tensorlab::lie_derivative_endo;
using tensorlab::lie_derivative_metric;
using tensorlab::lie_derivative_oneform;
using tensorlab::MetricField;
using tensorlab::OneFormField;
using tensorlab::sym_product;
using tensorlab::SymTensorField;
using tensorlab::tensor_product;
using tensorlab::TwoFormField;
using tensorlab::VectorField;
using tensorlab::wedge_with_two_form;
}  // namespace cmg
