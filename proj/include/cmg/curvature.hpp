#pragma once

#include <memory>
#include <mutex>

#include "cmg/fields.hpp"

namespace cmg::tensorlab {

// Levi-Civita calculus of a chart metric. Christoffel symbols are built
// symbolically at construction; curvature, Ricci data and the contracted
// Bianchi residual fields are built on first use. Everything downstream of
// construction is evaluation of immutable DAGs, safe to run point-parallel.
//
// Index conventions:
//   gamma(k,i,j)        = Gamma^k_{ij}, symmetric in i,j
//   riemann_component(l,k,i,j) = component l of R(d_i, d_j) d_k
//   ricci_raw(j,k)      = Ric(d_j, d_k) = sum_i riemann_component(i,k,i,j)
class CurvatureBundle {
 public:
  explicit CurvatureBundle(MetricField g) : g_(std::move(g)) {
    // Gamma^k_{ij} = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij})
    std::array<std::array<ScalarField, 9>, 3> dg;  // dg[a][i*3+j] = d_a g_{ij}
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          dg[a][i * 3 + j] = g_.entry(i, j).derivative(a, diff_);
    for (int k = 0; k < 3; ++k) {
      for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
          ScalarField s(0.0);
          for (int l = 0; l < 3; ++l) {
            ScalarField bracket =
                dg[i][j * 3 + l] + dg[j][i * 3 + l] - dg[l][i * 3 + j];
            s = s + g_.inverse_entry(k, l) * bracket;
          }
          ScalarField half = ScalarField(0.5) * s;
          gamma_[slot(k, i, j)] = half;
          gamma_[slot(k, j, i)] = half;
        }
      }
    }
  }

  const MetricField& metric() const { return g_; }

  const ScalarField& christoffel(int k, int i, int j) const { return gamma_[slot(k, i, j)]; }

  const ScalarField& riemann_component(int l, int k, int i, int j) const {
    return curvature().riem[((l * 3 + k) * 3 + i) * 3 + j];
  }

  // raw (unsymmetrized) Ricci tensor; its symmetry is a test, not an input
  const ScalarField& ricci_raw(int j, int k) const { return curvature().ric_raw[j * 3 + k]; }

  const SymTensorField& ricci_tensor() const { return curvature().ric; }
  const EndoField& ricci_operator() const { return curvature().q; }
  const ScalarField& scalar_curvature() const { return curvature().r; }

  // (div Ric - 1/2 dr)_j, one field per chart axis; uses third derivatives
  // of the metric through d(Ric)
  const std::array<ScalarField, 3>& bianchi_residual_fields() const {
    std::scoped_lock lock(mu_);
    if (!bianchi_) {
      const Parts& cp = curvature_locked();
      auto out = std::make_unique<std::array<ScalarField, 3>>();
      for (int j = 0; j < 3; ++j) {
        ScalarField div(0.0);
        for (int i = 0; i < 3; ++i) {
          for (int k = 0; k < 3; ++k) {
            ScalarField nabla = cp.ric_raw[k * 3 + j].derivative(i, diff_);
            for (int m = 0; m < 3; ++m) {
              nabla = nabla - gamma_[slot(m, i, k)] * cp.ric_raw[m * 3 + j];
              nabla = nabla - gamma_[slot(m, i, j)] * cp.ric_raw[k * 3 + m];
            }
            div = div + g_.inverse_entry(i, k) * nabla;
          }
        }
        (*out)[j] = div - ScalarField(0.5) * cp.r.derivative(j, diff_);
      }
      bianchi_ = std::move(out);
    }
    return *bianchi_;
  }

  // componentwise nabla g (metric compatibility residual fields)
  const std::array<ScalarField, 18>& nabla_metric_fields() const {
    std::scoped_lock lock(mu_);
    if (!nabla_g_) {
      auto out = std::make_unique<std::array<ScalarField, 18>>();
      int idx = 0;
      for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 3; ++i) {
          for (int j = i; j < 3; ++j) {
            ScalarField s = g_.entry(i, j).derivative(k, diff_);
            for (int m = 0; m < 3; ++m) {
              s = s - gamma_[slot(m, k, i)] * g_.entry(m, j);
              s = s - gamma_[slot(m, k, j)] * g_.entry(i, m);
            }
            (*out)[idx++] = s;
          }
        }
      }
      nabla_g_ = std::move(out);
    }
    return *nabla_g_;
  }

  DiffCache& diff_cache() const { return diff_; }
  std::mutex& build_mutex() const { return mu_; }

 private:
  struct Parts {
    std::array<ScalarField, 81> riem;
    std::array<ScalarField, 9> ric_raw;
    SymTensorField ric;
    EndoField q;
    ScalarField r;
  };

  static int slot(int k, int i, int j) { return (k * 3 + i) * 3 + j; }

  const Parts& curvature() const {
    std::scoped_lock lock(mu_);
    return curvature_locked();
  }

  const Parts& curvature_locked() const {
    if (curv_) return *curv_;
    auto p = std::make_unique<Parts>();
    // R^l_{kij} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik}
    //           + Gamma^l_{im} Gamma^m_{jk} - Gamma^l_{jm} Gamma^m_{ik}
    for (int l = 0; l < 3; ++l) {
      for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) {
            ScalarField s = gamma_[slot(l, j, k)].derivative(i, diff_) -
                            gamma_[slot(l, i, k)].derivative(j, diff_);
            for (int m = 0; m < 3; ++m) {
              s = s + gamma_[slot(l, i, m)] * gamma_[slot(m, j, k)];
              s = s - gamma_[slot(l, j, m)] * gamma_[slot(m, i, k)];
            }
            p->riem[((l * 3 + k) * 3 + i) * 3 + j] = s;
          }
        }
      }
    }
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        ScalarField s(0.0);
        for (int i = 0; i < 3; ++i) s = s + p->riem[((i * 3 + k) * 3 + i) * 3 + j];
        p->ric_raw[j * 3 + k] = s;
      }
    }
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) p->ric.entry(i, j) = p->ric_raw[i * 3 + j];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        ScalarField s(0.0);
        for (int k = 0; k < 3; ++k) s = s + g_.inverse_entry(i, k) * p->ric_raw[k * 3 + j];
        p->q.entry(i, j) = s;
      }
    }
    p->r = p->q.trace();
    curv_ = std::move(p);
    return *curv_;
  }

  MetricField g_;
  std::array<ScalarField, 27> gamma_;
  mutable DiffCache diff_;
  mutable std::mutex mu_;
  mutable std::unique_ptr<Parts> curv_;
  mutable std::unique_ptr<std::array<ScalarField, 3>> bianchi_;
  mutable std::unique_ptr<std::array<ScalarField, 18>> nabla_g_;
};

inline CurvatureBundle christoffel(MetricField g) { return CurvatureBundle(std::move(g)); }

// (nabla_X Y)^k = X^i (d_i Y^k + Gamma^k_{ij} Y^j)
inline VectorField covariant_derivative_vector(const CurvatureBundle& b, const VectorField& x,
                                               const VectorField& y) {
  DiffCache cache;
  VectorField r;
  for (int k = 0; k < 3; ++k) {
    ScalarField s(0.0);
    for (int i = 0; i < 3; ++i) {
      ScalarField term = y.c[k].derivative(i, cache);
      for (int j = 0; j < 3; ++j) term = term + b.christoffel(k, i, j) * y.c[j];
      s = s + x.c[i] * term;
    }
    r.c[k] = s;
  }
  return r;
}

// (nabla_X T)^k_j = X^i (d_i T^k_j + Gamma^k_{im} T^m_j - Gamma^m_{ij} T^k_m)
inline EndoField covariant_derivative_endo(const CurvatureBundle& b, const VectorField& x,
                                           const EndoField& t) {
  DiffCache cache;
  EndoField r;
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < 3; ++j) {
      ScalarField s(0.0);
      for (int i = 0; i < 3; ++i) {
        ScalarField term = t.entry(k, j).derivative(i, cache);
        for (int m = 0; m < 3; ++m) {
          term = term + b.christoffel(k, i, m) * t.entry(m, j);
          term = term - b.christoffel(m, i, j) * t.entry(k, m);
        }
        s = s + x.c[i] * term;
      }
      r.entry(k, j) = s;
    }
  }
  return r;
}

// R(X,Y)Z expanded through the chart components, so point vectors need no
// field extension: (R(X,Y)Z)^l = X^i Y^j Z^k R^l_{kij}
inline VectorField riemann(const CurvatureBundle& b, const VectorField& x,
                           const VectorField& y, const VectorField& z) {
  VectorField r;
  for (int l = 0; l < 3; ++l) {
    ScalarField s(0.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          s = s + x.c[i] * y.c[j] * z.c[k] * b.riemann_component(l, k, i, j);
    r.c[l] = s;
  }
  return r;
}

struct RicciData {
  EndoField q;          // Ricci operator
  SymTensorField ric;   // Ricci tensor (bilinear accessor via .bilinear)
  ScalarField r;        // scalar curvature
};

inline RicciData ricci(const CurvatureBundle& b) {
  return {b.ricci_operator(), b.ricci_tensor(), b.scalar_curvature()};
}

// max_j |(div Ric - 1/2 dr)(d_j)| at the point
inline double contracted_bianchi_residual(const CurvatureBundle& b, const Vec3& point) {
  const auto& fields = b.bianchi_residual_fields();
  Evaluator ev(point);
  double worst = 0.0;
  for (const auto& f : fields) worst = std::max(worst, std::abs(ev(f)));
  return worst;
}

// numeric values of R(X,Y)Z at a point, through a shared evaluator
inline Vec3 riemann_at(const CurvatureBundle& b, Evaluator& ev, const Vec3& x, const Vec3& y,
                       const Vec3& z) {
  Vec3 out{0, 0, 0};
  for (int l = 0; l < 3; ++l) {
    double s = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          double c = b.riemann_component(l, k, i, j).eval(ev.ctx);
          if (c != 0.0) s += x[i] * y[j] * z[k] * c;
        }
    out[l] = s;
  }
  return out;
}

// chart-norm residual of the 3-dimensional curvature decomposition
//   R(X,Y)Z = Ric(Z,Y)X - Ric(Z,X)Y + g(Z,Y)QX - g(Z,X)QY
//             - r/2 (g(Z,Y)X - g(Z,X)Y)
inline double curvature_decomposition_residual(const CurvatureBundle& b, const VectorField& xf,
                                const VectorField& yf, const VectorField& zf,
                                const Vec3& point) {
  Evaluator ev(point);
  Vec3 x = ev(xf), y = ev(yf), z = ev(zf);
  Vec3 lhs = riemann_at(b, ev, x, y, z);

  Mat3 g = ev(b.metric());
  Mat3 ric;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) ric[i * 3 + j] = b.ricci_raw(i, j).eval(ev.ctx);
  Mat3 q = ev(b.ricci_operator());
  double r = b.scalar_curvature().eval(ev.ctx);

  auto bil = [](const Mat3& m, const Vec3& a, const Vec3& c) {
    double s = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += m[i * 3 + j] * a[i] * c[j];
    return s;
  };
  double ric_zy = bil(ric, z, y), ric_zx = bil(ric, z, x);
  double g_zy = bil(g, z, y), g_zx = bil(g, z, x);
  Vec3 qx = matvec(q, x), qy = matvec(q, y);

  Vec3 rhs{0, 0, 0};
  for (int l = 0; l < 3; ++l) {
    rhs[l] = ric_zy * x[l] - ric_zx * y[l] + g_zy * qx[l] - g_zx * qy[l] -
             0.5 * r * (g_zy * x[l] - g_zx * y[l]);
  }
  return norm(sub(lhs, rhs));
}

// g(grad F, X) = dF(X)
inline VectorField gradient(const CurvatureBundle& b, const ScalarField& f) {
  DiffCache cache;
  VectorField grad;
  for (int i = 0; i < 3; ++i) {
    ScalarField s(0.0);
    for (int j = 0; j < 3; ++j)
      s = s + b.metric().inverse_entry(i, j) * f.derivative(j, cache);
    grad.c[i] = s;
  }
  return grad;
}

// Independent Christoffel oracle: metric derivatives from central
// differences of metric *values* only. Shares no code with the symbolic
// path beyond plain evaluation.
inline std::array<double, 27> finite_difference_christoffel(const MetricField& g,
                                                            const Vec3& point, double step) {
  auto metric_at = [&g](const Vec3& p) {
    Evaluator ev(p);
    return ev(g);
  };
  Mat3 g0 = metric_at(point);
  Mat3 ginv = invert3(g0);
  std::array<Mat3, 3> dg;
  for (int a = 0; a < 3; ++a) {
    Vec3 hi = point, lo = point;
    hi[a] += step;
    lo[a] -= step;
    Mat3 gh = metric_at(hi), gl = metric_at(lo);
    for (int k = 0; k < 9; ++k) dg[a][k] = (gh[k] - gl[k]) / (2.0 * step);
  }
  std::array<double, 27> gamma{};
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0;
        for (int l = 0; l < 3; ++l)
          s += ginv[k * 3 + l] *
               (dg[i][j * 3 + l] + dg[j][i * 3 + l] - dg[l][i * 3 + j]);
        gamma[(k * 3 + i) * 3 + j] = 0.5 * s;
      }
  return gamma;
}

// max over (k,i,j) of |symbolic - finite difference| at the point
inline double christoffel_oracle_gap(const CurvatureBundle& b, const Vec3& point,
                                     double step) {
  auto fd = finite_difference_christoffel(b.metric(), point, step);
  Evaluator ev(point);
  double worst = 0;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        worst = std::max(worst,
                         std::abs(ev(b.christoffel(k, i, j)) - fd[(k * 3 + i) * 3 + j]));
  return worst;
}

}  // namespace cmg::tensorlab

namespace cmg {
using tensorlab::christoffel;
using tensorlab::contracted_bianchi_residual;
using tensorlab::covariant_derivative_endo;
using tensorlab::covariant_derivative_vector;
using tensorlab::christoffel_oracle_gap;
using tensorlab::CurvatureBundle;
using tensorlab::finite_difference_christoffel;
using tensorlab::gradient;
using tensorlab::curvature_decomposition_residual;
using tensorlab::ricci;
using tensorlab::RicciData;
using tensorlab::riemann;
using tensorlab::riemann_at;
}  // namespace cmg
