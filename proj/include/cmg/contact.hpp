#pragma once

#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmg/curvature.hpp"
#include "cmg/parallel.hpp"
#include "cmg/report.hpp"
#include "cmg/sampling.hpp"

namespace cmg::contactcore {

using verify::CheckReport;
using verify::PointRecord;
using verify::SampleDomain;

// ---------------------------------------------------------------------------
// structure
// ---------------------------------------------------------------------------

// A contact metric structure (eta, xi, phi, g) on a sampled chart. The
// defining axioms are runnable checks (check_contact_axioms), never
// assumptions. Models may supply the h-eigenframe as honest vector fields;
// checks that need derivatives of the frame require them.
class ContactStructure {
 public:
  OneFormField eta;
  VectorField xi;
  EndoField phi;
  MetricField g;
  SampleDomain domain;
  std::optional<VectorField> frame_E;
  std::optional<VectorField> frame_phiE;
  std::string name;
  std::vector<std::pair<std::string, std::string>> notes;

  ContactStructure(OneFormField eta_, VectorField xi_, EndoField phi_, MetricField g_,
                   SampleDomain domain_)
      : eta(std::move(eta_)),
        xi(std::move(xi_)),
        phi(std::move(phi_)),
        g(std::move(g_)),
        domain(std::move(domain_)),
        lazy_(std::make_shared<Lazy>()) {}

  const CurvatureBundle& bundle() const {
    std::scoped_lock lock(lazy_->mu);
    if (!lazy_->bundle) lazy_->bundle = std::make_unique<CurvatureBundle>(g);
    return *lazy_->bundle;
  }

  // h = 1/2 L_xi phi
  const EndoField& h_tensor() const {
    std::scoped_lock lock(lazy_->mu);
    if (!lazy_->h)
      lazy_->h = std::make_unique<EndoField>(ScalarField(0.5) *
                                             lie_derivative_endo(xi, phi));
    return *lazy_->h;
  }

 private:
  struct Lazy {
    std::mutex mu;
    std::unique_ptr<CurvatureBundle> bundle;
    std::unique_ptr<EndoField> h;
  };
  std::shared_ptr<Lazy> lazy_;  // shared across copies; contents immutable once built
};

inline const EndoField& h_tensor(const ContactStructure& s) { return s.h_tensor(); }

struct CheckParams {
  double tol = 1e-8;
  std::uint64_t seed = 7;
  unsigned threads = 0;
  double cond_limit = 1e8;  // above this the point is reported untrusted
  std::optional<std::vector<Vec3>> points;
};

struct KmuFit {
  double kappa = 0.0;
  double mu = 0.0;
  double residual = 0.0;
  bool mu_identifiable = false;
};

struct EtaEinsteinFit {
  double lambda_ric = 0.0;
  double gamma = 0.0;
  double residual = 0.0;
};

struct HFrame {
  double lambda_h = 0.0;
  Vec3 E{};
  Vec3 phiE{};
};

// ---------------------------------------------------------------------------
// shared plumbing
// ---------------------------------------------------------------------------

namespace detail {

inline double g_norm(const Mat3& g, const Vec3& v) {
  double s = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += g[i * 3 + j] * v[i] * v[j];
  return std::sqrt(std::max(s, 0.0));
}

inline double mat_max_abs(const Mat3& m) {
  double worst = 0;
  for (double v : m) worst = std::max(worst, std::abs(v));
  return worst;
}

// J^l_i = (R(d_i, xi) xi)^l evaluated at the context point
inline Mat3 jacobi_matrix(const CurvatureBundle& b, Evaluator& ev, const Vec3& xi) {
  Mat3 j{};
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i) {
      double s = 0;
      for (int jj = 0; jj < 3; ++jj)
        for (int k = 0; k < 3; ++k) {
          double c = b.riemann_component(l, k, i, jj).eval(ev.ctx);
          if (c != 0.0) s += xi[jj] * xi[k] * c;
        }
      j[l * 3 + i] = s;
    }
  return j;
}

template <typename PerPoint>
CheckReport run_pointwise(std::string name, const ContactStructure& s,
                          const CheckParams& params, PerPoint&& per_point) {
  std::vector<Vec3> pts = params.points ? *params.points : sample_points(s.domain);
  CheckReport rep;
  rep.scenario = std::move(name);
  rep.tolerance = params.tol;
  rep.points.resize(pts.size());
  parallel_for(
      pts.size(),
      [&](std::size_t i) {
        PointRecord& rec = rep.points[i];
        rec.point = pts[i];
        Evaluator ev(pts[i]);
        Mat3 gm = ev(s.g);
        rec.trusted = cond_frobenius(gm) <= params.cond_limit;
        per_point(ev, gm, rec);
      },
      params.threads);
  rep.note("seed", std::to_string(params.seed));
  rep.note("structure", s.name);
  for (const auto& [k, v] : s.notes) rep.note(k, v);
  rep.finalize_below_tolerance();
  return rep;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Reeb field
// ---------------------------------------------------------------------------

// Solves eta(xi) = 1, d(eta)(xi, .) = 0 in field arithmetic: the kernel
// direction of d(eta) is V^i = (1/2) eps^{ijk} (d eta)_{jk}, and eta(V) is
// the eta ^ d(eta) volume coefficient, nonvanishing exactly where the
// contact condition holds (guarded division otherwise).
inline VectorField reeb_field(const OneFormField& eta, const MetricField& /*g*/) {
  TwoFormField d = exterior_derivative(eta);
  VectorField v{d.cyz, -d.cxz, d.cxy};
  ScalarField den = eta(v);
  return {v.c[0] / den, v.c[1] / den, v.c[2] / den};
}

// phi from the compatibility relation d(eta) = 2 g(., phi .):
// phi^k_j = (1/2) g^{ki} (d eta)_{ij}
inline EndoField derive_phi_from_compatibility(const OneFormField& eta, const MetricField& g) {
  TwoFormField d = exterior_derivative(eta);
  EndoField phi;
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) {
      ScalarField s(0.0);
      for (int i = 0; i < 3; ++i) s = s + g.inverse_entry(k, i) * d.entry(i, j);
      phi.entry(k, j) = ScalarField(0.5) * s;
    }
  return phi;
}

// ---------------------------------------------------------------------------
// axioms
// ---------------------------------------------------------------------------

inline CheckReport check_contact_axioms(const ContactStructure& s,
                                        const CheckParams& params = {}) {
  // symbolic residual fields, built once
  ScalarField eta_xi = s.eta(s.xi) - 1.0;
  EndoField phi_sq = s.phi.compose(s.phi) + EndoField::identity() -
                     tensor_product(s.xi, s.eta);
  VectorField phi_xi = s.phi(s.xi);
  TwoFormField deta = exterior_derivative(s.eta);
  EndoField compat;  // (d eta)_{ij} - 2 g(d_i, phi d_j)
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      ScalarField gphi(0.0);
      for (int k = 0; k < 3; ++k) gphi = gphi + s.g.entry(i, k) * s.phi.entry(k, j);
      compat.entry(i, j) = deta.entry(i, j) - ScalarField(2.0) * gphi;
    }
  ScalarField volume = wedge_with_two_form(s.eta, deta);
  const double volume_floor = 1e-6;

  // component fields subject to the declared periodicity
  std::vector<ScalarField> component_fields;
  for (int i = 0; i < 3; ++i) component_fields.push_back(s.eta.c[i]);
  for (int i = 0; i < 3; ++i) component_fields.push_back(s.xi.c[i]);
  for (int i = 0; i < 9; ++i) component_fields.push_back(s.phi.m[i]);
  for (int i = 0; i < 6; ++i) component_fields.push_back(s.g.sym().c[i]);
  bool any_period = s.domain.periodic(0) || s.domain.periodic(1) || s.domain.periodic(2);

  std::uint64_t seed = params.seed;
  CheckReport rep = detail::run_pointwise(
      "contact-axioms", s, params,
      [&](Evaluator& ev, const Mat3& gm, PointRecord& rec) {
        rec.residuals.emplace_back("eta_xi", std::abs(ev(eta_xi)));
        rec.residuals.emplace_back("phi_square", detail::mat_max_abs(ev(phi_sq)));
        rec.residuals.emplace_back("phi_xi", detail::g_norm(gm, ev(phi_xi)));

        Mat3 cm = ev(compat);
        double basis_worst = detail::mat_max_abs(cm);
        SplitMix64 rng(seed ^ 0x5eedu);
        double random_worst = 0;
        for (int rep_i = 0; rep_i < 3; ++rep_i) {
          Vec3 x = rng.next_vec_sym(), y = rng.next_vec_sym();
          double val = 0;
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) val += x[i] * y[j] * cm[i * 3 + j];
          random_worst = std::max(random_worst, std::abs(val));
        }
        rec.residuals.emplace_back("compatibility",
                                   std::max(basis_worst, random_worst));
        rec.residuals.emplace_back("volume_floor",
                                   std::max(0.0, volume_floor - std::abs(ev(volume))));

        if (any_period) {
          double worst = 0;
          for (int a = 0; a < 3; ++a) {
            if (!s.domain.periodic(a)) continue;
            Vec3 shifted = ev.ctx.point;
            shifted[a] += *s.domain.periods[a];
            Evaluator ev2(shifted);
            for (const auto& f : component_fields)
              worst = std::max(worst, std::abs(ev(f) - ev2(f)));
          }
          rec.residuals.emplace_back("periodicity", worst);
        }
      });
  rep.scenario = "contact-axioms";
  return rep;
}

// positive definiteness of g (smallest eigenvalue floor), reported per point
inline CheckReport check_metric_positive(const ContactStructure& s,
                                         const CheckParams& params = {}) {
  const double floor = 1e-10;
  return detail::run_pointwise(
      "metric-positive", s, params, [&](Evaluator&, const Mat3& gm, PointRecord& rec) {
        double lo = sym_eigenvalues(gm)[0];
        rec.residuals.emplace_back("pd_floor", std::max(0.0, floor - lo));
      });
}

// ---------------------------------------------------------------------------
// h tensor and frames
// ---------------------------------------------------------------------------

// Pointwise eigenframe of h: hE = lambda_h E with lambda_h > 0, E g-unit and
// horizontal; empty when h vanishes at the point (K-contact case).
inline std::optional<HFrame> h_eigenframe(const ContactStructure& s, Evaluator& ev) {
  Mat3 h = ev(s.h_tensor());
  Mat3 gm = ev(s.g);
  Mat3 h2 = matmul(h, h);
  double lambda = std::sqrt(std::max(0.0, (h2[0] + h2[4] + h2[8]) / 2.0));
  if (lambda < 1e-8) return std::nullopt;

  Mat3 m = h;
  m[0] -= lambda;
  m[4] -= lambda;
  m[8] -= lambda;
  Vec3 r0{m[0], m[1], m[2]}, r1{m[3], m[4], m[5]}, r2{m[6], m[7], m[8]};
  Vec3 c01 = cross(r0, r1), c02 = cross(r0, r2), c12 = cross(r1, r2);
  Vec3 e = c01;
  if (norm(c02) > norm(e)) e = c02;
  if (norm(c12) > norm(e)) e = c12;
  double len = detail::g_norm(gm, e);
  if (len < 1e-12) return std::nullopt;
  e = scale(1.0 / len, e);
  int big = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(e[i]) > std::abs(e[big])) big = i;
  if (e[big] < 0) e = scale(-1.0, e);

  Mat3 phi = ev(s.phi);
  return HFrame{lambda, e, matvec(phi, e)};
}

inline std::optional<HFrame> h_eigenframe(const ContactStructure& s, const Vec3& point) {
  Evaluator ev(point);
  return h_eigenframe(s, ev);
}

// {E, phiE} from the eigenframe when h != 0, otherwise a deterministic
// g-unit horizontal vector and its phi image
inline HFrame frame_at(const ContactStructure& s, Evaluator& ev) {
  if (auto hf = h_eigenframe(s, ev)) return *hf;
  Mat3 gm = ev(s.g);
  Vec3 xi = ev(s.xi);
  Vec3 eta = ev(s.eta);
  double best_len = -1;
  Vec3 best_v{};
  for (int i = 0; i < 3; ++i) {
    Vec3 b{0, 0, 0};
    b[i] = 1;
    Vec3 horiz = sub(b, scale(eta[i], xi));
    double len = detail::g_norm(gm, horiz);
    if (len > best_len) {
      best_len = len;
      best_v = horiz;
    }
  }
  Vec3 e = scale(1.0 / best_len, best_v);
  Mat3 phi = ev(s.phi);
  return HFrame{0.0, e, matvec(phi, e)};
}

// ---------------------------------------------------------------------------
// classifiers
// ---------------------------------------------------------------------------

// Sasakian, by both characterizations; the two verdicts must agree.
inline CheckReport check_sasakian(const ContactStructure& s, const CheckParams& params = {}) {
  const CurvatureBundle& b = s.bundle();
  std::array<EndoField, 3> nabla_phi;
  for (int i = 0; i < 3; ++i)
    nabla_phi[i] = covariant_derivative_endo(b, VectorField::basis(i), s.phi);

  CheckReport rep = detail::run_pointwise(
      "sasakian", s, params, [&](Evaluator& ev, const Mat3& gm, PointRecord& rec) {
        Vec3 xi = ev(s.xi);
        Vec3 eta = ev(s.eta);

        // (nabla_X phi) Y = g(X,Y) xi - eta(Y) X over basis pairs
        double worst_np = 0;
        for (int i = 0; i < 3; ++i) {
          Mat3 np = ev(nabla_phi[i]);
          for (int j = 0; j < 3; ++j) {
            Vec3 lhs{np[0 * 3 + j], np[1 * 3 + j], np[2 * 3 + j]};
            Vec3 rhs = scale(gm[i * 3 + j], xi);
            rhs[i] -= eta[j];
            worst_np = std::max(worst_np, detail::g_norm(gm, sub(lhs, rhs)));
          }
        }
        rec.residuals.emplace_back("nabla_phi", worst_np);

        // R(X,Y)xi = eta(Y) X - eta(X) Y over basis pairs
        double worst_rc = 0;
        for (int i = 0; i < 3; ++i)
          for (int j = i + 1; j < 3; ++j) {
            Vec3 lhs{};
            for (int l = 0; l < 3; ++l) {
              double v = 0;
              for (int k = 0; k < 3; ++k)
                v += xi[k] * b.riemann_component(l, k, i, j).eval(ev.ctx);
              lhs[l] = v;
            }
            Vec3 rhs{0, 0, 0};
            rhs[i] += eta[j];
            rhs[j] -= eta[i];
            worst_rc = std::max(worst_rc, detail::g_norm(gm, sub(lhs, rhs)));
          }
        rec.residuals.emplace_back("curvature", worst_rc);
      });

  // the two Sasakian criteria must reach the same verdict
  double max_np = 0, max_rc = 0;
  for (const auto& rec : rep.points) {
    if (!rec.trusted) continue;
    max_np = std::max(max_np, std::abs(rec.residuals[0].second));
    max_rc = std::max(max_rc, std::abs(rec.residuals[1].second));
  }
  bool pass_np = max_np < params.tol, pass_rc = max_rc < params.tol;
  rep.note("nabla_phi_verdict", pass_np ? "pass" : "fail");
  rep.note("curvature_verdict", pass_rc ? "pass" : "fail");
  rep.note("criteria_agree", pass_np == pass_rc ? "yes" : "no");
  return rep;
}

// K-contact: L_xi g = 0 and R(X,xi)xi = X - eta(X) xi; verdicts must agree.
inline CheckReport check_k_contact(const ContactStructure& s, const CheckParams& params = {}) {
  const CurvatureBundle& b = s.bundle();
  DiffCache dc;
  SymTensorField lie_g = lie_derivative_metric(s.xi, s.g.sym(), dc);

  CheckReport rep = detail::run_pointwise(
      "k-contact", s, params, [&](Evaluator& ev, const Mat3& gm, PointRecord& rec) {
        rec.residuals.emplace_back("lie_xi_g", detail::mat_max_abs(ev(lie_g)));

        Vec3 xi = ev(s.xi);
        Vec3 eta = ev(s.eta);
        Mat3 jac = detail::jacobi_matrix(b, ev, xi);
        double worst = 0;
        for (int i = 0; i < 3; ++i) {
          Vec3 lhs{jac[0 * 3 + i], jac[1 * 3 + i], jac[2 * 3 + i]};
          Vec3 rhs{0, 0, 0};
          rhs[i] = 1;
          rhs = sub(rhs, scale(eta[i], xi));
          worst = std::max(worst, detail::g_norm(gm, sub(lhs, rhs)));
        }
        rec.residuals.emplace_back("curvature", worst);
      });

  double max_lg = 0, max_rc = 0;
  for (const auto& rec : rep.points) {
    if (!rec.trusted) continue;
    max_lg = std::max(max_lg, std::abs(rec.residuals[0].second));
    max_rc = std::max(max_rc, std::abs(rec.residuals[1].second));
  }
  bool pass_lg = max_lg < params.tol, pass_rc = max_rc < params.tol;
  rep.note("lie_xi_g_verdict", pass_lg ? "pass" : "fail");
  rep.note("curvature_verdict", pass_rc ? "pass" : "fail");
  rep.note("criteria_agree", pass_lg == pass_rc ? "yes" : "no");
  return rep;
}

// ---------------------------------------------------------------------------
// (kappa, mu) fits and suites
// ---------------------------------------------------------------------------

// Pointwise fit of R(X,xi)xi = kappa (X - eta(X) xi) + mu h X. Exactly
// determined on the h-eigenframe (kappa +- mu lambda_h are the frame
// eigencoefficients); least squares over the coordinate frame when h = 0,
// where mu has no constraint and is reported unidentifiable.
inline KmuFit fit_kappa_mu_jacobi(const ContactStructure& s, Evaluator& ev) {
  const CurvatureBundle& b = s.bundle();
  Mat3 gm = ev(s.g);
  Vec3 xi = ev(s.xi);
  Vec3 eta = ev(s.eta);
  Mat3 h = ev(s.h_tensor());
  Mat3 jac = detail::jacobi_matrix(b, ev, xi);

  auto g_inner = [&gm](const Vec3& a, const Vec3& c) {
    double v = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) v += gm[i * 3 + j] * a[i] * c[j];
    return v;
  };

  KmuFit fit;
  auto hf = h_eigenframe(s, ev);
  if (hf) {
    const Vec3& E = hf->E;
    const Vec3& phiE = hf->phiE;
    double cE = g_inner(matvec(jac, E), E);
    double cP = g_inner(matvec(jac, phiE), phiE) / std::max(g_inner(phiE, phiE), 1e-300);
    fit.kappa = 0.5 * (cE + cP);
    fit.mu = (cE - cP) / (2.0 * hf->lambda_h);
    fit.mu_identifiable = true;
    double r2 = 0;
    for (const Vec3& X : {E, phiE, xi}) {
      double eta_x = eta[0] * X[0] + eta[1] * X[1] + eta[2] * X[2];
      Vec3 model = add(scale(fit.kappa, sub(X, scale(eta_x, xi))),
                       scale(fit.mu, matvec(h, X)));
      Vec3 gap = sub(matvec(jac, X), model);
      r2 += g_inner(gap, gap);
    }
    fit.residual = std::sqrt(std::max(r2, 0.0));
    return fit;
  }

  // h = 0: kappa alone, minimal-norm mu = 0
  double num = 0, den = 0;
  std::array<Vec3, 3> basis_h;
  for (int i = 0; i < 3; ++i) {
    Vec3 bvec{0, 0, 0};
    bvec[i] = 1;
    basis_h[i] = sub(bvec, scale(eta[i], xi));
    Vec3 jx{jac[0 * 3 + i], jac[1 * 3 + i], jac[2 * 3 + i]};
    num += g_inner(jx, basis_h[i]);
    den += g_inner(basis_h[i], basis_h[i]);
  }
  fit.kappa = den > 1e-14 ? num / den : 0.0;
  fit.mu = 0.0;
  fit.mu_identifiable = false;
  double r2 = 0;
  for (int i = 0; i < 3; ++i) {
    Vec3 jx{jac[0 * 3 + i], jac[1 * 3 + i], jac[2 * 3 + i]};
    Vec3 gap = sub(jx, scale(fit.kappa, basis_h[i]));
    r2 += g_inner(gap, gap);
  }
  fit.residual = std::sqrt(std::max(r2, 0.0));
  return fit;
}

inline KmuFit fit_kappa_mu_jacobi(const ContactStructure& s, const Vec3& point) {
  Evaluator ev(point);
  return fit_kappa_mu_jacobi(s, ev);
}

// Full (kappa,mu) curvature identity over frame pairs, plus the necessary
// condition R(E,phiE)xi = 0 for horizontal pairs.
inline CheckReport check_full_kmu(const ContactStructure& s, const ScalarField& kappa,
                                  const ScalarField& mu, const CheckParams& params = {}) {
  const CurvatureBundle& b = s.bundle();
  return detail::run_pointwise(
      "full-kmu", s, params, [&](Evaluator& ev, const Mat3& gm, PointRecord& rec) {
        Vec3 xi = ev(s.xi);
        Vec3 etav = ev(s.eta);
        Mat3 h = ev(s.h_tensor());
        double kap = ev(kappa);
        double muv = ev(mu);
        HFrame fr = frame_at(s, ev);
        std::array<Vec3, 3> frame{fr.E, fr.phiE, xi};

        auto eta_of = [&etav](const Vec3& v) {
          return etav[0] * v[0] + etav[1] * v[1] + etav[2] * v[2];
        };

        double worst = 0;
        for (const Vec3& X : frame)
          for (const Vec3& Y : frame) {
            Vec3 lhs = riemann_at(b, ev, X, Y, xi);
            Vec3 rhs = add(
                scale(kap, sub(scale(eta_of(Y), X), scale(eta_of(X), Y))),
                scale(muv, sub(scale(eta_of(Y), matvec(h, X)),
                               scale(eta_of(X), matvec(h, Y)))));
            worst = std::max(worst, detail::g_norm(gm, sub(lhs, rhs)));
          }
        rec.residuals.emplace_back("full_kmu", worst);

        Vec3 horiz = riemann_at(b, ev, fr.E, fr.phiE, xi);
        rec.residuals.emplace_back("horizontal_pair", detail::g_norm(gm, horiz));
      });
}

// Q X = (r/2 - kappa) X + (3 kappa - r/2) eta(X) xi + mu h X, and
// Q xi = 2 kappa xi. Optionally also r = 2 kappa (kappa-space scalar law,
// meaningful only away from the Sasakian kappa = 1 case).
inline CheckReport check_q_formula_3d(const ContactStructure& s, const ScalarField& kappa,
                                      const ScalarField& mu, const CheckParams& params = {},
                                      bool include_r_2kappa = false) {
  const CurvatureBundle& b = s.bundle();
  return detail::run_pointwise(
      "q-formula", s, params, [&](Evaluator& ev, const Mat3& gm, PointRecord& rec) {
        Vec3 xi = ev(s.xi);
        Vec3 etav = ev(s.eta);
        Mat3 h = ev(s.h_tensor());
        Mat3 q = ev(b.ricci_operator());
        double r = b.scalar_curvature().eval(ev.ctx);
        double kap = ev(kappa);
        double muv = ev(mu);
        HFrame fr = frame_at(s, ev);
        std::array<Vec3, 3> frame{fr.E, fr.phiE, xi};

        auto eta_of = [&etav](const Vec3& v) {
          return etav[0] * v[0] + etav[1] * v[1] + etav[2] * v[2];
        };

        double worst = 0;
        for (const Vec3& X : frame) {
          Vec3 rhs = add(add(scale(r / 2 - kap, X), scale((3 * kap - r / 2) * eta_of(X), xi)),
                         scale(muv, matvec(h, X)));
          worst = std::max(worst, detail::g_norm(gm, sub(matvec(q, X), rhs)));
        }
        rec.residuals.emplace_back("q_formula", worst);
        rec.residuals.emplace_back(
            "q_xi", detail::g_norm(gm, sub(matvec(q, xi), scale(2 * kap, xi))));
        if (include_r_2kappa) rec.residuals.emplace_back("r_minus_2kappa", r - 2 * kap);
      });
}

// structural identities: nabla_xi h = mu h phi and h^2 = (kappa - 1) phi^2
inline CheckReport check_kmu_structural(const ContactStructure& s, const ScalarField& kappa,
                                        const ScalarField& mu, const CheckParams& params = {}) {
  const CurvatureBundle& b = s.bundle();
  EndoField nabla_xi_h = covariant_derivative_endo(b, s.xi, s.h_tensor());
  EndoField h_phi = s.h_tensor().compose(s.phi);
  EndoField h_sq = s.h_tensor().compose(s.h_tensor());
  EndoField phi_sq = s.phi.compose(s.phi);
  EndoField lhs1 = nabla_xi_h - mu * h_phi;
  EndoField lhs2 = h_sq - (kappa - ScalarField(1.0)) * phi_sq;
  return detail::run_pointwise(
      "kmu-structural", s, params, [&](Evaluator& ev, const Mat3&, PointRecord& rec) {
        rec.residuals.emplace_back("nabla_xi_h", detail::mat_max_abs(ev(lhs1)));
        rec.residuals.emplace_back("h_square", detail::mat_max_abs(ev(lhs2)));
      });
}

// sum_i (nabla_{E_i} h) E_i = phi Q xi, frame-free through the inverse
// metric; valid on any 3-dimensional contact metric structure
inline CheckReport check_h_divergence(const ContactStructure& s,
                                      const CheckParams& params = {}) {
  const CurvatureBundle& b = s.bundle();
  std::array<EndoField, 3> dh;
  for (int a = 0; a < 3; ++a)
    dh[a] = covariant_derivative_endo(b, VectorField::basis(a), s.h_tensor());
  return detail::run_pointwise(
      "h-divergence", s, params, [&](Evaluator& ev, const Mat3& gm, PointRecord& rec) {
        Mat3 ginv = invert3(gm);
        Vec3 lhs{0, 0, 0};
        for (int a = 0; a < 3; ++a) {
          Mat3 m = ev(dh[a]);
          for (int bb = 0; bb < 3; ++bb)
            for (int l = 0; l < 3; ++l) lhs[l] += ginv[a * 3 + bb] * m[l * 3 + bb];
        }
        Vec3 qxi = matvec(ev(b.ricci_operator()), ev(s.xi));
        Vec3 rhs = matvec(ev(s.phi), qxi);
        rec.residuals.emplace_back("h_divergence", detail::g_norm(gm, sub(lhs, rhs)));
      });
}

// Differential identities of generalized (kappa,mu)-structures with kappa < 1.
// Requires the eigenframe as honest vector fields (nabla_E E differentiates
// E); lambda_h enters as sqrt(1 - kappa), so d(lambda) = -d(kappa)/(2 lambda).
inline CheckReport check_kmu_differential_identities(const ContactStructure& s,
                                                     const ScalarField& kappa,
                                                     const ScalarField& mu,
                                                     const CheckParams& params = {}) {
  if (!s.frame_E || !s.frame_phiE)
    return error_report("kmu-differentials", "structure supplies no eigenframe fields");
  const CurvatureBundle& b = s.bundle();
  const VectorField& E = *s.frame_E;
  const VectorField& phiE = *s.frame_phiE;

  DiffCache dc;
  OneFormField dkappa = exterior_derivative(kappa, dc);
  OneFormField dmu = exterior_derivative(mu, dc);
  OneFormField dr = exterior_derivative(b.scalar_curvature(), dc);
  ScalarField dk_xi = dkappa(s.xi);
  ScalarField dr_xi = dr(s.xi);
  ScalarField dk_E = dkappa(E);
  ScalarField dk_phiE = dkappa(phiE);
  ScalarField dmu_E = dmu(E);
  ScalarField dmu_phiE = dmu(phiE);
  VectorField nEE = covariant_derivative_vector(b, E, E);
  VectorField nPP = covariant_derivative_vector(b, phiE, phiE);

  return detail::run_pointwise(
      "kmu-differentials", s, params, [&](Evaluator& ev, const Mat3& gm, PointRecord& rec) {
        double kap = ev(kappa);
        if (kap >= 1.0 - 1e-10) throw DomainError("kmu-differentials: eigenframe degenerate (kappa >= 1)");
        double lambda = std::sqrt(1.0 - kap);

        rec.residuals.emplace_back("dkappa_xi", std::abs(ev(dk_xi)));
        rec.residuals.emplace_back("dr_xi", std::abs(ev(dr_xi)));

        double dlam_E = -ev(dk_E) / (2 * lambda);
        double dlam_phiE = -ev(dk_phiE) / (2 * lambda);

        Vec3 nee = ev(nEE);
        Vec3 pe = ev(phiE);
        rec.residuals.emplace_back(
            "nabla_E_E", detail::g_norm(gm, sub(nee, scale(dlam_phiE / (2 * lambda), pe))));
        Vec3 npp = ev(nPP);
        Vec3 e = ev(E);
        rec.residuals.emplace_back(
            "nabla_phiE_phiE",
            detail::g_norm(gm, sub(npp, scale(dlam_E / (2 * lambda), e))));

        rec.residuals.emplace_back("dmu_E", std::abs(ev(dmu_E) + 2 * dlam_E));
        rec.residuals.emplace_back("dmu_phiE", std::abs(ev(dmu_phiE) - 2 * dlam_phiE));
      });
}

// ---------------------------------------------------------------------------
// eta-Einstein
// ---------------------------------------------------------------------------

// Q X = lambda X + gamma eta(X) xi, solved exactly from the trace and the
// xi-component: lambda = (r - Ric(xi,xi))/2, gamma = Ric(xi,xi) - lambda.
// Returned as honest scalar fields so differentials can be taken.
inline std::pair<ScalarField, ScalarField> eta_einstein_fields(const ContactStructure& s) {
  const CurvatureBundle& b = s.bundle();
  VectorField qxi = b.ricci_operator()(s.xi);
  ScalarField ric_xi_xi = s.g.inner(qxi, s.xi);
  ScalarField lambda = (b.scalar_curvature() - ric_xi_xi) / 2.0;
  ScalarField gamma = ric_xi_xi - lambda;
  return {lambda, gamma};
}

inline EtaEinsteinFit fit_eta_einstein(const ContactStructure& s, Evaluator& ev) {
  const CurvatureBundle& b = s.bundle();
  Mat3 gm = ev(s.g);
  Mat3 q = ev(b.ricci_operator());
  Vec3 xi = ev(s.xi);
  Vec3 etav = ev(s.eta);
  double r = b.scalar_curvature().eval(ev.ctx);

  auto g_inner = [&gm](const Vec3& a, const Vec3& c) {
    double v = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) v += gm[i * 3 + j] * a[i] * c[j];
    return v;
  };

  EtaEinsteinFit fit;
  double ric_xx = g_inner(matvec(q, xi), xi);
  fit.lambda_ric = (r - ric_xx) / 2.0;
  fit.gamma = ric_xx - fit.lambda_ric;

  double worst = 0;
  for (int i = 0; i < 3; ++i) {
    Vec3 bv{0, 0, 0};
    bv[i] = 1;
    Vec3 model = add(scale(fit.lambda_ric, bv), scale(fit.gamma * etav[i], xi));
    worst = std::max(worst, detail::g_norm(gm, sub(matvec(q, bv), model)));
  }
  fit.residual = worst;
  return fit;
}

inline EtaEinsteinFit fit_eta_einstein(const ContactStructure& s, const Vec3& point) {
  Evaluator ev(point);
  return fit_eta_einstein(s, ev);
}

// (1-2n) d(lambda) = d(gamma) with n = 1, and both differentials annihilate
// xi. Optionally the 3-dimensional non-K-contact conclusion |lambda| = 0,
// d(gamma) = 0.
inline CheckReport check_eta_einstein_differentials(const ContactStructure& s,
                                                    const CheckParams& params = {},
                                                    bool include_constancy = false) {
  auto [lambda, gamma] = eta_einstein_fields(s);
  const CurvatureBundle& b = s.bundle();
  DiffCache dc;
  OneFormField dlam = exterior_derivative(lambda, dc);
  OneFormField dgam = exterior_derivative(gamma, dc);
  ScalarField dlam_xi = dlam(s.xi);
  ScalarField dgam_xi = dgam(s.xi);
  ScalarField trace_gap = ScalarField(3.0) * lambda + gamma - b.scalar_curvature();

  return detail::run_pointwise(
      "eta-einstein-differentials", s, params, [&, lambda = lambda](Evaluator& ev, const Mat3&, PointRecord& rec) {
        EtaEinsteinFit fit = fit_eta_einstein(s, ev);
        rec.residuals.emplace_back("fit_residual", fit.residual);
        Vec3 dl = ev(dlam);
        Vec3 dg = ev(dgam);
        double worst = 0;
        for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(-dl[i] - dg[i]));
        rec.residuals.emplace_back("eta-einstein-differentials", worst);
        rec.residuals.emplace_back("dlambda_xi", std::abs(ev(dlam_xi)));
        rec.residuals.emplace_back("dgamma_xi", std::abs(ev(dgam_xi)));
        rec.residuals.emplace_back("trace_identity", std::abs(ev(trace_gap)));
        if (include_constancy) {
          rec.residuals.emplace_back("lambda_ric_abs", std::abs(ev(lambda)));
          double dgmax = 0;
          for (int i = 0; i < 3; ++i) dgmax = std::max(dgmax, std::abs(dg[i]));
          rec.residuals.emplace_back("dgamma_abs", dgmax);
        }
      });
}

// ---------------------------------------------------------------------------
// Killing fields and automorphisms
// ---------------------------------------------------------------------------

// Reports, for a candidate Killing field Z:
//   killing     max |(L_Z g)_{ij}|
//   eta_bracket |eta([Z,xi])|        (must hold whenever Z is Killing)
//   bracket_xi  ||[Z,xi]||_g         (automorphism requires 0)
//   lie_eta     max |(L_Z eta)_i|
//   dlambda_Z, dgamma_Z              (integral invariants of Z)
// The gamma != 0 hypothesis status is recorded in provenance; the verdict
// enforces only the unconditional contract (Killing forces eta_bracket = 0)
// automorphism conclusions when the hypothesis holds.
inline CheckReport killing_and_automorphism(const ContactStructure& s, const VectorField& z,
                                            const CheckParams& params = {}) {
  DiffCache dc;
  SymTensorField lzg = lie_derivative_metric(z, s.g.sym(), dc);
  VectorField bracket = lie_bracket(z, s.xi, dc);
  ScalarField eta_bracket = s.eta(bracket);
  OneFormField lz_eta = lie_derivative_oneform(z, s.eta, dc);
  auto [lambda, gamma] = eta_einstein_fields(s);
  OneFormField dlam = exterior_derivative(lambda, dc);
  OneFormField dgam = exterior_derivative(gamma, dc);
  ScalarField dlam_z = dlam(z);
  ScalarField dgam_z = dgam(z);

  CheckReport rep = detail::run_pointwise(
      "killing-automorphism", s, params,
      [&, gamma = gamma](Evaluator& ev, const Mat3& gm, PointRecord& rec) {
        rec.residuals.emplace_back("killing", detail::mat_max_abs(ev(lzg)));
        rec.residuals.emplace_back("eta_bracket", std::abs(ev(eta_bracket)));
        rec.residuals.emplace_back("bracket_xi", detail::g_norm(gm, ev(bracket)));
        Vec3 le = ev(lz_eta);
        rec.residuals.emplace_back("lie_eta",
                                   std::max({std::abs(le[0]), std::abs(le[1]), std::abs(le[2])}));
        rec.residuals.emplace_back("dlambda_Z", std::abs(ev(dlam_z)));
        rec.residuals.emplace_back("dgamma_Z", std::abs(ev(dgam_z)));
        rec.residuals.emplace_back("gamma_abs", std::abs(ev(gamma)));
      });

  double max_by[7] = {0, 0, 0, 0, 0, 0, 0};
  double min_gamma = 1e300;
  for (const auto& rec : rep.points) {
    if (!rec.trusted) continue;
    for (int k = 0; k < 7; ++k)
      max_by[k] = std::max(max_by[k], std::abs(rec.residuals[k].second));
    min_gamma = std::min(min_gamma, std::abs(rec.residuals[6].second));
  }
  bool killing_ok = max_by[0] < params.tol;
  bool bracket_eta_ok = max_by[1] < params.tol;
  bool gamma_nonzero = min_gamma > 1e-6;
  bool automorphism_ok =
      max_by[2] < params.tol && max_by[3] < params.tol && max_by[4] < params.tol &&
      max_by[5] < params.tol;

  rep.note("killing_verdict", killing_ok ? "pass" : "fail");
  rep.note("eta_bracket_verdict", bracket_eta_ok ? "pass" : "fail");
  rep.note("gamma_nonzero_hypothesis", gamma_nonzero ? "holds" : "fails");
  rep.note("automorphism_verdict", automorphism_ok ? "pass" : "fail");

  bool ok = true;
  if (killing_ok && !bracket_eta_ok) ok = false;  // unconditional for Killing fields
  if (killing_ok && gamma_nonzero && !automorphism_ok) ok = false;
  rep.verdict = ok ? "pass" : "fail";
  return rep;
}

}  // namespace cmg::contactcore

namespace cmg {
using contactcore::check_contact_axioms;
using contactcore::check_full_kmu;
using contactcore::check_h_divergence;
using contactcore::check_k_contact;
using contactcore::check_kmu_structural;
using contactcore::check_kmu_differential_identities;
using contactcore::check_metric_positive;
using contactcore::check_eta_einstein_differentials;
using contactcore::check_q_formula_3d;
using contactcore::check_sasakian;
using contactcore::CheckParams;
using contactcore::ContactStructure;
using contactcore::EtaEinsteinFit;
using contactcore::eta_einstein_fields;
using contactcore::fit_eta_einstein;
using contactcore::fit_kappa_mu_jacobi;
using contactcore::frame_at;
using contactcore::h_eigenframe;
using contactcore::h_tensor;
using contactcore::HFrame;
using contactcore::killing_and_automorphism;
using contactcore::KmuFit;
using contactcore::reeb_field;
}  // namespace cmg
