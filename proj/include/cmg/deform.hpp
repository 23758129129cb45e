#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <utility>

#include "cmg/contact.hpp"
#include "cmg/parser.hpp"

namespace cmg::deformlab {

using contactcore::CheckParams;
using contactcore::ContactStructure;
using verify::CheckReport;
using verify::PointRecord;
using verify::SampleDomain;

// ---------------------------------------------------------------------------
// model structures
// ---------------------------------------------------------------------------

namespace detail {

inline ScalarField torus_field(const char* text) {
  return parse_expression(text).with_period(2, M_PI);
}

inline SampleDomain torus_domain() {
  SampleDomain d;
  d.bounds = {{{0.0, M_PI}, {0.0, M_PI}, {0.0, M_PI}}};
  d.periods = {M_PI, M_PI, M_PI};
  d.grid_dims = {8, 8, 16};
  return d;
}

}  // namespace detail

// Closed flat contact 3-torus in an explicit chart:
//   eta = cos(2z) dx + sin(2z) dy,  xi = cos(2z) d/dx + sin(2z) d/dy,
//   g euclidean, E = d/dz, phiE = sin(2z) d/dx - cos(2z) d/dy,
// all fields pi-periodic. The chart realization is validated by the bracket
// and parallelism identities, the contact metric axioms, R = 0 and hE = E.
inline ContactStructure model_flat_torus() {
  using detail::torus_field;
  OneFormField eta{torus_field("cos(2*z)"), torus_field("sin(2*z)"), ScalarField(0.0)};
  VectorField xi{torus_field("cos(2*z)"), torus_field("sin(2*z)"), ScalarField(0.0)};
  EndoField phi;
  phi.entry(2, 0) = torus_field("-sin(2*z)");
  phi.entry(2, 1) = torus_field("cos(2*z)");
  phi.entry(0, 2) = torus_field("sin(2*z)");
  phi.entry(1, 2) = torus_field("-cos(2*z)");

  ContactStructure s(eta, xi, phi, MetricField::euclidean(), detail::torus_domain());
  s.frame_E = VectorField{ScalarField(0.0), ScalarField(0.0), ScalarField(1.0)};
  s.frame_phiE = VectorField{torus_field("sin(2*z)"), torus_field("-cos(2*z)"),
                             ScalarField(0.0)};
  s.name = "flat-torus";
  return s;
}

// Sasakian testbed on the Heisenberg chart:
//   eta = (dz - y dx)/2, xi = 2 d/dz, g = (dx^2 + dy^2)/4 + eta (x) eta,
// phi derived from the compatibility relation.
inline ContactStructure model_heisenberg_sasakian() {
  OneFormField eta{parse_expression("-0.5*y"), ScalarField(0.0), ScalarField(0.5)};
  VectorField xi{ScalarField(0.0), ScalarField(0.0), ScalarField(2.0)};

  SymTensorField gs;
  gs.entry(0, 0) = parse_expression("0.25*(1+y^2)");
  gs.entry(0, 1) = ScalarField(0.0);
  gs.entry(0, 2) = parse_expression("-0.25*y");
  gs.entry(1, 1) = ScalarField(0.25);
  gs.entry(1, 2) = ScalarField(0.0);
  gs.entry(2, 2) = ScalarField(0.25);
  MetricField g(gs);

  EndoField phi = contactcore::derive_phi_from_compatibility(eta, g);

  SampleDomain d;
  d.bounds = {{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}};
  d.grid_dims = {8, 8, 16};

  ContactStructure s(eta, xi, phi, g, d);
  s.name = "heisenberg";
  return s;
}

// ---------------------------------------------------------------------------
// D_a-homothety
// ---------------------------------------------------------------------------

//   eta_bar = a eta, xi_bar = xi / a, phi_bar = phi,
//   g_bar = a g + a(a-1) eta (x) eta
// The eta scaling is pinned by the axiom checker: with eta_bar = eta/a the
// pairing eta_bar(xi_bar) = 1/a^2 != 1, so a*eta is the convention
// consistent with g_bar. Reports record the choice.
inline ContactStructure d_homothety(const ContactStructure& s, double a) {
  if (!(a > 0)) throw StructureError("d_homothety: a must be positive");

  // input must itself be a contact metric structure: cheap probe
  {
    CheckParams probe;
    probe.points = sample_points(s.domain, 8, 11);
    probe.tol = 1e-6;
    CheckReport ax = check_contact_axioms(s, probe);
    if (!ax.passed())
      throw StructureError("d_homothety: input fails the contact metric axioms");
  }

  ScalarField af(a);
  OneFormField eta_bar = af * s.eta;
  VectorField xi_bar = ScalarField(1.0 / a) * s.xi;
  SymTensorField g_bar = af * s.g.sym() + ScalarField(a * (a - 1.0)) * sym_product(s.eta, s.eta);

  ContactStructure out(eta_bar, xi_bar, s.phi, MetricField(g_bar), s.domain);
  if (s.frame_E) out.frame_E = ScalarField(1.0 / std::sqrt(a)) * (*s.frame_E);
  if (s.frame_phiE) out.frame_phiE = ScalarField(1.0 / std::sqrt(a)) * (*s.frame_phiE);
  out.name = s.name + "-Da";
  out.notes = s.notes;
  out.notes.emplace_back("d_homothety_a", std::to_string(a));
  out.notes.emplace_back("d_homothety_convention", "eta_bar = a*eta, xi_bar = xi/a");
  return out;
}

// lambda_bar = (lambda + 2 - 2a)/a, gamma_bar = 2n - lambda_bar
inline std::pair<double, double> ricci_transform_law(double lambda_ric, double a, int n) {
  if (!(a > 0)) throw StructureError("ricci_transform_law: a must be positive");
  double lambda_bar = (lambda_ric + 2.0 - 2.0 * a) / a;
  return {lambda_bar, 2.0 * n - lambda_bar};
}

// Ric_bar(Z,Z) = (lambda + 2 - 2a)[g(Z,Z) - eta(Z)^2] + 2 n a^2 eta(Z)^2
// on the deformed structure, for K-contact eta-Einstein input and Killing Z.
inline CheckReport check_ricci_z_identity(const ContactStructure& s, const VectorField& z,
                                          double a, const CheckParams& params = {}) {
  // hypotheses: K-contact, eta-Einstein, Z Killing
  {
    CheckParams hp = params;
    hp.points = params.points ? *params.points : sample_points(s.domain, 16, params.seed);
    CheckReport kc = check_k_contact(s, hp);
    if (!kc.passed()) {
      CheckReport rep = error_report("ricci-z-identity", "hypothesis failed: not K-contact");
      rep.verdict = "skipped";
      return rep;
    }
    DiffCache dc;
    SymTensorField lzg = lie_derivative_metric(z, s.g.sym(), dc);
    double worst_k = 0, worst_fit = 0;
    for (const Vec3& p : *hp.points) {
      Evaluator ev(p);
      worst_k = std::max(worst_k, contactcore::detail::mat_max_abs(ev(lzg)));
      worst_fit = std::max(worst_fit, fit_eta_einstein(s, ev).residual);
    }
    if (worst_fit >= hp.tol) {
      CheckReport rep = error_report("ricci-z-identity", "hypothesis failed: not eta-Einstein");
      rep.verdict = "skipped";
      return rep;
    }
    if (worst_k >= hp.tol) {
      CheckReport rep = error_report("ricci-z-identity", "hypothesis failed: Z not Killing");
      rep.verdict = "skipped";
      return rep;
    }
  }

  ContactStructure bar = d_homothety(s, a);
  const CurvatureBundle& bb = bar.bundle();
  auto [lambda, gamma] = eta_einstein_fields(s);
  ScalarField g_zz = s.g.inner(z, z);
  ScalarField eta_z = s.eta(z);
  const int n = 1;

  CheckReport rep = contactcore::detail::run_pointwise(
      "ricci-z-identity", s, params,
      [&, lambda = lambda](Evaluator& ev, const Mat3&, PointRecord& rec) {
        Vec3 zp = ev(z);
        double direct = 0;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            direct += bb.ricci_raw(i, j).eval(ev.ctx) * zp[i] * zp[j];
        double lam = ev(lambda);
        double gz = ev(g_zz);
        double ez = ev(eta_z);
        double formula = (lam + 2.0 - 2.0 * a) * (gz - ez * ez) + 2.0 * n * a * a * ez * ez;
        rec.residuals.emplace_back("deformed_ricci", direct - formula);
      });
  rep.note("a", std::to_string(a));
  return rep;
}

// ---------------------------------------------------------------------------
// g^f deformation of the flat torus
// ---------------------------------------------------------------------------

// The construction admits three readings that differ in the off-diagonal
// frame entry w = g^f(E, phiE) and in how phi^f is obtained. They do not
// close on each other beyond O(f^3), so all three are first-class and every
// report records which one produced it:
//   PaperLiteral      w = f^2, phi^f by the literal closed-form expressions
//   DefinitionDerived w = f^2, phi^f solved from d(eta) = 2 g^f(., phi^f .)
//   HalfOffDiagonal   w = f^2/2, phi^f solved the same way
enum class GfVariant { PaperLiteral, DefinitionDerived, HalfOffDiagonal };

inline const char* gf_variant_name(GfVariant v) {
  switch (v) {
    case GfVariant::PaperLiteral: return "paper-literal";
    case GfVariant::DefinitionDerived: return "derived";
    case GfVariant::HalfOffDiagonal: return "half-offdiag";
  }
  return "?";
}

inline GfVariant gf_variant_from_name(std::string_view name) {
  if (name == "paper-literal") return GfVariant::PaperLiteral;
  if (name == "derived") return GfVariant::DefinitionDerived;
  if (name == "half-offdiag") return GfVariant::HalfOffDiagonal;
  throw StructureError("unknown g^f variant '" + std::string(name) +
                       "' (expected paper-literal | derived | half-offdiag)");
}

// closed forms from the deformation proposition
inline double gf_kappa_closed(double f) { return (f - 0.5 * f * f) * (2.0 - f + 0.5 * f * f); }
inline double gf_mu_closed(double f) { return 2.0 * (f - 0.5 * f * f); }

struct GfStructure {
  ContactStructure structure;
  ScalarField f;
  GfVariant variant = GfVariant::DefinitionDerived;
};

inline GfStructure gf_structure(const ScalarField& f_in, GfVariant variant) {
  ContactStructure base = model_flat_torus();
  ScalarField f = f_in.with_period(2, M_PI);

  // admissibility on a dense 1-D z-grid: fiber invariance df(xi) = df(phiE) = 0
  // and, for the f^2 off-diagonal variants, 1 - (3/4) f^4 > 0
  {
    DiffCache dc;
    OneFormField df = exterior_derivative(f, dc);
    ScalarField df_xi = df(base.xi);
    ScalarField df_phiE = df(*base.frame_phiE);
    double fmax = 0, fiber = 0;
    for (int k = 0; k < 1024; ++k) {
      Vec3 p{0.37, 0.11, M_PI * k / 1024.0};
      Evaluator ev(p);
      fmax = std::max(fmax, std::abs(ev(f)));
      fiber = std::max({fiber, std::abs(ev(df_xi)), std::abs(ev(df_phiE))});
    }
    if (fiber > 1e-12)
      throw StructureError("gf_structure: f is not invariant along the fibers");
    if (variant != GfVariant::HalfOffDiagonal) {
      double bound = std::pow(4.0 / 3.0, 0.25) - 1e-6;
      if (!(fmax < bound))
        throw StructureError("gf_structure: |f| violates the positivity bound (4/3)^(1/4)");
    }
  }

  ScalarField A = ScalarField(1.0) + f + ScalarField(0.5) * f * f;
  ScalarField B = ScalarField(1.0) - f + ScalarField(0.5) * f * f;
  ScalarField w = (variant == GfVariant::HalfOffDiagonal ? ScalarField(0.5) : ScalarField(1.0)) *
                  f * f;

  // chart basis in the frame (xi, E, phiE): d/dx = c xi + s phiE,
  // d/dy = s xi - c phiE, d/dz = E
  ScalarField c = detail::torus_field("cos(2*z)");
  ScalarField s = detail::torus_field("sin(2*z)");
  ScalarField zero(0.0), one(1.0);
  const std::array<std::array<ScalarField, 3>, 3> coeff{{{c, zero, s},
                                                         {s, zero, -c},
                                                         {zero, one, zero}}};
  // frame metric
  std::array<std::array<ScalarField, 3>, 3> fm{{{one, zero, zero},
                                                {zero, A, w},
                                                {zero, w, B}}};

  SymTensorField gs;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      ScalarField sum(0.0);
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) sum = sum + coeff[i][p] * coeff[j][q] * fm[p][q];
      gs.entry(i, j) = sum;
    }
  MetricField gf(gs);

  // phi^f on the frame: phi^f xi = 0, phi^f E = alpha E + beta phiE,
  // phi^f phiE = alpha2 E + beta2 phiE
  ScalarField alpha, beta, alpha2, beta2;
  if (variant == GfVariant::PaperLiteral) {
    alpha = -(f * f);
    beta = A;
    alpha2 = -B;
    beta2 = f * f;
  } else {
    // exact 2x2 solve of d(eta)(X,Y) = 2 g^f(X, phi^f Y) on the frame
    ScalarField det = A * B - w * w;
    alpha = -w / det;
    beta = A / det;
    alpha2 = -B / det;
    beta2 = w / det;
  }

  const VectorField& E = *base.frame_E;
  const VectorField& phiE = *base.frame_phiE;
  std::array<VectorField, 3> image;  // of (xi, E, phiE), in chart components
  image[0] = VectorField{zero, zero, zero};
  image[1] = alpha * E + beta * phiE;
  image[2] = alpha2 * E + beta2 * phiE;

  EndoField phif;
  for (int j = 0; j < 3; ++j) {
    VectorField img = coeff[j][0] * image[0] + coeff[j][1] * image[1] + coeff[j][2] * image[2];
    for (int i = 0; i < 3; ++i) phif.entry(i, j) = img.c[i];
  }

  ContactStructure out(base.eta, base.xi, phif, gf, base.domain);
  out.frame_E = base.frame_E;
  out.frame_phiE = base.frame_phiE;
  out.name = std::string("gf-") + gf_variant_name(variant);
  out.notes.emplace_back("variant", gf_variant_name(variant));
  out.notes.emplace_back("f", f.to_string());
  out.notes.emplace_back("off_diagonal",
                         variant == GfVariant::HalfOffDiagonal ? "f^2/2" : "f^2");
  return {std::move(out), f, variant};
}

inline GfStructure gf_structure(std::string_view f_expr, GfVariant variant) {
  return gf_structure(parse_expression(f_expr), variant);
}

// residual of h^f phiE = -(1 - f + f^2/2) phiE with h^f = (1/2) L_xi phi^f
// recomputed from scratch
inline CheckReport check_gf_h(const GfStructure& gf, const CheckParams& params = {}) {
  const ContactStructure& s = gf.structure;
  ScalarField B = ScalarField(1.0) - gf.f + ScalarField(0.5) * gf.f * gf.f;
  VectorField lhs = s.h_tensor()(*s.frame_phiE) + B * (*s.frame_phiE);
  CheckReport rep = contactcore::detail::run_pointwise(
      "gf-h", s, params, [&](Evaluator& ev, const Mat3& gm, PointRecord& rec) {
        rec.residuals.emplace_back("hf_phiE",
                                   contactcore::detail::g_norm(gm, ev(lhs)));
      });
  return rep;
}

// R^f(X, xi) xi = kappa (X - eta(X) xi) + mu h^f X against the closed forms,
// with curvature from the Christoffel symbols of g^f; also re-fits
// (kappa, mu) pointwise and reports the gap to the closed forms.
inline CheckReport check_gf_proposition(const GfStructure& gf, const CheckParams& params = {}) {
  const ContactStructure& s = gf.structure;
  const CurvatureBundle& b = s.bundle();
  ScalarField kappa_cl(0.0), mu_cl(0.0);
  {
    const ScalarField& f = gf.f;
    kappa_cl = (f - ScalarField(0.5) * f * f) * (ScalarField(2.0) - f + ScalarField(0.5) * f * f);
    mu_cl = ScalarField(2.0) * (f - ScalarField(0.5) * f * f);
  }

  CheckReport rep = contactcore::detail::run_pointwise(
      "gf-proposition", s, params, [&](Evaluator& ev, const Mat3& gm, PointRecord& rec) {
        Vec3 xi = ev(s.xi);
        Vec3 etav = ev(s.eta);
        Mat3 h = ev(s.h_tensor());
        Mat3 jac = contactcore::detail::jacobi_matrix(b, ev, xi);
        double kap = ev(kappa_cl), muv = ev(mu_cl);

        Vec3 E = ev(*s.frame_E), phiE = ev(*s.frame_phiE);
        double worst = 0;
        for (const Vec3& X : {E, phiE, xi}) {
          double eta_x = etav[0] * X[0] + etav[1] * X[1] + etav[2] * X[2];
          Vec3 model = add(scale(kap, sub(X, scale(eta_x, xi))), scale(muv, matvec(h, X)));
          worst = std::max(worst,
                           contactcore::detail::g_norm(gm, sub(matvec(jac, X), model)));
        }
        rec.residuals.emplace_back("jacobi", worst);

        contactcore::KmuFit fit = fit_kappa_mu_jacobi(s, ev);
        rec.residuals.emplace_back("kappa_gap", fit.kappa - kap);
        rec.residuals.emplace_back("mu_gap",
                                   fit.mu_identifiable ? fit.mu - muv : 0.0);
        rec.residuals.emplace_back("fit_residual", fit.residual);
      });
  rep.note("kappa_closed_form", "(f-f^2/2)*(2-f+f^2/2)");
  rep.note("mu_closed_form", "2*(f-f^2/2)");
  return rep;
}

// chart-norm of R^f(phiE, phi^f phiE) xi, the necessary condition for a
// full (kappa,mu) structure; vanishes only for constant f
inline CheckReport check_remark_condition(const GfStructure& gf, const CheckParams& params = {}) {
  const ContactStructure& s = gf.structure;
  const CurvatureBundle& b = s.bundle();
  VectorField phif_phiE = s.phi(*s.frame_phiE);
  return contactcore::detail::run_pointwise(
      "gf-remark", s, params, [&](Evaluator& ev, const Mat3&, PointRecord& rec) {
        Vec3 lhs = riemann_at(b, ev, ev(*s.frame_phiE), ev(phif_phiE), ev(s.xi));
        rec.residuals.emplace_back("remark", norm(lhs));
      });
}

}  // namespace cmg::deformlab

namespace cmg {
using deformlab::check_gf_h;
using deformlab::check_gf_proposition;
using deformlab::check_remark_condition;
using deformlab::check_ricci_z_identity;
using deformlab::d_homothety;
using deformlab::gf_kappa_closed;
using deformlab::gf_mu_closed;
using deformlab::gf_structure;
using deformlab::gf_variant_from_name;
using deformlab::gf_variant_name;
using deformlab::GfStructure;
using deformlab::GfVariant;
using deformlab::model_flat_torus;
using deformlab::model_heisenberg_sasakian;
using deformlab::ricci_transform_law;
}  // namespace cmg
