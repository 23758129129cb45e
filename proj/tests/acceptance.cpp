// Acceptance suite: every criterion runs at its stated tolerance and prints
// one PASS/FAIL line. The process exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cmg/cmg.hpp"

using namespace cmg;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const char* text, bool pass, const std::string& detail = "") {
  std::printf("%s criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", id, text,
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++failures;
}

double max_named(const CheckReport& rep, const std::string& name) {
  double worst = 0;
  for (const auto& rec : rep.points)
    for (const auto& [n, v] : rec.residuals)
      if (n == name) worst = std::max(worst, std::abs(v));
  return worst;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

CheckParams params_with(const ContactStructure& s, int n, std::uint64_t seed = 7,
                        double tol = 1e-8) {
  CheckParams p;
  p.tol = tol;
  p.seed = seed;
  p.points = sample_points(s.domain, n, seed);
  return p;
}

// ---------------------------------------------------------------------------

void criterion1_universal_identities() {
  auto t0 = Clock::now();
  struct Case {
    std::string name;
    ContactStructure s;
  };
  std::vector<Case> cases;
  cases.push_back({"euclidean", model_flat_torus()});
  cases.push_back({"heisenberg", model_heisenberg_sasakian()});
  cases.push_back({"gf-derived-const", gf_structure("0.1", GfVariant::DefinitionDerived).structure});
  cases.push_back({"gf-derived-sin",
                   gf_structure("0.1*sin(2*z)", GfVariant::DefinitionDerived).structure});
  cases.push_back({"gf-half-const", gf_structure("0.1", GfVariant::HalfOffDiagonal).structure});
  cases.push_back({"gf-half-sin",
                   gf_structure("0.1*sin(2*z)", GfVariant::HalfOffDiagonal).structure});

  double worst = 0;
  std::string worst_at;
  SplitMix64 rng(99);
  for (const auto& c : cases) {
    const CurvatureBundle& b = c.s.bundle();
    auto pts = sample_points(c.s.domain, 210, 7);
    b.bianchi_residual_fields();
    for (const auto& p : pts) {
      double bi = contracted_bianchi_residual(b, p);
      VectorField X = VectorField::constant(rng.next_vec_sym());
      VectorField Y = VectorField::constant(rng.next_vec_sym());
      VectorField Z = VectorField::constant(rng.next_vec_sym());
      double pe = curvature_decomposition_residual(b, X, Y, Z, p);
      if (std::max(bi, pe) > worst) {
        worst = std::max(bi, pe);
        worst_at = c.name;
      }
    }
  }
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  bool pass = worst < 1e-7 && secs < 60.0;
  report(1, "universal identities (contracted Bianchi, dim-3 decomposition) < 1e-7", pass,
         "max " + fmt(worst) + " (" + worst_at + "), " + fmt(secs) + " s");
}

void criterion2_flat_torus() {
  ContactStructure s = model_flat_torus();
  CheckParams p = params_with(s, 500, 7, 1e-9);

  double worst = 0;
  auto rows = builtin_scenarios();
  Scenario frame_sc = find_scenario(rows, "flat-torus-frame-identities");
  BuiltStructure bs{s, {}, {}};
  for (const char* kind : {"frame-identities", "axioms", "flatness", "h-eigen", "kmu-jacobi-fit"}) {
    CheckSpec spec{kind, "pass"};
    CheckReport rep = dispatch_check(spec, frame_sc, bs, p);
    worst = std::max(worst, rep.summary().max);
  }
  report(2, "flat torus: frame identities, axioms, R = 0, hE = E, kappa = mu = 0 < 1e-9 at 500 points",
         worst < 1e-9, "max " + fmt(worst));
}

void criterion3_heisenberg() {
  ContactStructure s = model_heisenberg_sasakian();
  CheckParams p = params_with(s, 210, 7, 1e-8);

  CheckReport sas = check_sasakian(s, p);
  CheckReport kc = check_k_contact(s, p);
  bool pass = sas.passed() && kc.passed();
  double worst = std::max(sas.summary().max, kc.summary().max);

  // Q xi = 2 xi, r = -2, eta-Einstein fit (-2, 4) within 1e-7
  const CurvatureBundle& b = s.bundle();
  VectorField qxi_gap = b.ricci_operator()(s.xi) - ScalarField(2.0) * s.xi;
  double fit_worst = 0;
  for (const Vec3& pt : *p.points) {
    Evaluator ev(pt);
    fit_worst = std::max(fit_worst, norm(ev(qxi_gap)));
    fit_worst = std::max(fit_worst, std::abs(ev(b.scalar_curvature()) + 2.0));
    EtaEinsteinFit fit = fit_eta_einstein(s, ev);
    fit_worst = std::max(fit_worst, std::abs(fit.lambda_ric + 2.0));
    fit_worst = std::max(fit_worst, std::abs(fit.gamma - 4.0));
  }
  pass = pass && fit_worst < 1e-7;

  CheckReport q3 = check_q_formula_3d(s, ScalarField(1.0), ScalarField(0.0), p);
  pass = pass && q3.summary().max < 1e-8;
  report(3, "heisenberg: Sasakian, K-contact, Qxi = 2xi, r = -2, fit (-2,4), Q formula", pass,
         "classifier max " + fmt(worst) + ", fit max " + fmt(fit_worst) + ", eq3 max " +
             fmt(q3.summary().max));
}

void criterion4_homothety_suite() {
  ContactStructure heis = model_heisenberg_sasakian();
  bool pass = true;
  std::string detail;
  for (double a : {0.5, 1.0, 2.0, 3.0}) {
    ContactStructure bar = d_homothety(heis, a);
    CheckParams p = params_with(bar, 210, 7, 1e-7);
    CheckReport ax = check_contact_axioms(bar, p);
    if (!ax.passed()) {
      pass = false;
      detail += "axioms fail at a=" + fmt(a) + "; ";
    }
    auto [lb, gb] = ricci_transform_law(-2.0, a, 1);
    double worst = 0;
    for (const Vec3& pt : *p.points) {
      EtaEinsteinFit fit = fit_eta_einstein(bar, pt);
      worst = std::max(worst, std::abs(fit.lambda_ric - lb));
      worst = std::max(worst, std::abs(fit.gamma - gb));
      worst = std::max(worst, std::abs(fit.lambda_ric + 2.0));  // fixed point
    }
    if (worst >= 1e-7) {
      pass = false;
      detail += "law gap " + fmt(worst) + " at a=" + fmt(a) + "; ";
    }
  }
  // deformed Ricci identity for Z in {d/dx, xi}
  CheckParams hp = params_with(heis, 120, 7, 1e-7);
  for (double a : {0.5, 2.0}) {
    for (const char* which : {"dx", "xi"}) {
      VectorField z = std::string(which) == "dx" ? VectorField::basis(0) : heis.xi;
      CheckReport rep = check_ricci_z_identity(heis, z, a, hp);
      if (!(rep.verdict == "pass") || rep.summary().max >= 1e-7) {
        pass = false;
        detail += std::string("deformed-ricci ") + which + " a=" + fmt(a) + " verdict " + rep.verdict +
                  " max " + fmt(rep.summary().max) + "; ";
      }
    }
  }
  report(4, "D_a-homothety suite: axioms, transformation law, fixed point, deformed Ricci identity",
         pass, detail.empty() ? "all a in {1/2, 1, 2, 3}" : detail);
}

void criterion5_killing_suite() {
  ContactStructure torus = model_flat_torus();
  ContactStructure heis = model_heisenberg_sasakian();
  bool pass = true;
  std::string detail;

  struct Case {
    const ContactStructure* s;
    VectorField z;
    std::string name;
  };
  std::vector<Case> killing_cases;
  killing_cases.push_back({&torus, VectorField::basis(0), "torus dx"});
  killing_cases.push_back({&torus, VectorField::basis(2), "torus dz"});
  killing_cases.push_back({&heis, VectorField::basis(0), "heis dx"});
  killing_cases.push_back({&heis, heis.xi, "heis xi"});

  for (const auto& c : killing_cases) {
    CheckParams p = params_with(*c.s, 150, 7, 1e-8);
    CheckReport rep = killing_and_automorphism(*c.s, c.z, p);
    double killing = max_named(rep, "killing");
    double eta_bracket = max_named(rep, "eta_bracket");
    if (killing >= 1e-9) {
      pass = false;
      detail += c.name + " not Killing (" + fmt(killing) + "); ";
    }
    if (eta_bracket >= 1e-8) {
      pass = false;
      detail += c.name + " violates eta([Z,xi]) = 0 (" + fmt(eta_bracket) + "); ";
    }
  }

  // nonzero-gamma conclusion: heisenberg dx must be a full automorphism
  {
    CheckParams p = params_with(heis, 150, 7, 1e-8);
    CheckReport rep = killing_and_automorphism(heis, VectorField::basis(0), p);
    double worst = std::max({max_named(rep, "bracket_xi"), max_named(rep, "lie_eta"),
                             max_named(rep, "dlambda_Z"), max_named(rep, "dgamma_Z")});
    if (worst >= 1e-8 || !rep.passed()) {
      pass = false;
      detail += "heis dx automorphism gap " + fmt(worst) + "; ";
    }
  }

  // flat torus dz: Killing but not an automorphism, consistent with gamma = 0
  {
    CheckParams p = params_with(torus, 150, 7, 1e-8);
    CheckReport rep = killing_and_automorphism(torus, VectorField::basis(2), p);
    double bracket = max_named(rep, "bracket_xi");
    double gamma_abs = max_named(rep, "gamma_abs");
    if (!(bracket > 1.0)) {
      pass = false;
      detail += "torus dz bracket norm " + fmt(bracket) + " not > 1; ";
    }
    if (gamma_abs >= 1e-8) {
      pass = false;
      detail += "torus gamma " + fmt(gamma_abs) + " not 0; ";
    }
    if (!rep.passed()) {
      pass = false;
      detail += "torus dz contract violated; ";
    }
  }
  report(5, "Killing/automorphism suite: eta([Z,xi]) = 0 unconditional; automorphism when gamma != 0", pass,
         detail.empty() ? "4 Killing fields on 2 models" : detail);
}

void criterion6_nonkcontact_constancy() {
  ContactStructure torus = model_flat_torus();
  CheckParams p = params_with(torus, 300, 7, 1e-8);
  CheckReport rep = check_eta_einstein_differentials(torus, p, /*include_constancy=*/true);
  double lam = max_named(rep, "lambda_ric_abs");
  double dgam = max_named(rep, "dgamma_abs");
  bool pass = lam < 1e-8 && dgam < 1e-8;
  report(6, "non-K-contact eta-Einstein conclusion on the flat torus: |lambda|, |d gamma| < 1e-8",
         pass, "lambda " + fmt(lam) + ", dgamma " + fmt(dgam));
}

void criterion7_gf_suite() {
  bool pass = true;
  std::string detail;

  // f = 0 reproduces the flat structure exactly
  ContactStructure torus = model_flat_torus();
  for (GfVariant v : {GfVariant::PaperLiteral, GfVariant::DefinitionDerived,
                      GfVariant::HalfOffDiagonal}) {
    GfStructure gf = gf_structure("0", v);
    auto pts = sample_points(gf.structure.domain, 100, 7);
    double worst = 0;
    for (const auto& pt : pts) {
      Evaluator ea(pt), eb(pt);
      Mat3 ga = ea(gf.structure.g), gb = eb(torus.g);
      Mat3 pa = ea(gf.structure.phi), pb = eb(torus.phi);
      for (int k = 0; k < 9; ++k)
        worst = std::max({worst, std::abs(ga[k] - gb[k]), std::abs(pa[k] - pb[k])});
    }
    if (worst >= 1e-12) {
      pass = false;
      detail += std::string("f=0 mismatch ") + gf_variant_name(v) + " " + fmt(worst) + "; ";
    }
  }

  // defining relation for the derived solve
  for (const char* f : {"0.1", "0.1*sin(2*z)"}) {
    GfStructure gf = gf_structure(f, GfVariant::DefinitionDerived);
    TwoFormField deta = exterior_derivative(gf.structure.eta);
    EndoField compat;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        ScalarField gphi(0.0);
        for (int k = 0; k < 3; ++k)
          gphi = gphi + gf.structure.g.entry(i, k) * gf.structure.phi.entry(k, j);
        compat.entry(i, j) = deta.entry(i, j) - ScalarField(2.0) * gphi;
      }
    double worst = 0;
    for (const auto& pt : sample_points(gf.structure.domain, 100, 7)) {
      Evaluator ev(pt);
      Mat3 m = ev(compat);
      for (double x : m) worst = std::max(worst, std::abs(x));
    }
    if (worst >= 1e-10) {
      pass = false;
      detail += std::string("defining relation ") + f + " " + fmt(worst) + "; ";
    }
  }

  // per variant and profile: the four reports exist, the remark verdicts
  // hold, and the re-fit agrees with the closed forms at zeros of f
  for (GfVariant v : {GfVariant::PaperLiteral, GfVariant::DefinitionDerived,
                      GfVariant::HalfOffDiagonal}) {
    for (const char* f : {"0.1", "0.1*sin(2*z)"}) {
      GfStructure gf = gf_structure(f, v);
      CheckParams p = params_with(gf.structure, 210, 7, 1e-8);
      CheckReport ax = check_contact_axioms(gf.structure, p);
      CheckReport h = check_gf_h(gf, p);
      CheckReport prop = check_gf_proposition(gf, p);
      CheckReport rem = check_remark_condition(gf, p);
      if (ax.points.empty() || h.points.empty() || prop.points.empty() || rem.points.empty()) {
        pass = false;
        detail += "missing report; ";
      }
      bool constant_f = std::string(f) == "0.1";
      double rem_max = rem.summary().max;
      if (constant_f && rem_max >= 1e-8) {
        pass = false;
        detail += std::string("const-f remark ") + gf_variant_name(v) + " " + fmt(rem_max) + "; ";
      }
      if (!constant_f && rem_max <= 0.05) {
        pass = false;
        detail += std::string("nonconst remark ") + gf_variant_name(v) + " " + fmt(rem_max) +
                  " below floor; ";
      }
      // determinism of the emitted report
      std::ostringstream s1, s2;
      emit_report(prop, ReportFormat::JsonLines, s1);
      emit_report(prop, ReportFormat::JsonLines, s2);
      if (s1.str() != s2.str()) {
        pass = false;
        detail += "report emission nondeterministic; ";
      }
      if (!constant_f) {
        for (double z : {0.0, M_PI / 2}) {
          Evaluator ev({0.4, 0.9, z});
          KmuFit fit = fit_kappa_mu_jacobi(gf.structure, ev);
          if (std::abs(fit.kappa - gf_kappa_closed(0.0)) >= 1e-8 ||
              std::abs(fit.mu - gf_mu_closed(0.0)) >= 1e-8) {
            pass = false;
            detail += std::string("re-fit at zero of f off (") + gf_variant_name(v) + "); ";
          }
        }
      }
    }
  }
  report(7, "g^f suite: f = 0 exact, defining relation, per-variant reports, remark floors, zero re-fit",
         pass, detail.empty() ? "3 variants x {0.1, 0.1 sin 2z}" : detail);
}

void criterion8_oracle() {
  struct Case {
    std::string name;
    ContactStructure s;
  };
  std::vector<Case> cases;
  cases.push_back({"flat-torus", model_flat_torus()});
  cases.push_back({"heisenberg", model_heisenberg_sasakian()});
  cases.push_back({"heisenberg-da2", d_homothety(model_heisenberg_sasakian(), 2.0)});
  cases.push_back({"gf-derived-sin",
                   gf_structure("0.1*sin(2*z)", GfVariant::DefinitionDerived).structure});
  cases.push_back({"gf-half-sin",
                   gf_structure("0.1*sin(2*z)", GfVariant::HalfOffDiagonal).structure});
  double worst = 0;
  std::string worst_at;
  for (const auto& c : cases) {
    const CurvatureBundle& b = c.s.bundle();
    for (const auto& pt : sample_points(c.s.domain, 60, 7)) {
      double gap = christoffel_oracle_gap(b, pt, 1e-5);
      if (gap > worst) {
        worst = gap;
        worst_at = c.name;
      }
    }
  }
  report(8, "symbolic vs finite-difference Christoffel (step 1e-5) within 1e-6", worst < 1e-6,
         "max " + fmt(worst) + " (" + worst_at + ")");
}

void criterion9_determinism() {
#ifndef CMG_VERIFY_BIN
  report(9, "CLI determinism", false, "CMG_VERIFY_BIN not defined");
#else
  auto t0 = Clock::now();
  std::string bin = CMG_VERIFY_BIN;
  std::string out1 = "/tmp/cmg_acceptance_run1.jsonl";
  std::string out2 = "/tmp/cmg_acceptance_run2.jsonl";
  std::string cmd1 = bin + " run --all --seed 7 --format jsonl --out " + out1;
  std::string cmd2 = bin + " run --all --seed 7 --format jsonl --out " + out2;
  int rc1 = std::system(cmd1.c_str());
  int rc2 = std::system(cmd2.c_str());
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();

  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::string a = slurp(out1), b = slurp(out2);
  bool pass = rc1 == 0 && rc2 == 0 && !a.empty() && a == b && secs < 300.0;
  std::string detail = "exit codes " + std::to_string(rc1) + "/" + std::to_string(rc2) +
                       ", " + std::to_string(a.size()) + " bytes, " +
                       (a == b ? "byte-identical" : "DIFFER") + ", " + fmt(secs) + " s total";
  report(9, "run --all --seed 7 twice: byte-identical JSON-lines, suite under 5 minutes",
         pass, detail);
#endif
}

}  // namespace

int main() {
  auto t0 = Clock::now();
  criterion1_universal_identities();
  criterion2_flat_torus();
  criterion3_heisenberg();
  criterion4_homothety_suite();
  criterion5_killing_suite();
  criterion6_nonkcontact_constancy();
  criterion7_gf_suite();
  criterion8_oracle();
  criterion9_determinism();
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::printf("%s: %d criterion(s) failed, %.1f s\n", failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              failures, secs);
  return failures == 0 ? 0 : 1;
}
