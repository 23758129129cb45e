// Small tour of the library: build the Sasakian Heisenberg model, compute
// its curvature from first principles and print the classifying data.

#include <cstdio>

#include "cmg/cmg.hpp"

int main() {
  using namespace cmg;

  ContactStructure s = model_heisenberg_sasakian();
  const CurvatureBundle& bundle = s.bundle();

  Vec3 p{0.3, -0.4, 0.7};
  Evaluator ev(p);

  std::printf("Heisenberg model at (%.1f, %.1f, %.1f)\n", p[0], p[1], p[2]);
  std::printf("  scalar curvature r      = %.12f\n", ev(bundle.scalar_curvature()));

  KmuFit kmu = fit_kappa_mu_jacobi(s, p);
  std::printf("  Jacobi fit kappa        = %.12f  (mu %s)\n", kmu.kappa,
              kmu.mu_identifiable ? "identifiable" : "unidentifiable: h = 0");

  EtaEinsteinFit ee = fit_eta_einstein(s, p);
  std::printf("  eta-Einstein (lambda,gamma) = (%.9f, %.9f), residual %.2e\n",
              ee.lambda_ric, ee.gamma, ee.residual);

  std::printf("  contracted Bianchi residual = %.2e\n",
              contracted_bianchi_residual(bundle, p));

  // deform it: the lambda = -2 structure is a fixed point of the homothety
  for (double a : {0.5, 2.0}) {
    ContactStructure bar = d_homothety(s, a);
    EtaEinsteinFit fit = fit_eta_einstein(bar, p);
    std::printf("  D_a-homothety a=%.1f  ->  (lambda,gamma) = (%.9f, %.9f)\n", a,
                fit.lambda_ric, fit.gamma);
  }

  // and measure the g^f deformation of the flat torus
  GfStructure gf = gf_structure("0.1*sin(2*z)", GfVariant::HalfOffDiagonal);
  KmuFit fit = fit_kappa_mu_jacobi(gf.structure, Vec3{0.1, 0.2, 0.9});
  double f = gf.f(Vec3{0.1, 0.2, 0.9});
  std::printf("\ng^f deformation (half-offdiag), f = 0.1 sin(2z) at z = 0.9:\n");
  std::printf("  fitted kappa = %.12f   closed form = %.12f\n", fit.kappa,
              gf_kappa_closed(f));
  std::printf("  fitted mu    = %.12f   closed form = %.12f\n", fit.mu, gf_mu_closed(f));
  return 0;
}
