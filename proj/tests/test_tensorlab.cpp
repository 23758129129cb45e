#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cmg/curvature.hpp"
#include "test_helpers.hpp"

using namespace cmg;
using namespace cmg_test;

namespace {

double vec_norm_at(Evaluator& ev, const VectorField& v) { return norm(ev(v)); }

double endo_max_at(Evaluator& ev, const EndoField& t) {
  Mat3 m = ev(t);
  double worst = 0;
  for (double x : m) worst = std::max(worst, std::abs(x));
  return worst;
}

double sym_max_at(Evaluator& ev, const SymTensorField& s) {
  Mat3 m = ev(s);
  double worst = 0;
  for (double x : m) worst = std::max(worst, std::abs(x));
  return worst;
}

}  // namespace

TEST_CASE("lie bracket basics") {
  CHECK(lie_bracket(VectorField::basis(0), VectorField::basis(1)).c[0].is_zero());

  SplitMix64 rng(1);
  VectorField x = {sf("x*y"), sf("sin(z)"), sf("exp(0.2*x)")};
  VectorField self = lie_bracket(x, x);
  for (auto& p : random_points(10, rng)) {
    Evaluator ev(p);
    CHECK(vec_norm_at(ev, self) < 1e-14);
  }

  // flat-torus frame bracket [xi, E] = 2 phiE, realized in the chart
  VectorField br = lie_bracket(torus_xi_raw(), torus_E_raw());
  VectorField expect = ScalarField(2.0) * torus_phiE_raw();
  for (auto& p : random_points(20, rng, M_PI)) {
    Evaluator ev(p);
    CHECK(norm(sub(ev(br), ev(expect))) < 1e-12);
  }
}

TEST_CASE("christoffel: euclidean vanishes, lower-index symmetry") {
  CurvatureBundle b(MetricField::euclidean());
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(b.christoffel(k, i, j).is_zero());

  CurvatureBundle h(heisenberg_metric_raw());
  SplitMix64 rng(2);
  for (auto& p : random_points(25, rng)) {
    Evaluator ev(p);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          CHECK(ev(h.christoffel(k, i, j)) == doctest::Approx(ev(h.christoffel(k, j, i))));
  }
}

TEST_CASE("metric compatibility on the heisenberg metric") {
  CurvatureBundle h(heisenberg_metric_raw());
  const auto& ng = h.nabla_metric_fields();
  SplitMix64 rng(3);
  for (auto& p : random_points(200, rng)) {
    Evaluator ev(p);
    for (const auto& f : ng) CHECK(std::abs(ev(f)) < 1e-10);
  }
}

TEST_CASE("inverse metric entries and their symbolic derivative") {
  MetricField g = heisenberg_metric_raw();
  SplitMix64 rng(4);
  for (auto& p : random_points(10, rng)) {
    // ginv * g = Id
    Evaluator ev(p);
    Mat3 gm = ev(g);
    Mat3 gi;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) gi[i * 3 + j] = ev(g.inverse_entry(i, j));
    Mat3 prod = matmul(gi, gm);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(prod[i * 3 + j] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));

    // d(ginv) via the lifted solve rule matches finite differences
    for (int axis = 0; axis < 3; ++axis) {
      ScalarField entry = g.inverse_entry(1, 1);
      double sym = entry.derivative(axis)(p);
      double fd = finite_difference_oracle(entry, p, axis, 1e-6);
      CHECK(std::abs(sym - fd) < 1e-7);
    }
  }
}

TEST_CASE("covariant derivative of vectors") {
  CurvatureBundle flat(MetricField::euclidean());

  // constant fields on euclidean space are parallel
  VectorField c = VectorField::constant({0.3, -1.2, 0.8});
  for (int i = 0; i < 3; ++i) {
    VectorField d = covariant_derivative_vector(flat, VectorField::basis(i), c);
    CHECK(d.c[0].is_zero());
    CHECK(d.c[1].is_zero());
    CHECK(d.c[2].is_zero());
  }

  // the torus frame field E = d/dz is parallel in every direction
  SplitMix64 rng(5);
  for (int i = 0; i < 3; ++i) {
    VectorField d = covariant_derivative_vector(flat, VectorField::basis(i), torus_E_raw());
    for (auto& p : random_points(5, rng, M_PI)) {
      Evaluator ev(p);
      CHECK(vec_norm_at(ev, d) < 1e-14);
    }
  }

  // Leibniz rule on the heisenberg bundle
  CurvatureBundle h(heisenberg_metric_raw());
  ScalarField f = sf("1+0.3*sin(y)+0.1*x");
  VectorField x = {sf("y"), sf("0.5"), sf("sin(x)")};
  VectorField y = {sf("cos(z)"), sf("x*y"), sf("1")};
  VectorField lhs = covariant_derivative_vector(h, x, f * y);
  DiffCache cache;
  ScalarField df_x = f.derivative(0, cache) * x.c[0] + f.derivative(1, cache) * x.c[1] +
                     f.derivative(2, cache) * x.c[2];
  VectorField rhs = df_x * y + f * covariant_derivative_vector(h, x, y);
  for (auto& p : random_points(30, rng)) {
    Evaluator ev(p);
    CHECK(norm(sub(ev(lhs), ev(rhs))) < 1e-10);
  }
}

TEST_CASE("covariant derivative of endomorphisms") {
  CurvatureBundle h(heisenberg_metric_raw());

  // identity is parallel
  SplitMix64 rng(6);
  VectorField x = {sf("y"), sf("1"), sf("sin(z)")};
  EndoField did = covariant_derivative_endo(h, x, EndoField::identity());
  for (auto& p : random_points(10, rng)) {
    Evaluator ev(p);
    CHECK(endo_max_at(ev, did) < 1e-14);
  }

  // Sasakian criterion on the heisenberg model:
  // (nabla_X phi) Y = g(X,Y) xi - eta(Y) X
  EndoField phi = heisenberg_phi_raw();
  OneFormField eta = heisenberg_eta_raw();
  VectorField xi = heisenberg_xi_raw();
  for (int rep = 0; rep < 6; ++rep) {
    VectorField X = random_constant_vector(rng);
    VectorField Y = random_constant_vector(rng);
    EndoField nphi = covariant_derivative_endo(h, X, phi);
    VectorField lhs = nphi(Y);
    VectorField rhs = h.metric().inner(X, Y) * xi - eta(Y) * X;
    for (auto& p : random_points(15, rng)) {
      Evaluator ev(p);
      CHECK(norm(sub(ev(lhs), ev(rhs))) < 1e-9);
    }
  }
}

TEST_CASE("riemann tensor") {
  CurvatureBundle flat(MetricField::euclidean());
  for (int l = 0; l < 3; ++l)
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(flat.riemann_component(l, k, i, j).is_zero());

  CurvatureBundle h(heisenberg_metric_raw());
  SplitMix64 rng(7);

  // antisymmetry in the first two slots
  for (int rep = 0; rep < 4; ++rep) {
    VectorField X = random_constant_vector(rng);
    VectorField Y = random_constant_vector(rng);
    VectorField Z = random_constant_vector(rng);
    VectorField sum = riemann(h, X, Y, Z) + riemann(h, Y, X, Z);
    for (auto& p : random_points(10, rng)) {
      Evaluator ev(p);
      CHECK(vec_norm_at(ev, sum) < 1e-10);
    }
  }

  // K-contact characterization on the Sasakian model: R(E, xi) xi = E
  VectorField E = {sf("0"), sf("2"), sf("0")};  // unit horizontal
  VectorField xi = heisenberg_xi_raw();
  VectorField rexx = riemann(h, E, xi, xi);
  for (auto& p : random_points(25, rng)) {
    Evaluator ev(p);
    CHECK(norm(sub(ev(rexx), ev(E))) < 1e-10);
  }
}

TEST_CASE("curvature symmetries at random samples") {
  CurvatureBundle h(heisenberg_metric_raw());
  SplitMix64 rng(8);
  for (int rep = 0; rep < 5; ++rep) {
    VectorField X = random_constant_vector(rng);
    VectorField Y = random_constant_vector(rng);
    VectorField Z = random_constant_vector(rng);
    VectorField W = random_constant_vector(rng);
    VectorField bianchi1 =
        riemann(h, X, Y, Z) + riemann(h, Y, Z, X) + riemann(h, Z, X, Y);
    ScalarField pair_sym = h.metric().inner(riemann(h, X, Y, Z), W) -
                           h.metric().inner(riemann(h, Z, W, X), Y);
    for (auto& p : random_points(10, rng)) {
      Evaluator ev(p);
      CHECK(vec_norm_at(ev, bianchi1) < 1e-9);
      CHECK(std::abs(ev(pair_sym)) < 1e-9);
    }
  }
}

TEST_CASE("ricci data") {
  CurvatureBundle flat(MetricField::euclidean());
  auto rd_flat = ricci(flat);
  CHECK(rd_flat.r.is_zero());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(rd_flat.q.entry(i, j).is_zero());

  CurvatureBundle h(heisenberg_metric_raw());
  auto rd = ricci(h);
  VectorField xi = heisenberg_xi_raw();
  VectorField qxi = rd.q(xi);
  VectorField expect = ScalarField(2.0) * xi;
  SplitMix64 rng(9);
  for (auto& p : random_points(100, rng)) {
    Evaluator ev(p);
    CHECK(std::abs(ev(rd.r) - (-2.0)) < 1e-9);
    CHECK(norm(sub(ev(qxi), ev(expect))) < 1e-9);
  }

  // Ricci symmetry from the raw (unsymmetrized) components
  for (auto& p : random_points(20, rng)) {
    Evaluator ev(p);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        CHECK(std::abs(ev.ctx.point[0] * 0 + h.ricci_raw(i, j).eval(ev.ctx) -
                       h.ricci_raw(j, i).eval(ev.ctx)) < 1e-10);
  }
}

TEST_CASE("contracted bianchi residual") {
  CurvatureBundle flat(MetricField::euclidean());
  CHECK(contracted_bianchi_residual(flat, {0.2, 0.5, -0.7}) == 0.0);

  CurvatureBundle h(heisenberg_metric_raw());
  SplitMix64 rng(10);
  for (auto& p : random_points(200, rng)) CHECK(contracted_bianchi_residual(h, p) < 1e-8);
}

TEST_CASE("curvature decomposition identity in dimension 3") {
  CurvatureBundle flat(MetricField::euclidean());
  SplitMix64 rng(11);
  VectorField X = random_constant_vector(rng);
  VectorField Y = random_constant_vector(rng);
  VectorField Z = random_constant_vector(rng);
  CHECK(curvature_decomposition_residual(flat, X, Y, Z, {0.1, 0.2, 0.3}) == 0.0);

  CurvatureBundle h(heisenberg_metric_raw());
  for (int rep = 0; rep < 5; ++rep) {
    VectorField A = random_constant_vector(rng);
    VectorField B = random_constant_vector(rng);
    VectorField C = random_constant_vector(rng);
    for (auto& p : random_points(20, rng)) CHECK(curvature_decomposition_residual(h, A, B, C, p) < 1e-8);
  }
}

TEST_CASE("lie derivative of the metric") {
  // translations are Killing for the euclidean metric
  MetricField flat = MetricField::euclidean();
  SymTensorField lt = lie_derivative_metric(VectorField::basis(0), flat);
  for (int k = 0; k < 6; ++k) CHECK(lt.c[k].is_zero());

  // d/dx is Killing for the heisenberg metric (components depend on y only)
  MetricField h = heisenberg_metric_raw();
  SymTensorField lh = lie_derivative_metric(VectorField::basis(0), h);
  SplitMix64 rng(12);
  for (auto& p : random_points(30, rng)) {
    Evaluator ev(p);
    CHECK(sym_max_at(ev, lh) < 1e-12);
  }

  // the dilation x d/dx is not Killing: L_Z g = 2 dx (x) dx
  VectorField dil = {sf("x"), sf("0"), sf("0")};
  SymTensorField ld = lie_derivative_metric(dil, flat);
  Evaluator ev({0.4, -0.2, 0.9});
  Mat3 m = ev(ld);
  CHECK(m[0] == doctest::Approx(2.0));
  for (int k = 1; k < 9; ++k) CHECK(m[k] == doctest::Approx(0.0));
}

TEST_CASE("lie derivative of endomorphisms") {
  SplitMix64 rng(13);
  VectorField z = {sf("x*y"), sf("sin(z)"), sf("1")};
  EndoField lid = lie_derivative_endo(z, EndoField::identity());
  for (auto& p : random_points(10, rng)) {
    Evaluator ev(p);
    CHECK(endo_max_at(ev, lid) < 1e-14);
  }

  // h = (1/2) L_xi phi on the flat torus maps E to E
  EndoField h_torus = ScalarField(0.5) * lie_derivative_endo(torus_xi_raw(), torus_phi_raw());
  VectorField hE = h_torus(torus_E_raw());
  VectorField E = torus_E_raw();
  for (auto& p : random_points(20, rng, M_PI)) {
    Evaluator ev(p);
    CHECK(norm(sub(ev(hE), ev(E))) < 1e-12);
  }

  // K-contact: h vanishes identically on the heisenberg model
  EndoField h_heis =
      ScalarField(0.5) * lie_derivative_endo(heisenberg_xi_raw(), heisenberg_phi_raw());
  for (auto& p : random_points(20, rng)) {
    Evaluator ev(p);
    CHECK(endo_max_at(ev, h_heis) < 1e-13);
  }
}

TEST_CASE("gradient") {
  CurvatureBundle flat(MetricField::euclidean());
  VectorField gx = gradient(flat, sf("x"));
  Evaluator ev({1.0, 2.0, 3.0});
  CHECK(norm(sub(ev(gx), Vec3{1, 0, 0})) < 1e-15);

  // defining property on the heisenberg metric: g(grad r, X) = dr(X)
  CurvatureBundle h(heisenberg_metric_raw());
  ScalarField r = h.scalar_curvature();
  VectorField grad_r = gradient(h, r);
  SplitMix64 rng(14);
  for (int rep = 0; rep < 5; ++rep) {
    VectorField X = random_constant_vector(rng);
    DiffCache cache;
    OneFormField dr = exterior_derivative(r, cache);
    ScalarField gap = h.metric().inner(grad_r, X) - dr(X);
    for (auto& p : random_points(10, rng)) {
      Evaluator e2(p);
      CHECK(std::abs(e2(gap)) < 1e-10);
    }
  }

  // scalar curvature of the flat torus metric is identically zero
  CurvatureBundle torus(MetricField::euclidean());
  VectorField gr = gradient(torus, torus.scalar_curvature());
  CHECK(gr.c[0].is_zero());
  CHECK(gr.c[1].is_zero());
  CHECK(gr.c[2].is_zero());
}

TEST_CASE("christoffel symbols against the finite-difference oracle") {
  CurvatureBundle flat(MetricField::euclidean());
  CurvatureBundle h(heisenberg_metric_raw());
  SplitMix64 rng(15);
  for (auto& p : random_points(40, rng)) {
    CHECK(christoffel_oracle_gap(flat, p, 1e-5) < 1e-6);
    CHECK(christoffel_oracle_gap(h, p, 1e-5) < 1e-6);
  }
}

TEST_CASE("riemann operator agrees with the covariant-derivative combination") {
  // for vector *fields* the tensorial contraction equals
  // nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
  CurvatureBundle h(heisenberg_metric_raw());
  VectorField X = {sf("y"), sf("0.3"), sf("sin(z)")};
  VectorField Y = {sf("1"), sf("x"), sf("0")};
  VectorField Z = {sf("0.5*y"), sf("cos(x)"), sf("1")};
  VectorField direct =
      covariant_derivative_vector(h, X, covariant_derivative_vector(h, Y, Z)) -
      covariant_derivative_vector(h, Y, covariant_derivative_vector(h, X, Z)) -
      covariant_derivative_vector(h, lie_bracket(X, Y), Z);
  VectorField contracted = riemann(h, X, Y, Z);
  SplitMix64 rng(16);
  for (auto& p : random_points(15, rng)) {
    Evaluator ev(p);
    CHECK(norm(sub(ev(direct), ev(contracted))) < 1e-9);
  }
}
