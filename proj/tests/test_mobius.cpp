#include <doctest.h>

#include "bhc/families.hpp"
#include "support.hpp"

using namespace bhc;

namespace {

// J^T J for the Jacobian of T at x, by five-point differences.
Mat4 fd_metric(const MobiusTransform& T, const Point4& x) {
  const auto J = fd_jacobian4<4, 4>([&](const Point4& y) { return mobius_apply(T, y); }, x, 1e-4);
  Mat4 G;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t k = 0; k < 4; ++k) G(i, j) += J[k][i] * J[k][j];
  return G;
}

double sphere_mu(const Point4& y) { return 2.0 / (1.0 + norm2(y)); }

}  // namespace

TEST_CASE("orthogonality and validation") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const Mat4 Q = random_orthogonal(rng);
    CHECK(max_abs(transpose(Q) * Q - Mat4::identity()) < 1e-14);
  }
  Mat4 bad = Mat4::identity();
  bad(0, 1) = 1e-6;
  CHECK_THROWS_AS(MobiusTransform::make({}, {}, 1.0, bad, 0), std::invalid_argument);
  CHECK_THROWS_AS(MobiusTransform::make({}, {}, 1.0, Mat4::identity(), 1), std::invalid_argument);
  CHECK_THROWS_AS(MobiusTransform::make({}, {}, 0.0, Mat4::identity(), 0), std::invalid_argument);
}

TEST_CASE("transform literals round-trip exactly") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto T = random_mobius(rng, i % 2 ? 2 : 0);
    const auto U = MobiusTransform::parse(T.to_literal());
    CHECK(U.eps == T.eps);
    CHECK(U.alpha == T.alpha);
    CHECK(U.t_out == T.t_out);
    CHECK(U.t_in == T.t_in);
    CHECK(U.Q == T.Q);
    CHECK(U.to_literal() == T.to_literal());
  }
  const auto T = MobiusTransform::parse("eps=2 alpha=1.5 tout=0,0,0,0 tin=1,0,0,0 Q=identity");
  CHECK(T.eps == 2);
  CHECK(T.alpha == 1.5);
  CHECK(T.t_in == Vec4{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("malformed literals are rejected") {
  for (const char* s : {"", "eps=1", "eps=2 alpha=x", "eps=0 colour=red", "eps=0 tout=1,2,3", "eps=0 Q=1,0,0",
                        "eps=0 alpha=0", "eps=0 Q=2,0,0,0,0,1,0,0,0,0,1,0,0,0,0,1", "eps"}) {
    CAPTURE(s);
    CHECK_THROWS_AS(MobiusTransform::parse(s), std::invalid_argument);
  }
}

TEST_CASE("flat-flat factor is the Jacobian scale") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const auto T = random_mobius(rng, i % 2 ? 2 : 0);
    const auto lam = mobius_conformal_factor(T, MetricPairing::flat_flat());
    for (const auto& x : test::shell_points(5, 0.3, 3.0, 100 + i)) {
      if (norm(x - T.t_in) < 0.2) continue;
      const double l = lam(x);
      CHECK(max_abs(fd_metric(T, x) - (l * l) * Mat4::identity()) < 1e-7 * (1.0 + l * l));
    }
  }
}

TEST_CASE("composition closure") {
  // The flat factor of T2 o T1 is lambda2(T1 x) lambda1(x), and the composite is
  // again conformal with that factor.
  std::mt19937_64 rng(9);
  for (int i = 0; i < 10; ++i) {
    const auto T1 = random_mobius(rng, 2), T2 = random_mobius(rng, i % 2 ? 2 : 0);
    const auto l1 = mobius_conformal_factor(T1, MetricPairing::flat_flat());
    const auto l2 = mobius_conformal_factor(T2, MetricPairing::flat_flat());
    for (const auto& x : test::shell_points(5, 0.3, 3.0, 200 + i)) {
      if (norm(x - T1.t_in) < 0.2) continue;
      const Point4 y = mobius_apply(T1, x);
      if (norm(y - T2.t_in) < 0.2) continue;
      const double l = l2(y) * l1(x);
      const auto J = fd_jacobian4<4, 4>([&](const Point4& z) { return mobius_apply(T2, mobius_apply(T1, z)); }, x, 1e-5);
      Mat4 G;
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b)
          for (std::size_t k = 0; k < 4; ++k) G(a, b) += J[k][a] * J[k][b];
      CHECK(max_abs(G - (l * l) * Mat4::identity()) < 1e-6 * (1.0 + l * l));
    }
  }
}

TEST_CASE("pairing factors are built from the flat factor") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10; ++i) {
    const auto T = random_mobius(rng, i % 2 ? 2 : 0);
    const auto ff = mobius_conformal_factor(T, MetricPairing::flat_flat());
    const auto fs = mobius_conformal_factor(T, MetricPairing::flat_sphere());
    const auto sf = mobius_conformal_factor(T, MetricPairing::sphere_flat());
    const auto ss = mobius_conformal_factor(T, MetricPairing::sphere_sphere());
    for (const auto& x : test::shell_points(5, 0.3, 3.0, 300 + i)) {
      if (norm(x - T.t_in) < 0.2) continue;
      const double mu_out = sphere_mu(mobius_apply(T, x)), mu_in = sphere_mu(x);
      CHECK(fs(x) == doctest::Approx(ff(x) * mu_out).epsilon(1e-12));
      CHECK(sf(x) == doctest::Approx(ff(x) / mu_in).epsilon(1e-12));
      CHECK(ss(x) == doctest::Approx(ff(x) * mu_out / mu_in).epsilon(1e-12));
    }
  }
}

TEST_CASE("normal form matches the expanded flat-sphere factor") {
  std::mt19937_64 rng(13);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto T = random_mobius(rng, i % 2 ? 2 : 0);
    const auto nf = mobius_normal_form(T);
    const auto field = mobius_conformal_factor(T, MetricPairing::flat_sphere());
    CHECK(nf.delta > 0.0);
    for (const auto& x : test::shell_points(100, 0.0, 4.0, 400 + i)) {
      if (norm(x - T.t_in) < 1e-3) continue;
      worst = std::fmax(worst, std::fabs(nf(x) - flat_sphere_factor_expanded(T, x)));
      worst = std::fmax(worst, std::fabs(nf(x) - field(x)));
    }
  }
  CHECK(worst < 1e-10);
  CHECK_THROWS_AS(mobius_normal_form(MobiusTransform::identity(), MetricPairing::flat_flat()), UnsupportedError);
  // Identity: delta = 1, e = 0 gives 2/(1+|x|^2).
  const auto id = mobius_normal_form(MobiusTransform::identity());
  CHECK(id.delta == 1.0);
  CHECK(id.e == Vec4{});
}

TEST_CASE("sphere isometries") {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 10; ++i) {
    const int eps = i % 2 ? 2 : 0;
    const auto T = random_sphere_isometry(rng, eps);
    CHECK(is_sphere_isometry(T));
    const auto ss = mobius_conformal_factor(T, MetricPairing::sphere_sphere());
    for (const auto& x : test::shell_points(10, 0.0, 3.0, 500 + i)) {
      if (norm(x - T.t_in) < 0.1) continue;
      CHECK(ss(x) == doctest::Approx(1.0).epsilon(1e-10));
    }
    MobiusTransform P = T;
    P.alpha *= 1.01;
    CHECK_FALSE(is_sphere_isometry(P));
  }
  CHECK(is_sphere_isometry(MobiusTransform::identity()));
  CHECK(is_sphere_isometry(MobiusTransform::inversion()));
}

TEST_CASE("classification examples") {
  const auto check = [](const MobiusTransform& T, MetricPairing P, Classification expect) {
    const auto v = classify_mobius(T, P);
    CAPTURE(to_string(P));
    CAPTURE(v.reason);
    CHECK(v.classification == expect);
    CHECK(v.corroborated());
    if (v.classification == Classification::harmonic) CHECK(v.tension_max < 1e-8);
    if (v.classification == Classification::proper_biharmonic) {
      CHECK(v.bfo_sup < 1e-5);
      CHECK(v.tension_max > 0.0);
    }
    if (v.classification == Classification::not_biharmonic) CHECK(v.bfo_sup > 1e-2);
  };
  check(MobiusTransform::inversion(), MetricPairing::flat_flat(), Classification::proper_biharmonic);
  check(MobiusTransform::identity(), MetricPairing::flat_flat(), Classification::harmonic);
  check(MobiusTransform::identity(), MetricPairing::flat_sphere(), Classification::proper_biharmonic);
  check(MobiusTransform::identity(), MetricPairing::sphere_sphere(), Classification::harmonic);
  check(MobiusTransform::inversion(), MetricPairing::sphere_sphere(), Classification::harmonic);

  std::mt19937_64 rng(21);
  for (int i = 0; i < 4; ++i) {
    const int eps = i % 2 ? 2 : 0;
    const auto T = random_mobius(rng, eps);
    check(T, MetricPairing::flat_flat(), eps == 0 ? Classification::harmonic : Classification::proper_biharmonic);
    check(T, MetricPairing::flat_sphere(), Classification::proper_biharmonic);
    check(T, MetricPairing::sphere_flat(), Classification::not_biharmonic);
    auto iso = random_sphere_isometry(rng, eps);
    check(iso, MetricPairing::sphere_sphere(), Classification::harmonic);
    iso.alpha *= 1.01;
    check(iso, MetricPairing::sphere_sphere(), Classification::not_biharmonic);
  }
}

TEST_CASE("flat-sphere verdicts carry the normal form and A = -2") {
  std::mt19937_64 rng(25);
  const auto T = random_mobius(rng, 2);
  const auto v = classify_mobius(T, MetricPairing::flat_sphere());
  REQUIRE(v.normal_form.has_value());
  CHECK(v.normal_form->delta == mobius_normal_form(T).delta);
  REQUIRE(v.fit.has_value());
  CHECK(v.fit->value == doctest::Approx(-2.0).epsilon(1e-8));
}

TEST_CASE("pairing names") {
  for (const auto& P : kAllPairings) CHECK(parse_pairing(to_string(P)) == P);
  CHECK(to_string(MetricPairing::sphere_flat()) == "sphere-flat");
  CHECK_FALSE(parse_pairing("sphere-torus").has_value());
}
