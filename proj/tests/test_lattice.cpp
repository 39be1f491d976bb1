#include <cmath>

#include <doctest.h>

#include "support/test_configs.hpp"
#include "virial/bundle.hpp"
#include "virial/lattice.hpp"
#include "virial/parallel.hpp"
#include "virial/potential.hpp"

using namespace virial;
using testcfg::cd;

TEST_CASE("gauge group invariants") {
  CHECK_NOTHROW(GaugeGroup::u1().validate());
  CHECK_NOTHROW(GaugeGroup::su2().validate());

  GaugeGroup bad = GaugeGroup::su2();
  bad.structure[(0 * 3 + 1) * 3 + 2] = 1.0 + 1e-6;  // break antisymmetry
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = GaugeGroup::su2();
  bad.generators[1] = cd(0.5, 0.3);  // break Hermiticity
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  // Jacobi violation needs dim >= 5: two epsilon blocks sharing an index
  // stay totally antisymmetric but close on nothing
  GaugeGroup overlap;
  overlap.name = "custom";
  overlap.dim_adjoint = 5;
  overlap.n_rep = 1;
  overlap.structure.assign(125, 0.0);
  overlap.generators.assign(5, cd(0.0, 0.0));
  auto set_eps = [&](int a, int b, int c) {
    int perm[6][3] = {{a, b, c}, {b, c, a}, {c, a, b},
                      {b, a, c}, {a, c, b}, {c, b, a}};
    double sgn[6] = {1, 1, 1, -1, -1, -1};
    for (int k = 0; k < 6; ++k)
      overlap.structure[(perm[k][0] * 5 + perm[k][1]) * 5 + perm[k][2]] =
          sgn[k];
  };
  set_eps(0, 1, 2);
  set_eps(2, 3, 4);
  CHECK_THROWS_AS(overlap.validate(), std::invalid_argument);
}

TEST_CASE("covariant derivative: constants and uniform connections") {
  GridSpec grid{1.0, 8.0, 4, 12};
  const cd c0(0.7, -0.3);
  auto const_phi = [&](int, double, double, double, double) { return c0; };

  // A == 0: all derivatives vanish (stencil cancellation is exact up to
  // roundoff on constants)
  ScalarGaugeConfig cfg =
      testcfg::build_scalar(grid, GaugeGroup::u1(), const_phi, nullptr);
  for (int mu = 0; mu < 4; ++mu) {
    auto d = covariant_derivative(cfg, mu);
    double worst = 0.0;
    for (const cd& v : d) worst = std::max(worst, std::abs(v));
    CHECK(worst <= 1e-13);
  }

  // U(1) with constant A_0 = a0: D_0 phi = -i g a0 phi
  const double a0 = 0.85, g = 1.3;
  auto a_fn = [&](int mu, int, double, double, double, double) {
    return mu == 0 ? a0 : 0.0;
  };
  cfg = testcfg::build_scalar(grid, GaugeGroup::u1(g, 1.0), const_phi, a_fn);
  auto d0 = covariant_derivative(cfg, 0);
  cd expect = cd(0.0, -g * a0) * c0;
  for (const cd& v : d0) CHECK(std::abs(v - expect) <= 1e-12);
}

TEST_CASE("covariant derivative: e^{i omega t} mode converges at 4th order") {
  // phi = e^{-r^2} e^{i omega t}, omega = 2 pi / T: |D_0 phi| = omega e^{-r^2}
  auto run = [&](int n_t) {
    double period = 2.0 * M_PI;  // omega = 1
    ScalarGaugeConfig cfg = testcfg::stationary_profile_config(
        16, n_t, 8.0, period, [](double r) { return std::exp(-r * r); });
    auto d0 = covariant_derivative(cfg, 0);
    // origin lives at index n_x/2 on each axis
    int h = 8;
    double v = std::abs(d0[cfg.phi_index(0, h, h, h, 0)]);
    double f = std::exp(-3.0 * cfg.grid.coord(h) * cfg.grid.coord(h));
    return std::fabs(v / f - 1.0);
  };
  double e16 = run(16), e32 = run(32);
  CHECK(e16 <= 2e-3);
  CHECK(e16 / e32 >= 8.0);  // 4th order: ~16x
}

TEST_CASE("field strength: abelian pure gauge is flat") {
  // A_mu = d_mu chi for chi = exp(-r^2): A_0 = 0, A_i = -2 x_i chi;
  // F vanishes up to stencil truncation, shrinking at 4th order
  auto worst_f = [](int n_x) {
    GridSpec grid{1.0, 8.0, 4, n_x};
    auto zero_phi = [](int, double, double, double, double) -> cd {
      return {0.0, 0.0};
    };
    auto a_fn = [](int mu, int, double, double x, double y, double z) {
      if (mu == 0) return 0.0;
      double chi = std::exp(-(x * x + y * y + z * z));
      double xi = mu == 1 ? x : (mu == 2 ? y : z);
      return -2.0 * xi * chi;
    };
    ScalarGaugeConfig cfg =
        testcfg::build_scalar(grid, GaugeGroup::u1(), zero_phi, a_fn);
    double worst = 0.0;
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = mu + 1; nu < 4; ++nu) {
        auto f = field_strength(cfg, mu, nu);
        for (double v : f) worst = std::max(worst, std::fabs(v));
      }
    return worst;
  };
  double w24 = worst_f(24), w48 = worst_f(48);
  CHECK(w24 <= 2e-2);  // max |A| is ~0.86 here
  CHECK(w48 <= 2e-3);
  CHECK(w24 / w48 >= 8.0);
}

TEST_CASE("field strength: SU(2) constant commutator term") {
  GridSpec grid{1.0, 8.0, 4, 12};
  const double a = 0.6, b = -1.1, g = 0.9;
  auto zero_phi = [](int, double, double, double, double) -> cd {
    return {0.0, 0.0};
  };
  // A^1_1 = a, A^2_2 = b, everything else zero
  auto a_fn = [&](int mu, int ad, double, double, double, double) {
    if (mu == 1 && ad == 0) return a;
    if (mu == 2 && ad == 1) return b;
    return 0.0;
  };
  ScalarGaugeConfig cfg =
      testcfg::build_scalar(grid, GaugeGroup::su2(g), zero_phi, a_fn);
  auto f12 = field_strength(cfg, 1, 2);
  // F^3_{12} = g eps^{312} A^1_1 A^2_2 = g a b; derivative terms vanish
  std::size_t block = cfg.grid.sites();
  for (std::size_t i = 0; i < block; ++i) {
    CHECK(std::fabs(f12[0 * block + i]) <= 1e-12);
    CHECK(std::fabs(f12[1 * block + i]) <= 1e-12);
    CHECK(f12[2 * block + i] == doctest::Approx(g * a * b).epsilon(1e-12));
  }

  // antisymmetry is exact, diagonal identically zero
  auto f21 = field_strength(cfg, 2, 1);
  for (std::size_t i = 0; i < f12.size(); ++i) CHECK(f21[i] == -f12[i]);
  auto f11 = field_strength(cfg, 1, 1);
  for (double v : f11) CHECK(v == 0.0);
}

TEST_CASE("functionals: zero configuration") {
  GridSpec grid{1.0, 8.0, 4, 8};
  for (const char* pot : {"s^2", "-1*s*ln(1*s)"}) {
    ScalarGaugeConfig cfg =
        ScalarGaugeConfig::zeros(grid, GaugeGroup::u1(), true);
    FunctionalSet fns = compute_functionals(cfg, parse_potential(pot));
    CHECK(fns.pi0 == 0.0);
    CHECK(fns.pi1 == 0.0);
    CHECK(fns.piA0 == 0.0);
    CHECK(fns.piA1 == 0.0);
    CHECK(fns.int_v == 0.0);
    CHECK(fns.int_vp_s == 0.0);
  }
}

TEST_CASE("functionals: static Gaussian A_0") {
  // Pi_A0 = T/2 int |grad A_0|^2 = (3 pi / 4) sqrt(pi / 2), others 0.
  const double analytic = 0.75 * M_PI * std::sqrt(0.5 * M_PI);
  // independent radial quadrature oracle for the same integral
  double oracle = 0.5 * 4.0 * M_PI *
                  testcfg::simpson_radial(
                      [](double r) {
                        double da = -2.0 * r * std::exp(-r * r);
                        return r * r * da * da;
                      },
                      10.0, 20000);
  CHECK(oracle == doctest::Approx(analytic).epsilon(1e-10));

  ScalarGaugeConfig cfg = testcfg::gaussian_a0_config(48, 4, 16.0, 1.0);
  FunctionalSet fns = compute_functionals(cfg, parse_potential("s^2"));
  CHECK(fns.piA0 == doctest::Approx(analytic).epsilon(2e-2));
  CHECK(fns.pi0 == 0.0);
  CHECK(fns.pi1 == 0.0);
  CHECK(fns.piA1 <= 1e-20);
  CHECK(fns.int_v == 0.0);
}

TEST_CASE("functionals: stationary profile against the radial oracle") {
  // phi = f(r) e^{i omega t}, A = 0: Pi0 = T omega^2 int f^2,
  // Pi1 = T int |f'|^2
  const double period = 2.0 * M_PI;  // omega = 1
  auto f = [](double r) { return std::exp(-r * r); };
  ScalarGaugeConfig cfg =
      testcfg::stationary_profile_config(48, 16, 12.0, period, f);
  FunctionalSet fns = compute_functionals(cfg, parse_potential("s^2"));

  double int_f2 = 4.0 * M_PI *
                  testcfg::simpson_radial(
                      [&](double r) { return r * r * f(r) * f(r); }, 10.0,
                      20000);
  double int_df2 = 4.0 * M_PI *
                   testcfg::simpson_radial(
                       [&](double r) {
                         double df = -2.0 * r * f(r);
                         return r * r * df * df;
                       },
                       10.0, 20000);
  CHECK(fns.pi0 == doctest::Approx(period * int_f2).epsilon(5e-3));
  CHECK(fns.pi1 == doctest::Approx(period * int_df2).epsilon(2e-2));
  CHECK(fns.piA0 == 0.0);
  CHECK(fns.piA1 == 0.0);
}

TEST_CASE("decay check") {
  // Gaussian in a generous box passes
  ScalarGaugeConfig cfg = testcfg::stationary_profile_config(
      16, 16, 16.0, 2.0 * M_PI, [](double r) { return std::exp(-r * r); });
  DecayReport rep = check_decay(cfg);
  CHECK(rep.pass);
  CHECK(rep.phi_boundary_ratio <= 1e-12);

  // constant field fails with ratio 1
  GridSpec grid{1.0, 4.0, 4, 16};
  auto ones = [](int, double, double, double, double) -> cd {
    return {1.0, 0.0};
  };
  cfg = testcfg::build_scalar(grid, GaugeGroup::u1(), ones, nullptr);
  rep = check_decay(cfg);
  CHECK_FALSE(rep.pass);
  CHECK(rep.phi_boundary_ratio == doctest::Approx(1.0));

  // e^{-r^2/2} in a box of edge 4: the nearest face point sits at r ~ 2,
  // ratio ~ e^{-2}
  cfg = testcfg::stationary_profile_config(
      32, 16, 4.0, 2.0 * M_PI,
      [](double r) { return std::exp(-0.5 * r * r); });
  rep = check_decay(cfg, 1e-6);
  CHECK_FALSE(rep.pass);
  CHECK(rep.phi_boundary_ratio > 0.1);
  CHECK(rep.phi_boundary_ratio < 0.25);

  // compute_functionals enforces the decay invariant
  CHECK_THROWS_AS(compute_functionals(cfg, parse_potential("s^2")),
                  DecayViolation);
}

TEST_CASE("nonnegativity of the kinetic and gauge functionals") {
  GridSpec grid{1.7, 8.0, 6, 16};
  for (int i = 0; i < 100; ++i) {
    bool su2 = i % 4 == 0;
    ScalarGaugeConfig cfg = testcfg::random_scalar_config(
        0xabc000 + i, grid, su2 ? GaugeGroup::su2() : GaugeGroup::u1(),
        i % 2 == 0);
    FunctionalSet fns = compute_functionals(cfg, parse_potential("s^2"));
    CHECK(fns.pi0 >= 0.0);
    CHECK(fns.pi1 >= 0.0);
    CHECK(fns.piA0 >= 0.0);
    CHECK(fns.piA1 >= 0.0);
  }
}

TEST_CASE("U(1) gauge covariance up to discretization") {
  // phi -> e^{i g chi} phi, A -> A + d chi with analytic d chi changes the
  // functionals only through stencil error
  auto run = [&](int n_x) {
    GridSpec grid{2.0, 10.0, 8, n_x};
    GaugeGroup u1 = GaugeGroup::u1(0.8, 1.0);
    auto phi_fn = [&](int, double tf, double x, double y, double z) -> cd {
      double r2 = x * x + y * y + z * z;
      double env = std::exp(-r2);
      return cd(env * std::cos(2.0 * M_PI * tf + 0.3 * x),
                env * std::sin(2.0 * M_PI * tf) * 0.5);
    };
    auto a_fn = [](int mu, int, double tf, double x, double y, double z) {
      double env = std::exp(-(x * x + y * y + z * z));
      return 0.25 * env * std::cos(2.0 * M_PI * tf + 0.2 * (mu + 1) * y);
    };
    ScalarGaugeConfig base = testcfg::build_scalar(grid, u1, phi_fn, a_fn);

    // static chi: the time stencil factors out of e^{i g chi} exactly, so
    // the residual gauge dependence is pure spatial-stencil error
    const double c = 0.3, g = u1.coupling;
    auto chi = [&](double x, double y, double z) {
      return c * std::exp(-(x * x + y * y + z * z));
    };
    auto phi_t = [&](int cc, double tf, double x, double y, double z) -> cd {
      double ch = chi(x, y, z);
      return phi_fn(cc, tf, x, y, z) * cd(std::cos(g * ch), std::sin(g * ch));
    };
    auto a_t = [&](int mu, int ad, double tf, double x, double y, double z) {
      double dchi = 0.0;
      if (mu != 0) {
        double xi = mu == 1 ? x : (mu == 2 ? y : z);
        dchi = -2.0 * xi * chi(x, y, z);
      }
      return a_fn(mu, ad, tf, x, y, z) + dchi;
    };
    ScalarGaugeConfig gauged = testcfg::build_scalar(grid, u1, phi_t, a_t);

    FunctionalSet f0 = compute_functionals(base, parse_potential("s^2"));
    FunctionalSet f1 = compute_functionals(gauged, parse_potential("s^2"));
    double scale = f0.pi0 + f0.pi1 + f0.piA0 + f0.piA1;
    return (std::fabs(f0.pi0 - f1.pi0) + std::fabs(f0.pi1 - f1.pi1) +
            std::fabs(f0.piA0 - f1.piA0) + std::fabs(f0.piA1 - f1.piA1)) /
           scale;
  };
  double d24 = run(24), d48 = run(48);
  CHECK(d24 <= 2e-2);
  CHECK(d24 / d48 >= 3.0);  // at least 2nd order
}

TEST_CASE("SU(2) with an embedded abelian field reproduces U(1)") {
  GridSpec grid{1.3, 10.0, 6, 16};
  const double g = 1.1;
  auto psi = [](int, double tf, double x, double y, double z) -> cd {
    double env = std::exp(-(x * x + y * y + z * z));
    return cd(env * std::cos(2.0 * M_PI * tf + 0.4 * x),
              env * 0.7 * std::sin(2.0 * M_PI * tf + 0.1 * y));
  };
  auto a_u1 = [](int mu, int, double tf, double x, double y, double z) {
    double env = std::exp(-(x * x + y * y + z * z));
    return 0.3 * env * std::cos(2.0 * M_PI * tf + 0.2 * mu + 0.3 * z);
  };
  // U(1) with charge 1/2 (the T^3 eigenvalue of the upper component)
  ScalarGaugeConfig u1cfg = testcfg::build_scalar(
      grid, GaugeGroup::u1(g, 0.5), psi, a_u1);

  auto phi_su2 = [&](int c, double tf, double x, double y, double z) -> cd {
    return c == 0 ? psi(0, tf, x, y, z) : cd(0.0, 0.0);
  };
  auto a_su2 = [&](int mu, int ad, double tf, double x, double y, double z) {
    return ad == 2 ? a_u1(mu, 0, tf, x, y, z) : 0.0;
  };
  ScalarGaugeConfig su2cfg =
      testcfg::build_scalar(grid, GaugeGroup::su2(g), phi_su2, a_su2);

  FunctionalSet a = compute_functionals(u1cfg, parse_potential("s^2 - s"));
  FunctionalSet b = compute_functionals(su2cfg, parse_potential("s^2 - s"));
  CHECK(a.pi0 == doctest::Approx(b.pi0).epsilon(1e-12));
  CHECK(a.pi1 == doctest::Approx(b.pi1).epsilon(1e-12));
  CHECK(a.piA0 == doctest::Approx(b.piA0).epsilon(1e-12));
  CHECK(a.piA1 == doctest::Approx(b.piA1).epsilon(1e-12));
  CHECK(a.int_v == doctest::Approx(b.int_v).epsilon(1e-12));
  CHECK(a.int_vp_s == doctest::Approx(b.int_vp_s).epsilon(1e-12));
}

TEST_CASE("functionals are bit-stable across thread counts") {
  GridSpec grid{1.7, 8.0, 6, 16};
  ScalarGaugeConfig cfg =
      testcfg::random_scalar_config(0xdead01, grid, GaugeGroup::su2(), true);
  int saved = max_threads();
  set_max_threads(1);
  FunctionalSet f1 = compute_functionals(cfg, parse_potential("s^2 - s"));
  set_max_threads(4);
  FunctionalSet f4 = compute_functionals(cfg, parse_potential("s^2 - s"));
  set_max_threads(saved);
  CHECK(f1.pi0 == f4.pi0);
  CHECK(f1.pi1 == f4.pi1);
  CHECK(f1.piA0 == f4.piA0);
  CHECK(f1.piA1 == f4.piA1);
  CHECK(f1.int_v == f4.int_v);
  CHECK(f1.int_vp_s == f4.int_vp_s);
}

TEST_CASE("is_static") {
  GridSpec grid{1.0, 8.0, 4, 8};
  auto static_phi = [](int, double, double x, double y, double z) -> cd {
    return {std::exp(-(x * x + y * y + z * z)), 0.0};
  };
  ScalarGaugeConfig cfg =
      testcfg::build_scalar(grid, GaugeGroup::u1(), static_phi, nullptr);
  CHECK(is_static(cfg));
  auto moving = [](int, double tf, double x, double y, double z) -> cd {
    return {std::exp(-(x * x + y * y + z * z)) * std::cos(2 * M_PI * tf),
            0.0};
  };
  cfg = testcfg::build_scalar(grid, GaugeGroup::u1(), moving, nullptr);
  CHECK_FALSE(is_static(cfg));
}

TEST_CASE("bundle round trip is bit exact") {
  GridSpec grid{1.3, 8.0, 4, 8};
  ScalarGaugeConfig cfg =
      testcfg::random_scalar_config(0xfeed02, grid, GaugeGroup::su2(), true);
  std::string dir = "bundle_test_scalar";
  write_bundle(dir, cfg);
  auto content = read_bundle(dir);
  REQUIRE(std::holds_alternative<ScalarGaugeConfig>(content));
  const auto& back = std::get<ScalarGaugeConfig>(content);
  CHECK(back.grid.n_t == cfg.grid.n_t);
  CHECK(back.group.name == "su2");
  REQUIRE(back.phi.size() == cfg.phi.size());
  REQUIRE(back.a.size() == cfg.a.size());
  for (std::size_t i = 0; i < cfg.phi.size(); ++i)
    CHECK(back.phi[i] == cfg.phi[i]);
  for (std::size_t i = 0; i < cfg.a.size(); ++i) CHECK(back.a[i] == cfg.a[i]);

  // A == 0 bundles omit the gauge array
  ScalarGaugeConfig nogauge =
      testcfg::random_scalar_config(0xfeed03, grid, GaugeGroup::u1(), false);
  write_bundle("bundle_test_nogauge", nogauge);
  auto c2 = read_bundle("bundle_test_nogauge");
  CHECK(std::get<ScalarGaugeConfig>(c2).a_is_zero());

  VectorConfig vcfg =
      testcfg::random_vector_config(0xfeed04, grid, 0.7, 1.2, true);
  write_bundle("bundle_test_vector", vcfg);
  auto c3 = read_bundle("bundle_test_vector");
  REQUIRE(std::holds_alternative<VectorConfig>(c3));
  const auto& vb = std::get<VectorConfig>(c3);
  CHECK(vb.e_charge == vcfg.e_charge);
  CHECK(vb.mass_m == vcfg.mass_m);
  for (std::size_t i = 0; i < vcfg.w.size(); ++i) CHECK(vb.w[i] == vcfg.w[i]);

  CHECK_THROWS_AS(read_bundle("no_such_bundle_dir"), BundleError);
}
