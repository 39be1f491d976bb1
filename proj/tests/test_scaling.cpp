#include <cmath>
#include <random>

#include <doctest.h>

#include "support/test_configs.hpp"
#include "virial/scaling.hpp"

using namespace virial;
using testcfg::cd;

namespace {

ScalarGaugeConfig narrow_test_config(std::uint64_t seed, bool with_gauge) {
  // tighter envelope than the generic random config so that literal
  // rescalings with lambda < 1 keep the boundary shell quiet
  GridSpec grid{2.0, 10.0, 8, 24};
  std::mt19937_64 rng(seed);
  auto modes_re = testcfg::random_modes(rng, 3, 0.5);
  auto modes_im = testcfg::random_modes(rng, 3, 0.5);
  std::vector<std::vector<testcfg::Mode>> gauge;
  for (int j = 0; j < 4; ++j)
    gauge.push_back(testcfg::random_modes(rng, 2, 0.4));
  auto phi_fn = [=](int, double tf, double x, double y, double z) -> cd {
    double env = std::exp(-1.5 * (x * x + y * y + z * z));
    return cd(env * testcfg::eval_modes(modes_re, tf, x, y, z),
              env * testcfg::eval_modes(modes_im, tf, x, y, z));
  };
  std::function<double(int, int, double, double, double, double)> a_fn;
  if (with_gauge)
    a_fn = [=](int mu, int, double tf, double x, double y, double z) {
      double env = std::exp(-1.5 * (x * x + y * y + z * z));
      return env * testcfg::eval_modes(gauge[mu], tf, x, y, z);
    };
  return testcfg::build_scalar(grid, GaugeGroup::u1(), phi_fn, a_fn);
}

}  // namespace

TEST_CASE("scaled action: identity scaling reproduces the action") {
  ScalarGaugeConfig cfg = narrow_test_config(0x11, true);
  PotentialExpr v = parse_potential("s^2 - s");
  FunctionalSet fns = compute_functionals(cfg, v);
  double s1 = scaled_action(fns, v, cfg, 1.2, 1.0);
  CHECK(s1 == action_value(fns));  // bit-for-bit shared reduction path
}

TEST_CASE("scaled action: zero configuration") {
  GridSpec grid{1.0, 8.0, 4, 8};
  ScalarGaugeConfig cfg =
      ScalarGaugeConfig::zeros(grid, GaugeGroup::u1(), false);
  PotentialExpr v = parse_potential("s^2");
  FunctionalSet fns = compute_functionals(cfg, v);
  for (double l : {0.5, 0.8, 1.0, 1.7})
    CHECK(scaled_action(fns, v, cfg, 0.75, l) == 0.0);
}

TEST_CASE("scaled action: V = s^2 at gamma = 3/4 has a flat potential term") {
  // lambda^{-3} int V(lambda^{2 gamma} s) = lambda^{4 gamma - 3} int V = int V
  ScalarGaugeConfig cfg = narrow_test_config(0x12, false);
  PotentialExpr v = parse_potential("s^2");
  FunctionalSet fns = compute_functionals(cfg, v);
  for (double l : {0.5, 1.0, 2.0}) {
    double pot_term = std::pow(l, -3.0) *
                      integrate_potential(cfg, v, std::pow(l, 1.5));
    CHECK(pot_term == doctest::Approx(fns.int_v).epsilon(1e-12));
  }
}

TEST_CASE("virial derivative: zero configuration and strict negativity") {
  GridSpec grid{1.0, 8.0, 4, 8};
  ScalarGaugeConfig zero =
      ScalarGaugeConfig::zeros(grid, GaugeGroup::u1(), false);
  FunctionalSet fz = compute_functionals(zero, parse_potential("s^2"));
  CHECK(virial_derivative(fz, 1.0) == 0.0);

  // random nontrivial config under V = s^2: every term <= 0, Pi1 term < 0
  ScalarGaugeConfig cfg = narrow_test_config(0x13, true);
  FunctionalSet fns = compute_functionals(cfg, parse_potential("s^2"));
  VirialTerms t = virial_terms(fns, 1.0);
  CHECK(t.pi0_term <= 0.0);
  CHECK(t.pi1_term < 0.0);
  CHECK(t.pot_term <= 0.0);
  CHECK(t.piA0_term <= 0.0);
  CHECK(t.piA1_term <= 0.0);
  CHECK(t.sum() < 0.0);
}

TEST_CASE("virial terms: sign property for NoGo potentials on random configs") {
  std::mt19937_64 rng(0x5eed100);
  std::uniform_real_distribution<double> gdist(0.5 + 1e-6, 1.5);
  GridSpec grid{1.3, 8.0, 6, 16};
  for (int i = 0; i < 40; ++i) {
    ScalarGaugeConfig cfg = testcfg::random_scalar_config(
        0x5100 + i, grid, GaugeGroup::u1(), i % 2 == 0);
    FunctionalSet fns = compute_functionals(cfg, parse_potential("s^2"));
    double g = gdist(rng);
    VirialTerms t = virial_terms(fns, g);
    CHECK(t.pi0_term <= 0.0);
    CHECK(t.pi1_term <= 0.0);
    CHECK(t.piA0_term <= 0.0);
    CHECK(t.piA1_term <= 0.0);
    if (g >= 0.75) CHECK(t.pot_term <= 1e-12 * t.scale());
    if (g >= 0.75) CHECK(t.sum() <= 1e-12 * t.scale());
  }
}

TEST_CASE("virial derivative is linear in the functional entries") {
  std::mt19937_64 rng(0x5eed101);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    FunctionalSet f{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    FunctionalSet g{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    double a = coef(rng), b = coef(rng), gamma = 0.5 + u(rng) / 3.0;
    FunctionalSet mix{a * f.pi0 + b * g.pi0,   a * f.pi1 + b * g.pi1,
                      a * f.piA0 + b * g.piA0, a * f.piA1 + b * g.piA1,
                      a * f.int_v + b * g.int_v,
                      a * f.int_vp_s + b * g.int_vp_s};
    double lhs = virial_derivative(mix, gamma);
    double rhs = a * virial_derivative(f, gamma) +
                 b * virial_derivative(g, gamma);
    CHECK(std::fabs(lhs - rhs) <=
          1e-12 * std::max(1.0, std::max(std::fabs(lhs), std::fabs(rhs))));
  }
}

TEST_CASE("finite-difference consistency of the closed form") {
  ScalarGaugeConfig cfg = narrow_test_config(0x14, true);
  PotentialExpr v = parse_potential("s^2");
  FdConsistency fd = finite_difference_consistency(cfg, v, 1.0, 1e-3);
  CHECK(fd.rel_err <= 1e-5);
  FdConsistency fd2 = finite_difference_consistency(cfg, v, 1.0, 5e-4);
  double ratio = fd.rel_err / fd2.rel_err;
  CHECK(ratio >= 3.0);
  CHECK(ratio <= 5.0);

  // zero config: both derivatives vanish
  GridSpec grid{1.0, 8.0, 4, 8};
  ScalarGaugeConfig zero =
      ScalarGaugeConfig::zeros(grid, GaugeGroup::u1(), false);
  FdConsistency fz = finite_difference_consistency(zero, v, 1.0, 1e-3);
  CHECK(fz.ds_closed == 0.0);
  CHECK(fz.ds_fd == 0.0);
}

TEST_CASE("literal rescaling reproduces the closed form within O(dx^2)") {
  auto mismatch = [](int n_x, double lambda) {
    GridSpec grid{2.0, 10.0, 8, n_x};
    auto phi_fn = [](int, double tf, double x, double y, double z) -> cd {
      double env = std::exp(-1.5 * (x * x + y * y + z * z));
      return cd(env * std::cos(2.0 * M_PI * tf + 0.4 * x),
                env * 0.6 * std::sin(2.0 * M_PI * tf + 0.2 * y));
    };
    auto a_fn = [](int mu, int, double tf, double x, double y, double z) {
      double env = std::exp(-1.5 * (x * x + y * y + z * z));
      return 0.3 * env * std::cos(2.0 * M_PI * tf + 0.1 * (mu + 1) * z);
    };
    ScalarGaugeConfig cfg =
        testcfg::build_scalar(grid, GaugeGroup::u1(), phi_fn, a_fn);
    PotentialExpr v = parse_potential("s^2 - 0.5*s");
    FunctionalSet fns = compute_functionals(cfg, v);
    const double gamma = 1.0;
    double closed = scaled_action(fns, v, cfg, gamma, lambda);
    ScalarGaugeConfig lit = rescale_config(cfg, lambda, gamma);
    double literal = action_value(compute_functionals(lit, v));
    double scale = std::fabs(fns.pi0) + std::fabs(fns.pi1) +
                   std::fabs(fns.piA0) + std::fabs(fns.piA1) +
                   std::fabs(fns.int_v);
    return std::fabs(closed - literal) / scale;
  };
  // interpolation-error envelope: |S_lit - S_closed| / scale <= C dx^2
  // (measured C ~ 0.33 on this family), and decreasing with resolution
  const double c_bound = 0.5;
  for (double lambda : {0.8, 1.25}) {
    double m24 = mismatch(24, lambda);
    double m64 = mismatch(64, lambda);
    double dx24 = 10.0 / 24, dx64 = 10.0 / 64;
    CHECK(m24 <= c_bound * dx24 * dx24);
    CHECK(m64 <= c_bound * dx64 * dx64);
    CHECK(m64 < m24);
  }
}

TEST_CASE("static identity: signs, A_i-only, and the amplitude-scaling oracle") {
  GridSpec grid{1.0, 10.0, 4, 20};
  // static U(1) config with phi, A_0 and A_i all present
  auto phi_fn = [](int, double, double x, double y, double z) -> cd {
    double env = std::exp(-1.2 * (x * x + y * y + z * z));
    return cd(0.9 * env, 0.4 * env * std::cos(0.5 * x));
  };
  auto a_fn = [](int mu, int, double, double x, double y, double z) {
    double env = std::exp(-1.2 * (x * x + y * y + z * z));
    if (mu == 0) return 0.5 * env;
    return 0.2 * env * (mu == 1 ? x : (mu == 2 ? y : z));
  };
  ScalarGaugeConfig cfg =
      testcfg::build_scalar(grid, GaugeGroup::u1(), phi_fn, a_fn);
  PotentialExpr v = parse_potential("s^2");

  const double gamma = 1.0, beta = -2.0;
  StaticVirialReport rep = static_virial(cfg, v, gamma, beta);
  CHECK(rep.value < 0.0);
  CHECK(rep.pi0_term <= 0.0);
  CHECK(rep.pi1_term < 0.0);
  CHECK(rep.piA0_term <= 0.0);

  // oracle: central finite difference of the amplitude-scaled action
  const double h = 1e-4;
  double sp = static_scaled_action(cfg, v, gamma, beta, 1.0 + h);
  double sm = static_scaled_action(cfg, v, gamma, beta, 1.0 - h);
  double fd = (sp - sm) / (2.0 * h);
  double scale = std::fabs(rep.pi0_term) + std::fabs(rep.pi1_term) +
                 std::fabs(rep.piA0_term);
  CHECK(std::fabs(rep.value - fd) / scale <= 1e-7);

  // config with only A_i nonzero: every term in the identity vanishes
  auto zero_phi = [](int, double, double, double, double) -> cd {
    return {0.0, 0.0};
  };
  auto ai_only = [](int mu, int, double, double x, double y, double z) {
    if (mu == 0) return 0.0;
    return 0.3 * std::exp(-1.2 * (x * x + y * y + z * z));
  };
  ScalarGaugeConfig cfg2 =
      testcfg::build_scalar(grid, GaugeGroup::u1(), zero_phi, ai_only);
  StaticVirialReport rep2 = static_virial(cfg2, v, gamma, beta);
  CHECK(rep2.value == 0.0);

  // zero config
  ScalarGaugeConfig zero =
      ScalarGaugeConfig::zeros(grid, GaugeGroup::u1(), false);
  CHECK(static_virial(zero, v, gamma, beta).value == 0.0);

  // non-static configurations are rejected
  ScalarGaugeConfig moving = testcfg::stationary_profile_config(
      16, 16, 10.0, 2.0 * M_PI, [](double r) { return std::exp(-r * r); });
  CHECK_THROWS_AS(static_virial(moving, v, gamma, beta),
                  std::invalid_argument);
  // and so are invalid exponents
  CHECK_THROWS_AS(static_virial(cfg, v, 1.0, -0.5), std::invalid_argument);
}

TEST_CASE("certificate dispatch over verdicts") {
  ScalarGaugeConfig cfg = narrow_test_config(0x15, true);
  PotentialExpr v = parse_potential("s^2");
  FunctionalSet fns = compute_functionals(cfg, v);

  Verdict nogo = classify(v);
  REQUIRE(nogo.kind == VerdictKind::NoGo);
  TheoremCertificate cert = dispatch_theorem_cases(fns, nogo);
  CHECK(cert.has_certificate);
  CHECK(cert.case_label == "gamma_three_halves");  // witness prefers 3/2
  CHECK(cert.ds_value < 0.0);
  CHECK_FALSE(cert.config_is_candidate);

  // interior-gamma case: V = s^4 - s^2 has a witness below 3/2
  PotentialExpr v2 = parse_potential("s^4 - s^2");
  Verdict nogo2 = classify(v2);
  REQUIRE(nogo2.kind == VerdictKind::NoGo);
  TheoremCertificate cert2 =
      dispatch_theorem_cases(compute_functionals(cfg, v2), nogo2);
  CHECK(cert2.case_label == "interior_gamma");
  CHECK(cert2.must_vanish.size() == 4);

  // Inconclusive verdicts yield no certificate
  Verdict inc = classify(parse_potential("s - s^2"));
  TheoremCertificate none = dispatch_theorem_cases(fns, inc);
  CHECK_FALSE(none.has_certificate);

  // zero config: vacuous certificate
  GridSpec grid{1.0, 8.0, 4, 8};
  ScalarGaugeConfig zero =
      ScalarGaugeConfig::zeros(grid, GaugeGroup::u1(), false);
  TheoremCertificate vac =
      dispatch_theorem_cases(compute_functionals(zero, v), nogo);
  CHECK(vac.config_is_candidate);
}

TEST_CASE("scaling report JSON and CSV sweep") {
  ScalarGaugeConfig cfg = narrow_test_config(0x16, false);
  PotentialExpr v = parse_potential("s^2");
  ScalingReport rep = scaling_report(cfg, v,  1.0, {0.9, 1.0, 1.1});
  CHECK(rep.s_values.size() == 3);
  CHECK_FALSE(rep.stationary);  // random config is not a solution
  std::string j = scaling_report_to_json(rep);
  for (const char* key :
       {"\"gamma\"", "\"lambda_grid\"", "\"S_values\"", "\"dS_closed\"",
        "\"dS_fd\"", "\"term_breakdown\"", "\"scale\"", "\"stationary\""})
    CHECK(j.find(key) != std::string::npos);

  std::string csv = lambda_sweep_csv(cfg, v, 1.0, {0.9, 1.0, 1.1});
  CHECK(csv.rfind("lambda,S,term_pi0,term_pi1,term_V,term_piA0,term_piA1\n",
                  0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
