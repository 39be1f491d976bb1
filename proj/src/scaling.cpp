#include "virial/scaling.hpp"

#include <cmath>
#include <sstream>

#include "virial/jsonio.hpp"
#include "virial/parallel.hpp"

namespace virial {

using cd = std::complex<double>;

double VirialTerms::scale() const {
  return std::fabs(pi0_term) + std::fabs(pi1_term) + std::fabs(pot_term) +
         std::fabs(piA0_term) + std::fabs(piA1_term);
}

VirialTerms virial_terms(const FunctionalSet& fns, double gamma) {
  VirialTerms t;
  t.pi0_term = (2.0 * gamma - 3.0) * fns.pi0;
  t.pi1_term = -(2.0 * gamma - 1.0) * fns.pi1;
  t.pot_term = -fns.int_g_gamma(gamma);
  t.piA0_term = -fns.piA0;
  t.piA1_term = -fns.piA1;
  return t;
}

double virial_derivative(const FunctionalSet& fns, double gamma) {
  return virial_terms(fns, gamma).sum();
}

double scaled_action(const FunctionalSet& fns, const PotentialExpr& potential,
                     const ScalarGaugeConfig& cfg, double gamma,
                     double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("lambda must be positive");
  double pot = integrate_potential(cfg, potential,
                                   std::pow(lambda, 2.0 * gamma));
  return std::pow(lambda, 2.0 * gamma - 3.0) * fns.pi0 -
         std::pow(lambda, 2.0 * gamma - 1.0) * fns.pi1 -
         std::pow(lambda, -3.0) * pot + fns.piA0 / lambda -
         lambda * fns.piA1;
}

ScalingReport scaling_report(const ScalarGaugeConfig& cfg,
                             const PotentialExpr& potential, double gamma,
                             const std::vector<double>& lambda_grid,
                             double fd_h, double tol_virial,
                             const EvalOptions& opts) {
  if (!(fd_h > 0.0) || fd_h > 0.1)
    throw std::invalid_argument("fd step must lie in (0, 0.1]");
  ScalingReport rep;
  rep.gamma = gamma;
  rep.fd_h = fd_h;
  rep.tol_virial = tol_virial;

  FunctionalSet fns = compute_functionals(cfg, potential, opts);
  rep.terms = virial_terms(fns, gamma);
  rep.ds_closed = rep.terms.sum();
  rep.scale = rep.terms.scale();

  rep.lambda_grid =
      lambda_grid.empty()
          ? std::vector<double>{0.8, 0.9, 1.0, 1.1, 1.2}
          : lambda_grid;
  rep.s_values.reserve(rep.lambda_grid.size());
  for (double l : rep.lambda_grid)
    rep.s_values.push_back(scaled_action(fns, potential, cfg, gamma, l));

  double sp = scaled_action(fns, potential, cfg, gamma, 1.0 + fd_h);
  double sm = scaled_action(fns, potential, cfg, gamma, 1.0 - fd_h);
  rep.ds_fd = (sp - sm) / (2.0 * fd_h);

  rep.stationary =
      std::fabs(rep.ds_closed) <= tol_virial * std::max(rep.scale, 1e-300);
  return rep;
}

Json scaling_report_json(const ScalingReport& rep) {
  Json j = Json::object();
  j.set("gamma", Json::number(rep.gamma));
  Json lg = Json::array(), sv = Json::array();
  for (double l : rep.lambda_grid) lg.push(Json::number(l));
  for (double s : rep.s_values) sv.push(Json::number(s));
  j.set("lambda_grid", std::move(lg));
  j.set("S_values", std::move(sv));
  j.set("dS_closed", Json::number(rep.ds_closed));
  j.set("dS_fd", Json::number(rep.ds_fd));
  j.set("fd_h", Json::number(rep.fd_h));
  Json terms = Json::object();
  terms.set("pi0", Json::number(rep.terms.pi0_term));
  terms.set("pi1", Json::number(rep.terms.pi1_term));
  terms.set("potential", Json::number(rep.terms.pot_term));
  terms.set("piA0", Json::number(rep.terms.piA0_term));
  terms.set("piA1", Json::number(rep.terms.piA1_term));
  j.set("term_breakdown", std::move(terms));
  j.set("scale", Json::number(rep.scale));
  j.set("tol_virial", Json::number(rep.tol_virial));
  j.set("stationary", Json::boolean(rep.stationary));
  return j;
}

std::string scaling_report_to_json(const ScalingReport& rep) {
  return scaling_report_json(rep).dump();
}

std::string lambda_sweep_csv(const ScalarGaugeConfig& cfg,
                             const PotentialExpr& potential, double gamma,
                             const std::vector<double>& lambda_grid,
                             const EvalOptions& opts) {
  FunctionalSet fns = compute_functionals(cfg, potential, opts);
  std::ostringstream out;
  out << "lambda,S,term_pi0,term_pi1,term_V,term_piA0,term_piA1\n";
  for (double l : lambda_grid) {
    double t0 = std::pow(l, 2.0 * gamma - 3.0) * fns.pi0;
    double t1 = -std::pow(l, 2.0 * gamma - 1.0) * fns.pi1;
    double tv = -std::pow(l, -3.0) *
                integrate_potential(cfg, potential, std::pow(l, 2.0 * gamma));
    double ta0 = fns.piA0 / l;
    double ta1 = -l * fns.piA1;
    double s = t0 + t1 + tv + ta0 + ta1;
    out << format_g17(l) << ',' << format_g17(s) << ',' << format_g17(t0)
        << ',' << format_g17(t1) << ',' << format_g17(tv) << ','
        << format_g17(ta0) << ',' << format_g17(ta1) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Static identity

double static_virial_derivative(const FunctionalSet& fns, double gamma,
                                double beta) {
  return 2.0 * (gamma + beta) * fns.pi0 -
         2.0 * gamma * (fns.pi1 + fns.int_vp_s) + 2.0 * beta * fns.piA0;
}

StaticVirialReport static_virial(const ScalarGaugeConfig& cfg,
                                 const PotentialExpr& potential, double gamma,
                                 double beta, double static_tol,
                                 const EvalOptions& opts) {
  if (!(gamma > 0.0) || !(beta < -gamma))
    throw std::invalid_argument(
        "static identity requires gamma > 0 and beta < -gamma");
  if (!is_static(cfg, static_tol))
    throw std::invalid_argument(
        "configuration is not static (time variation above tolerance)");
  StaticVirialReport rep;
  rep.gamma = gamma;
  rep.beta = beta;
  rep.fns = compute_functionals(cfg, potential, opts);
  rep.pi0_term = 2.0 * (gamma + beta) * rep.fns.pi0;
  rep.pi1_term = -2.0 * gamma * (rep.fns.pi1 + rep.fns.int_vp_s);
  rep.piA0_term = 2.0 * beta * rep.fns.piA0;
  rep.value = rep.pi0_term + rep.pi1_term + rep.piA0_term;
  return rep;
}

double static_scaled_action(const ScalarGaugeConfig& cfg,
                            const PotentialExpr& potential, double gamma,
                            double beta, double lambda,
                            const EvalOptions& opts) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("lambda must be positive");
  ScalarGaugeConfig scaled = cfg;
  double lg = std::pow(lambda, gamma);
  for (cd& v : scaled.phi) v *= lg;
  if (!scaled.a.empty()) {
    double lb = std::pow(lambda, beta);
    std::size_t block =
        static_cast<std::size_t>(cfg.group.dim_adjoint) * cfg.grid.sites();
    for (std::size_t j = 0; j < block; ++j) scaled.a[j] *= lb;  // mu == 0
  }
  return action_value(compute_functionals(scaled, potential, opts));
}

FdConsistency finite_difference_consistency(const ScalarGaugeConfig& cfg,
                                            const PotentialExpr& potential,
                                            double gamma, double h,
                                            const EvalOptions& opts) {
  if (!(h > 0.0) || h > 0.1)
    throw std::invalid_argument("fd step must lie in (0, 0.1]");
  FdConsistency out;
  out.h = h;
  FunctionalSet fns = compute_functionals(cfg, potential, opts);
  VirialTerms terms = virial_terms(fns, gamma);
  out.ds_closed = terms.sum();
  out.scale = terms.scale();
  double sp = scaled_action(fns, potential, cfg, gamma, 1.0 + h);
  double sm = scaled_action(fns, potential, cfg, gamma, 1.0 - h);
  out.ds_fd = (sp - sm) / (2.0 * h);
  out.rel_err =
      std::fabs(out.ds_closed - out.ds_fd) / std::max(out.scale, 1e-300);
  return out;
}

// ---------------------------------------------------------------------------
// Theorem case dispatch

TheoremCertificate dispatch_theorem_cases(const FunctionalSet& fns,
                                          const Verdict& verdict, double tol) {
  TheoremCertificate cert;
  double fmax = std::max({fns.pi0, fns.pi1, fns.piA0, fns.piA1, 1e-300});
  auto killed = [&](double v) { return v <= tol * fmax; };

  switch (verdict.kind) {
    case VerdictKind::NoGo: {
      cert.has_certificate = true;
      cert.gamma = verdict.gamma;
      VirialTerms terms = virial_terms(fns, verdict.gamma);
      cert.ds_value = terms.sum();
      cert.scale = terms.scale();
      if (verdict.gamma < 1.5) {
        cert.case_label = "interior_gamma";
        cert.must_vanish = {"pi0", "pi1", "piA0", "piA1"};
        cert.config_is_candidate = killed(fns.pi0) && killed(fns.pi1) &&
                                   killed(fns.piA0) && killed(fns.piA1);
      } else {
        cert.case_label = "gamma_three_halves";
        cert.must_vanish = {"pi1", "piA0", "piA1"};
        cert.config_is_candidate =
            killed(fns.pi1) && killed(fns.piA0) && killed(fns.piA1);
      }
      cert.conclusion =
          cert.config_is_candidate
              ? "all constrained functionals vanish; only the trivial "
                "configuration survives"
              : "stationarity fails (dS/dlambda < 0): not a solution";
      break;
    }
    case VerdictKind::NoGoDerrickStatic: {
      cert.has_certificate = true;
      cert.case_label = "derrick_static";
      cert.gamma = 0.5;
      cert.must_vanish = {"pi0", "piA0", "piA1"};
      VirialTerms terms = virial_terms(fns, 0.5);
      cert.ds_value = terms.sum();
      cert.scale = terms.scale();
      cert.config_is_candidate =
          killed(fns.pi0) && killed(fns.piA0) && killed(fns.piA1);
      cert.conclusion =
          "gamma = 1/2 forces a static scalar; the Derrick condition "
          "s V' >= 3V >= 0 then excludes static solitons";
      break;
    }
    case VerdictKind::NoGoStaticOnly: {
      cert.has_certificate = true;
      cert.case_label = "static_remark";
      cert.must_vanish = {"pi0", "pi1", "piA0"};
      cert.ds_value = static_virial_derivative(fns, 1.0, -2.0);
      cert.scale = std::fabs(2.0 * (1.0 - 2.0) * fns.pi0) +
                   std::fabs(2.0 * (fns.pi1 + fns.int_vp_s)) +
                   std::fabs(-4.0 * fns.piA0);
      cert.config_is_candidate =
          killed(fns.pi0) && killed(fns.pi1) && killed(fns.piA0);
      cert.conclusion =
          "s V' >= 0 excludes static solitons (amplitude-scaling identity); "
          "time-dependent configurations are not constrained";
      break;
    }
    case VerdictKind::Inconclusive:
      cert.case_label = "none";
      cert.conclusion = "no-go conditions not met; no certificate";
      break;
  }
  return cert;
}

std::string certificate_to_json(const TheoremCertificate& cert) {
  Json j = Json::object();
  j.set("has_certificate", Json::boolean(cert.has_certificate));
  j.set("case", Json::string(cert.case_label));
  j.set("gamma", cert.has_certificate ? Json::number(cert.gamma)
                                      : Json::null());
  Json mv = Json::array();
  for (const auto& name : cert.must_vanish) mv.push(Json::string(name));
  j.set("must_vanish", std::move(mv));
  j.set("dS", Json::number(cert.ds_value));
  j.set("scale", Json::number(cert.scale));
  j.set("config_is_candidate", Json::boolean(cert.config_is_candidate));
  j.set("conclusion", Json::string(cert.conclusion));
  return j.dump();
}

// ---------------------------------------------------------------------------
// Literal rescaling (cross-check path)

namespace {

// Trilinear interpolation at fractional grid coordinates; zero outside.
template <typename T>
T trilinear(const std::vector<T>& data, const ScalarGaugeConfig& cfg, int t,
            double fz, double fy, double fx, int c, bool is_phi, int mu,
            int ad) {
  const int nx = cfg.grid.n_x;
  if (fx < 0.0 || fy < 0.0 || fz < 0.0 || fx > nx - 1 || fy > nx - 1 ||
      fz > nx - 1)
    return T{};
  int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy),
      z0 = static_cast<int>(fz);
  int x1 = std::min(x0 + 1, nx - 1), y1 = std::min(y0 + 1, nx - 1),
      z1 = std::min(z0 + 1, nx - 1);
  double ux = fx - x0, uy = fy - y0, uz = fz - z0;
  auto at = [&](int z, int y, int x) -> T {
    if (is_phi)
      return data[cfg.phi_index(t, z, y, x, c)];
    else
      return data[cfg.a_index(mu, ad, t, z, y, x)];
  };
  T c00 = at(z0, y0, x0) * (1.0 - ux) + at(z0, y0, x1) * ux;
  T c01 = at(z0, y1, x0) * (1.0 - ux) + at(z0, y1, x1) * ux;
  T c10 = at(z1, y0, x0) * (1.0 - ux) + at(z1, y0, x1) * ux;
  T c11 = at(z1, y1, x0) * (1.0 - ux) + at(z1, y1, x1) * ux;
  T c0 = c00 * (1.0 - uy) + c01 * uy;
  T c1 = c10 * (1.0 - uy) + c11 * uy;
  return c0 * (1.0 - uz) + c1 * uz;
}

}  // namespace

ScalarGaugeConfig rescale_config(const ScalarGaugeConfig& cfg, double lambda,
                                 double gamma) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("lambda must be positive");
  cfg.validate();
  ScalarGaugeConfig out =
      ScalarGaugeConfig::zeros(cfg.grid, cfg.group, !cfg.a.empty());
  const int nt = cfg.grid.n_t, nx = cfg.grid.n_x, nr = cfg.group.n_rep;
  const double dx = cfg.grid.dx();
  const double lg = std::pow(lambda, gamma);

  parallel_for(nt, [&](std::size_t ti) {
    int t = static_cast<int>(ti);
    for (int z = 0; z < nx; ++z)
      for (int y = 0; y < nx; ++y)
        for (int x = 0; x < nx; ++x) {
          // fractional source coordinates of lambda * x
          double sx = (lambda * cfg.grid.coord(x) + 0.5 * cfg.grid.box_l) / dx;
          double sy = (lambda * cfg.grid.coord(y) + 0.5 * cfg.grid.box_l) / dx;
          double sz = (lambda * cfg.grid.coord(z) + 0.5 * cfg.grid.box_l) / dx;
          for (int c = 0; c < nr; ++c)
            out.phi[out.phi_index(t, z, y, x, c)] =
                lg * trilinear(cfg.phi, cfg, t, sz, sy, sx, c, true, 0, 0);
          if (!cfg.a.empty())
            for (int mu = 0; mu < 4; ++mu)
              for (int ad = 0; ad < cfg.group.dim_adjoint; ++ad) {
                double v = trilinear(cfg.a, cfg, t, sz, sy, sx, 0, false, mu,
                                     ad);
                out.a[out.a_index(mu, ad, t, z, y, x)] =
                    mu == 0 ? v : lambda * v;
              }
        }
  });
  return out;
}

}  // namespace virial
