// Command-line front end: potential classification, lattice functionals,
// virial identities, Q-ball shooting and the vector-sector diagnostics.
// Exit codes: 0 success, 1 numeric non-convergence, 2 input error.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "virial/bundle.hpp"
#include "virial/jsonio.hpp"
#include "virial/parallel.hpp"
#include "virial/potential.hpp"
#include "virial/qball.hpp"
#include "virial/scaling.hpp"
#include "virial/vector_theory.hpp"

namespace {

constexpr int kSchemaVersion = 1;

using virial::Json;

void emit(Json& j) {
  std::cout << j.dump(2) << "\n";
}

Json fns_json(const virial::FunctionalSet& f) {
  Json j = Json::object();
  j.set("pi0", Json::number(f.pi0));
  j.set("pi1", Json::number(f.pi1));
  j.set("piA0", Json::number(f.piA0));
  j.set("piA1", Json::number(f.piA1));
  j.set("int_V", Json::number(f.int_v));
  j.set("int_Vp_s", Json::number(f.int_vp_s));
  return j;
}

Json vfns_json(const virial::VectorFunctionalSet& f) {
  Json j = Json::object();
  j.set("piW0", Json::number(f.piW0));
  j.set("piW1", Json::number(f.piW1));
  j.set("v0", Json::number(f.v0));
  j.set("v1", Json::number(f.v1));
  j.set("piA0", Json::number(f.piA0));
  j.set("piA1", Json::number(f.piA1));
  return j;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for write");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"virial: scaling identities and soliton no-go analysis"};
  app.require_subcommand(1);

  int threads = 0;
  bool deterministic = true;
  app.add_option("--threads", threads,
                 "worker threads (default: VIRIAL_NOGO_THREADS or hardware)");
  app.add_flag("--deterministic,!--no-deterministic", deterministic,
               "bit-stable reductions across thread counts (always on; "
               "reductions are ordered by construction)");

  // classify
  std::string potential_text;
  double s_max = 10.0;
  int n_samples = 4096;
  auto* classify = app.add_subcommand(
      "classify", "decide the no-go conditions for a potential V(s)");
  classify->add_option("potential", potential_text, "potential text, e.g. 's^2 - s'")
      ->required();
  classify->add_option("--s-max", s_max, "upper end of the sampled s-domain");
  classify->add_option("--n-samples", n_samples, "sample count");

  // functionals
  std::string bundle_path, fn_potential;
  auto* functionals = app.add_subcommand(
      "functionals", "evaluate the action integrals of a field bundle");
  functionals->add_option("bundle", bundle_path, "bundle directory")
      ->required();
  functionals->add_option("--potential", fn_potential,
                          "potential text (scalar bundles)");

  // virial
  std::string v_bundle, v_potential, sweep_csv;
  std::vector<double> gammas{1.0};
  std::vector<double> lambda_grid;
  double fd_h = 1e-3, tol_virial = 1e-3;
  auto* virial_cmd = app.add_subcommand(
      "virial", "dS/dlambda identity report for a scalar bundle");
  virial_cmd->add_option("bundle", v_bundle, "bundle directory")->required();
  virial_cmd->add_option("--potential", v_potential, "potential text")
      ->required();
  virial_cmd->add_option("--gamma", gammas, "scaling exponents");
  virial_cmd->add_option("--lambda-grid", lambda_grid, "lambda sweep points");
  virial_cmd->add_option("--fd-h", fd_h, "finite-difference step");
  virial_cmd->add_option("--tol", tol_virial, "stationarity tolerance");
  virial_cmd->add_option("--sweep-csv", sweep_csv,
                         "write the lambda sweep to this CSV file");

  // static-virial
  std::string sv_bundle, sv_potential;
  double sv_gamma = 1.0, sv_beta = -2.0;
  auto* static_virial_cmd = app.add_subcommand(
      "static-virial", "amplitude-scaling identity for static bundles");
  static_virial_cmd->add_option("bundle", sv_bundle, "bundle directory")
      ->required();
  static_virial_cmd->add_option("--potential", sv_potential, "potential text")
      ->required();
  static_virial_cmd->add_option("--gamma", sv_gamma, "gamma > 0");
  static_virial_cmd->add_option("--beta", sv_beta, "beta < -gamma");

  // qball
  std::string qb_potential, qb_out;
  double qb_omega = 1.0, qb_rmax = 20.0;
  std::vector<double> qb_bracket;
  int qb_n = 2000, qb_nodes = 0;
  auto* qball = app.add_subcommand(
      "qball", "shoot a radial profile f(r) with f'(0) = 0");
  qball->add_option("--potential", qb_potential, "potential text")->required();
  qball->add_option("--omega", qb_omega, "frequency")->required();
  qball->add_option("--bracket", qb_bracket, "f0 bracket: lo hi")
      ->expected(2)
      ->required();
  qball->add_option("--r-max", qb_rmax, "initial radial extent");
  qball->add_option("--n", qb_n, "radial intervals");
  qball->add_option("--nodes", qb_nodes, "requested zero crossings");
  qball->add_option("--out", qb_out, "profile CSV path")->required();

  // exact-log-qball
  double el_q1 = 1.0, el_q2 = 1.0, el_omega = 1.0, el_rmax = 12.0;
  int el_n = 12000;
  std::string el_out;
  auto* exact_cmd = app.add_subcommand(
      "exact-log-qball",
      "closed-form Gaussian profile of V = -q1 s ln(q2 s)");
  exact_cmd->add_option("--q1", el_q1, "q1 > 0");
  exact_cmd->add_option("--q2", el_q2, "q2 > 0");
  exact_cmd->add_option("--omega", el_omega, "frequency");
  exact_cmd->add_option("--r-max", el_rmax, "radial extent");
  exact_cmd->add_option("--n", el_n, "radial intervals");
  exact_cmd->add_option("--out", el_out, "profile CSV path")->required();

  // embed-profile
  std::string ep_profile, ep_sidecar, ep_bundle;
  double ep_l = 16.0;
  int ep_nx = 64, ep_nt = 32;
  auto* embed = app.add_subcommand(
      "embed-profile", "sample a radial profile onto a lattice bundle");
  embed->add_option("--profile", ep_profile, "profile CSV")->required();
  embed->add_option("--sidecar", ep_sidecar,
                    "profile sidecar JSON (default: CSV path + .json)");
  embed->add_option("--box-l", ep_l, "box edge length");
  embed->add_option("--n-x", ep_nx, "points per spatial axis");
  embed->add_option("--n-t", ep_nt, "time samples per period (>= 16)");
  embed->add_option("--out", ep_bundle, "output bundle directory")
      ->required();

  // vector-check
  std::string vc_bundle;
  std::vector<double> betas{1.5};
  double vc_tol = 1e-6;
  auto* vector_check = app.add_subcommand(
      "vector-check", "vector-sector functionals and triviality diagnostics");
  vector_check->add_option("bundle", vc_bundle, "bundle directory")
      ->required();
  vector_check->add_option("--beta", betas, "scaling exponents");
  vector_check->add_option("--tol", vc_tol, "rigidity tolerance");

  // fd-check
  std::string fd_bundle, fd_potential;
  double fd_gamma = 1.0, fd_step = 1e-3;
  auto* fd_check = app.add_subcommand(
      "fd-check", "closed-form dS/dlambda against a finite difference");
  fd_check->add_option("bundle", fd_bundle, "bundle directory")->required();
  fd_check->add_option("--potential", fd_potential, "potential text")
      ->required();
  fd_check->add_option("--gamma", fd_gamma, "scaling exponent");
  fd_check->add_option("--step", fd_step, "lambda step");

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) virial::set_max_threads(threads);
  (void)deterministic;  // reductions are ordered regardless

  try {
    if (*classify) {
      virial::Verdict verdict;
      try {
        verdict = virial::classify(virial::parse_potential(potential_text),
                                   s_max, n_samples);
      } catch (const virial::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
      }
      Json j = Json::object();
      j.set("schema_version", Json::integer(kSchemaVersion));
      virial::append_verdict_fields(j, verdict);
      emit(j);
      return 0;
    }

    if (*functionals) {
      virial::BundleContent content = virial::read_bundle(bundle_path);
      Json j = Json::object();
      j.set("schema_version", Json::integer(kSchemaVersion));
      if (std::holds_alternative<virial::ScalarGaugeConfig>(content)) {
        if (fn_potential.empty()) {
          std::cerr << "scalar bundles need --potential\n";
          return 2;
        }
        const auto& cfg = std::get<virial::ScalarGaugeConfig>(content);
        virial::FunctionalSet fns = virial::compute_functionals(
            cfg, virial::parse_potential(fn_potential));
        j.set("theory", Json::string("scalar"));
        j.set("functionals", fns_json(fns));
      } else {
        const auto& cfg = std::get<virial::VectorConfig>(content);
        j.set("theory", Json::string("vector"));
        j.set("functionals",
              vfns_json(virial::compute_vector_functionals(cfg)));
      }
      emit(j);
      return 0;
    }

    if (*virial_cmd) {
      auto content = virial::read_bundle(v_bundle);
      if (!std::holds_alternative<virial::ScalarGaugeConfig>(content)) {
        std::cerr << "virial expects a scalar bundle\n";
        return 2;
      }
      const auto& cfg = std::get<virial::ScalarGaugeConfig>(content);
      virial::PotentialExpr pot = virial::parse_potential(v_potential);
      Json arr = Json::array();
      for (double g : gammas) {
        virial::ScalingReport rep = virial::scaling_report(
            cfg, pot, g, lambda_grid, fd_h, tol_virial);
        arr.push(virial::scaling_report_json(rep));
      }
      Json j = Json::object();
      j.set("schema_version", Json::integer(kSchemaVersion));
      j.set("reports", std::move(arr));
      emit(j);
      if (!sweep_csv.empty()) {
        std::vector<double> grid = lambda_grid;
        if (grid.empty()) grid = {0.8, 0.9, 1.0, 1.1, 1.2};
        write_text_file(sweep_csv, virial::lambda_sweep_csv(
                                       cfg, pot, gammas.front(), grid));
      }
      return 0;
    }

    if (*static_virial_cmd) {
      auto content = virial::read_bundle(sv_bundle);
      if (!std::holds_alternative<virial::ScalarGaugeConfig>(content)) {
        std::cerr << "static-virial expects a scalar bundle\n";
        return 2;
      }
      const auto& cfg = std::get<virial::ScalarGaugeConfig>(content);
      virial::StaticVirialReport rep = virial::static_virial(
          cfg, virial::parse_potential(sv_potential), sv_gamma, sv_beta);
      Json j = Json::object();
      j.set("schema_version", Json::integer(kSchemaVersion));
      j.set("gamma", Json::number(rep.gamma));
      j.set("beta", Json::number(rep.beta));
      j.set("value", Json::number(rep.value));
      j.set("pi0_term", Json::number(rep.pi0_term));
      j.set("pi1_term", Json::number(rep.pi1_term));
      j.set("piA0_term", Json::number(rep.piA0_term));
      j.set("functionals", fns_json(rep.fns));
      emit(j);
      return 0;
    }

    if (*qball) {
      virial::RadialProfile profile;
      try {
        virial::ShootOptions sopts;
        sopts.node_count = qb_nodes;
        profile = virial::shoot(virial::parse_potential(qb_potential),
                                qb_omega, qb_bracket[0], qb_bracket[1],
                                {qb_rmax, qb_n}, sopts);
      } catch (const virial::NoSignChange& e) {
        std::cerr << "non-convergent: " << e.what() << "\n";
        return 1;
      } catch (const virial::NonConvergent& e) {
        std::cerr << "non-convergent: " << e.what() << "\n";
        return 1;
      }
      virial::write_profile_csv(qb_out, profile);
      std::string sidecar = virial::profile_sidecar_json(profile);
      write_text_file(qb_out + ".json", sidecar + "\n");
      std::cout << sidecar << "\n";
      return 0;
    }

    if (*exact_cmd) {
      virial::RadialProfile profile =
          virial::exact_log_qball(el_q1, el_q2, el_omega, {el_rmax, el_n});
      virial::write_profile_csv(el_out, profile);
      std::string sidecar = virial::profile_sidecar_json(profile);
      write_text_file(el_out + ".json", sidecar + "\n");
      std::cout << sidecar << "\n";
      return 0;
    }

    if (*embed) {
      std::string sidecar =
          ep_sidecar.empty() ? ep_profile + ".json" : ep_sidecar;
      virial::RadialProfile profile =
          virial::read_profile_csv(ep_profile, sidecar);
      virial::GridSpec grid;
      grid.period_t = 2.0 * M_PI / profile.omega;
      grid.box_l = ep_l;
      grid.n_t = ep_nt;
      grid.n_x = ep_nx;
      virial::ScalarGaugeConfig cfg = virial::profile_to_config(
          profile, grid, virial::GaugeGroup::u1());
      virial::write_bundle(ep_bundle, cfg);
      Json j = Json::object();
      j.set("schema_version", Json::integer(kSchemaVersion));
      j.set("bundle", Json::string(ep_bundle));
      j.set("period_t", Json::number(grid.period_t));
      j.set("n_x", Json::integer(grid.n_x));
      j.set("n_t", Json::integer(grid.n_t));
      emit(j);
      return 0;
    }

    if (*vector_check) {
      auto content = virial::read_bundle(vc_bundle);
      if (!std::holds_alternative<virial::VectorConfig>(content)) {
        std::cerr << "vector-check expects a vector bundle\n";
        return 2;
      }
      const auto& cfg = std::get<virial::VectorConfig>(content);
      virial::VectorFunctionalSet fns =
          virial::compute_vector_functionals(cfg);
      Json j = Json::object();
      j.set("schema_version", Json::integer(kSchemaVersion));
      j.set("functionals", vfns_json(fns));
      Json reports = Json::array();
      for (double b : betas) {
        virial::VectorVirialReport rep =
            virial::vector_virial_derivative(fns, b);
        Json r = Json::object();
        r.set("beta", Json::number(rep.beta));
        r.set("value", Json::number(rep.value));
        r.set("t_piW0", Json::number(rep.t_piW0));
        r.set("t_piW1", Json::number(rep.t_piW1));
        r.set("t_v0", Json::number(rep.t_v0));
        r.set("t_v1", Json::number(rep.t_v1));
        r.set("t_piA0", Json::number(rep.t_piA0));
        r.set("t_piA1", Json::number(rep.t_piA1));
        reports.push(std::move(r));
      }
      j.set("virial", std::move(reports));
      virial::HelmholtzReport helm = virial::helmholtz_diagnostics(cfg);
      Json hj = Json::object();
      hj.set("norm_div", Json::number(helm.norm_div));
      hj.set("norm_curl", Json::number(helm.norm_curl));
      hj.set("norm_W0", Json::number(helm.norm_w0));
      hj.set("norm_F", Json::number(helm.norm_f));
      hj.set("a_is_zero", Json::boolean(helm.a_is_zero));
      j.set("helmholtz", std::move(hj));
      virial::RigidityReport rig = virial::harmonic_rigidity_check(cfg, vc_tol);
      Json rj = Json::object();
      rj.set("preconditions_ok", Json::boolean(rig.preconditions_ok));
      rj.set("boundary_max", Json::number(rig.boundary_max));
      rj.set("potential_norm", Json::number(rig.potential_norm));
      rj.set("grad_fit_residual", Json::number(rig.grad_fit_residual));
      rj.set("field_norm", Json::number(rig.field_norm));
      rj.set("scale", Json::number(rig.scale));
      rj.set("certified_trivial", Json::boolean(rig.certified_trivial));
      j.set("rigidity", std::move(rj));
      emit(j);
      return 0;
    }

    if (*fd_check) {
      auto content = virial::read_bundle(fd_bundle);
      if (!std::holds_alternative<virial::ScalarGaugeConfig>(content)) {
        std::cerr << "fd-check expects a scalar bundle\n";
        return 2;
      }
      const auto& cfg = std::get<virial::ScalarGaugeConfig>(content);
      virial::FdConsistency fd = virial::finite_difference_consistency(
          cfg, virial::parse_potential(fd_potential), fd_gamma, fd_step);
      Json j = Json::object();
      j.set("schema_version", Json::integer(kSchemaVersion));
      j.set("gamma", Json::number(fd_gamma));
      j.set("h", Json::number(fd.h));
      j.set("dS_closed", Json::number(fd.ds_closed));
      j.set("dS_fd", Json::number(fd.ds_fd));
      j.set("rel_err", Json::number(fd.rel_err));
      j.set("scale", Json::number(fd.scale));
      emit(j);
      return 0;
    }
  } catch (const virial::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const virial::BundleError& e) {
    std::cerr << "bundle error: " << e.what() << "\n";
    return 2;
  } catch (const virial::EvalDomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
