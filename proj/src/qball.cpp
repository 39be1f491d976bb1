#include "virial/qball.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "virial/jsonio.hpp"
#include "virial/potential.hpp"

namespace virial {

namespace {

// Force term V'(f^2) f with the removable limit at f = 0: for every
// potential in scope V'(s) grows at most like ln s, so the product
// vanishes.  |f| below 1e-150 risks underflow of f^2 before the log.
double potential_force(const CompiledPotential& vp, double f) {
  if (std::fabs(f) < 1e-150) return 0.0;
  double v;
  if (!vp.try_eval(f * f, &v))
    throw EvalDomainError("V'(f^2) undefined at f = " + format_g17(f));
  return v * f;
}

struct State {
  double f, u;  // u = f'
};

// radial RHS; at r = 0 the Laplacian regularizes: f''(0) = force/3
State rhs(const CompiledPotential& vp, double omega2, double r,
          const State& y) {
  double force = potential_force(vp, y.f) - omega2 * y.f;
  if (r <= 0.0) return {y.u, force / 3.0};
  return {y.u, force - 2.0 / r * y.u};
}

// Dormand-Prince 5(4) with standard PI-free step control.
struct DP54 {
  const CompiledPotential& vp;
  double omega2;
  double rtol, atol;

  // one adaptive step from (r, y); h is updated in place
  bool step(double& r, State& y, double& h, double r_limit) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                            c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15,
                            a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113,
                            b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                            e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640,
                            e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100,
                            e7 = -1.0 / 40;

    for (int attempt = 0; attempt < 60; ++attempt) {
      if (r + h > r_limit) h = r_limit - r;
      State k1 = rhs(vp, omega2, r, y);
      State k2 = rhs(vp, omega2, r + c2 * h,
                     {y.f + h * a21 * k1.f, y.u + h * a21 * k1.u});
      State k3 = rhs(vp, omega2, r + c3 * h,
                     {y.f + h * (a31 * k1.f + a32 * k2.f),
                      y.u + h * (a31 * k1.u + a32 * k2.u)});
      State k4 = rhs(vp, omega2, r + c4 * h,
                     {y.f + h * (a41 * k1.f + a42 * k2.f + a43 * k3.f),
                      y.u + h * (a41 * k1.u + a42 * k2.u + a43 * k3.u)});
      State k5 = rhs(vp, omega2, r + c5 * h,
                     {y.f + h * (a51 * k1.f + a52 * k2.f + a53 * k3.f +
                                 a54 * k4.f),
                      y.u + h * (a51 * k1.u + a52 * k2.u + a53 * k3.u +
                                 a54 * k4.u)});
      State k6 = rhs(vp, omega2, r + h,
                     {y.f + h * (a61 * k1.f + a62 * k2.f + a63 * k3.f +
                                 a64 * k4.f + a65 * k5.f),
                      y.u + h * (a61 * k1.u + a62 * k2.u + a63 * k3.u +
                                 a64 * k4.u + a65 * k5.u)});
      State y5{y.f + h * (b1 * k1.f + b3 * k3.f + b4 * k4.f + b5 * k5.f +
                          b6 * k6.f),
               y.u + h * (b1 * k1.u + b3 * k3.u + b4 * k4.u + b5 * k5.u +
                          b6 * k6.u)};
      State k7 = rhs(vp, omega2, r + h, y5);
      double err_f = h * (e1 * k1.f + e3 * k3.f + e4 * k4.f + e5 * k5.f +
                          e6 * k6.f + e7 * k7.f);
      double err_u = h * (e1 * k1.u + e3 * k3.u + e4 * k4.u + e5 * k5.u +
                          e6 * k6.u + e7 * k7.u);
      double sc_f = atol + rtol * std::max(std::fabs(y.f), std::fabs(y5.f));
      double sc_u = atol + rtol * std::max(std::fabs(y.u), std::fabs(y5.u));
      double err = std::max(std::fabs(err_f) / sc_f, std::fabs(err_u) / sc_u);

      if (err <= 1.0 || h <= 1e-14 * std::max(1.0, r)) {
        r += h;
        y = y5;
        double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
        return true;
      }
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.5);
    }
    return false;
  }
};

enum class ShotOutcome { Overshoot, Undershoot, Decayed, NeedLargerR };

struct ShotResult {
  ShotOutcome outcome;
  double r_event = 0.0;
  int crossings = 0;
};

// Classify one shot.  When `record` is set, f is sampled on the uniform
// grid nodes (steps are capped at node boundaries).
ShotResult classify_shot(const CompiledPotential& vp, double omega,
                         double f0, double r_end, int node_count,
                         const ShootOptions& opts,
                         std::vector<double>* record = nullptr,
                         const RadialGrid* grid = nullptr) {
  DP54 stepper{vp, omega * omega, opts.ode_rtol, opts.ode_atol};
  double r = 0.0;
  State y{f0, 0.0};
  double h = 1e-4 * std::max(1.0, r_end) * 1e-2;
  double f_max = std::fabs(f0);
  int crossings = 0;
  int next_node = 1;
  // mid-trajectory "decayed" exits only fire when the shot hugs the true
  // profile down to machine-tiny amplitudes, keeping the bisection honest
  const double decay_floor = 1e-13;

  if (record) {
    record->assign(grid->n + 1, 0.0);
    (*record)[0] = f0;
  }

  while (r < r_end) {
    double r_cap = r_end;
    if (record && next_node <= grid->n)
      r_cap = std::min(r_cap, next_node * grid->dr());
    double prev_f = y.f;
    double prev_r = r;
    if (!stepper.step(r, y, h, r_cap)) return {ShotOutcome::NeedLargerR, r};
    (void)prev_r;
    if (record) {
      while (next_node <= grid->n &&
             next_node * grid->dr() <= r * (1.0 + 1e-15)) {
        (*record)[next_node] = y.f;
        ++next_node;
      }
    }
    f_max = std::max(f_max, std::fabs(y.f));

    if (prev_f != 0.0 && y.f != 0.0 && std::signbit(prev_f) != std::signbit(y.f)) {
      ++crossings;
      if (crossings > node_count)
        return {ShotOutcome::Overshoot, r, crossings};
    }
    double sgn = y.f > 0.0 ? 1.0 : (y.f < 0.0 ? -1.0 : 0.0);
    if (sgn * y.u > 0.0 && std::fabs(y.f) > 1e-10 * f_max)
      return {ShotOutcome::Undershoot, r, crossings};
    if (std::fabs(y.f) > 20.0 * f_max)
      return {ShotOutcome::Undershoot, r, crossings};
    if (std::fabs(y.f) <= decay_floor * f_max && sgn * y.u <= 0.0 &&
        crossings == node_count)
      return {ShotOutcome::Decayed, r, crossings};
  }
  // reached r_end without an event
  if (std::fabs(y.f) <= opts.decay_tol * f_max && crossings == node_count)
    return {ShotOutcome::Decayed, r, crossings};
  return {ShotOutcome::NeedLargerR, r, crossings};
}

// Exponential tail f ~ C exp(-kappa r)/r, exact for the linearized
// equation; blended over [r1, r2] to keep the emitted profile smooth.
struct TailPatch {
  bool use_yukawa = false;
  double kappa = 0.0;
  double coeff = 0.0;
  int i1 = -1, i2 = -1;  // blend window nodes

  double asym(double r) const {
    if (!use_yukawa || r <= 0.0) return 0.0;
    return coeff * std::exp(-kappa * r) / r;
  }
};

}  // namespace

std::vector<double> radial_residual(const RadialProfile& profile) {
  const auto& r = profile.r;
  const auto& f = profile.f;
  const int n = static_cast<int>(r.size());
  if (n < 7) throw std::invalid_argument("profile needs at least 7 nodes");
  const double h = r[1] - r[0];
  CompiledPotential vp(differentiate(profile.potential));
  const double w2 = profile.omega * profile.omega;

  // even extension across r = 0 (regular profiles are even in r)
  auto get = [&](int k) { return k < 0 ? f[-k] : f[k]; };

  std::vector<double> res(n, 0.0);
  for (int k = 0; k < n; ++k) {
    double d1, d2;
    if (k <= n - 3) {
      d1 = (get(k - 2) - 8.0 * get(k - 1) + 8.0 * get(k + 1) - get(k + 2)) /
           (12.0 * h);
      d2 = (-get(k - 2) + 16.0 * get(k - 1) - 30.0 * get(k) +
            16.0 * get(k + 1) - get(k + 2)) /
           (12.0 * h * h);
    } else if (k == n - 2) {
      d1 = (-f[n - 5] + 6.0 * f[n - 4] - 18.0 * f[n - 3] + 10.0 * f[n - 2] +
            3.0 * f[n - 1]) /
           (12.0 * h);
      // 6-point one-sided f'', 4th order, one node in from the edge
      d2 = ((1.0 / 12) * f[n - 6] - (1.0 / 2) * f[n - 5] +
            (7.0 / 6) * f[n - 4] - (1.0 / 3) * f[n - 3] -
            (5.0 / 4) * f[n - 2] + (5.0 / 6) * f[n - 1]) /
           (h * h);
    } else {  // k == n - 1
      d1 = (3.0 * f[n - 5] - 16.0 * f[n - 4] + 36.0 * f[n - 3] -
            48.0 * f[n - 2] + 25.0 * f[n - 1]) /
           (12.0 * h);
      d2 = ((-5.0 / 6) * f[n - 6] + (61.0 / 12) * f[n - 5] -
            13.0 * f[n - 4] + (107.0 / 6) * f[n - 3] -
            (77.0 / 6) * f[n - 2] + (15.0 / 4) * f[n - 1]) /
           (h * h);
    }
    if (k == 0) {
      res[0] = 3.0 * d2 + w2 * f[0] - potential_force(vp, f[0]);
    } else {
      res[k] = d2 + 2.0 / r[k] * d1 + w2 * f[k] - potential_force(vp, f[k]);
    }
  }
  return res;
}

RadialProfile exact_log_qball(double q1, double q2, double omega,
                              const RadialGrid& grid) {
  if (!(q1 > 0.0) || !(q2 > 0.0))
    throw std::invalid_argument("q1 and q2 must be positive");
  RadialProfile p;
  p.omega = omega;
  // V = -q1 s ln(q2 s)
  p.potential = PotentialExpr(make_mul(
      make_constant(-q1),
      make_mul(make_var(), make_log(make_mul(make_constant(q2), make_var())))));
  double amplitude = std::sqrt(std::exp(2.0 - omega * omega / q1) / q2);
  double width = 0.5 * q1;
  p.r.resize(grid.n + 1);
  p.f.resize(grid.n + 1);
  for (int k = 0; k <= grid.n; ++k) {
    p.r[k] = k * grid.dr();
    p.f[k] = amplitude * std::exp(-width * p.r[k] * p.r[k]);
  }
  p.f0 = amplitude;
  return p;
}

RadialProfile shoot(const PotentialExpr& potential, double omega,
                    double f0_lo, double f0_hi, const RadialGrid& grid,
                    const ShootOptions& opts) {
  if (!(f0_lo < f0_hi))
    throw std::invalid_argument("bracket must satisfy lo < hi");
  PotentialExpr vprime = differentiate(potential);
  CompiledPotential vp(vprime);

  RadialGrid g = grid;
  for (int attempt = 0;; ++attempt) {
    double lo = f0_lo, hi = f0_hi;
    ShotResult rl =
        classify_shot(vp, omega, lo, g.r_max, opts.node_count, opts);
    ShotResult rh =
        classify_shot(vp, omega, hi, g.r_max, opts.node_count, opts);

    bool need_larger = rl.outcome == ShotOutcome::NeedLargerR ||
                       rh.outcome == ShotOutcome::NeedLargerR;
    double best = std::numeric_limits<double>::quiet_NaN();
    if (!need_larger) {
      if (rl.outcome == ShotOutcome::Decayed)
        best = lo;
      else if (rh.outcome == ShotOutcome::Decayed)
        best = hi;
      else if (rl.outcome != ShotOutcome::Undershoot ||
               rh.outcome != ShotOutcome::Overshoot)
        throw NoSignChange(
            "bracket does not straddle: f0 = " + format_g17(lo) + " -> " +
            (rl.outcome == ShotOutcome::Overshoot ? "overshoot"
                                                  : "undershoot") +
            ", f0 = " + format_g17(hi) + " -> " +
            (rh.outcome == ShotOutcome::Overshoot ? "overshoot"
                                                  : "undershoot"));
    }

    if (!need_larger && std::isnan(best)) {
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (hi - lo <= opts.bracket_rtol * std::fabs(mid) ||
            mid == lo || mid == hi) {
          best = mid;
          break;
        }
        ShotResult rm =
            classify_shot(vp, omega, mid, g.r_max, opts.node_count, opts);
        if (rm.outcome == ShotOutcome::Decayed) {
          best = mid;
          break;
        }
        if (rm.outcome == ShotOutcome::NeedLargerR) {
          need_larger = true;
          break;
        }
        if (rm.outcome == ShotOutcome::Undershoot)
          lo = mid;
        else
          hi = mid;
      }
      if (!need_larger && std::isnan(best)) best = 0.5 * (lo + hi);
    }

    if (need_larger) {
      if (attempt >= opts.max_r_doublings)
        throw NonConvergent("no decaying profile up to r_max = " +
                            format_g17(g.r_max));
      g.r_max *= 2.0;
      g.n *= 2;
      continue;
    }

    // emission: sample the best shot on the uniform grid
    std::vector<double> fnodes;
    classify_shot(vp, omega, best, g.r_max, opts.node_count, opts, &fnodes,
                  &g);

    double f_max = 0.0;
    for (double v : fnodes) f_max = std::max(f_max, std::fabs(v));

    // locate the blend window: clean trajectory from |f| ~ 1e-6 f_max
    // (or 3e-7 for super-exponential decay) down to 1e-8 f_max
    LimitResult vp0 = limit_at_zero_plus(vprime);
    bool yukawa = vp0.finite && !vp0.domain_error &&
                  vp0.value - omega * omega > 0.0;
    double lvl1 = yukawa ? 1e-6 : 3e-7, lvl2 = 1e-8;
    TailPatch patch;
    patch.use_yukawa = yukawa;
    if (yukawa) patch.kappa = std::sqrt(vp0.value - omega * omega);
    int i1 = -1, i2 = -1;
    bool past_peak = false;
    for (int k = 1; k <= g.n; ++k) {
      if (std::fabs(fnodes[k]) >= 0.5 * f_max) past_peak = false;
      if (std::fabs(fnodes[k]) < 0.5 * f_max) past_peak = true;
      if (!past_peak) continue;
      if (i1 < 0 && std::fabs(fnodes[k]) <= lvl1 * f_max) i1 = k;
      if (i1 >= 0 && std::fabs(fnodes[k]) <= lvl2 * f_max) {
        i2 = k;
        break;
      }
      // trajectory corrupting (growing again): close the window here
      if (i1 >= 0 && k > i1 + 2 &&
          std::fabs(fnodes[k]) > 2.0 * std::fabs(fnodes[k - 1])) {
        i2 = k - 1;
        break;
      }
    }
    if (i1 >= 0 && i2 < 0) i2 = g.n;

    if (i1 < 0) {
      // never reached the decay window: enlarge the box
      if (attempt >= opts.max_r_doublings)
        throw NonConvergent("profile does not decay below tolerance at r_max = " +
                            format_g17(g.r_max));
      g.r_max *= 2.0;
      g.n *= 2;
      continue;
    }

    if (patch.use_yukawa) {
      // least-squares match of C exp(-kappa r)/r over the window
      double num = 0.0, den = 0.0;
      for (int k = i1; k <= i2; ++k) {
        double rr = k * g.dr();
        double basis = std::exp(-patch.kappa * rr) / rr;
        num += fnodes[k] * basis;
        den += basis * basis;
      }
      patch.coeff = den > 0.0 ? num / den : 0.0;
    }
    patch.i1 = i1;
    patch.i2 = i2;

    RadialProfile out;
    out.omega = omega;
    out.potential = potential;
    out.f0 = best;
    out.r.resize(g.n + 1);
    out.f.resize(g.n + 1);
    for (int k = 0; k <= g.n; ++k) {
      double rr = k * g.dr();
      out.r[k] = rr;
      if (k <= i1) {
        out.f[k] = fnodes[k];
      } else if (k <= i2) {
        double wgt = 0.5 - 0.5 * std::cos(M_PI * double(k - i1) / (i2 - i1));
        out.f[k] = (1.0 - wgt) * fnodes[k] + wgt * patch.asym(rr);
      } else {
        out.f[k] = patch.asym(rr);
      }
    }

    if (std::fabs(out.f.back()) > opts.decay_tol * f_max) {
      if (attempt >= opts.max_r_doublings)
        throw NonConvergent("tail above decay tolerance at r_max = " +
                            format_g17(g.r_max));
      g.r_max *= 2.0;
      g.n *= 2;
      continue;
    }
    return out;
  }
}

ScalarGaugeConfig profile_to_config(const RadialProfile& profile,
                                    const GridSpec& grid,
                                    const GaugeGroup& group,
                                    double decay_tol) {
  grid.validate();
  if (group.n_rep != 1)
    throw std::invalid_argument("profile embedding requires a U(1) group");
  if (grid.n_t < 16)
    throw std::invalid_argument(
        "n_t must resolve omega: need >= 16 samples per period");
  double period = 2.0 * M_PI / profile.omega;
  if (std::fabs(grid.period_t - period) > 1e-9 * period)
    throw std::invalid_argument(
        "grid period must equal 2 pi / omega for exact periodicity");

  const double rmax = profile.r.back();
  const double dr = profile.r[1] - profile.r[0];
  double f_max = 0.0;
  for (double v : profile.f) f_max = std::max(f_max, std::fabs(v));

  auto interp = [&](double r) -> double {
    if (r >= rmax) return 0.0;
    double q = r / dr;
    int k = static_cast<int>(q);
    if (k >= static_cast<int>(profile.f.size()) - 1)
      return profile.f.back();
    double u = q - k;
    return profile.f[k] * (1.0 - u) + profile.f[k + 1] * u;
  };

  if (std::fabs(interp(0.5 * grid.box_l)) > decay_tol * f_max)
    throw std::invalid_argument(
        "box too small: profile above decay tolerance at the face");

  ScalarGaugeConfig cfg = ScalarGaugeConfig::zeros(grid, group, false);
  const int nt = grid.n_t, nx = grid.n_x;
  for (int t = 0; t < nt; ++t) {
    // omega * t_k = 2 pi k / n_t exactly, keeping the phase periodic
    double phase = 2.0 * M_PI * t / nt;
    std::complex<double> rot(std::cos(phase), std::sin(phase));
    for (int z = 0; z < nx; ++z)
      for (int y = 0; y < nx; ++y)
        for (int x = 0; x < nx; ++x) {
          double cx = grid.coord(x), cy = grid.coord(y), cz = grid.coord(z);
          double r = std::sqrt(cx * cx + cy * cy + cz * cz);
          double fv = interp(r);
          if (fv != 0.0) cfg.phi[cfg.phi_index(t, z, y, x, 0)] = fv * rot;
        }
  }
  return cfg;
}

void write_profile_csv(const std::string& path, const RadialProfile& p) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for write");
  out << "r,f\n";
  for (std::size_t k = 0; k < p.r.size(); ++k)
    out << format_g17(p.r[k]) << ',' << format_g17(p.f[k]) << '\n';
}

std::string profile_sidecar_json(const RadialProfile& p) {
  std::vector<double> res = radial_residual(p);
  double rmax = 0.0;
  for (double v : res) rmax = std::max(rmax, std::fabs(v));
  Json j = Json::object();
  j.set("omega", Json::number(p.omega));
  j.set("f0", Json::number(p.f0));
  j.set("potential_text", Json::string(to_string(p.potential)));
  j.set("residual_max", Json::number(rmax));
  return j.dump();
}

RadialProfile read_profile_csv(const std::string& csv_path,
                               const std::string& sidecar_path) {
  std::ifstream sc(sidecar_path);
  if (!sc) throw std::runtime_error("cannot open " + sidecar_path);
  nlohmann::json meta;
  sc >> meta;

  RadialProfile p;
  p.omega = meta.at("omega").get<double>();
  p.f0 = meta.at("f0").get<double>();
  p.potential = parse_potential(meta.at("potential_text").get<std::string>());

  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open " + csv_path);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("malformed profile CSV line: " + line);
    p.r.push_back(std::stod(line.substr(0, comma)));
    p.f.push_back(std::stod(line.substr(comma + 1)));
  }
  if (p.r.size() < 7) throw std::runtime_error("profile CSV too short");
  return p;
}

}  // namespace virial
