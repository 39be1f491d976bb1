#include "virial/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "virial/jsonio.hpp"

namespace virial {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

LimitResult limit_at_zero_plus(const PotentialExpr& expr,
                               double divergence_threshold) {
  LimitResult res;
  CompiledPotential c(expr);

  // Sample along s = 2^-k.  The deepest samples decide domain errors: an
  // expression defined only away from 0 fails there and has no limit.
  constexpr int k_lo = 8, k_hi = 44;
  std::vector<double> vals;
  vals.reserve(k_hi - k_lo + 1);
  int failures_deep = 0;
  for (int k = k_lo; k <= k_hi; ++k) {
    double s = std::ldexp(1.0, -k);
    double v;
    if (c.try_eval(s, &v) && std::isfinite(v)) {
      vals.push_back(v);
      failures_deep = 0;
    } else {
      vals.clear();  // keep only an unbroken tail of valid samples
      ++failures_deep;
    }
  }
  if (vals.size() < 4) {
    res.domain_error = true;
    res.reason = "evaluation fails along s -> 0+";
    return res;
  }

  // Richardson table for errors c1*s + c2*s^2 + ...; with s halving each
  // row, column j removes the s^j term.  Divergent sequences stay
  // divergent under the transform, so the threshold test below is sound.
  std::size_t m = std::min<std::size_t>(vals.size(), 10);
  std::vector<double> t(vals.end() - m, vals.end());
  double extrap = t.back();
  for (std::size_t j = 1; j < m; ++j) {
    double w = std::ldexp(1.0, static_cast<int>(j));  // 2^j
    for (std::size_t i = 0; i + j < m; ++i)
      t[i] = (w * t[i + 1] - t[i]) / (w - 1.0);
    extrap = t[0];
    if (j >= 5) break;
  }

  res.value = extrap;
  double raw_tail = vals.back();
  bool magnitude_ok = std::isfinite(extrap) &&
                      std::fabs(extrap) < divergence_threshold &&
                      std::fabs(raw_tail) < divergence_threshold;

  // A logarithmic divergence (e.g. V' of -s ln s) stays far below any
  // magnitude threshold but has *constant* tail differences along the
  // halving sequence, while convergent limits have geometrically
  // shrinking ones.  Flag same-sign near-constant differences.
  bool log_divergent = false;
  if (vals.size() >= 10) {
    double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
    bool same_sign = true;
    double first = vals[vals.size() - 9 + 1] - vals[vals.size() - 9];
    for (std::size_t i = vals.size() - 9; i + 1 < vals.size(); ++i) {
      double d = vals[i + 1] - vals[i];
      if (d * first <= 0.0) same_sign = false;
      dmin = std::min(dmin, std::fabs(d));
      dmax = std::max(dmax, std::fabs(d));
    }
    double floor = 1e-7 * (1.0 + std::fabs(raw_tail));
    log_divergent = same_sign && dmin > floor && dmax <= 1.15 * dmin;
  }

  res.finite = magnitude_ok && !log_divergent;
  // Snap noise from the extrapolation to an exact zero; callers substitute
  // this value at lattice sites with s identically 0.
  if (res.finite && std::fabs(res.value) < 1e-10) res.value = 0.0;
  return res;
}

AdmissibilityReport validate_admissibility(const PotentialExpr& v) {
  AdmissibilityReport rep;

  LimitResult lv = limit_at_zero_plus(v);
  if (lv.domain_error) {
    rep.domain_error = true;
    rep.reason = "V(s): " + lv.reason;
    return rep;
  }
  rep.v_at_zero = lv.value;
  if (!lv.finite) {
    rep.domain_error = true;
    rep.reason = "V(s) diverges as s -> 0+";
    return rep;
  }
  rep.v_zero_vanishes = std::fabs(rep.v_at_zero) <= 1e-8;

  LimitResult lp = limit_at_zero_plus(differentiate(v));
  if (lp.domain_error) {
    rep.domain_error = true;
    rep.reason = "V'(s): " + lp.reason;
    return rep;
  }
  rep.vprime_limit_at_zero = lp.value;
  rep.vprime_finite = lp.finite;
  return rep;
}

double nogo_condition_value(const PotentialExpr& v, double gamma, double s) {
  if (s < 0.0) throw std::invalid_argument("s must be nonnegative");
  PotentialExpr vp = differentiate(v);
  double svp;
  if (s == 0.0) {
    // limit of s V'(s); equals 0 for any potential with finite C and for
    // the logarithmic family
    LimitResult lim = limit_at_zero_plus(
        PotentialExpr(make_mul(make_var(), vp.root())));
    if (lim.domain_error || !lim.finite)
      throw EvalDomainError("s V'(s) has no finite limit at s = 0");
    svp = lim.value;
  } else {
    svp = s * vp.eval(s);
  }
  double vv;
  if (s == 0.0) {
    if (!v.try_eval(0.0, &vv)) {
      LimitResult lim = limit_at_zero_plus(v);
      if (lim.domain_error || !lim.finite)
        throw EvalDomainError("V(s) has no finite limit at s = 0");
      vv = lim.value;
    }
  } else {
    vv = v.eval(s);
  }
  return 2.0 * gamma * svp - 3.0 * vv;
}

std::vector<double> hybrid_sample_grid(double s_max, int n_samples) {
  if (!(s_max > 0.0)) throw std::invalid_argument("s_max must be positive");
  if (n_samples < 2) throw std::invalid_argument("n_samples must be >= 2");
  std::vector<double> grid;
  grid.reserve(n_samples);
  int n_log = n_samples / 2;
  int n_uni = n_samples - n_log;
  double s_min = 1e-8 * s_max;
  if (n_log == 1) {
    grid.push_back(s_min);
  } else {
    double ratio = std::log(s_max / s_min) / (n_log - 1);
    for (int i = 0; i < n_log; ++i)
      grid.push_back(s_min * std::exp(ratio * i));
  }
  for (int j = 1; j <= n_uni; ++j)
    grid.push_back(s_max * static_cast<double>(j) / n_uni);
  return grid;
}

GammaFeasibility gamma_feasible_set(const PotentialExpr& v, double s_max,
                                    int n_samples) {
  GammaFeasibility out;
  out.s_max = s_max;
  out.samples = n_samples;
  out.lower = -kInf;
  out.upper = kInf;
  out.min_svp = kInf;
  out.min_svp_minus_3v = kInf;
  out.min_v = kInf;

  std::vector<double> grid = hybrid_sample_grid(s_max, n_samples);
  CompiledPotential cv(v);
  CompiledPotential cvp(differentiate(v));

  struct Sample {
    double a;  // s V'(s)
    double b;  // 3 V(s)
  };
  std::vector<Sample> samples;
  samples.reserve(grid.size());
  double max_abs_v = 0.0, max_abs_svp = 0.0;
  for (double s : grid) {
    double vv, vp;
    if (!cv.try_eval(s, &vv) || !cvp.try_eval(s, &vp) ||
        !std::isfinite(vv) || !std::isfinite(vp)) {
      ++out.excluded_samples;
      continue;
    }
    double a = s * vp;
    samples.push_back({a, 3.0 * vv});
    max_abs_v = std::max(max_abs_v, std::fabs(vv));
    max_abs_svp = std::max(max_abs_svp, std::fabs(a));
    out.min_svp = std::min(out.min_svp, a);
    out.min_svp_minus_3v = std::min(out.min_svp_minus_3v, a - 3.0 * vv);
    out.min_v = std::min(out.min_v, vv);
  }

  out.tol_cond = 1e-9 * (1.0 + max_abs_v + max_abs_svp);
  // Build the interval with half the tolerance so that every gamma in it
  // satisfies g_gamma >= -tol_cond with margin for rounding.
  double slack = 0.5 * out.tol_cond;

  for (const Sample& smp : samples) {
    if (smp.a > 0.0) {
      out.lower = std::max(out.lower, (smp.b - slack) / (2.0 * smp.a));
    } else if (smp.a < 0.0) {
      out.upper = std::min(out.upper, (smp.b - slack) / (2.0 * smp.a));
    } else if (smp.b > slack) {
      out.zero_slope_violation = true;  // g = -3V < 0 for every gamma
    }
  }

  if (!out.zero_slope_violation && !samples.empty()) {
    double lo = std::max(out.lower, 0.5);
    double hi = std::min(out.upper, 1.5);
    if (hi > 0.5 && hi >= lo) {
      out.has_interval = true;
      out.feasible_lo = lo;
      out.feasible_hi = hi;
      out.witness_gamma = (lo <= 1.5 && 1.5 <= hi) ? 1.5 : 0.5 * (lo + hi);
    }
  }
  return out;
}

Verdict classify(const PotentialExpr& v, double s_max, int n_samples) {
  Verdict verdict;
  verdict.feasibility = gamma_feasible_set(v, s_max, n_samples);
  const GammaFeasibility& f = verdict.feasibility;
  double tol = f.tol_cond;
  if (f.has_interval) {
    verdict.kind = VerdictKind::NoGo;
    verdict.gamma = f.witness_gamma;
  } else if (f.min_svp_minus_3v >= -tol && f.min_v >= -tol) {
    verdict.kind = VerdictKind::NoGoDerrickStatic;  // s V' >= 3V >= 0
  } else if (f.min_svp >= -tol) {
    verdict.kind = VerdictKind::NoGoStaticOnly;  // s V' >= 0
  } else {
    verdict.kind = VerdictKind::Inconclusive;
  }
  return verdict;
}

const char* verdict_name(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::NoGo:
      return "NoGo";
    case VerdictKind::NoGoDerrickStatic:
      return "NoGoDerrickStatic";
    case VerdictKind::NoGoStaticOnly:
      return "NoGoStaticOnly";
    case VerdictKind::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

void append_verdict_fields(Json& j, const Verdict& verdict) {
  j.set("verdict", Json::string(verdict_name(verdict.kind)));
  if (verdict.kind == VerdictKind::NoGo)
    j.set("gamma", Json::number(verdict.gamma));
  else
    j.set("gamma", Json::null());
  if (verdict.feasibility.has_interval) {
    Json iv = Json::array();
    iv.push(Json::number(verdict.feasibility.feasible_lo));
    iv.push(Json::number(verdict.feasibility.feasible_hi));
    j.set("feasible_interval", std::move(iv));
  } else {
    j.set("feasible_interval", Json::null());
  }
  j.set("s_max", Json::number(verdict.feasibility.s_max));
  j.set("samples", Json::integer(verdict.feasibility.samples));
}

std::string verdict_to_json(const Verdict& verdict) {
  Json j = Json::object();
  append_verdict_fields(j, verdict);
  return j.dump();
}

}  // namespace virial
