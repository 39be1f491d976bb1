#ifndef VIRIAL_POTENTIAL_HPP_
#define VIRIAL_POTENTIAL_HPP_

#include <string>
#include <vector>

#include "virial/expr.hpp"
#include "virial/jsonio.hpp"

namespace virial {

// Limit of an expression for s -> 0+ along s = 2^-k, accelerated by a
// Richardson table.  `finite` is false when the sequence grows beyond
// divergence_threshold instead of settling.
struct LimitResult {
  double value = 0.0;
  bool finite = false;
  bool domain_error = false;
  std::string reason;
};

LimitResult limit_at_zero_plus(const PotentialExpr& expr,
                               double divergence_threshold = 1e8);

// Checks V(0) = 0 and dV/ds|_0 = C with |C| < infinity.
struct AdmissibilityReport {
  double v_at_zero = 0.0;
  double vprime_limit_at_zero = 0.0;
  bool vprime_finite = false;
  bool v_zero_vanishes = false;  // |V(0+)| within tolerance
  bool domain_error = false;
  std::string reason;

  bool admissible() const {
    return !domain_error && v_zero_vanishes && vprime_finite;
  }
};

AdmissibilityReport validate_admissibility(const PotentialExpr& v);

// g_gamma(s) = 2 gamma s V'(s) - 3 V(s).
double nogo_condition_value(const PotentialExpr& v, double gamma, double s);

// Feasible set of scaling exponents gamma in (1/2, 3/2] such that
// g_gamma(s) >= 0 (within tol_cond) on the sampled s-domain.  Each sample
// contributes a half-line in gamma; the feasible set is the intersection,
// clipped to (1/2, 3/2].  feasible_lo == 0.5 stands for the open boundary.
struct GammaFeasibility {
  double lower;  // sup over samples with s V' > 0 of 3V/(2 s V'); -inf if none
  double upper;  // inf over samples with s V' < 0 of 3V/(2 s V'); +inf if none
  bool zero_slope_violation = false;  // some sample has s V' = 0 and V > 0
  bool has_interval = false;
  double feasible_lo = 0.0;
  double feasible_hi = 0.0;
  double witness_gamma = 0.0;  // 3/2 when feasible, else interval midpoint
  double s_max = 0.0;
  int samples = 0;
  int excluded_samples = 0;  // samples dropped due to evaluation errors
  double tol_cond = 0.0;

  // sampled minima used by the static / Derrick classification branches
  double min_svp = 0.0;           // min of s V'(s)
  double min_svp_minus_3v = 0.0;  // min of s V'(s) - 3 V(s)
  double min_v = 0.0;             // min of V(s)
};

// Hybrid sample grid on (0, s_max]: n/2 log-spaced points down to
// 1e-8 * s_max plus n/2 uniform points.
std::vector<double> hybrid_sample_grid(double s_max, int n_samples);

GammaFeasibility gamma_feasible_set(const PotentialExpr& v, double s_max,
                                    int n_samples);

enum class VerdictKind { NoGo, NoGoDerrickStatic, NoGoStaticOnly,
                         Inconclusive };

struct Verdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  double gamma = 0.0;  // witness, NoGo only
  GammaFeasibility feasibility;
};

// NoGo(witness gamma) when the feasible set is nonempty (preferring
// gamma = 3/2); else the Derrick-static condition s V' >= 3V >= 0; else
// the static-only condition s V' >= 0; else Inconclusive.  All verdicts
// are relative to the sampled domain (0, s_max].
Verdict classify(const PotentialExpr& v, double s_max = 10.0,
                 int n_samples = 4096);

const char* verdict_name(VerdictKind kind);

// Appends the wire-format fields verdict/gamma/feasible_interval/s_max/
// samples to an existing object (callers may prepend their own fields).
void append_verdict_fields(Json& j, const Verdict& verdict);

// {"verdict": ..., "gamma": ..., "feasible_interval": ..., "s_max": ...,
//  "samples": ...}
std::string verdict_to_json(const Verdict& verdict);

}  // namespace virial

#endif  // VIRIAL_POTENTIAL_HPP_
