#pragma once

#include <cstdint>

namespace lfpp {

// Parameters of the scale system. delta is the unique positive solution of
// delta * (2 + delta)^m = 1, so that the scale lengths a_l = (2 + delta)^l
// satisfy a_l = 2*a_{l-1} + a_{l-m-1}: an interval of length a_l splits into
// two side pieces of length a_{l-1} and a middle piece of length a_{l-m-1}.
struct ScaleParams {
  double delta = 0.0;
  int m = 2;
  double gamma_fpp = 0.0;  // exponent of the vertex weights e^{gamma * field}
  double Gamma = 1.0;      // aspect ratio of crossing rectangles, (2+delta)^m_Gamma
  int m_Gamma = 2;
  double alpha = 0.0;      // delta^{-1/4}
  double beta = 4.0;       // switch interval length multiplier (lattice units of N)
  double epsilon = 0.0;    // small slack used by diagnostic checks

  double base() const { return 2.0 + delta; }
};

// Solve delta * (2 + delta)^m = 1 by Newton iteration, to residual < 1e-14.
double solve_delta(int m);

// Standard construction: derives delta, Gamma, alpha from (m, m_Gamma).
ScaleParams make_scale_params(int m, int m_Gamma, double gamma_fpp = 0.0,
                              double beta = 4.0, double epsilon = 0.0);

// a_level = (2 + delta)^level. Throws numerical_error when the result would
// overflow a double.
double scale_length(const ScaleParams& p, int level);

// The aspect/exponent window alpha <= Gamma * gamma^2 < (2+delta) * alpha.
// Desk-scale parameter sets normally do not satisfy it; callers that require
// the asymptotic regime check this explicitly.
bool paper_regime_ok(const ScaleParams& p);

}  // namespace lfpp
