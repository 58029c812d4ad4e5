#include "lfpp/params.hpp"

#include <cmath>
#include <limits>

#include "lfpp/errors.hpp"

namespace lfpp {

double solve_delta(int m) {
  if (m < 1) throw usage_error("solve_delta: m must be >= 1");
  // f(d) = d*(2+d)^m - 1 is increasing on (0, inf) with f(0) = -1, so the
  // positive root is unique. Newton from d = 2^-m (the m -> inf asymptote).
  double d = std::ldexp(1.0, -m);
  for (int it = 0; it < 200; ++it) {
    const double b = 2.0 + d;
    const double pw = std::pow(b, m);
    const double f = d * pw - 1.0;
    const double fp = pw + m * d * pw / b;
    const double step = f / fp;
    d -= step;
    if (std::abs(f) < 1e-15 && std::abs(step) < 1e-16) break;
  }
  const double resid = d * std::pow(2.0 + d, m) - 1.0;
  if (!(std::abs(resid) < 1e-14))
    throw numerical_error("solve_delta: Newton residual above 1e-14");
  return d;
}

ScaleParams make_scale_params(int m, int m_Gamma, double gamma_fpp, double beta,
                              double epsilon) {
  if (m_Gamma < 0) throw usage_error("make_scale_params: m_Gamma must be >= 0");
  if (beta <= 0.0) throw usage_error("make_scale_params: beta must be > 0");
  if (gamma_fpp < 0.0) throw usage_error("make_scale_params: gamma must be >= 0");
  ScaleParams p;
  p.m = m;
  p.delta = solve_delta(m);
  p.m_Gamma = m_Gamma;
  p.Gamma = std::pow(2.0 + p.delta, m_Gamma);
  p.alpha = std::pow(p.delta, -0.25);
  p.gamma_fpp = gamma_fpp;
  p.beta = beta;
  p.epsilon = epsilon;
  return p;
}

double scale_length(const ScaleParams& p, int level) {
  const double lb = std::log(p.base());
  if (level * lb >= std::log(std::numeric_limits<double>::max()))
    throw numerical_error("scale_length: a_level overflows double");
  return std::pow(p.base(), level);
}

bool paper_regime_ok(const ScaleParams& p) {
  if (p.gamma_fpp <= 0.0) return false;
  const double g2 = p.Gamma * p.gamma_fpp * p.gamma_fpp;
  return p.alpha <= g2 && g2 < p.base() * p.alpha;
}

}  // namespace lfpp
