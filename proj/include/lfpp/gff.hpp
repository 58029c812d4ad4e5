#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "lfpp/intervals.hpp"
#include "lfpp/kernels.hpp"

namespace lfpp {

// One realisation of the zero-boundary Gaussian free field on a rectangle.
// values covers every lattice point of the region in row-major order (y outer,
// x inner) and vanishes on the boundary.
struct FieldSample {
  RectRegion region;
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint32_t replicate = 0;

  double at(std::int64_t x, std::int64_t y) const {
    return values[static_cast<std::size_t>(y - region.span.left) *
                      static_cast<std::size_t>(region.base.points()) +
                  static_cast<std::size_t>(x - region.base.left)];
  }
};

// Immutable sampling model with covariance equal to the rectangle's Green's
// function. Dense mode keeps a Cholesky factor of the covariance; sparse mode
// factors the precision operator I - P instead, which scales to regions far
// beyond the dense table limit. Both are exact up to factorisation roundoff.
class CovModel {
 public:
  enum class Mode { dense_cholesky, sparse_precision };

  static CovModel build(const RectRegion& region);  // mode picked by size
  static CovModel build(const RectRegion& region, Mode mode);
  ~CovModel();
  CovModel(CovModel&&) noexcept;
  CovModel& operator=(CovModel&&) noexcept;

  const RectRegion& region() const;
  Mode mode() const;
  std::int64_t interior_count() const;

  // Column u of the covariance the model actually samples from (dense: L L^T
  // column; sparse: precision inverse column). Row-major interior order.
  std::vector<double> implied_covariance_column(PointZ u) const;

 private:
  CovModel();
  struct Impl;
  std::unique_ptr<Impl> impl_;
  friend FieldSample sample_field(const CovModel&, std::uint64_t, std::uint32_t);
};

// Draw replicate r of the field. Every normal variate is a pure function of
// (seed, replicate, interior index), so results do not depend on evaluation
// order or thread count.
FieldSample sample_field(const CovModel& cov, std::uint64_t seed,
                         std::uint32_t replicate);

// Coarse/fine split over a sub-rectangle: coarse is the discrete harmonic
// extension of the sample's values on the sub-boundary, fine is the remainder
// (zero on the sub-boundary). The two parts are independent Gaussians and the
// fine part is again a zero-boundary field on sub.
struct MarkovParts {
  FieldSample coarse;
  FieldSample fine;
};
MarkovParts markov_decompose(const FieldSample& sample, const RectRegion& sub);

// Sum of the field over I x {row}. The segment must be strictly interior.
double line_sum(const FieldSample& sample, IntervalZ I, std::int64_t row);

// Exact variance of the line sum over I x {nu * height}: the double Green sum
// computed with one linear solve per source point on the line.
double line_sum_var_exact(const RectRegion& region, IntervalZ I, double nu);

// Exact covariance of two line sums in the same region, same route.
double line_sum_cov_exact(const RectRegion& region, IntervalZ I1, double nu1,
                          IntervalZ I2, double nu2);

// Abstract Gram-Schmidt on a family of unit vectors given only their inner
// products. rho and A1 describe the assumed geometric decay |(x_i, x_j)| <=
// A1 * rho^{|i-j|}; they are recorded for the property checks, not used by the
// algorithm itself.
struct GramSpec {
  int n = 0;
  std::vector<double> inner;  // n*n, symmetric, unit diagonal
  double rho = 0.0;
  double A1 = 0.0;
};

struct GramResult {
  // Squared norms of the unnormalised residuals, in order.
  std::vector<double> residual_norm_sq;
  // Inner products (y, eps_i) when y's inner products with the x_i are given.
  std::vector<double> y_inner;
};

GramResult sequential_decorrelate(const GramSpec& spec,
                                  const std::vector<double>* y_inner = nullptr);

// Sequential conditional residual transform for a covariance matrix C: row i
// of the unit lower-triangular L expresses E(v_i | v_{<i}); apply() maps an
// observation vector to its residuals, whose variances are cond_var.
struct SequentialTransform {
  int n = 0;
  std::vector<double> unit_lower;  // n*n row-major, unit diagonal
  std::vector<double> cond_var;    // conditional variances, length n
  std::vector<double> apply(const std::vector<double>& v) const;
};

SequentialTransform make_sequential_transform(const std::vector<double>& cov,
                                              int n);

// Variance ratios Var(residual_i) / Var(v_i) for a line-sum covariance matrix.
std::vector<double> decorrelate_line_sums(const std::vector<double>& cov, int n);

}  // namespace lfpp
