#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "lfpp/intervals.hpp"

namespace lfpp {

struct PointZ {
  std::int64_t x = 0;
  std::int64_t y = 0;
};

// r(t) = arccosh(2 - cos t): decay rate per lattice step of the sine-series
// walk kernels. r(t) = t + O(t^3) near 0 and r(t) >= t/4 on [0, pi].
double r_of(double t);

// log(sinh x) for x > 0 without overflow.
double log_sinh(double x);

// ---------------------------------------------------------------------------
// Exit distribution (Poisson kernel) of the simple random walk on
// R_{M,N} = [0,M]x[0,N].

// Boundary points of R_{M,N} in lexicographic (x, y) order, corners included
// (they always carry zero exit mass and keep the enumeration simple).
std::vector<PointZ> boundary_points(std::int64_t M, std::int64_t N);

// Probability that the walk started at interior v exits R_{M,N} at boundary
// point z. Corners return 0.
double poisson_kernel(std::int64_t M, std::int64_t N, PointZ v, PointZ z);

// Full row of the exit distribution, aligned with boundary_points(M, N).
std::vector<double> poisson_row(std::int64_t M, std::int64_t N, PointZ v);

// ---------------------------------------------------------------------------
// Potential kernel a(x) of the planar simple random walk: a(0) = 0 and
// a(x) = (2/pi) log|x| + (2*euler + log 8)/pi + O(|x|^-2).

enum class PotentialMode { asymptotic, exact };

// "exact" evaluates a difference-equation solve on a [-200,200]^2 window
// (boundary data from the asymptotic expansion); the window error is a
// discrete-harmonic field of size ~1e-5 which cancels identically inside the
// boundary-kernel Green identity. Outside the window exact mode falls back to
// the asymptotic formula.
double potential_kernel(std::int64_t x, std::int64_t y,
                        PotentialMode mode = PotentialMode::exact);

// Constant term (2*euler + log 8)/pi of the expansion.
double potential_kernel_constant();

// ---------------------------------------------------------------------------
// Green's function of the walk killed on exiting a rectangle. Three
// independent routes are provided on purpose; tests compare them pairwise.

// Route 1: boundary-kernel identity
//   G(u,w) = sum_z H(u,z) a(z-w) - a(u-w).
double green_via_kernel(std::int64_t M, std::int64_t N, PointZ u, PointZ w,
                        PotentialMode mode = PotentialMode::exact);

// Route 2: direct linear solve of (I - P) G = I on the interior. Returns the
// dense symmetric table in row-major interior order (y outer, x inner).
// Supported up to `green_table_point_limit` interior points.
std::vector<double> green_table(const RectRegion& region);
std::size_t green_table_point_limit();

// Selected columns of G for larger regions: sparse Cholesky when the interior
// has at most 20000 points, conjugate gradients (tolerance 1e-10) beyond.
// Each returned column is in row-major interior order.
std::vector<std::vector<double>> green_columns(const RectRegion& region,
                                               const std::vector<PointZ>& sources);

// General interior solve (I - P) u = rhs with zero boundary, same row-major
// interior order and the same sparse-Cholesky/CG size policy as green_columns.
std::vector<double> dirichlet_solve(const RectRegion& region,
                                    const std::vector<double>& rhs);

// Route 3: exact separation of variables over vertical sine modes with
// closed-form tridiagonal inverses; O(N) per entry after O(M*N) setup.
class SeparableGreen {
 public:
  explicit SeparableGreen(const RectRegion& region);
  ~SeparableGreen();
  SeparableGreen(SeparableGreen&&) noexcept;
  SeparableGreen& operator=(SeparableGreen&&) noexcept;

  double at(PointZ u, PointZ w) const;
  // Covariance of two weighted horizontal line sums: each source is a list of
  // (x-interval, row, weight) triples. Cost O(modes * width) per pair.
  struct LineSpec {
    IntervalZ xs;
    std::int64_t row;
    double weight = 1.0;
  };
  double line_cov(const std::vector<LineSpec>& a,
                  const std::vector<LineSpec>& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Largest |H(v,z) - (1/4) G(z_in, v)| over all boundary z and a deterministic
// sample of interior v (z_in is the interior neighbour of z). G comes from the
// linear-solve route, so this ties the series to the solver.
double reversibility_gap(std::int64_t M, std::int64_t N,
                         std::size_t interior_samples = 16);

// ---------------------------------------------------------------------------
// Green's function of the lazy walk on the 1-D segment [a,b] (stay 1/2, step
// 1/4 each way), diagonal value: 4 (b-y)(y-a)/(b-a).
double lazy_green_1d(std::int64_t a, std::int64_t b, std::int64_t y);

// ---------------------------------------------------------------------------
// Continuum limit kernel h on the unit-height rectangle [0, 2*Upsilon] x [0,1]:
// N * H_{R_{2YN,N}}(N w, N z) -> h(w, z) at rate O(N^-2). z must lie on the
// boundary; w strictly inside.
struct PointR {
  double x = 0.0;
  double y = 0.0;
};
double continuum_kernel(double Upsilon, PointR w, PointR z);

// ---------------------------------------------------------------------------
// Average of G_{R_{2YN,N}}(v,v) over the centre-column points {YN} x N*I and
// its continuum prediction (2/pi) log N + C_I.

struct AvgGreenResult {
  std::vector<std::int64_t> sizes;
  std::vector<double> averages;  // lattice averages, one per size
  double slope = 0.0;            // least-squares slope vs log N
  double intercept = 0.0;        // least-squares intercept
  double c_continuum = 0.0;      // C_I from the quadrature
};

// intervals: disjoint pieces of [theta, 1-theta] making up the set I.
AvgGreenResult avg_green_asymptotic(double Upsilon,
                                    const std::vector<std::pair<double, double>>& intervals,
                                    const std::vector<std::int64_t>& sizes);

// The quadrature alone: C_I = (2/(pi |I|)) int_I int_{boundary} log|(Y,y)-w|
// h((Y,y),w) dw dy + (2*euler + log 8)/pi.
double c_continuum(double Upsilon,
                   const std::vector<std::pair<double, double>>& intervals);

}  // namespace lfpp
