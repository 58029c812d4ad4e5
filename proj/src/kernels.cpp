#include "lfpp/kernels.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <vector>

#include "lfpp/errors.hpp"

namespace lfpp {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kEuler = 0.57721566490153286060651209008240243;

std::int64_t checked_interior(std::int64_t M, std::int64_t N) {
  if (M < 2 || N < 2) throw usage_error("rectangle must be at least 2x2");
  return (M - 1) * (N - 1);
}

// sinh(a)/sinh(b) for 0 <= a <= b, carried out in log space.
double sinh_ratio(double a, double b) {
  if (a <= 0.0) return 0.0;
  return std::exp(log_sinh(a) - log_sinh(b));
}

}  // namespace

double r_of(double t) { return std::acosh(2.0 - std::cos(t)); }

double log_sinh(double x) {
  if (x <= 0.0) throw usage_error("log_sinh: argument must be positive");
  // sinh x = e^x (1 - e^{-2x}) / 2
  return x + std::log1p(-std::exp(-2.0 * x)) - std::log(2.0);
}

// ---------------------------------------------------------------------------
// Poisson kernel

std::vector<PointZ> boundary_points(std::int64_t M, std::int64_t N) {
  checked_interior(M, N);
  std::vector<PointZ> out;
  for (std::int64_t x = 0; x <= M; ++x)
    for (std::int64_t y = 0; y <= N; ++y)
      if (x == 0 || x == M || y == 0 || y == N) out.push_back({x, y});
  return out;
}

namespace {

bool is_corner(std::int64_t M, std::int64_t N, PointZ z) {
  return (z.x == 0 || z.x == M) && (z.y == 0 || z.y == N);
}

// Series for exit through the left side x = 0 at height y1.
double poisson_left(std::int64_t M, std::int64_t N, PointZ v, std::int64_t y1) {
  double sum = 0.0;
  for (std::int64_t j = 1; j <= N - 1; ++j) {
    const double rj = r_of(j * kPi / N);
    const double term = sinh_ratio(rj * static_cast<double>(M - v.x),
                                   rj * static_cast<double>(M)) *
                        std::sin(j * kPi * v.y / N) * std::sin(j * kPi * y1 / N);
    sum += term;
  }
  return 2.0 / N * sum;
}

}  // namespace

double poisson_kernel(std::int64_t M, std::int64_t N, PointZ v, PointZ z) {
  checked_interior(M, N);
  if (v.x <= 0 || v.x >= M || v.y <= 0 || v.y >= N)
    throw usage_error("poisson_kernel: v must be interior");
  if (is_corner(M, N, z)) return 0.0;
  if (z.x == 0) return poisson_left(M, N, v, z.y);
  if (z.x == M) return poisson_left(M, N, {M - v.x, v.y}, z.y);
  // Horizontal sides: same series with the axes swapped.
  if (z.y == 0) return poisson_left(N, M, {v.y, v.x}, z.x);
  if (z.y == N) return poisson_left(N, M, {N - v.y, v.x}, z.x);
  throw usage_error("poisson_kernel: z must be on the boundary");
}

std::vector<double> poisson_row(std::int64_t M, std::int64_t N, PointZ v) {
  const auto bps = boundary_points(M, N);
  std::vector<double> out(bps.size());
  for (std::size_t i = 0; i < bps.size(); ++i)
    out[i] = poisson_kernel(M, N, v, bps[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Potential kernel

double potential_kernel_constant() {
  return (2.0 * kEuler + std::log(8.0)) / kPi;
}

namespace {

double potential_asym(double x, double y) {
  const double r2 = x * x + y * y;
  if (r2 == 0.0) return 0.0;
  return std::log(r2) / kPi + potential_kernel_constant();
}

constexpr std::int64_t kWinR = 200;  // half-width of the exact-mode window

// Direct solver for (I - P) u = f on the interior of [0,M]x[0,N] with zero
// boundary, via vertical sine modes and a Thomas solve per mode. f and the
// result are row-major over interior points ((N-1) rows of (M-1) values).
std::vector<double> dirichlet_solve_separable(std::int64_t M, std::int64_t N,
                                              const std::vector<double>& f) {
  const std::int64_t W = M - 1, H = N - 1;
  std::vector<double> fhat(static_cast<std::size_t>(W) * H, 0.0);
  std::vector<double> sn(static_cast<std::size_t>(H) * H);
  for (std::int64_t j = 1; j <= H; ++j)
    for (std::int64_t y = 1; y <= H; ++y)
      sn[(j - 1) * H + (y - 1)] = std::sin(j * kPi * y / N);
  // Forward transform in y.
  for (std::int64_t j = 1; j <= H; ++j) {
    for (std::int64_t y = 1; y <= H; ++y) {
      const double s = sn[(j - 1) * H + (y - 1)] * (2.0 / N);
      if (s == 0.0) continue;
      const double* frow = f.data() + (y - 1) * W;
      double* grow = fhat.data() + (j - 1) * W;
      for (std::int64_t x = 0; x < W; ++x) grow[x] += s * frow[x];
    }
  }
  // Mode-wise tridiagonal solve: -1/4 off diagonal, 1 - cos(j pi / N)/2 on it.
  std::vector<double> c(W), d(W);
  for (std::int64_t j = 1; j <= H; ++j) {
    const double diag = 1.0 - 0.5 * std::cos(j * kPi / N);
    double* g = fhat.data() + (j - 1) * W;
    c[0] = -0.25 / diag;
    d[0] = g[0] / diag;
    for (std::int64_t x = 1; x < W; ++x) {
      const double m = diag + 0.25 * c[x - 1];
      c[x] = -0.25 / m;
      d[x] = (g[x] + 0.25 * d[x - 1]) / m;
    }
    g[W - 1] = d[W - 1];
    for (std::int64_t x = W - 2; x >= 0; --x) g[x] = d[x] - c[x] * g[x + 1];
  }
  // Inverse transform.
  std::vector<double> u(static_cast<std::size_t>(W) * H, 0.0);
  for (std::int64_t y = 1; y <= H; ++y) {
    double* urow = u.data() + (y - 1) * W;
    for (std::int64_t j = 1; j <= H; ++j) {
      const double s = sn[(j - 1) * H + (y - 1)];
      if (s == 0.0) continue;
      const double* grow = fhat.data() + (j - 1) * W;
      for (std::int64_t x = 0; x < W; ++x) urow[x] += s * grow[x];
    }
  }
  return u;
}

struct PotentialWindow {
  std::vector<double> tab;  // (2R+1)^2 values, row-major over y then x
  double at(std::int64_t x, std::int64_t y) const {
    return tab[static_cast<std::size_t>(y + kWinR) * (2 * kWinR + 1) +
               static_cast<std::size_t>(x + kWinR)];
  }
};

const PotentialWindow& potential_window() {
  static PotentialWindow win;
  static std::once_flag flag;
  std::call_once(flag, [] {
    const std::int64_t L = 2 * kWinR;  // rectangle [0,L]^2, centre (R,R)
    const std::int64_t W = L - 1;
    std::vector<double> f(static_cast<std::size_t>(W) * W, 0.0);
    auto bc = [&](std::int64_t x, std::int64_t y) {
      return potential_asym(static_cast<double>(x - kWinR),
                            static_cast<double>(y - kWinR));
    };
    // Boundary data folded into the right-hand side, minus the unit source at
    // the centre (the defining inhomogeneity of the kernel).
    for (std::int64_t y = 1; y <= W; ++y)
      for (std::int64_t x = 1; x <= W; ++x) {
        double v = 0.0;
        if (x == 1) v += bc(0, y);
        if (x == W) v += bc(L, y);
        if (y == 1) v += bc(x, 0);
        if (y == W) v += bc(x, L);
        f[(y - 1) * W + (x - 1)] = 0.25 * v;
      }
    f[(kWinR - 1) * W + (kWinR - 1)] -= 1.0;
    const auto u = dirichlet_solve_separable(L, L, f);
    win.tab.assign(static_cast<std::size_t>(L + 1) * (L + 1), 0.0);
    for (std::int64_t y = 0; y <= L; ++y)
      for (std::int64_t x = 0; x <= L; ++x) {
        double v;
        if (x == 0 || x == L || y == 0 || y == L)
          v = bc(x, y);
        else
          v = u[(y - 1) * W + (x - 1)];
        win.tab[static_cast<std::size_t>(y) * (L + 1) + x] = v;
      }
    // Pin the normalisation a(0) = 0 exactly; the shift keeps the residual
    // field harmonic, which is what the Green identity relies on.
    const double centre = win.at(0, 0);
    for (auto& v : win.tab) v -= centre;
  });
  return win;
}

}  // namespace

double potential_kernel(std::int64_t x, std::int64_t y, PotentialMode mode) {
  if (x == 0 && y == 0) return 0.0;
  if (mode == PotentialMode::asymptotic)
    return potential_asym(static_cast<double>(x), static_cast<double>(y));
  if (std::llabs(x) <= kWinR && std::llabs(y) <= kWinR)
    return potential_window().at(x, y);
  return potential_asym(static_cast<double>(x), static_cast<double>(y));
}

// ---------------------------------------------------------------------------
// Green's function routes

double green_via_kernel(std::int64_t M, std::int64_t N, PointZ u, PointZ w,
                        PotentialMode mode) {
  checked_interior(M, N);
  if (u.x <= 0 || u.x >= M || u.y <= 0 || u.y >= N || w.x <= 0 || w.x >= M ||
      w.y <= 0 || w.y >= N)
    throw usage_error("green_via_kernel: points must be interior");
  double sum = 0.0;
  for (const auto& z : boundary_points(M, N)) {
    if (is_corner(M, N, z)) continue;
    sum += poisson_kernel(M, N, u, z) *
           potential_kernel(z.x - w.x, z.y - w.y, mode);
  }
  return sum - potential_kernel(u.x - w.x, u.y - w.y, mode);
}

namespace {

struct InteriorGrid {
  std::int64_t x0, y0, W, H;  // interior [x0..x0+W-1] x [y0..y0+H-1]
  explicit InteriorGrid(const RectRegion& r)
      : x0(r.base.left + 1),
        y0(r.span.left + 1),
        W(r.base.length() - 1),
        H(r.span.length() - 1) {
    if (W < 1 || H < 1) throw usage_error("region has empty interior");
  }
  std::int64_t count() const { return W * H; }
  std::int64_t index(PointZ p) const {
    return (p.y - y0) * W + (p.x - x0);
  }
  bool interior(PointZ p) const {
    return p.x >= x0 && p.x < x0 + W && p.y >= y0 && p.y < y0 + H;
  }
};

Eigen::SparseMatrix<double> laplace_matrix(const InteriorGrid& g) {
  using T = Eigen::Triplet<double>;
  std::vector<T> trips;
  trips.reserve(static_cast<std::size_t>(g.count()) * 5);
  for (std::int64_t y = 0; y < g.H; ++y)
    for (std::int64_t x = 0; x < g.W; ++x) {
      const auto i = y * g.W + x;
      trips.emplace_back(i, i, 1.0);
      if (x > 0) trips.emplace_back(i, i - 1, -0.25);
      if (x + 1 < g.W) trips.emplace_back(i, i + 1, -0.25);
      if (y > 0) trips.emplace_back(i, i - g.W, -0.25);
      if (y + 1 < g.H) trips.emplace_back(i, i + g.W, -0.25);
    }
  Eigen::SparseMatrix<double> A(g.count(), g.count());
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

// Matrix-free conjugate gradients for (I - P) x = b on the interior grid.
std::vector<double> cg_solve(const InteriorGrid& g, const std::vector<double>& b,
                             double tol) {
  const auto n = static_cast<std::size_t>(g.count());
  std::vector<double> x(n, 0.0), r(b), p(b), Ap(n);
  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (std::int64_t y = 0; y < g.H; ++y) {
      const auto row = y * g.W;
      for (std::int64_t xx = 0; xx < g.W; ++xx) {
        const auto i = row + xx;
        double acc = v[i];
        if (xx > 0) acc -= 0.25 * v[i - 1];
        if (xx + 1 < g.W) acc -= 0.25 * v[i + 1];
        if (y > 0) acc -= 0.25 * v[i - g.W];
        if (y + 1 < g.H) acc -= 0.25 * v[i + g.W];
        out[i] = acc;
      }
    }
  };
  double rr = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rr += r[i] * r[i];
    bb += b[i] * b[i];
  }
  const double stop2 = tol * tol * (bb > 0 ? bb : 1.0);
  for (std::int64_t it = 0; it < 10 * g.count() + 100; ++it) {
    if (rr <= stop2) break;
    apply(p, Ap);
    double pAp = 0.0;
    for (std::size_t i = 0; i < n; ++i) pAp += p[i] * Ap[i];
    const double alpha = rr / pAp;
    double rr_new = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
      rr_new += r[i] * r[i];
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  if (rr > stop2)
    throw numerical_error("cg_solve: conjugate gradients did not converge");
  return x;
}

}  // namespace

std::size_t green_table_point_limit() { return 4000; }

std::vector<double> green_table(const RectRegion& region) {
  InteriorGrid g(region);
  const auto n = g.count();
  if (static_cast<std::size_t>(n) > green_table_point_limit())
    throw resource_error("green_table: interior too large for a dense table");
  Eigen::SparseMatrix<double> A = laplace_matrix(g);
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(A);
  if (llt.info() != Eigen::Success)
    throw numerical_error("green_table: factorisation failed");
  std::vector<double> out(static_cast<std::size_t>(n) * n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (std::int64_t j = 0; j < n; ++j) {
    b[j] = 1.0;
    Eigen::VectorXd col = llt.solve(b);
    b[j] = 0.0;
    for (std::int64_t i = 0; i < n; ++i)
      out[static_cast<std::size_t>(i) * n + j] = col[i];
  }
  return out;
}

std::vector<std::vector<double>> green_columns(const RectRegion& region,
                                               const std::vector<PointZ>& sources) {
  InteriorGrid g(region);
  const auto n = g.count();
  std::vector<std::vector<double>> out;
  out.reserve(sources.size());
  if (n <= 20000) {
    Eigen::SparseMatrix<double> A = laplace_matrix(g);
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(A);
    if (llt.info() != Eigen::Success)
      throw numerical_error("green_columns: factorisation failed");
    Eigen::VectorXd b(n);
    for (const auto& s : sources) {
      if (!g.interior(s)) throw usage_error("green_columns: source not interior");
      b.setZero();
      b[g.index(s)] = 1.0;
      Eigen::VectorXd col = llt.solve(b);
      out.emplace_back(col.data(), col.data() + n);
    }
    return out;
  }
  std::vector<double> b(static_cast<std::size_t>(n), 0.0);
  for (const auto& s : sources) {
    if (!g.interior(s)) throw usage_error("green_columns: source not interior");
    std::fill(b.begin(), b.end(), 0.0);
    b[static_cast<std::size_t>(g.index(s))] = 1.0;
    out.push_back(cg_solve(g, b, 1e-10));
  }
  return out;
}

std::vector<double> dirichlet_solve(const RectRegion& region,
                                    const std::vector<double>& rhs) {
  InteriorGrid g(region);
  const auto n = g.count();
  if (rhs.size() != static_cast<std::size_t>(n))
    throw usage_error("dirichlet_solve: rhs size mismatch");
  if (n <= 20000) {
    Eigen::SparseMatrix<double> A = laplace_matrix(g);
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(A);
    if (llt.info() != Eigen::Success)
      throw numerical_error("dirichlet_solve: factorisation failed");
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n);
    Eigen::VectorXd u = llt.solve(b);
    return std::vector<double>(u.data(), u.data() + n);
  }
  return cg_solve(g, rhs, 1e-10);
}

// ---------------------------------------------------------------------------
// Separable route

struct SeparableGreen::Impl {
  std::int64_t M, N, x0, y0;
  // logsinh(r_j * x) tables, mode-major; lg[j-1][x], x in [0, M].
  std::vector<std::vector<double>> lg;
  std::vector<double> rj;
  std::vector<double> diag;  // tridiagonal diagonal per mode
};

SeparableGreen::SeparableGreen(const RectRegion& region)
    : impl_(new Impl) {
  impl_->M = region.base.length();
  impl_->N = region.span.length();
  impl_->x0 = region.base.left;
  impl_->y0 = region.span.left;
  const auto M = impl_->M, N = impl_->N;
  checked_interior(M, N);
  impl_->rj.resize(N - 1);
  impl_->diag.resize(N - 1);
  impl_->lg.resize(N - 1);
  for (std::int64_t j = 1; j <= N - 1; ++j) {
    const double r = r_of(j * kPi / N);
    impl_->rj[j - 1] = r;
    impl_->diag[j - 1] = 1.0 - 0.5 * std::cos(j * kPi / N);
    auto& tab = impl_->lg[j - 1];
    tab.resize(M + 1);
    tab[0] = -std::numeric_limits<double>::infinity();
    for (std::int64_t x = 1; x <= M; ++x) tab[x] = log_sinh(r * x);
  }
}

SeparableGreen::~SeparableGreen() = default;
SeparableGreen::SeparableGreen(SeparableGreen&&) noexcept = default;
SeparableGreen& SeparableGreen::operator=(SeparableGreen&&) noexcept = default;

double SeparableGreen::at(PointZ u, PointZ w) const {
  const auto& im = *impl_;
  const std::int64_t ux = u.x - im.x0, uy = u.y - im.y0;
  const std::int64_t wx = w.x - im.x0, wy = w.y - im.y0;
  if (ux <= 0 || ux >= im.M || uy <= 0 || uy >= im.N || wx <= 0 || wx >= im.M ||
      wy <= 0 || wy >= im.N)
    throw usage_error("SeparableGreen::at: points must be interior");
  const std::int64_t lo = std::min(ux, wx), hi = std::max(ux, wx);
  double sum = 0.0;
  for (std::int64_t j = 1; j <= im.N - 1; ++j) {
    const auto& tab = im.lg[j - 1];
    // Closed-form inverse of the mode tridiagonal: 4 sinh(r x_<) sinh(r (M -
    // x_>)) / (sinh(r M) sinh r).
    const double s =
        4.0 * std::exp(tab[lo] + tab[im.M - hi] - tab[im.M] - tab[1]);
    sum += (2.0 / im.N) * std::sin(j * kPi * uy / im.N) *
           std::sin(j * kPi * wy / im.N) * s;
  }
  return sum;
}

double SeparableGreen::line_cov(const std::vector<LineSpec>& a,
                                const std::vector<LineSpec>& b) const {
  const auto& im = *impl_;
  const std::int64_t W = im.M - 1;
  std::vector<double> rhs(static_cast<std::size_t>(W)), c(W), d(W);
  double total = 0.0;
  for (std::int64_t j = 1; j <= im.N - 1; ++j) {
    std::fill(rhs.begin(), rhs.end(), 0.0);
    bool any = false;
    for (const auto& spec : b) {
      const std::int64_t row = spec.row - im.y0;
      if (row <= 0 || row >= im.N) throw usage_error("line_cov: row not interior");
      const double s = spec.weight * std::sin(j * kPi * row / im.N);
      if (s == 0.0) continue;
      const std::int64_t lo = std::max<std::int64_t>(spec.xs.left - im.x0, 1);
      const std::int64_t hi = std::min<std::int64_t>(spec.xs.right - im.x0, im.M - 1);
      for (std::int64_t x = lo; x <= hi; ++x) rhs[x - 1] += s;
      any = any || lo <= hi;
    }
    if (!any) continue;
    const double diag = im.diag[j - 1];
    c[0] = -0.25 / diag;
    d[0] = rhs[0] / diag;
    for (std::int64_t x = 1; x < W; ++x) {
      const double mm = diag + 0.25 * c[x - 1];
      c[x] = -0.25 / mm;
      d[x] = (rhs[x] + 0.25 * d[x - 1]) / mm;
    }
    rhs[W - 1] = d[W - 1];
    for (std::int64_t x = W - 2; x >= 0; --x) rhs[x] = d[x] - c[x] * rhs[x + 1];
    double mode_sum = 0.0;
    for (const auto& spec : a) {
      const std::int64_t row = spec.row - im.y0;
      const double s = spec.weight * std::sin(j * kPi * row / im.N);
      if (s == 0.0) continue;
      const std::int64_t lo = std::max<std::int64_t>(spec.xs.left - im.x0, 1);
      const std::int64_t hi = std::min<std::int64_t>(spec.xs.right - im.x0, im.M - 1);
      double acc = 0.0;
      for (std::int64_t x = lo; x <= hi; ++x) acc += rhs[x - 1];
      mode_sum += s * acc;
    }
    total += (2.0 / im.N) * mode_sum;
  }
  return total;
}

double reversibility_gap(std::int64_t M, std::int64_t N,
                         std::size_t interior_samples) {
  const auto n = checked_interior(M, N);
  if (static_cast<std::size_t>(n) > green_table_point_limit())
    throw resource_error("reversibility_gap: rectangle too large");
  RectRegion region{{0, M}, {0, N}};
  const auto G = green_table(region);
  InteriorGrid g(region);
  // Deterministic interior sample: evenly strided through the index space.
  std::vector<PointZ> vs;
  const std::int64_t stride =
      std::max<std::int64_t>(1, n / static_cast<std::int64_t>(interior_samples));
  for (std::int64_t i = 0; i < n; i += stride)
    vs.push_back({g.x0 + i % g.W, g.y0 + i / g.W});
  double gap = 0.0;
  for (const auto& z : boundary_points(M, N)) {
    if (is_corner(M, N, z)) continue;
    PointZ zin = z;
    if (z.x == 0) zin.x = 1;
    if (z.x == M) zin.x = M - 1;
    if (z.y == 0) zin.y = 1;
    if (z.y == N) zin.y = N - 1;
    for (const auto& v : vs) {
      const double h = poisson_kernel(M, N, v, z);
      const double gv =
          G[static_cast<std::size_t>(g.index(zin)) * n + g.index(v)];
      gap = std::max(gap, std::abs(h - 0.25 * gv));
    }
  }
  return gap;
}

// ---------------------------------------------------------------------------
// Lazy 1-D Green

double lazy_green_1d(std::int64_t a, std::int64_t b, std::int64_t y) {
  if (!(a < y && y < b)) throw usage_error("lazy_green_1d: need a < y < b");
  return 4.0 * static_cast<double>(b - y) * static_cast<double>(y - a) /
         static_cast<double>(b - a);
}

// ---------------------------------------------------------------------------
// Continuum kernel

namespace {

// Series for the left boundary z = (0, zy).
double h_left(double U, PointR w, double zy) {
  double sum = 0.0;
  for (int j = 1; j <= 200000; ++j) {
    const double ratio = sinh_ratio(j * kPi * (2.0 * U - w.x), 2.0 * j * kPi * U);
    const double term = ratio * std::sin(j * kPi * w.y) * std::sin(j * kPi * zy);
    sum += term;
    if (ratio < 1e-17 && j > 8) break;
  }
  return 2.0 * sum;
}

// Series for the bottom boundary z = (zx, 0).
double h_bottom(double U, PointR w, double zx) {
  double sum = 0.0;
  const double q = kPi / (2.0 * U);
  for (int j = 1; j <= 2000000; ++j) {
    const double ratio = sinh_ratio(j * q * (1.0 - w.y), j * q);
    const double term = ratio * std::sin(j * kPi * (1.0 - w.x / (2.0 * U))) *
                        std::sin(j * kPi * (1.0 - zx / (2.0 * U)));
    sum += term;
    if (ratio < 1e-17 && j > 8) break;
  }
  return sum / U;
}

}  // namespace

double continuum_kernel(double Upsilon, PointR w, PointR z) {
  const double U = Upsilon;
  if (!(U > 0.0)) throw usage_error("continuum_kernel: Upsilon must be > 0");
  if (!(w.x > 0.0 && w.x < 2.0 * U && w.y > 0.0 && w.y < 1.0))
    throw usage_error("continuum_kernel: w must be interior");
  const double eps = 1e-12;
  if (std::abs(z.x) < eps) return h_left(U, w, z.y);
  if (std::abs(z.x - 2.0 * U) < eps) return h_left(U, {2.0 * U - w.x, w.y}, z.y);
  if (std::abs(z.y) < eps) return h_bottom(U, w, z.x);
  if (std::abs(z.y - 1.0) < eps) return h_bottom(U, {w.x, 1.0 - w.y}, z.x);
  throw usage_error("continuum_kernel: z must be on the boundary");
}

// ---------------------------------------------------------------------------
// Average Green on the centre column

namespace {

// 64-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; mirrored).
// Values from standard tables, 20 significant digits.
struct GL64 {
  std::vector<double> x, w;
  GL64() {
    static const double xs[32] = {
        0.024350292663424432509, 0.072993121787799039450,
        0.121462819296120554470, 0.169644420423992818037,
        0.217423643740007084150, 0.264687162208767416374,
        0.311322871990210956158, 0.357220158337668115950,
        0.402270157963991603696, 0.446366017253464087985,
        0.489403145707052957479, 0.531279464019894545658,
        0.571895646202634034284, 0.611155355172393250249,
        0.648965471254657339858, 0.685236313054233242564,
        0.719881850171610826849, 0.752819907260531896612,
        0.783972358943341407610, 0.813265315122797559742,
        0.840629296252580362752, 0.865999398154092819761,
        0.889315445995114105853, 0.910522137078502805756,
        0.929569172131939575821, 0.946411374858402816062,
        0.961008799652053718919, 0.973326827789910963742,
        0.983336253884625956931, 0.991013371476744320739,
        0.996340116771955279347, 0.999305041735772139457};
    static const double ws[32] = {
        0.048690957009139720383, 0.048575467441503426935,
        0.048344762234802957170, 0.047999388596458307728,
        0.047540165714830308662, 0.046968182816210017325,
        0.046284796581314417296, 0.045491627927418144480,
        0.044590558163756563060, 0.043583724529323453377,
        0.042473515123653589007, 0.041262563242623528610,
        0.039953741132720341387, 0.038550153178615629129,
        0.037055128540240046040, 0.035472213256882383811,
        0.033805161837141609392, 0.032057928354851553585,
        0.030234657072402478868, 0.028339672614259483228,
        0.026377469715054658672, 0.024352702568710873338,
        0.022270173808383254159, 0.020134823153530149971,
        0.017951715775697343085, 0.015726030476024719322,
        0.013463047896718642598, 0.011168139460131128819,
        0.008846759826363947723, 0.006504457968978362856,
        0.004147033260562467635, 0.001783280721696432947};
    for (int i = 31; i >= 0; --i) {
      x.push_back(-xs[i]);
      w.push_back(ws[i]);
    }
    for (int i = 0; i < 32; ++i) {
      x.push_back(xs[i]);
      w.push_back(ws[i]);
    }
  }
};

const GL64& gl64() {
  static GL64 g;
  return g;
}

// Integrate f over [a, b] with 64-point Gauss-Legendre on `panels` panels.
template <class F>
double integrate(F&& f, double a, double b, int panels) {
  const auto& g = gl64();
  double total = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    double acc = 0.0;
    for (int i = 0; i < 64; ++i) acc += g.w[i] * f(mid + 0.5 * h * g.x[i]);
    total += acc * 0.5 * h;
  }
  return total;
}

}  // namespace

double c_continuum(double Upsilon,
                   const std::vector<std::pair<double, double>>& intervals) {
  const double U = Upsilon;
  double len = 0.0;
  for (const auto& iv : intervals) {
    if (!(iv.first < iv.second))
      throw usage_error("c_continuum: empty interval");
    len += iv.second - iv.first;
  }
  if (len <= 0.0) throw usage_error("c_continuum: set has zero length");

  auto boundary_integral = [&](double y) {
    const PointR w{U, y};
    auto f_side = [&](double t, bool left) {
      const double zx = left ? 0.0 : 2.0 * U;
      const double dx = U - zx, dy = y - t;
      return 0.5 * std::log(dx * dx + dy * dy) *
             continuum_kernel(U, w, {zx, t});
    };
    auto f_horiz = [&](double t, bool bottom) {
      const double zy = bottom ? 0.0 : 1.0;
      const double dx = U - t, dy = y - zy;
      return 0.5 * std::log(dx * dx + dy * dy) *
             continuum_kernel(U, w, {t, zy});
    };
    double s = 0.0;
    s += integrate([&](double t) { return f_side(t, true); }, 0.0, 1.0, 2);
    s += integrate([&](double t) { return f_side(t, false); }, 0.0, 1.0, 2);
    const int hp = std::max(2, static_cast<int>(std::ceil(2.0 * U)));
    s += integrate([&](double t) { return f_horiz(t, true); }, 0.0, 2.0 * U, hp);
    s += integrate([&](double t) { return f_horiz(t, false); }, 0.0, 2.0 * U, hp);
    return s;
  };

  double outer = 0.0;
  for (const auto& iv : intervals)
    outer += integrate(boundary_integral, iv.first, iv.second, 2);
  return 2.0 / (kPi * len) * outer + potential_kernel_constant();
}

AvgGreenResult avg_green_asymptotic(
    double Upsilon, const std::vector<std::pair<double, double>>& intervals,
    const std::vector<std::int64_t>& sizes) {
  AvgGreenResult res;
  res.sizes = sizes;
  for (const auto N : sizes) {
    if (N < 4) throw usage_error("avg_green_asymptotic: sizes must be >= 4");
    const auto M = static_cast<std::int64_t>(std::llround(2.0 * Upsilon * N));
    RectRegion region{{0, M}, {0, N}};
    SeparableGreen G(region);
    const auto cx = static_cast<std::int64_t>(std::llround(Upsilon * N));
    double acc = 0.0;
    std::int64_t cnt = 0;
    for (const auto& iv : intervals) {
      const auto ylo = static_cast<std::int64_t>(std::ceil(iv.first * N));
      const auto yhi = static_cast<std::int64_t>(std::floor(iv.second * N));
      for (std::int64_t y = ylo; y <= yhi; ++y) {
        acc += G.at({cx, y}, {cx, y});
        ++cnt;
      }
    }
    if (cnt == 0) throw usage_error("avg_green_asymptotic: empty point set");
    res.averages.push_back(acc / static_cast<double>(cnt));
  }
  // Unweighted least squares of average vs log N.
  const auto n = static_cast<double>(sizes.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double lx = std::log(static_cast<double>(sizes[i]));
    sx += lx;
    sy += res.averages[i];
    sxx += lx * lx;
    sxy += lx * res.averages[i];
  }
  res.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  res.intercept = (sy - res.slope * sx) / n;
  res.c_continuum = c_continuum(Upsilon, intervals);
  return res;
}

}  // namespace lfpp
