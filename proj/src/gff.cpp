#include "lfpp/gff.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <cstring>

#include "lfpp/errors.hpp"
#include "lfpp/rng.hpp"

namespace lfpp {

namespace {

// Interior index map shared by all routines here; must match the row-major
// interior order used by the kernels module.
struct Grid {
  std::int64_t x0, y0, W, H;
  explicit Grid(const RectRegion& r)
      : x0(r.base.left + 1),
        y0(r.span.left + 1),
        W(r.base.length() - 1),
        H(r.span.length() - 1) {
    if (W < 1 || H < 1) throw usage_error("region has empty interior");
  }
  std::int64_t count() const { return W * H; }
  std::int64_t index(PointZ p) const { return (p.y - y0) * W + (p.x - x0); }
  bool interior(PointZ p) const {
    return p.x >= x0 && p.x < x0 + W && p.y >= y0 && p.y < y0 + H;
  }
};

Eigen::SparseMatrix<double> precision_matrix(const Grid& g) {
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

}  // namespace

struct CovModel::Impl {
  RectRegion region;
  Mode mode;
  std::int64_t n = 0;
  Eigen::MatrixXd L;  // dense mode: lower Cholesky factor of G
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> prec;  // sparse mode
  Eigen::SparseMatrix<double> prec_U;  // upper factor copy for sampling
};

CovModel::CovModel() : impl_(new Impl) {}
CovModel::~CovModel() = default;
CovModel::CovModel(CovModel&&) noexcept = default;
CovModel& CovModel::operator=(CovModel&&) noexcept = default;

CovModel CovModel::build(const RectRegion& region) {
  Grid g(region);
  const Mode m = static_cast<std::size_t>(g.count()) <= green_table_point_limit()
                     ? Mode::dense_cholesky
                     : Mode::sparse_precision;
  return build(region, m);
}

CovModel CovModel::build(const RectRegion& region, Mode mode) {
  CovModel cm;
  auto& im = *cm.impl_;
  Grid g(region);
  im.region = region;
  im.mode = mode;
  im.n = g.count();
  if (mode == Mode::dense_cholesky) {
    if (static_cast<std::size_t>(im.n) > green_table_point_limit())
      throw resource_error("CovModel: region too large for dense mode");
    const auto table = green_table(region);
    Eigen::MatrixXd G(im.n, im.n);
    for (std::int64_t i = 0; i < im.n; ++i)
      for (std::int64_t j = 0; j < im.n; ++j)
        G(i, j) = table[static_cast<std::size_t>(i) * im.n + j];
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success)
      throw numerical_error("CovModel: covariance is not positive definite");
    im.L = llt.matrixL();
  } else {
    im.prec.compute(precision_matrix(g));
    if (im.prec.info() != Eigen::Success)
      throw numerical_error("CovModel: precision factorisation failed");
    im.prec_U = im.prec.matrixU();
  }
  return cm;
}

const RectRegion& CovModel::region() const { return impl_->region; }
CovModel::Mode CovModel::mode() const { return impl_->mode; }
std::int64_t CovModel::interior_count() const { return impl_->n; }

std::vector<double> CovModel::implied_covariance_column(PointZ u) const {
  const auto& im = *impl_;
  Grid g(im.region);
  if (!g.interior(u))
    throw usage_error("implied_covariance_column: point not interior");
  const auto i = g.index(u);
  if (im.mode == Mode::dense_cholesky) {
    // Column i of L L^T is L times row i of L.
    Eigen::VectorXd col = im.L * im.L.row(i).transpose();
    return std::vector<double>(col.data(), col.data() + im.n);
  }
  Eigen::VectorXd e = Eigen::VectorXd::Zero(im.n);
  e[i] = 1.0;
  Eigen::VectorXd col = im.prec.solve(e);
  return std::vector<double>(col.data(), col.data() + im.n);
}

FieldSample sample_field(const CovModel& cov, std::uint64_t seed,
                         std::uint32_t replicate) {
  const auto& im = *cov.impl_;
  Grid g(im.region);
  CounterRng rng(seed, replicate);
  Eigen::VectorXd z(im.n);
  for (std::int64_t i = 0; i < im.n; ++i)
    z[i] = rng.normal(static_cast<std::uint64_t>(i));
  Eigen::VectorXd x;
  if (im.mode == CovModel::Mode::dense_cholesky) {
    x = im.L * z;
  } else {
    // Covariance (I-P)^{-1}: with P A P^T = L L^T, solve L^T y = z in the
    // permuted frame, then undo the ordering permutation.
    Eigen::VectorXd y =
        im.prec_U.triangularView<Eigen::Upper>().solve(z);
    x = im.prec.permutationPinv() * y;
  }
  FieldSample out;
  out.region = im.region;
  out.seed = seed;
  out.replicate = replicate;
  out.values.assign(static_cast<std::size_t>(im.region.point_count()), 0.0);
  const auto row_pts = im.region.base.points();
  for (std::int64_t i = 0; i < im.n; ++i) {
    const std::int64_t x_lat = g.x0 + i % g.W;
    const std::int64_t y_lat = g.y0 + i / g.W;
    out.values[static_cast<std::size_t>(y_lat - im.region.span.left) * row_pts +
               (x_lat - im.region.base.left)] = x[i];
  }
  return out;
}

MarkovParts markov_decompose(const FieldSample& sample, const RectRegion& sub) {
  if (!sample.region.contains(sub))
    throw usage_error("markov_decompose: sub must lie inside the region");
  Grid g(sub);
  // Right-hand side: one quarter of the sample on sub-boundary neighbours.
  std::vector<double> rhs(static_cast<std::size_t>(g.count()), 0.0);
  auto on_sub_boundary = [&](std::int64_t x, std::int64_t y) {
    return x == sub.base.left || x == sub.base.right || y == sub.span.left ||
           y == sub.span.right;
  };
  for (std::int64_t y = g.y0; y < g.y0 + g.H; ++y)
    for (std::int64_t x = g.x0; x < g.x0 + g.W; ++x) {
      double v = 0.0;
      if (on_sub_boundary(x - 1, y)) v += sample.at(x - 1, y);
      if (on_sub_boundary(x + 1, y)) v += sample.at(x + 1, y);
      if (on_sub_boundary(x, y - 1)) v += sample.at(x, y - 1);
      if (on_sub_boundary(x, y + 1)) v += sample.at(x, y + 1);
      rhs[static_cast<std::size_t>(g.index({x, y}))] = 0.25 * v;
    }
  const auto u = dirichlet_solve(sub, rhs);

  MarkovParts parts;
  for (FieldSample* part : {&parts.coarse, &parts.fine}) {
    part->region = sub;
    part->seed = sample.seed;
    part->replicate = sample.replicate;
    part->values.assign(static_cast<std::size_t>(sub.point_count()), 0.0);
  }
  const auto row_pts = sub.base.points();
  for (std::int64_t y = sub.span.left; y <= sub.span.right; ++y)
    for (std::int64_t x = sub.base.left; x <= sub.base.right; ++x) {
      const auto k = static_cast<std::size_t>(y - sub.span.left) * row_pts +
                     (x - sub.base.left);
      const double full = sample.at(x, y);
      const double coarse = on_sub_boundary(x, y)
                                ? full
                                : u[static_cast<std::size_t>(g.index({x, y}))];
      parts.coarse.values[k] = coarse;
      parts.fine.values[k] = full - coarse;
    }
  return parts;
}

double line_sum(const FieldSample& sample, IntervalZ I, std::int64_t row) {
  const auto& r = sample.region;
  if (I.left <= r.base.left || I.right >= r.base.right || row <= r.span.left ||
      row >= r.span.right)
    throw usage_error("line_sum: segment must be strictly interior");
  double s = 0.0;
  for (std::int64_t x = I.left; x <= I.right; ++x) s += sample.at(x, row);
  return s;
}

namespace {

std::int64_t line_row(const RectRegion& region, double nu) {
  const auto row = region.span.left +
                   static_cast<std::int64_t>(std::llround(
                       nu * static_cast<double>(region.span.length())));
  if (row <= region.span.left || row >= region.span.right)
    throw usage_error("line height nu*N must be strictly interior");
  return row;
}

// Sum of G((x,row_b), source) over x in Ib, one solve per source on line a.
double line_pair_sum(const RectRegion& region, IntervalZ Ia, std::int64_t row_a,
                     IntervalZ Ib, std::int64_t row_b) {
  if (Ia.left <= region.base.left || Ia.right >= region.base.right ||
      Ib.left <= region.base.left || Ib.right >= region.base.right)
    throw usage_error("line interval must be strictly interior");
  Grid g(region);
  double total = 0.0;
  for (std::int64_t sx = Ia.left; sx <= Ia.right; ++sx) {
    const auto col = green_columns(region, {{sx, row_a}});
    for (std::int64_t x = Ib.left; x <= Ib.right; ++x)
      total += col[0][static_cast<std::size_t>(g.index({x, row_b}))];
  }
  return total;
}

}  // namespace

double line_sum_var_exact(const RectRegion& region, IntervalZ I, double nu) {
  const auto row = line_row(region, nu);
  return line_pair_sum(region, I, row, I, row);
}

double line_sum_cov_exact(const RectRegion& region, IntervalZ I1, double nu1,
                          IntervalZ I2, double nu2) {
  return line_pair_sum(region, I1, line_row(region, nu1), I2,
                       line_row(region, nu2));
}

namespace {

// Unpivoted LDL^T in sequential order; pivoting would scramble the meaning of
// "conditioned on the previous variables".
void ldlt_sequential(const std::vector<double>& C, int n,
                     std::vector<double>& L, std::vector<double>& D) {
  L.assign(static_cast<std::size_t>(n) * n, 0.0);
  D.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    L[static_cast<std::size_t>(i) * n + i] = 1.0;
    for (int j = 0; j <= i; ++j) {
      double s = C[static_cast<std::size_t>(i) * n + j];
      for (int k = 0; k < j; ++k)
        s -= L[static_cast<std::size_t>(i) * n + k] *
             L[static_cast<std::size_t>(j) * n + k] * D[k];
      if (j == i) {
        if (!(s > 0.0))
          throw numerical_error("sequential LDL^T: matrix not positive definite");
        D[i] = s;
      } else {
        L[static_cast<std::size_t>(i) * n + j] = s / D[j];
      }
    }
  }
}

}  // namespace

GramResult sequential_decorrelate(const GramSpec& spec,
                                  const std::vector<double>* y_inner) {
  const int n = spec.n;
  if (n < 1) throw usage_error("sequential_decorrelate: n must be >= 1");
  if (spec.inner.size() != static_cast<std::size_t>(n) * n)
    throw usage_error("sequential_decorrelate: inner matrix size mismatch");
  for (int i = 0; i < n; ++i)
    if (std::abs(spec.inner[static_cast<std::size_t>(i) * n + i] - 1.0) > 1e-12)
      throw usage_error("sequential_decorrelate: diagonal must be 1");
  std::vector<double> L, D;
  ldlt_sequential(spec.inner, n, L, D);
  GramResult res;
  res.residual_norm_sq = D;
  if (y_inner) {
    if (y_inner->size() != static_cast<std::size_t>(n))
      throw usage_error("sequential_decorrelate: y inner size mismatch");
    // (y, x_i) = sum_j L_ij (y, eps_j): forward substitution recovers the
    // inner products with the unnormalised residuals.
    res.y_inner.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
      double s = (*y_inner)[i];
      for (int j = 0; j < i; ++j)
        s -= L[static_cast<std::size_t>(i) * n + j] * res.y_inner[j];
      res.y_inner[i] = s;
    }
  }
  return res;
}

std::vector<double> SequentialTransform::apply(const std::vector<double>& v) const {
  if (v.size() != static_cast<std::size_t>(n))
    throw usage_error("SequentialTransform::apply: size mismatch");
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = v[i];
    for (int j = 0; j < i; ++j)
      s -= unit_lower[static_cast<std::size_t>(i) * n + j] * out[j];
    out[i] = s;
  }
  return out;
}

SequentialTransform make_sequential_transform(const std::vector<double>& cov,
                                              int n) {
  if (n < 1) throw usage_error("make_sequential_transform: n must be >= 1");
  if (cov.size() != static_cast<std::size_t>(n) * n)
    throw usage_error("make_sequential_transform: matrix size mismatch");
  SequentialTransform t;
  t.n = n;
  ldlt_sequential(cov, n, t.unit_lower, t.cond_var);
  return t;
}

std::vector<double> decorrelate_line_sums(const std::vector<double>& cov, int n) {
  const auto t = make_sequential_transform(cov, n);
  std::vector<double> ratios(n);
  for (int i = 0; i < n; ++i)
    ratios[i] = t.cond_var[i] / cov[static_cast<std::size_t>(i) * n + i];
  return ratios;
}

}  // namespace lfpp
