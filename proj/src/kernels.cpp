#include "mkq/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mkq::kernels {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t block_count(std::size_t n) { return (n + kBlock - 1) / kBlock; }

double combine(const std::vector<double>& partial) {
  double s = 0.0;
  for (double v : partial) s += v;
  return s;
}

// Blocked exponential sum on one thread; same bits as the parallel kernel.
ExpSum blocked_expsum(std::span<const double> u, std::span<const double> c, double eps, std::span<double> out) {
  const std::size_t n = u.size();
  double m = kNegInf;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, (u[i] - c[i]) / eps);
  double total = 0.0;
  for (std::size_t b0 = 0; b0 < n; b0 += kBlock) {
    const std::size_t b1 = std::min(n, b0 + kBlock);
    double s = 0.0;
    for (std::size_t i = b0; i < b1; ++i) {
      const double e = std::exp((u[i] - c[i]) / eps - m);
      if (!out.empty()) out[i] = e;
      s += e;
    }
    total += s;
  }
  return {m, total};
}

void barycentre_one(const Cost& cost, std::span<const double> x, std::span<const double> ys, std::size_t y_dims,
                    std::span<const double> conj, double eps, std::vector<double>& z, std::span<double> out) {
  const std::size_t n = conj.size();
  double m = kNegInf;
  for (std::size_t j = 0; j < n; ++j) {
    z[j] = (conj[j] - cost(x, ys.subspan(j * y_dims, y_dims))) / eps;
    m = std::max(m, z[j]);
  }
  double s = 0.0;
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double w = std::exp(z[j] - m);
    s += w;
    for (std::size_t k = 0; k < y_dims; ++k) out[k] += w * ys[j * y_dims + k];
  }
  for (std::size_t k = 0; k < y_dims; ++k) out[k] /= s;
}

}  // namespace

ExpSum gibbs_exponentials(std::span<const double> u, std::span<const double> c, double eps,
                          std::span<double> out) {
  const std::size_t n = u.size();
  if (n < kParallelThreshold) return blocked_expsum(u, c, eps, out);

  double m = kNegInf;
#pragma omp parallel for reduction(max : m) schedule(static)
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, (u[i] - c[i]) / eps);

  const std::size_t nb = block_count(n);
  std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t b0 = b * kBlock;
    const std::size_t b1 = std::min(n, b0 + kBlock);
    double s = 0.0;
    for (std::size_t i = b0; i < b1; ++i) {
      const double e = std::exp((u[i] - c[i]) / eps - m);
      if (!out.empty()) out[i] = e;
      s += e;
    }
    partial[b] = s;
  }
  return {m, combine(partial)};
}

double sum(std::span<const double> a) {
  const std::size_t nb = block_count(a.size());
  std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static) if (a.size() >= kParallelThreshold)
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t b1 = std::min(a.size(), (b + 1) * kBlock);
    double s = 0.0;
    for (std::size_t i = b * kBlock; i < b1; ++i) s += a[i];
    partial[b] = s;
  }
  return combine(partial);
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t nb = block_count(a.size());
  std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static) if (a.size() >= kParallelThreshold)
  for (std::size_t blk = 0; blk < nb; ++blk) {
    const std::size_t b1 = std::min(a.size(), (blk + 1) * kBlock);
    double s = 0.0;
    for (std::size_t i = blk * kBlock; i < b1; ++i) s += a[i] * b[i];
    partial[blk] = s;
  }
  return combine(partial);
}

double weighted_square_sum(std::span<const double> a, std::span<const double> b) {
  const std::size_t nb = block_count(a.size());
  std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static) if (a.size() >= kParallelThreshold)
  for (std::size_t blk = 0; blk < nb; ++blk) {
    const std::size_t b1 = std::min(a.size(), (blk + 1) * kBlock);
    double s = 0.0;
    for (std::size_t i = blk * kBlock; i < b1; ++i) s += a[i] * b[i] * b[i];
    partial[blk] = s;
  }
  return combine(partial);
}

std::vector<double> cost_matrix(const Cost& cost, const GridSpec& grid, std::span<const double> ys,
                                std::size_t y_dims) {
  const std::size_t p = grid.total();
  const std::size_t n = ys.size() / y_dims;
  check_cost_dims(cost, grid.dims(), y_dims);
  std::vector<double> C(p * n);
#pragma omp parallel for schedule(static) if (p * n >= kParallelThreshold)
  for (std::size_t i = 0; i < p; ++i) {
    std::vector<double> x = grid.point(i);
    for (std::size_t j = 0; j < n; ++j) C[i * n + j] = cost(x, ys.subspan(j * y_dims, y_dims));
  }
  return C;
}

void softmin_rows(std::span<const double> C, std::size_t p, std::size_t n, std::span<const double> g,
                  double eps, std::span<double> f) {
  const double log_n = std::log(static_cast<double>(n));
#pragma omp parallel for schedule(static) if (p * n >= kParallelThreshold)
  for (std::size_t i = 0; i < p; ++i) {
    const double* row = C.data() + i * n;
    double m = kNegInf;
    for (std::size_t j = 0; j < n; ++j) m = std::max(m, (g[j] - row[j]) / eps);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::exp((g[j] - row[j]) / eps - m);
    f[i] = -eps * (m + std::log(s) - log_n);
  }
}

void softmin_cols(std::span<const double> C, std::size_t p, std::size_t n, std::span<const double> f,
                  double eps, std::span<double> g) {
  constexpr std::size_t kCols = 256;
  const double log_p = std::log(static_cast<double>(p));
  const std::size_t nb = (n + kCols - 1) / kCols;
#pragma omp parallel for schedule(static) if (p * n >= kParallelThreshold)
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t j0 = b * kCols;
    const std::size_t j1 = std::min(n, j0 + kCols);
    double m[kCols];
    double s[kCols];
    std::fill(m, m + kCols, kNegInf);
    std::fill(s, s + kCols, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
      const double* row = C.data() + i * n;
      for (std::size_t j = j0; j < j1; ++j) m[j - j0] = std::max(m[j - j0], (f[i] - row[j]) / eps);
    }
    for (std::size_t i = 0; i < p; ++i) {
      const double* row = C.data() + i * n;
      for (std::size_t j = j0; j < j1; ++j) s[j - j0] += std::exp((f[i] - row[j]) / eps - m[j - j0]);
    }
    for (std::size_t j = j0; j < j1; ++j) g[j] = -eps * (m[j - j0] + std::log(s[j - j0]) - log_p);
  }
}

double row_marginal_error(std::span<const double> C, std::size_t p, std::size_t n, std::span<const double> f,
                          std::span<const double> g, double eps) {
  const double inv_pn = 1.0 / (static_cast<double>(p) * static_cast<double>(n));
  const double target = 1.0 / static_cast<double>(p);
  double err = 0.0;
#pragma omp parallel for reduction(max : err) schedule(static) if (p * n >= kParallelThreshold)
  for (std::size_t i = 0; i < p; ++i) {
    const double* row = C.data() + i * n;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::exp((f[i] + g[j] - row[j]) / eps);
    err = std::max(err, std::abs(s * inv_pn - target));
  }
  return err;
}

void smooth_conjugates(const CostEvaluator& costs, std::span<const double> u, double eps,
                       std::span<const double> ys, std::size_t y_dims, std::span<double> out) {
  const std::size_t p = u.size();
  const std::size_t n = out.size();
#pragma omp parallel if (n * p >= kParallelThreshold)
  {
    std::vector<double> c(p);
#pragma omp for schedule(static)
    for (std::size_t j = 0; j < n; ++j) {
      costs.field(ys.subspan(j * y_dims, y_dims), c);
      out[j] = -eps * log_mean_exp(blocked_expsum(u, c, eps, {}), p);
    }
  }
}

void barycentric_batch(const Cost& cost, std::span<const double> xs, std::size_t x_dims,
                       std::span<const double> ys, std::size_t y_dims, std::span<const double> conj,
                       double eps, std::span<double> out) {
  const std::size_t q = xs.size() / x_dims;
  const std::size_t n = conj.size();
#pragma omp parallel if (q * n >= kParallelThreshold)
  {
    std::vector<double> z(n);
#pragma omp for schedule(static)
    for (std::size_t k = 0; k < q; ++k) {
      barycentre_one(cost, xs.subspan(k * x_dims, x_dims), ys, y_dims, conj, eps, z,
                     out.subspan(k * y_dims, y_dims));
    }
  }
}

int max_threads() { return omp_get_max_threads(); }

void set_max_threads(int n) { omp_set_num_threads(std::max(1, n)); }

namespace serial {

ExpSum gibbs_exponentials(std::span<const double> u, std::span<const double> c, double eps,
                          std::span<double> out) {
  double m = kNegInf;
  for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, (u[i] - c[i]) / eps);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double e = std::exp((u[i] - c[i]) / eps - m);
    if (!out.empty()) out[i] = e;
    s += e;
  }
  return {m, s};
}

double sum(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double weighted_square_sum(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i] * b[i];
  return s;
}

void softmin_rows(std::span<const double> C, std::size_t p, std::size_t n, std::span<const double> g,
                  double eps, std::span<double> f) {
  for (std::size_t i = 0; i < p; ++i) {
    double m = kNegInf;
    for (std::size_t j = 0; j < n; ++j) m = std::max(m, (g[j] - C[i * n + j]) / eps);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::exp((g[j] - C[i * n + j]) / eps - m);
    f[i] = -eps * (m + std::log(s / static_cast<double>(n)));
  }
}

void softmin_cols(std::span<const double> C, std::size_t p, std::size_t n, std::span<const double> f,
                  double eps, std::span<double> g) {
  for (std::size_t j = 0; j < n; ++j) {
    double m = kNegInf;
    for (std::size_t i = 0; i < p; ++i) m = std::max(m, (f[i] - C[i * n + j]) / eps);
    double s = 0.0;
    for (std::size_t i = 0; i < p; ++i) s += std::exp((f[i] - C[i * n + j]) / eps - m);
    g[j] = -eps * (m + std::log(s / static_cast<double>(p)));
  }
}

double row_marginal_error(std::span<const double> C, std::size_t p, std::size_t n, std::span<const double> f,
                          std::span<const double> g, double eps) {
  double err = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::exp((f[i] + g[j] - C[i * n + j]) / eps);
    err = std::max(err, std::abs(s / (static_cast<double>(p) * static_cast<double>(n)) - 1.0 / static_cast<double>(p)));
  }
  return err;
}

void smooth_conjugates(const CostEvaluator& costs, std::span<const double> u, double eps,
                       std::span<const double> ys, std::size_t y_dims, std::span<double> out) {
  const std::size_t p = u.size();
  std::vector<double> c(p);
  for (std::size_t j = 0; j < out.size(); ++j) {
    costs.field(ys.subspan(j * y_dims, y_dims), c);
    const ExpSum es = gibbs_exponentials(u, c, eps, {});
    out[j] = -eps * (es.shift + std::log(es.sum / static_cast<double>(p)));
  }
}

void barycentric_batch(const Cost& cost, std::span<const double> xs, std::size_t x_dims,
                       std::span<const double> ys, std::size_t y_dims, std::span<const double> conj,
                       double eps, std::span<double> out) {
  const std::size_t n = conj.size();
  std::vector<double> z(n);
  for (std::size_t k = 0; k < xs.size() / x_dims; ++k) {
    auto x = xs.subspan(k * x_dims, x_dims);
    double m = kNegInf;
    for (std::size_t j = 0; j < n; ++j) {
      z[j] = (conj[j] - cost(x, ys.subspan(j * y_dims, y_dims))) / eps;
      m = std::max(m, z[j]);
    }
    std::vector<double> acc(y_dims, 0.0);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = std::exp(z[j] - m);
      s += w;
      for (std::size_t d = 0; d < y_dims; ++d) acc[d] += w * ys[j * y_dims + d];
    }
    for (std::size_t d = 0; d < y_dims; ++d) out[k * y_dims + d] = acc[d] / s;
  }
}

}  // namespace serial

}  // namespace mkq::kernels
