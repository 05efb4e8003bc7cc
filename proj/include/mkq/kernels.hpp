#pragma once

// Data-parallel inner loops.
//
// Every kernel exists twice: the OpenMP version in mkq::kernels, used by the
// library, and a plain loop in mkq::kernels::serial kept as the reference the
// tests and the benchmark compare against. The OpenMP versions reduce over
// fixed-size blocks combined in block order, so their results do not depend
// on the thread count.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "mkq/costs.hpp"

namespace mkq::kernels {

inline constexpr std::size_t kBlock = 2048;
/// Below this many elements (or rows) the OpenMP kernels run on one thread.
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 15;

struct ExpSum {
  double shift = 0.0;  // max over i of the exponent
  double sum = 0.0;    // sum over i of exp(exponent - shift)
};

/// log( sum / n ) + shift: the log of the mean of the exponentials.
inline double log_mean_exp(const ExpSum& es, std::size_t n) {
  return es.shift + std::log(es.sum / static_cast<double>(n));
}

/// out[i] = exp((u[i] - c[i]) / eps - shift). Pass an empty `out` to only
/// accumulate the sum.
ExpSum gibbs_exponentials(std::span<const double> u, std::span<const double> c, double eps,
                          std::span<double> out);
double sum(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);
/// sum_i a[i] * b[i] * b[i]
double weighted_square_sum(std::span<const double> a, std::span<const double> b);

/// Dense cost matrix C[i * n + j] = c(x_i, y_j) between grid atoms and observations.
std::vector<double> cost_matrix(const Cost& cost, const GridSpec& grid, std::span<const double> ys,
                                std::size_t y_dims);

/// Log-domain Sinkhorn half-steps for uniform marginals 1/p (rows) and 1/n (columns).
/// f[i] = -eps log( (1/n) sum_j exp((g[j] - C_ij) / eps) )
void softmin_rows(std::span<const double> C, std::size_t p, std::size_t n, std::span<const double> g,
                  double eps, std::span<double> f);
/// g[j] = -eps log( (1/p) sum_i exp((f[i] - C_ij) / eps) )
void softmin_cols(std::span<const double> C, std::size_t p, std::size_t n, std::span<const double> f,
                  double eps, std::span<double> g);
/// max_i | sum_j P_ij - 1/p | with P_ij = exp((f_i + g_j - C_ij)/eps) / (p n).
double row_marginal_error(std::span<const double> C, std::size_t p, std::size_t n, std::span<const double> f,
                          std::span<const double> g, double eps);

/// Smooth c-transforms of a grid potential at every observation:
/// out[j] = -eps log( mean_i exp((u_i - c(x_i, y_j)) / eps) ).
void smooth_conjugates(const CostEvaluator& costs, std::span<const double> u, double eps,
                       std::span<const double> ys, std::size_t y_dims, std::span<double> out);

/// Softmax-weighted averages of observations for a batch of query points:
/// out[q] = sum_j w_qj y_j, w_qj proportional to exp((conj_j - c(x_q, y_j)) / eps).
void barycentric_batch(const Cost& cost, std::span<const double> xs, std::size_t x_dims,
                       std::span<const double> ys, std::size_t y_dims, std::span<const double> conj,
                       double eps, std::span<double> out);

namespace serial {

ExpSum gibbs_exponentials(std::span<const double> u, std::span<const double> c, double eps,
                          std::span<double> out);
double sum(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);
double weighted_square_sum(std::span<const double> a, std::span<const double> b);
void softmin_rows(std::span<const double> C, std::size_t p, std::size_t n, std::span<const double> g,
                  double eps, std::span<double> f);
void softmin_cols(std::span<const double> C, std::size_t p, std::size_t n, std::span<const double> f,
                  double eps, std::span<double> g);
double row_marginal_error(std::span<const double> C, std::size_t p, std::size_t n, std::span<const double> f,
                          std::span<const double> g, double eps);
void smooth_conjugates(const CostEvaluator& costs, std::span<const double> u, double eps,
                       std::span<const double> ys, std::size_t y_dims, std::span<double> out);
void barycentric_batch(const Cost& cost, std::span<const double> xs, std::size_t x_dims,
                       std::span<const double> ys, std::size_t y_dims, std::span<const double> conj,
                       double eps, std::span<double> out);

}  // namespace serial

/// Worker count honoured by the OpenMP kernels (MKQ_THREADS caps it).
int max_threads();
void set_max_threads(int n);

}  // namespace mkq::kernels
