#ifndef DQ_QUADRATURE_HPP
#define DQ_QUADRATURE_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace dq {

struct QuadratureConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
  long long monte_carlo_samples = 10'000'000;
  int threads = 0;  // 0 = library default
};

struct QuadResult {
  double value = 0;
  double err = 0;
  long long evals = 0;
  bool converged = true;
};

// Adaptive Gauss-Kronrod (G7, K15) on [a, b].
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              const QuadratureConfig& cfg);

// Splits [a, b] at the given interior points first, then integrates each
// smooth panel adaptively.
QuadResult integrate_with_breakpoints(const std::function<double(double)>& f, double a,
                                      double b, std::span<const double> interior,
                                      const QuadratureConfig& cfg);

struct McResult {
  double estimate = 0;
  double std_error = 0;
  long long samples = 0;
};

// Monte Carlo mean-value estimate of iint_{X x Y} f(x,y) dx dy over the
// rectangle [x0,x1] x [y0,y1]. Work is split into fixed seeded chunks so
// the result is identical for any thread count.
McResult mc_rectangle(const std::function<double(double, double)>& f, double x0, double x1,
                      double y0, double y1, long long samples, std::uint64_t seed,
                      bool parallel);
McResult mc_rectangle_serial(const std::function<double(double, double)>& f, double x0,
                             double x1, double y0, double y1, long long samples,
                             std::uint64_t seed);

// Fills values[i] = eval(i) (in parallel when requested), then reduces in
// index order; summation order is fixed so results are bit-stable for any
// worker count.
double indexed_sum(std::size_t n, const std::function<double(std::size_t)>& eval,
                   bool parallel);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace dq

#endif
