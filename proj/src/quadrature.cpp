#include "dq/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#ifdef DQ_HAVE_OPENMP
#include <omp.h>
#endif

namespace dq {

namespace {

// Kronrod-15 abscissae on [0,1] side (symmetric) with K15 weights; the
// embedded Gauss-7 rule reuses the odd-index nodes.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelResult {
  double k15, err;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int k = 0; k < 7; ++k) {
    fv[k] = f(c - h * kXgk[k]);
    fv[14 - k] = f(c + h * kXgk[k]);
  }
  fv[7] = f(c);
  double resk = 0, resg = 0;
  for (int k = 0; k < 7; ++k) resk += kWgk[k] * (fv[k] + fv[14 - k]);
  resk += kWgk[7] * fv[7];
  for (int k = 0; k < 3; ++k) resg += kWg[k] * (fv[2 * k + 1] + fv[13 - 2 * k]);
  resg += kWg[3] * fv[7];
  // |K15 - G7| over-estimates the K15 error; keep it as a conservative bound
  double err = std::fabs(resk - resg) * h;
  return {resk * h, err};
}

void adapt(const std::function<double(double)>& f, double a, double b, double tol_abs,
           double rel_tol, int depth, int& budget, QuadResult& out) {
  PanelResult p = gk15(f, a, b);
  out.evals += 15;
  double local_tol = std::max(tol_abs, rel_tol * std::fabs(p.k15));
  if (p.err <= local_tol || depth >= 52 || budget <= 0) {
    if (p.err > local_tol && budget <= 0) out.converged = false;
    out.value += p.k15;
    out.err += p.err;
    return;
  }
  --budget;
  double m = 0.5 * (a + b);
  adapt(f, a, m, tol_abs / 2, rel_tol, depth + 1, budget, out);
  adapt(f, m, b, tol_abs / 2, rel_tol, depth + 1, budget, out);
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              const QuadratureConfig& cfg) {
  QuadResult out;
  if (a >= b) return out;
  int budget = cfg.max_subdivisions;
  adapt(f, a, b, cfg.abs_tol, cfg.rel_tol, 0, budget, out);
  return out;
}

QuadResult integrate_with_breakpoints(const std::function<double(double)>& f, double a,
                                      double b, std::span<const double> interior,
                                      const QuadratureConfig& cfg) {
  std::vector<double> cuts{a};
  for (double c : interior)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  QuadResult total;
  for (size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] <= cuts[k]) continue;
    QuadResult r = integrate_adaptive(f, cuts[k], cuts[k + 1], cfg);
    total.value += r.value;
    total.err += r.err;
    total.evals += r.evals;
    total.converged = total.converged && r.converged;
  }
  return total;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

namespace {
constexpr long long kChunk = 1 << 16;

struct ChunkMoments {
  double sum = 0, sum_sq = 0;
};

ChunkMoments mc_chunk(const std::function<double(double, double)>& f, double x0, double x1,
                      double y0, double y1, long long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
  ChunkMoments m;
  for (long long k = 0; k < n; ++k) {
    double v = f(ux(rng), uy(rng));
    m.sum += v;
    m.sum_sq += v * v;
  }
  return m;
}

McResult mc_run(const std::function<double(double, double)>& f, double x0, double x1,
                double y0, double y1, long long samples, std::uint64_t seed, bool parallel) {
  const long long n_chunks = (samples + kChunk - 1) / kChunk;
  std::vector<ChunkMoments> parts(static_cast<size_t>(n_chunks));
#ifdef DQ_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (long long c = 0; c < n_chunks; ++c) {
    long long n = std::min<long long>(kChunk, samples - c * kChunk);
    parts[static_cast<size_t>(c)] =
        mc_chunk(f, x0, x1, y0, y1, n, splitmix64(seed ^ (0x517cc1b727220a95ull * (c + 1))));
  }
  double sum = 0, sum_sq = 0;
  for (const auto& m : parts) {
    sum += m.sum;
    sum_sq += m.sum_sq;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  const double area = (x1 - x0) * (y1 - y0);
  McResult r;
  r.estimate = area * mean;
  r.std_error = area * std::sqrt(var / n);
  r.samples = samples;
  return r;
}

}  // namespace

McResult mc_rectangle(const std::function<double(double, double)>& f, double x0, double x1,
                      double y0, double y1, long long samples, std::uint64_t seed,
                      bool parallel) {
  return mc_run(f, x0, x1, y0, y1, samples, seed, parallel);
}

McResult mc_rectangle_serial(const std::function<double(double, double)>& f, double x0,
                             double x1, double y0, double y1, long long samples,
                             std::uint64_t seed) {
  return mc_run(f, x0, x1, y0, y1, samples, seed, false);
}

double indexed_sum(std::size_t n, const std::function<double(std::size_t)>& eval,
                   bool parallel) {
  std::vector<double> values(n);
  std::exception_ptr first_error = nullptr;
#ifdef DQ_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
#endif
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    try {
      values[static_cast<size_t>(i)] = eval(static_cast<size_t>(i));
    } catch (...) {
      // exceptions may not cross the parallel region; surface the first one
#ifdef DQ_HAVE_OPENMP
#pragma omp critical
#endif
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  double total = 0;
  for (double v : values) total += v;
  return total;
}

}  // namespace dq
