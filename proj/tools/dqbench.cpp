// Serial vs OpenMP timing for the three data-parallel kernels: partial-sum
// cell evaluation, Monte Carlo sampling, and the truncation trace. The
// parallel kernels reduce in fixed index order, so both paths must agree
// bit-for-bit; the benchmark asserts that while it measures.

#include <cmath>
#include <cstdio>

#ifdef DQ_HAVE_OPENMP
#include <omp.h>
#endif

#include "dq/engine.hpp"
#include "dq/fixtures.hpp"

using namespace dq;

namespace {

double now() {
#ifdef DQ_HAVE_OPENMP
  return omp_get_wtime();
#else
  return 0.0;
#endif
}

void row(const char* name, double serial_s, double parallel_s, bool identical) {
  std::printf("%-28s %10.3fs %10.3fs %8.2fx   %s\n", name, serial_s, parallel_s,
              serial_s / parallel_s, identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  int jmax = argc > 1 ? std::atoi(argv[1]) : 9;
  QuadratureConfig cfg;
  SequencePair seq(SequenceSpec::preset("default"), 64);
  Weight w = Weight::counterexample(seq);

#ifdef DQ_HAVE_OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (OpenMP not enabled)\n");
#endif
  std::printf("%-28s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

  {
    double t0 = now();
    auto ser = counterexample_partial_sum_serial(seq, w, jmax, cfg);
    double t1 = now();
    auto par = counterexample_partial_sum(seq, w, jmax, cfg);
    double t2 = now();
    bool same = ser.rows.back().S_j == par.rows.back().S_j;
    char label[64];
    std::snprintf(label, sizeof(label), "partial sums (J=%d)", jmax);
    row(label, t1 - t0, t2 - t1, same);
  }

  {
    auto f = [](double x, double y) { return (1.0 / (y - x)) / (y - x); };
    double t0 = now();
    auto ser = mc_rectangle_serial(f, 0, 1, 2, 3, 20'000'000, 99);
    double t1 = now();
    auto par = mc_rectangle(f, 0, 1, 2, 3, 20'000'000, 99, true);
    double t2 = now();
    row("monte carlo (2e7 samples)", t1 - t0, t2 - t1, ser.estimate == par.estimate);
  }

  {
    // 64 steps -> 2016 cells per truncation level
    std::vector<Rat> values;
    for (int k = 0; k < 64; ++k) values.push_back(Rat(k % 17));
    auto u = staircase(Interval{Rat(0), Rat(1)}, values);
    Interval dom = u.domain();
    double t0 = now();
    double ser = 0;
    for (int k = 6; k <= 12; ++k)
      ser += evaluate_truncated_serial(u, w, dom, std::ldexp(1.0, -k), cfg);
    double t1 = now();
    double par = 0;
    for (int k = 6; k <= 12; ++k)
      par += evaluate_truncated(u, w, dom, std::ldexp(1.0, -k), cfg, true);
    double t2 = now();
    row("truncation trace (7 eps)", t1 - t0, t2 - t1, ser == par);
  }
  return 0;
}
