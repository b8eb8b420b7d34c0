// Serial vs OpenMP timing for the sparse kernels.
//   mfop_bench [window] [k] [reps]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "mfop/kernels.hpp"
#include "mfop/random_ops.hpp"
#include "mfop/rng.hpp"

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt < best) best = dt;
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mfop;
  const std::size_t window = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200000;
  const std::size_t k = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 8;
  const int reps = argc > 3 ? std::atoi(argv[3]) : 5;

  Rng rng(42);
  const auto a = random_profile_op(window, k, 1.0, rng);
  const auto b = random_profile_op(window, k, 1.0, rng);
  std::vector<Complex> x(window), y1(window), y2(window);
  for (auto& v : x) v = random_complex(rng, 1.0);

  std::printf("window=%zu k=%zu nnz=%zu openmp=%d threads=%d\n", window, k, a.nnz(),
              kernels::openmp_enabled() ? 1 : 0, kernels::max_threads());
  std::printf("%-14s %12s %12s %8s %s\n", "kernel", "serial_s", "omp_s", "speedup", "identical");

  const double s1 = best_of(reps, [&] { kernels::spmv_serial(a, x, y1); });
  const double p1 = best_of(reps, [&] { kernels::spmv_omp(a, x, y2); });
  std::printf("%-14s %12.6f %12.6f %8.2f %s\n", "spmv", s1, p1, s1 / p1, y1 == y2 ? "yes" : "no");

  const double s2 = best_of(reps, [&] { kernels::spmv_adjoint_serial(a, x, y1); });
  const double p2 = best_of(reps, [&] { kernels::spmv_adjoint_omp(a, x, y2); });
  std::printf("%-14s %12.6f %12.6f %8.2f %s\n", "spmv_adjoint", s2, p2, s2 / p2, y1 == y2 ? "yes" : "no");

  SparseOp c1, c2;
  const double s3 = best_of(reps, [&] { c1 = kernels::spmm_serial(a, b); });
  const double p3 = best_of(reps, [&] { c2 = kernels::spmm_omp(a, b); });
  std::printf("%-14s %12.6f %12.6f %8.2f %s\n", "spmm", s3, p3, s3 / p3, c1 == c2 ? "yes" : "no");
  return 0;
}
