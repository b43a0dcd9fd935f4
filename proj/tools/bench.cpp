// Times the OpenMP kernels against their serial execution and the derivative
// series against the direct kernel-quadrature reference.
//
//   wgfc-bench [n] [repeats]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "wgfc/core_types.hpp"
#include "wgfc/identities.hpp"
#include "wgfc/linalg.hpp"
#include "wgfc/operators.hpp"

using namespace wgfc;
using clock_type = std::chrono::steady_clock;

template <typename F>
double time_ms(std::size_t repeats, F&& f) {
  // One warm-up, then the best of `repeats`.
  f();
  double best = 1e300;
  for (std::size_t r = 0; r < repeats; ++r) {
    const auto t0 = clock_type::now();
    f();
    const auto t1 = clock_type::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 768;
  const std::size_t repeats = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 3;

  const Grid grid = make_grid(0.0, 1.0, n);
  const WeightFunction w{[](double x) { return 1.0 + x * x; },
                         [](double x) { return 2.0 * x; }, "1+x^2"};
  const FracParams p = make_params(0.6, 0.5);

#ifdef _OPENMP
  std::printf("n = %zu, threads = %d, repeats = %zu\n", n, omp_get_max_threads(), repeats);
#else
  std::printf("n = %zu, OpenMP off, repeats = %zu\n", n, repeats);
#endif
  std::printf("%-34s %12s %12s %8s\n", "kernel", "serial (ms)", "parallel", "speedup");

  auto row = [&](const char* name, double ser, double par) {
    std::printf("%-34s %12.2f %12.2f %7.2fx\n", name, ser, par, ser / par);
  };

  {
    const double ser =
        time_ms(repeats, [&] { rl_integral_left(grid, 0.7, w, Exec::serial); });
    const double par =
        time_ms(repeats, [&] { rl_integral_left(grid, 0.7, w, Exec::parallel); });
    row("rl-integral assembly", ser, par);
  }
  {
    const double ser = time_ms(
        repeats, [&] { gen_derivative_left(grid, p, w, SeriesOptions{}, Exec::serial); });
    const double par = time_ms(
        repeats, [&] { gen_derivative_left(grid, p, w, SeriesOptions{}, Exec::parallel); });
    row("derivative series assembly", ser, par);
  }
  {
    const auto a = gen_integral_left(grid, p, w);
    const auto b = gen_derivative_left(grid, p, w).first;
    const double ser =
        time_ms(repeats, [&] { matmul(a.entries, b.entries, Exec::serial); });
    const double par =
        time_ms(repeats, [&] { matmul(a.entries, b.entries, Exec::parallel); });
    row("operator composition (matmul)", ser, par);
  }
  {
    const auto b = gen_derivative_left(grid, p, w).first;
    const auto f = sample([](double x) { return std::sin(x); }, grid);
    const double ser = time_ms(repeats, [&] { apply(b, f, Exec::serial); });
    const double par = time_ms(repeats, [&] { apply(b, f, Exec::parallel); });
    row("operator application (matvec)", ser, par);
  }
  {
    const auto f = sample([](double x) { return std::sin(x); }, grid);
    const double ser =
        time_ms(repeats, [&] { gen_derivative_direct(f, p, w, Side::Left, Exec::serial); });
    const double par = time_ms(
        repeats, [&] { gen_derivative_direct(f, p, w, Side::Left, Exec::parallel); });
    row("direct kernel reference", ser, par);
  }

  // Series matrices against the direct reference, as a sanity line.
  {
    const auto f = sample([](double x) { return std::sin(x); }, grid);
    const auto series = apply(gen_derivative_left(grid, p, w).first, f);
    const auto direct = gen_derivative_direct(f, p, w, Side::Left);
    double gap = 0.0;
    for (std::size_t i = 1; i < n; ++i)
      gap = std::max(gap, std::fabs(series.values[i] - direct.values[i]));
    std::printf("series vs direct, interior gap     %12.3e\n", gap);
  }
  return 0;
}
