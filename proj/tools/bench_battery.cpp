// Times the battery kernels with the OpenMP path against the serial
// reference and verifies the two produce bit-identical results.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "geotransfer/axiom_lab.hpp"
#include "geotransfer/parallel.hpp"

using namespace geotransfer;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double speedup(double serial, double parallel) {
  return serial / std::max(parallel, 1e-9);
}

}  // namespace

int main(int argc, char** argv) {
  Battery b;
  b.seed = 1;
  b.count = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1500;

  const TailSpec pattern = TailSpec::periodic({1.0, 0.5});
  const GeometricRule rule(LambdaProfile(0, {1.0, 0.5}, pattern, pattern), "periodic");

  std::printf("battery: %zu streams (seed %llu); OpenMP %s\n", b.count,
              static_cast<unsigned long long>(b.seed), openmp_enabled() ? "on" : "off");

  auto t0 = Clock::now();
  const double bound_serial = lipschitz_certificate(rule, b, /*parallel=*/false);
  const double ts = seconds_since(t0);
  t0 = Clock::now();
  const double bound_parallel = lipschitz_certificate(rule, b, /*parallel=*/true);
  const double tp = seconds_since(t0);
  std::printf("contraction certificate: serial %.3fs, parallel %.3fs (x%.2f), bound %.12f\n",
              ts, tp, speedup(ts, tp), bound_serial);
  if (bound_serial != bound_parallel) {
    std::printf("MISMATCH: serial %.17g vs parallel %.17g\n", bound_serial, bound_parallel);
    return 1;
  }

  CheckConfig serial_cfg;
  serial_cfg.parallel = false;
  CheckConfig parallel_cfg;
  parallel_cfg.parallel = true;
  double total_serial = 0.0;
  double total_parallel = 0.0;
  for (const std::string& ax : axiom_names()) {
    t0 = Clock::now();
    const AxiomVerdict vs = check_axiom(rule, ax, b, serial_cfg);
    const double es = seconds_since(t0);
    t0 = Clock::now();
    const AxiomVerdict vp = check_axiom(rule, ax, b, parallel_cfg);
    const double ep = seconds_since(t0);
    total_serial += es;
    total_parallel += ep;
    const bool same = vs.outcome == vp.outcome && vs.cases_evaluated == vp.cases_evaluated &&
                      vs.cases_precondition_unmet == vp.cases_precondition_unmet;
    std::printf("  %-28s serial %7.3fs  parallel %7.3fs  %s\n", ax.c_str(), es, ep,
                same ? "identical" : "MISMATCH");
    if (!same) return 1;
  }
  std::printf("axiom sweep: serial %.3fs, parallel %.3fs (x%.2f)\n", total_serial,
              total_parallel, speedup(total_serial, total_parallel));
  return 0;
}
