// Compares the serial reference paths of the two data-parallel kernels
// (clause emission and disagreement sampling) against their OpenMP variants,
// verifying bit-identical output while reporting throughput.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ncs/eval.hpp"
#include "ncs/sat.hpp"
#include "ncs/synth.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_ms(F&& f) {
  const auto t0 = Clock::now();
  f();
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool same_cnf(const ncs::CnfInstance& a, const ncs::CnfInstance& b) {
  if (a.var_count() != b.var_count() || a.clause_count() != b.clause_count()) return false;
  for (size_t c = 0; c < a.clause_count(); ++c) {
    const auto ca = a.clause(c);
    const auto cb = b.clause(c);
    if (!std::equal(ca.begin(), ca.end(), cb.begin(), cb.end())) return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  int criteria = 10;
  int alternatives = 512;
  long long samples = 2'000'000;
  uint64_t seed = 7;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string arg = argv[i];
    if (arg == "--criteria") criteria = std::atoi(argv[i + 1]);
    else if (arg == "--alts") alternatives = std::atoi(argv[i + 1]);
    else if (arg == "--samples") samples = std::atoll(argv[i + 1]);
    else if (arg == "--seed") seed = std::strtoull(argv[i + 1], nullptr, 10);
    else {
      std::fprintf(stderr, "usage: ncs-kernel-bench [--criteria N] [--alts M] [--samples S] [--seed X]\n");
      return 2;
    }
  }

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif

  const ncs::Instance instance = ncs::gen_instance({criteria, 3, alternatives, seed});
  const ncs::Instance other = ncs::gen_instance({criteria, 3, alternatives, seed + 1});
  const ncs::UncsModel model_a = instance.truth.to_uncs();
  const ncs::UncsModel model_b = other.truth.to_uncs();

  ncs::CnfInstance serial_cnf(0), parallel_cnf(0);
  const double enc_serial = time_ms([&] { serial_cnf = ncs::encode(instance.data, false); });
  const double enc_parallel = time_ms([&] { parallel_cnf = ncs::encode(instance.data, true); });
  if (!same_cnf(serial_cnf, parallel_cnf)) {
    std::fprintf(stderr, "FAIL: parallel clause emission differs from the serial reference\n");
    return 1;
  }
  std::printf("encode   %9zu clauses   serial %8.2f ms   openmp %8.2f ms   speedup %.2fx\n",
              serial_cnf.clause_count(), enc_serial, enc_parallel, enc_serial / enc_parallel);

  double err_serial_value = 0, err_parallel_value = 0;
  const double err_serial =
      time_ms([&] { err_serial_value = ncs::err_rate(model_a, model_b, samples, seed, false); });
  const double err_parallel =
      time_ms([&] { err_parallel_value = ncs::err_rate(model_a, model_b, samples, seed, true); });
  if (err_serial_value != err_parallel_value) {
    std::fprintf(stderr, "FAIL: parallel sampling differs from the serial reference\n");
    return 1;
  }
  std::printf("err-rate %9lld samples   serial %8.2f ms   openmp %8.2f ms   speedup %.2fx\n",
              samples, err_serial, err_parallel, err_serial / err_parallel);
  std::printf("kernels agree with their serial references\n");
  return 0;
}
