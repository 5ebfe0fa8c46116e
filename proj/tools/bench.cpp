// Times the OpenMP kernels against their serial references.

#include <chrono>
#include <cstdio>
#include <string>

#include "tfim/entropy.hpp"
#include "tfim/oracle.hpp"
#include "tfim/reference.hpp"
#include "tfim/spectrum.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

template <class F>
double time_ms(F&& f) {
  const auto start = clock_type::now();
  f();
  const auto stop = clock_type::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %.2fx\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", tfim::max_threads());

  {
    const tfim::ModelParams params{24, 0.5, 1.0};
    double checksum = 0.0;
    const double ref = time_ms([&] {
      checksum += tfim::reference::enumerate_spectrum(params).back();
    });
    const double par = time_ms([&] {
      checksum +=
          tfim::enumerate_spectrum(params, 30, tfim::Exec::parallel).back();
    });
    report("enumerate_spectrum N=24", ref, par);
  }

  {
    const tfim::ModelParams params{40, 0.5, 1.0};
    const std::int64_t n = 2'000'000;
    double checksum = 0.0;
    const double ref = time_ms([&] {
      checksum += tfim::reference::sample_spectrum(params, n, 1).back();
    });
    const double par = time_ms([&] {
      checksum +=
          tfim::sample_spectrum(params, n, 1, tfim::Exec::parallel).back();
    });
    report("sample_spectrum N=40 2e6", ref, par);
  }

  {
    const tfim::ModelParams params{200, 0.5, 1.0};
    const double l_max = tfim::default_l_max(params.n_sites);
    double checksum = 0.0;
    const double ref = time_ms([&] {
      checksum +=
          tfim::reference::histogram_convolution(params, l_max, 1e-3).overflow;
    });
    const double par = time_ms([&] {
      checksum += tfim::histogram_convolution(params, l_max, 1e-3,
                                              tfim::Exec::parallel)
                      .overflow;
    });
    report("histogram_convolution N=200", ref, par);
  }

  {
    const tfim::ModelParams params{8, 1.0, 1.0};
    const auto state = tfim::build_state(params);
    double checksum = 0.0;
    const double ref = time_ms([&] {
      checksum += tfim::reference::pauli_moments(state).sum_pow4;
    });
    const double par = time_ms([&] {
      checksum +=
          tfim::pauli_moments(state, 10, tfim::Exec::parallel).sum_pow4;
    });
    report("pauli_moments N=8", ref, par);
  }

  {
    const tfim::ModelParams params{100000, 0.5, 1.0};
    double checksum = 0.0;
    const double ser = time_ms([&] {
      checksum += tfim::magic_m2(params, tfim::Exec::serial).value;
    });
    const double par = time_ms([&] {
      checksum += tfim::magic_m2(params, tfim::Exec::parallel).value;
    });
    report("magic_m2 N=1e5", ser, par);
  }

  return 0;
}
