// Wall-clock comparison of the serial reference kernels against their
// OpenMP counterparts: pairwise distance fill and the batch alignment cost
// matrix. Both kernel pairs are bit-identical by construction; this binary
// only reports timing.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "twalign/distance.hpp"
#include "twalign/loss.hpp"
#include "twalign/rng.hpp"

using namespace twalign;

namespace {

FeatureSequence random_sequence(std::size_t n, std::size_t d, RngStream& g,
                                Modality tag) {
  std::vector<std::vector<double>> items(n);
  for (auto& it : items) it = unit_sphere(d, g);
  return FeatureSequence(std::move(items), tag);
}

template <typename F>
double time_ms(F&& f, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif

  RngStream g(2024);

  {
    const std::size_t n = 512, d = 64;
    auto x = random_sequence(n, d, g, Modality::clip);
    auto y = random_sequence(n, d, g, Modality::caption);
    double sink = 0.0;
    const double serial = time_ms(
        [&] {
          sink += pairwise_distance_serial(x, y, DistanceMeasure::cosine_dist)
                      .values(0, 0);
        },
        5);
    const double parallel = time_ms(
        [&] {
          sink +=
              pairwise_distance(x, y, DistanceMeasure::cosine_dist).values(0, 0);
        },
        5);
    std::printf("pairwise_distance %zux%zu d=%zu: serial %.2f ms, omp %.2f ms "
                "(x%.2f)\n",
                n, n, d, serial, parallel, serial / parallel);
    if (sink == -1.0) std::printf("%f\n", sink);
  }

  {
    const std::size_t b = 16, len = 8, d = 16;
    std::vector<FeatureSequence> clips, captions;
    for (std::size_t i = 0; i < b; ++i) {
      clips.push_back(random_sequence(len, d, g, Modality::clip));
      captions.push_back(random_sequence(len, d, g, Modality::caption));
    }
    S2dtwParams params;
    NegativeSpec negs;
    double sink = 0.0;
    const double serial = time_ms(
        [&] {
          sink += batch_cost_matrix_serial(clips, captions, params, negs)(0, 0);
        },
        3);
    const double parallel = time_ms(
        [&] { sink += batch_cost_matrix(clips, captions, params, negs)(0, 0); },
        3);
    std::printf("batch_cost_matrix B=%zu len=%zu: serial %.2f ms, omp %.2f ms "
                "(x%.2f)\n",
                b, len, serial, parallel, serial / parallel);
    if (sink == -1.0) std::printf("%f\n", sink);
  }
  return 0;
}
