// Least-squares fit of 5 cos(x/2) sin(y/2) cos(z/2) on the three-patch volume.
// Usage: demo_threepatch_fit [p] [max L]

#include "c1vol/approx.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
  const int p = argc > 1 ? std::atoi(argv[1]) : 5;
  const int maxL = argc > 2 ? std::atoi(argv[2]) : 2;
  auto vol = c1vol::load_volume_file(C1VOL_DATA_DIR "/threepatch_s53.json");
  auto z = c1vol::builtin_target("builtin:cos-sin-cos");
  std::printf("p,L,dim,e_volume,e_faces,e_edge,solver,seconds\n");
  for (int L = 0; L <= maxL; ++L) {
    auto t0 = std::chrono::steady_clock::now();
    auto B = c1vol::build_space(vol, c1vol::SplineSpaceConfig{p, 1, (1 << L) - 1});
    auto r = c1vol::l2_fit(vol, B, z);
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d,%d,%ld,%.4e,%.4e,%.4e,%s,%.1f\n", p, L, B.dim(), r.e_volume, r.e_faces, r.e_edge,
                r.solver.c_str(), s);
  }
}
