// Dimension of the C1 space on a two-patch volume against the closed form
// 2 n^2 (n - 2) + n0^2 + n1^2.

#include "c1vol/c1space.hpp"

#include <cstdio>

int main(int argc, char** argv) {
  const char* path = argc > 1 ? argv[1] : C1VOL_DATA_DIR "/twopatch.json";
  auto vol = c1vol::load_volume_file(path);
  std::printf("p,k,n,dim_patch,dim_face,dim_total,closed_form\n");
  for (int p = 3; p <= 6; ++p)
    for (int k = 0; k <= 3; ++k) {
      c1vol::SplineSpaceConfig cfg{p, 1, k};
      auto d = c1vol::count_dims(vol, cfg);
      long n = cfg.n(), n0 = cfg.n0(), n1 = cfg.n1();
      std::printf("%d,%d,%ld,%ld,%ld,%ld,%ld\n", p, k, n, d.dim_patch, d.dim_face, d.total(),
                  2 * n * n * (n - 2) + n0 * n0 + n1 * n1);
    }
}
