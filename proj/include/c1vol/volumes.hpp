#pragma once

// Random volumes with one inner edge: a regular wedge fan around a straight
// edge, with every vertex moved by rational noise.

#include "c1vol/gluing.hpp"

#include <cmath>
#include <random>

namespace c1vol {

inline Rational milli(long m) { return ratio(m, 1000); }

/// Regular fan of nu hexahedra around the segment (0,0,0)-(0,0,1), with
/// coordinates rounded to multiples of 1/1000.
inline MultiPatchVolume wedge_template(int nu) {
  if (nu < 3) throw std::invalid_argument("wedge fan needs at least 3 patches");
  const double pi = 3.14159265358979323846;
  auto q = [](double x) { return milli(std::lround(x * 1000)); };
  std::vector<Vec3> v;
  for (int layer = 0; layer < 2; ++layer) {
    Rational z(layer);
    v.push_back({Rational(0), Rational(0), z});
    for (int i = 0; i < nu; ++i) {
      double t = 2 * pi * i / nu;
      v.push_back({q(std::cos(t)), q(std::sin(t)), z});
    }
    for (int i = 0; i < nu; ++i) {
      double t = 2 * pi * (i + 0.5) / nu;
      v.push_back({q(std::cos(t)), q(std::sin(t)), z});
    }
  }
  const int top = 2 * nu + 1;
  std::vector<std::array<int, 8>> patches;
  for (int i = 0; i < nu; ++i) {
    int a = 1 + i, b = 1 + (i + 1) % nu, m = 1 + nu + i;
    patches.push_back({0, a, b, m, top, top + a, top + b, top + m});
  }
  return make_volume(std::move(v), std::move(patches));
}

/// Shortest patch edge at each vertex.
inline std::vector<double> local_edge_length(const MultiPatchVolume& vol) {
  std::vector<double> len(vol.vertices.size(), std::numeric_limits<double>::infinity());
  for (int p = 0; p < vol.num_patches(); ++p)
    for (int le = 0; le < 12; ++le) {
      auto c = local_edge_corners(le);
      int a = vol.patches[p][c[0]], b = vol.patches[p][c[1]];
      double s = 0.0;
      for (int k = 0; k < 3; ++k) {
        double d = Rational(vol.vertices[a][k] - vol.vertices[b][k]).get_d();
        s += d * d;
      }
      len[a] = std::min(len[a], std::sqrt(s));
      len[b] = std::min(len[b], std::sqrt(s));
    }
  return len;
}

struct GenericVolume {
  MultiPatchVolume vol;
  int attempts = 0;
};

/// Perturbs the wedge template until the mesh is regular and every inner face
/// satisfies the gluing assumption for cfg; gives up after max_attempts.
inline GenericVolume random_wedge_volume(int nu, const SplineSpaceConfig& cfg, std::mt19937_64& rng,
                                         int max_attempts = 10, double amplitude = 0.1) {
  const MultiPatchVolume base = wedge_template(nu);
  const auto len = local_edge_length(base);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    std::vector<Vec3> v = base.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
      long m = static_cast<long>(std::floor(amplitude * len[i] * 1000));
      std::uniform_int_distribution<long> noise(-m, m);
      for (int k = 0; k < 3; ++k) v[i][k] += milli(noise(rng));
    }
    try {
      MultiPatchVolume vol = make_volume(std::move(v), base.patches);
      if (!check_assumption1(vol, cfg).pass()) continue;
      return {std::move(vol), attempt};
    } catch (const std::exception&) {
      continue;
    }
  }
  throw std::runtime_error("no admissible random volume after " + std::to_string(max_attempts) + " attempts");
}

/// Two unit cubes sharing the face x = 1, every vertex moved by up to
/// `amplitude` (multiples of 1/1000); retried until the mesh is regular.
inline MultiPatchVolume random_two_patch_volume(std::mt19937_64& rng, double amplitude = 0.2,
                                                int max_attempts = 50) {
  const long m = static_cast<long>(std::floor(amplitude * 1000));
  std::uniform_int_distribution<long> noise(-m, m);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<Vec3> v;
    for (int z = 0; z < 2; ++z)
      for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 3; ++x)
          v.push_back({Rational(x) + milli(noise(rng)), Rational(y) + milli(noise(rng)), Rational(z) + milli(noise(rng))});
    auto id = [](int x, int y, int z) { return (z * 2 + y) * 3 + x; };
    std::vector<std::array<int, 8>> patches;
    for (int c = 0; c < 2; ++c)
      patches.push_back({id(c, 0, 0), id(c + 1, 0, 0), id(c, 1, 0), id(c + 1, 1, 0), id(c, 0, 1), id(c + 1, 0, 1),
                         id(c, 1, 1), id(c + 1, 1, 1)});
    try {
      return make_volume(std::move(v), std::move(patches));
    } catch (const std::exception&) {
      continue;
    }
  }
  throw std::runtime_error("no regular random two-patch volume");
}

/// Conjectured generic edge-space dimension for valency nu.
inline int generic_edge_dimension(int nu, int p, int r, int k) {
  return 3 * p + 1 + nu * (p - 1) + k * std::max(0, (nu + 3) * (p - r - 3) + 3);
}

}  // namespace c1vol
