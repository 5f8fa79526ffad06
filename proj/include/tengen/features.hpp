#pragma once

#include <vector>

#include "tengen/goban.hpp"

namespace tengen {

constexpr int kFeaturePlanes = 16;

// 16 binary planes, channel-major: planes[plane * size*size + point].
// Planes 0-7 encode the current grid, planes 8-15 the grid two plies ago.
// Within each group of 8 (all from the side-to-move's perspective):
//   0 own stones, 1 opponent stones,
//   2-4 own-chain liberties one-hot {1, 2, >=3},
//   5-7 opponent-chain liberties one-hot {1, 2, >=3}.
struct FeatureTensor {
  int size = 0;
  std::vector<float> planes;  // kFeaturePlanes * size * size

  float at(int plane, Point p) const { return planes[plane * size * size + p]; }
};

FeatureTensor extract_features(const Position& pos);

// Applies one of the 8 board symmetries (0 = identity; bit 0 transpose,
// bit 1 flip rows, bit 2 flip cols) to a tensor and a point label.
FeatureTensor transform_tensor(const FeatureTensor& t, int symmetry);
Point transform_point(Point p, int size, int symmetry);

}  // namespace tengen
