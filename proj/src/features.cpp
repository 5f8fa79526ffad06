#include "tengen/features.hpp"

#include <utility>

namespace tengen {

namespace {

// Fills one 8-plane group from a bare occupancy grid.
void fill_group(const std::vector<uint8_t>& grid, int size, Color own,
                float* out) {
  const int n = size * size;
  std::vector<int> libs = grid_chain_liberty_map(grid, size);
  const uint8_t own_v = static_cast<uint8_t>(own);
  const uint8_t opp_v = static_cast<uint8_t>(opponent(own));
  for (int p = 0; p < n; ++p) {
    if (grid[p] == 0) continue;
    bool is_own = grid[p] == own_v;
    int lib_slot = libs[p] >= 3 ? 2 : libs[p] - 1;  // libs >= 1 on any grid
    if (is_own) {
      out[0 * n + p] = 1.0f;
      out[(2 + lib_slot) * n + p] = 1.0f;
    } else if (grid[p] == opp_v) {
      out[1 * n + p] = 1.0f;
      out[(5 + lib_slot) * n + p] = 1.0f;
    }
  }
}

}  // namespace

FeatureTensor extract_features(const Position& pos) {
  FeatureTensor t;
  t.size = pos.size();
  const int n = pos.num_points();
  t.planes.assign(kFeaturePlanes * n, 0.0f);
  fill_group(pos.grid(), pos.size(), pos.to_move(), t.planes.data());
  fill_group(pos.prev_prev_grid(), pos.size(), pos.to_move(),
             t.planes.data() + 8 * n);
  return t;
}

Point transform_point(Point p, int size, int symmetry) {
  int r = p / size, c = p % size;
  if (symmetry & 1) std::swap(r, c);
  if (symmetry & 2) r = size - 1 - r;
  if (symmetry & 4) c = size - 1 - c;
  return static_cast<Point>(r * size + c);
}

FeatureTensor transform_tensor(const FeatureTensor& t, int symmetry) {
  FeatureTensor out;
  out.size = t.size;
  const int n = t.size * t.size;
  out.planes.assign(t.planes.size(), 0.0f);
  for (int plane = 0; plane < kFeaturePlanes; ++plane)
    for (Point p = 0; p < n; ++p)
      out.planes[plane * n + transform_point(p, t.size, symmetry)] =
          t.planes[plane * n + p];
  return out;
}

}  // namespace tengen
