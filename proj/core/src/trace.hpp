#pragma once

#include <cmath>
#include <cstdlib>
#include <vector>

#include "furrow/image.hpp"

namespace furrow::detail {

struct RowPoint {
  int row = 0;
  double column = 0.0;
};

// Marks round(column) on each row; consecutive rows are joined with a
// horizontal run so the trace stays 8-connected. Returns pixels marked.
inline std::size_t draw_row_trace(EdgeMask& mask, const std::vector<RowPoint>& points) {
  std::size_t marked = 0;
  bool have_prev = false;
  int prev_col = 0;
  int prev_row = 0;
  for (const auto& p : points) {
    if (!std::isfinite(p.column) || p.row < 0 || p.row >= mask.height()) {
      have_prev = false;
      continue;
    }
    const double rounded = std::round(p.column);
    if (rounded < 0.0 || rounded >= mask.width()) {
      have_prev = false;
      continue;
    }
    const int col = static_cast<int>(rounded);
    mask.at(col, p.row) = 1;
    ++marked;
    if (have_prev && std::abs(prev_row - p.row) == 1 && std::abs(col - prev_col) > 1) {
      const int step = col > prev_col ? 1 : -1;
      for (int x = prev_col + step; x != col; x += step) mask.at(x, p.row) = 1;
    }
    have_prev = true;
    prev_col = col;
    prev_row = p.row;
  }
  return marked;
}

}  // namespace furrow::detail
