#include "bipnet/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

namespace bipnet {

Raster::Raster(int height, int width, double fill)
    : height_(height), width_(width),
      data_(static_cast<std::size_t>(height) * width, fill) {
  if (height < 1 || width < 1) {
    throw Error(ErrorCode::InvalidArgument, "raster dimensions must be positive");
  }
}

bool Raster::is_binary() const {
  for (double v : data_) {
    if (v != 0.0 && v != 1.0) return false;
  }
  return true;
}

long long Raster::foreground_count() const {
  long long n = 0;
  for (double v : data_) {
    if (v >= 0.5) ++n;
  }
  return n;
}

namespace {

// Crossing abscissa of edge (vi -> vj anchoring) with the horizontal line
// y = y0, written exactly as point_in_polygon computes it so scanline parity
// and the per-point test agree bit for bit.
inline double crossing_x(const Point2& vi, const Point2& vj, double y0) {
  return (vj.x - vi.x) * (y0 - vi.y) / (vj.y - vi.y) + vi.x;
}

}  // namespace

void rasterize_onto(const Polygon& poly, Raster& grid, int row0, int col0) {
  const auto& v = poly.vertices();
  const Bounds b = poly.bounds();

  const int gr0 = std::max(0, static_cast<int>(std::floor(b.min_y - 0.5)) - row0 - 1);
  const int gr1 = std::min(grid.height() - 1, static_cast<int>(std::ceil(b.max_y - 0.5)) - row0 + 1);
  const int gc0 = std::max(0, static_cast<int>(std::floor(b.min_x - 0.5)) - col0 - 1);
  const int gc1 = std::min(grid.width() - 1, static_cast<int>(std::ceil(b.max_x - 0.5)) - col0 + 1);
  if (gr0 > gr1 || gc0 > gc1) return;

  // Active-edge sweep: edge (vj -> vi) crosses the row line y0 exactly when
  // min(y) <= y0 < max(y), the same half-open rule point_in_polygon applies.
  struct EdgeRec {
    double y_lo, y_hi;
    std::size_t i, j;
  };
  std::vector<EdgeRec> edges;
  edges.reserve(v.size());
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if (v[i].y == v[j].y) continue;
    edges.push_back({std::min(v[i].y, v[j].y), std::max(v[i].y, v[j].y), i, j});
  }
  std::vector<std::vector<std::size_t>> starts(gr1 - gr0 + 2);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const int r_first =
        std::max(gr0, static_cast<int>(std::ceil(edges[e].y_lo - 0.5)) - row0);
    if (r_first > gr1) continue;
    if (row0 + r_first + 0.5 >= edges[e].y_hi) continue;
    starts[r_first - gr0].push_back(e);
  }

  std::vector<std::size_t> active;
  std::vector<double> xs;
  for (int r = gr0; r <= gr1; ++r) {
    const double y0 = row0 + r + 0.5;
    for (std::size_t e : starts[r - gr0]) active.push_back(e);
    xs.clear();
    for (std::size_t k = 0; k < active.size();) {
      const EdgeRec& e = edges[active[k]];
      if (y0 >= e.y_hi) {
        active[k] = active.back();
        active.pop_back();
        continue;
      }
      if ((v[e.i].y > y0) != (v[e.j].y > y0)) xs.push_back(crossing_x(v[e.i], v[e.j], y0));
      ++k;
    }
    if (xs.empty()) continue;
    std::sort(xs.begin(), xs.end());
    std::size_t k = 0;
    for (int c = gc0; c <= gc1; ++c) {
      const double x0 = col0 + c + 0.5;
      while (k < xs.size() && xs[k] <= x0) ++k;
      if ((xs.size() - k) & 1) grid(r, c) = 1.0;
    }
  }

  // Centers that sit exactly on an edge count as inside even when parity says
  // otherwise; walk each edge and test the nearby centers directly.
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const Point2& a = v[j];
    const Point2& p = v[i];
    const double ymin = std::min(a.y, p.y) - kGeomTol;
    const double ymax = std::max(a.y, p.y) + kGeomTol;
    int er0 = std::max(gr0, static_cast<int>(std::ceil(ymin - 0.5)) - row0);
    int er1 = std::min(gr1, static_cast<int>(std::floor(ymax - 0.5)) - row0);
    const double len = norm(p - a);
    const bool near_horizontal = std::abs(p.y - a.y) <= 1e-6 * std::max(1.0, len);
    for (int r = er0; r <= er1; ++r) {
      const double y0 = row0 + r + 0.5;
      int cand0, cand1;
      if (near_horizontal) {
        cand0 = std::max(gc0, static_cast<int>(std::floor(std::min(a.x, p.x) - 0.5)) - col0);
        cand1 = std::min(gc1, static_cast<int>(std::ceil(std::max(a.x, p.x) - 0.5)) - col0);
      } else {
        const double xl = a.x + (y0 - a.y) * (p.x - a.x) / (p.y - a.y);
        const int cc = static_cast<int>(std::floor(xl)) - col0;
        cand0 = std::max(gc0, cc - 1);
        cand1 = std::min(gc1, cc + 1);
      }
      for (int c = cand0; c <= cand1; ++c) {
        if (grid(r, c) >= 0.5) continue;
        const Point2 center{col0 + c + 0.5, y0};
        if (distance_point_segment(center, a, p) <= kGeomTol) grid(r, c) = 1.0;
      }
    }
  }
}

Raster rasterize(const Polygon& poly, int height, int width) {
  Raster out(height, width, 0.0);
  rasterize_onto(poly, out, 0, 0);
  return out;
}

LabeledMask label_components(const Raster& mask, double threshold) {
  const int h = mask.height();
  const int w = mask.width();
  LabeledMask out;
  out.height = h;
  out.width = w;
  out.labels.assign(static_cast<std::size_t>(h) * w, -1);

  // Run-based labeling: gather row runs, union 8-adjacent runs of consecutive
  // rows, then resolve labels in raster order of each component's first run.
  struct Run {
    int row, c0, c1;
    int parent;
  };
  std::vector<Run> runs;
  std::vector<int> row_start(h + 1, 0);
  for (int r = 0; r < h; ++r) {
    row_start[r] = static_cast<int>(runs.size());
    int c = 0;
    while (c < w) {
      if (mask(r, c) >= threshold) {
        const int c0 = c;
        while (c < w && mask(r, c) >= threshold) ++c;
        runs.push_back({r, c0, c - 1, static_cast<int>(runs.size())});
      } else {
        ++c;
      }
    }
  }
  row_start[h] = static_cast<int>(runs.size());

  auto find = [&](int x) {
    while (runs[x].parent != x) {
      runs[x].parent = runs[runs[x].parent].parent;
      x = runs[x].parent;
    }
    return x;
  };
  for (int r = 1; r < h; ++r) {
    int i = row_start[r - 1];
    int j = row_start[r];
    const int iend = row_start[r];
    const int jend = row_start[r + 1];
    while (i < iend && j < jend) {
      const Run& a = runs[i];
      const Run& b = runs[j];
      if (a.c0 <= b.c1 + 1 && b.c0 <= a.c1 + 1) {
        const int ra = find(i);
        const int rb = find(j);
        if (ra != rb) runs[std::max(ra, rb)].parent = std::min(ra, rb);
      }
      if (a.c1 < b.c1) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  std::vector<int32_t> root_label(runs.size(), -1);
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const int root = find(static_cast<int>(k));
    if (root_label[root] < 0) {
      root_label[root] = static_cast<int32_t>(out.components.size());
      out.components.push_back({runs[root].row, runs[root].c0, runs[root].row, runs[root].c0});
    }
    const int32_t label = root_label[root];
    ComponentStats& stats = out.components[label];
    const Run& run = runs[k];
    stats.min_r = std::min(stats.min_r, run.row);
    stats.max_r = std::max(stats.max_r, run.row);
    stats.min_c = std::min(stats.min_c, run.c0);
    stats.max_c = std::max(stats.max_c, run.c1);
    stats.pixel_count += run.c1 - run.c0 + 1;
    int32_t* row_labels = out.labels.data() + static_cast<std::size_t>(run.row) * w;
    for (int c = run.c0; c <= run.c1; ++c) {
      row_labels[c] = label;
      stats.value_sum += mask(run.row, c);
    }
  }
  return out;
}

namespace {

// Clockwise Moore neighborhood in image coordinates, starting east.
constexpr std::array<std::array<int, 2>, 8> kMooreDirs = {{
    {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

struct GridRef {
  const LabeledMask& lm;
  int32_t comp;
  bool at(int x, int y) const {
    if (x < 0 || y < 0 || x >= lm.width || y >= lm.height) return false;
    return lm.label_at(y, x) == comp;
  }
};

// The walk is a deterministic function of the (pixel, backtrack) state, so it
// terminates exactly when a state repeats; the lead-in before the repeated
// state is cut so the result is one full boundary cycle. State indices are
// local to the component's bounding box.
std::vector<Point2> moore_trace(const GridRef& g, const ComponentStats& stats, int start_x,
                                int start_y, long long pixel_count) {
  std::vector<Point2> path;
  path.push_back({start_x + 0.5, start_y + 0.5});

  int px = start_x, py = start_y;
  int back = 4;  // scanning starts from the (background) west neighbor
  const int bw = stats.max_c - stats.min_c + 1;
  const int bh = stats.max_r - stats.min_r + 1;
  std::vector<int32_t> seen_at(static_cast<std::size_t>(bw) * bh * 8, -1);
  auto state_index = [&](int x, int y, int b) {
    return (static_cast<std::size_t>(y - stats.min_r) * bw + (x - stats.min_c)) * 8 + b;
  };
  seen_at[state_index(px, py, back)] = 0;

  const long long max_steps = pixel_count * 16 + 64;
  for (long long step_count = 0; step_count < max_steps; ++step_count) {
    int found = -1;
    for (int s = 1; s <= 8; ++s) {
      const int nd = (back + s) % 8;
      if (g.at(px + kMooreDirs[nd][0], py + kMooreDirs[nd][1])) {
        found = s;
        break;
      }
    }
    if (found < 0) return path;  // isolated pixel
    const int nd = (back + found) % 8;
    const int last_bg = (back + found - 1) % 8;
    const int bx = px + kMooreDirs[last_bg][0];
    const int by = py + kMooreDirs[last_bg][1];
    px += kMooreDirs[nd][0];
    py += kMooreDirs[nd][1];
    // Backtrack direction from the new pixel toward the last background cell.
    back = -1;
    for (int d = 0; d < 8; ++d) {
      if (px + kMooreDirs[d][0] == bx && py + kMooreDirs[d][1] == by) {
        back = d;
        break;
      }
    }
    int32_t& slot = seen_at[state_index(px, py, back)];
    if (slot >= 0) {
      path.erase(path.begin(), path.begin() + slot);
      return path;
    }
    slot = static_cast<int32_t>(path.size());
    path.push_back({px + 0.5, py + 0.5});
  }
  return path;
}

// Boundary of the union of pixel squares, for components too thin to trace
// through pixel centers. Vertices are grid-corner coordinates.
std::vector<Point2> crack_trace(const GridRef& g, const ComponentStats& stats) {
  struct Vec {
    int x, y;
  };
  auto key = [](int x, int y) { return (static_cast<int64_t>(y) << 32) | static_cast<uint32_t>(x); };

  // Directed boundary edges, interior kept to the walk's right.
  std::unordered_map<int64_t, std::vector<Vec>> edges;  // start corner -> directions
  for (int r = stats.min_r; r <= stats.max_r; ++r) {
    for (int c = stats.min_c; c <= stats.max_c; ++c) {
      if (!g.at(c, r)) continue;
      if (!g.at(c, r - 1)) edges[key(c, r)].push_back({1, 0});
      if (!g.at(c + 1, r)) edges[key(c + 1, r)].push_back({0, 1});
      if (!g.at(c, r + 1)) edges[key(c + 1, r + 1)].push_back({-1, 0});
      if (!g.at(c - 1, r)) edges[key(c, r + 1)].push_back({0, -1});
    }
  }

  auto take = [&](int x, int y, Vec prefer_incoming) -> Vec {
    auto it = edges.find(key(x, y));
    if (it == edges.end() || it->second.empty()) return {0, 0};
    auto& list = it->second;
    std::size_t pick = 0;
    if (list.size() > 1) {
      // Prefer the left turn so corner-touching diagonals stay in one loop.
      const Vec left{prefer_incoming.y, -prefer_incoming.x};
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (list[i].x == left.x && list[i].y == left.y) pick = i;
      }
    }
    const Vec d = list[pick];
    list.erase(list.begin() + pick);
    return d;
  };

  std::vector<Point2> best;
  double best_area = -1.0;
  for (int r = stats.min_r; r <= stats.max_r + 1; ++r) {
    for (int c = stats.min_c; c <= stats.max_c + 1; ++c) {
      auto it = edges.find(key(c, r));
      if (it == edges.end() || it->second.empty()) continue;
      std::vector<Point2> loop;
      int x = c, y = r;
      Vec dir{0, 0};
      while (true) {
        const Vec d = take(x, y, dir);
        if (d.x == 0 && d.y == 0) break;
        if (!(d.x == dir.x && d.y == dir.y)) loop.push_back({double(x), double(y)});
        dir = d;
        x += d.x;
        y += d.y;
        if (x == c && y == r) break;
      }
      if (loop.size() < 3) continue;
      double area = 0.0;
      for (std::size_t i = 0, j = loop.size() - 1; i < loop.size(); j = i++) {
        area += loop[j].x * loop[i].y - loop[i].x * loop[j].y;
      }
      area = std::abs(0.5 * area);
      if (area > best_area) {
        best_area = area;
        best = std::move(loop);
      }
    }
  }
  return best;
}

}  // namespace

namespace {

// Rasterize-back fidelity of a traced contour. Pinched components make the
// center path self-cross and drop whole lobes (any missing pixel disqualifies
// the trace, downstream merges rely on full coverage); very jagged ones leak
// across cut corners (bounded by the round-trip IoU). Either way the caller
// falls back to the exact pixel-edge outline.
bool trace_covers_component(const Polygon& traced, const GridRef& g,
                            const ComponentStats& stats) {
  const int r0 = stats.min_r - 1;
  const int c0 = stats.min_c - 1;
  Raster back(stats.max_r - stats.min_r + 3, stats.max_c - stats.min_c + 3, 0.0);
  rasterize_onto(traced, back, r0, c0);
  long long inter = 0, uni = 0;
  for (int r = 0; r < back.height(); ++r) {
    for (int c = 0; c < back.width(); ++c) {
      const bool in_comp = g.at(c0 + c, r0 + r);
      const bool in_back = back(r, c) >= 0.5;
      if (in_comp && !in_back) return false;
      inter += in_comp && in_back;
      uni += in_comp || in_back;
    }
  }
  return uni > 0 && static_cast<double>(inter) / static_cast<double>(uni) >= 0.95;
}

}  // namespace

std::vector<Polygon> trace_outer_contours(const Raster& mask) {
  return trace_outer_contours(label_components(mask, 0.5));
}

std::vector<Polygon> trace_outer_contours(const LabeledMask& lm) {
  std::vector<Polygon> out;
  out.reserve(lm.components.size());

  for (std::size_t ci = 0; ci < lm.components.size(); ++ci) {
    const ComponentStats& stats = lm.components[ci];
    const GridRef g{lm, static_cast<int32_t>(ci)};

    // First pixel of the component in raster order.
    int sx = -1, sy = -1;
    for (int r = stats.min_r; r <= stats.max_r && sx < 0; ++r) {
      for (int c = stats.min_c; c <= stats.max_c; ++c) {
        if (g.at(c, r)) {
          sx = c;
          sy = r;
          break;
        }
      }
    }

    std::vector<Point2> path = moore_trace(g, stats, sx, sy, stats.pixel_count);
    if (path.size() >= 2 && norm(path.front() - path.back()) <= kGeomTol) path.pop_back();

    // Drop interior points of straight runs (same direction, not reversals);
    // the boundary polyline is unchanged and the skipped pixel centers still
    // lie on it.
    if (path.size() >= 3) {
      std::vector<Point2> turns;
      turns.reserve(path.size());
      const std::size_t np = path.size();
      for (std::size_t i = 0; i < np; ++i) {
        const Point2 a = path[i] - path[(i + np - 1) % np];
        const Point2 b = path[(i + 1) % np] - path[i];
        if (std::abs(cross(a, b)) > 1e-12 || dot(a, b) <= 0.0) turns.push_back(path[i]);
      }
      if (turns.size() >= 3) path = std::move(turns);
    }

    bool ok = path.size() >= 3;
    if (ok) {
      double area = 0.0;
      for (std::size_t i = 0, j = path.size() - 1; i < path.size(); j = i++) {
        area += path[j].x * path[i].y - path[i].x * path[j].y;
      }
      ok = std::abs(0.5 * area) >= 0.25;
    }
    if (ok) {
      try {
        Polygon traced(std::move(path));
        if (trace_covers_component(traced, g, stats)) {
          out.push_back(std::move(traced));
          continue;
        }
      } catch (const Error&) {
        // fall through to the crack outline
      }
    }
    std::vector<Point2> outline = crack_trace(g, stats);
    out.push_back(Polygon(std::move(outline)));
  }
  return out;
}

double mask_iou(const Raster& a, const Raster& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::DimensionMismatch, "mask_iou dimensions differ");
  }
  long long inter = 0, uni = 0;
  const auto& da = a.data();
  const auto& db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    const bool fa = da[i] >= 0.5;
    const bool fb = db[i] >= 0.5;
    inter += (fa && fb);
    uni += (fa || fb);
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace bipnet
