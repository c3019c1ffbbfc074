#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace cemmas {

// Lattice point. All predicates below use exact integer arithmetic; nothing
// in the geometry layer ever touches floating point.
struct GridPoint {
    long long x = 0;
    long long y = 0;
    friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

inline long long cross(const GridPoint& o, const GridPoint& a, const GridPoint& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline bool collinear(const GridPoint& a, const GridPoint& b, const GridPoint& c) {
    return cross(a, b, c) == 0;
}

inline int orientation_sign(long long v) { return (v > 0) - (v < 0); }

// True iff the open segments a1a2 and b1b2 cross in a single interior point.
// A shared endpoint is not a crossing. With no three input points collinear
// the proper-crossing test is the whole story; degenerate overlaps cannot
// occur and would report false.
inline bool segments_intersect(const GridPoint& a1, const GridPoint& a2,
                               const GridPoint& b1, const GridPoint& b2) {
    const int o1 = orientation_sign(cross(a1, a2, b1));
    const int o2 = orientation_sign(cross(a1, a2, b2));
    const int o3 = orientation_sign(cross(b1, b2, a1));
    const int o4 = orientation_sign(cross(b1, b2, a2));
    return o1 * o2 < 0 && o3 * o4 < 0;
}

// Convex hull by monotone chain. Requires at least 3 distinct points with no
// three collinear. Returns indices into `pts`, counterclockwise, starting at
// the lexicographically smallest point.
inline std::vector<int> convex_hull(const std::vector<GridPoint>& pts) {
    if (pts.size() < 3) throw std::invalid_argument("convex_hull: needs at least 3 points");

    std::vector<int> idx(pts.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return pts[a].x != pts[b].x ? pts[a].x < pts[b].x : pts[a].y < pts[b].y;
    });

    const auto n = static_cast<int>(pts.size());
    std::vector<int> hull(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) { // lower chain
        while (k >= 2 && cross(pts[hull[k - 2]], pts[hull[k - 1]], pts[idx[i]]) <= 0) --k;
        hull[k++] = idx[i];
    }
    for (int i = n - 2, lower = k + 1; i >= 0; --i) { // upper chain
        while (k >= lower && cross(pts[hull[k - 2]], pts[hull[k - 1]], pts[idx[i]]) <= 0) --k;
        hull[k++] = idx[i];
    }
    hull.resize(k - 1);
    return hull;
}

// True iff p lies strictly inside the counterclockwise convex polygon given
// by hull indices into pts.
inline bool strictly_inside_hull(const std::vector<GridPoint>& pts,
                                 const std::vector<int>& hull, const GridPoint& p) {
    const auto h = static_cast<int>(hull.size());
    for (int i = 0; i < h; ++i) {
        if (cross(pts[hull[i]], pts[hull[(i + 1) % h]], p) <= 0) return false;
    }
    return true;
}

} // namespace cemmas
