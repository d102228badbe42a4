#include "roadgraph/geometry.hpp"

#include <algorithm>

namespace roadgraph {

double closestSegmentParameter(Point p, Point a, Point b) {
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 <= 0.0) return 0.0;
    return std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
}

double pointSegmentDistance(Point p, Point a, Point b) {
    return distance(p, lerp(a, b, closestSegmentParameter(p, a, b)));
}

bool clipSegment(Point a, Point b, const Rect& r, double& t0, double& t1) {
    t0 = 0.0;
    t1 = 1.0;
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - r.minX, r.maxX - a.x, a.y - r.minY, r.maxY - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;
            continue;
        }
        const double t = q[i] / p[i];
        if (p[i] < 0.0) {
            if (t > t1) return false;
            t0 = std::max(t0, t);
        } else {
            if (t < t0) return false;
            t1 = std::min(t1, t);
        }
    }
    return t0 <= t1;
}

bool segmentIntersection(Point a, Point b, Point c, Point d, double& ta, double& tc) {
    const Point r = b - a;
    const Point s = d - c;
    const double denom = cross(r, s);
    if (std::abs(denom) < 1e-12) return false;  // parallel or degenerate
    const Point ac = c - a;
    ta = cross(ac, s) / denom;
    tc = cross(ac, r) / denom;
    return ta >= 0.0 && ta <= 1.0 && tc >= 0.0 && tc <= 1.0;
}

}  // namespace roadgraph
