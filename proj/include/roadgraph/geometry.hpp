#pragma once

#include <cmath>

namespace roadgraph {

/// Continuous pixel coordinates: origin at the center of the top-left pixel,
/// y grows downward.
struct Point {
    double x{0.0};
    double y{0.0};

    friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }
inline Point operator*(double s, Point a) { return {a.x * s, a.y * s}; }

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distanceSquared(Point a, Point b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}
inline double distance(Point a, Point b) { return std::sqrt(distanceSquared(a, b)); }
inline Point lerp(Point a, Point b, double t) { return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t}; }

/// Parameter in [0,1] of the point on segment ab closest to p.
double closestSegmentParameter(Point p, Point a, Point b);

double pointSegmentDistance(Point p, Point a, Point b);

/// Axis-aligned rectangle [minX, maxX] x [minY, maxY] in continuous coordinates.
struct Rect {
    double minX{0.0};
    double minY{0.0};
    double maxX{0.0};
    double maxY{0.0};

    bool contains(Point p) const {
        return p.x >= minX && p.x <= maxX && p.y >= minY && p.y <= maxY;
    }
};

/// Liang-Barsky clip of segment ab against r. Returns false when the segment
/// misses the rectangle; otherwise t0 <= t1 bound the inside portion.
bool clipSegment(Point a, Point b, const Rect& r, double& t0, double& t1);

/// Proper or touching intersection of segments ab and cd; on success ta and tc
/// are the parameters along each segment.
bool segmentIntersection(Point a, Point b, Point c, Point d, double& ta, double& tc);

}  // namespace roadgraph
