#pragma once

#include <optional>
#include <utility>

#include "catmix/int2x2.hpp"

namespace catmix {

// Upper half-plane point.
struct HPoint {
    double x{0.0}, y{1.0};
};

// Unoriented geodesic: either a half-circle with real center and radius, or a
// vertical line x = xline.
struct GeoLine {
    bool vertical{false};
    double center{0.0}, radius{1.0};  // circle case
    double xline{0.0};                // vertical case
};

// Oriented geodesic carrying a supporting line plus the ideal feet ordered by
// travel direction. A foot may be +-infinity (vertical line).
struct OrientedGeo {
    double back{0.0}, fwd{0.0};
    bool is_vertical() const;
    GeoLine line() const;
};

double hyp_dist(const HPoint& a, const HPoint& b);
double hyp_cosh_dist(const HPoint& a, const HPoint& b);

// Right Moebius action z.m = (d z + b)/(c z + a) on points; the matrix is
// rescaled internally so arbitrarily large integer entries are accepted.
HPoint mobius_right(const HPoint& z, const Mat2& m);
double mobius_right_boundary(double x, const Mat2& m);  // accepts/returns +-inf

// Oriented geodesic through two distinct points, directed from a to b.
OrientedGeo geo_through(const HPoint& a, const HPoint& b);

// Point of the circle (center, radius) at log-parameter t, where the circle is
// (center + radius cos th, radius sin th) and t = log tan(th/2). t decreases
// toward the foot center+radius and increases toward center-radius; the
// parameter equals hyperbolic arclength.
HPoint circle_point_at(double center, double radius, double t);
double circle_param_of(double center, double radius, const HPoint& p);

// Signed side of a point relative to a supporting line (zero on the line).
double side_value(const GeoLine& g, const HPoint& p);

// Fundamental-domain reduction for the right action: returns delta with
// z.delta inside {|x| <= 1/2, |z| >= 1} and the reduced point. margin is the
// distance (in the euclidean test quantities) from the reduced point to the
// domain boundary.
struct Reduced {
    Mat2 delta;
    HPoint z;
    double margin;
};
Reduced reduce_to_fundamental(HPoint z);

// Intersection of the supporting lines of two distinct geodesics in the upper
// half plane, if any.
std::optional<HPoint> geo_intersect(const GeoLine& a, const GeoLine& b);

}  // namespace catmix
