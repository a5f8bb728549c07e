#include "catmix/geometry.hpp"

#include <cmath>
#include <complex>

#include "catmix/errors.hpp"

namespace catmix {

namespace {

constexpr double kFootClamp = 1e12;

double clamp_foot(double f) {
    if (std::isinf(f)) return f;
    if (std::abs(f) > kFootClamp) return std::copysign(INFINITY, f);
    return f;
}

}  // namespace

bool OrientedGeo::is_vertical() const { return std::isinf(back) || std::isinf(fwd); }

GeoLine OrientedGeo::line() const {
    GeoLine g;
    if (is_vertical()) {
        g.vertical = true;
        g.xline = std::isinf(back) ? fwd : back;
    } else {
        g.vertical = false;
        g.center = 0.5 * (back + fwd);
        g.radius = 0.5 * std::abs(fwd - back);
    }
    return g;
}

double hyp_cosh_dist(const HPoint& a, const HPoint& b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return 1.0 + (dx * dx + dy * dy) / (2.0 * a.y * b.y);
}

double hyp_dist(const HPoint& a, const HPoint& b) {
    return std::acosh(std::max(1.0, hyp_cosh_dist(a, b)));
}

HPoint mobius_right(const HPoint& z, const Mat2& m) {
    // Common scale cancels in the quotient (d z + b)/(c z + a).
    double la = m.a == 0 ? -1e308 : log2_abs(m.a);
    double lb = m.b == 0 ? -1e308 : log2_abs(m.b);
    double lc = m.c == 0 ? -1e308 : log2_abs(m.c);
    double ld = m.d == 0 ? -1e308 : log2_abs(m.d);
    double top = std::max(std::max(la, lb), std::max(lc, ld));
    auto scaled = [&](const bigint& v, double lv) -> double {
        if (v == 0) return 0.0;
        double mag = std::exp2(lv - top);
        return v > 0 ? mag : -mag;
    };
    std::complex<double> zz(z.x, z.y);
    std::complex<double> num = scaled(m.d, ld) * zz + scaled(m.b, lb);
    std::complex<double> den = scaled(m.c, lc) * zz + scaled(m.a, la);
    std::complex<double> w = num / den;
    return HPoint{w.real(), std::abs(w.imag())};
}

double mobius_right_boundary(double x, const Mat2& m) {
    double la = m.a == 0 ? -1e308 : log2_abs(m.a);
    double lb = m.b == 0 ? -1e308 : log2_abs(m.b);
    double lc = m.c == 0 ? -1e308 : log2_abs(m.c);
    double ld = m.d == 0 ? -1e308 : log2_abs(m.d);
    double top = std::max(std::max(la, lb), std::max(lc, ld));
    auto scaled = [&](const bigint& v, double lv) -> double {
        if (v == 0) return 0.0;
        double mag = std::exp2(lv - top);
        return v > 0 ? mag : -mag;
    };
    double a = scaled(m.a, la), b = scaled(m.b, lb), c = scaled(m.c, lc),
           d = scaled(m.d, ld);
    double num, den;
    if (std::isinf(x)) {
        num = d;
        den = c;
    } else {
        num = d * x + b;
        den = c * x + a;
    }
    if (den == 0.0) return std::copysign(INFINITY, num);
    return clamp_foot(num / den);
}

OrientedGeo geo_through(const HPoint& a, const HPoint& b) {
    double dx = b.x - a.x;
    double scale = std::max({std::abs(a.x), std::abs(b.x), a.y, b.y, 1.0});
    if (std::abs(dx) < 1e-14 * scale) {
        // Vertical: direction up if b lies above a.
        OrientedGeo g;
        if (b.y > a.y) {
            g.back = a.x;
            g.fwd = INFINITY;
        } else {
            g.back = INFINITY;
            g.fwd = a.x;
        }
        return g;
    }
    // Center m solves |a - m|^2 = |b - m|^2 on the real axis.
    double m = (b.x * b.x + b.y * b.y - a.x * a.x - a.y * a.y) / (2.0 * dx);
    double r = std::hypot(a.x - m, a.y);
    OrientedGeo g;
    if (dx > 0) {
        g.back = clamp_foot(m - r);
        g.fwd = clamp_foot(m + r);
    } else {
        g.back = clamp_foot(m + r);
        g.fwd = clamp_foot(m - r);
    }
    return g;
}

HPoint circle_point_at(double center, double radius, double t) {
    double th = 2.0 * std::atan(std::exp(t));
    return HPoint{center + radius * std::cos(th), radius * std::sin(th)};
}

double circle_param_of(double center, double radius, const HPoint& p) {
    double c = (p.x - center) / radius;
    c = std::min(1.0, std::max(-1.0, c));
    double th = std::acos(c);
    return std::log(std::tan(0.5 * th));
}

double side_value(const GeoLine& g, const HPoint& p) {
    if (g.vertical) return p.x - g.xline;
    double dx = p.x - g.center;
    return dx * dx + p.y * p.y - g.radius * g.radius;
}

Reduced reduce_to_fundamental(HPoint z) {
    Mat2 delta;  // identity
    const Mat2 S{0, 1, -1, 0};
    for (int iter = 0; iter < 20000; ++iter) {
        if (!std::isfinite(z.x) || !std::isfinite(z.y) || std::abs(z.x) > 1e17)
            throw NumericallyAmbiguous("fundamental-domain reduction out of range");
        double k = std::nearbyint(z.x);
        if (k != 0.0) {
            // z.T^{-k} = z - k
            bigint kk = bigint(static_cast<long long>(k));
            delta = delta * Mat2{1, -kk, 0, 1};
            z.x -= k;
        }
        double n = z.x * z.x + z.y * z.y;
        if (n >= 1.0) {
            double margin = std::min(0.5 - std::abs(z.x), n - 1.0);
            return Reduced{delta, z, margin};
        }
        // z.S = -1/z
        delta = delta * S;
        z = HPoint{-z.x / n, z.y / n};
    }
    throw NumericallyAmbiguous("fundamental-domain reduction did not converge");
}

std::optional<HPoint> geo_intersect(const GeoLine& a, const GeoLine& b) {
    if (a.vertical && b.vertical) return std::nullopt;
    if (a.vertical || b.vertical) {
        const GeoLine& v = a.vertical ? a : b;
        const GeoLine& c = a.vertical ? b : a;
        double dx = v.xline - c.center;
        double y2 = c.radius * c.radius - dx * dx;
        if (y2 <= 0.0) return std::nullopt;
        return HPoint{v.xline, std::sqrt(y2)};
    }
    if (a.center == b.center) return std::nullopt;
    double x = (b.center * b.center - b.radius * b.radius - a.center * a.center +
                a.radius * a.radius) /
               (2.0 * (b.center - a.center));
    double dx = x - a.center;
    double y2 = a.radius * a.radius - dx * dx;
    if (y2 <= 0.0) return std::nullopt;
    return HPoint{x, std::sqrt(y2)};
}

}  // namespace catmix
