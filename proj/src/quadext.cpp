#include "catmix/quadext.hpp"

#include <boost/integer/common_factor.hpp>
#include <cmath>
#include <sstream>

#include "catmix/errors.hpp"

namespace catmix {

namespace {

bigint gcd3(const bigint& a, const bigint& b, const bigint& c) {
    return boost::integer::gcd(boost::integer::gcd(a, b), c);
}

}  // namespace

Surd make_surd(bigint p, bigint s, bigint q, bigint disc) {
    if (q == 0) throw Error("surd: zero denominator");
    if (disc <= 0) throw Error("surd: discriminant must be positive");
    bigint r = isqrt(disc);
    if (r * r == disc) throw Error("surd: discriminant is a perfect square");
    if (q < 0) {
        p = -p;
        s = -s;
        q = -q;
    }
    bigint g = gcd3(p, s, q);
    if (g > 1) {
        p /= g;
        s /= g;
        q /= g;
    }
    return Surd{std::move(p), std::move(s), std::move(q), std::move(disc)};
}

Surd surd_conjugate(const Surd& x) { return make_surd(x.p, -x.s, x.q, x.disc); }

static void check_same_field(const Surd& x, const Surd& y) {
    if (x.disc != y.disc) throw Error("surd: mixed discriminants");
}

Surd operator+(const Surd& x, const Surd& y) {
    check_same_field(x, y);
    return make_surd(x.p * y.q + y.p * x.q, x.s * y.q + y.s * x.q, x.q * y.q, x.disc);
}

Surd operator-(const Surd& x, const Surd& y) {
    check_same_field(x, y);
    return make_surd(x.p * y.q - y.p * x.q, x.s * y.q - y.s * x.q, x.q * y.q, x.disc);
}

Surd operator*(const Surd& x, const Surd& y) {
    check_same_field(x, y);
    return make_surd(x.p * y.p + x.s * y.s * x.disc, x.p * y.s + x.s * y.p, x.q * y.q,
                     x.disc);
}

Surd operator/(const Surd& x, const Surd& y) {
    check_same_field(x, y);
    bigint norm = y.p * y.p - y.s * y.s * y.disc;  // q^2 * field norm, nonzero
    if (norm == 0) throw Error("surd: division by zero");
    // 1/y = q * (p - s*sqrt(d)) / (p^2 - s^2 d)
    Surd inv = make_surd(y.q * y.p, -y.q * y.s, norm, y.disc);
    return x * inv;
}

int sign(const Surd& x) {
    // q > 0 by normalization, so the sign is that of p + s*sqrt(disc).
    int sp = x.p == 0 ? 0 : (x.p > 0 ? 1 : -1);
    int ss = x.s == 0 ? 0 : (x.s > 0 ? 1 : -1);
    if (ss == 0) return sp;
    if (sp == 0 || sp == ss) return ss;
    // Opposite signs: compare p^2 against s^2 * disc.
    bigint lhs = x.p * x.p;
    bigint rhs = x.s * x.s * x.disc;
    if (lhs == rhs) return 0;  // unreachable: disc not a square
    return (lhs > rhs) ? sp : ss;
}

double to_double(const Surd& x) {
    if (x.s == 0) {
        return std::exp2(log2_abs(x.p) - log2_abs(x.q)) * (x.p == 0 ? 0.0 : (x.p > 0 ? 1.0 : -1.0));
    }
    double lp = x.p == 0 ? -1e300 : log2_abs(x.p);
    double lsd = log2_abs(x.s) + 0.5 * log2_abs(x.disc);
    int sp = x.p == 0 ? 0 : (x.p > 0 ? 1 : -1);
    int ss = x.s > 0 ? 1 : -1;
    bool cancels = sp != 0 && sp != ss && std::abs(lp - lsd) < 2.0;
    if (!cancels) {
        // Direct evaluation is fine away from cancellation; split off the
        // exponents so huge integers do not overflow.
        double scale = std::max(lp, lsd);
        double val = sp * std::exp2(lp - scale) + ss * std::exp2(lsd - scale);
        return val * std::exp2(scale - log2_abs(x.q));
    }
    // x = (p^2 - s^2 d) / (q (p - s sqrt(d))); the new numerator is exact and
    // the new denominator has no cancellation.
    bigint num = x.p * x.p - x.s * x.s * x.disc;
    Surd den = make_surd(x.q * x.p, -x.q * x.s, 1, x.disc);
    double dd = to_double(den);
    double ln = log2_abs(num);
    double sn = num > 0 ? 1.0 : -1.0;
    return sn * std::exp2(ln - std::log2(std::abs(dd))) * (dd > 0 ? 1.0 : -1.0);
}

std::string to_string(const Surd& x) {
    std::ostringstream os;
    os << "(" << x.p.str();
    if (x.s >= 0) os << "+" << x.s.str();
    else os << x.s.str();
    os << "*sqrt(" << x.disc.str() << "))/" << x.q.str();
    return os.str();
}

Surd mobius_right(const Surd& z, const Mat2& m) {
    Surd num = make_surd(m.d, 0, 1, z.disc) * z + make_surd(m.b, 0, 1, z.disc);
    Surd den = make_surd(m.c, 0, 1, z.disc) * z + make_surd(m.a, 0, 1, z.disc);
    return num / den;
}

}  // namespace catmix
