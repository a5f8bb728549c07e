#include "catmix/int2x2.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

namespace catmix {

Mat2 operator*(const Mat2& x, const Mat2& y) {
    return Mat2{x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

Vec2 operator*(const Vec2& v, const Mat2& m) {
    return Vec2{v.p * m.a + v.q * m.c, v.p * m.b + v.q * m.d};
}

Mat2 operator-(const Mat2& m) { return Mat2{-m.a, -m.b, -m.c, -m.d}; }

Vec2 operator-(const Vec2& v) { return Vec2{-v.p, -v.q}; }

bool operator<(const Vec2& x, const Vec2& y) {
    if (x.p != y.p) return x.p < y.p;
    return x.q < y.q;
}

bigint det(const Mat2& m) { return m.a * m.d - m.b * m.c; }

bigint trace(const Mat2& m) { return m.a + m.d; }

Mat2 inverse(const Mat2& m) { return Mat2{m.d, -m.b, -m.c, m.a}; }

Mat2 transpose(const Mat2& m) { return Mat2{m.a, m.c, m.b, m.d}; }

Mat2 conjugate(const Mat2& g, const Mat2& m) { return g * m * inverse(g); }

bool is_identity(const Mat2& m) {
    return m.a == 1 && m.b == 0 && m.c == 0 && m.d == 1;
}

bool same_projective(const Mat2& x, const Mat2& y) {
    return x == y || x == -y;
}

Mat2 projective_rep(const Mat2& m) {
    if (m.a != 0) return m.a > 0 ? m : -m;
    if (m.b != 0) return m.b > 0 ? m : -m;
    return m.c > 0 ? m : -m;
}

void require_unimodular(const Mat2& m) {
    if (det(m) != 1)
        throw NotUnimodular("matrix has determinant " + det(m).str() +
                            ", expected 1");
}

MatClass classify(const Mat2& m) {
    require_unimodular(m);
    if (is_identity(m)) return MatClass::Identity;
    if (is_identity(-m)) return MatClass::MinusIdentity;
    bigint t = trace(m);
    bigint at = abs(t);
    if (at < 2) return MatClass::Elliptic;
    if (at == 2) return MatClass::Parabolic;
    return MatClass::Hyperbolic;
}

const char* to_string(MatClass c) {
    switch (c) {
        case MatClass::Identity: return "identity";
        case MatClass::MinusIdentity: return "minus_identity";
        case MatClass::Elliptic: return "elliptic";
        case MatClass::Parabolic: return "parabolic";
        case MatClass::Hyperbolic: return "hyperbolic";
    }
    return "?";
}

Mat2 mat_pow(const Mat2& m, long long n) {
    Mat2 base = m;
    unsigned long long e;
    if (n < 0) {
        base = inverse(m);
        e = static_cast<unsigned long long>(-(n + 1)) + 1;
    } else {
        e = static_cast<unsigned long long>(n);
    }
    Mat2 acc{};  // identity
    while (e > 0) {
        if (e & 1) acc = acc * base;
        e >>= 1;
        if (e > 0) base = base * base;
    }
    return acc;
}

bigint norm_inf(const Mat2& m) {
    bigint r = abs(m.a);
    if (abs(m.b) > r) r = abs(m.b);
    if (abs(m.c) > r) r = abs(m.c);
    if (abs(m.d) > r) r = abs(m.d);
    return r;
}

bigint norm_sq(const Vec2& v) { return v.p * v.p + v.q * v.q; }

namespace {

std::vector<bigint> parse_ints(const std::string& s, size_t expect) {
    std::vector<bigint> out;
    std::string cur;
    auto flush = [&] {
        size_t b = cur.find_first_not_of(" \t");
        size_t e = cur.find_last_not_of(" \t");
        if (b == std::string::npos)
            throw ParseError("empty field in '" + s + "'");
        try {
            out.emplace_back(cur.substr(b, e - b + 1));
        } catch (const std::exception&) {
            throw ParseError("bad integer '" + cur + "' in '" + s + "'");
        }
        cur.clear();
    };
    for (char ch : s) {
        if (ch == ',')
            flush();
        else
            cur += ch;
    }
    flush();
    if (out.size() != expect)
        throw ParseError("expected " + std::to_string(expect) +
                         " comma-separated integers, got " +
                         std::to_string(out.size()));
    return out;
}

}  // namespace

Mat2 parse_matrix(const std::string& s) {
    auto f = parse_ints(s, 4);
    Mat2 m{f[0], f[1], f[2], f[3]};
    require_unimodular(m);
    return m;
}

std::string to_string(const Mat2& m) {
    return m.a.str() + "," + m.b.str() + "," + m.c.str() + "," + m.d.str();
}

Vec2 parse_vector(const std::string& s) {
    auto f = parse_ints(s, 2);
    return Vec2{f[0], f[1]};
}

std::string to_string(const Vec2& v) { return v.p.str() + "," + v.q.str(); }

double log2_abs(const bigint& x) {
    bigint a = abs(x);
    size_t bits = msb(a);  // position of the most significant bit
    if (bits <= 52) return std::log2(a.convert_to<double>());
    bigint top = a >> (bits - 52);
    return std::log2(top.convert_to<double>()) + static_cast<double>(bits - 52);
}

double log_abs(const bigint& x) { return log2_abs(x) * std::log(2.0); }

double to_double(const bigint& x) {
    if (x == 0) return 0.0;
    if (msb(abs(x)) > 1020) return x > 0 ? HUGE_VAL : -HUGE_VAL;
    return x.convert_to<double>();
}

bigint isqrt(const bigint& x) { return sqrt(x); }

void nearest_div(const bigint& p, const bigint& m, bigint& quot, bigint& rem) {
    bigint am = abs(m);
    // cpp_int division truncates toward zero; build a floor mod first.
    bigint r = p % am;
    if (r < 0) r += am;
    bigint q = (p - r) / am;
    // r in [0, am): move to (-am/2, am/2], then break the tie toward r >= 0.
    if (2 * r > am) {
        r -= am;
        q += 1;
    }
    if (m < 0) q = -q;
    quot = q;
    rem = r;
}

}  // namespace catmix
