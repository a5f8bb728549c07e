#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

#include "catmix/errors.hpp"

namespace catmix {

using bigint = boost::multiprecision::cpp_int;

// 2x2 integer matrix (a b; c d). Everything downstream assumes det = 1;
// parse_matrix and require_unimodular are the checked entry points.
struct Mat2 {
    bigint a{1}, b{0}, c{0}, d{1};

    friend bool operator==(const Mat2&, const Mat2&) = default;
};

// Integer row vector, acted on from the right: v * M.
struct Vec2 {
    bigint p{0}, q{0};

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

enum class MatClass { Identity, MinusIdentity, Elliptic, Parabolic, Hyperbolic };

Mat2 operator*(const Mat2& x, const Mat2& y);
Vec2 operator*(const Vec2& v, const Mat2& m);
Mat2 operator-(const Mat2& m);
Vec2 operator-(const Vec2& v);
// Lexicographic order so Vec2 can key ordered containers.
bool operator<(const Vec2& x, const Vec2& y);

bigint det(const Mat2& m);
bigint trace(const Mat2& m);
Mat2 inverse(const Mat2& m);     // requires det = 1
Mat2 transpose(const Mat2& m);
Mat2 conjugate(const Mat2& g, const Mat2& m);  // g m g^-1

bool is_identity(const Mat2& m);
// Two matrices equal up to overall sign (the same element of PSL(2,Z)).
bool same_projective(const Mat2& x, const Mat2& y);
// Canonical sign representative: first nonzero of (a, b, c) positive.
Mat2 projective_rep(const Mat2& m);

MatClass classify(const Mat2& m);  // throws NotUnimodular if det != 1
const char* to_string(MatClass c);

Mat2 mat_pow(const Mat2& m, long long n);

bigint norm_inf(const Mat2& m);   // max |entry|
bigint norm_sq(const Vec2& v);    // p^2 + q^2

void require_unimodular(const Mat2& m);

// "a,b,c,d" with optional whitespace. Throws ParseError / NotUnimodular.
Mat2 parse_matrix(const std::string& s);
std::string to_string(const Mat2& m);

// "p,q". Throws ParseError.
Vec2 parse_vector(const std::string& s);
std::string to_string(const Vec2& v);

// log2 |x| as a double (exact enough for magnitude comparisons);
// requires x != 0.
double log2_abs(const bigint& x);
// Natural log of |x|, requires x != 0.
double log_abs(const bigint& x);

// Convert with saturation to +/-inf for values beyond double range.
double to_double(const bigint& x);

// floor(sqrt(x)) for x >= 0.
bigint isqrt(const bigint& x);

// Nearest-integer division: q = p div m, r = p - q*m with |r| <= |m|/2,
// ties resolved toward a nonnegative remainder. Requires m != 0.
void nearest_div(const bigint& p, const bigint& m, bigint& quot, bigint& rem);

}  // namespace catmix
