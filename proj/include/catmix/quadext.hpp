#pragma once

#include <string>

#include "catmix/int2x2.hpp"

namespace catmix {

// Exact element (p + s*sqrt(disc)) / q of a real quadratic field; disc > 0
// and not a perfect square. Normalized: q > 0, gcd(p, s, q) = 1.
struct Surd {
    bigint p{0}, s{0}, q{1}, disc{5};

    friend bool operator==(const Surd&, const Surd&) = default;
};

Surd make_surd(bigint p, bigint s, bigint q, bigint disc);
Surd surd_conjugate(const Surd& x);   // sqrt(disc) -> -sqrt(disc)

Surd operator+(const Surd& x, const Surd& y);
Surd operator-(const Surd& x, const Surd& y);
Surd operator*(const Surd& x, const Surd& y);
Surd operator/(const Surd& x, const Surd& y);

int sign(const Surd& x);  // exact
// Numerically stable conversion (avoids the cancellation when p and
// s*sqrt(disc) nearly cancel).
double to_double(const Surd& x);
std::string to_string(const Surd& x);

// Right Moebius action z.m = (d z + b) / (c z + a), matching the row-vector
// convention: (z.m1).m2 == z.(m1*m2).
Surd mobius_right(const Surd& z, const Mat2& m);

}  // namespace catmix
