#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "catmix/int2x2.hpp"

namespace catmix {

// One elementary factor: Upper encodes (1 k; 0 1), Lower encodes (1 0; k 1).
enum class Side { Upper, Lower };

struct ElementaryFactor {
    Side side{Side::Upper};
    bigint k{0};

    friend bool operator==(const ElementaryFactor&,
                           const ElementaryFactor&) = default;
};

using ElementaryWord = std::vector<ElementaryFactor>;

Mat2 factor_matrix(const ElementaryFactor& f);
// Product of the factors, left to right.
Mat2 word_matrix(const ElementaryWord& w);
std::string to_string(const ElementaryWord& w);

// Writes a primitive vector v as (0,1) * word_matrix(word), using
// nearest-integer remainders (ties toward a nonnegative remainder), so the
// word length is at most log2 ||v|| + 10. Throws NotPrimitiveVector unless
// gcd = 1 (zero vector included).
ElementaryWord decompose_primitive(const Vec2& v);

// Given primitive v and unimodular f, returns h3 = h1 * f * h2^-1 where
// (0,1) h1 = v and (0,1) h2 = v f. The result fixes (0,1) from the left,
// i.e. has bottom row (0, 1); together with det 1 that forces an upper
// parabolic (or the identity).
Mat2 parabolic_completion(const Vec2& v, const Mat2& f);

// 2^-22 * 2^(|r_of_f| / defect_norm) / ||v||, the expansion floor that a
// quasi-morphism value forces on a primitive vector.
double vector_lower_bound(const Vec2& v, double r_of_f, double defect_norm);

}  // namespace catmix
