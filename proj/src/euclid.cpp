#include "catmix/euclid.hpp"

#include <cmath>

namespace catmix {

Mat2 factor_matrix(const ElementaryFactor& f) {
    if (f.side == Side::Upper) return Mat2{1, f.k, 0, 1};
    return Mat2{1, 0, f.k, 1};
}

Mat2 word_matrix(const ElementaryWord& w) {
    Mat2 m{};
    for (const auto& f : w) m = m * factor_matrix(f);
    return m;
}

std::string to_string(const ElementaryWord& w) {
    std::string s = "[";
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) s += ", ";
        s += (w[i].side == Side::Upper ? "U(" : "L(") + w[i].k.str() + ")";
    }
    return s + "]";
}

namespace {

// (0,1) * W = (0,-1) with W = U(-1) L(1) U(-1) U(-1) L(1) U(-1), the
// elementary spelling of -I via (0 1; -1 0)^2.
void prepend_minus_identity(ElementaryWord& w) {
    const ElementaryFactor half[] = {{Side::Upper, -1},
                                     {Side::Lower, 1},
                                     {Side::Upper, -1}};
    w.insert(w.begin(), std::begin(half), std::end(half));
    w.insert(w.begin(), std::begin(half), std::end(half));
}

}  // namespace

ElementaryWord decompose_primitive(const Vec2& v) {
    if (gcd(v.p, v.q) != 1)
        throw NotPrimitiveVector("vector (" + to_string(v) +
                                 ") is not primitive");
    ElementaryWord word;
    bigint p = v.p, q = v.q;
    // Each loop step multiplies the running vector by U(-k) or L(-k) on the
    // right, so the inverse factor is pushed onto the front of the word.
    while (p != 0 && q != 0) {
        bigint k, r;
        if (abs(q) >= abs(p)) {
            nearest_div(q, p, k, r);
            // (p, q) = (p, r) * U(k)
            word.insert(word.begin(), ElementaryFactor{Side::Upper, k});
            q = r;
        } else {
            nearest_div(p, q, k, r);
            // (p, q) = (r, q) * L(k)
            word.insert(word.begin(), ElementaryFactor{Side::Lower, k});
            p = r;
        }
    }
    if (p != 0) {
        // (1,0) = (0,1) * L(1) U(-1); (-1,0) additionally needs -I in front.
        word.insert(word.begin(), ElementaryFactor{Side::Upper, -1});
        word.insert(word.begin(), ElementaryFactor{Side::Lower, 1});
        if (p < 0) prepend_minus_identity(word);
    } else if (q < 0) {
        prepend_minus_identity(word);
    }
    Vec2 check = Vec2{0, 1} * word_matrix(word);
    if (!(check == v))
        throw Error("internal: decomposition of (" + to_string(v) +
                    ") reconstructed (" + to_string(check) + ")");
    return word;
}

Mat2 parabolic_completion(const Vec2& v, const Mat2& f) {
    require_unimodular(f);
    Mat2 h1 = word_matrix(decompose_primitive(v));
    Mat2 h2 = word_matrix(decompose_primitive(v * f));
    Mat2 h3 = h1 * f * inverse(h2);
    if (h3.c != 0 || trace(h3) != 2)
        throw Error("internal: parabolic completion failed for v=(" +
                    to_string(v) + "), f=" + to_string(f));
    return h3;
}

double vector_lower_bound(const Vec2& v, double r_of_f, double defect_norm) {
    double norm = std::sqrt(to_double(norm_sq(v)));
    return std::exp2(-22.0) * std::exp2(std::abs(r_of_f) / defect_norm) / norm;
}

}  // namespace catmix
