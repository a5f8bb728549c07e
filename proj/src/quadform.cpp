#include "catmix/quadform.hpp"

#include <vector>

namespace catmix {

bigint discriminant(const QuadForm& f) { return f.B * f.B - 4 * f.A * f.C; }

QuadForm operator-(const QuadForm& f) { return QuadForm{-f.A, -f.B, -f.C}; }

std::string to_string(const QuadForm& f) {
    return "(" + f.A.str() + ", " + f.B.str() + ", " + f.C.str() + ")";
}

QuadForm subst(const QuadForm& f, const Mat2& s) {
    // x -> s.a x + s.b y, y -> s.c x + s.d y
    bigint A2 = f.A * s.a * s.a + f.B * s.a * s.c + f.C * s.c * s.c;
    bigint C2 = f.A * s.b * s.b + f.B * s.b * s.d + f.C * s.d * s.d;
    bigint B2 = 2 * f.A * s.a * s.b + f.B * (s.a * s.d + s.b * s.c) +
                2 * f.C * s.c * s.d;
    return QuadForm{A2, B2, C2};
}

namespace {

void require_hyperbolic(const Mat2& m) {
    if (classify(m) != MatClass::Hyperbolic)
        throw NotHyperbolic("matrix " + to_string(m) + " is not hyperbolic");
}

}  // namespace

QuadForm form_of(const Mat2& m) {
    require_hyperbolic(m);
    return QuadForm{m.c, m.a - m.d, -m.b};
}

QuadForm fixed_point_form(const Mat2& m) {
    require_hyperbolic(m);
    return QuadForm{m.c, m.d - m.a, -m.b};
}

bool is_reduced(const QuadForm& f) {
    bigint D = discriminant(f);
    if (f.B <= 0) return false;
    if (f.B * f.B >= D) return false;
    bigint twoA = 2 * abs(f.A);
    // 2|A| < sqrt(D) + B
    bigint lhs = twoA - f.B;
    if (lhs > 0 && lhs * lhs >= D) return false;
    // sqrt(D) < 2|A| + B
    bigint rhs = twoA + f.B;
    if (D >= rhs * rhs) return false;
    return true;
}

QuadForm rho_step(const QuadForm& f, Mat2* t) {
    bigint D = discriminant(f);
    bigint ac = abs(f.C);
    bigint m = 2 * ac;
    bigint r;
    if (f.C * f.C > D) {
        // r = -B (mod 2|C|) in (-|C|, |C|]
        r = (-f.B) % m;
        if (r < 0) r += m;
        if (r > ac) r -= m;
    } else {
        // r = -B (mod 2|C|) in (sqrt(D) - 2|C|, sqrt(D))
        bigint s = isqrt(D);
        bigint k = (s + f.B) % m;
        if (k < 0) k += m;
        r = s - k;
    }
    bigint step = (r + f.B) / (2 * f.C);
    QuadForm g{f.C, r, (r * r - D) / (4 * f.C)};
    if (t) *t = *t * Mat2{0, -1, 1, step};
    return g;
}

QuadForm reduce_form(QuadForm f, Mat2* t) {
    int guard = 0;
    while (!is_reduced(f)) {
        f = rho_step(f, t);
        if (++guard > 100000)
            throw Error("form reduction failed to terminate for " +
                        to_string(f));
    }
    return f;
}

namespace {

// Walks the cycle of reduced, properly equivalent forms starting at r1 and
// looks for r2. On a hit, *u holds the accumulated substitution with
// subst(r1, *u) == r2.
bool cycle_contains(const QuadForm& r1, const QuadForm& r2, Mat2* u,
                    std::uint64_t* steps) {
    QuadForm cur = r1;
    Mat2 acc{};
    std::uint64_t n = 0;
    do {
        if (cur == r2) {
            *u = acc;
            if (steps) *steps = n;
            return true;
        }
        cur = rho_step(cur, &acc);
        ++n;
        if (n > 10000000)
            throw Error("reduction cycle walk exceeded its budget");
    } while (!(cur == r1));
    if (steps) *steps = n;
    return false;
}

}  // namespace

ConjugacyToInverse is_conjugate_to_inverse(const Mat2& m) {
    require_hyperbolic(m);
    Mat2 minv = inverse(m);

    if (m.b == m.c) {
        Mat2 w{0, 1, -1, 0};
        if (conjugate(w, m) == minv)
            return ConjugacyToInverse{true, w,
                                      ConjugacyMethod::SymmetricShortcut, 0};
    }

    QuadForm q = fixed_point_form(m);
    Mat2 t1{};
    QuadForm r1 = reduce_form(q, &t1);
    Mat2 t2{};
    QuadForm r2 = reduce_form(-q, &t2);

    Mat2 u{};
    std::uint64_t steps = 0;
    if (!cycle_contains(r1, r2, &u, &steps))
        return ConjugacyToInverse{false, std::nullopt,
                                  ConjugacyMethod::ReductionCycle, steps};

    // subst(q, t1 * u * t2^-1) == -q, and -q is the fixed-point form of
    // m^-1, so g = (t1 * u * t2^-1)^-1 conjugates m onto m^-1.
    Mat2 s = t1 * u * inverse(t2);
    Mat2 g = inverse(s);
    if (conjugate(g, m) != minv)
        throw Error("internal: cycle witness failed verification for " +
                    to_string(m));
    return ConjugacyToInverse{true, g, ConjugacyMethod::ReductionCycle, steps};
}

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a) * b) % n);
}

std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t n) {
    std::uint64_t r = 1;
    a %= n;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, n);
        a = mulmod_u64(a, a, n);
        e >>= 1;
    }
    return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull,
                            19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // Deterministic base set for n < 3.3 * 10^24 (covers all of uint64).
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull,
                            19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

namespace {

// Largest k with x == s^k (k >= 1); writes the base to *root.
int strip_perfect_power(const bigint& x, bigint* root) {
    for (int k = static_cast<int>(msb(x)) + 1; k >= 2; --k) {
        // Binary-search the integer k-th root.
        bigint lo = 1, hi = bigint(1) << (msb(x) / k + 1);
        while (lo < hi) {
            bigint mid = (lo + hi + 1) / 2;
            bigint p = pow(mid, static_cast<unsigned>(k));
            if (p <= x)
                lo = mid;
            else
                hi = mid - 1;
        }
        if (pow(lo, static_cast<unsigned>(k)) == x) {
            *root = lo;
            return k;
        }
    }
    *root = x;
    return 1;
}

}  // namespace

PrimeCriterionResult prime_criterion(const Mat2& m, std::uint64_t trial_bound) {
    require_hyperbolic(m);
    bigint t = trace(m);
    bigint n = t * t - 4;

    bool odd_bad_prime = false;
    for (std::uint64_t p = 2; p <= trial_bound && n > 1; p += (p == 2 ? 1 : 2)) {
        if (p * p > n) break;
        if (n % p != 0) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (p % 4 == 3 && (e & 1)) odd_bad_prime = true;
    }
    if (n > 1) {
        // Leftover cofactor: coprime to all primes tried above. Either it is
        // itself within the trial range (then prime), or we accept it only
        // when it is a perfect power of a provable prime below 2^64.
        bigint root;
        int k = strip_perfect_power(n, &root);
        bool root_prime;
        if (root <= trial_bound || root < (bigint(1) << 64)) {
            root_prime = is_prime_u64(root.convert_to<std::uint64_t>());
        } else {
            throw FactorizationTimeout(
                "cofactor " + n.str() + " of trace^2-4 exceeds the trial "
                "division bound " + std::to_string(trial_bound));
        }
        if (!root_prime)
            throw FactorizationTimeout(
                "cofactor " + n.str() + " of trace^2-4 is composite beyond "
                "the trial division bound " + std::to_string(trial_bound));
        if (root % 4 == 3 && (k & 1)) odd_bad_prime = true;
    }
    return odd_bad_prime ? PrimeCriterionResult::NotConjugate
                         : PrimeCriterionResult::Inconclusive;
}

}  // namespace catmix
