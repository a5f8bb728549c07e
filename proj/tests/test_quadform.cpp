#include <doctest.h>

#include <array>
#include <random>
#include <set>
#include <vector>

#include "catmix/errors.hpp"
#include "catmix/int2x2.hpp"
#include "catmix/quadform.hpp"

using namespace catmix;

namespace {

Mat2 random_hyperbolic(std::mt19937_64& rng) {
    for (;;) {
        Mat2 m;
        int factors = 2 + static_cast<int>(rng() % 3);
        for (int i = 0; i < factors; ++i) {
            long long k = static_cast<long long>(rng() % 13) - 6;
            m = m * (rng() % 2 ? Mat2{1, k, 0, 1} : Mat2{1, 0, k, 1});
        }
        if (abs(trace(m)) > 2) return m;
    }
}

// All-integer conjugacy oracle for g ~ g^-1: meet in the middle over words
// in the standard generators. Radius a+b words w are covered by testing
// u g u^-1 == v g^-1 v^-1 over u in ball(a), v in ball(b).
std::vector<Mat2> gen_ball(int radius) {
    const std::array<Mat2, 5> gens = {Mat2{1, 1, 0, 1}, Mat2{1, -1, 0, 1},
                                      Mat2{1, 0, 1, 1}, Mat2{1, 0, -1, 1},
                                      Mat2{0, 1, -1, 0}};
    std::vector<Mat2> ball{Mat2{}};
    std::set<std::array<bigint, 4>> seen{{bigint(1), bigint(0), bigint(0), bigint(1)}};
    size_t lo = 0;
    for (int r = 0; r < radius; ++r) {
        size_t hi = ball.size();
        for (size_t i = lo; i < hi; ++i)
            for (const Mat2& g : gens) {
                Mat2 w = projective_rep(ball[i] * g);
                if (seen.insert({w.a, w.b, w.c, w.d}).second) ball.push_back(w);
            }
        lo = hi;
    }
    return ball;
}

bool oracle_conjugate_to_inverse(const Mat2& m, const std::vector<Mat2>& small_ball,
                                 const std::vector<Mat2>& big_ball) {
    Mat2 mi = inverse(m);
    std::set<std::array<bigint, 4>> left;
    for (const Mat2& u : small_ball) {
        Mat2 c = projective_rep(conjugate(u, m));
        left.insert({c.a, c.b, c.c, c.d});
    }
    for (const Mat2& v : big_ball) {
        Mat2 c = projective_rep(conjugate(v, mi));
        if (left.count({c.a, c.b, c.c, c.d})) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("form attached to a hyperbolic matrix") {
    QuadForm f = form_of(Mat2{2, 1, 1, 1});
    CHECK(f == QuadForm{1, 1, -1});
    CHECK(discriminant(f) == 5);
    QuadForm g = form_of(Mat2{4, 9, 7, 16});
    CHECK(g == QuadForm{7, -12, -9});
    CHECK(discriminant(g) == 396);
    CHECK_THROWS_AS(form_of(Mat2{1, 1, 0, 1}), NotHyperbolic);
    std::mt19937_64 rng(21);
    for (int i = 0; i < 100; ++i) {
        Mat2 m = random_hyperbolic(rng);
        bigint t = trace(m);
        CHECK(discriminant(form_of(m)) == t * t - 4);
    }
}

TEST_CASE("substitution composes contravariantly with nothing hidden") {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 100; ++i) {
        Mat2 a = random_hyperbolic(rng);
        Mat2 b = random_hyperbolic(rng);
        QuadForm f = form_of(random_hyperbolic(rng));
        CHECK(subst(subst(f, a), b) == subst(f, a * b));
    }
}

TEST_CASE("fixed point form is conjugation equivariant") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 100; ++i) {
        Mat2 m = random_hyperbolic(rng);
        Mat2 g = random_hyperbolic(rng);
        CHECK(fixed_point_form(conjugate(g, m)) ==
              subst(fixed_point_form(m), inverse(g)));
    }
}

TEST_CASE("reduction reaches a reduced form with exact bookkeeping") {
    std::mt19937_64 rng(24);
    for (int i = 0; i < 100; ++i) {
        QuadForm f = form_of(random_hyperbolic(rng));
        Mat2 t;
        QuadForm r = reduce_form(f, &t);
        CHECK(is_reduced(r));
        CHECK(subst(f, t) == r);
        CHECK(discriminant(r) == discriminant(f));
    }
}

TEST_CASE("conjugacy to inverse: frozen examples") {
    ConjugacyToInverse sym = is_conjugate_to_inverse(Mat2{2, 1, 1, 1});
    CHECK(sym.conjugate);
    CHECK(sym.method == ConjugacyMethod::SymmetricShortcut);
    REQUIRE(sym.witness.has_value());
    CHECK(*sym.witness == Mat2{0, 1, -1, 0});
    CHECK(conjugate(*sym.witness, Mat2{2, 1, 1, 1}) == inverse(Mat2{2, 1, 1, 1}));

    ConjugacyToInverse no = is_conjugate_to_inverse(Mat2{4, 9, 7, 16});
    CHECK_FALSE(no.conjugate);
    CHECK(no.method == ConjugacyMethod::ReductionCycle);
    CHECK_FALSE(no.witness.has_value());

    CHECK(prime_criterion(Mat2{4, 9, 7, 16}) == PrimeCriterionResult::NotConjugate);
    CHECK(prime_criterion(Mat2{2, 1, 1, 1}) == PrimeCriterionResult::Inconclusive);
}

TEST_CASE("every returned witness verifies by exact multiplication") {
    std::mt19937_64 rng(25);
    int verified = 0;
    for (int i = 0; i < 200; ++i) {
        Mat2 m = random_hyperbolic(rng);
        ConjugacyToInverse r = is_conjugate_to_inverse(m);
        if (!r.conjugate) continue;
        REQUIRE(r.witness.has_value());
        CHECK(det(*r.witness) == 1);
        CHECK(conjugate(*r.witness, m) == inverse(m));
        ++verified;
    }
    CHECK(verified > 0);
}

TEST_CASE("decision agrees with the word-ball oracle on small matrices") {
    std::vector<Mat2> small_ball = gen_ball(3);
    std::vector<Mat2> big_ball = gen_ball(4);
    int found = 0, missed_by_oracle = 0;
    for (long long a = -5; a <= 5; ++a)
        for (long long b = -5; b <= 5; ++b)
            for (long long c = -5; c <= 5; ++c) {
                if (a == 0) continue;
                bigint num = 1 + bigint(b) * c;
                if (num % a != 0) continue;
                bigint d = num / a;
                if (abs(d) > 5) continue;
                Mat2 m{a, b, c, d};
                if (abs(trace(m)) <= 2) continue;
                bool verdict = is_conjugate_to_inverse(m).conjugate;
                bool oracle = oracle_conjugate_to_inverse(m, small_ball, big_ball);
                if (oracle) {
                    // a found conjugator must never contradict a false verdict
                    CHECK(verdict);
                    ++found;
                } else if (verdict) {
                    ++missed_by_oracle;  // witness outside the ball: fine
                }
            }
    CHECK(found > 50);
}

TEST_CASE("prime criterion never contradicts the decision") {
    std::mt19937_64 rng(26);
    for (int i = 0; i < 150; ++i) {
        Mat2 m = random_hyperbolic(rng);
        if (prime_criterion(m) == PrimeCriterionResult::NotConjugate)
            CHECK_FALSE(is_conjugate_to_inverse(m).conjugate);
    }
}

TEST_CASE("deterministic Miller-Rabin") {
    CHECK(is_prime_u64(2));
    CHECK(is_prime_u64(3));
    CHECK(is_prime_u64(1000003));
    CHECK(is_prime_u64((1ULL << 61) - 1));
    CHECK_FALSE(is_prime_u64(0));
    CHECK_FALSE(is_prime_u64(1));
    CHECK_FALSE(is_prime_u64(561));      // Carmichael
    CHECK_FALSE(is_prime_u64(1000001));  // 101 * 9901
    CHECK_FALSE(is_prime_u64(1ULL << 40));
}
