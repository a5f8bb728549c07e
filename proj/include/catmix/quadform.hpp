#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "catmix/int2x2.hpp"

namespace catmix {

// Binary quadratic form A x^2 + B xy + C y^2.
struct QuadForm {
    bigint A{0}, B{0}, C{0};

    friend bool operator==(const QuadForm&, const QuadForm&) = default;
};

bigint discriminant(const QuadForm& f);
QuadForm operator-(const QuadForm& f);
std::string to_string(const QuadForm& f);

// Substitution action (f.subst(S))(x, y) = f(S11 x + S12 y, S21 x + S22 y).
QuadForm subst(const QuadForm& f, const Mat2& s);

// The form c x^2 + (a-d) xy - b y^2 attached to a hyperbolic matrix; its
// discriminant is trace^2 - 4. Throws NotHyperbolic otherwise.
QuadForm form_of(const Mat2& m);

// Fixed-point form c x^2 + (d-a) xy - b y^2: its roots on the real line are
// the fixed points of the Moebius action of m, and it transforms cleanly
// under conjugation: fixed_point_form(g m g^-1) = subst(fixed_point_form(m),
// g^-1). Same discriminant as form_of.
QuadForm fixed_point_form(const Mat2& m);

// True when |sqrt(D) - 2|A|| < B < sqrt(D), via exact integer comparisons.
// Requires D = disc(f) > 0 and not a perfect square.
bool is_reduced(const QuadForm& f);

// One reduction step f -> subst(f, (0 -1; 1 s)); returns the new form and
// multiplies *t on the right by the step's substitution matrix.
QuadForm rho_step(const QuadForm& f, Mat2* t);

// Apply rho_step until reduced. Returns the reduced form; *t accumulates the
// total substitution so that subst(input, *t) == result.
QuadForm reduce_form(QuadForm f, Mat2* t);

enum class ConjugacyMethod { SymmetricShortcut, ReductionCycle };

struct ConjugacyToInverse {
    bool conjugate{false};
    std::optional<Mat2> witness;  // g with g m g^-1 == m^-1 (verified)
    ConjugacyMethod method{ConjugacyMethod::ReductionCycle};
    // Number of cycle steps examined before deciding.
    std::uint64_t cycle_steps{0};
};

// Decides whether a hyperbolic m is conjugate to m^-1 within SL(2,Z).
// Symmetric matrices short-circuit with witness (0 1; -1 0); otherwise the
// reduction cycle of the fixed-point form is walked and compared against the
// cycle of its negative. Any witness returned has been verified by exact
// multiplication.
ConjugacyToInverse is_conjugate_to_inverse(const Mat2& m);

enum class PrimeCriterionResult { NotConjugate, Inconclusive };

// Factors trace^2 - 4 by trial division (primes <= trial_bound). If some
// prime p = 3 (mod 4) divides it to an odd power, m cannot be conjugate to
// its inverse. A leftover cofactor is accepted when it is a perfect power of
// a provable prime below 2^64; otherwise FactorizationTimeout is thrown.
PrimeCriterionResult prime_criterion(const Mat2& m,
                                     std::uint64_t trial_bound = 1000000);

// Exposed for tests: deterministic Miller-Rabin, valid for n < 2^64.
bool is_prime_u64(std::uint64_t n);

}  // namespace catmix
