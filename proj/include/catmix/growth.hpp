#pragma once

#include <string>
#include <vector>

#include "catmix/int2x2.hpp"
#include "catmix/mixing.hpp"

namespace catmix {

// Conjugation result with a certified small lower-left entry:
// g = conj * f * conj^-1 and 5 * g.c^2 <= trace(f)^2 - 4.
struct SmallC {
    Mat2 g;
    Mat2 conj;
};

// Walks the reduction cycle of the binary form attached to f, picks the cell
// with the smallest leading coefficient, and turns its substitution into an
// explicit conjugator. Throws SearchExhausted if the cycle fails to close
// within budget.
SmallC reduce_small_c(const Mat2& f);

// f_prime = f * (1 k; 0 1) with k chosen so |trace(f_prime)| <= |c|/2,
// ties broken toward the smaller |k|. Undo with f = f_prime * (1 -k; 0 1).
struct ParabolicSplit {
    Mat2 f_prime;
    bigint k;
};

ParabolicSplit split_parabolic(const Mat2& f);

// |trace(f)| >= (2 sqrt 5)^(|r| / dr) comparison, decided on logarithms so
// astronomically large traces stay exact in the only sense that matters
// (the direction of the inequality). lhs and rhs saturate to inf.
struct TraceBoundResult {
    double lhs;
    double rhs;
    bool holds;
};

TraceBoundResult trace_bound_check(const Mat2& f, double r_of_f, double dr_norm);

// One descent step: before is conjugated to small_c, then sheared by
// (1 k; 0 1) into after, whose trace has dropped by a factor > 2 sqrt 5.
struct TraceCertStep {
    Mat2 before;
    Mat2 conj;
    Mat2 small_c;
    bigint k;
    Mat2 after;
};

struct TraceCertificate {
    std::vector<TraceCertStep> steps;
    Mat2 final_matrix;  // |trace| <= 2
    long long depth() const { return static_cast<long long>(steps.size()); }
};

// Full descent from a hyperbolic matrix to |trace| <= 2. Every step is
// replayed with exact arithmetic before the certificate is returned.
TraceCertificate trace_certificate(const Mat2& f);

// Exact replay of a certificate against its claimed starting matrix; throws
// on any mismatch. trace_certificate calls this before returning.
void verify_certificate(const TraceCertificate& cert, const Mat2& f);

std::string to_json(const TraceCertificate& cert);

enum class FactorTag { Elliptic, Parabolic, Commutator };

const char* to_string(FactorTag t);

// One factor of a presentation g = F_1 * ... * F_d. Elliptic and parabolic
// factors carry the matrix itself; a commutator factor carries (a, w) and
// stands for a w a^-1 w^-1.
struct RhoFactor {
    FactorTag tag;
    std::vector<Mat2> parts;
    Mat2 value() const;
};

struct RhoUpper {
    long long upper;
    std::vector<RhoFactor> factors;  // product of values == g, verified
};

// Upper bound on the minimal number of elliptic, parabolic, or commutator
// factors needed to write g. General route: nearest-integer column reduction
// into parabolic shears. When g is an even power of a matrix conjugate to
// its own inverse, a single commutator suffices and is returned instead.
RhoUpper rho_upper(const Mat2& g);

// Lower bound |r(g)| / (lip_const * dr_norm) obtained by pairing g against a
// homogeneous quasi-morphism value r(g) with defect norm dr_norm.
double rho_lower(const Mat2& g, double r_of_g, double dr_norm, double lip_const = 4.0);

struct RhoBarRow {
    long long n;
    long long telescoped;  // sum of per-kick upper bounds
    long long direct;      // column-reduction bound on f(n) h^(-nt)
    long long bound;       // min of the two
};

struct RhoBar {
    long long sup;  // max of bound over 1 <= n <= n_max
    std::vector<RhoBarRow> rows;
};

// Upper bound on sup_n of the factor distance between f(n) and h^(nt). The
// telescoped route rewrites f(n) h^(-nt) as a product of conjugated kicks
// (the rewriting is verified exactly for every n) and charges each kick its
// own rho_upper; the direct route reduces the quotient matrix itself.
RhoBar rho_bar_kick_distance(const KickedSystemSpec& spec, long long n_max);

}  // namespace catmix
