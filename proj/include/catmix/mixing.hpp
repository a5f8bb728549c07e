#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "catmix/int2x2.hpp"
#include "catmix/observable.hpp"

namespace catmix {

// How the kick sequence is produced: a finite list consumed once, a finite
// list repeated periodically, or seeded draws from a finite alphabet.
enum class KickMode { Explicit, Periodic, Seeded };

const char* to_string(KickMode m);

struct KickedSystemSpec {
    Mat2 h;
    long long t{1};
    KickMode mode{KickMode::Explicit};
    std::vector<Mat2> kicks;  // the list (Explicit/Periodic) or the alphabet (Seeded)
    std::uint64_t seed{0};
    bigint trace_bound{3};  // declared bound on |trace| of every kick
};

// Exact products f(n) = kick(n) * h^t * f(n-1), materialized up to n_max.
class SequentialSystem {
  public:
    long long n_max() const { return static_cast<long long>(fs_.size()); }
    const Mat2& f(long long n) const;     // 1 <= n <= n_max
    const Mat2& kick(long long n) const;  // 1 <= n <= n_max
    const KickedSystemSpec& spec() const { return spec_; }

  private:
    friend SequentialSystem compose(const KickedSystemSpec& spec, long long n_max);
    KickedSystemSpec spec_;
    std::vector<Mat2> kicks_;
    std::vector<Mat2> fs_;
};

// Draws and validates the kicks, then multiplies out the compositions.
// Throws TraceBoundViolated when a kick exceeds the declared trace bound and
// Error when an Explicit list is shorter than n_max.
SequentialSystem compose(const KickedSystemSpec& spec, long long n_max);

// Correlation of two finitely supported mean-zero observables under one
// exact composition: sum over v in supp(f2) of a1(-v * f) * a2(v). Rejects
// observables that declare a tail; use correlation_bound_holder for those.
std::complex<double> correlation(const Observable& f1, const Observable& f2, const Mat2& f);

struct HolderBound {
    std::complex<double> exact_head;  // correlation of the truncations at cutoff n
    double tail_bound;                // 2 * ||F||_2 * c_f * n^(-gamma)
};

// Splits the self-correlation of a tailed observable into the exact head
// contribution and a rigorous bound on everything the truncation dropped.
// The norm factor uses the materialized coefficients.
HolderBound correlation_bound_holder(const Observable& f, const Mat2& comp, long long n);

struct MinExpansion {
    double value;     // sqrt of value_sq
    Vec2 argmin;      // a frequency attaining the minimum
    bigint value_sq;  // exact min of ||v * f||^2 over 0 < ||v|| <= cutoff
};

// Minimum stretch of the dual lattice ball of radius `cutoff` under v -> v*f,
// decided entirely on exact integer squared norms.
MinExpansion min_expansion(const Mat2& f, long long cutoff);

struct ZeroTime {
    bool reached{false};
    long long n0{0};
};

// Smallest n0 such that min_expansion(f(n), N_F) > N_F for every materialized
// n >= n0; past n0 every correlation of observables with frequencies inside
// the cutoff vanishes identically. Empty support gives n0 = 1. When no such
// n0 exists within the materialized range, reached is false.
ZeroTime zero_time(const Observable& f, const SequentialSystem& sys);

struct DecayFit {
    double rate;  // decay exponent: slope of -log C against n
    double r2;
    int points_used;
    int zeros_excluded;  // exact zeros dropped before fitting
};

// Least-squares fit of log C against n over the points with C > 0. Requires
// at least four usable points; throws AllZeroSeries when every correlation
// in the series is exactly zero.
DecayFit decay_fit(const std::vector<std::pair<long long, double>>& series);

// Kick lists as JSON lines, one matrix per line: [a, b, c, d].
std::vector<Mat2> parse_kick_lines(const std::string& text);
std::string kick_lines(const std::vector<Mat2>& kicks);

}  // namespace catmix
