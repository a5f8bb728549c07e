#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "catmix/errors.hpp"
#include "catmix/int2x2.hpp"
#include "catmix/quadext.hpp"

namespace catmix {

// Ideal endpoints of the invariant geodesic of a hyperbolic matrix under the
// right action z.m = (d z + b)/(c z + a).
struct Axis {
    Surd repelling, attracting;
    double repelling_f{0.0}, attracting_f{0.0};
};

Axis axis(const Mat2& m);

struct NotPrimitiveMatrix : Error {
    Mat2 root;
    long long power;
    NotPrimitiveMatrix(const Mat2& r, long long k);
};

// Throws NotPrimitiveMatrix when m equals root^power (projectively) for some
// power >= 2. Requires trace(m) > 2.
void require_primitive_hyperbolic(const Mat2& m);

struct QmParams {
    double sigma0 = 1.0;
    double tau = 1e-9;
    int retry_budget = 8;
    int defect_sample = 48;
    int defect_word_len = 12;
    std::uint64_t defect_seed = 0x5eedULL;
};

struct HomEstimate {
    double estimate{0.0};
    double error_bar{0.0};
    long long n_used{0};
};

// Marker family and basepoints in exact rational coordinates; defined in the
// implementation file.
struct QmExactState;

// Crossing-count quasi-morphism attached to a primitive hyperbolic base
// matrix whose axis has no orientation-reversing symmetry. r_raw counts
// signed crossings of the geodesic segment from a fixed basepoint to its
// g-translate with the family of Gamma-translates of one marker segment
// placed perpendicular to the base axis; r_raw(h^n) = n exactly and the
// defect is bounded, so r_raw/n converges to a homogeneous quasi-morphism.
//
// The cell walk behind r_raw runs in exact rational arithmetic (points carry
// rational x and y^2), so counts are deterministic at any word length; only
// exact boundary coincidences abort a walk, and those are retried from the
// next basepoint.
class QmEngine {
  public:
    static QmEngine build(const Mat2& h, const QmParams& params = {});

    long long r_raw(const Mat2& g) const;
    HomEstimate r_hom(const Mat2& g, long long n_max = 128) const;
    double defect_estimate(int sample_size, int word_len,
                           std::uint64_t seed = 0x5eedULL) const;

    // Defect bound established at build time (never below 1).
    double defect_bound() const { return d_hat_; }
    const Mat2& base() const { return h_; }
    const Axis& base_axis() const { return axis_; }
    double sigma() const { return sigma_; }
    double tau() const { return tau_; }
    double translation_length() const { return period_; }

    // Runs the geometric walk even when g is recognized as a power of the
    // base; lets tests compare the two evaluation paths.
    long long r_raw_walk_only(const Mat2& g) const;

  private:
    QmEngine() = default;

    std::optional<long long> detect_power(const Mat2& g) const;
    long long walk_count(const Mat2& g) const;

    Mat2 h_;  // trace-positive representative
    Mat2 h_inv_;
    Axis axis_;
    double lambda_log_{0.0};
    double period_{0.0};
    double tau_{1e-9};
    int retry_budget_{8};
    double sigma_{1.0};

    std::shared_ptr<const QmExactState> state_;

    double d_hat_{1.0};

    friend struct QmEngineBuilder;
};

}  // namespace catmix
