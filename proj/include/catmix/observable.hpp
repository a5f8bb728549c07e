#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>

#include "catmix/int2x2.hpp"

namespace catmix {

// Polynomial tail law for the coefficients beyond the materialized support:
// |a(v)| <= c_f * ||v||^(-1-gamma).
struct ObservableTail {
    double c_f{0.0};
    double gamma{0.0};
};

// Mean-zero observable on the torus, stored as a finite coefficient map
// v -> a(v) over nonzero integer frequency vectors, optionally extended by a
// declared polynomial tail. The zero frequency is rejected on insertion, so
// the mean is zero by construction.
class Observable {
  public:
    using Coeffs = std::map<Vec2, std::complex<double>>;

    Observable() = default;

    // Inserts (or overwrites) one coefficient. Throws on v = 0; a value of
    // exactly zero erases the term instead of storing it.
    void set(const Vec2& v, std::complex<double> a);

    const Coeffs& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    std::optional<ObservableTail> tail;

    // a(-v) == conj(a(v)) for every stored term.
    bool real_valued() const;

    // Sum of |a(v)|^2 over the materialized support, accumulated in map
    // order so it is reproducible bit for bit.
    double norm2_sq() const;
    double norm2() const;

    // Largest squared Euclidean norm over the support (0 when empty).
    bigint max_freq_sq() const;
    // Smallest integer N with N^2 >= max_freq_sq (the frequency cutoff).
    long long max_freq() const;

    // Keeps the terms with ||v||^2 <= N^2 and drops the tail descriptor.
    Observable truncate(long long n) const;

  private:
    Coeffs terms_;
};

// JSON round trip. Layout:
//   {"terms": [{"v": [p, q], "re": 0.5, "im": 0.0}, ...],
//    "tail": {"c_f": 1.0, "gamma": 1.0} | null}
Observable parse_observable(const std::string& text);
std::string to_json(const Observable& f);

}  // namespace catmix
