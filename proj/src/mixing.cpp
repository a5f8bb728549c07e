#include "catmix/mixing.hpp"

#include <json.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "catmix/errors.hpp"

namespace catmix {

const char* to_string(KickMode m) {
    switch (m) {
        case KickMode::Explicit: return "explicit";
        case KickMode::Periodic: return "periodic";
        case KickMode::Seeded: return "seeded";
    }
    return "?";
}

const Mat2& SequentialSystem::f(long long n) const {
    if (n < 1 || n > n_max()) throw Error("composition index out of range");
    return fs_[static_cast<size_t>(n - 1)];
}

const Mat2& SequentialSystem::kick(long long n) const {
    if (n < 1 || n > n_max()) throw Error("kick index out of range");
    return kicks_[static_cast<size_t>(n - 1)];
}

SequentialSystem compose(const KickedSystemSpec& spec, long long n_max) {
    if (spec.t < 1) throw Error("kick period t must be >= 1");
    if (n_max < 1) throw Error("n_max must be >= 1");
    require_unimodular(spec.h);
    if (spec.kicks.empty()) throw Error("kick source is empty");
    for (const Mat2& k : spec.kicks) require_unimodular(k);

    SequentialSystem sys;
    sys.spec_ = spec;
    sys.kicks_.reserve(static_cast<size_t>(n_max));

    const size_t m = spec.kicks.size();
    std::mt19937_64 rng(spec.seed);
    for (long long n = 1; n <= n_max; ++n) {
        const Mat2* k = nullptr;
        switch (spec.mode) {
            case KickMode::Explicit:
                if (static_cast<size_t>(n) > m) throw Error("explicit kick list exhausted");
                k = &spec.kicks[static_cast<size_t>(n - 1)];
                break;
            case KickMode::Periodic:
                k = &spec.kicks[static_cast<size_t>((n - 1) % static_cast<long long>(m))];
                break;
            case KickMode::Seeded:
                k = &spec.kicks[static_cast<size_t>(rng() % m)];
                break;
        }
        bigint ktr = abs(trace(*k));
        if (ktr > spec.trace_bound)
            throw TraceBoundViolated("kick " + std::to_string(n) + " has |trace| " + ktr.str() +
                                     " > declared bound " + spec.trace_bound.str());
        sys.kicks_.push_back(*k);
    }

    Mat2 ht = mat_pow(spec.h, spec.t);
    sys.fs_.reserve(static_cast<size_t>(n_max));
    Mat2 cur;  // identity
    for (long long n = 1; n <= n_max; ++n) {
        cur = sys.kicks_[static_cast<size_t>(n - 1)] * ht * cur;
        sys.fs_.push_back(cur);
    }
    return sys;
}

std::complex<double> correlation(const Observable& f1, const Observable& f2, const Mat2& f) {
    if (f1.tail || f2.tail)
        throw Error("correlation needs finitely supported observables; use correlation_bound_holder");
    require_unimodular(f);
    std::complex<double> acc{0.0, 0.0};
    for (const auto& [v, a2] : f2.terms()) {
        auto it = f1.terms().find(-(v * f));
        if (it != f1.terms().end()) acc += it->second * a2;
    }
    return acc;
}

HolderBound correlation_bound_holder(const Observable& f, const Mat2& comp, long long n) {
    if (!f.tail) throw Error("correlation_bound_holder needs a declared tail");
    if (n < 1) throw Error("truncation cutoff must be >= 1");
    Observable head = f.truncate(n);
    std::complex<double> eh = correlation(head, head, comp);
    double tb = 2.0 * f.norm2() * f.tail->c_f * std::pow(static_cast<double>(n), -f.tail->gamma);
    return {eh, tb};
}

MinExpansion min_expansion(const Mat2& f, long long cutoff) {
    if (cutoff < 1) throw Error("cutoff must be >= 1");
    require_unimodular(f);
    bigint cap = bigint(cutoff) * cutoff;
    bigint best = -1;
    Vec2 arg{0, 0};
    for (long long p = -cutoff; p <= cutoff; ++p) {
        for (long long q = -cutoff; q <= cutoff; ++q) {
            if (p == 0 && q == 0) continue;
            Vec2 v{p, q};
            if (norm_sq(v) > cap) continue;
            bigint s = norm_sq(v * f);
            if (best < 0 || s < best) {
                best = s;
                arg = v;
            }
        }
    }
    return {std::sqrt(to_double(best)), arg, best};
}

ZeroTime zero_time(const Observable& f, const SequentialSystem& sys) {
    if (f.tail) throw Error("zero_time needs a finitely supported observable");
    if (f.empty()) return {true, 1};
    long long nf = f.max_freq();
    bigint nf_sq = bigint(nf) * nf;
    long long n0 = -1;
    for (long long n = 1; n <= sys.n_max(); ++n) {
        bool expanded = min_expansion(sys.f(n), nf).value_sq > nf_sq;
        if (expanded) {
            if (n0 < 0) n0 = n;
        } else {
            n0 = -1;
        }
    }
    if (n0 < 0) return {false, 0};
    return {true, n0};
}

DecayFit decay_fit(const std::vector<std::pair<long long, double>>& series) {
    std::vector<std::pair<double, double>> pts;
    int zeros = 0;
    for (const auto& [n, c] : series) {
        if (c < 0.0 || !std::isfinite(c)) throw Error("correlation magnitudes must be finite and >= 0");
        if (c == 0.0) {
            ++zeros;
            continue;
        }
        pts.emplace_back(static_cast<double>(n), std::log(c));
    }
    if (pts.empty()) throw AllZeroSeries("every correlation in the series is exactly zero");
    if (pts.size() < 4) throw Error("decay fit needs at least four nonzero correlations");

    double sx = 0, sy = 0;
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
    }
    double mx = sx / static_cast<double>(pts.size());
    double my = sy / static_cast<double>(pts.size());
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0.0) throw Error("decay fit needs at least two distinct n values");
    double slope = sxy / sxx;
    double r2 = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return {-slope, r2, static_cast<int>(pts.size()), zeros};
}

std::vector<Mat2> parse_kick_lines(const std::string& text) {
    std::vector<Mat2> out;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("kick line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!j.is_array() || j.size() != 4)
            throw ParseError("kick line " + std::to_string(lineno) + ": expected [a, b, c, d]");
        Mat2 m{bigint(j[0].get<long long>()), bigint(j[1].get<long long>()),
               bigint(j[2].get<long long>()), bigint(j[3].get<long long>())};
        require_unimodular(m);
        out.push_back(m);
    }
    return out;
}

std::string kick_lines(const std::vector<Mat2>& kicks) {
    std::string out;
    for (const Mat2& m : kicks) {
        nlohmann::json j = {static_cast<long long>(m.a), static_cast<long long>(m.b),
                            static_cast<long long>(m.c), static_cast<long long>(m.d)};
        out += j.dump();
        out += '\n';
    }
    return out;
}

}  // namespace catmix
