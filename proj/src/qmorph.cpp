#include "catmix/qmorph.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "catmix/geometry.hpp"
#include "catmix/quadform.hpp"

namespace catmix {

using rat = boost::multiprecision::cpp_rational;

// ---- exact upper half-plane kernel -----------------------------------------
//
// Points carry (x, y^2) with both coordinates rational (y > 0 implied), and
// geodesics carry a rational center and radius^2 or a rational vertical
// abscissa. Basepoints are chosen with rational x on the base axis and the
// marker circle is chosen with rational center, so every wall, floor, marker
// side and marker extent decision below is a rational sign evaluation. A walk
// of any combinatorial length is then exact; the only failures are genuine
// boundary coincidences, which are detected exactly and resolved by retrying
// from the next basepoint.

struct RPoint {
    rat x, y2;
};

// Geodesic: half-circle (m, r2) or vertical line at x.
struct RGeo {
    bool vertical = false;
    rat m, r2;
    rat x;
};

// Marker segment: a circle orthogonal to the anchor-cell axis, clipped by two
// endpoints with rational abscissae. front_sign orients positive crossings.
struct ExactGate {
    rat gc, gr2;
    RPoint e1, e2;
    int front_sign = 1;

    rat side(const RPoint& p) const {
        rat dx = p.x - gc;
        return dx * dx + p.y2 - gr2;
    }
};

struct QmExactState {
    ExactGate gate;
    struct BasePoint {
        RPoint z;  // local coordinates inside tile D.gamma
        Mat2 gamma;
    };
    std::vector<BasePoint> basepoints;
};

namespace {

const Mat2 kT{1, 1, 0, 1};
const Mat2 kTinv{1, -1, 0, 1};
const Mat2 kS{0, 1, -1, 0};

constexpr long long kMaxCells = 400000;

double lambda_log_of_trace(const bigint& t_in) {
    bigint t = abs(t_in);
    double td = to_double(t);
    if (std::isfinite(td) && td < 1e150)
        return std::log(0.5 * (td + std::sqrt(td * td - 4.0)));
    return log_abs(t);
}

[[noreturn]] void amb(const char* what) { throw NumericallyAmbiguous(what); }

int rsgn(const rat& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

double rd(const rat& v) { return v.convert_to<double>(); }

HPoint rp_f(const RPoint& p) { return {rd(p.x), std::sqrt(std::max(0.0, rd(p.y2)))}; }

rat rat_from_double(double v) {
    if (!std::isfinite(v)) amb("non-finite coordinate");
    int ex = 0;
    double m = std::frexp(v, &ex);
    long long mi = std::llround(std::ldexp(m, 53));
    int sh = ex - 53;
    rat r(mi);
    if (sh > 0)
        r *= rat(bigint(1) << sh);
    else if (sh < 0)
        r /= rat(bigint(1) << (-sh));
    return r;
}

bigint floor_div(const bigint& a, const bigint& b) {
    bigint q = a / b, r = a % b;
    if (r != 0 && (r < 0) != (b < 0)) --q;
    return q;
}

bigint rat_round(const rat& x) {
    bigint p = numerator(x), q = denominator(x);
    return floor_div(2 * p + q, 2 * q);
}

// w = (d z + b)/(c z + a) on (x, y^2); the denominator (c x + a)^2 + c^2 y^2
// is positive for every point with y > 0.
RPoint rp_mobius(const RPoint& p, const Mat2& g) {
    rat cxa = rat(g.c) * p.x + rat(g.a);
    rat den = cxa * cxa + rat(g.c * g.c) * p.y2;
    rat xr = (rat(g.d * g.c) * (p.x * p.x + p.y2) + rat(g.a * g.b) +
              rat(g.a * g.d + g.b * g.c) * p.x) /
             den;
    return {xr, p.y2 / (den * den)};
}

// Chart change after exiting through the right wall (0), left wall (1) or the
// floor arc (2).
RPoint rp_chart(int side, const RPoint& p) {
    switch (side) {
        case 0:
            return {p.x - 1, p.y2};
        case 1:
            return {p.x + 1, p.y2};
        default: {
            rat n = p.x * p.x + p.y2;
            return {-p.x / n, p.y2 / (n * n)};
        }
    }
}

const Mat2& chart_mat(int side) {
    return side == 0 ? kT : (side == 1 ? kTinv : kS);
}

bool margin_ok(const RPoint& z, const rat& eps) {
    return abs(z.x) + eps <= rat(1, 2) && z.x * z.x + z.y2 >= 1 + eps;
}

// Geodesic through two distinct points, directed from p toward q. For circles
// dir is the sign of travel in x, for verticals the sign of travel in y.
RGeo geo_between(const RPoint& p, const RPoint& q, int* dir) {
    RGeo g;
    if (p.x == q.x) {
        if (p.y2 == q.y2) amb("walk segment has no extent");
        g.vertical = true;
        g.x = p.x;
        *dir = q.y2 > p.y2 ? 1 : -1;
        return g;
    }
    g.m = ((q.x * q.x + q.y2) - (p.x * p.x + p.y2)) / (2 * (q.x - p.x));
    rat dm = p.x - g.m;
    g.r2 = dm * dm + p.y2;
    *dir = q.x > p.x ? 1 : -1;
    return g;
}

// Invariant geodesic of a hyperbolic integer matrix. c != 0 always: c = 0
// with det 1 forces a = d = +-1 and |trace| = 2.
RGeo axis_geo_of(const Mat2& a) {
    RGeo g;
    bigint t = trace(a);
    g.m = rat(a.d - a.a) / rat(2 * a.c);
    g.r2 = rat(t * t - 4) / rat(4 * a.c * a.c);
    return g;
}

// Sign of (attracting foot of a) - x, exact: the attracting foot for
// trace > 2 is m + sqrt(t^2-4)/(2c), and t^2 - 4 is never a perfect square.
int dir_toward_attracting(const Mat2& a, const RGeo& geo, const rat& x) {
    rat a0 = geo.m - x;
    rat b = rat(1) / rat(2 * a.c);
    int sa = rsgn(a0), sb = rsgn(b);
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    bigint t = trace(a);
    rat lhs = a0 * a0, rhs = b * b * rat(t * t - 4);
    if (lhs == rhs) amb("axis direction degenerate");
    return lhs > rhs ? sa : sb;
}

struct RExit {
    int side;  // 0: x=+1/2, 1: x=-1/2, 2: floor arc
    RPoint pt;
};

// Next crossing of the cell boundary strictly ahead of `at` along dir. All
// comparisons are exact; corners and tangencies surface as coincidences.
RExit rfind_exit(const RGeo& geo, int dir, const RPoint& at) {
    static const rat half(1, 2), corner(3, 4);
    if (geo.vertical) {
        if (dir >= 0) amb("vertical ascent inside a cell");
        if (abs(geo.x) >= half) amb("vertical walk on a wall");
        rat y2f = 1 - geo.x * geo.x;
        if (at.y2 <= y2f) amb("vertical walk below the floor");
        return {2, {geo.x, y2f}};
    }
    std::optional<RExit> best;
    rat bestkey;
    auto push = [&](int side, RPoint p) {
        rat key = dir > 0 ? rat(p.x - at.x) : rat(at.x - p.x);
        if (!(key > 0)) return;
        if (!best || key < bestkey) {
            bestkey = key;
            best = RExit{side, std::move(p)};
        } else if (key == bestkey) {
            amb("two exits coincide");
        }
    };
    if (dir > 0) {
        rat dx = half - geo.m;
        rat y2 = geo.r2 - dx * dx;
        if (y2 == corner) amb("walk through the right corner");
        if (y2 > corner) push(0, {half, y2});
    } else {
        rat dx = -half - geo.m;
        rat y2 = geo.r2 - dx * dx;
        if (y2 == corner) amb("walk through the left corner");
        if (y2 > corner) push(1, {-half, y2});
    }
    if (geo.m != 0) {
        rat xf = (1 + geo.m * geo.m - geo.r2) / (2 * geo.m);
        rat y2f = 1 - xf * xf;
        if (y2f > 0) {
            rat ax = abs(xf);
            if (ax == half) amb("walk through a floor corner");
            if (ax < half) push(2, {xf, y2f});
        }
    } else if (geo.r2 == 1) {
        amb("walk collapses onto the floor");
    }
    if (!best) amb("no exit from cell");
    return *best;
}

// Signed marker crossing of the segment [p, q] lying on the geodesic w: +-1
// when the segment crosses the marker circle between the marker endpoints,
// with the sign fixed by front_sign. Exact coincidences abort.
int gate_events(const ExactGate* gate, const RGeo& w, const RPoint& p, const RPoint& q) {
    if (!gate) return 0;
    int sp = rsgn(gate->side(p)), sq = rsgn(gate->side(q));
    if (sp == 0 || sq == 0) amb("segment endpoint on the marker circle");
    if (sp == sq) return 0;
    auto wside = [&](const RPoint& e) {
        if (w.vertical) return rat(e.x - w.x);
        rat dx = e.x - w.m;
        return rat(dx * dx + e.y2 - w.r2);
    };
    int s1 = rsgn(wside(gate->e1)), s2 = rsgn(wside(gate->e2));
    if (s1 == 0 || s2 == 0) amb("marker endpoint on the walk geodesic");
    if (s1 == s2) return 0;
    return (sq == gate->front_sign) ? 1 : -1;
}

struct ExactCell {
    Mat2 gamma;
    RPoint entry, exit;
};

struct PeriodWalk {
    long long signed_sum = 0;
    long long events = 0;
    std::vector<ExactCell> cells;
};

// One translation period along the axis of h: from `start` in tile
// gamma_start until the tile gamma_start.h is entered. The per-cell geodesic
// is recomputed from the conjugated matrix, so the data stays exact however
// many cells the period crosses. In collect mode the arrival is recorded as a
// final degenerate record whose entry is the entry point into the end tile;
// by periodicity that value equals the entry into the start tile in the
// start chart, which is what glues the anchor chord.
PeriodWalk axis_period_walk(const Mat2& h, const Mat2& gamma_start, const RPoint& start,
                            const ExactGate* gate, bool collect) {
    Mat2 target = projective_rep(gamma_start * h);
    Mat2 gamma = gamma_start;
    RPoint at = start;
    PeriodWalk out;
    for (long long cell = 0;; ++cell) {
        if (cell > kMaxCells) amb("axis walk exceeded the cell budget");
        if (projective_rep(gamma) == target) {
            if (collect) out.cells.push_back({gamma, at, at});
            return out;
        }
        Mat2 a = gamma * h * inverse(gamma);
        RGeo geo = axis_geo_of(a);
        int dir = dir_toward_attracting(a, geo, at.x);
        RExit ex = rfind_exit(geo, dir, at);
        int ev = gate_events(gate, geo, at, ex.pt);
        if (ev != 0) {
            out.signed_sum += ev;
            ++out.events;
        }
        if (collect) out.cells.push_back({gamma, at, ex.pt});
        at = rp_chart(ex.side, ex.pt);
        gamma = chart_mat(ex.side) * gamma;
    }
}

// Signed marker count along the geodesic segment from z0 (in tile gamma0) to
// its g-translate. The local endpoint image is carried through every chart
// change, and the final partial cell is tested against the marker too.
long long segment_walk(const RPoint& z0, const Mat2& gamma0, const Mat2& g,
                       const ExactGate& gate) {
    Mat2 conj = gamma0 * g * inverse(gamma0);
    RPoint end_l = rp_mobius(z0, conj);
    if (end_l.x == z0.x && end_l.y2 == z0.y2) return 0;
    Mat2 target = projective_rep(gamma0 * g);
    Mat2 gamma = gamma0;
    RPoint at = z0;
    long long sum = 0;
    for (long long cell = 0;; ++cell) {
        if (cell > kMaxCells) amb("cell walk exceeded the cell budget");
        int dir = 0;
        if (projective_rep(gamma) == target) {
            RGeo geo = geo_between(at, end_l, &dir);
            return sum + gate_events(&gate, geo, at, end_l);
        }
        RGeo geo = geo_between(at, end_l, &dir);
        RExit ex = rfind_exit(geo, dir, at);
        sum += gate_events(&gate, geo, at, ex.pt);
        at = rp_chart(ex.side, ex.pt);
        end_l = rp_chart(ex.side, end_l);
        gamma = chart_mat(ex.side) * gamma;
    }
}

struct RReduced {
    RPoint z;
    Mat2 delta;
};

// Exact fundamental-domain reduction: returns delta with z.delta inside
// {|x| <= 1/2, |z| >= 1}. Terminates because every inversion strictly
// increases y^2.
RReduced exact_reduce(RPoint z) {
    Mat2 delta;
    for (int it = 0; it < 4096; ++it) {
        bigint k = rat_round(z.x);
        if (k != 0) {
            z.x -= rat(k);
            delta = delta * Mat2{1, -k, 0, 1};
        }
        if (z.x * z.x + z.y2 < 1) {
            z = rp_chart(2, z);
            delta = delta * kS;
            continue;
        }
        return {z, delta};
    }
    amb("fundamental-domain reduction did not settle");
}

}  // namespace

Axis axis(const Mat2& m) {
    require_unimodular(m);
    if (classify(m) != MatClass::Hyperbolic)
        throw NotHyperbolic("axis requires |trace| > 2");
    bigint t = trace(m);
    bigint disc = t * t - 4;
    bigint dma = m.d - m.a;
    bigint c2 = 2 * m.c;
    // Fixed points of z.m solve c z^2 + (a - d) z - b = 0; the root with
    // +sqrt(disc) carries multiplier ((t + sqrt(disc))/2)^{-2}.
    Surd plus = make_surd(dma, 1, c2, disc);
    Surd minus = make_surd(dma, -1, c2, disc);
    Axis ax;
    if (t > 0) {
        ax.attracting = plus;
        ax.repelling = minus;
    } else {
        ax.attracting = minus;
        ax.repelling = plus;
    }
    ax.attracting_f = to_double(ax.attracting);
    ax.repelling_f = to_double(ax.repelling);
    return ax;
}

NotPrimitiveMatrix::NotPrimitiveMatrix(const Mat2& r, long long k)
    : Error("matrix is a proper power: root " + catmix::to_string(r) + " to the " +
            std::to_string(k)),
      root(r),
      power(k) {}

void require_primitive_hyperbolic(const Mat2& m) {
    bigint t = trace(m);
    if (t <= 2) throw Error("primitivity check requires trace > 2");
    double llam = lambda_log_of_trace(t);
    double lmin = std::log(0.5 * (3.0 + std::sqrt(5.0)));
    long long kmax = static_cast<long long>(llam / lmin) + 1;
    for (long long k = 2; k <= kmax; ++k) {
        // trace(x^k) = q_k(trace x) with q_k(s) = s p_k(s) - 2 p_{k-1}(s),
        // p_{j+1} = s p_j - p_{j-1}, p_0 = 0, p_1 = 1. q_k is increasing for
        // s >= 2, so the candidate trace is found by bisection.
        auto qk = [&](const bigint& s) {
            bigint pkm1 = 0, pk = 1;
            for (long long i = 2; i <= k; ++i) {
                bigint nx = s * pk - pkm1;
                pkm1 = pk;
                pk = nx;
            }
            return std::tuple<bigint, bigint, bigint>(s * pk - 2 * pkm1, pk, pkm1);
        };
        bigint lo = 3, hi = 3;
        while (std::get<0>(qk(hi)) < t) hi *= 2;
        while (lo < hi) {
            bigint mid = (lo + hi) / 2;
            if (std::get<0>(qk(mid)) < t) lo = mid + 1;
            else hi = mid;
        }
        auto [q, pk, pkm1] = qk(lo);
        if (q != t || pk == 0) continue;
        bigint xa = m.a + pkm1, xd = m.d + pkm1;
        if (xa % pk != 0 || m.b % pk != 0 || m.c % pk != 0 || xd % pk != 0) continue;
        Mat2 x{xa / pk, m.b / pk, m.c / pk, xd / pk};
        if (det(x) != 1 || trace(x) != lo) continue;
        if (mat_pow(x, k) == m) throw NotPrimitiveMatrix(x, k);
    }
}

struct QmEngineBuilder {
    struct CChord {
        Mat2 gamma;
        RPoint in, out;
        double len;
    };

    static QmEngine build(const Mat2& h_in, const QmParams& params) {
        require_unimodular(h_in);
        if (classify(h_in) != MatClass::Hyperbolic)
            throw NotHyperbolic("quasi-morphism base must be hyperbolic");
        QmEngine e;
        e.h_ = trace(h_in) > 0 ? h_in : -h_in;
        e.h_inv_ = inverse(e.h_);
        e.tau_ = params.tau;
        e.retry_budget_ = std::max(0, params.retry_budget);
        require_primitive_hyperbolic(e.h_);
        if (is_conjugate_to_inverse(e.h_).conjugate)
            throw DegenerateGeometry(
                "base axis has an orientation-reversing symmetry, so every "
                "crossing count cancels");
        e.axis_ = axis(e.h_);
        e.lambda_log_ = lambda_log_of_trace(trace(e.h_));
        e.period_ = 2.0 * e.lambda_log_;

        // Exact global axis circle; c != 0 for every hyperbolic integer
        // matrix.
        bigint tr = trace(e.h_);
        rat cg = rat(e.h_.d - e.h_.a) / rat(2 * e.h_.c);
        rat rg2 = rat(tr * tr - 4) / rat(4 * e.h_.c * e.h_.c);
        double cgd = rd(cg), rgd = std::sqrt(rd(rg2));

        // One full period of the axis, recorded cell by cell from a rational
        // point on the axis.
        std::vector<ExactCell> period_cells;
        for (int j = 0; j < 60 && period_cells.empty(); ++j) {
            double t0 = 0.12 * j * (j % 2 ? 1.0 : -1.0);
            rat x0 = rat_from_double(circle_point_at(cgd, rgd, t0).x);
            rat dx = x0 - cg;
            rat y20 = rg2 - dx * dx;
            if (!(y20 > 0)) continue;
            try {
                RReduced red = exact_reduce({x0, y20});
                if (!margin_ok(red.z, rat(1, 1000))) continue;
                PeriodWalk pw =
                    axis_period_walk(e.h_, inverse(red.delta), red.z, nullptr, true);
                if (pw.cells.size() >= 2) period_cells = std::move(pw.cells);
            } catch (const NumericallyAmbiguous&) {
                continue;
            }
        }
        if (period_cells.empty())
            throw DegenerateGeometry("could not traverse one axis period");

        // Candidate chords: interior cells are complete; the first and last
        // records describe the same tile one period apart and glue into the
        // anchor chord.
        std::vector<CChord> chords;
        const ExactCell& first = period_cells.front();
        const ExactCell& last = period_cells.back();
        chords.push_back({first.gamma, last.entry, first.exit,
                          hyp_dist(rp_f(last.entry), rp_f(first.exit))});
        for (size_t i = 1; i + 1 < period_cells.size(); ++i) {
            const ExactCell& cr = period_cells[i];
            chords.push_back(
                {cr.gamma, cr.entry, cr.exit, hyp_dist(rp_f(cr.entry), rp_f(cr.exit))});
        }
        std::sort(chords.begin(), chords.end(),
                  [](const CChord& a, const CChord& b) { return a.len > b.len; });

        auto st = std::make_shared<QmExactState>();
        RPoint m_glob;
        bool placed = false;
        for (const CChord& ch : chords) {
            if (!(ch.len > 1e-6)) break;
            if (place_gate(e, *st, ch, params, &m_glob)) {
                placed = true;
                break;
            }
        }
        if (!placed) throw DegenerateGeometry("no admissible marker placement");

        // Basepoints well upstream of the marker, each safely inside a tile,
        // snapped to rational abscissae on the axis.
        double t_m_glob = circle_param_of(cgd, rgd, rp_f(m_glob));
        double fa = e.axis_.attracting_f, fr = e.axis_.repelling_f;
        double ldir = (fa > fr) ? -1.0 : 1.0;  // t-parameter drift when moving forward
        double dist_back = std::min(0.5 * e.period_, 30.0);
        std::mt19937_64 jrng(0x9e3779b97f4a7c15ULL);
        std::uniform_real_distribution<double> jdist(-0.15, 0.15);
        for (int j = 0; j <= e.retry_budget_; ++j) {
            double jit = (j == 0) ? 0.0 : jdist(jrng) * std::min(e.period_, 8.0);
            double tz = t_m_glob - ldir * (dist_back + jit);
            for (int slide = 0; slide < 50; ++slide) {
                double xd = circle_point_at(cgd, rgd, tz - ldir * 0.01 * slide).x;
                try {
                    rat x0 = rat_from_double(xd);
                    rat dx = x0 - cg;
                    rat y20 = rg2 - dx * dx;
                    if (!(y20 > 0)) continue;
                    RReduced red = exact_reduce({x0, y20});
                    if (!margin_ok(red.z, rat(1, 1000))) continue;
                    st->basepoints.push_back({red.z, inverse(red.delta)});
                    break;
                } catch (const NumericallyAmbiguous&) {
                    continue;
                }
            }
        }
        if (st->basepoints.empty())
            throw DegenerateGeometry("no basepoint with safe margins");
        e.state_ = std::move(st);

        // Defect bound: adversarial parabolic pairs plus a random sample.
        double dmax = 1.0;
        auto dpair = [&](const Mat2& g1, const Mat2& g2) {
            long long d = e.r_raw(g1 * g2) - e.r_raw(g1) - e.r_raw(g2);
            dmax = std::max(dmax, std::abs(static_cast<double>(d)));
        };
        for (long long k : {16LL, 32LL, 64LL}) {
            Mat2 uk{1, k, 0, 1}, lk{1, 0, k, 1};
            dpair(uk, uk);
            dpair(lk, lk);
            dpair(uk, lk);
        }
        dpair(kS, kS);
        dpair(e.h_, kS);
        dpair(e.h_inv_, kS);
        e.d_hat_ = std::max(dmax, e.defect_estimate(params.defect_sample,
                                                    params.defect_word_len,
                                                    params.defect_seed));
        return e;
    }

    // Places the marker on one candidate chord: a circle orthogonal to the
    // local axis with rational center, clipped by endpoints with rational
    // abscissae, shrunk until one axis period crosses it exactly once with
    // positive sign.
    static bool place_gate(QmEngine& e, QmExactState& st, const CChord& ch,
                           const QmParams& params, RPoint* m_glob) {
        const Mat2 a = ch.gamma * e.h_ * inverse(ch.gamma);
        RGeo ax = axis_geo_of(a);
        const rat& c0 = ax.m;
        const rat& r02 = ax.r2;
        double c0d = rd(c0), r0d = std::sqrt(rd(r02));
        double t_in = circle_param_of(c0d, r0d, rp_f(ch.in));
        double t_out = circle_param_of(c0d, r0d, rp_f(ch.out));
        double chord_half = 0.5 * std::abs(t_out - t_in);

        for (int nudge = 0; nudge < 8; ++nudge) {
            double frac = 0.08 * nudge * (nudge % 2 ? -1.0 : 1.0);
            double t_m = 0.5 * (t_in + t_out) + frac * chord_half;
            HPoint md = circle_point_at(c0d, r0d, t_m);
            if (std::abs(md.x - c0d) < 1e-9 * r0d) continue;
            double gmd = (r0d * r0d - c0d * (c0d - md.x)) / (md.x - c0d);
            if (!std::isfinite(gmd)) continue;
            rat gc = rat_from_double(gmd);
            rat gcc = gc - c0;
            rat gr2 = gcc * gcc - r02;
            if (!(gr2 > 0)) continue;
            rat x_m = (r02 - gr2 + gc * gc - c0 * c0) / (2 * (gc - c0));
            rat dxm = x_m - c0;
            rat y_m2 = r02 - dxm * dxm;
            if (!(y_m2 > 0)) continue;
            bool between = (ch.in.x < x_m && x_m < ch.out.x) ||
                           (ch.out.x < x_m && x_m < ch.in.x);
            if (!between) continue;
            RPoint mpt{x_m, y_m2};
            if (!margin_ok(mpt, rat(1, 1000000))) continue;
            rat odx = ch.out.x - gc;
            int front = rsgn(odx * odx + ch.out.y2 - gr2);
            if (front == 0) continue;

            double gcd = rd(gc), grd = std::sqrt(rd(gr2));
            double tg = circle_param_of(gcd, grd, rp_f(mpt));
            double wbase = std::min(0.4, 0.45 * chord_half);
            double sigma = params.sigma0;
            while (sigma >= std::exp2(-20)) {
                double w = wbase * sigma;
                if (!(w > 1e-7)) break;
                HPoint e1d = circle_point_at(gcd, grd, tg + w);
                HPoint e2d = circle_point_at(gcd, grd, tg - w);
                try {
                    ExactGate gate;
                    gate.gc = gc;
                    gate.gr2 = gr2;
                    gate.front_sign = front;
                    bool ok = true;
                    RPoint* eps[2] = {&gate.e1, &gate.e2};
                    const HPoint* eds[2] = {&e1d, &e2d};
                    for (int i = 0; i < 2 && ok; ++i) {
                        rat xe = rat_from_double(eds[i]->x);
                        rat dxe = xe - gc;
                        rat ye2 = gr2 - dxe * dxe;
                        if (!(ye2 > 0)) {
                            ok = false;
                            break;
                        }
                        *eps[i] = RPoint{xe, ye2};
                        if (!margin_ok(*eps[i], rat(1, 1000000))) ok = false;
                    }
                    if (ok) {
                        auto axis_side = [&](const RPoint& p) {
                            rat dd = p.x - c0;
                            return rsgn(dd * dd + p.y2 - r02);
                        };
                        int s1 = axis_side(gate.e1), s2 = axis_side(gate.e2);
                        if (s1 == 0 || s2 == 0 || s1 == s2) ok = false;
                        if (ok) {
                            PeriodWalk v =
                                axis_period_walk(e.h_, ch.gamma, ch.in, &gate, false);
                            if (v.events == 1 && v.signed_sum == 1) {
                                st.gate = gate;
                                e.sigma_ = sigma;
                                *m_glob = rp_mobius(mpt, ch.gamma);
                                return true;
                            }
                        }
                    }
                } catch (const NumericallyAmbiguous&) {
                }
                sigma *= 0.5;
            }
        }
        return false;
    }
};

QmEngine QmEngine::build(const Mat2& h, const QmParams& params) {
    return QmEngineBuilder::build(h, params);
}

std::optional<long long> QmEngine::detect_power(const Mat2& g) const {
    static const Mat2 kI{};
    if (same_projective(g, kI)) return 0;
    if (!(g * h_ == h_ * g)) return std::nullopt;
    bigint tg = abs(trace(g));
    if (tg <= 2) return std::nullopt;
    double lg = lambda_log_of_trace(tg);
    long long k0 = std::llround(lg / lambda_log_);
    for (long long k : {k0, k0 - 1, k0 + 1}) {
        if (k < 1) continue;
        Mat2 p = mat_pow(h_, k);
        if (same_projective(p, g)) return k;
        if (same_projective(inverse(p), g)) return -k;
    }
    return std::nullopt;
}

long long QmEngine::walk_count(const Mat2& g) const {
    std::string last = "no basepoint available";
    for (const QmExactState::BasePoint& bp : state_->basepoints) {
        Mat2 target = projective_rep(bp.gamma * g);
        if (projective_rep(bp.gamma) == target) return 0;
        try {
            return segment_walk(bp.z, bp.gamma, g, state_->gate);
        } catch (const NumericallyAmbiguous& ex) {
            last = ex.what();
        }
    }
    throw NumericallyAmbiguous(std::string("crossing count unresolved: ") + last);
}

long long QmEngine::r_raw(const Mat2& g) const {
    require_unimodular(g);
    if (auto k = detect_power(g)) return *k;
    return walk_count(g);
}

long long QmEngine::r_raw_walk_only(const Mat2& g) const {
    require_unimodular(g);
    return walk_count(g);
}

HomEstimate QmEngine::r_hom(const Mat2& g, long long n_max) const {
    if (n_max < 4) throw Error("r_hom needs n_max >= 4");
    long long rn = r_raw(mat_pow(g, n_max));
    return HomEstimate{static_cast<double>(rn) / static_cast<double>(n_max),
                       d_hat_ / static_cast<double>(n_max), n_max};
}

double QmEngine::defect_estimate(int sample_size, int word_len,
                                 std::uint64_t seed) const {
    if (sample_size <= 0) return 0.0;
    std::uint64_t wl = static_cast<std::uint64_t>(std::max(1, word_len));
    std::mt19937_64 rng(seed);
    const Mat2 gens[5] = {kT, kTinv, Mat2{1, 0, 1, 1}, Mat2{1, 0, -1, 1}, kS};
    auto word = [&]() {
        Mat2 w;
        std::uint64_t len = 1 + rng() % wl;
        for (std::uint64_t i = 0; i < len; ++i) w = w * gens[rng() % 5];
        return w;
    };
    double mx = 0.0;
    for (int i = 0; i < sample_size; ++i) {
        Mat2 g1 = word(), g2 = word();
        long long d = r_raw(g1 * g2) - r_raw(g1) - r_raw(g2);
        mx = std::max(mx, std::abs(static_cast<double>(d)));
    }
    return mx;
}

}  // namespace catmix
