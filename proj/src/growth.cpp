#include "catmix/growth.hpp"

#include <json.hpp>

#include <cmath>
#include <utility>

#include "catmix/errors.hpp"
#include "catmix/qmorph.hpp"
#include "catmix/quadform.hpp"

namespace catmix {

namespace {

Mat2 upper_elem(const bigint& k) { return Mat2{1, k, 0, 1}; }
Mat2 lower_elem(const bigint& k) { return Mat2{1, 0, k, 1}; }

// g = a x + b y with g = gcd(a, b) >= 0.
bigint ext_gcd(const bigint& a, const bigint& b, bigint& x, bigint& y) {
    bigint old_r = a, r = b;
    bigint old_s = 1, s = 0;
    bigint old_t = 0, t = 1;
    while (r != 0) {
        bigint q = old_r / r;
        bigint tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
        tmp = old_t - q * t;
        old_t = t;
        t = tmp;
    }
    if (old_r < 0) {
        old_r = -old_r;
        old_s = -old_s;
        old_t = -old_t;
    }
    x = old_s;
    y = old_t;
    return old_r;
}

// Primitive root x and maximal e >= 2 with x^e == m, or nullopt when m is
// itself primitive. Requires trace(m) > 2.
std::optional<std::pair<Mat2, long long>> full_root(const Mat2& m) {
    Mat2 x = m;
    long long e = 1;
    for (;;) {
        try {
            require_primitive_hyperbolic(x);
            break;
        } catch (const NotPrimitiveMatrix& ex) {
            e *= ex.power;
            x = ex.root;
        }
    }
    if (e == 1) return std::nullopt;
    return std::make_pair(x, e);
}

// g = m^(2k) with m conjugate to m^-1 collapses to the single commutator
// [m^k, w]: w m^-k w^-1 == m^k, so m^k w m^-k w^-1 == m^(2k).
std::optional<RhoFactor> commutator_presentation(const Mat2& g) {
    auto root = full_root(g);
    if (!root) return std::nullopt;
    auto [x, e] = *root;
    if (e % 2 != 0) return std::nullopt;
    for (long long j = 1; 2 * j <= e; ++j) {
        if ((e / 2) % j != 0) continue;
        long long k = e / (2 * j);
        Mat2 m = mat_pow(x, j);
        ConjugacyToInverse civ = is_conjugate_to_inverse(m);
        if (!civ.conjugate || !civ.witness) continue;
        RhoFactor fac{FactorTag::Commutator, {mat_pow(m, k), *civ.witness}};
        if (fac.value() == g) return fac;
    }
    return std::nullopt;
}

std::string csv_matrix(const Mat2& m) { return to_string(m); }

}  // namespace

SmallC reduce_small_c(const Mat2& f) {
    require_unimodular(f);
    if (classify(f) != MatClass::Hyperbolic)
        throw NotHyperbolic("reduce_small_c needs a hyperbolic matrix");
    QuadForm q = form_of(f);
    Mat2 acc;
    QuadForm cur = reduce_form(q, &acc);
    const QuadForm anchor = cur;
    bigint best_abs = abs(cur.A);
    Mat2 best_sub = acc;
    const int kCycleBudget = 1000000;
    for (int i = 0;; ++i) {
        if (i >= kCycleBudget) throw SearchExhausted("form cycle did not close within budget");
        cur = rho_step(cur, &acc);
        if (abs(cur.A) < best_abs) {
            best_abs = abs(cur.A);
            best_sub = acc;
        }
        if (cur == anchor) break;
    }
    // The cycle cell with the smallest leading coefficient evaluates the form
    // at the first column of its substitution; that column becomes the bottom
    // row of the conjugator (reversed), which is what lands in the c slot.
    bigint x0 = best_sub.a, y0 = best_sub.c;
    bigint u, v;
    bigint g = ext_gcd(x0, y0, u, v);
    if (g != 1) throw Error("substitution column is imprimitive");
    Mat2 s{u, -v, y0, x0};
    Mat2 conj = conjugate(s, f);
    bigint t = trace(f);
    if (5 * conj.c * conj.c > t * t - 4)
        throw Error("cycle minimum exceeded the expected bound");
    return {conj, s};
}

ParabolicSplit split_parabolic(const Mat2& f) {
    require_unimodular(f);
    bigint t = trace(f);
    if (abs(t) <= 2) throw NotHyperbolic("split_parabolic needs a hyperbolic matrix");
    if (f.c == 0) throw Error("split_parabolic needs a nonzero lower-left entry");
    bigint q, rem;
    nearest_div(t, f.c, q, rem);
    bigint best_k = -q;
    bigint best_abs = abs(t + f.c * best_k);
    for (int dk : {-1, 1}) {
        bigint k = -q + dk;
        bigint ta = abs(t + f.c * k);
        if (ta < best_abs || (ta == best_abs && abs(k) < abs(best_k))) {
            best_k = k;
            best_abs = ta;
        }
    }
    Mat2 fp = f * upper_elem(best_k);
    if (2 * abs(trace(fp)) > abs(f.c)) throw Error("parabolic split missed its trace bound");
    return {fp, best_k};
}

TraceBoundResult trace_bound_check(const Mat2& f, double r_of_f, double dr_norm) {
    require_unimodular(f);
    if (classify(f) != MatClass::Hyperbolic)
        throw NotHyperbolic("trace_bound_check needs a hyperbolic matrix");
    if (!(dr_norm > 0.0)) throw Error("trace_bound_check needs dr_norm > 0");
    if (!std::isfinite(r_of_f)) throw Error("trace_bound_check needs a finite r value");
    double log_lhs = log_abs(trace(f));
    double log_rhs = std::abs(r_of_f) / dr_norm * std::log(2.0 * std::sqrt(5.0));
    return {to_double(abs(trace(f))), std::exp(log_rhs), log_lhs >= log_rhs};
}

TraceCertificate trace_certificate(const Mat2& f) {
    require_unimodular(f);
    if (classify(f) != MatClass::Hyperbolic)
        throw NotHyperbolic("trace_certificate needs a hyperbolic matrix");
    TraceCertificate cert;
    Mat2 cur = f;
    while (abs(trace(cur)) > 2) {
        if (cert.steps.size() > 10000) throw SearchExhausted("trace descent did not terminate");
        SmallC sc = reduce_small_c(cur);
        ParabolicSplit ps = split_parabolic(sc.g);
        cert.steps.push_back({cur, sc.conj, sc.g, ps.k, ps.f_prime});
        cur = ps.f_prime;
    }
    cert.final_matrix = cur;
    verify_certificate(cert, f);
    return cert;
}

void verify_certificate(const TraceCertificate& cert, const Mat2& f) {
    Mat2 cur = f;
    for (size_t i = 0; i < cert.steps.size(); ++i) {
        const TraceCertStep& st = cert.steps[i];
        if (st.before != cur) throw Error("certificate chain breaks at step " + std::to_string(i));
        if (det(st.conj) != 1) throw Error("certificate conjugator is not unimodular");
        if (conjugate(st.conj, st.before) != st.small_c)
            throw Error("certificate conjugation fails at step " + std::to_string(i));
        bigint t = trace(st.before);
        if (5 * st.small_c.c * st.small_c.c > t * t)
            throw Error("certificate small-c bound fails at step " + std::to_string(i));
        if (st.small_c * upper_elem(st.k) != st.after)
            throw Error("certificate shear fails at step " + std::to_string(i));
        if (2 * abs(trace(st.after)) > abs(st.small_c.c))
            throw Error("certificate trace drop fails at step " + std::to_string(i));
        cur = st.after;
    }
    if (cert.final_matrix != cur) throw Error("certificate final matrix mismatch");
    if (abs(trace(cur)) > 2) throw Error("certificate does not reach |trace| <= 2");
}

std::string to_json(const TraceCertificate& cert) {
    nlohmann::json steps = nlohmann::json::array();
    for (const TraceCertStep& st : cert.steps) {
        nlohmann::json j;
        j["before"] = csv_matrix(st.before);
        j["conj"] = csv_matrix(st.conj);
        j["small_c"] = csv_matrix(st.small_c);
        j["k"] = st.k.str();
        j["after"] = csv_matrix(st.after);
        steps.push_back(std::move(j));
    }
    nlohmann::json j;
    j["steps"] = std::move(steps);
    j["final"] = csv_matrix(cert.final_matrix);
    j["depth"] = cert.depth();
    return j.dump(2);
}

const char* to_string(FactorTag t) {
    switch (t) {
        case FactorTag::Elliptic: return "elliptic";
        case FactorTag::Parabolic: return "parabolic";
        case FactorTag::Commutator: return "commutator";
    }
    return "?";
}

Mat2 RhoFactor::value() const {
    if (tag == FactorTag::Commutator) {
        const Mat2& a = parts[0];
        const Mat2& w = parts[1];
        return a * w * inverse(a) * inverse(w);
    }
    return parts[0];
}

RhoUpper rho_upper(const Mat2& g) {
    require_unimodular(g);
    std::vector<RhoFactor> factors;
    if (is_identity(g)) return {0, {}};

    bigint t = trace(g);
    if (g == -Mat2{} || abs(t) <= 2) {
        FactorTag tag = (abs(t) < 2 || g == -Mat2{}) ? FactorTag::Elliptic : FactorTag::Parabolic;
        factors.push_back({tag, {g}});
        return {1, std::move(factors)};
    }

    if (t < -2) {
        RhoUpper rest = rho_upper(-g);
        factors.push_back({FactorTag::Elliptic, {-Mat2{}}});
        for (RhoFactor& fct : rest.factors) factors.push_back(std::move(fct));
        Mat2 prod;
        for (const RhoFactor& fct : factors) prod = prod * fct.value();
        if (prod != g) throw Error("factor product mismatch");
        return {rest.upper + 1, std::move(factors)};
    }

    if (auto fac = commutator_presentation(g)) {
        factors.push_back(std::move(*fac));
        return {1, std::move(factors)};
    }

    // Nearest-integer reduction of the first column by parabolic row
    // operations: m -> E m with E a shear, until the corner vanishes.
    Mat2 m = g;
    std::vector<Mat2> left;
    int guard = 0;
    while (m.c != 0) {
        if (++guard > 4096) throw SearchExhausted("column reduction did not terminate");
        if (m.a == 0) {
            Mat2 e = upper_elem(1);
            m = e * m;
            left.push_back(e);
            continue;
        }
        bigint q, r;
        nearest_div(m.c, m.a, q, r);
        if (q != 0) {
            Mat2 e = lower_elem(-q);
            m = e * m;
            left.push_back(e);
            continue;
        }
        nearest_div(m.a, m.c, q, r);
        if (q == 0) throw Error("column reduction stalled");
        Mat2 e = upper_elem(-q);
        m = e * m;
        left.push_back(e);
    }
    for (const Mat2& e : left) factors.push_back({FactorTag::Parabolic, {inverse(e)}});
    if (m.a == 1) {
        if (m.b != 0) factors.push_back({FactorTag::Parabolic, {upper_elem(m.b)}});
    } else {
        // m == (-1 b; 0 -1) == -I * (1 -b; 0 1)
        factors.push_back({FactorTag::Elliptic, {-Mat2{}}});
        if (m.b != 0) factors.push_back({FactorTag::Parabolic, {upper_elem(-m.b)}});
    }
    Mat2 prod;
    for (const RhoFactor& fct : factors) prod = prod * fct.value();
    if (prod != g) throw Error("factor product mismatch");
    return {static_cast<long long>(factors.size()), std::move(factors)};
}

double rho_lower(const Mat2& g, double r_of_g, double dr_norm, double lip_const) {
    require_unimodular(g);
    if (!(dr_norm > 0.0)) throw Error("rho_lower needs dr_norm > 0");
    if (!(lip_const > 0.0)) throw Error("rho_lower needs lip_const > 0");
    if (!std::isfinite(r_of_g)) throw Error("rho_lower needs a finite r value");
    return std::abs(r_of_g) / (lip_const * dr_norm);
}

RhoBar rho_bar_kick_distance(const KickedSystemSpec& spec, long long n_max) {
    SequentialSystem sys = compose(spec, n_max);
    Mat2 ht = mat_pow(spec.h, spec.t);
    Mat2 ht_inv = inverse(ht);

    RhoBar out{0, {}};
    long long telescoped = 0;
    Mat2 hp_fwd;  // h^(nt)
    for (long long n = 1; n <= n_max; ++n) {
        hp_fwd = hp_fwd * ht;
        Mat2 quotient = sys.f(n) * inverse(hp_fwd);

        // f(n) h^(-nt) == kick(n) * prod_{i=1..n-1} h^(it) kick(n-i) h^(-it)
        Mat2 prod = sys.kick(n);
        Mat2 hpos;
        Mat2 hneg;
        for (long long i = 1; i < n; ++i) {
            hpos = hpos * ht;
            hneg = hneg * ht_inv;
            prod = prod * (hpos * sys.kick(n - i) * hneg);
        }
        if (prod != quotient) throw Error("telescoped kick identity failed at n = " + std::to_string(n));

        telescoped += rho_upper(sys.kick(n)).upper;
        long long direct = rho_upper(quotient).upper;
        long long bound = std::min(telescoped, direct);
        out.rows.push_back({n, telescoped, direct, bound});
        if (bound > out.sup) out.sup = bound;
    }
    return out;
}

}  // namespace catmix
