#include "catmix/observable.hpp"

#include <json.hpp>

#include <cmath>

#include "catmix/errors.hpp"

namespace catmix {

void Observable::set(const Vec2& v, std::complex<double> a) {
    if (v.p == 0 && v.q == 0) throw Error("observable terms must have nonzero frequency");
    if (a == std::complex<double>{0.0, 0.0}) {
        terms_.erase(v);
        return;
    }
    terms_[v] = a;
}

bool Observable::real_valued() const {
    for (const auto& [v, a] : terms_) {
        auto it = terms_.find(-v);
        if (it == terms_.end()) return false;
        if (it->second != std::conj(a)) return false;
    }
    return true;
}

double Observable::norm2_sq() const {
    double s = 0.0;
    for (const auto& [v, a] : terms_) s += a.real() * a.real() + a.imag() * a.imag();
    return s;
}

double Observable::norm2() const { return std::sqrt(norm2_sq()); }

bigint Observable::max_freq_sq() const {
    bigint best = 0;
    for (const auto& [v, a] : terms_) {
        bigint s = norm_sq(v);
        if (s > best) best = s;
    }
    return best;
}

long long Observable::max_freq() const {
    bigint ms = max_freq_sq();
    bigint r = isqrt(ms);
    if (r * r < ms) r += 1;
    return static_cast<long long>(r);
}

Observable Observable::truncate(long long n) const {
    if (n < 0) throw Error("truncation cutoff must be nonnegative");
    Observable out;
    bigint cap = bigint(n) * n;
    for (const auto& [v, a] : terms_)
        if (norm_sq(v) <= cap) out.set(v, a);
    return out;
}

Observable parse_observable(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("observable JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array())
        throw ParseError("observable JSON needs a \"terms\" array");
    Observable f;
    try {
        for (const auto& t : j["terms"]) {
            const auto& v = t.at("v");
            if (!v.is_array() || v.size() != 2) throw ParseError("term frequency must be [p, q]");
            Vec2 freq{bigint(v[0].get<long long>()), bigint(v[1].get<long long>())};
            double re = t.value("re", 0.0);
            double im = t.value("im", 0.0);
            f.set(freq, {re, im});
        }
        if (j.contains("tail") && !j["tail"].is_null()) {
            const auto& t = j["tail"];
            ObservableTail tail{t.at("c_f").get<double>(), t.at("gamma").get<double>()};
            if (!(tail.c_f > 0.0) || !(tail.gamma > 0.0))
                throw ParseError("tail needs c_f > 0 and gamma > 0");
            f.tail = tail;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("observable JSON: ") + e.what());
    }
    return f;
}

std::string to_json(const Observable& f) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [v, a] : f.terms()) {
        nlohmann::json t;
        t["v"] = {static_cast<long long>(v.p), static_cast<long long>(v.q)};
        t["re"] = a.real();
        t["im"] = a.imag();
        terms.push_back(std::move(t));
    }
    nlohmann::json j;
    j["terms"] = std::move(terms);
    if (f.tail)
        j["tail"] = {{"c_f", f.tail->c_f}, {"gamma", f.tail->gamma}};
    else
        j["tail"] = nullptr;
    return j.dump();
}

}  // namespace catmix
