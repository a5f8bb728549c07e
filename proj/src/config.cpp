#include "catmix/config.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "catmix/errors.hpp"

namespace catmix {

Config default_config() { return Config{}; }

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (const auto& [key, val] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw ParseError("config: unknown key \"" + key + "\" in " + where);
    }
}

}  // namespace

Config parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("config must be a JSON object");
    Config c;
    try {
        reject_unknown(j, {"engine", "mix", "growth", "seed"}, "top level");
        if (j.contains("engine")) {
            const auto& e = j["engine"];
            reject_unknown(e, {"tol", "sigma0", "retry_budget", "defect_sample",
                               "defect_word_len", "defect_seed"},
                           "engine");
            c.engine.tol = e.value("tol", c.engine.tol);
            c.engine.sigma0 = e.value("sigma0", c.engine.sigma0);
            c.engine.retry_budget = e.value("retry_budget", c.engine.retry_budget);
            c.engine.defect_sample = e.value("defect_sample", c.engine.defect_sample);
            c.engine.defect_word_len = e.value("defect_word_len", c.engine.defect_word_len);
            c.engine.defect_seed = e.value("defect_seed", c.engine.defect_seed);
        }
        if (j.contains("mix")) {
            const auto& m = j["mix"];
            reject_unknown(m, {"n_max", "cutoff"}, "mix");
            c.mix.n_max = m.value("n_max", c.mix.n_max);
            c.mix.cutoff = m.value("cutoff", c.mix.cutoff);
        }
        if (j.contains("growth")) {
            const auto& g = j["growth"];
            reject_unknown(g, {"lip_const"}, "growth");
            c.growth.lip_const = g.value("lip_const", c.growth.lip_const);
        }
        c.seed = j.value("seed", c.seed);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config JSON: ") + e.what());
    }
    if (!(c.engine.tol > 0.0)) throw ParseError("config: engine.tol must be > 0");
    if (c.engine.retry_budget < 0) throw ParseError("config: engine.retry_budget must be >= 0");
    if (c.mix.n_max < 1) throw ParseError("config: mix.n_max must be >= 1");
    if (c.mix.cutoff < 1) throw ParseError("config: mix.cutoff must be >= 1");
    if (!(c.growth.lip_const > 0.0)) throw ParseError("config: growth.lip_const must be > 0");
    return c;
}

Config load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_json(const Config& c) {
    nlohmann::json j;
    j["engine"]["tol"] = c.engine.tol;
    j["engine"]["sigma0"] = c.engine.sigma0;
    j["engine"]["retry_budget"] = c.engine.retry_budget;
    j["engine"]["defect_sample"] = c.engine.defect_sample;
    j["engine"]["defect_word_len"] = c.engine.defect_word_len;
    j["engine"]["defect_seed"] = c.engine.defect_seed;
    j["mix"]["n_max"] = c.mix.n_max;
    j["mix"]["cutoff"] = c.mix.cutoff;
    j["growth"]["lip_const"] = c.growth.lip_const;
    j["seed"] = c.seed;
    return j.dump(2) + "\n";
}

std::string config_hash(const Config& c) {
    std::string s = to_json(c);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace catmix
