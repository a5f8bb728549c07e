#include "catmix/cli_core.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <complex>
#include <fstream>
#include <sstream>

#include "catmix/config.hpp"
#include "catmix/errors.hpp"
#include "catmix/euclid.hpp"
#include "catmix/growth.hpp"
#include "catmix/int2x2.hpp"
#include "catmix/mixing.hpp"
#include "catmix/observable.hpp"
#include "catmix/qmorph.hpp"
#include "catmix/quadform.hpp"

namespace catmix {

namespace {

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string header_text(const Config& c) {
    return "# catmix " + std::string(kVersion) + "\n# config " + config_hash(c) + "\n# seed " +
           std::to_string(c.seed) + "\n";
}

nlohmann::json header_json(const Config& c) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["config"] = config_hash(c);
    j["seed"] = c.seed;
    return j;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --kicks accepts "FILE" (explicit list), "periodic:FILE", or "seeded:FILE"
// (alphabet). An absent flag means the unkicked system. The declared trace
// bound is the largest |trace| over the supplied matrices.
KickedSystemSpec make_kick_spec(const Mat2& h, long long t, const std::string& kicks_flag,
                                std::uint64_t seed) {
    KickedSystemSpec spec;
    spec.h = h;
    spec.t = t;
    spec.seed = seed;
    if (kicks_flag.empty()) {
        spec.mode = KickMode::Periodic;
        spec.kicks = {Mat2{}};
        spec.trace_bound = 2;
        return spec;
    }
    std::string path = kicks_flag;
    if (kicks_flag.rfind("periodic:", 0) == 0) {
        spec.mode = KickMode::Periodic;
        path = kicks_flag.substr(9);
    } else if (kicks_flag.rfind("seeded:", 0) == 0) {
        spec.mode = KickMode::Seeded;
        path = kicks_flag.substr(7);
    } else {
        spec.mode = KickMode::Explicit;
    }
    spec.kicks = parse_kick_lines(read_file(path));
    if (spec.kicks.empty()) throw ParseError("kick file is empty: " + path);
    bigint bound = 2;
    for (const Mat2& k : spec.kicks)
        if (abs(trace(k)) > bound) bound = abs(trace(k));
    spec.trace_bound = bound;
    return spec;
}

QmParams engine_params(const Config& c) {
    QmParams p;
    p.sigma0 = c.engine.sigma0;
    p.tau = c.engine.tol;
    p.retry_budget = c.engine.retry_budget;
    p.defect_sample = c.engine.defect_sample;
    p.defect_word_len = c.engine.defect_word_len;
    p.defect_seed = c.engine.defect_seed;
    return p;
}

std::string do_classify(const Config& c, const std::string& mtext) {
    Mat2 m = parse_matrix(mtext);
    MatClass cls = classify(m);
    std::string s = header_text(c);
    s += "matrix: " + to_string(m) + "\n";
    s += "class: " + std::string(to_string(cls)) + "\n";
    s += "trace: " + trace(m).str() + "\n";
    if (cls == MatClass::Hyperbolic) {
        ConjugacyToInverse civ = is_conjugate_to_inverse(m);
        s += "conjugate_to_inverse: " + std::string(civ.conjugate ? "true" : "false") + "\n";
        s += "method: " +
             std::string(civ.method == ConjugacyMethod::SymmetricShortcut ? "SymmetricShortcut"
                                                                          : "ReductionCycle") +
             "\n";
        s += "witness: " + (civ.witness ? to_string(*civ.witness) : std::string("none")) + "\n";
        s += "cycle_steps: " + std::to_string(civ.cycle_steps) + "\n";
        std::string pc;
        try {
            pc = prime_criterion(m) == PrimeCriterionResult::NotConjugate ? "NotConjugate"
                                                                          : "Inconclusive";
        } catch (const FactorizationTimeout&) {
            pc = "FactorizationTimeout";
        }
        s += "prime_criterion: " + pc + "\n";
    } else {
        s += "conjugate_to_inverse: n/a (requires a hyperbolic matrix)\n";
    }
    return s;
}

std::string do_mix(const Config& c, const Mat2& h, long long t, long long n_max,
                   const std::string& kicks_flag, const std::string& obs_path) {
    Observable f = parse_observable(read_file(obs_path));
    KickedSystemSpec spec = make_kick_spec(h, t, kicks_flag, c.seed);
    SequentialSystem sys = compose(spec, n_max);

    std::string s = header_text(c);
    s += "# kick_mode " + std::string(to_string(spec.mode)) + "\n";
    s += "n,min_expansion,corr_re,corr_im,corr_abs,tail_bound\n";
    std::vector<std::pair<long long, double>> series;
    long long cutoff_n = f.tail ? f.max_freq() : 0;
    for (long long n = 1; n <= n_max; ++n) {
        MinExpansion me = min_expansion(sys.f(n), c.mix.cutoff);
        std::complex<double> z;
        double tail = 0.0;
        if (f.tail) {
            HolderBound hb = correlation_bound_holder(f, sys.f(n), cutoff_n);
            z = hb.exact_head;
            tail = hb.tail_bound;
        } else {
            z = correlation(f, f, sys.f(n));
        }
        double cabs = std::abs(z);
        series.emplace_back(n, cabs);
        s += std::to_string(n) + "," + fmt(me.value) + "," + fmt(z.real()) + "," + fmt(z.imag()) +
             "," + fmt(cabs) + "," + fmt(tail) + "\n";
    }

    Observable head = f.tail ? f.truncate(cutoff_n) : f;
    ZeroTime zt = zero_time(head, sys);
    s += "# zero_time " + (zt.reached ? std::to_string(zt.n0) : std::string("NotReached")) + "\n";
    try {
        DecayFit fit = decay_fit(series);
        s += "# rate " + fmt(fit.rate + 0.0) + "\n";
        s += "# r2 " + fmt(fit.r2) + "\n";
        s += "# fit_points " + std::to_string(fit.points_used) + "\n";
        s += "# fit_zeros_excluded " + std::to_string(fit.zeros_excluded) + "\n";
    } catch (const AllZeroSeries&) {
        s += "# rate n/a (all correlations exactly zero)\n";
    } catch (const Error& e) {
        s += "# rate n/a (" + std::string(e.what()) + ")\n";
    }
    return s;
}

std::string do_qm(const Config& c, const Mat2& h, const std::string& gtext, long long n_max) {
    QmEngine eng = QmEngine::build(h, engine_params(c));
    Mat2 g = parse_matrix(gtext);
    HomEstimate est = eng.r_hom(g, n_max);
    nlohmann::json j = header_json(c);
    j["h"] = to_string(eng.base());
    j["g"] = to_string(g);
    j["n_max"] = est.n_used;
    j["estimate"] = est.estimate;
    j["error_bar"] = est.error_bar;
    j["d_hat"] = eng.defect_bound();
    j["sigma"] = eng.sigma();
    j["translation_length"] = eng.translation_length();
    j["defect_sample"] = {{"size", c.engine.defect_sample},
                          {"word_len", c.engine.defect_word_len},
                          {"value", eng.defect_estimate(c.engine.defect_sample,
                                                        c.engine.defect_word_len,
                                                        c.engine.defect_seed)}};
    return j.dump(2) + "\n";
}

std::string do_growth(const Config& c, const std::string& ftext, const std::string& htext,
                      long long n_max) {
    Mat2 f = parse_matrix(ftext);
    TraceCertificate cert = trace_certificate(f);
    nlohmann::json j = header_json(c);
    j["certificate"] = nlohmann::json::parse(to_json(cert));
    if (!htext.empty()) {
        QmEngine eng = QmEngine::build(parse_matrix(htext), engine_params(c));
        HomEstimate est = eng.r_hom(f, n_max);
        TraceBoundResult tb = trace_bound_check(f, est.estimate, eng.defect_bound());
        j["trace_bound"] = {{"r_of_f", est.estimate}, {"dr_norm", eng.defect_bound()},
                            {"lhs", tb.lhs},          {"rhs", tb.rhs},
                            {"holds", tb.holds}};
    }
    return j.dump(2) + "\n";
}

std::string do_rho_element(const Config& c, const std::string& gtext, const std::string& htext,
                           long long n_max) {
    Mat2 g = parse_matrix(gtext);
    RhoUpper ru = rho_upper(g);
    nlohmann::json j = header_json(c);
    j["g"] = to_string(g);
    j["upper"] = ru.upper;
    nlohmann::json factors = nlohmann::json::array();
    for (const RhoFactor& fc : ru.factors) {
        nlohmann::json fj;
        fj["tag"] = to_string(fc.tag);
        nlohmann::json parts = nlohmann::json::array();
        for (const Mat2& p : fc.parts) parts.push_back(to_string(p));
        fj["parts"] = std::move(parts);
        fj["value"] = to_string(fc.value());
        factors.push_back(std::move(fj));
    }
    j["factors"] = std::move(factors);
    if (!htext.empty()) {
        QmEngine eng = QmEngine::build(parse_matrix(htext), engine_params(c));
        HomEstimate est = eng.r_hom(g, n_max);
        double lower = rho_lower(g, est.estimate, eng.defect_bound(), c.growth.lip_const);
        j["lower"] = {{"value", lower},
                      {"r_of_g", est.estimate},
                      {"dr_norm", eng.defect_bound()},
                      {"lip_const", c.growth.lip_const}};
    }
    return j.dump(2) + "\n";
}

std::string do_rho_sweep(const Config& c, const Mat2& h, long long t, long long n_max,
                         const std::string& kicks_flag) {
    KickedSystemSpec spec = make_kick_spec(h, t, kicks_flag, c.seed);
    RhoBar rb = rho_bar_kick_distance(spec, n_max);
    std::string s = header_text(c);
    s += "# kick_mode " + std::string(to_string(spec.mode)) + "\n";
    s += "n,telescoped,direct,bound\n";
    for (const RhoBarRow& r : rb.rows)
        s += std::to_string(r.n) + "," + std::to_string(r.telescoped) + "," +
             std::to_string(r.direct) + "," + std::to_string(r.bound) + "\n";
    s += "# sup " + std::to_string(rb.sup) + "\n";
    return s;
}

std::string do_decompose(const Config& c, const std::string& vtext) {
    Vec2 v = parse_vector(vtext);
    ElementaryWord w = decompose_primitive(v);
    Vec2 check = Vec2{0, 1} * word_matrix(w);
    if (check != v) throw Error("decomposition failed its reconstruction check");
    nlohmann::json j = header_json(c);
    j["v"] = to_string(v);
    nlohmann::json word = nlohmann::json::array();
    for (const ElementaryFactor& fc : w) {
        word.push_back({{"side", fc.side == Side::Upper ? "U" : "L"}, {"k", fc.k.str()}});
    }
    j["word"] = std::move(word);
    j["length"] = w.size();
    j["matrix"] = to_string(word_matrix(w));
    j["reconstructed"] = true;
    return j.dump(2) + "\n";
}

void deliver(const std::string& content, const std::string& out_path, std::string& out) {
    if (out_path.empty()) {
        out += content;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw Error("cannot open output file: " + out_path);
    f << content;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::string& out, std::string& err) {
    CLI::App app{"exact-arithmetic experiments with integer cat maps"};
    app.name("catmix");
    app.require_subcommand(0, 1);
    // --h is a domain flag, so the short help alias has to go
    app.set_help_flag("--help", "print this help message and exit");

    bool print_defaults = false;
    app.add_flag("--print-defaults", print_defaults, "print the default config and exit");
    std::string config_path;
    app.add_option("--config", config_path, "config file (JSON)");

    struct SubOpts {
        std::string h, g, kicks, obs, out_path;
        long long t = 1, n_max = -1;
        std::uint64_t seed = 0;
        bool seed_set = false, tol_set = false;
        double tol = 0.0;
    };
    SubOpts o;

    auto add_common = [&](CLI::App* sc, bool with_h) {
        sc->set_help_flag("--help", "print this help message and exit");
        if (with_h) sc->add_option("--h", o.h, "base matrix \"a,b,c,d\"");
        sc->add_option("--t", o.t, "power of the base map per step");
        sc->add_option("--nmax", o.n_max, "range of n (or homogenization power)");
        sc->add_option("--kicks", o.kicks, "kick file, or periodic:FILE / seeded:FILE");
        sc->add_option("--obs", o.obs, "observable JSON file");
        sc->add_option("--seed", o.seed, "seed for seeded kick draws")
            ->each([&](const std::string&) { o.seed_set = true; });
        sc->add_option("--engine-tol", o.tol, "walk tolerance override")
            ->each([&](const std::string&) { o.tol_set = true; });
        sc->add_option("--out", o.out_path, "write the report to this file");
    };

    CLI::App* sc_classify = app.add_subcommand("classify", "conjugacy class report for one matrix");
    std::string classify_m;
    sc_classify->add_option("matrix", classify_m, "matrix \"a,b,c,d\"")->required();
    add_common(sc_classify, false);

    CLI::App* sc_mix = app.add_subcommand("mix", "correlation and expansion sweep");
    add_common(sc_mix, true);

    CLI::App* sc_qm = app.add_subcommand("qm", "quasi-morphism evaluation");
    std::string qm_g;
    sc_qm->add_option("g", qm_g, "matrix to evaluate")->required();
    add_common(sc_qm, true);

    CLI::App* sc_growth = app.add_subcommand("growth", "trace descent certificate");
    std::string growth_f;
    sc_growth->add_option("f", growth_f, "hyperbolic matrix")->required();
    add_common(sc_growth, true);

    CLI::App* sc_rho = app.add_subcommand("rho", "factor-distance bounds");
    std::string rho_g;
    sc_rho->add_option("g", rho_g, "matrix to bound (omit for a kicked sweep)");
    add_common(sc_rho, true);

    CLI::App* sc_dec = app.add_subcommand("decompose", "elementary word for a primitive vector");
    std::string dec_v;
    sc_dec->add_option("v", dec_v, "vector \"p,q\"")->required();
    add_common(sc_dec, false);

    std::vector<const char*> argv;
    argv.push_back("catmix");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out += app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err += std::string(e.what()) + "\n";
        return 2;
    }

    try {
        Config cfg = config_path.empty() ? default_config() : load_config_file(config_path);
        if (o.seed_set) cfg.seed = o.seed;
        if (o.tol_set) cfg.engine.tol = o.tol;

        if (print_defaults) {
            out += to_json(default_config());
            return 0;
        }
        if (app.get_subcommands().empty()) {
            err += app.help();
            return 2;
        }

        auto need_h = [&]() {
            if (o.h.empty()) throw ParseError("this command needs --h");
            return parse_matrix(o.h);
        };

        if (sc_classify->parsed()) {
            deliver(do_classify(cfg, classify_m), o.out_path, out);
        } else if (sc_mix->parsed()) {
            if (o.obs.empty()) throw ParseError("mix needs --obs");
            long long n = o.n_max > 0 ? o.n_max : cfg.mix.n_max;
            deliver(do_mix(cfg, need_h(), o.t, n, o.kicks, o.obs), o.out_path, out);
        } else if (sc_qm->parsed()) {
            long long n = o.n_max > 0 ? o.n_max : 128;
            deliver(do_qm(cfg, need_h(), qm_g, n), o.out_path, out);
        } else if (sc_growth->parsed()) {
            long long n = o.n_max > 0 ? o.n_max : 128;
            deliver(do_growth(cfg, growth_f, o.h, n), o.out_path, out);
        } else if (sc_rho->parsed()) {
            long long n = o.n_max > 0 ? o.n_max : (rho_g.empty() ? cfg.mix.n_max : 128);
            if (rho_g.empty())
                deliver(do_rho_sweep(cfg, need_h(), o.t, n, o.kicks), o.out_path, out);
            else
                deliver(do_rho_element(cfg, rho_g, o.h, n), o.out_path, out);
        } else if (sc_dec->parsed()) {
            deliver(do_decompose(cfg, dec_v), o.out_path, out);
        }
        return 0;
    } catch (const ParseError& e) {
        err += std::string("error: ") + e.what() + "\n";
        return 2;
    } catch (const NotUnimodular& e) {
        err += std::string("error: ") + e.what() + "\n";
        return 2;
    } catch (const NumericallyAmbiguous& e) {
        err += std::string("error: ") + e.what() + "\n";
        return 4;
    } catch (const Error& e) {
        err += std::string("error: ") + e.what() + "\n";
        return 3;
    } catch (const std::exception& e) {
        err += std::string("unexpected error: ") + e.what() + "\n";
        return 1;
    }
}

}  // namespace catmix
