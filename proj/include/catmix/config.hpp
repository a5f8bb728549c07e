#pragma once

#include <cstdint>
#include <string>

namespace catmix {

inline constexpr const char* kVersion = "0.1.0";

// Resolved experiment configuration. Every report embeds kVersion, the hash
// of the fully resolved config, and the seed, so a report can always be
// traced back to the exact run that produced it.
struct Config {
    struct Engine {
        double tol{1e-9};
        double sigma0{1.0};
        int retry_budget{8};
        int defect_sample{48};
        int defect_word_len{12};
        std::uint64_t defect_seed{0x5eed};
    } engine;

    struct Mix {
        long long n_max{24};
        long long cutoff{10};
    } mix;

    struct Growth {
        double lip_const{4.0};
    } growth;

    std::uint64_t seed{0};
};

Config default_config();

// JSON with nested sections; unknown keys are rejected so typos fail loudly.
Config parse_config(const std::string& text);
Config load_config_file(const std::string& path);

// Stable serialization (sorted keys) used both for printing defaults and as
// the hashing preimage.
std::string to_json(const Config& c);

// FNV-1a over to_json(c), printed as 16 hex digits.
std::string config_hash(const Config& c);

}  // namespace catmix
