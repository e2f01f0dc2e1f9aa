#pragma once

// Flat key=value configuration with optional [section] headers.  Every key
// can also be supplied as a command-line flag of the same name; explicit
// flags override file values.

#include <cstdint>
#include <string>
#include <vector>

#include "fbl/effcap.hpp"

namespace fbl::config {

inline constexpr std::uint64_t kDefaultSeed = 123456789ULL;
inline constexpr const char* kToolVersion = "fbeee 0.1.0";

struct ParamBundle {
    channel::ChannelConfig channel;  // n
    effcap::QosConfig qos;           // theta, delta, lambda_out, lambda
    effcap::PowerModelConfig power;  // zeta, p_c, buffer
    double rho_db = 10.0;            // operating SNR for pointwise commands
    double epsilon = 1e-3;           // operating error probability
    double rho_max_db = 10.0;        // solver power cap
    double epsilon_t = 1e-3;         // solver error-probability cap
    std::uint64_t seed = kDefaultSeed;
    int jobs = 1;

    void validate() const;  // throws std::invalid_argument naming the field

    // Canonical sorted key=value text and its FNV-1a hash (provenance).
    std::string normalized_text() const;
    std::uint64_t hash() const;
};

// Defaults match the reference scenario: n=500, delta=500 symbols,
// lambda_out=1e-2, lambda=1 bpcu, zeta=0.2, P_c=0.2 W, rho_max=10 dB,
// epsilon_t=1e-3, full buffer.
ParamBundle default_bundle();

// Applies one key=value pair; throws std::invalid_argument for unknown keys
// or malformed values.
void apply_key_value(ParamBundle& bundle, const std::string& key,
                     const std::string& value);

// Known keys, in canonical order (used by the CLI to register flags).
const std::vector<std::string>& known_keys();

// Parses a config file; errors carry the line number, validation errors the
// violated field.
ParamBundle parse_config(const std::string& path);

}  // namespace fbl::config
