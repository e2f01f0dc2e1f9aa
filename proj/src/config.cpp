#include "fbl/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fbl/csv.hpp"

namespace fbl::config {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: value for '" + key + "' is not a number: '" +
                                    value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size())
        throw std::invalid_argument("config: value for '" + key +
                                    "' is not an unsigned integer: '" + value + "'");
    return v;
}

}  // namespace

ParamBundle default_bundle() {
    ParamBundle b;
    b.channel.blocklength = 500;
    b.qos.delay_bound = 500.0;
    b.qos.delay_outage_prob = 1e-2;
    b.qos.arrival_rate = 1.0;
    b.power.zeta = 0.2;
    b.power.circuit_power = 0.2;
    b.power.buffer_mode = effcap::BufferMode::FullBuffer;
    return b;
}

void ParamBundle::validate() const {
    channel.validate();
    qos.validate();
    power.validate();
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("epsilon must lie in (0,1)");
    if (!(epsilon_t > 0.0 && epsilon_t < 1.0))
        throw std::invalid_argument("epsilon_t must lie in (0,1)");
    if (!std::isfinite(rho_db))
        throw std::invalid_argument("rho_db must be finite");
    if (!std::isfinite(rho_max_db))
        throw std::invalid_argument("rho_max_db must be finite");
    if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "n",      "theta",      "delta",  "lambda_out", "lambda", "zeta",
        "p_c",    "buffer",     "rho_db", "epsilon",    "rho_max_db",
        "epsilon_t", "seed",    "jobs"};
    return keys;
}

void apply_key_value(ParamBundle& b, const std::string& key, const std::string& value) {
    if (key == "n") {
        b.channel.blocklength = static_cast<int>(parse_double(key, value));
    } else if (key == "theta") {
        if (value.empty() || value == "auto")
            b.qos.theta.reset();
        else
            b.qos.theta = parse_double(key, value);
    } else if (key == "delta") {
        b.qos.delay_bound = parse_double(key, value);
    } else if (key == "lambda_out") {
        b.qos.delay_outage_prob = parse_double(key, value);
    } else if (key == "lambda") {
        b.qos.arrival_rate = parse_double(key, value);
    } else if (key == "zeta") {
        b.power.zeta = parse_double(key, value);
    } else if (key == "p_c") {
        b.power.circuit_power = parse_double(key, value);
    } else if (key == "buffer") {
        if (value == "full")
            b.power.buffer_mode = effcap::BufferMode::FullBuffer;
        else if (value == "ebp")
            b.power.buffer_mode = effcap::BufferMode::EmptyBufferAware;
        else
            throw std::invalid_argument("config: buffer must be 'full' or 'ebp', got '" +
                                        value + "'");
    } else if (key == "rho_db") {
        b.rho_db = parse_double(key, value);
    } else if (key == "epsilon") {
        b.epsilon = parse_double(key, value);
    } else if (key == "rho_max_db") {
        b.rho_max_db = parse_double(key, value);
    } else if (key == "epsilon_t") {
        b.epsilon_t = parse_double(key, value);
    } else if (key == "seed") {
        b.seed = parse_u64(key, value);
    } else if (key == "jobs") {
        b.jobs = static_cast<int>(parse_double(key, value));
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

ParamBundle parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open '" + path + "'");

    ParamBundle bundle = default_bundle();
    std::vector<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw std::invalid_argument("config: malformed section at line " +
                                            std::to_string(lineno));
            continue;  // sections are organizational only
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key=value at line " +
                                        std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            apply_key_value(bundle, key, value);
        } catch (const std::invalid_argument& ex) {
            throw std::invalid_argument(std::string(ex.what()) + " (line " +
                                        std::to_string(lineno) + ")");
        }
        seen.push_back(key);
    }
    // A config file must state the model completely; derived and runtime
    // knobs keep their defaults when absent.
    for (const char* required : {"n", "delta", "lambda_out", "lambda", "zeta", "p_c"}) {
        if (std::find(seen.begin(), seen.end(), required) == seen.end())
            throw std::invalid_argument("config: missing required key '" +
                                        std::string(required) + "'");
    }
    bundle.validate();
    return bundle;
}

std::string ParamBundle::normalized_text() const {
    std::ostringstream oss;
    oss << "buffer=" << (power.buffer_mode == effcap::BufferMode::EmptyBufferAware ? "ebp" : "full") << '\n'
        << "delta=" << csv::format_sig12(qos.delay_bound) << '\n'
        << "epsilon=" << csv::format_sig12(epsilon) << '\n'
        << "epsilon_t=" << csv::format_sig12(epsilon_t) << '\n'
        << "jobs=" << jobs << '\n'
        << "lambda=" << csv::format_sig12(qos.arrival_rate) << '\n'
        << "lambda_out=" << csv::format_sig12(qos.delay_outage_prob) << '\n'
        << "n=" << channel.blocklength << '\n'
        << "p_c=" << csv::format_sig12(power.circuit_power) << '\n'
        << "rho_db=" << csv::format_sig12(rho_db) << '\n'
        << "rho_max_db=" << csv::format_sig12(rho_max_db) << '\n'
        << "seed=" << seed << '\n'
        << "theta=" << (qos.theta ? csv::format_sig12(*qos.theta) : std::string("auto")) << '\n'
        << "zeta=" << csv::format_sig12(power.zeta) << '\n';
    return oss.str();
}

std::uint64_t ParamBundle::hash() const { return csv::fnv1a_hash(normalized_text()); }

}  // namespace fbl::config
