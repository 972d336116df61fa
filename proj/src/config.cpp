#include "yy/config.hpp"

#include "yy/baselines.hpp"
#include "yy/tf_parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace yy {

namespace {

std::string strip(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])) != 0) {
        ++a;
    }
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])) != 0) {
        --b;
    }
    return std::string(s.substr(a, b - a));
}

bool bare_key(const std::string& k) {
    if (k.empty()) {
        return false;
    }
    for (char c : k) {
        if (std::isalnum(static_cast<unsigned char>(c)) == 0 && c != '_' && c != '-') {
            return false;
        }
    }
    return true;
}

class ValueReader {
  public:
    ValueReader(std::string_view text, std::string key) : s_(text), key_(std::move(key)) {}

    TomlValue read() {
        ws();
        TomlValue v;
        if (at() == '"') {
            v = string();
        } else if (at() == '[') {
            ++p_;
            std::vector<std::string> items;
            ws();
            while (at() != ']') {
                if (at() != '"') {
                    fail("arrays may only hold strings");
                }
                items.push_back(string());
                ws();
                if (at() == ',') {
                    ++p_;
                    ws();
                } else if (at() != ']') {
                    fail("expected ',' or ']' in array");
                }
            }
            ++p_;
            v = std::move(items);
        } else {
            std::size_t e = p_;
            while (e < s_.size() && s_[e] != '#' && std::isspace(static_cast<unsigned char>(s_[e])) == 0) {
                ++e;
            }
            const std::string tok(s_.substr(p_, e - p_));
            p_ = e;
            v  = scalar(tok);
        }
        ws();
        if (p_ < s_.size() && s_[p_] != '#') {
            fail("unexpected trailing text");
        }
        return v;
    }

  private:
    std::string_view s_;
    std::string      key_;
    std::size_t      p_ = 0;

    [[noreturn]] void fail(const std::string& what) { throw ConfigError(key_, what); }
    char              at() const { return p_ < s_.size() ? s_[p_] : '\0'; }
    void              ws() {
        while (p_ < s_.size() && (s_[p_] == ' ' || s_[p_] == '\t')) {
            ++p_;
        }
    }

    std::string string() {
        ++p_;
        std::string out;
        while (true) {
            if (p_ >= s_.size()) {
                fail("unterminated string");
            }
            const char c = s_[p_++];
            if (c == '"') {
                return out;
            }
            if (c == '\\') {
                const char e = at();
                ++p_;
                switch (e) {
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    default: fail("unsupported escape sequence");
                }
            } else {
                out += c;
            }
        }
    }

    TomlValue scalar(const std::string& tok) {
        if (tok == "true") {
            return true;
        }
        if (tok == "false") {
            return false;
        }
        if (tok.empty()) {
            fail("missing value");
        }
        const char* b = tok.data();
        const char* e = tok.data() + tok.size();
        if (*b == '+') {
            ++b;
        }
        std::int64_t i   = 0;
        auto         ri  = std::from_chars(b, e, i);
        if (ri.ec == std::errc{} && ri.ptr == e) {
            return i;
        }
        double d  = 0.0;
        auto   rd = std::from_chars(b, e, d);
        if (rd.ec == std::errc{} && rd.ptr == e && std::isfinite(d)) {
            return d;
        }
        fail("cannot parse value '" + tok + "' (strings need double quotes)");
    }
};

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "problem.F",          "problem.H1",           "problem.H2",          "problem.h",
        "problem.N",          "problem.delay_steps",  "synthesis.num_taps",  "synthesis.tol",
        "synthesis.max_iterations", "synthesis.seed", "simulate.sim_rate_multiplier", "simulate.corpus",
        "simulate.corpus_size", "simulate.corpus_length", "simulate.sinc_truncation", "simulate.probes",
        "baseline.phi1",      "baseline.phi2",        "baseline.tail_length", "output.dir",
    };
    return keys;
}

class Fields {
  public:
    explicit Fields(std::map<std::string, TomlValue> v) : v_(std::move(v)) {}

    void str(const std::string& key, std::string& out) const {
        if (auto it = v_.find(key); it != v_.end()) {
            if (const auto* s = std::get_if<std::string>(&it->second)) {
                out = *s;
            } else {
                throw ConfigError(key, "expected a quoted string");
            }
        }
    }

    void real(const std::string& key, double& out) const {
        if (auto it = v_.find(key); it != v_.end()) {
            if (const auto* d = std::get_if<double>(&it->second)) {
                out = *d;
            } else if (const auto* i = std::get_if<std::int64_t>(&it->second)) {
                out = static_cast<double>(*i);
            } else {
                throw ConfigError(key, "expected a number");
            }
        }
    }

    template <class Int>
    void integer(const std::string& key, Int& out, std::int64_t lo, std::int64_t hi) const {
        if (auto it = v_.find(key); it != v_.end()) {
            const auto* i = std::get_if<std::int64_t>(&it->second);
            if (i == nullptr) {
                throw ConfigError(key, "expected an integer");
            }
            if (*i < lo || *i > hi) {
                throw ConfigError(key, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
            }
            out = static_cast<Int>(*i);
        }
    }

    void strings(const std::string& key, std::vector<std::string>& out) const {
        if (auto it = v_.find(key); it != v_.end()) {
            if (const auto* a = std::get_if<std::vector<std::string>>(&it->second)) {
                out = *a;
            } else {
                throw ConfigError(key, "expected an array of quoted strings");
            }
        }
    }

  private:
    std::map<std::string, TomlValue> v_;
};

ContinuousStateSpace parse_system(const std::string& key, const std::string& text) {
    try {
        return realize(parse_tf(text));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(key, e.what());
    }
}

}  // namespace

std::map<std::string, TomlValue> parse_toml(const std::string& text) {
    std::map<std::string, TomlValue> out;
    std::istringstream               in(text);
    std::string                      line, section;
    int                              lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = "line " + std::to_string(lineno);
        std::string       t     = strip(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        if (t[0] == '[') {
            const auto close = t.find(']');
            if (close == std::string::npos) {
                throw ConfigError("", where + ": unterminated section header");
            }
            const std::string rest = strip(std::string_view(t).substr(close + 1));
            if (!rest.empty() && rest[0] != '#') {
                throw ConfigError("", where + ": unexpected text after section header");
            }
            section = strip(std::string_view(t).substr(1, close - 1));
            if (!bare_key(section)) {
                throw ConfigError("", where + ": invalid section name");
            }
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("", where + ": expected key = value");
        }
        const std::string key = strip(std::string_view(t).substr(0, eq));
        if (!bare_key(key)) {
            throw ConfigError("", where + ": invalid key '" + key + "'");
        }
        const std::string full = section.empty() ? key : section + "." + key;
        if (out.count(full) != 0) {
            throw ConfigError(full, "duplicate key");
        }
        out[full] = ValueReader(std::string_view(t).substr(eq + 1), full).read();
    }
    return out;
}

JobConfig load_config_text(const std::string& text, const std::filesystem::path& base_dir) {
    auto values = parse_toml(text);
    for (const auto& [k, v] : values) {
        if (known_keys().count(k) == 0) {
            throw ConfigError(k, "unknown key");
        }
    }
    if (values.count("problem.F") == 0) {
        throw ConfigError("problem.F", "missing required key");
    }
    const Fields f(std::move(values));
    JobConfig    c;
    f.str("problem.F", c.F);
    f.str("problem.H1", c.H1);
    f.str("problem.H2", c.H2);
    f.real("problem.h", c.h);
    f.integer("problem.N", c.N, 1, 1024);
    f.integer("problem.delay_steps", c.delay_steps, 0, 1 << 20);
    f.integer("synthesis.num_taps", c.num_taps, 1, 4096);
    f.real("synthesis.tol", c.tol);
    f.integer("synthesis.max_iterations", c.max_iterations, 1, 100000);
    f.integer("synthesis.seed", c.seed, 0, std::numeric_limits<std::int64_t>::max());
    f.integer("simulate.sim_rate_multiplier", c.sim_rate_multiplier, 1, 1 << 16);
    f.integer("simulate.corpus_size", c.corpus_size, 1, 100000);
    f.integer("simulate.corpus_length", c.corpus_length, 1, 1 << 20);
    f.integer("simulate.sinc_truncation", c.sinc_truncation, 1, 1 << 20);
    f.integer("simulate.probes", c.probes, 1, 100000);
    std::vector<std::string> corpus;
    f.strings("simulate.corpus", corpus);
    f.str("baseline.phi1", c.phi1);
    f.str("baseline.phi2", c.phi2);
    f.integer("baseline.tail_length", c.tail_length, 0, 1 << 20);
    std::string dir = c.out_dir.string();
    f.str("output.dir", dir);
    c.out_dir = std::filesystem::path(dir).is_absolute() ? std::filesystem::path(dir) : base_dir / dir;

    for (const auto& [key, name] : {std::pair{"baseline.phi1", c.phi1}, std::pair{"baseline.phi2", c.phi2}}) {
        try {
            Kernel::from_name(name, 1.0);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(key, e.what());
        }
    }
    if (!(c.h > 0.0)) {
        throw ConfigError("problem.h", "must be positive");
    }
    if (!(c.tol > 0.0)) {
        throw ConfigError("synthesis.tol", "must be positive");
    }
    for (const auto& p : corpus) {
        std::filesystem::path path(p);
        c.corpus.push_back(path.is_absolute() ? path : base_dir / path);
    }
    if (c.fast_multiplier() % c.N != 0) {
        throw ConfigError("simulate.sim_rate_multiplier", "must be a multiple of N");
    }
    c.problem();
    return c;
}

JobConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("", "cannot read config file '" + path.string() + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return load_config_text(ss.str(), path.parent_path());
}

DesignProblem JobConfig::problem() const {
    DesignProblem p{parse_system("problem.F", F), parse_system("problem.H1", H1), parse_system("problem.H2", H2),
                    h, N, delay_steps};
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        const std::string name = msg.substr(0, msg.find(' '));
        throw ConfigError("problem." + name, msg);
    }
    return p;
}

}  // namespace yy
