#include "mzphase/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace mzphase {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

SectionMap read_sections(const std::string& text, const std::string& origin) {
    SectionMap sections;
    std::istringstream in(text);
    std::string line;
    std::string current;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                std::ostringstream msg;
                msg << origin << ":" << lineno << ": unterminated section header";
                throw ConfigError(msg.str());
            }
            current = lower(trim(line.substr(1, line.size() - 2)));
            sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << origin << ":" << lineno << ": expected key = value";
            throw ConfigError(msg.str());
        }
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            std::ostringstream msg;
            msg << origin << ":" << lineno << ": empty key";
            throw ConfigError(msg.str());
        }
        sections[current][key] = value;
    }
    return sections;
}

class SectionReader {
public:
    SectionReader(const SectionMap& sections, std::string origin)
        : sections_(sections), origin_(std::move(origin)) {}

    bool has(const std::string& section, const std::string& key) const {
        const auto sec = sections_.find(section);
        return sec != sections_.end() && sec->second.count(key) > 0;
    }

    std::string raw(const std::string& section, const std::string& key) const {
        return sections_.at(section).at(key);
    }

    double number(const std::string& section, const std::string& key,
                  double fallback) const {
        if (!has(section, key)) return fallback;
        return parse_number(section, key, raw(section, key));
    }

    std::uint64_t unsigned_int(const std::string& section, const std::string& key,
                               std::uint64_t fallback) const {
        if (!has(section, key)) return fallback;
        const double v = parse_number(section, key, raw(section, key));
        if (v < 0.0 || v != std::floor(v)) {
            fail(section, key, "expected a non-negative integer");
        }
        return static_cast<std::uint64_t>(v);
    }

    std::string text(const std::string& section, const std::string& key,
                     const std::string& fallback) const {
        if (!has(section, key)) return fallback;
        return raw(section, key);
    }

    std::vector<double> number_list(const std::string& section,
                                    const std::string& key) const {
        std::vector<double> out;
        if (!has(section, key)) return out;
        std::istringstream in(raw(section, key));
        std::string item;
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            out.push_back(parse_number(section, key, item));
        }
        return out;
    }

    [[noreturn]] void fail(const std::string& section, const std::string& key,
                           const std::string& what) const {
        std::ostringstream msg;
        msg << origin_ << ": [" << section << "] " << key << ": " << what;
        throw ConfigError(msg.str());
    }

    void check_known(const std::map<std::string, std::vector<std::string>>& schema) const {
        for (const auto& [section, keys] : sections_) {
            const auto it = schema.find(section);
            if (it == schema.end()) {
                std::ostringstream msg;
                msg << origin_ << ": unknown section [" << section << "]";
                throw ConfigError(msg.str());
            }
            for (const auto& [key, value] : keys) {
                (void)value;
                if (std::find(it->second.begin(), it->second.end(), key) ==
                    it->second.end()) {
                    fail(section, key, "unknown key");
                }
            }
        }
    }

private:
    double parse_number(const std::string& section, const std::string& key,
                        const std::string& value) const {
        try {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            if (used != value.size()) fail(section, key, "trailing characters");
            return v;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            fail(section, key, "not a number: '" + value + "'");
        }
    }

    const SectionMap& sections_;
    std::string origin_;
};

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
    const SectionMap sections = read_sections(text, origin);
    const SectionReader reader(sections, origin);
    reader.check_known({
        {"", {}},
        {"probe", {"alpha1", "alpha2", "r"}},
        {"truth", {"phi_s", "phi_d"}},
        {"lo", {"mode", "k1", "k2", "k", "theta1", "theta2"}},
        {"run", {"nu", "repetitions", "seed", "threads"}},
        {"sweep", {"axis", "values"}},
        {"outputs", {"directory", "formats"}},
        {"combo", {"weight_s", "weight_d"}},
    });

    ScenarioConfig cfg;
    cfg.probe.alpha1 = reader.number("probe", "alpha1", cfg.probe.alpha1);
    cfg.probe.alpha2 = reader.number("probe", "alpha2", cfg.probe.alpha2);
    cfg.probe.r = reader.number("probe", "r", cfg.probe.r);

    cfg.truth.phi_s = reader.number("truth", "phi_s", cfg.truth.phi_s);
    cfg.truth.phi_d = reader.number("truth", "phi_d", cfg.truth.phi_d);

    const std::string mode = lower(reader.text("lo", "mode", "tuned"));
    if (mode == "tuned") {
        cfg.lo.tuned = true;
    } else if (mode == "explicit") {
        cfg.lo.tuned = false;
    } else {
        reader.fail("lo", "mode", "expected 'tuned' or 'explicit'");
    }
    if (reader.has("lo", "k")) {
        cfg.lo.k1 = cfg.lo.k2 = reader.number("lo", "k", 0.25);
    }
    cfg.lo.k1 = reader.number("lo", "k1", cfg.lo.k1);
    cfg.lo.k2 = reader.number("lo", "k2", cfg.lo.k2);
    cfg.lo.theta1 = reader.number("lo", "theta1", cfg.lo.theta1);
    cfg.lo.theta2 = reader.number("lo", "theta2", cfg.lo.theta2);
    if (!cfg.lo.tuned && !(reader.has("lo", "theta1") && reader.has("lo", "theta2"))) {
        reader.fail("lo", "theta1", "explicit mode requires theta1 and theta2");
    }

    cfg.run.nu = reader.unsigned_int("run", "nu", cfg.run.nu);
    cfg.run.repetitions = reader.unsigned_int("run", "repetitions", cfg.run.repetitions);
    cfg.run.seed = reader.unsigned_int("run", "seed", cfg.run.seed);
    cfg.run.threads =
        static_cast<unsigned>(reader.unsigned_int("run", "threads", cfg.run.threads));
    if (cfg.run.nu == 0) reader.fail("run", "nu", "must be >= 1");
    if (cfg.run.repetitions < 2) reader.fail("run", "repetitions", "must be >= 2");

    const std::string axis = lower(reader.text("sweep", "axis", "none"));
    if (axis == "none" || axis.empty()) {
        cfg.sweep.axis = SweepAxis::none;
    } else if (axis == "nu") {
        cfg.sweep.axis = SweepAxis::nu;
    } else if (axis == "n") {
        cfg.sweep.axis = SweepAxis::total_photons;
    } else {
        reader.fail("sweep", "axis", "expected 'nu', 'N' or 'none'");
    }
    cfg.sweep.values = reader.number_list("sweep", "values");
    if (cfg.sweep.axis != SweepAxis::none) {
        if (cfg.sweep.values.empty()) {
            reader.fail("sweep", "values", "sweep requires a non-empty value list");
        }
        for (std::size_t i = 0; i < cfg.sweep.values.size(); ++i) {
            if (cfg.sweep.values[i] <= 0.0) {
                reader.fail("sweep", "values", "values must be positive");
            }
            if (i > 0 && cfg.sweep.values[i] <= cfg.sweep.values[i - 1]) {
                reader.fail("sweep", "values", "values must be strictly increasing");
            }
        }
    }

    cfg.outputs.directory = reader.text("outputs", "directory", cfg.outputs.directory);
    if (reader.has("outputs", "formats")) {
        cfg.outputs.csv = cfg.outputs.metadata = cfg.outputs.plots = false;
        std::istringstream in(reader.raw("outputs", "formats"));
        std::string item;
        while (std::getline(in, item, ',')) {
            const std::string fmt = lower(trim(item));
            if (fmt == "csv") {
                cfg.outputs.csv = true;
            } else if (fmt == "meta" || fmt == "metadata" || fmt == "json") {
                cfg.outputs.metadata = true;
            } else if (fmt == "svg" || fmt == "plots") {
                cfg.outputs.plots = true;
            } else if (!fmt.empty()) {
                reader.fail("outputs", "formats", "unknown format '" + fmt + "'");
            }
        }
    }

    if (reader.has("combo", "weight_s") || reader.has("combo", "weight_d")) {
        cfg.combo_weights = std::make_pair(reader.number("combo", "weight_s", 0.0),
                                           reader.number("combo", "weight_d", 0.0));
    }
    return cfg;
}

ScenarioConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.string());
}

}  // namespace mzphase
