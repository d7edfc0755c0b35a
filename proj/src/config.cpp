#include "pqsd/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace pqsd {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

double to_double(const std::string& origin, const Entry& e, const std::string& key) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(e.value, &pos);
    } catch (const std::exception&) {
        fail(origin, e.line, "expected a number for '" + key + "', got '" + e.value + "'");
    }
    if (pos != e.value.size())
        fail(origin, e.line, "trailing characters in number for '" + key + "'");
    return v;
}

long to_long(const std::string& origin, const Entry& e, const std::string& key) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(e.value, &pos);
    } catch (const std::exception&) {
        fail(origin, e.line, "expected an integer for '" + key + "', got '" + e.value + "'");
    }
    if (pos != e.value.size())
        fail(origin, e.line, "trailing characters in integer for '" + key + "'");
    return v;
}

std::uint64_t to_u64(const std::string& origin, const Entry& e, const std::string& key) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(e.value, &pos);
    } catch (const std::exception&) {
        fail(origin, e.line,
             "expected an unsigned integer for '" + key + "', got '" + e.value + "'");
    }
    if (pos != e.value.size())
        fail(origin, e.line, "trailing characters in integer for '" + key + "'");
    return static_cast<std::uint64_t>(v);
}

bool to_bool(const std::string& origin, const Entry& e, const std::string& key) {
    if (e.value == "true" || e.value == "1" || e.value == "yes" || e.value == "on") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no" || e.value == "off") return false;
    fail(origin, e.line, "expected a boolean for '" + key + "', got '" + e.value + "'");
}

std::vector<cplx> to_amplitudes(const std::string& origin, const Entry& e, const std::string& key) {
    std::istringstream iss(e.value);
    std::vector<cplx> out;
    cplx c;
    while (iss >> c) out.push_back(c);
    if (!iss.eof())
        fail(origin, e.line, "bad amplitude list for '" + key + "'; entries are real numbers or (re,im) pairs");
    if (out.empty()) fail(origin, e.line, "empty amplitude list for '" + key + "'");
    return out;
}

ModelFamily to_family(const std::string& origin, const Entry& e) {
    if (e.value == "two_level") return ModelFamily::TwoLevel;
    if (e.value == "qutrit") return ModelFamily::Qutrit;
    if (e.value == "multi_level") return ModelFamily::MultiLevel;
    fail(origin, e.line,
         "unknown model.family '" + e.value + "' (expected two_level, qutrit or multi_level)");
}

const char* const kSections[] = {"model", "correlation", "pulse", "run", "analytic", "pq", "output"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const std::vector<cplx>& amps) {
    std::string s;
    for (const cplx& a : amps) {
        if (!s.empty()) s += ' ';
        s += '(' + fmt(a.real()) + ',' + fmt(a.imag()) + ')';
    }
    return s;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    std::map<std::string, Entry> entries;
    std::istringstream in(text);
    std::string raw, section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto cut = raw.find_first_of("#;");
        std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(origin, lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            bool known = false;
            for (const char* s : kSections) known = known || section == s;
            if (!known) fail(origin, lineno, "unknown section '[" + section + "]'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(origin, lineno, "expected 'key = value'");
        if (section.empty()) fail(origin, lineno, "key outside any [section]");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) fail(origin, lineno, "empty key");
        const std::string full = section + "." + key;
        if (entries.count(full)) fail(origin, lineno, "duplicate key '" + full + "'");
        entries[full] = Entry{trim(line.substr(eq + 1)), lineno, false};
    }

    auto take = [&](const char* key) -> Entry* {
        auto it = entries.find(key);
        if (it == entries.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    };

    RunConfig cfg;
    if (const Entry* e = take("model.family")) cfg.model.family = to_family(origin, *e);
    if (const Entry* e = take("model.omega")) cfg.model.omega = to_double(origin, *e, "model.omega");
    if (const Entry* e = take("model.kappa")) cfg.model.kappa = to_double(origin, *e, "model.kappa");
    if (const Entry* e = take("model.N"))
        cfg.model.N = static_cast<int>(to_long(origin, *e, "model.N"));
    if (const Entry* e = take("correlation.Gamma"))
        cfg.corr.Gamma = to_double(origin, *e, "correlation.Gamma");
    if (const Entry* e = take("correlation.gamma"))
        cfg.corr.gamma = to_double(origin, *e, "correlation.gamma");
    if (const Entry* e = take("pulse.enabled")) cfg.pulse.enabled = to_bool(origin, *e, "pulse.enabled");
    if (const Entry* e = take("pulse.tau")) cfg.pulse.tau = to_double(origin, *e, "pulse.tau");
    if (const Entry* e = take("pulse.delta")) cfg.pulse.delta = to_double(origin, *e, "pulse.delta");
    if (const Entry* e = take("pulse.psi")) cfg.pulse.psi = to_double(origin, *e, "pulse.psi");
    if (const Entry* e = take("run.t_end")) cfg.t_end = to_double(origin, *e, "run.t_end");
    if (const Entry* e = take("run.dt")) cfg.dt = to_double(origin, *e, "run.dt");
    if (const Entry* e = take("run.n_traj")) cfg.n_traj = to_long(origin, *e, "run.n_traj");
    if (const Entry* e = take("run.master_seed"))
        cfg.master_seed = to_u64(origin, *e, "run.master_seed");
    if (const Entry* e = take("run.initial_state"))
        cfg.initial_state = to_amplitudes(origin, *e, "run.initial_state");
    if (const Entry* e = take("analytic.enabled"))
        cfg.analytic_enabled = to_bool(origin, *e, "analytic.enabled");
    if (const Entry* e = take("analytic.coarsen")) {
        const long c = to_long(origin, *e, "analytic.coarsen");
        if (c < 1) fail(origin, e->line, "analytic.coarsen must be >= 1");
        cfg.analytic_coarsen = static_cast<std::size_t>(c);
    }
    if (const Entry* e = take("pq.p_basis")) cfg.pq_p_basis = to_amplitudes(origin, *e, "pq.p_basis");
    if (const Entry* e = take("output.directory")) cfg.output_directory = e->value;
    if (const Entry* e = take("output.label")) cfg.output_label = e->value;

    for (const auto& [key, e] : entries)
        if (!e.used) fail(origin, e.line, "unknown key '" + key + "'");

    try {
        cfg.validate();
    } catch (const std::exception& ex) {
        throw ConfigError(origin + ": " + ex.what());
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

void RunConfig::validate() const {
    model.validate();
    corr.validate();
    if (pulse.enabled) pulse.validate();
    if (!(t_end > 0)) throw ConfigError("run.t_end must be positive");
    if (!(dt > 0) || dt >= t_end) throw ConfigError("run.dt must satisfy 0 < dt < t_end");
    if (n_traj < 2) throw ConfigError("run.n_traj must be >= 2");
    if (analytic_coarsen < 1) throw ConfigError("analytic.coarsen must be >= 1");
    const auto dim = static_cast<std::size_t>(model.dimension());
    if (!initial_state.empty() && initial_state.size() != dim)
        throw ConfigError("run.initial_state has " + std::to_string(initial_state.size()) +
                          " amplitudes; model dimension is " + std::to_string(dim));
    if (!pq_p_basis.empty() && pq_p_basis.size() != dim)
        throw ConfigError("pq.p_basis has " + std::to_string(pq_p_basis.size()) +
                          " amplitudes; model dimension is " + std::to_string(dim));
    if (output_label.empty() || output_label.find('/') != std::string::npos)
        throw ConfigError("output.label must be a non-empty file-name fragment");
}

TimeGrid RunConfig::make_grid() const {
    if (pulse.enabled) return aligned_grid(pulse, t_end, dt);
    return TimeGrid::uniform(0.0, t_end, dt);
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "[model]\n";
    os << "family = "
       << (cfg.model.family == ModelFamily::TwoLevel
               ? "two_level"
               : cfg.model.family == ModelFamily::Qutrit ? "qutrit" : "multi_level")
       << "\n";
    os << "omega = " << fmt(cfg.model.omega) << "\n";
    if (cfg.model.family == ModelFamily::Qutrit) os << "kappa = " << fmt(cfg.model.kappa) << "\n";
    if (cfg.model.family == ModelFamily::MultiLevel) os << "N = " << cfg.model.N << "\n";
    os << "\n[correlation]\n";
    os << "Gamma = " << fmt(cfg.corr.Gamma) << "\n";
    os << "gamma = " << fmt(cfg.corr.gamma) << "\n";
    os << "\n[pulse]\n";
    os << "enabled = " << (cfg.pulse.enabled ? "true" : "false") << "\n";
    if (cfg.pulse.enabled) {
        os << "tau = " << fmt(cfg.pulse.tau) << "\n";
        os << "delta = " << fmt(cfg.pulse.delta) << "\n";
        os << "psi = " << fmt(cfg.pulse.psi) << "\n";
    }
    os << "\n[run]\n";
    os << "t_end = " << fmt(cfg.t_end) << "\n";
    os << "dt = " << fmt(cfg.dt) << "\n";
    os << "n_traj = " << cfg.n_traj << "\n";
    os << "master_seed = " << cfg.master_seed << "\n";
    if (!cfg.initial_state.empty()) os << "initial_state = " << fmt(cfg.initial_state) << "\n";
    os << "\n[analytic]\n";
    os << "enabled = " << (cfg.analytic_enabled ? "true" : "false") << "\n";
    os << "coarsen = " << cfg.analytic_coarsen << "\n";
    if (!cfg.pq_p_basis.empty()) os << "\n[pq]\np_basis = " << fmt(cfg.pq_p_basis) << "\n";
    os << "\n[output]\n";
    os << "directory = " << cfg.output_directory << "\n";
    os << "label = " << cfg.output_label << "\n";
    return os.str();
}

}  // namespace pqsd
