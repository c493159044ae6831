#include "lrl/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "lrl/errors.hpp"
#include "lrl/format.hpp"

namespace lrl {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string token;
    std::istringstream in(s);
    while (std::getline(in, token, sep)) out.push_back(trim(token));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

struct RawEntry {
    std::string value;
    int line;
    bool used = false;
};

class RawConfig {
  public:
    void insert(const std::string& key, const std::string& value, int line) {
        if (entries_.count(key)) throw ConfigError("duplicate key '" + key + "'", line);
        entries_[key] = {value, line, false};
    }

    const RawEntry* find(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    void check_all_used() const {
        for (const auto& [key, entry] : entries_)
            if (!entry.used) throw ConfigError("unknown key '" + key + "'", entry.line);
    }

  private:
    std::map<std::string, RawEntry> entries_;
};

double parse_double(const std::string& s, const std::string& key, int line) {
    std::string t = trim(s);
    if (t.empty()) throw ConfigError("empty value for " + key, line);
    const char* begin = t.c_str();
    if (*begin == '+') ++begin;
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, t.c_str() + t.size(), out);
    if (ec != std::errc{} || ptr != t.c_str() + t.size())
        throw ConfigError("expected a number for " + key + ", got '" + s + "'", line);
    return out;
}

std::int64_t parse_int(const std::string& s, const std::string& key, int line) {
    std::string t = trim(s);
    if (t.empty()) throw ConfigError("empty value for " + key, line);
    const char* begin = t.c_str();
    if (*begin == '+') ++begin;
    std::int64_t out = 0;
    const auto [ptr, ec] = std::from_chars(begin, t.c_str() + t.size(), out);
    if (ec != std::errc{} || ptr != t.c_str() + t.size())
        throw ConfigError("expected an integer for " + key + ", got '" + s + "'", line);
    return out;
}

// Complex literals: "1.5", "i", "-i", "2i", "1+2i", "0.5-1e-3i".
Complex parse_complex(const std::string& s, const std::string& key, int line) {
    std::string t = trim(s);
    if (t.empty()) throw ConfigError("empty complex value for " + key, line);
    if (t == "i" || t == "+i") return {0.0, 1.0};
    if (t == "-i") return {0.0, -1.0};

    const char* p = t.c_str();
    const char* end = t.c_str() + t.size();
    const auto read_double = [&](double& out) -> bool {
        const char* q = p;
        if (q != end && (*q == '+' || *q == '-')) ++q;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(q, end, v);
        if (ec != std::errc{} || ptr == q) return false;
        out = (q != p && *p == '-') ? -v : v;
        p = ptr;
        return true;
    };

    double first = 0.0;
    if (!read_double(first)) throw ConfigError("bad complex literal '" + s + "' for " + key, line);
    if (p == end) return {first, 0.0};
    if (std::string(p) == "i") return {0.0, first};
    double second = 0.0;
    if (std::string(p) == "+i" || std::string(p) == "-i") {
        return {first, *p == '+' ? 1.0 : -1.0};
    }
    if (!read_double(second) || std::string(p) != "i")
        throw ConfigError("bad complex literal '" + s + "' for " + key, line);
    return {first, second};
}

// A site literal is nu ':'-separated integer coordinates, each in (-L, L].
SiteIndex parse_site(const std::string& s, const TorusLattice& lat, const std::string& key,
                     int line) {
    const auto parts = split(s, ':');
    if (static_cast<int>(parts.size()) != lat.nu())
        throw ConfigError(key + ": site '" + s + "' needs " + std::to_string(lat.nu()) +
                              " coordinate(s)",
                          line);
    std::vector<int> coords(lat.nu());
    for (int j = 0; j < lat.nu(); ++j) {
        coords[j] = static_cast<int>(parse_int(parts[j], key, line));
        if (coords[j] <= -lat.half_side() || coords[j] > lat.half_side())
            throw ConfigError(key + ": site '" + s + "' lies outside the lattice (-L, L]", line);
    }
    return lat.index_of(coords);
}

void sort_generator(std::vector<SiteIndex>& sites, std::vector<Complex>& values,
                    const std::string& key, int line) {
    std::vector<std::size_t> order(sites.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sites[a] < sites[b]; });
    std::vector<SiteIndex> s2(sites.size());
    std::vector<Complex> v2(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        s2[i] = sites[order[i]];
        v2[i] = values[order[i]];
    }
    for (std::size_t i = 1; i < s2.size(); ++i)
        if (s2[i] == s2[i - 1]) throw ConfigError(key + ": duplicate support site", line);
    sites = std::move(s2);
    values = std::move(v2);
}

}  // namespace

std::vector<double> ExperimentConfig::schedule() const {
    std::vector<double> ts(t_steps);
    if (t_steps == 1) {
        ts[0] = t_min;
        return ts;
    }
    const double step = (t_max - t_min) / (t_steps - 1);
    for (int i = 0; i < t_steps; ++i) ts[i] = t_min + step * i;
    ts.back() = t_max;
    return ts;
}

AnharmonicSystem ExperimentConfig::make_system() const {
    std::optional<SiteSitePotential> site;
    std::optional<PairPotential> pair;
    if (kind == PotentialKind::gaussian_site) site = gaussian_site_potential(amplitude, width);
    if (kind == PotentialKind::gaussian_pair)
        pair = gaussian_pair_potential(amplitude, width, weight_mu);
    return AnharmonicSystem::make(make_lattice(), harmonic(), std::move(site), std::move(pair));
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    return parse_config(in);
}

ExperimentConfig parse_config(std::istream& in) {
    RawConfig raw;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'section.key = value'", lineno);
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.find('.') == std::string::npos)
            throw ConfigError("key '" + key + "' is missing its section prefix", lineno);
        raw.insert(key, value, lineno);
    }

    ExperimentConfig cfg;
    const auto get = [&](const char* key) { return raw.find(key); };

    if (const auto* e = get("lattice.nu")) cfg.nu = static_cast<int>(parse_int(e->value, "lattice.nu", e->line));
    if (const auto* e = get("lattice.L")) cfg.L = static_cast<int>(parse_int(e->value, "lattice.L", e->line));
    if (cfg.nu < 1) throw ConfigError("lattice.nu must be >= 1");
    if (cfg.L < 1) throw ConfigError("lattice.L must be >= 1");

    if (const auto* e = get("harmonic.omega")) cfg.omega = parse_double(e->value, "harmonic.omega", e->line);
    if (!(cfg.omega >= 0.0)) throw ConfigError("harmonic.omega must be nonnegative");
    if (const auto* e = get("harmonic.lambda")) {
        for (const auto& item : split(e->value, ','))
            cfg.lambda.push_back(parse_double(item, "harmonic.lambda", e->line));
        if (static_cast<int>(cfg.lambda.size()) != cfg.nu)
            throw ConfigError("harmonic.lambda must list exactly nu couplings", e->line);
        for (double l : cfg.lambda)
            if (!(l >= 0.0)) throw ConfigError("harmonic.lambda entries must be nonnegative", e->line);
    } else {
        cfg.lambda.assign(cfg.nu, 1.0);
    }

    if (const auto* e = get("potential.kind")) {
        if (e->value == "none") cfg.kind = PotentialKind::none;
        else if (e->value == "gaussian_site") cfg.kind = PotentialKind::gaussian_site;
        else if (e->value == "gaussian_pair") cfg.kind = PotentialKind::gaussian_pair;
        else throw ConfigError("potential.kind must be none|gaussian_site|gaussian_pair", e->line);
    }
    if (const auto* e = get("potential.amplitude")) cfg.amplitude = parse_double(e->value, "potential.amplitude", e->line);
    if (const auto* e = get("potential.width")) cfg.width = parse_double(e->value, "potential.width", e->line);
    if (const auto* e = get("potential.weight_mu")) cfg.weight_mu = parse_double(e->value, "potential.weight_mu", e->line);
    if (!(cfg.width > 0.0)) throw ConfigError("potential.width must be positive");
    if (!(cfg.weight_mu >= 0.0)) throw ConfigError("potential.weight_mu must be nonnegative");
    if (!std::isfinite(cfg.amplitude)) throw ConfigError("potential.amplitude must be finite");

    const TorusLattice lat(cfg.nu, cfg.L);

    const auto read_generator = [&](const char* skey, const char* vkey,
                                    std::vector<SiteIndex>& sites, std::vector<Complex>& values,
                                    SiteIndex default_site, Complex default_value) {
        const auto* se = get(skey);
        const auto* ve = get(vkey);
        if (se) {
            for (const auto& item : split(se->value, ','))
                sites.push_back(parse_site(item, lat, skey, se->line));
            if (ve) {
                for (const auto& item : split(ve->value, ','))
                    values.push_back(parse_complex(item, vkey, ve->line));
            } else {
                values.assign(sites.size(), {1.0, 0.0});
            }
            if (sites.size() != values.size())
                throw ConfigError(std::string(vkey) + " must list one value per support site",
                                  ve ? ve->line : se->line);
            sort_generator(sites, values, skey, se->line);
        } else {
            if (ve) throw ConfigError(std::string(vkey) + " given without " + skey, ve->line);
            sites = {default_site};
            values = {default_value};
        }
    };

    const SiteIndex origin = lat.index_of(std::vector<int>(cfg.nu, 0));
    const SiteIndex far_corner = lat.index_of(std::vector<int>(cfg.nu, cfg.L));
    read_generator("observables.f_support", "observables.f_values", cfg.f_support, cfg.f_values,
                   origin, {1.0, 0.0});
    read_generator("observables.g_support", "observables.g_values", cfg.g_support, cfg.g_values,
                   far_corner, {0.0, 1.0});

    if (const auto* e = get("schedule.t_min")) cfg.t_min = parse_double(e->value, "schedule.t_min", e->line);
    if (const auto* e = get("schedule.t_max")) cfg.t_max = parse_double(e->value, "schedule.t_max", e->line);
    if (const auto* e = get("schedule.t_steps")) cfg.t_steps = static_cast<int>(parse_int(e->value, "schedule.t_steps", e->line));
    if (cfg.t_steps < 1) throw ConfigError("schedule.t_steps must be >= 1");
    if (!(cfg.t_max >= cfg.t_min)) throw ConfigError("schedule.t_max must be >= schedule.t_min");
    if (cfg.t_steps > 1 && cfg.t_max == cfg.t_min)
        throw ConfigError("schedule.t_steps > 1 needs t_max > t_min");

    if (const auto* e = get("rates.mu")) cfg.mu = parse_double(e->value, "rates.mu", e->line);
    if (const auto* e = get("rates.epsilon")) cfg.epsilon = parse_double(e->value, "rates.epsilon", e->line);
    if (!(cfg.mu > 0.0)) throw ConfigError("rates.mu must be positive");
    if (!(cfg.epsilon > 0.0)) throw ConfigError("rates.epsilon must be positive");

    if (const auto* e = get("integrator.dt")) cfg.dt = parse_double(e->value, "integrator.dt", e->line);
    if (!(cfg.dt > 0.0)) throw ConfigError("integrator.dt must be positive");
    if (const auto* e = get("integrator.scheme")) {
        if (e->value == "leapfrog") cfg.scheme = Scheme::leapfrog;
        else if (e->value == "rk4") cfg.scheme = Scheme::rk4;
        else throw ConfigError("integrator.scheme must be leapfrog|rk4", e->line);
    }

    if (const auto* e = get("sampling.count")) cfg.count = static_cast<int>(parse_int(e->value, "sampling.count", e->line));
    if (const auto* e = get("sampling.amplitude")) cfg.sample_amplitude = parse_double(e->value, "sampling.amplitude", e->line);
    if (const auto* e = get("sampling.seed")) cfg.seed = static_cast<std::uint64_t>(parse_int(e->value, "sampling.seed", e->line));
    if (cfg.count < 1) throw ConfigError("sampling.count must be >= 1");
    if (!(cfg.sample_amplitude > 0.0)) throw ConfigError("sampling.amplitude must be positive");

    if (const auto* e = get("sweep.abs_tol")) cfg.abs_tol = parse_double(e->value, "sweep.abs_tol", e->line);
    if (!(cfg.abs_tol >= 0.0)) throw ConfigError("sweep.abs_tol must be nonnegative");

    if (const auto* e = get("output.path")) cfg.output_path = e->value;

    raw.check_all_used();
    return cfg;
}

namespace {

std::string site_string(const TorusLattice& lat, SiteIndex s) {
    std::string out;
    const auto coords = lat.site(s);
    for (int j = 0; j < lat.nu(); ++j) {
        if (j) out += ':';
        out += std::to_string(coords[j]);
    }
    return out;
}

std::string complex_string(Complex v) {
    if (v.imag() == 0.0) return format_number(v.real());
    std::string out;
    if (v.real() != 0.0) {
        out = format_number(v.real());
        if (v.imag() > 0.0) out += '+';
    }
    if (v.imag() == 1.0) return out + "i";
    if (v.imag() == -1.0) return out + "-i";
    return out + format_number(v.imag()) + "i";
}

}  // namespace

std::string ExperimentConfig::echo() const {
    const TorusLattice lat = make_lattice();
    std::ostringstream out;
    out << "lattice.nu = " << nu << "\nlattice.L = " << L << "\nharmonic.omega = "
        << format_number(omega) << "\nharmonic.lambda = ";
    for (std::size_t j = 0; j < lambda.size(); ++j)
        out << (j ? ", " : "") << format_number(lambda[j]);
    out << "\npotential.kind = "
        << (kind == PotentialKind::none
                ? "none"
                : kind == PotentialKind::gaussian_site ? "gaussian_site" : "gaussian_pair");
    if (kind != PotentialKind::none) {
        out << "\npotential.amplitude = " << format_number(amplitude)
            << "\npotential.width = " << format_number(width);
        if (kind == PotentialKind::gaussian_pair)
            out << "\npotential.weight_mu = " << format_number(weight_mu);
    }
    const auto dump_generator = [&](const char* name, const std::vector<SiteIndex>& sites,
                                    const std::vector<Complex>& values) {
        out << "\nobservables." << name << "_support = ";
        for (std::size_t i = 0; i < sites.size(); ++i)
            out << (i ? ", " : "") << site_string(lat, sites[i]);
        out << "\nobservables." << name << "_values = ";
        for (std::size_t i = 0; i < values.size(); ++i)
            out << (i ? ", " : "") << complex_string(values[i]);
    };
    dump_generator("f", f_support, f_values);
    dump_generator("g", g_support, g_values);
    out << "\nschedule.t_min = " << format_number(t_min)
        << "\nschedule.t_max = " << format_number(t_max) << "\nschedule.t_steps = " << t_steps
        << "\nrates.mu = " << format_number(mu) << "\nrates.epsilon = " << format_number(epsilon)
        << "\nintegrator.dt = " << format_number(dt)
        << "\nintegrator.scheme = " << (scheme == Scheme::leapfrog ? "leapfrog" : "rk4")
        << "\nsampling.count = " << count
        << "\nsampling.amplitude = " << format_number(sample_amplitude)
        << "\nsampling.seed = " << seed << "\nsweep.abs_tol = " << format_number(abs_tol)
        << "\noutput.path = " << output_path << "\n";
    return out.str();
}

}  // namespace lrl
