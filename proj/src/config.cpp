#include "lamegap/config.hpp"

#include <fstream>
#include <sstream>

#include "lamegap/version.hpp"

namespace lamegap {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

Config Config::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
    if (key.empty()) throw ConfigError("empty config key");
    kv_[key] = value;
}

void Config::apply_override(const std::string& kvs) {
    const auto eq = kvs.find('=');
    if (eq == std::string::npos) throw ConfigError("override must be key=value: " + kvs);
    set(trim(kvs.substr(0, eq)), trim(kvs.substr(eq + 1)));
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& dflt) const {
    return has(key) ? get_string(key) : dflt;
}

double Config::get_double(const std::string& key) const {
    try {
        return std::stod(get_string(key));
    } catch (const std::invalid_argument&) {
        throw ConfigError("config key is not a number: " + key);
    }
}

double Config::get_double(const std::string& key, double dflt) const {
    return has(key) ? get_double(key) : dflt;
}

int Config::get_int(const std::string& key) const {
    try {
        return std::stoi(get_string(key));
    } catch (const std::invalid_argument&) {
        throw ConfigError("config key is not an integer: " + key);
    }
}

int Config::get_int(const std::string& key, int dflt) const {
    return has(key) ? get_int(key) : dflt;
}

std::vector<double> Config::get_list(const std::string& key) const {
    std::string v = get_string(key);
    if (!v.empty() && v.front() == '[') v = v.substr(1);
    if (!v.empty() && v.back() == ']') v.pop_back();
    std::vector<double> out;
    std::string item;
    std::istringstream is(v);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::invalid_argument&) {
            throw ConfigError("config list entry is not a number: " + key);
        }
    }
    if (out.empty()) throw ConfigError("config list is empty: " + key);
    return out;
}

std::vector<double> Config::get_list(const std::string& key, std::vector<double> dflt) const {
    return has(key) ? get_list(key) : dflt;
}

std::string Config::canonical_dump() const {
    std::ostringstream os;
    for (const auto& [k, v] : kv_) os << k << " = " << v << "\n";
    return os.str();
}

std::uint64_t Config::hash() const { return fnv1a64(canonical_dump()); }

GapProfile profile_from_config(const Config& cfg) {
    const int d = cfg.get_int("geometry.dimension");
    const int m = cfg.get_int("geometry.m");
    const double R = cfg.get_double("geometry.R");
    const double eps = cfg.get_double("geometry.epsilon");
    if (d < 2) throw ConfigError("geometry.dimension must be >= 2");
    if (m < 2) throw ConfigError("geometry.m must be >= 2");
    if (!(eps > 0)) throw ConfigError("geometry.epsilon must be positive");
    const std::string kind = cfg.get_string("geometry.profile.kind", "power");

    GapProfile p;
    if (kind == "power") {
        const auto c = cfg.get_list("geometry.profile.coefficients", {1.0});
        p = make_power_profile(d, m, c.at(0), R, eps,
                               cfg.get_double("geometry.kappa1", c.at(0)),
                               cfg.get_double("geometry.kappa2", c.at(0)));
    } else if (kind == "polynomial") {
        const auto powers_d = cfg.get_list("geometry.profile.powers");
        const auto coeffs = cfg.get_list("geometry.profile.coefficients");
        std::vector<int> powers;
        for (double x : powers_d) powers.push_back(static_cast<int>(std::lround(x)));
        p.d = d;
        p.m = m;
        p.R = R;
        p.eps = eps;
        p.h = make_zero_surface();
        p.h1 = make_radial_poly_surface(powers, coeffs);
        p.kappa1 = cfg.get_double("geometry.kappa1");
        p.kappa2 = cfg.get_double("geometry.kappa2");
        p.kappa3 = cfg.get_double("geometry.kappa3", 10.0);
        p.kappa4 = cfg.get_double("geometry.kappa4", 20.0);
        p.tau0 = cfg.get_double("geometry.tau0", 0.0);
    } else if (kind == "disks") {
        if (d != 2) throw ConfigError("geometry.profile.kind=disks is two-dimensional");
        p = make_disk_profile(cfg.get_double("geometry.profile.r1", 0.5),
                              cfg.get_double("geometry.profile.r0", 1.0), R, eps);
    } else {
        throw ConfigError("geometry.profile.kind must be power, polynomial or disks");
    }
    if (cfg.has("geometry.kappa3")) p.kappa3 = cfg.get_double("geometry.kappa3");
    if (cfg.has("geometry.kappa4")) p.kappa4 = cfg.get_double("geometry.kappa4");
    if (cfg.has("geometry.tau0")) p.tau0 = cfg.get_double("geometry.tau0");

    // load-time spot checks
    const int np = d - 1;
    VectorXd probe = VectorXd::Constant(np, R / std::sqrt(double(np)));
    const double gap = p.h1->value(probe) - p.h->value(probe);
    if (!(gap > 0)) throw ConfigError("geometry: gap envelope fails at the spot check point");
    if (m == 2) {
        try {
            principal_relative_curvatures(p);
        } catch (const GeometryError& e) {
            throw ConfigError(std::string("geometry: ") + e.what());
        }
    }
    return p;
}

LameConstants lame_from_config(const Config& cfg) {
    LameConstants lame;
    lame.lambda = cfg.get_double("material.lambda", 1.0);
    lame.mu = cfg.get_double("material.mu", 1.0);
    lame.kappa5 = cfg.get_double("material.kappa5", 0.0);
    lame.validate(cfg.get_int("geometry.dimension", 2));
    return lame;
}

BoundaryData boundary_from_config(const Config& cfg) {
    const int d = cfg.get_int("geometry.dimension");
    const std::string fam = cfg.get_string("boundary.family", "E1");
    const double eta = cfg.get_double("boundary.eta", 1.0);
    const int k = cfg.get_int("boundary.k", 2);
    if (fam == "E1") return make_family(Family::E1, eta, k, d);
    if (fam == "E2") return make_family(Family::E2, eta, k, d);
    if (fam == "E3") return make_family(Family::E3, eta, k, d);
    if (fam == "custom") {
        // per-component monomial tables: boundary.custom.comp<i> = [c, p1, ..  ]
        std::vector<SurfacePtr> comps;
        for (int i = 1; i <= d; ++i) {
            const std::string key = "boundary.custom.comp" + std::to_string(i);
            if (!cfg.has(key)) {
                comps.push_back(make_zero_surface());
                continue;
            }
            const auto flat = cfg.get_list(key);
            const int np = d - 1;
            if (flat.size() % (np + 1) != 0)
                throw ConfigError(key + ": expected groups of coefficient plus " +
                                  std::to_string(np) + " exponents");
            std::vector<double> coeffs;
            std::vector<std::vector<int>> expo;
            for (std::size_t g = 0; g < flat.size(); g += np + 1) {
                coeffs.push_back(flat[g]);
                std::vector<int> e(np);
                for (int j = 0; j < np; ++j) e[j] = static_cast<int>(std::lround(flat[g + 1 + j]));
                expo.push_back(e);
            }
            comps.push_back(make_monomial_surface(np, coeffs, expo));
        }
        auto phi = make_custom_boundary(d, comps);
        phi.eta = eta;
        phi.k = k;
        return phi;
    }
    throw ConfigError("boundary.family must be E1, E2, E3 or custom");
}

MeshParams mesh_params_from_config(const Config& cfg) {
    MeshParams mp;
    mp.n_layers = cfg.get_int("execution.n_layers", 8);
    mp.angular_res = cfg.get_double("execution.angular_res", 32.0);
    mp.r_gap = cfg.get_double("geometry.R", 0.2);
    return mp;
}

RunConfig RunConfig::from_config(Config cfg) {
    RunConfig rc;
    rc.raw = cfg;
    rc.profile = profile_from_config(cfg);
    rc.lame = lame_from_config(cfg);
    rc.phi = boundary_from_config(cfg);
    rc.mesh = mesh_params_from_config(cfg);
    rc.eps_list = cfg.get_list("execution.eps_list", {rc.profile.eps});
    for (double e : rc.eps_list)
        if (!(e > 0)) throw ConfigError("execution.eps_list entries must be positive");
    rc.tol_abs = cfg.get_double("execution.tol_abs", 1e-10);
    rc.tol_rel = cfg.get_double("execution.tol_rel", 1e-8);
    rc.out_dir = cfg.get_string("execution.out_dir", ".");
    rc.seed = static_cast<std::uint64_t>(cfg.get_double("execution.seed", 20240101));
    rc.threads = cfg.get_int("execution.threads", 1);
    return rc;
}

RunConfig RunConfig::load(const std::string& path, const std::vector<std::string>& overrides) {
    Config cfg = Config::from_file(path);
    for (const auto& ov : overrides) cfg.apply_override(ov);
    return from_config(cfg);
}

void write_manifest(const std::string& csv_path, const std::string& subcommand,
                    const RunConfig& cfg) {
    std::ofstream os(csv_path + ".manifest");
    if (!os) throw ConfigError("cannot write manifest next to " + csv_path);
    os << "lamegap " << kVersion << "\n";
    os << "subcommand = " << subcommand << "\n";
    os << "config_hash = " << std::hex << cfg.raw.hash() << std::dec << "\n";
    os << "tol_abs = " << cfg.tol_abs << "\n";
    os << "tol_rel = " << cfg.tol_rel << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "--- config ---\n" << cfg.raw.canonical_dump();
}

}  // namespace lamegap
