#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lamegap/boundary.hpp"
#include "lamegap/fem.hpp"
#include "lamegap/geometry.hpp"
#include "lamegap/lame.hpp"

namespace lamegap {

/// Flat dotted-key configuration: `section.key = value` lines, `#` comments,
/// bracketed arrays. Deterministic canonical dump for manifest hashing.
class Config {
  public:
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    void set(const std::string& key, const std::string& value);
    /// Applies a `key=value` override string.
    void apply_override(const std::string& kv);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& dflt) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double dflt) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int dflt) const;
    std::vector<double> get_list(const std::string& key) const;
    std::vector<double> get_list(const std::string& key, std::vector<double> dflt) const;

    std::string canonical_dump() const;
    std::uint64_t hash() const;

  private:
    std::map<std::string, std::string> kv_;
};

/// Builders with load-time validation; throw ConfigError naming the key.
GapProfile profile_from_config(const Config& cfg);
LameConstants lame_from_config(const Config& cfg);
BoundaryData boundary_from_config(const Config& cfg);
MeshParams mesh_params_from_config(const Config& cfg);

struct RunConfig {
    Config raw;
    GapProfile profile;
    LameConstants lame;
    BoundaryData phi;
    MeshParams mesh;
    std::vector<double> eps_list;
    double tol_abs = 1e-10;
    double tol_rel = 1e-8;
    std::string out_dir = ".";
    std::uint64_t seed = 20240101;
    int threads = 1;

    static RunConfig load(const std::string& path, const std::vector<std::string>& overrides);
    static RunConfig from_config(Config cfg);
};

/// Reproducibility sidecar written next to every CSV.
void write_manifest(const std::string& csv_path, const std::string& subcommand,
                    const RunConfig& cfg);

std::uint64_t fnv1a64(const std::string& s);

}  // namespace lamegap
