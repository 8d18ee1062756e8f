#pragma once

// Dataset emission: CSV tables with 17 significant digits, JSON sidecars and a checksummed manifest.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "affq/phase_space.hpp"

namespace affq::io {

using json = nlohmann::json;

/// printf("%.17g"): round-trips every double.
std::string format_double(double v);

/// Header "q,p,value" then one row per grid node, row-major (q outer, p inner).
std::string quasi_csv(const QuasiDistribution& d);
/// Named columns of equal length.
std::string columns_csv(const std::vector<std::string>& names, const std::vector<std::vector<double>>& columns);

json grid_json(const PhaseSpaceGrid& g);
/// {kind, grid, label, imag_residual, ...extra}.
json quasi_sidecar(const QuasiDistribution& d, const json& extra = json::object());

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Writes bytes to path (creating parent directories) and returns the path.
std::filesystem::path write_file(const std::filesystem::path& path, const std::string& bytes);

/// The list of emitted files with their checksums, plus the run configuration and tolerances.
class Manifest {
 public:
  explicit Manifest(std::filesystem::path dir) : dir_(std::move(dir)) {}
  /// Writes the file under the manifest directory and records it.
  void emit(const std::string& name, const std::string& bytes, const std::string& role);
  json& meta() { return meta_; }
  json to_json() const;
  /// Writes manifest.json into the directory and returns its path.
  std::filesystem::path write() const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  json files_ = json::array();
  json meta_ = json::object();
};

}  // namespace affq::io
