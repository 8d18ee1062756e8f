#include "affq/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

#include "affq/error.hpp"

namespace affq::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quasi_csv(const QuasiDistribution& d) {
  std::string s = "q,p,value\n";
  const auto& qs = d.grid.q_nodes;
  const auto& ps = d.grid.p_nodes;
  for (std::size_t i = 0; i < qs.size(); ++i)
    for (std::size_t j = 0; j < ps.size(); ++j) {
      s += format_double(qs[i]);
      s += ',';
      s += format_double(ps[j]);
      s += ',';
      s += format_double(d.values[i * ps.size() + j]);
      s += '\n';
    }
  return s;
}

std::string columns_csv(const std::vector<std::string>& names, const std::vector<std::vector<double>>& columns) {
  if (names.size() != columns.size()) throw ConfigError("columns_csv: names and columns differ in count");
  const std::size_t rows = columns.empty() ? 0 : columns[0].size();
  for (const auto& c : columns)
    if (c.size() != rows) throw ConfigError("columns_csv: columns differ in length");
  std::string s;
  for (std::size_t k = 0; k < names.size(); ++k) s += (k ? "," : "") + names[k];
  s += '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (k) s += ',';
      s += format_double(columns[k][r]);
    }
    s += '\n';
  }
  return s;
}

json grid_json(const PhaseSpaceGrid& g) {
  return {{"nq", g.q_nodes.size()},
          {"np", g.p_nodes.size()},
          {"qmin", g.q_nodes.empty() ? 0.0 : g.q_nodes.front()},
          {"qmax", g.q_nodes.empty() ? 0.0 : g.q_nodes.back()},
          {"pmin", g.p_nodes.empty() ? 0.0 : g.p_nodes.front()},
          {"pmax", g.p_nodes.empty() ? 0.0 : g.p_nodes.back()},
          {"q_spacing", "geometric"},
          {"p_spacing", "uniform"}};
}

json quasi_sidecar(const QuasiDistribution& d, const json& extra) {
  json j = {{"kind", to_string(d.kind)}, {"grid", grid_json(d.grid)}, {"label", d.label}, {"imag_residual", d.imag_residual}};
  for (const auto& [k, v] : extra.items()) j[k] = v;
  return j;
}

std::string sha256_hex(const std::string& bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
    throw Error("sha256: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(bytes);
}

std::filesystem::path write_file(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << bytes;
  if (!out) throw ConfigError("write failed for " + path.string());
  return path;
}

void Manifest::emit(const std::string& name, const std::string& bytes, const std::string& role) {
  write_file(dir_ / name, bytes);
  files_.push_back({{"name", name}, {"role", role}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
}

json Manifest::to_json() const {
  json j = meta_;
  j["files"] = files_;
  return j;
}

std::filesystem::path Manifest::write() const {
  return write_file(dir_ / "manifest.json", to_json().dump(2) + "\n");
}

}  // namespace affq::io
