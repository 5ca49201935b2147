#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace toda::cli {

/// An output file held in memory until the command has finished.
struct Artifact {
  std::string name;
  std::string content;
};

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& data);

/// Writes every artifact to a temporary file in `dir`, then renames them into
/// place. Nothing is renamed unless all temporaries were written.
void write_artifacts(const std::filesystem::path& dir, const std::vector<Artifact>& artifacts);

/// Single-file form of the same write-then-rename.
void write_atomically(const std::filesystem::path& path, const std::string& content);

/// "%.17g" formatting, so values round-trip through text.
std::string format_double(double x);

/// Run manifest: written with status "running" before the command starts and
/// rewritten with digests (or the error) when it ends.
class Manifest {
 public:
  Manifest(std::filesystem::path dir, nlohmann::json config, std::string version, std::size_t workers);

  void start();
  void complete(const std::vector<Artifact>& artifacts);
  void fail(const std::string& kind, const std::string& message);

 private:
  void write();

  std::filesystem::path dir_;
  nlohmann::json body_;
  double started_ = 0.0;
};

}  // namespace toda::cli
