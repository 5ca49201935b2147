#include "toda_cli/artifacts.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

namespace toda::cli {

namespace fs = std::filesystem;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path temporary_for(const fs::path& target) {
  return target.parent_path() / ("." + target.filename().string() + ".tmp" + std::to_string(::getpid()));
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  os.close();
  if (!os) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

void write_artifacts(const fs::path& dir, const std::vector<Artifact>& artifacts) {
  fs::create_directories(dir);
  std::vector<fs::path> temporaries;
  try {
    for (const auto& a : artifacts) {
      temporaries.push_back(temporary_for(dir / a.name));
      write_file(temporaries.back(), a.content);
    }
  } catch (...) {
    std::error_code ignored;
    for (const auto& t : temporaries) fs::remove(t, ignored);
    throw;
  }
  for (std::size_t i = 0; i < artifacts.size(); ++i) fs::rename(temporaries[i], dir / artifacts[i].name);
}

void write_atomically(const fs::path& path, const std::string& content) {
  const auto tmp = temporary_for(path);
  write_file(tmp, content);
  fs::rename(tmp, path);
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Manifest::Manifest(fs::path dir, nlohmann::json config, std::string version, std::size_t workers)
    : dir_(std::move(dir)) {
  body_["artifact_version"] = std::move(version);
  body_["command"] = config.at("command");
  body_["master_seed"] = config.at("seed");
  body_["workers"] = workers;
  body_["config"] = std::move(config);
}

void Manifest::start() {
  started_ = now_seconds();
  body_["status"] = "running";
  body_["started_utc"] = utc_timestamp();
  body_["outputs"] = nlohmann::json::object();
  write();
}

void Manifest::complete(const std::vector<Artifact>& artifacts) {
  body_["status"] = "complete";
  for (const auto& a : artifacts) body_["outputs"][a.name] = sha256_hex(a.content);
  body_["wall_seconds"] = now_seconds() - started_;
  write();
}

void Manifest::fail(const std::string& kind, const std::string& message) {
  body_["status"] = "failed";
  body_["error"] = {{"kind", kind}, {"message", message}};
  body_["wall_seconds"] = now_seconds() - started_;
  write();
}

void Manifest::write() {
  fs::create_directories(dir_);
  write_atomically(dir_ / "manifest.json", body_.dump(2) + "\n");
}

}  // namespace toda::cli
