#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace iwtl {

inline constexpr const char* kToolVersion = "1.0.0";

struct FileDigest {
  std::string path;           // as recorded, relative to the manifest
  std::uint64_t digest = 0;   // FNV-1a over the file bytes
};

// Everything needed to reproduce one CLI invocation bit-exactly: the resolved
// configuration snapshot, the tool version, digests of file inputs and
// outputs, and the seed list the run consumed.
struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string command;      // "synth" | "weights" | "run"
  std::string config_json;  // resolved config as a JSON document
  std::vector<std::uint64_t> seeds;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text);

std::uint64_t digest_file(const std::filesystem::path& path);
std::string digest_hex(std::uint64_t digest);

std::string load_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

}  // namespace iwtl
