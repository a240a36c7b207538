#include "iwtl/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "iwtl/dataset.hpp"

namespace iwtl {

using nlohmann::json;

std::string manifest_to_json(const RunManifest& m) {
  json config;
  try {
    config = json::parse(m.config_json.empty() ? "{}" : m.config_json);
  } catch (const json::exception& e) {
    throw Error(std::string("manifest: config snapshot is not valid JSON: ") +
                e.what());
  }
  auto files = [](const std::vector<FileDigest>& v) {
    json arr = json::array();
    for (const FileDigest& f : v)
      arr.push_back(json{{"path", f.path}, {"digest", digest_hex(f.digest)}});
    return arr;
  };
  const json doc{{"schema_version", 1},
                 {"kind", "run_manifest"},
                 {"tool_version", m.tool_version},
                 {"command", m.command},
                 {"config", std::move(config)},
                 {"seeds", m.seeds},
                 {"inputs", files(m.inputs)},
                 {"outputs", files(m.outputs)}};
  return doc.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("manifest: invalid JSON: ") + e.what());
  }
  try {
    if (j.value("kind", "") != "run_manifest")
      throw Error("manifest: missing kind \"run_manifest\"");
    if (j.value("schema_version", 1) != 1)
      throw Error("manifest: unsupported schema_version");
    RunManifest m;
    m.tool_version = j.value("tool_version", std::string(kToolVersion));
    m.command = j.value("command", std::string());
    m.config_json = j.contains("config") ? j.at("config").dump(2) + "\n" : "{}";
    if (j.contains("seeds"))
      m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    auto files = [](const json& arr) {
      std::vector<FileDigest> out;
      for (const auto& f : arr) {
        FileDigest d;
        d.path = f.at("path").get<std::string>();
        const auto hex = f.at("digest").get<std::string>();
        const std::string prefix = "fnv1a:";
        if (hex.rfind(prefix, 0) != 0)
          throw Error("manifest: digest must start with \"fnv1a:\"");
        d.digest = std::stoull(hex.substr(prefix.size()), nullptr, 16);
        out.push_back(std::move(d));
      }
      return out;
    };
    if (j.contains("inputs")) m.inputs = files(j.at("inputs"));
    if (j.contains("outputs")) m.outputs = files(j.at("outputs"));
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("manifest: ") + e.what());
  }
}

std::uint64_t digest_file(const std::filesystem::path& path) {
  const std::string bytes = load_text_file(path);
  return fnv1a(bytes.data(), bytes.size());
}

std::string digest_hex(std::uint64_t digest) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a:%016llx",
                static_cast<unsigned long long>(digest));
  return buf;
}

std::string load_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof())
    throw Error("failed reading file: " + path.string());
  return std::move(buf).str();
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open file for writing: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("failed writing file: " + path.string());
}

}  // namespace iwtl
