#include "stscan/manifest.hpp"

#include <json.hpp>

#include "stscan/error.hpp"
#include "stscan/io.hpp"

namespace stscan {

std::string Manifest::to_json() const {
  using nlohmann::ordered_json;
  ordered_json j;
  j["tool"] = tool;
  j["version"] = version;
  j["command"] = command;
  j["args"] = args;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  j["config"] = cfg;
  ordered_json in = ordered_json::array();
  for (const auto& i : inputs) in.push_back({{"path", i.path}, {"fnv1a64", i.fnv1a64}});
  j["inputs"] = in;
  j["outputs"] = outputs;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

Manifest Manifest::from_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    Manifest m;
    m.tool = j.value("tool", "stscan");
    m.version = j.value("version", "");
    m.command = j.at("command").get<std::string>();
    m.args = j.at("args").get<std::vector<std::string>>();
    if (j.contains("config"))
      for (const auto& [k, v] : j["config"].items()) m.config.emplace_back(k, v.get<std::string>());
    if (j.contains("inputs"))
      for (const auto& i : j["inputs"]) m.inputs.push_back({i.at("path").get<std::string>(), i.at("fnv1a64").get<std::string>()});
    if (j.contains("outputs")) m.outputs = j["outputs"].get<std::vector<std::string>>();
    m.seed = j.value("seed", std::uint64_t{0});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
}

Manifest Manifest::read(const std::filesystem::path& path) { return from_json(io::read_file(path)); }

Manifest::Input hash_input(const std::filesystem::path& path) {
  return {path.string(), io::hex64(io::fnv1a64(io::read_file(path)))};
}

void verify_inputs(const Manifest& manifest) {
  for (const auto& i : manifest.inputs) {
    auto now = hash_input(i.path);
    if (now.fnv1a64 != i.fnv1a64) throw DataError("input changed since the manifest was written: " + i.path);
  }
}

}  // namespace stscan
