#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stscan {

/// Run record written next to every CLI output. Replaying args with the same
/// inputs reproduces the outputs byte for byte; there is deliberately no
/// timestamp so identical runs give identical manifests.
struct Manifest {
  struct Input {
    std::string path;
    std::string fnv1a64;
  };

  std::string tool = "stscan";
  std::string version;
  std::string command;
  std::vector<std::string> args;  ///< fully resolved arguments after the subcommand
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<Input> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;

  std::string to_json() const;
  static Manifest from_json(std::string_view text);
  static Manifest read(const std::filesystem::path& path);
};

Manifest::Input hash_input(const std::filesystem::path& path);

/// Throws DataError naming the first input whose content changed.
void verify_inputs(const Manifest& manifest);

}  // namespace stscan
