#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "acro/data_ingest.hpp"

namespace acro::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kInvalidInput = 2,
  kMissingArtifact = 3,
  kDivergence = 4,
};

// Written to <out>/manifest.json before a command does any real work.
struct RunManifest {
  std::string command;
  Json config;
  std::vector<std::pair<std::string, std::string>> input_digests;  // path, sha256
  std::uint64_t seed = 0;
  std::string version;
  std::vector<std::string> outputs;

  Json to_json() const;
};

std::string sha256_hex(std::string_view bytes);
// Throws MissingArtifactError if the file is absent.
std::string file_sha256(const std::filesystem::path& path);

std::string_view artifact_version();

// Runs one command. argv[0] is the program name. Never throws; failures map
// to the exit codes above with a message on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace acro::cli
