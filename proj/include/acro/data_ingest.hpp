#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "acro/core_types.hpp"

namespace acro {

using Json = nlohmann::ordered_json;

// Reads a whole file; throws MissingArtifactError if it does not exist.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Parses JSON text; syntax errors become ParseError with line/column context.
Json parse_json_text(std::string_view text, std::string_view source_name);

// Dataset records: {"id", "tokens", "acronym", "expansion"?}.
Sample sample_from_json(const Json& record, std::size_t position);
Json sample_to_json(const Sample& sample);

// Structural validation only (tokens, index range).
std::vector<Sample> parse_dataset(std::string_view text, std::string_view source_name = "<memory>");
// Structural validation plus gold-expansion membership against `dict`.
std::vector<Sample> parse_dataset(std::string_view text, const ExpansionDictionary& dict,
                                  std::string_view source_name = "<memory>");
std::vector<Sample> load_dataset(const std::filesystem::path& path);
std::vector<Sample> load_dataset(const std::filesystem::path& path, const ExpansionDictionary& dict);
std::string dump_dataset(const std::vector<Sample>& samples);
void save_dataset(const std::filesystem::path& path, const std::vector<Sample>& samples);

ExpansionDictionary parse_dictionary(std::string_view text, std::string_view source_name = "<memory>");
ExpansionDictionary load_dictionary(const std::filesystem::path& path);
std::string dump_dictionary(const ExpansionDictionary& dict);
void save_dictionary(const std::filesystem::path& path, const ExpansionDictionary& dict);

// TrainConfig as a JSON object whose keys are the field names. Parsing starts
// from defaults, overrides present keys, rejects unknown keys, and validates.
Json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const Json& j);
TrainConfig load_train_config(const std::filesystem::path& path);

struct CorpusStats {
  // number of acronyms in a sentence -> number of sentences
  std::map<std::size_t, std::size_t> acronyms_per_sentence;
  // number of dictionary expansions -> number of distinct acronyms
  // (key 0 collects acronyms absent from the dictionary)
  std::map<std::size_t, std::size_t> expansions_per_acronym;
  std::size_t total_samples = 0;
  std::size_t distinct_sentences = 0;
  std::size_t distinct_acronyms = 0;
  std::size_t distinct_expansions = 0;
};

CorpusStats compute_stats(const std::vector<Sample>& samples, const ExpansionDictionary& dict);
Json stats_to_json(const CorpusStats& stats);

// Minimal standalone SVG bar chart of a histogram.
std::string render_histogram_svg(const std::map<std::size_t, std::size_t>& histogram, std::string_view title,
                                 std::string_view x_label);

struct Split {
  std::vector<Sample> train;
  std::vector<Sample> dev;
};

// Stratified by acronym: every acronym with at least two samples keeps one in
// train. Output preserves input order within each part.
Split split(const std::vector<Sample>& samples, double dev_fraction, std::uint64_t seed);

}  // namespace acro
