#pragma once

#include <cstdint>
#include <vector>

#include "acro/core_types.hpp"

namespace acro {

// Toy corpus generator. Every expansion owns a few cue words; a sentence for
// gold expansion e holds the acronym, filler words, and cues of e. With
// cue_noise 0 the corpus is separable by construction.
struct SyntheticSpec {
  int acronyms = 5;
  int min_expansions = 2;
  int max_expansions = 3;
  int samples = 200;
  int sentence_length = 10;  // including the acronym
  int cues_per_expansion = 3;
  int cues_per_sentence = 2;
  int filler_vocab = 40;
  // Probability that each cue slot is filled with a cue of a wrong expansion.
  double cue_noise = 0.0;
  // Expansion j of an acronym is drawn with weight 1 / (j + 1)^skew.
  double skew = 0.0;
  bool labeled = true;
  std::uint64_t seed = 0;
  std::string id_prefix = "s";
};

struct SyntheticCorpus {
  ExpansionDictionary dict;
  std::vector<Sample> samples;
};

// Throws ValidationError on an inconsistent spec.
SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec);

// Same dictionary as make_synthetic_corpus(spec) with fresh sentences drawn
// from `seed`.
std::vector<Sample> synthetic_samples(const SyntheticSpec& spec, int count, std::uint64_t seed,
                                      const std::string& id_prefix);

}  // namespace acro
