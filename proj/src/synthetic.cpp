#include "acro/synthetic.hpp"

#include <cmath>
#include <set>
#include <string>

#include "acro/errors.hpp"
#include "acro/rng.hpp"

namespace acro {

namespace {

constexpr const char* kConsonants = "bcdfghklmnprstvz";
constexpr const char* kVowels = "aeiou";

std::string syllables(Rng& rng, int count) {
  std::string w;
  for (int i = 0; i < count; ++i) {
    w += kConsonants[rng.uniform_index(16)];
    w += kVowels[rng.uniform_index(5)];
  }
  return w;
}

// Pseudo-word not yet in `used`, optionally starting with `first`.
std::string fresh_word(Rng& rng, std::set<std::string>& used, char first = 0) {
  for (;;) {
    std::string w = syllables(rng, 2 + static_cast<int>(rng.uniform_index(2)));
    if (first) w = std::string(1, first) + w;
    if (used.insert(w).second) return w;
  }
}

struct Layout {
  ExpansionDictionary dict;
  // cues[acronym][expansion] -> cue words
  std::vector<std::vector<std::vector<std::string>>> cues;
  std::vector<std::string> filler;
};

Layout build_layout(const SyntheticSpec& spec) {
  if (spec.acronyms < 1 || spec.acronyms > 200) throw ValidationError("synthetic: acronyms must be in [1,200]");
  if (spec.min_expansions < 1 || spec.max_expansions < spec.min_expansions) {
    throw ValidationError("synthetic: need 1 <= min_expansions <= max_expansions");
  }
  if (spec.samples < 0) throw ValidationError("synthetic: samples must be >= 0");
  if (spec.cues_per_expansion < 1 || spec.cues_per_sentence < 0 || spec.filler_vocab < 1) {
    throw ValidationError("synthetic: cue and filler counts must be positive");
  }
  if (spec.sentence_length < 1 + spec.cues_per_sentence) {
    throw ValidationError("synthetic: sentence_length must fit the acronym and cues");
  }
  if (!(spec.cue_noise >= 0.0 && spec.cue_noise <= 1.0)) throw ValidationError("synthetic: cue_noise must be in [0,1]");
  if (!(spec.skew >= 0.0)) throw ValidationError("synthetic: skew must be >= 0");

  Rng rng(derive_seed(spec.seed, 0x5D1C7ULL));
  Layout layout;
  std::set<std::string> used_words;
  std::set<std::string> used_acronyms;
  for (int a = 0; a < spec.acronyms; ++a) {
    std::string acr;
    do {
      acr.clear();
      const int len = 2 + static_cast<int>(rng.uniform_index(3));
      for (int k = 0; k < len; ++k) acr += static_cast<char>('A' + rng.uniform_index(26));
    } while (!used_acronyms.insert(acr).second);

    const int n_exp = spec.min_expansions +
                      static_cast<int>(rng.uniform_index(static_cast<std::size_t>(spec.max_expansions - spec.min_expansions + 1)));
    std::vector<std::string> expansions;
    std::vector<std::vector<std::string>> acr_cues;
    for (int e = 0; e < n_exp; ++e) {
      std::string exp;
      for (char c : acr) {
        if (!exp.empty()) exp += ' ';
        exp += fresh_word(rng, used_words, static_cast<char>(c - 'A' + 'a'));
      }
      expansions.push_back(exp);
      std::vector<std::string> cue;
      for (int k = 0; k < spec.cues_per_expansion; ++k) cue.push_back(fresh_word(rng, used_words));
      acr_cues.push_back(std::move(cue));
    }
    layout.dict.add(acr, std::move(expansions));
    layout.cues.push_back(std::move(acr_cues));
  }
  for (int f = 0; f < spec.filler_vocab; ++f) layout.filler.push_back(fresh_word(rng, used_words));
  return layout;
}

std::vector<Sample> draw_samples(const SyntheticSpec& spec, const Layout& layout, int count, std::uint64_t seed,
                                 const std::string& id_prefix) {
  Rng rng(derive_seed(seed, 0x5A3B1ULL));
  const auto& entries = layout.dict.entries();
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const std::size_t a = rng.uniform_index(entries.size());
    const auto& expansions = entries[a].second;

    double total = 0.0;
    for (std::size_t j = 0; j < expansions.size(); ++j) total += std::pow(static_cast<double>(j + 1), -spec.skew);
    double u = rng.uniform01() * total;
    std::size_t e = expansions.size() - 1;
    for (std::size_t j = 0; j < expansions.size(); ++j) {
      u -= std::pow(static_cast<double>(j + 1), -spec.skew);
      if (u < 0.0) {
        e = j;
        break;
      }
    }

    const auto len = static_cast<std::size_t>(spec.sentence_length);
    std::vector<std::string> tokens(len);
    std::vector<std::size_t> slots(len);
    for (std::size_t k = 0; k < len; ++k) slots[k] = k;
    rng.shuffle(slots);
    const std::size_t acr_pos = slots[0];
    tokens[acr_pos] = entries[a].first;
    for (int c = 0; c < spec.cues_per_sentence; ++c) {
      std::size_t src = e;
      if (expansions.size() > 1 && rng.uniform01() < spec.cue_noise) {
        src = (e + 1 + rng.uniform_index(expansions.size() - 1)) % expansions.size();
      }
      const auto& cue = layout.cues[a][src];
      tokens[slots[1 + static_cast<std::size_t>(c)]] = cue[rng.uniform_index(cue.size())];
    }
    for (std::size_t k = 1 + static_cast<std::size_t>(spec.cues_per_sentence); k < len; ++k) {
      tokens[slots[k]] = layout.filler[rng.uniform_index(layout.filler.size())];
    }

    Sample s;
    s.id = id_prefix + std::to_string(i);
    s.tokens = std::move(tokens);
    s.acronym_index = acr_pos;
    if (spec.labeled) s.gold_expansion = expansions[e];
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec) {
  Layout layout = build_layout(spec);
  SyntheticCorpus corpus;
  corpus.samples = draw_samples(spec, layout, spec.samples, spec.seed, spec.id_prefix);
  corpus.dict = std::move(layout.dict);
  return corpus;
}

std::vector<Sample> synthetic_samples(const SyntheticSpec& spec, int count, std::uint64_t seed,
                                      const std::string& id_prefix) {
  if (count < 0) throw ValidationError("synthetic: count must be >= 0");
  return draw_samples(spec, build_layout(spec), count, seed, id_prefix);
}

}  // namespace acro
