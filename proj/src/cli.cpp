#include "acro/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include "acro/checkpoint.hpp"
#include "acro/config_fields.hpp"
#include "acro/errors.hpp"
#include "acro/eval_report.hpp"
#include "acro/pseudo_label.hpp"
#include "acro/synthetic.hpp"
#include "acro/tapt_pretrain.hpp"
#include "acro/train_engine.hpp"

#ifndef ACRO_VERSION
#define ACRO_VERSION "0.0.0"
#endif

namespace acro::cli {

namespace fs = std::filesystem;

Json RunManifest::to_json() const {
  Json j;
  j["command"] = command;
  j["version"] = version;
  j["seed"] = seed;
  j["config"] = config;
  Json inputs = Json::array();
  for (const auto& [path, digest] : input_digests) inputs.push_back({{"path", path}, {"sha256", digest}});
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  return j;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

std::string file_sha256(const fs::path& path) { return sha256_hex(read_text_file(path)); }

std::string_view artifact_version() { return ACRO_VERSION; }

namespace {

std::string kebab(std::string_view snake) {
  std::string s(snake);
  for (char& c : s) {
    if (c == '_') c = '-';
  }
  return s;
}

// TrainConfig resolution: defaults (or a base config), then --config, then
// flags. Flag values are parsed as JSON scalars so the usual type checks apply.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::optional<bool> dynamic_negatives;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "JSON file with training config fields");
    for_each_config_field([&](const char* name, auto member) {
      using T = std::remove_reference_t<decltype(std::declval<TrainConfig&>().*member)>;
      if constexpr (std::is_same_v<T, bool>) {
        app.add_flag_function(
            "--" + kebab(name) + ",!--no-" + kebab(name),
            [this](std::int64_t count) { dynamic_negatives = count > 0; }, "Toggle " + std::string(name));
      } else {
        app.add_option("--" + kebab(name), values[name], "Overrides config field " + std::string(name));
      }
    });
  }

  TrainConfig resolve(const CLI::App& app, const TrainConfig& base) const {
    Json j = train_config_to_json(base);
    if (!config_path.empty()) {
      const Json file = parse_json_text(read_text_file(config_path), config_path);
      if (!file.is_object()) throw ValidationError(config_path + ": config must be a JSON object");
      for (const auto& [k, v] : file.items()) j[k] = v;
    }
    for (const auto& [name, text] : values) {
      if (app.count("--" + kebab(name)) == 0) continue;
      Json v;
      try {
        v = Json::parse(text);
      } catch (const nlohmann::json::exception&) {
        throw ValidationError("--" + kebab(name) + ": not a number: '" + text + "'");
      }
      j[name] = v;
    }
    if (dynamic_negatives) j["dynamic_negatives"] = *dynamic_negatives;
    return train_config_from_json(j);
  }
};

struct EncoderFlags {
  DeskEncoderConfig cfg;
  void attach(CLI::App& app) {
    app.add_option("--encoder-layers", cfg.layers, "Transformer layers")->capture_default_str();
    app.add_option("--hidden-dim", cfg.hidden_dim, "Hidden size")->capture_default_str();
    app.add_option("--attention-heads", cfg.attention_heads, "Attention heads")->capture_default_str();
    app.add_option("--feedforward-dim", cfg.feedforward_dim, "Feed-forward size")->capture_default_str();
  }
  DeskEncoderConfig resolve(const TrainConfig& tc) const {
    DeskEncoderConfig c = cfg;
    c.max_positions = tc.max_seq_len;
    c.validate();
    return c;
  }
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  bool verbose = false;
};

// Records digests and writes the manifest; reading an input that does not
// exist raises MissingArtifactError before anything else happens.
void write_manifest(const fs::path& out_dir, const std::string& command, const Json& config, std::uint64_t seed,
                    const std::vector<std::string>& inputs, const std::vector<std::string>& outputs) {
  RunManifest m;
  m.command = command;
  m.config = config;
  m.seed = seed;
  m.version = std::string(artifact_version());
  for (const auto& in : inputs) {
    if (!in.empty()) m.input_digests.emplace_back(in, file_sha256(in));
  }
  for (const auto& o : outputs) m.outputs.push_back((out_dir / o).string());
  write_text_file(out_dir / "manifest.json", m.to_json().dump(1) + "\n");
}

void write_json(const fs::path& path, const Json& j) { write_text_file(path, j.dump(1) + "\n"); }

Json metrics_summary(const MetricsReport& m) { return metrics_to_json(m); }

std::string format_f1(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << v;
  return s.str();
}

DeskEncoderConfig encoder_config_of(const Checkpoint& ck) {
  return DeskEncoderConfig::from_json(ck.encoder->describe().at("config"));
}

TrainOptions train_options(const Context& ctx, bool adversarial, std::ostringstream& log) {
  TrainOptions opt;
  opt.adversarial = adversarial;
  opt.log = &log;
  if (ctx.verbose) {
    std::ostream* err = &ctx.err;
    opt.on_epoch = [err](const EpochRecord& r) {
      *err << "epoch " << r.epoch << " loss " << r.train_loss << " dev_f1 " << r.dev.f1 << " lr " << r.lr_encoder
           << "/" << r.lr_head << "\n";
    };
  }
  return opt;
}

// --- stats -----------------------------------------------------------------

struct StatsArgs {
  std::string data, dict, out;
};

int cmd_stats(const StatsArgs& a, Context& ctx) {
  const fs::path out(a.out);
  write_manifest(out, "stats", Json::object(), 0, {a.data, a.dict},
                 {"stats.json", "acronyms_per_sentence.svg", "expansions_per_acronym.svg"});
  const auto dict = load_dictionary(a.dict);
  const auto samples = load_dataset(a.data);
  const auto stats = compute_stats(samples, dict);
  write_json(out / "stats.json", stats_to_json(stats));
  write_text_file(out / "acronyms_per_sentence.svg",
                  render_histogram_svg(stats.acronyms_per_sentence, "Acronyms per sentence", "acronyms"));
  write_text_file(out / "expansions_per_acronym.svg",
                  render_histogram_svg(stats.expansions_per_acronym, "Expansions per acronym", "expansions"));
  ctx.out << "samples " << stats.total_samples << " sentences " << stats.distinct_sentences << " acronyms "
          << stats.distinct_acronyms << "\n";
  return kOk;
}

// --- tapt ------------------------------------------------------------------

struct TaptArgs {
  std::vector<std::string> data;
  std::string dict, out;
  ConfigFlags config;
  EncoderFlags encoder;
};

int cmd_tapt(const TaptArgs& a, const CLI::App& app, Context& ctx) {
  const TrainConfig cfg = a.config.resolve(app, TrainConfig{});
  const DeskEncoderConfig enc = a.encoder.resolve(cfg);
  const fs::path out(a.out);
  Json config = train_config_to_json(cfg);
  config["encoder"] = enc.to_json();
  std::vector<std::string> inputs = a.data;
  inputs.push_back(a.dict);
  write_manifest(out, "tapt", config, cfg.seed, inputs, {"encoder.ckpt", "tapt_log.json"});

  const auto dict = load_dictionary(a.dict);
  std::vector<Sample> samples;
  for (const auto& path : a.data) {
    auto part = load_dataset(path);
    samples.insert(samples.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  const Tokenizer tok = build_vocab(samples, dict, cfg.min_count);
  ScoringModel model = make_desk_model(enc, tok.size(), cfg.dropout_rate, cfg.seed);
  const TaptResult result = tapt_train(samples, dict, model.encoder(), tok, cfg.tapt_epochs, cfg);

  Provenance prov;
  prov.tapt = true;
  prov.tapt_epochs = cfg.tapt_epochs;
  save_checkpoint(out / "encoder.ckpt", model.encoder(), nullptr, tok, cfg, prov);
  Json log;
  log["epoch_loss"] = result.epoch_loss;
  write_json(out / "tapt_log.json", log);
  ctx.out << "tapt epochs " << cfg.tapt_epochs;
  if (!result.epoch_loss.empty()) ctx.out << " final mlm loss " << format_f1(result.epoch_loss.back());
  ctx.out << "\n";
  return kOk;
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string train, dev, dict, out, from_tapt;
  bool adversarial = false;
  ConfigFlags config;
  EncoderFlags encoder;
};

int cmd_train(const TrainArgs& a, const CLI::App& app, Context& ctx) {
  const TrainConfig cfg = a.config.resolve(app, TrainConfig{});
  const fs::path out(a.out);
  Json config = train_config_to_json(cfg);
  config["adversarial"] = a.adversarial;
  config["from_tapt"] = !a.from_tapt.empty();
  if (a.from_tapt.empty()) config["encoder"] = a.encoder.resolve(cfg).to_json();
  write_manifest(out, "train", config, cfg.seed, {a.train, a.dev, a.dict, a.from_tapt},
                 {"model.ckpt", "train_log.jsonl", "metrics.json", "dev_predictions.json"});

  const auto dict = load_dictionary(a.dict);
  const auto train_set = load_dataset(a.train, dict);
  const auto dev_set = a.dev.empty() ? std::vector<Sample>{} : load_dataset(a.dev, dict);

  Tokenizer tok;
  ScoringModel initial;
  Provenance prov;
  if (!a.from_tapt.empty()) {
    const Checkpoint ck = load_checkpoint(a.from_tapt);
    tok = ck.tokenizer;
    initial = ck.fresh_classifier(cfg.dropout_rate, cfg.seed);
    prov.tapt = true;
    prov.tapt_epochs = ck.provenance.tapt_epochs;
  } else {
    tok = build_vocab(train_set, dict, cfg.min_count);
    initial = make_desk_model(a.encoder.resolve(cfg), tok.size(), cfg.dropout_rate, cfg.seed);
  }

  std::ostringstream log;
  TrainResult result = train(train_set, dev_set, dict, tok, cfg, std::move(initial), train_options(ctx, a.adversarial, log));
  prov.dynamic_negatives = cfg.dynamic_negatives;
  prov.adversarial = a.adversarial;
  prov.epochs_trained = static_cast<int>(result.state.epoch_history.size());
  prov.best_dev_f1 = std::isfinite(result.state.best_dev_f1) ? result.state.best_dev_f1 : 0.0;
  save_checkpoint(out / "model.ckpt", result.model, tok, cfg, prov);
  write_text_file(out / "train_log.jsonl", log.str());

  const auto preds = predict_all(dev_set, result.model, dict, tok, static_cast<std::size_t>(cfg.max_seq_len));
  write_text_file(out / "dev_predictions.json", dump_predictions(preds));
  Json metrics;
  metrics["best_epoch"] = result.best_epoch;
  metrics["dev"] = metrics_summary(evaluate(dev_set, preds));
  write_json(out / "metrics.json", metrics);
  ctx.out << "best epoch " << result.best_epoch << " dev macro F1 " << format_f1(metrics["dev"]["f1"].get<double>())
          << "\n";
  return kOk;
}

// --- pseudo ----------------------------------------------------------------

struct PseudoArgs {
  std::string model, train, unlabeled, dev, dict, out, from_tapt;
  bool adversarial = false;
  ConfigFlags config;
};

int cmd_pseudo(const PseudoArgs& a, const CLI::App& app, Context& ctx) {
  const fs::path out(a.out);
  // Config defaults come from the model being extended.
  const Checkpoint base = load_checkpoint(a.model);
  if (!base.has_head()) throw ValidationError(a.model + ": pseudo needs a trained classifier, not an encoder-only checkpoint");
  const TrainConfig cfg = a.config.resolve(app, base.config);
  const bool adversarial = a.adversarial || base.provenance.adversarial;
  Json config = train_config_to_json(cfg);
  config["adversarial"] = adversarial;
  config["from_tapt"] = !a.from_tapt.empty();
  std::vector<std::string> outputs = {"model.ckpt", "pseudo.json", "train_log.jsonl", "metrics.json"};
  for (int r = 1; r <= cfg.pseudo_rounds; ++r) outputs.push_back("pseudo_round" + std::to_string(r) + ".json");
  write_manifest(out, "pseudo", config, cfg.seed, {a.model, a.train, a.unlabeled, a.dev, a.dict, a.from_tapt},
                 outputs);

  const auto dict = load_dictionary(a.dict);
  const auto train_set = load_dataset(a.train, dict);
  const auto unlabeled = load_dataset(a.unlabeled);
  const auto dev_set = a.dev.empty() ? std::vector<Sample>{} : load_dataset(a.dev, dict);
  const Tokenizer& tok = base.tokenizer;
  std::optional<Checkpoint> tapt;
  if (!a.from_tapt.empty()) {
    tapt = load_checkpoint(a.from_tapt);
    if (!(tapt->tokenizer == tok)) throw ValidationError(a.from_tapt + ": tokenizer differs from the model's");
  }
  const auto max_len = static_cast<std::size_t>(cfg.max_seq_len);

  ScoringModel current = base.classifier();
  std::vector<PseudoSample> pseudo;
  TrainResult result{current, TrainState::initial(cfg), 0};
  std::ostringstream log;
  for (int round = 1; round <= cfg.pseudo_rounds; ++round) {
    pseudo = harvest(current, unlabeled, dict, tok, cfg.pseudo_threshold, round, max_len);
    save_pseudo(out / ("pseudo_round" + std::to_string(round) + ".json"), pseudo);
    if (ctx.verbose) ctx.err << "round " << round << " harvested " << pseudo.size() << "\n";
    ScoringModel initial = tapt ? tapt->fresh_classifier(cfg.dropout_rate, cfg.seed)
                                : make_desk_model(encoder_config_of(base), tok.size(), cfg.dropout_rate, cfg.seed);
    result = merge_and_retrain(train_set, pseudo, dev_set, dict, tok, cfg, std::move(initial),
                               train_options(ctx, adversarial, log));
    current = result.model;
  }

  Provenance prov = base.provenance;
  prov.tapt = prov.tapt || tapt.has_value();
  prov.adversarial = adversarial;
  prov.dynamic_negatives = cfg.dynamic_negatives;
  prov.pseudo_rounds = cfg.pseudo_rounds;
  prov.epochs_trained = static_cast<int>(result.state.epoch_history.size());
  if (std::isfinite(result.state.best_dev_f1)) prov.best_dev_f1 = result.state.best_dev_f1;
  save_checkpoint(out / "model.ckpt", current, tok, cfg, prov);
  save_pseudo(out / "pseudo.json", pseudo);
  write_text_file(out / "train_log.jsonl", log.str());
  Json metrics;
  metrics["harvested"] = pseudo.size();
  metrics["unlabeled"] = unlabeled.size();
  metrics["dev"] = metrics_summary(evaluate(dev_set, predict_all(dev_set, current, dict, tok, max_len)));
  write_json(out / "metrics.json", metrics);
  ctx.out << "harvested " << pseudo.size() << " of " << unlabeled.size() << " dev macro F1 "
          << format_f1(metrics["dev"]["f1"].get<double>()) << "\n";
  return kOk;
}

// --- predict ---------------------------------------------------------------

struct PredictArgs {
  std::string model, data, dict, out;
};

int cmd_predict(const PredictArgs& a, Context& ctx) {
  const fs::path out(a.out);
  write_manifest(out, "predict", Json::object(), 0, {a.model, a.data, a.dict}, {"predictions.json"});
  const Checkpoint ck = load_checkpoint(a.model);
  const auto dict = load_dictionary(a.dict);
  const auto samples = load_dataset(a.data);
  const auto preds =
      predict_all(samples, ck.classifier(), dict, ck.tokenizer, static_cast<std::size_t>(ck.config.max_seq_len));
  write_text_file(out / "predictions.json", dump_predictions(preds));
  ctx.out << "predicted " << preds.size() << " samples\n";
  return kOk;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string data, dict, out, predictions, model, baseline, train;
  std::size_t error_sample = 100;
  std::uint64_t seed = 0;
};

int cmd_eval(const EvalArgs& a, Context& ctx) {
  const int sources = int(!a.predictions.empty()) + int(!a.model.empty()) + int(!a.baseline.empty());
  if (sources != 1) throw ValidationError("eval: give exactly one of --predictions, --model, --baseline");
  if (!a.baseline.empty() && a.baseline != "mf") throw ValidationError("eval: unknown baseline '" + a.baseline + "'");
  if (!a.baseline.empty() && a.train.empty()) throw ValidationError("eval: --baseline mf needs --train");
  const fs::path out(a.out);
  Json config;
  config["source"] = !a.predictions.empty() ? "predictions" : !a.model.empty() ? "model" : "baseline-mf";
  config["error_sample"] = a.error_sample;
  write_manifest(out, "eval", config, a.seed, {a.data, a.dict, a.predictions, a.model, a.train},
                 {"metrics.json", "errors.json", "errors.txt"});

  const auto dict = load_dictionary(a.dict);
  const auto samples = load_dataset(a.data, dict);
  std::vector<ScoredPrediction> preds;
  if (!a.predictions.empty()) {
    preds = load_predictions(a.predictions);
  } else if (!a.model.empty()) {
    const Checkpoint ck = load_checkpoint(a.model);
    preds = predict_all(samples, ck.classifier(), dict, ck.tokenizer, static_cast<std::size_t>(ck.config.max_seq_len));
  } else {
    preds = mf_predictions(load_dataset(a.train, dict), samples, dict);
  }
  const MetricsReport report = evaluate(samples, preds);
  const auto errors = error_report(samples, preds, a.error_sample, a.seed);
  write_json(out / "metrics.json", metrics_summary(report));
  write_json(out / "errors.json", error_report_to_json(errors));
  write_text_file(out / "errors.txt", render_error_report(errors));
  ctx.out << "macro P " << format_f1(report.precision) << " R " << format_f1(report.recall) << " F1 "
          << format_f1(report.f1) << "\n";
  return kOk;
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  SyntheticSpec spec;
  int dev_samples = 0;
  int unlabeled_samples = 0;
  std::string out;
};

int cmd_synth(const SynthArgs& a, Context& ctx) {
  const fs::path out(a.out);
  Json config;
  config["acronyms"] = a.spec.acronyms;
  config["min_expansions"] = a.spec.min_expansions;
  config["max_expansions"] = a.spec.max_expansions;
  config["train_samples"] = a.spec.samples;
  config["dev_samples"] = a.dev_samples;
  config["unlabeled_samples"] = a.unlabeled_samples;
  config["sentence_length"] = a.spec.sentence_length;
  config["cue_noise"] = a.spec.cue_noise;
  config["skew"] = a.spec.skew;
  write_manifest(out, "synth", config, a.spec.seed, {}, {"dict.json", "train.json", "dev.json", "unlabeled.json"});
  SyntheticSpec spec = a.spec;
  spec.id_prefix = "train-";
  const SyntheticCorpus corpus = make_synthetic_corpus(spec);
  save_dictionary(out / "dict.json", corpus.dict);
  save_dataset(out / "train.json", corpus.samples);
  save_dataset(out / "dev.json", synthetic_samples(spec, a.dev_samples, derive_seed(spec.seed, 1), "dev-"));
  SyntheticSpec unl = spec;
  unl.labeled = false;
  save_dataset(out / "unlabeled.json",
               synthetic_samples(unl, a.unlabeled_samples, derive_seed(spec.seed, 2), "unlabeled-"));
  ctx.out << "wrote " << corpus.dict.size() << " acronyms, " << corpus.samples.size() << " train samples\n";
  return kOk;
}

int dispatch(int argc, const char* const* argv, Context& ctx) {
  CLI::App app{"Acronym disambiguation: candidate ranking over (expansion, sentence) pairs"};
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", ctx.verbose, "Progress on stderr");

  StatsArgs stats;
  auto* s = app.add_subcommand("stats", "Corpus histograms");
  s->add_option("--data", stats.data, "Dataset JSON")->required();
  s->add_option("--dict", stats.dict, "Dictionary JSON")->required();
  s->add_option("--out", stats.out, "Output directory")->required();

  TaptArgs tapt;
  auto* t = app.add_subcommand("tapt", "Masked-LM pretraining of a fresh encoder on the task corpus");
  t->add_option("--data", tapt.data, "Dataset JSON (repeatable; labels ignored)")->required();
  t->add_option("--dict", tapt.dict, "Dictionary JSON")->required();
  t->add_option("--out", tapt.out, "Output directory")->required();
  tapt.config.attach(*t);
  tapt.encoder.attach(*t);

  TrainArgs tr;
  auto* tc = app.add_subcommand("train", "Fine-tune the pair classifier");
  tc->add_option("--train", tr.train, "Labeled training JSON")->required();
  tc->add_option("--dev", tr.dev, "Labeled dev JSON");
  tc->add_option("--dict", tr.dict, "Dictionary JSON")->required();
  tc->add_option("--out", tr.out, "Output directory")->required();
  tc->add_option("--from-tapt", tr.from_tapt, "Encoder checkpoint from the tapt command");
  tc->add_flag("--adversarial", tr.adversarial, "Add the embedding-perturbation step");
  tr.config.attach(*tc);
  tr.encoder.attach(*tc);

  PseudoArgs ps;
  auto* pc = app.add_subcommand("pseudo", "Harvest confident predictions and retrain on the union");
  pc->add_option("--model", ps.model, "Trained classifier checkpoint")->required();
  pc->add_option("--train", ps.train, "Labeled training JSON")->required();
  pc->add_option("--unlabeled", ps.unlabeled, "Unlabeled JSON")->required();
  pc->add_option("--dev", ps.dev, "Labeled dev JSON");
  pc->add_option("--dict", ps.dict, "Dictionary JSON")->required();
  pc->add_option("--out", ps.out, "Output directory")->required();
  pc->add_option("--from-tapt", ps.from_tapt, "Start retraining from this encoder checkpoint");
  pc->add_flag("--adversarial", ps.adversarial, "Add the embedding-perturbation step");
  ps.config.attach(*pc);

  PredictArgs pr;
  auto* pp = app.add_subcommand("predict", "Score every candidate and pick the best");
  pp->add_option("--model", pr.model, "Classifier checkpoint")->required();
  pp->add_option("--data", pr.data, "Dataset JSON")->required();
  pp->add_option("--dict", pr.dict, "Dictionary JSON")->required();
  pp->add_option("--out", pr.out, "Output directory")->required();

  EvalArgs ev;
  auto* ec = app.add_subcommand("eval", "Macro metrics and error analysis");
  ec->add_option("--data", ev.data, "Gold dataset JSON")->required();
  ec->add_option("--dict", ev.dict, "Dictionary JSON")->required();
  ec->add_option("--out", ev.out, "Output directory")->required();
  ec->add_option("--predictions", ev.predictions, "Predictions JSON");
  ec->add_option("--model", ev.model, "Classifier checkpoint to predict with");
  ec->add_option("--baseline", ev.baseline, "Baseline instead of a model (mf)");
  ec->add_option("--train", ev.train, "Training JSON for the mf baseline");
  ec->add_option("--error-sample", ev.error_sample, "Misclassified cases to sample")->capture_default_str();
  ec->add_option("--seed", ev.seed, "Seed for the error sample")->capture_default_str();

  SynthArgs sy;
  auto* yc = app.add_subcommand("synth", "Write a synthetic toy corpus");
  yc->add_option("--out", sy.out, "Output directory")->required();
  yc->add_option("--acronyms", sy.spec.acronyms)->capture_default_str();
  yc->add_option("--min-expansions", sy.spec.min_expansions)->capture_default_str();
  yc->add_option("--max-expansions", sy.spec.max_expansions)->capture_default_str();
  yc->add_option("--train-samples", sy.spec.samples)->capture_default_str();
  yc->add_option("--dev-samples", sy.dev_samples)->capture_default_str();
  yc->add_option("--unlabeled-samples", sy.unlabeled_samples)->capture_default_str();
  yc->add_option("--sentence-length", sy.spec.sentence_length)->capture_default_str();
  yc->add_option("--cue-noise", sy.spec.cue_noise)->capture_default_str();
  yc->add_option("--skew", sy.spec.skew)->capture_default_str();
  yc->add_option("--seed", sy.spec.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, ctx.out, ctx.err);
    return code == 0 ? kOk : kInvalidInput;
  }

  if (s->parsed()) return cmd_stats(stats, ctx);
  if (t->parsed()) return cmd_tapt(tapt, *t, ctx);
  if (tc->parsed()) return cmd_train(tr, *tc, ctx);
  if (pc->parsed()) return cmd_pseudo(ps, *pc, ctx);
  if (pp->parsed()) return cmd_predict(pr, ctx);
  if (ec->parsed()) return cmd_eval(ev, ctx);
  return cmd_synth(sy, ctx);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Context ctx{out, err};
  try {
    return dispatch(argc, argv, ctx);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const MissingArtifactError& e) {
    err << "error: missing artifact: " << e.path() << "\n";
    return kMissingArtifact;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kDivergence;
  } catch (const std::domain_error& e) {
    err << "error: numerical divergence: " << e.what() << "\n";
    return kDivergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("acro");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace acro::cli
