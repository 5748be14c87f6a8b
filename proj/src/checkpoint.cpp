#include "acro/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include "acro/errors.hpp"

namespace acro {

namespace {

constexpr char kMagic[8] = {'A', 'C', 'R', 'O', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::string& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw ValidationError("checkpoint: truncated file");
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  pos += sizeof(T);
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

Json Provenance::to_json() const {
  Json j;
  j["tapt"] = tapt;
  j["dynamic_negatives"] = dynamic_negatives;
  j["adversarial"] = adversarial;
  j["pseudo_rounds"] = pseudo_rounds;
  j["tapt_epochs"] = tapt_epochs;
  j["epochs_trained"] = epochs_trained;
  j["best_dev_f1"] = best_dev_f1;
  return j;
}

Provenance Provenance::from_json(const Json& j) {
  Provenance p;
  p.tapt = j.value("tapt", p.tapt);
  p.dynamic_negatives = j.value("dynamic_negatives", p.dynamic_negatives);
  p.adversarial = j.value("adversarial", p.adversarial);
  p.pseudo_rounds = j.value("pseudo_rounds", p.pseudo_rounds);
  p.tapt_epochs = j.value("tapt_epochs", p.tapt_epochs);
  p.epochs_trained = j.value("epochs_trained", p.epochs_trained);
  p.best_dev_f1 = j.value("best_dev_f1", p.best_dev_f1);
  return p;
}

ScoringModel Checkpoint::classifier() const {
  if (!head) throw ValidationError("checkpoint has no classification head (encoder-only)");
  return ScoringModel(encoder->clone(), *head);
}

ScoringModel Checkpoint::fresh_classifier(double dropout_rate, std::uint64_t seed) const {
  const auto d = encoder->hidden_dim();
  return ScoringModel(encoder->clone(), BinaryHead(2 * d, d, dropout_rate, seed));
}

void save_checkpoint(const std::filesystem::path& path, const EncoderContract& encoder, const BinaryHead* head,
                     const Tokenizer& tok, const TrainConfig& cfg, const Provenance& provenance) {
  if (encoder.vocab_size() != tok.size()) {
    throw std::invalid_argument("save_checkpoint: tokenizer and embedding table sizes differ");
  }
  std::vector<const Parameter*> tensors = encoder.parameters();
  if (head) {
    for (const auto* p : head->parameters()) tensors.push_back(p);
  }

  Json header;
  header["format"] = "acro-checkpoint";
  header["encoder"] = encoder.describe();
  header["tokenizer"] = tok.to_json();
  header["train_config"] = train_config_to_json(cfg);
  header["provenance"] = provenance.to_json();
  if (head) {
    Json h;
    h["dropout_rate"] = head->dropout_rate;
    h["hidden"] = head->w1.value.cols();
    header["head"] = h;
  } else {
    header["head"] = nullptr;
  }
  Json table = Json::array();
  for (const auto* p : tensors) {
    Json t;
    t["name"] = p->name;
    t["rows"] = p->value.rows();
    t["cols"] = p->value.cols();
    table.push_back(t);
  }
  header["tensors"] = table;

  const std::string header_text = header.dump();
  std::string blob;
  blob.append(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(blob, kVersion);
  put_le<std::uint64_t>(blob, header_text.size());
  blob += header_text;
  for (const auto* p : tensors) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) put_le<double>(blob, p->value.data()[i]);
  }
  write_text_file(path, blob);
}

void save_checkpoint(const std::filesystem::path& path, const ScoringModel& model, const Tokenizer& tok,
                     const TrainConfig& cfg, const Provenance& provenance) {
  save_checkpoint(path, model.encoder(), &model.head(), tok, cfg, provenance);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const std::string blob = read_text_file(path);
  const std::string where = "checkpoint " + path.string();
  if (blob.size() < sizeof(kMagic) || std::memcmp(blob.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ValidationError(where + ": bad magic");
  }
  std::size_t pos = sizeof(kMagic);
  if (get_le<std::uint32_t>(blob, pos) != kVersion) throw ValidationError(where + ": unsupported version");
  const auto header_size = get_le<std::uint64_t>(blob, pos);
  if (pos + header_size > blob.size()) throw ValidationError(where + ": truncated header");
  const Json header = parse_json_text(std::string_view(blob).substr(pos, header_size), where);
  pos += header_size;

  Checkpoint ck;
  try {
    ck.tokenizer = Tokenizer::from_json(header.at("tokenizer"));
    ck.config = train_config_from_json(header.at("train_config"));
    ck.provenance = Provenance::from_json(header.at("provenance"));
    const auto& enc = header.at("encoder");
    if (enc.at("type") != "desk_transformer") throw ValidationError(where + ": unknown encoder type");
    const auto cfg = DeskEncoderConfig::from_json(enc.at("config"));
    ck.encoder = std::make_unique<DeskEncoder>(cfg, enc.at("vocab_size").get<std::size_t>(), 0);
    if (!header.at("head").is_null()) {
      const auto d = ck.encoder->hidden_dim();
      ck.head.emplace(2 * d, header["head"].at("hidden").get<std::size_t>(),
                      header["head"].at("dropout_rate").get<double>(), 0);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(where + ": malformed header (" + e.what() + ")");
  }

  std::vector<Parameter*> tensors = ck.encoder->parameters();
  if (ck.head) {
    for (auto* p : ck.head->parameters()) tensors.push_back(p);
  }
  const auto& table = header.at("tensors");
  if (table.size() != tensors.size()) throw ValidationError(where + ": tensor count mismatch");
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    auto* p = tensors[i];
    if (table[i].at("name") != p->name || table[i].at("rows").get<Eigen::Index>() != p->value.rows() ||
        table[i].at("cols").get<Eigen::Index>() != p->value.cols()) {
      throw ValidationError(where + ": tensor " + p->name + " shape/name mismatch");
    }
    for (Eigen::Index k = 0; k < p->value.size(); ++k) p->value.data()[k] = get_le<double>(blob, pos);
  }
  if (pos != blob.size()) throw ValidationError(where + ": trailing bytes");
  if (ck.encoder->vocab_size() != ck.tokenizer.size()) throw ValidationError(where + ": vocabulary size mismatch");
  return ck;
}

}  // namespace acro
