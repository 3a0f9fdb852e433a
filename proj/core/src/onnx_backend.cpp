#include "docasref/onnx_backend.hpp"

#include <algorithm>
#include <map>

#include "onnx/graph.hpp"

namespace docasref {

struct OnnxModel::Impl {
  ModelConfig config;
  std::string model_id;
  onnx::Graph graph;
  SubwordTokenizer tokenizer;
  int num_layers = -1;
  int layer = -1;

  Impl(ModelConfig cfg, onnx::Graph g, SubwordTokenizer tok)
      : config(std::move(cfg)), graph(std::move(g)), tokenizer(std::move(tok)) {}

  std::map<std::string, onnx::Tensor> feeds(const Encoding& input) const {
    const auto n = static_cast<std::int64_t>(input.size());
    std::map<std::string, onnx::Tensor> f;
    if (graph.has_input("input_ids")) f.emplace("input_ids", onnx::Tensor::ints({1, n}, input.ids));
    if (graph.has_input("attention_mask")) {
      f.emplace("attention_mask", onnx::Tensor::ints({1, n}, std::vector<std::int64_t>(input.size(), 1)));
    }
    if (graph.has_input("token_type_ids")) f.emplace("token_type_ids", onnx::Tensor::ints({1, n}, input.type_ids));
    return f;
  }
};

OnnxModel::OnnxModel(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
OnnxModel::~OnnxModel() = default;

std::shared_ptr<const OnnxModel> OnnxModel::load(const ModelConfig& config) {
  auto graph = onnx::Graph::load(config.encoder_path);
  auto tokenizer = SubwordTokenizer::from_file(config.tokenizer_path);
  auto impl = std::make_unique<Impl>(config, std::move(graph), std::move(tokenizer));
  const auto& g = impl->graph;

  impl->model_id = config.model_id;
  if (impl->model_id.empty()) {
    auto it = g.metadata().find("model_id");
    impl->model_id = it != g.metadata().end() ? it->second : config.encoder_path.stem().string();
  }
  if (!g.has_input("input_ids")) throw BackendError(impl->model_id + ": ONNX graph has no 'input_ids' input");

  if (auto rows = g.gather_table_rows("input_ids")) {
    if (static_cast<std::int64_t>(impl->tokenizer.vocab_size()) > *rows) {
      throw BackendError(impl->model_id + ": tokenizer/encoder vocabulary mismatch (tokenizer has " +
                         std::to_string(impl->tokenizer.vocab_size()) + " ids, embedding table has " +
                         std::to_string(*rows) + " rows)");
    }
  }
  if (config.max_length < static_cast<int>(impl->tokenizer.num_special_tokens(true)) + 2) {
    throw BackendError(impl->model_id + ": max_length " + std::to_string(config.max_length) + " is too small");
  }

  int count = 0;
  while (g.has_output("hidden_states_" + std::to_string(count))) ++count;
  if (count > 0) {
    impl->num_layers = count - 1;
    int layer = impl->num_layers;
    if (config.layer) {
      layer = *config.layer;
    } else if (auto d = default_layer(impl->model_id)) {
      layer = *d;
    }
    if (layer < 0 || layer > impl->num_layers) {
      throw BackendError(impl->model_id + ": layer " + std::to_string(layer) + " is outside [0, " +
                         std::to_string(impl->num_layers) + "]");
    }
    impl->layer = layer;
  } else if (!g.has_output("logits")) {
    throw BackendError(impl->model_id + ": ONNX graph exposes neither hidden_states_* nor logits");
  }
  if (g.has_output("logits") && !config.nli_label_order) {
    throw BackendError(impl->model_id + ": classifier config must declare nli_label_order");
  }
  return std::shared_ptr<const OnnxModel>(new OnnxModel(std::move(impl)));
}

const ModelConfig& OnnxModel::config() const { return impl_->config; }
const std::string& OnnxModel::model_id() const { return impl_->model_id; }
const SubwordTokenizer& OnnxModel::tokenizer() const { return impl_->tokenizer; }
bool OnnxModel::is_encoder() const { return impl_->num_layers >= 0; }
bool OnnxModel::is_classifier() const { return impl_->graph.has_output("logits"); }
int OnnxModel::num_layers() const { return impl_->num_layers; }
int OnnxModel::layer() const { return impl_->layer; }

Matrix OnnxModel::encode(const Encoding& input) const {
  if (!is_encoder()) throw BackendError(model_id() + " is not an encoder");
  const std::string name = "hidden_states_" + std::to_string(impl_->layer);
  const auto out = impl_->graph.run(impl_->feeds(input), {name});
  const auto& t = out.at(0);
  if (t.rank() != 3 || t.shape[0] != 1 || t.shape[1] != static_cast<std::int64_t>(input.size()) || !t.is_float()) {
    throw BackendError(model_id() + ": unexpected hidden state shape " + onnx::shape_string(t.shape));
  }
  const auto rows = static_cast<std::size_t>(t.shape[1]);
  const auto cols = static_cast<std::size_t>(t.shape[2]);
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = t.f[r * cols + c];
  }
  return m;
}

std::vector<double> OnnxModel::classify(const Encoding& input) const {
  if (!is_classifier()) throw BackendError(model_id() + " is not a classifier");
  const auto out = impl_->graph.run(impl_->feeds(input), {"logits"});
  const auto& t = out.at(0);
  std::vector<double> logits;
  for (std::size_t k = 0; k < t.numel(); ++k) logits.push_back(t.get(k));
  return logits;
}

OnnxBackend::OnnxBackend(const ModelConfig& config) : model_(OnnxModel::load(config)) {}
OnnxBackend::OnnxBackend(std::shared_ptr<const OnnxModel> model) : model_(std::move(model)) {}

namespace {

void append_content_rows(const Matrix& hidden, const Encoding& wrapped, std::size_t skip, std::size_t take,
                         std::vector<std::vector<double>>& rows) {
  std::size_t seen = 0;
  for (std::size_t p = 0; p < wrapped.size() && take > 0; ++p) {
    if (wrapped.special[p]) continue;
    if (seen++ < skip) continue;
    const auto r = hidden.row(p);
    rows.emplace_back(r.begin(), r.end());
    --take;
  }
}

}  // namespace

EmbeddingSequence OnnxBackend::embed_tokens(std::string_view text) {
  if (!model_->is_encoder()) throw BackendError(model_->model_id() + " cannot embed tokens");
  const auto& tok = model_->tokenizer();
  const auto& cfg = model_->config();
  Encoding content = tok.tokenize(text);
  if (content.size() == 0) throw BackendError("text produced no tokens after tokenization");

  const std::size_t window = static_cast<std::size_t>(cfg.max_length) - tok.num_special_tokens(false);
  std::vector<std::vector<double>> rows;
  std::vector<std::string> tokens;
  if (content.size() <= window || cfg.long_input_mode == LongInputMode::truncate) {
    content = content.head(window);
    const auto wrapped = tok.add_special_tokens(content);
    append_content_rows(model_->encode(wrapped), wrapped, 0, content.size(), rows);
    tokens = content.tokens;
  } else {
    // Each token takes its vector from the first window that contains it.
    const std::size_t stride = static_cast<std::size_t>(cfg.max_length) / 2;
    std::size_t done = 0;
    for (std::size_t start = 0; done < content.size(); start += stride) {
      const std::size_t end = std::min(start + window, content.size());
      const auto piece = content.slice(start, end);
      const auto wrapped = tok.add_special_tokens(piece);
      append_content_rows(model_->encode(wrapped), wrapped, done - start, end - done, rows);
      done = end;
    }
    tokens = content.tokens;
  }

  EmbeddingSequence seq;
  seq.tokens = std::move(tokens);
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  normalize_rows(m);
  seq.vectors = std::move(m);
  seq.model_id = model_->model_id();
  seq.layer = model_->layer();
  return seq;
}

NliDistribution OnnxBackend::nli_probs(std::string_view premise, std::string_view hypothesis) {
  const auto& tok = model_->tokenizer();
  Encoding a = tok.tokenize(premise);
  Encoding b = tok.tokenize(hypothesis);
  const std::size_t budget = static_cast<std::size_t>(model_->config().max_length) - tok.num_special_tokens(true);
  // Longest-first truncation.
  while (a.size() + b.size() > budget) {
    if (a.size() >= b.size()) {
      a = a.head(a.size() - 1);
    } else {
      b = b.head(b.size() - 1);
    }
  }
  const auto logits = model_->classify(tok.add_special_tokens(a, &b));
  return NliDistribution::from_logits(logits, *model_->config().nli_label_order);
}

std::vector<std::string> OnnxBackend::tokenize(std::string_view text) {
  auto content = model_->tokenizer().tokenize(text);
  if (model_->config().long_input_mode == LongInputMode::truncate) {
    content = content.head(static_cast<std::size_t>(model_->config().max_length) -
                           model_->tokenizer().num_special_tokens(false));
  }
  return content.tokens;
}

std::string OnnxBackend::model_id() const { return model_->model_id(); }

std::string OnnxBackend::cache_key() const {
  const auto& cfg = model_->config();
  return model_->model_id() + "|layer=" + std::to_string(model_->layer()) +
         "|max_length=" + std::to_string(cfg.max_length) +
         (cfg.long_input_mode == LongInputMode::window ? "|window" : "|truncate");
}

}  // namespace docasref
