#include "sbd/models.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace sbd {

const char* model_id_name(ModelId id) {
  switch (id) {
    case ModelId::CnnA:
      return "cnn-a";
    case ModelId::CnnB:
      return "cnn-b";
    case ModelId::CnnC:
      return "cnn-c";
  }
  return "?";
}

ModelId model_id_from_name(const std::string& name) {
  if (name == "cnn-a") return ModelId::CnnA;
  if (name == "cnn-b") return ModelId::CnnB;
  if (name == "cnn-c") return ModelId::CnnC;
  throw ConfigError("unknown model '" + name + "' (expected cnn-a, cnn-b or cnn-c)");
}

std::vector<LayerConfig> cnn_a_configs(float keep_p) {
  return {
      LayerConfig::conv(64, 2, 4),   LayerConfig::relu(),
      LayerConfig::pool(2, 3, 2, 3), LayerConfig::conv(128, 2, 2),
      LayerConfig::relu(),           LayerConfig::conv(128, 1, 49),
      LayerConfig::relu(),           LayerConfig::flatten(),
      LayerConfig::dense(4096),      LayerConfig::relu(),
      LayerConfig::dense(2048),      LayerConfig::relu(),
      LayerConfig::dropout(keep_p),  LayerConfig::dense(2),
  };
}

std::vector<LayerConfig> cnn_b_configs(float keep_p) {
  return {
      LayerConfig::conv(32, 3, 3),  LayerConfig::relu(),
      LayerConfig::conv(64, 2, 2),  LayerConfig::relu(),
      LayerConfig::pool(2, 3, 1, 3), LayerConfig::flatten(),
      LayerConfig::dense(2048),     LayerConfig::relu(),
      LayerConfig::dense(4096),     LayerConfig::relu(),
      LayerConfig::dense(2048),     LayerConfig::relu(),
      LayerConfig::dropout(keep_p), LayerConfig::dense(2),
  };
}

std::vector<LayerConfig> cnn_c_configs(float keep_p) {
  // Convolution and pooling stages are those of CNN-B.
  return {
      LayerConfig::conv(32, 3, 3),  LayerConfig::relu(),
      LayerConfig::conv(64, 2, 2),  LayerConfig::relu(),
      LayerConfig::pool(2, 3, 1, 3), LayerConfig::flatten(),
      LayerConfig::dense(2048),     LayerConfig::relu(),
      LayerConfig::dropout(keep_p), LayerConfig::dense(2),
  };
}

std::vector<LayerConfig> model_configs(ModelId id, float keep_p) {
  switch (id) {
    case ModelId::CnnA:
      return cnn_a_configs(keep_p);
    case ModelId::CnnB:
      return cnn_b_configs(keep_p);
    case ModelId::CnnC:
      return cnn_c_configs(keep_p);
  }
  throw ConfigError("unknown model id");
}

Label decide(const std::array<double, 2>& probs, double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw ConfigError("alpha must be in (0,1], got " + std::to_string(alpha));
  return probs[1] >= alpha * probs[0] ? Label::Seg : Label::NoSeg;
}

std::array<double, 2> softmax2(double logit_noseg, double logit_seg) {
  const double mx = logit_noseg > logit_seg ? logit_noseg : logit_seg;
  const double e0 = std::exp(logit_noseg - mx);
  const double e1 = std::exp(logit_seg - mx);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

std::vector<Prediction> predict_batch(Model<float>& model, const Tensor& batch,
                                      double alpha) {
  const Tensor logits = model.forward(batch, ForwardCtx{RunMode::Eval, 0});
  std::vector<Prediction> out(logits.shape[0]);
  for (std::size_t b = 0; b < logits.shape[0]; ++b) {
    const double l0 = logits.at2(b, 0), l1 = logits.at2(b, 1);
    if (!std::isfinite(l0) || !std::isfinite(l1))
      throw NumericError("non-finite logits in prediction row " + std::to_string(b));
    Prediction& p = out[b];
    p.probs = softmax2(l0, l1);
    p.label = decide(p.probs, alpha);
  }
  return out;
}

Prediction predict(Model<float>& model, const Tensor& window, double alpha) {
  if (window.rank() != 2 || window.shape[0] != model.m() || window.shape[1] != model.n())
    throw ShapeError("predict: window shape " + shape_str(window.shape) +
                     " does not match model input " + std::to_string(model.m()) + "x" +
                     std::to_string(model.n()));
  Tensor batch({1, 1, model.m(), model.n()});
  batch.data = window.data;
  return predict_batch(model, batch, alpha)[0];
}

namespace {

constexpr char kMagic[4] = {'S', 'B', 'D', 'C'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t take_u32(std::istream& in, const char* what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw CheckpointError(CheckpointError::Kind::Truncated,
                          std::string("checkpoint truncated reading ") + what);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint8_t take_u8(std::istream& in, const char* what) {
  char c;
  if (!in.get(c))
    throw CheckpointError(CheckpointError::Kind::Truncated,
                          std::string("checkpoint truncated reading ") + what);
  return static_cast<std::uint8_t>(c);
}

}  // namespace

void save_checkpoint(Model<float>& model, std::ostream& out) {
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  out.put(static_cast<char>(model.id()));
  put_u32(out, static_cast<std::uint32_t>(model.m()));
  put_u32(out, static_cast<std::uint32_t>(model.n()));
  put_u32(out, static_cast<std::uint32_t>(model.configs().size()));
  for (const LayerConfig& cfg : model.configs()) {
    out.put(static_cast<char>(cfg.kind));
    for (const std::uint32_t field : cfg.pack()) put_u32(out, field);
  }
  for (const Tensor* p : model.parameters()) {
    static_assert(sizeof(float) == 4);
    out.write(reinterpret_cast<const char*>(p->data.data()),
              static_cast<std::streamsize>(p->numel() * 4));
  }
  if (!out) throw IoError("checkpoint write failed");
}

void save_checkpoint(Model<float>& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);
  save_checkpoint(model, out);
}

Model<float> load_checkpoint(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw CheckpointError(CheckpointError::Kind::BadMagic, "checkpoint: bad magic");
  const std::uint32_t version = take_u32(in, "version");
  if (version != kVersion)
    throw CheckpointError(CheckpointError::Kind::BadVersion,
                          "checkpoint: unsupported version " + std::to_string(version));
  const std::uint8_t id_byte = take_u8(in, "model id");
  if (id_byte > 2)
    throw CheckpointError(CheckpointError::Kind::BadHeader,
                          "checkpoint: bad model id " + std::to_string(id_byte));
  const std::uint32_t m = take_u32(in, "window height");
  const std::uint32_t n = take_u32(in, "embedding dim");
  const std::uint32_t layer_count = take_u32(in, "layer count");
  if (m == 0 || n == 0 || layer_count == 0 || layer_count > 1024)
    throw CheckpointError(CheckpointError::Kind::BadHeader, "checkpoint: bad header dims");

  std::vector<LayerConfig> configs;
  configs.reserve(layer_count);
  for (std::uint32_t i = 0; i < layer_count; ++i) {
    const std::uint8_t kind_byte = take_u8(in, "layer kind");
    if (kind_byte > static_cast<std::uint8_t>(LayerKind::Flatten))
      throw CheckpointError(CheckpointError::Kind::BadHeader,
                            "checkpoint: bad layer kind " + std::to_string(kind_byte));
    std::array<std::uint32_t, 5> fields{};
    for (auto& f : fields) f = take_u32(in, "layer config");
    configs.push_back(LayerConfig::unpack(static_cast<LayerKind>(kind_byte), fields));
  }

  // Shape consistency: re-deriving the stack from (m, n) must reproduce the
  // stored records exactly.
  const std::vector<LayerConfig> stored = configs;
  Model<float> model = [&]() {
    try {
      return Model<float>(static_cast<ModelId>(id_byte), m, n, std::move(configs));
    } catch (const ShapeError& e) {
      throw CheckpointError(CheckpointError::Kind::ShapeMismatch,
                            std::string("checkpoint: inconsistent stack: ") + e.what());
    }
  }();
  for (std::size_t i = 0; i < stored.size(); ++i) {
    if (!(model.configs()[i] == stored[i]))
      throw CheckpointError(CheckpointError::Kind::ShapeMismatch,
                            "checkpoint: layer " + std::to_string(i) +
                                " config inconsistent with derived shapes");
  }

  std::size_t expected_floats = 0;
  for (Tensor* p : model.parameters()) expected_floats += p->numel();
  std::size_t read_bytes = 0;
  for (Tensor* p : model.parameters()) {
    in.read(reinterpret_cast<char*>(p->data.data()),
            static_cast<std::streamsize>(p->numel() * 4));
    read_bytes += static_cast<std::size_t>(in.gcount());
    if (!in)
      throw CheckpointError(CheckpointError::Kind::Truncated,
                            "checkpoint: truncated payload, expected " +
                                std::to_string(expected_floats * 4) + " bytes, got " +
                                std::to_string(read_bytes));
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw CheckpointError(CheckpointError::Kind::TrailingData,
                          "checkpoint: trailing data after payload");
  return model;
}

Model<float> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  return load_checkpoint(in);
}

}  // namespace sbd
