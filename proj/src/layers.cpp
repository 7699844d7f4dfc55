#include "sbd/layers.hpp"

namespace sbd {

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv2d:
      return "conv2d";
    case LayerKind::MaxPool2d:
      return "maxpool2d";
    case LayerKind::Dense:
      return "dense";
    case LayerKind::Relu:
      return "relu";
    case LayerKind::Dropout:
      return "dropout";
    case LayerKind::Flatten:
      return "flatten";
  }
  return "?";
}

LayerConfig LayerConfig::conv(std::uint32_t filters, std::uint32_t kh, std::uint32_t kw) {
  LayerConfig c;
  c.kind = LayerKind::Conv2d;
  c.out_filters = filters;
  c.kh = kh;
  c.kw = kw;
  return c;
}

LayerConfig LayerConfig::pool(std::uint32_t kh, std::uint32_t kw, std::uint32_t sh,
                              std::uint32_t sw) {
  LayerConfig c;
  c.kind = LayerKind::MaxPool2d;
  c.pool_kh = kh;
  c.pool_kw = kw;
  c.sh = sh;
  c.sw = sw;
  return c;
}

LayerConfig LayerConfig::dense(std::uint32_t units) {
  LayerConfig c;
  c.kind = LayerKind::Dense;
  c.out_units = units;
  return c;
}

LayerConfig LayerConfig::relu() {
  LayerConfig c;
  c.kind = LayerKind::Relu;
  return c;
}

LayerConfig LayerConfig::dropout(float keep_p) {
  LayerConfig c;
  c.kind = LayerKind::Dropout;
  c.keep_p = keep_p;
  return c;
}

LayerConfig LayerConfig::flatten() {
  LayerConfig c;
  c.kind = LayerKind::Flatten;
  return c;
}

std::array<std::uint32_t, 5> LayerConfig::pack() const {
  switch (kind) {
    case LayerKind::Conv2d:
      return {out_filters, in_channels, kh, kw, 0};
    case LayerKind::MaxPool2d:
      return {pool_kh, pool_kw, sh, sw, 0};
    case LayerKind::Dense:
      return {out_units, in_units, 0, 0, 0};
    case LayerKind::Dropout:
      return {std::bit_cast<std::uint32_t>(keep_p), 0, 0, 0, 0};
    case LayerKind::Relu:
    case LayerKind::Flatten:
      return {0, 0, 0, 0, 0};
  }
  return {0, 0, 0, 0, 0};
}

LayerConfig LayerConfig::unpack(LayerKind kind, const std::array<std::uint32_t, 5>& f) {
  LayerConfig c;
  c.kind = kind;
  switch (kind) {
    case LayerKind::Conv2d:
      c.out_filters = f[0];
      c.in_channels = f[1];
      c.kh = f[2];
      c.kw = f[3];
      break;
    case LayerKind::MaxPool2d:
      c.pool_kh = f[0];
      c.pool_kw = f[1];
      c.sh = f[2];
      c.sw = f[3];
      break;
    case LayerKind::Dense:
      c.out_units = f[0];
      c.in_units = f[1];
      break;
    case LayerKind::Dropout:
      c.keep_p = std::bit_cast<float>(f[0]);
      break;
    case LayerKind::Relu:
    case LayerKind::Flatten:
      break;
  }
  return c;
}

std::string LayerConfig::describe() const {
  switch (kind) {
    case LayerKind::Conv2d:
      return "conv2d " + std::to_string(kh) + "x" + std::to_string(kw) + "/" +
             std::to_string(out_filters);
    case LayerKind::MaxPool2d:
      return "maxpool2d " + std::to_string(pool_kh) + "x" + std::to_string(pool_kw) +
             " stride " + std::to_string(sh) + "x" + std::to_string(sw);
    case LayerKind::Dense:
      return "dense " + std::to_string(out_units);
    case LayerKind::Dropout:
      return "dropout keep=" + std::to_string(keep_p);
    case LayerKind::Relu:
      return "relu";
    case LayerKind::Flatten:
      return "flatten";
  }
  return "?";
}

std::string StageShape::str() const {
  if (flat) return std::to_string(k);
  return std::to_string(c) + "x" + std::to_string(h) + "x" + std::to_string(w);
}

StageShape infer_output_shape(LayerConfig& cfg, const StageShape& in) {
  switch (cfg.kind) {
    case LayerKind::Conv2d: {
      if (in.flat) throw ShapeError(cfg.describe() + ": needs a spatial input, got flat " + in.str());
      if (cfg.kh == 0 || cfg.kw == 0 || cfg.out_filters == 0)
        throw ConfigError(cfg.describe() + ": kernel dims and filter count must be positive");
      if (cfg.kh > in.h || cfg.kw > in.w)
        throw ShapeError(cfg.describe() + ": kernel exceeds input " + in.str());
      cfg.in_channels = static_cast<std::uint32_t>(in.c);
      return {false, cfg.out_filters, in.h - cfg.kh + 1, in.w - cfg.kw + 1, 0};
    }
    case LayerKind::MaxPool2d: {
      if (in.flat) throw ShapeError(cfg.describe() + ": needs a spatial input, got flat " + in.str());
      if (cfg.pool_kh == 0 || cfg.pool_kw == 0 || cfg.sh == 0 || cfg.sw == 0)
        throw ConfigError(cfg.describe() + ": kernel and stride must be positive");
      if (cfg.pool_kh > in.h || cfg.pool_kw > in.w)
        throw ShapeError(cfg.describe() + ": kernel exceeds input " + in.str());
      return {false, in.c, (in.h - cfg.pool_kh) / cfg.sh + 1, (in.w - cfg.pool_kw) / cfg.sw + 1,
              0};
    }
    case LayerKind::Dense: {
      if (!in.flat) throw ShapeError(cfg.describe() + ": needs a flat input, got " + in.str());
      if (cfg.out_units == 0) throw ConfigError("dense: unit count must be positive");
      cfg.in_units = static_cast<std::uint32_t>(in.k);
      return {true, 1, 0, 0, cfg.out_units};
    }
    case LayerKind::Flatten: {
      if (in.flat) throw ShapeError("flatten: input already flat");
      return {true, 1, 0, 0, in.c * in.h * in.w};
    }
    case LayerKind::Relu:
    case LayerKind::Dropout:
      return in;
  }
  throw ConfigError("unknown layer kind");
}

}  // namespace sbd
