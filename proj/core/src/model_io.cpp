// Copyright 2026 The NALM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include <fmt/format.h>
#include <zlib.h>

#include "nalm/disaggregation.hpp"
#include "nalm/error.hpp"

namespace nalm {
namespace {

constexpr std::string_view kMagic = "NALM-MODEL";

enum class Kind : std::uint8_t { kConstant = 0, kForest = 1, kMargin = 2 };

std::uint32_t checksum(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()),
            static_cast<uInt>(bytes.size())));
}

class Writer {
 public:
  void raw(std::string_view bytes) { out_.append(bytes); }
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void size(std::size_t v) { u32(static_cast<std::uint32_t>(v)); }
  void str(std::string_view s) {
    size(s.size());
    raw(s);
  }
  std::string take() { return std::move(out_); }
  std::string_view view() const { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::string_view raw(std::size_t n) {
    need(n);
    auto v = in_.substr(pos_, n);
    pos_ += n;
    return v;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(raw(1)[0]); }
  std::uint32_t u32() {
    const auto b = raw(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(b[static_cast<std::size_t>(i)]);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::uint64_t u64() {
    const auto b = raw(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(b[static_cast<std::size_t>(i)]);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  double finite() {
    const double v = f64();
    if (!std::isfinite(v)) throw ModelFormatError("model payload holds a non-finite real");
    return v;
  }
  /// Element count, bounded by the bytes left so corrupt counts cannot
  /// trigger huge allocations.
  std::size_t count(std::size_t min_element_bytes) {
    const std::size_t n = u32();
    if (min_element_bytes > 0 && n > remaining() / min_element_bytes) {
      throw ModelFormatError("model payload truncated");
    }
    return n;
  }
  std::string str() { return std::string(raw(count(1))); }
  std::size_t remaining() const { return in_.size() - pos_; }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw ModelFormatError("model payload truncated");
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

void write_config(Writer& w, const TrainConfig& c) {
  w.u32(static_cast<std::uint32_t>(c.window));
  w.u8(static_cast<std::uint8_t>(c.backend));
  w.u32(static_cast<std::uint32_t>(c.forest.n_trees));
  w.u32(static_cast<std::uint32_t>(c.forest.max_depth));
  w.u32(static_cast<std::uint32_t>(c.forest.min_leaf));
  w.u32(static_cast<std::uint32_t>(c.margin.epochs));
  w.f64(c.margin.learning_rate);
  w.f64(c.margin.regularization);
  w.u64(c.seed);
  w.u8(c.class_weighting ? 1 : 0);
}

TrainConfig read_config(Reader& r) {
  TrainConfig c;
  c.window = static_cast<int>(r.u32());
  const auto backend = r.u8();
  if (backend > 1) throw ModelFormatError("unknown backend tag");
  c.backend = static_cast<Backend>(backend);
  c.forest.n_trees = static_cast<int>(r.u32());
  c.forest.max_depth = static_cast<int>(r.u32());
  c.forest.min_leaf = static_cast<int>(r.u32());
  c.margin.epochs = static_cast<int>(r.u32());
  c.margin.learning_rate = r.f64();
  c.margin.regularization = r.f64();
  c.seed = r.u64();
  c.class_weighting = r.u8() != 0;
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ModelFormatError(fmt::format("model config invalid: {}", e.what()));
  }
  return c;
}

void write_tree(Writer& w, const DecisionTree& tree) {
  w.size(tree.nodes.size());
  for (const auto& node : tree.nodes) {
    w.i32(node.feature);
    w.u8(node.threshold_bin);
    w.u8(node.on ? 1 : 0);
    w.u32(node.left);
    w.u32(node.right);
  }
}

DecisionTree read_tree(Reader& r, const QuantileBinner& binner) {
  DecisionTree tree;
  const std::size_t n = r.count(14);
  if (n == 0) throw ModelFormatError("empty decision tree");
  tree.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& node = tree.nodes[i];
    node.feature = r.i32();
    node.threshold_bin = r.u8();
    node.on = r.u8() != 0;
    node.left = r.u32();
    node.right = r.u32();
    if (node.is_leaf()) continue;
    // Preorder storage: children come strictly after their parent.
    if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= binner.dimension() ||
        node.left <= i || node.right <= i || node.left >= n || node.right >= n) {
      throw ModelFormatError("corrupt decision tree node");
    }
  }
  return tree;
}

}  // namespace

std::string save_model(const DisaggregationModel& model) {
  Writer w;
  w.raw(kMagic);
  w.u32(DisaggregationModel::kFormatVersion);
  write_config(w, model.config);

  w.size(model.binner.dimension());
  for (const auto& edges : model.binner.all_edges()) {
    w.size(edges.size());
    for (double e : edges) w.f64(e);
  }
  w.size(model.standardizer.dimension());
  for (double m : model.standardizer.mean()) w.f64(m);
  for (double s : model.standardizer.scale()) w.f64(s);

  w.size(model.classifiers.size());
  for (const auto& [appliance, classifier] : model.classifiers) {
    w.str(appliance.name);
    w.str(appliance.type_tag);
    if (const auto* c = std::get_if<ConstantClassifier>(&classifier)) {
      w.u8(static_cast<std::uint8_t>(Kind::kConstant));
      w.u8(c->on ? 1 : 0);
    } else if (const auto* f = std::get_if<Forest>(&classifier)) {
      w.u8(static_cast<std::uint8_t>(Kind::kForest));
      w.size(f->trees.size());
      for (const auto& tree : f->trees) write_tree(w, tree);
    } else {
      const auto& m = std::get<MarginClassifier>(classifier);
      w.u8(static_cast<std::uint8_t>(Kind::kMargin));
      w.f64(m.bias);
      w.size(m.dense_weights.size());
      for (double v : m.dense_weights) w.f64(v);
      w.size(m.bin_offsets.size());
      for (auto v : m.bin_offsets) w.u32(v);
      w.size(m.bin_weights.size());
      for (double v : m.bin_weights) w.f64(v);
    }
  }
  w.u32(checksum(w.view()));
  return w.take();
}

DisaggregationModel load_model(std::string_view bytes) {
  Reader header(bytes);
  if (bytes.size() < kMagic.size() || header.raw(kMagic.size()) != kMagic) {
    throw ModelFormatError("not a model file (bad magic)");
  }
  const std::uint32_t version = header.u32();
  if (version != DisaggregationModel::kFormatVersion) {
    throw UnsupportedVersionError(fmt::format(
        "unsupported model format version {} (expected {})", version,
        DisaggregationModel::kFormatVersion));
  }
  if (bytes.size() < kMagic.size() + 8) throw ModelFormatError("model payload truncated");
  const auto body = bytes.substr(0, bytes.size() - 4);
  Reader tail(bytes.substr(bytes.size() - 4));
  if (tail.u32() != checksum(body)) {
    throw ModelFormatError("model checksum mismatch (truncated or corrupt)");
  }

  Reader r(body);
  r.raw(kMagic.size());
  r.u32();
  DisaggregationModel model;
  model.config = read_config(r);

  std::vector<std::vector<double>> edges(r.count(4));
  for (auto& e : edges) {
    e.resize(r.count(8));
    for (auto& v : e) v = r.finite();
  }
  try {
    model.binner = QuantileBinner(std::move(edges));
    const std::size_t d = r.count(16);
    std::vector<double> mean(d), scale(d);
    for (auto& v : mean) v = r.finite();
    for (auto& v : scale) v = r.finite();
    model.standardizer = Standardizer(std::move(mean), std::move(scale));
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(fmt::format("corrupt feature scaling: {}", e.what()));
  }
  const std::size_t dim = feature_dimension(model.config.window);
  if (model.binner.dimension() != dim || model.standardizer.dimension() != dim) {
    throw ModelFormatError("feature scaling does not match the configured window");
  }

  const std::size_t appliances = r.count(10);
  for (std::size_t a = 0; a < appliances; ++a) {
    ApplianceClassifier entry;
    entry.appliance.name = r.str();
    entry.appliance.type_tag = r.str();
    if (entry.appliance.name.empty() ||
        (!model.classifiers.empty() &&
         model.classifiers.back().appliance.name >= entry.appliance.name)) {
      throw ModelFormatError("appliance entries must be named and sorted");
    }
    switch (static_cast<Kind>(r.u8())) {
      case Kind::kConstant:
        entry.classifier = ConstantClassifier{r.u8() != 0};
        break;
      case Kind::kForest: {
        Forest forest;
        forest.trees.resize(r.count(18));
        if (forest.trees.empty()) throw ModelFormatError("empty forest");
        for (auto& tree : forest.trees) tree = read_tree(r, model.binner);
        entry.classifier = std::move(forest);
        break;
      }
      case Kind::kMargin: {
        MarginClassifier m;
        m.bias = r.finite();
        m.dense_weights.resize(r.count(8));
        for (auto& v : m.dense_weights) v = r.finite();
        m.bin_offsets.resize(r.count(4));
        for (auto& v : m.bin_offsets) v = r.u32();
        m.bin_weights.resize(r.count(8));
        for (auto& v : m.bin_weights) v = r.finite();
        if (m.dense_weights.size() != dim || m.bin_offsets.size() != dim) {
          throw ModelFormatError("margin classifier width mismatch");
        }
        for (std::size_t f = 0; f < dim; ++f) {
          if (m.bin_offsets[f] + model.binner.bin_count(f) > m.bin_weights.size()) {
            throw ModelFormatError("margin classifier bin block out of range");
          }
        }
        entry.classifier = std::move(m);
        break;
      }
      default:
        throw ModelFormatError("unknown classifier kind");
    }
    model.classifiers.push_back(std::move(entry));
  }
  if (!r.done()) throw ModelFormatError("trailing bytes after model payload");
  return model;
}

}  // namespace nalm
