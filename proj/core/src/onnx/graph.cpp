#include "onnx/graph.hpp"

#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "docasref/embedding.hpp"
#include "onnx.pb.h"

namespace docasref::onnx {
namespace {

template <typename T>
std::vector<T> raw_values(const std::string& raw) {
  std::vector<T> out(raw.size() / sizeof(T));
  if (!out.empty()) std::memcpy(out.data(), raw.data(), out.size() * sizeof(T));
  return out;
}

Tensor to_tensor(const ::onnx::TensorProto& tp) {
  std::vector<std::int64_t> shape(tp.dims().begin(), tp.dims().end());
  if (tp.data_location() == ::onnx::TensorProto::EXTERNAL) {
    throw BackendError("tensor '" + tp.name() + "' uses external data, which is not supported");
  }
  const bool raw = tp.has_raw_data();
  switch (tp.data_type()) {
    case ::onnx::TensorProto::FLOAT: {
      auto v = raw ? raw_values<float>(tp.raw_data()) : std::vector<float>(tp.float_data().begin(), tp.float_data().end());
      return Tensor::floats(std::move(shape), std::move(v));
    }
    case ::onnx::TensorProto::DOUBLE: {
      std::vector<double> d =
          raw ? raw_values<double>(tp.raw_data()) : std::vector<double>(tp.double_data().begin(), tp.double_data().end());
      return Tensor::floats(std::move(shape), std::vector<float>(d.begin(), d.end()));
    }
    case ::onnx::TensorProto::INT64: {
      auto v = raw ? raw_values<std::int64_t>(tp.raw_data())
                   : std::vector<std::int64_t>(tp.int64_data().begin(), tp.int64_data().end());
      return Tensor::ints(std::move(shape), std::move(v));
    }
    case ::onnx::TensorProto::INT32: {
      std::vector<std::int32_t> d = raw ? raw_values<std::int32_t>(tp.raw_data())
                                        : std::vector<std::int32_t>(tp.int32_data().begin(), tp.int32_data().end());
      return Tensor::ints(std::move(shape), std::vector<std::int64_t>(d.begin(), d.end()));
    }
    case ::onnx::TensorProto::BOOL:
    case ::onnx::TensorProto::UINT8:
    case ::onnx::TensorProto::INT8: {
      std::vector<std::int64_t> v;
      if (raw) {
        for (unsigned char c : tp.raw_data()) {
          v.push_back(tp.data_type() == ::onnx::TensorProto::INT8 ? static_cast<signed char>(c) : c);
        }
      } else {
        v.assign(tp.int32_data().begin(), tp.int32_data().end());
      }
      return Tensor::ints(std::move(shape), std::move(v));
    }
    default:
      throw BackendError("tensor '" + tp.name() + "' has unsupported element type " + std::to_string(tp.data_type()));
  }
}

Attributes to_attributes(const ::onnx::NodeProto& node) {
  Attributes a;
  for (const auto& attr : node.attribute()) {
    switch (attr.type()) {
      case ::onnx::AttributeProto::INT: a.ints[attr.name()] = attr.i(); break;
      case ::onnx::AttributeProto::FLOAT: a.floats[attr.name()] = attr.f(); break;
      case ::onnx::AttributeProto::STRING: a.strings[attr.name()] = attr.s(); break;
      case ::onnx::AttributeProto::INTS: a.int_lists[attr.name()].assign(attr.ints().begin(), attr.ints().end()); break;
      case ::onnx::AttributeProto::FLOATS:
        a.float_lists[attr.name()].assign(attr.floats().begin(), attr.floats().end());
        break;
      case ::onnx::AttributeProto::TENSOR: a.tensors.emplace(attr.name(), to_tensor(attr.t())); break;
      default:
        throw BackendError("node '" + node.name() + "' (" + node.op_type() + ") has unsupported attribute '" +
                           attr.name() + "'");
    }
  }
  return a;
}

}  // namespace

Graph Graph::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BackendError("cannot open ONNX model " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

Graph Graph::parse(const std::string& bytes, const std::string& origin) {
  ::onnx::ModelProto model;
  if (!model.ParseFromString(bytes)) throw BackendError("cannot parse ONNX model " + origin);
  Graph g;
  for (const auto& op : model.opset_import()) {
    if (op.domain().empty() || op.domain() == "ai.onnx") g.opset_ = static_cast<int>(op.version());
  }
  if (g.opset_ == 0) throw BackendError(origin + ": no default-domain opset import");
  for (const auto& p : model.metadata_props()) g.metadata_[p.key()] = p.value();

  const auto& graph = model.graph();
  for (const auto& init : graph.initializer()) g.initializers_.emplace(init.name(), to_tensor(init));
  for (const auto& in : graph.input()) {
    if (!g.initializers_.count(in.name())) g.inputs_.push_back(in.name());
  }
  for (const auto& out : graph.output()) g.outputs_.push_back(out.name());

  std::unordered_set<std::string> known(g.inputs_.begin(), g.inputs_.end());
  for (const auto& [name, t] : g.initializers_) known.insert(name);
  for (const auto& n : graph.node()) {
    if (!n.domain().empty() && n.domain() != "ai.onnx") {
      throw BackendError(origin + ": operator domain '" + n.domain() + "' is not supported");
    }
    if (!is_supported_op(n.op_type())) {
      throw BackendError(origin + ": unsupported ONNX operator '" + n.op_type() + "'");
    }
    Node node{n.op_type(), n.name(), {n.input().begin(), n.input().end()}, {n.output().begin(), n.output().end()},
              to_attributes(n)};
    for (const auto& i : node.inputs) {
      if (!i.empty() && !known.count(i)) {
        throw BackendError(origin + ": node '" + n.name() + "' reads '" + i + "' before it is produced");
      }
    }
    known.insert(node.outputs.begin(), node.outputs.end());
    g.nodes_.push_back(std::move(node));
  }
  for (const auto& o : g.outputs_) {
    if (!known.count(o)) throw BackendError(origin + ": graph output '" + o + "' is never produced");
  }
  return g;
}

bool Graph::has_input(const std::string& name) const {
  return std::find(inputs_.begin(), inputs_.end(), name) != inputs_.end();
}

bool Graph::has_output(const std::string& name) const {
  return std::find(outputs_.begin(), outputs_.end(), name) != outputs_.end();
}

const Tensor* Graph::initializer(const std::string& name) const {
  auto it = initializers_.find(name);
  return it == initializers_.end() ? nullptr : &it->second;
}

std::optional<std::int64_t> Graph::gather_table_rows(const std::string& input) const {
  // Follow identity-like casts from the input to the first Gather using it as indices.
  std::set<std::string> aliases{input};
  for (const auto& n : nodes_) {
    if ((n.op_type == "Cast" || n.op_type == "Identity") && !n.inputs.empty() && aliases.count(n.inputs[0])) {
      aliases.insert(n.outputs.begin(), n.outputs.end());
      continue;
    }
    if (n.op_type == "Gather" && n.inputs.size() == 2 && aliases.count(n.inputs[1])) {
      if (const Tensor* t = initializer(n.inputs[0]); t && t->rank() >= 1 && n.attrs.get_int("axis", 0) == 0) {
        return t->shape[0];
      }
    }
  }
  return std::nullopt;
}

std::vector<Tensor> Graph::run(const std::map<std::string, Tensor>& feeds, const std::vector<std::string>& wanted) const {
  for (const auto& name : inputs_) {
    if (!feeds.count(name)) throw BackendError("ONNX input '" + name + "' was not provided");
  }
  // Only evaluate nodes that contribute to the requested outputs.
  std::vector<bool> needed(nodes_.size(), false);
  std::unordered_set<std::string> pending(wanted.begin(), wanted.end());
  for (std::size_t k = nodes_.size(); k-- > 0;) {
    const auto& n = nodes_[k];
    bool use = false;
    for (const auto& o : n.outputs) use |= pending.count(o) > 0;
    if (!use) continue;
    needed[k] = true;
    for (const auto& i : n.inputs) {
      if (!i.empty()) pending.insert(i);
    }
  }
  // Last reader of every intermediate value, so it can be released early.
  std::unordered_map<std::string, std::size_t> last_use;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (!needed[k]) continue;
    for (const auto& i : nodes_[k].inputs) last_use[i] = k;
  }
  const std::unordered_set<std::string> keep(wanted.begin(), wanted.end());

  std::unordered_map<std::string, Tensor> values;
  auto lookup = [&](const std::string& name) -> const Tensor* {
    if (name.empty()) return nullptr;
    if (auto it = values.find(name); it != values.end()) return &it->second;
    if (auto it = feeds.find(name); it != feeds.end()) return &it->second;
    if (auto it = initializers_.find(name); it != initializers_.end()) return &it->second;
    throw BackendError("ONNX value '" + name + "' is not available");
  };

  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (!needed[k]) continue;
    const auto& n = nodes_[k];
    Inputs in;
    in.reserve(n.inputs.size());
    for (const auto& i : n.inputs) in.push_back(lookup(i));
    std::vector<Tensor> out;
    try {
      out = run_op(n.op_type, in, n.attrs, opset_);
    } catch (const BackendError& e) {
      throw BackendError(std::string(e.what()) + " (node '" + n.name + "')");
    }
    for (std::size_t j = 0; j < n.outputs.size() && j < out.size(); ++j) {
      if (!n.outputs[j].empty()) values.insert_or_assign(n.outputs[j], std::move(out[j]));
    }
    for (const auto& i : n.inputs) {
      auto it = last_use.find(i);
      if (it != last_use.end() && it->second == k && !keep.count(i)) values.erase(i);
    }
  }

  std::vector<Tensor> result;
  for (const auto& w : wanted) result.push_back(*lookup(w));
  return result;
}

}  // namespace docasref::onnx
