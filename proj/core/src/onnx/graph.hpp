#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "onnx/ops.hpp"
#include "onnx/tensor.hpp"

namespace docasref::onnx {

/// A loaded ONNX model evaluated node by node on the CPU.
class Graph {
 public:
  static Graph load(const std::filesystem::path& path);
  static Graph parse(const std::string& bytes, const std::string& origin);

  /// Runtime inputs (initializers excluded), in declaration order.
  const std::vector<std::string>& inputs() const { return inputs_; }
  const std::vector<std::string>& outputs() const { return outputs_; }
  bool has_input(const std::string& name) const;
  bool has_output(const std::string& name) const;

  const std::map<std::string, std::string>& metadata() const { return metadata_; }
  int opset() const { return opset_; }

  const Tensor* initializer(const std::string& name) const;

  /// Row count of the embedding table gathered by `input`, when the graph
  /// feeds that input straight into a Gather over an initializer.
  std::optional<std::int64_t> gather_table_rows(const std::string& input) const;

  std::vector<Tensor> run(const std::map<std::string, Tensor>& feeds, const std::vector<std::string>& wanted) const;

 private:
  struct Node {
    std::string op_type;
    std::string name;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    Attributes attrs;
  };

  std::vector<Node> nodes_;
  std::unordered_map<std::string, Tensor> initializers_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::map<std::string, std::string> metadata_;
  int opset_ = 0;
};

}  // namespace docasref::onnx
