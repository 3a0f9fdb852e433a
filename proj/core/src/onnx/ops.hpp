#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "onnx/tensor.hpp"

namespace docasref::onnx {

struct Attributes {
  std::map<std::string, std::int64_t> ints;
  std::map<std::string, float> floats;
  std::map<std::string, std::string> strings;
  std::map<std::string, std::vector<std::int64_t>> int_lists;
  std::map<std::string, std::vector<float>> float_lists;
  std::map<std::string, Tensor> tensors;

  std::int64_t get_int(const std::string& name, std::int64_t fallback) const;
  float get_float(const std::string& name, float fallback) const;
  std::optional<std::vector<std::int64_t>> get_ints(const std::string& name) const;
};

/// Inputs in node order; omitted optional inputs are nullptr.
using Inputs = std::vector<const Tensor*>;

bool is_supported_op(const std::string& op_type);

/// Evaluates one node of the default ONNX domain.
std::vector<Tensor> run_op(const std::string& op_type, const Inputs& inputs, const Attributes& attrs, int opset);

}  // namespace docasref::onnx
