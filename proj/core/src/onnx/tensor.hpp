#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace docasref::onnx {

enum class DType { f32, i64 };

/// Dense row-major tensor. Integer and boolean ONNX types are held as i64,
/// floating types as f32.
struct Tensor {
  DType dtype = DType::f32;
  std::vector<std::int64_t> shape;
  std::vector<float> f;
  std::vector<std::int64_t> i;

  static Tensor floats(std::vector<std::int64_t> shape, std::vector<float> data);
  static Tensor ints(std::vector<std::int64_t> shape, std::vector<std::int64_t> data);
  static Tensor scalar_int(std::int64_t v) { return ints({}, {v}); }

  std::size_t numel() const;
  std::size_t rank() const { return shape.size(); }
  bool is_float() const { return dtype == DType::f32; }

  double get(std::size_t k) const { return is_float() ? f[k] : static_cast<double>(i[k]); }
  /// Values as int64 (floats are truncated).
  std::vector<std::int64_t> to_ints() const;
  Tensor cast(DType to) const;
};

std::size_t numel_of(const std::vector<std::int64_t>& shape);
std::vector<std::size_t> strides_of(const std::vector<std::int64_t>& shape);
std::string shape_string(const std::vector<std::int64_t>& shape);

}  // namespace docasref::onnx
