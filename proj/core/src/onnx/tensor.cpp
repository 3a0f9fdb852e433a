#include "onnx/tensor.hpp"

#include "docasref/embedding.hpp"

namespace docasref::onnx {

std::size_t numel_of(const std::vector<std::int64_t>& shape) {
  std::size_t n = 1;
  for (auto d : shape) {
    if (d < 0) throw BackendError("negative tensor dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::vector<std::size_t> strides_of(const std::vector<std::int64_t>& shape) {
  std::vector<std::size_t> s(shape.size(), 1);
  for (std::size_t k = shape.size(); k-- > 1;) s[k - 1] = s[k] * static_cast<std::size_t>(shape[k]);
  return s;
}

std::string shape_string(const std::vector<std::int64_t>& shape) {
  std::string out = "[";
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (k) out += ",";
    out += std::to_string(shape[k]);
  }
  return out + "]";
}

Tensor Tensor::floats(std::vector<std::int64_t> shape, std::vector<float> data) {
  Tensor t;
  t.dtype = DType::f32;
  t.shape = std::move(shape);
  t.f = std::move(data);
  if (t.f.size() != numel_of(t.shape)) throw BackendError("tensor data does not match shape " + shape_string(t.shape));
  return t;
}

Tensor Tensor::ints(std::vector<std::int64_t> shape, std::vector<std::int64_t> data) {
  Tensor t;
  t.dtype = DType::i64;
  t.shape = std::move(shape);
  t.i = std::move(data);
  if (t.i.size() != numel_of(t.shape)) throw BackendError("tensor data does not match shape " + shape_string(t.shape));
  return t;
}

std::size_t Tensor::numel() const { return is_float() ? f.size() : i.size(); }

std::vector<std::int64_t> Tensor::to_ints() const {
  if (!is_float()) return i;
  std::vector<std::int64_t> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = static_cast<std::int64_t>(f[k]);
  return out;
}

Tensor Tensor::cast(DType to) const {
  if (to == dtype) return *this;
  if (to == DType::i64) return ints(shape, to_ints());
  std::vector<float> out(i.size());
  for (std::size_t k = 0; k < i.size(); ++k) out[k] = static_cast<float>(i[k]);
  return floats(shape, std::move(out));
}

}  // namespace docasref::onnx
