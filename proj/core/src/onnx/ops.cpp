#include "onnx/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "docasref/embedding.hpp"

namespace docasref::onnx {

std::int64_t Attributes::get_int(const std::string& name, std::int64_t fallback) const {
  auto it = ints.find(name);
  return it == ints.end() ? fallback : it->second;
}

float Attributes::get_float(const std::string& name, float fallback) const {
  auto it = floats.find(name);
  return it == floats.end() ? fallback : it->second;
}

std::optional<std::vector<std::int64_t>> Attributes::get_ints(const std::string& name) const {
  auto it = int_lists.find(name);
  if (it == int_lists.end()) return std::nullopt;
  return it->second;
}

namespace {

[[noreturn]] void fail(const std::string& op, const std::string& what) {
  throw BackendError("ONNX " + op + ": " + what);
}

const Tensor& need(const Inputs& in, std::size_t k, const char* op) {
  if (k >= in.size() || in[k] == nullptr) fail(op, "missing input " + std::to_string(k));
  return *in[k];
}

const Tensor* opt(const Inputs& in, std::size_t k) { return k < in.size() ? in[k] : nullptr; }

std::int64_t norm_axis(std::int64_t axis, std::size_t rank, const char* op) {
  const auto r = static_cast<std::int64_t>(rank);
  if (axis < -r || axis >= r) fail(op, "axis " + std::to_string(axis) + " out of range for rank " + std::to_string(r));
  return axis < 0 ? axis + r : axis;
}

// ---------------------------------------------------------------------------
// Broadcasting

std::vector<std::int64_t> broadcast_shape(const std::vector<std::vector<std::int64_t>>& shapes, const char* op) {
  std::size_t rank = 0;
  for (const auto& s : shapes) rank = std::max(rank, s.size());
  std::vector<std::int64_t> out(rank, 1);
  for (const auto& s : shapes) {
    const std::size_t off = rank - s.size();
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto d = s[k];
      auto& o = out[off + k];
      if (d == o || d == 1) continue;
      if (o == 1) {
        o = d;
        continue;
      }
      fail(op, "incompatible shapes for broadcasting");
    }
  }
  return out;
}

// Strides of `in` aligned to `out`, zero along broadcast dimensions.
std::vector<std::size_t> aligned_strides(const std::vector<std::int64_t>& in, const std::vector<std::int64_t>& out) {
  std::vector<std::size_t> s(out.size(), 0);
  const auto st = strides_of(in);
  const std::size_t off = out.size() - in.size();
  for (std::size_t k = 0; k < in.size(); ++k) s[off + k] = in[k] == 1 ? 0 : st[k];
  return s;
}

// Calls f(out_index, offsets) for every element of the broadcast output.
template <std::size_t N, typename F>
void for_each_broadcast(const std::vector<std::int64_t>& out_shape, const std::array<std::vector<std::size_t>, N>& strides,
                        F&& f) {
  const std::size_t total = numel_of(out_shape);
  if (total == 0) return;
  const std::size_t rank = out_shape.size();
  if (rank == 0) {
    std::array<std::size_t, N> o{};
    f(std::size_t{0}, o);
    return;
  }
  std::vector<std::int64_t> idx(rank, 0);
  std::array<std::size_t, N> off{};
  const auto inner = static_cast<std::size_t>(out_shape[rank - 1]);
  std::size_t k = 0;
  while (k < total) {
    std::array<std::size_t, N> o = off;
    for (std::size_t j = 0; j < inner; ++j) {
      f(k + j, o);
      for (std::size_t n = 0; n < N; ++n) o[n] += strides[n][rank - 1];
    }
    k += inner;
    // advance outer dims
    for (std::size_t d = rank - 1; d-- > 0;) {
      ++idx[d];
      for (std::size_t n = 0; n < N; ++n) off[n] += strides[n][d];
      if (idx[d] < out_shape[d]) break;
      for (std::size_t n = 0; n < N; ++n) off[n] -= strides[n][d] * static_cast<std::size_t>(idx[d]);
      idx[d] = 0;
    }
  }
}

template <typename T, typename Op>
std::vector<T> binary_loop(const std::vector<T>& a, const std::vector<std::int64_t>& as, const std::vector<T>& b,
                           const std::vector<std::int64_t>& bs, const std::vector<std::int64_t>& out_shape, Op op) {
  std::vector<T> out(numel_of(out_shape));
  if (as == bs) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = op(a[k], b[k]);
    return out;
  }
  if (b.size() == 1) {
    const T bv = b[0];
    if (a.size() == out.size()) {
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = op(a[k], bv);
      return out;
    }
  }
  std::array<std::vector<std::size_t>, 2> st{aligned_strides(as, out_shape), aligned_strides(bs, out_shape)};
  for_each_broadcast<2>(out_shape, st, [&](std::size_t k, const std::array<std::size_t, 2>& o) {
    out[k] = op(a[o[0]], b[o[1]]);
  });
  return out;
}

enum class BinOp { add, sub, mul, div, pow, equal, greater, less, and_, or_ };

Tensor binary(const std::string& name, BinOp op, const Tensor& a, const Tensor& b) {
  const auto out_shape = broadcast_shape({a.shape, b.shape}, name.c_str());
  const bool compare = op == BinOp::equal || op == BinOp::greater || op == BinOp::less;
  if (!a.is_float() && !b.is_float()) {
    auto fn = [op](std::int64_t x, std::int64_t y) -> std::int64_t {
      switch (op) {
        case BinOp::add: return x + y;
        case BinOp::sub: return x - y;
        case BinOp::mul: return x * y;
        case BinOp::div: return y == 0 ? 0 : x / y;
        case BinOp::pow: return static_cast<std::int64_t>(std::pow(static_cast<double>(x), static_cast<double>(y)));
        case BinOp::equal: return x == y;
        case BinOp::greater: return x > y;
        case BinOp::less: return x < y;
        case BinOp::and_: return (x != 0) && (y != 0);
        case BinOp::or_: return (x != 0) || (y != 0);
      }
      return 0;
    };
    return Tensor::ints(out_shape, binary_loop(a.i, a.shape, b.i, b.shape, out_shape, fn));
  }
  const Tensor af = a.cast(DType::f32);
  const Tensor bf = b.cast(DType::f32);
  if (compare) {
    std::vector<float> r;
    auto fn = [op](float x, float y) -> float {
      if (op == BinOp::equal) return x == y ? 1.f : 0.f;
      if (op == BinOp::greater) return x > y ? 1.f : 0.f;
      return x < y ? 1.f : 0.f;
    };
    return Tensor::floats(out_shape, binary_loop(af.f, af.shape, bf.f, bf.shape, out_shape, fn)).cast(DType::i64);
  }
  switch (op) {
    case BinOp::add:
      return Tensor::floats(out_shape, binary_loop(af.f, af.shape, bf.f, bf.shape, out_shape, std::plus<float>()));
    case BinOp::sub:
      return Tensor::floats(out_shape, binary_loop(af.f, af.shape, bf.f, bf.shape, out_shape, std::minus<float>()));
    case BinOp::mul:
      return Tensor::floats(out_shape, binary_loop(af.f, af.shape, bf.f, bf.shape, out_shape, std::multiplies<float>()));
    case BinOp::div:
      return Tensor::floats(out_shape, binary_loop(af.f, af.shape, bf.f, bf.shape, out_shape, std::divides<float>()));
    case BinOp::pow:
      return Tensor::floats(out_shape, binary_loop(af.f, af.shape, bf.f, bf.shape, out_shape, [](float x, float y) {
                              if (y == 2.f) return x * x;
                              return std::pow(x, y);
                            }));
    default:
      fail(name, "unsupported operand types");
  }
}

Tensor unary_float(const Tensor& x, float (*fn)(float)) {
  const Tensor xf = x.cast(DType::f32);
  std::vector<float> out(xf.f.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = fn(xf.f[k]);
  return Tensor::floats(xf.shape, std::move(out));
}

// ---------------------------------------------------------------------------
// Shape manipulation

Tensor reshape_to(const Tensor& x, std::vector<std::int64_t> shape) {
  Tensor t = x;
  t.shape = std::move(shape);
  if (numel_of(t.shape) != x.numel()) fail("Reshape", "cannot reshape " + shape_string(x.shape) + " to " + shape_string(t.shape));
  return t;
}

Tensor op_reshape(const Inputs& in) {
  const Tensor& x = need(in, 0, "Reshape");
  auto target = need(in, 1, "Reshape").to_ints();
  std::int64_t known = 1;
  int infer = -1;
  for (std::size_t k = 0; k < target.size(); ++k) {
    if (target[k] == 0) {
      if (k >= x.shape.size()) fail("Reshape", "0 refers to a missing input dimension");
      target[k] = x.shape[k];
    }
    if (target[k] == -1) {
      if (infer >= 0) fail("Reshape", "more than one -1 in target shape");
      infer = static_cast<int>(k);
    } else {
      known *= target[k];
    }
  }
  if (infer >= 0) {
    if (known == 0) fail("Reshape", "cannot infer dimension with zero-sized target");
    target[infer] = static_cast<std::int64_t>(x.numel()) / known;
  }
  return reshape_to(x, std::move(target));
}

std::vector<std::int64_t> axes_from(const Inputs& in, std::size_t k, const Attributes& attrs, int opset, int since) {
  if (opset >= since) {
    if (const Tensor* t = opt(in, k)) return t->to_ints();
    return {};
  }
  return attrs.get_ints("axes").value_or(std::vector<std::int64_t>{});
}

Tensor op_unsqueeze(const Inputs& in, const Attributes& attrs, int opset) {
  const Tensor& x = need(in, 0, "Unsqueeze");
  auto axes = axes_from(in, 1, attrs, opset, 13);
  const std::size_t rank = x.rank() + axes.size();
  for (auto& a : axes) a = norm_axis(a, rank, "Unsqueeze");
  std::sort(axes.begin(), axes.end());
  std::vector<std::int64_t> shape;
  std::size_t src = 0;
  for (std::size_t d = 0; d < rank; ++d) {
    if (std::binary_search(axes.begin(), axes.end(), static_cast<std::int64_t>(d))) {
      shape.push_back(1);
    } else {
      shape.push_back(x.shape.at(src++));
    }
  }
  return reshape_to(x, std::move(shape));
}

Tensor op_squeeze(const Inputs& in, const Attributes& attrs, int opset) {
  const Tensor& x = need(in, 0, "Squeeze");
  auto axes = axes_from(in, 1, attrs, opset, 13);
  for (auto& a : axes) a = norm_axis(a, x.rank(), "Squeeze");
  std::vector<std::int64_t> shape;
  for (std::size_t d = 0; d < x.rank(); ++d) {
    const bool listed = std::find(axes.begin(), axes.end(), static_cast<std::int64_t>(d)) != axes.end();
    if (axes.empty() ? x.shape[d] == 1 : listed) {
      if (x.shape[d] != 1) fail("Squeeze", "cannot squeeze a dimension that is not 1");
      continue;
    }
    shape.push_back(x.shape[d]);
  }
  return reshape_to(x, std::move(shape));
}

template <typename T>
std::vector<T> transpose_data(const std::vector<T>& src, const std::vector<std::int64_t>& shape,
                              const std::vector<std::int64_t>& perm, std::vector<std::int64_t>& out_shape) {
  const std::size_t rank = shape.size();
  out_shape.assign(rank, 0);
  const auto in_st = strides_of(shape);
  std::vector<std::size_t> st(rank);
  for (std::size_t d = 0; d < rank; ++d) {
    out_shape[d] = shape[perm[d]];
    st[d] = in_st[perm[d]];
  }
  std::vector<T> out(src.size());
  std::array<std::vector<std::size_t>, 1> strides{st};
  for_each_broadcast<1>(out_shape, strides, [&](std::size_t k, const std::array<std::size_t, 1>& o) { out[k] = src[o[0]]; });
  return out;
}

Tensor op_transpose(const Inputs& in, const Attributes& attrs) {
  const Tensor& x = need(in, 0, "Transpose");
  std::vector<std::int64_t> perm;
  if (auto p = attrs.get_ints("perm")) {
    perm = *p;
  } else {
    for (std::size_t d = x.rank(); d-- > 0;) perm.push_back(static_cast<std::int64_t>(d));
  }
  if (perm.size() != x.rank()) fail("Transpose", "perm length does not match rank");
  std::vector<std::int64_t> out_shape;
  if (x.is_float()) {
    auto data = transpose_data(x.f, x.shape, perm, out_shape);
    return Tensor::floats(out_shape, std::move(data));
  }
  auto data = transpose_data(x.i, x.shape, perm, out_shape);
  return Tensor::ints(out_shape, std::move(data));
}

Tensor op_shape(const Inputs& in, const Attributes& attrs) {
  const Tensor& x = need(in, 0, "Shape");
  const auto r = static_cast<std::int64_t>(x.rank());
  auto clamp = [r](std::int64_t v) {
    if (v < 0) v += r;
    return std::clamp<std::int64_t>(v, 0, r);
  };
  const auto start = clamp(attrs.get_int("start", 0));
  const auto end = clamp(attrs.get_int("end", r));
  std::vector<std::int64_t> dims;
  for (auto d = start; d < end; ++d) dims.push_back(x.shape[d]);
  const auto n = static_cast<std::int64_t>(dims.size());
  return Tensor::ints({n}, std::move(dims));
}

template <typename T>
std::vector<T> gather_data(const std::vector<T>& data, const std::vector<std::int64_t>& shape, std::size_t axis,
                           const std::vector<std::int64_t>& idx) {
  std::size_t outer = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= static_cast<std::size_t>(shape[d]);
  std::size_t inner = 1;
  for (std::size_t d = axis + 1; d < shape.size(); ++d) inner *= static_cast<std::size_t>(shape[d]);
  const auto dim = shape[axis];
  std::vector<T> out;
  out.reserve(outer * idx.size() * inner);
  for (std::size_t o = 0; o < outer; ++o) {
    for (auto j : idx) {
      if (j < 0) j += dim;
      if (j < 0 || j >= dim) fail("Gather", "index " + std::to_string(j) + " out of range for dimension " + std::to_string(dim));
      const auto* base = data.data() + (o * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)) * inner;
      out.insert(out.end(), base, base + inner);
    }
  }
  return out;
}

Tensor op_gather(const Inputs& in, const Attributes& attrs) {
  const Tensor& x = need(in, 0, "Gather");
  const Tensor& ind = need(in, 1, "Gather");
  const auto axis = static_cast<std::size_t>(norm_axis(attrs.get_int("axis", 0), x.rank(), "Gather"));
  const auto idx = ind.to_ints();
  std::vector<std::int64_t> shape(x.shape.begin(), x.shape.begin() + static_cast<std::ptrdiff_t>(axis));
  shape.insert(shape.end(), ind.shape.begin(), ind.shape.end());
  shape.insert(shape.end(), x.shape.begin() + static_cast<std::ptrdiff_t>(axis) + 1, x.shape.end());
  if (x.is_float()) return Tensor::floats(shape, gather_data(x.f, x.shape, axis, idx));
  return Tensor::ints(shape, gather_data(x.i, x.shape, axis, idx));
}

Tensor op_slice(const Inputs& in, const Attributes& attrs, int opset) {
  const Tensor& x = need(in, 0, "Slice");
  std::vector<std::int64_t> starts;
  std::vector<std::int64_t> ends;
  std::vector<std::int64_t> axes;
  std::vector<std::int64_t> steps;
  if (opset >= 10) {
    starts = need(in, 1, "Slice").to_ints();
    ends = need(in, 2, "Slice").to_ints();
    if (const Tensor* t = opt(in, 3)) axes = t->to_ints();
    if (const Tensor* t = opt(in, 4)) steps = t->to_ints();
  } else {
    starts = attrs.get_ints("starts").value_or(std::vector<std::int64_t>{});
    ends = attrs.get_ints("ends").value_or(std::vector<std::int64_t>{});
    axes = attrs.get_ints("axes").value_or(std::vector<std::int64_t>{});
  }
  if (axes.empty()) {
    for (std::size_t k = 0; k < starts.size(); ++k) axes.push_back(static_cast<std::int64_t>(k));
  }
  if (steps.empty()) steps.assign(starts.size(), 1);
  if (ends.size() != starts.size() || axes.size() != starts.size() || steps.size() != starts.size()) {
    fail("Slice", "starts/ends/axes/steps lengths differ");
  }
  const std::size_t rank = x.rank();
  std::vector<std::int64_t> begin(rank, 0);
  std::vector<std::int64_t> step(rank, 1);
  std::vector<std::int64_t> out_shape = x.shape;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    const auto a = static_cast<std::size_t>(norm_axis(axes[k], rank, "Slice"));
    const auto dim = x.shape[a];
    const auto s = steps[k];
    if (s == 0) fail("Slice", "step must not be 0");
    auto b = starts[k];
    auto e = ends[k];
    if (b < 0) b += dim;
    if (e < 0) e += dim;
    if (s > 0) {
      b = std::clamp<std::int64_t>(b, 0, dim);
      e = std::clamp<std::int64_t>(e, 0, dim);
      out_shape[a] = e > b ? (e - b + s - 1) / s : 0;
    } else {
      b = std::clamp<std::int64_t>(b, 0, dim - 1);
      e = std::clamp<std::int64_t>(e, -1, dim - 1);
      out_shape[a] = b > e ? (b - e + (-s) - 1) / (-s) : 0;
    }
    begin[a] = b;
    step[a] = s;
  }
  const auto in_st = strides_of(x.shape);
  std::size_t base = 0;
  std::vector<std::size_t> st(rank);
  for (std::size_t d = 0; d < rank; ++d) {
    base += static_cast<std::size_t>(begin[d]) * in_st[d];
    // Negative steps wrap through size_t arithmetic and cancel out when summed.
    st[d] = static_cast<std::size_t>(step[d]) * in_st[d];
  }
  std::array<std::vector<std::size_t>, 1> strides{st};
  if (x.is_float()) {
    std::vector<float> out(numel_of(out_shape));
    for_each_broadcast<1>(out_shape, strides, [&](std::size_t k, const std::array<std::size_t, 1>& o) { out[k] = x.f[base + o[0]]; });
    return Tensor::floats(out_shape, std::move(out));
  }
  std::vector<std::int64_t> out(numel_of(out_shape));
  for_each_broadcast<1>(out_shape, strides, [&](std::size_t k, const std::array<std::size_t, 1>& o) { out[k] = x.i[base + o[0]]; });
  return Tensor::ints(out_shape, std::move(out));
}

Tensor op_concat(const Inputs& in, const Attributes& attrs) {
  if (in.empty()) fail("Concat", "no inputs");
  const Tensor& first = need(in, 0, "Concat");
  const auto axis = static_cast<std::size_t>(norm_axis(attrs.get_int("axis", 0), first.rank(), "Concat"));
  bool any_float = false;
  for (const auto* t : in) any_float |= t && t->is_float();
  std::vector<Tensor> parts;
  for (const auto* t : in) {
    if (!t) continue;
    if (t->rank() != first.rank()) fail("Concat", "rank mismatch");
    parts.push_back(t->cast(any_float ? DType::f32 : DType::i64));
  }
  std::vector<std::int64_t> shape = first.shape;
  shape[axis] = 0;
  for (const auto& p : parts) shape[axis] += p.shape[axis];
  std::size_t outer = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= static_cast<std::size_t>(shape[d]);
  auto run = [&](auto member) {
    using V = std::remove_reference_t<decltype(parts[0].*member)>;
    V out;
    out.reserve(numel_of(shape));
    for (std::size_t o = 0; o < outer; ++o) {
      for (const auto& p : parts) {
        std::size_t chunk = 1;
        for (std::size_t d = axis; d < p.rank(); ++d) chunk *= static_cast<std::size_t>(p.shape[d]);
        const auto& src = p.*member;
        out.insert(out.end(), src.begin() + static_cast<std::ptrdiff_t>(o * chunk),
                   src.begin() + static_cast<std::ptrdiff_t>((o + 1) * chunk));
      }
    }
    return out;
  };
  if (any_float) return Tensor::floats(shape, run(&Tensor::f));
  return Tensor::ints(shape, run(&Tensor::i));
}

Tensor op_expand(const Inputs& in) {
  const Tensor& x = need(in, 0, "Expand");
  const auto target = need(in, 1, "Expand").to_ints();
  const auto out_shape = broadcast_shape({x.shape, target}, "Expand");
  std::array<std::vector<std::size_t>, 1> st{aligned_strides(x.shape, out_shape)};
  if (x.is_float()) {
    std::vector<float> out(numel_of(out_shape));
    for_each_broadcast<1>(out_shape, st, [&](std::size_t k, const std::array<std::size_t, 1>& o) { out[k] = x.f[o[0]]; });
    return Tensor::floats(out_shape, std::move(out));
  }
  std::vector<std::int64_t> out(numel_of(out_shape));
  for_each_broadcast<1>(out_shape, st, [&](std::size_t k, const std::array<std::size_t, 1>& o) { out[k] = x.i[o[0]]; });
  return Tensor::ints(out_shape, std::move(out));
}

Tensor op_where(const Inputs& in) {
  const Tensor& c = need(in, 0, "Where");
  const Tensor& a = need(in, 1, "Where");
  const Tensor& b = need(in, 2, "Where");
  const auto out_shape = broadcast_shape({c.shape, a.shape, b.shape}, "Where");
  const auto cond = c.to_ints();
  std::array<std::vector<std::size_t>, 3> st{aligned_strides(c.shape, out_shape), aligned_strides(a.shape, out_shape),
                                             aligned_strides(b.shape, out_shape)};
  if (a.is_float() || b.is_float()) {
    const Tensor af = a.cast(DType::f32);
    const Tensor bf = b.cast(DType::f32);
    std::vector<float> out(numel_of(out_shape));
    for_each_broadcast<3>(out_shape, st, [&](std::size_t k, const std::array<std::size_t, 3>& o) {
      out[k] = cond[o[0]] ? af.f[o[1]] : bf.f[o[2]];
    });
    return Tensor::floats(out_shape, std::move(out));
  }
  std::vector<std::int64_t> out(numel_of(out_shape));
  for_each_broadcast<3>(out_shape, st, [&](std::size_t k, const std::array<std::size_t, 3>& o) {
    out[k] = cond[o[0]] ? a.i[o[1]] : b.i[o[2]];
  });
  return Tensor::ints(out_shape, std::move(out));
}

// ---------------------------------------------------------------------------
// Linear algebra

using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const RowMat>;
using MMap = Eigen::Map<RowMat>;

Tensor op_matmul(const Inputs& in) {
  Tensor a = need(in, 0, "MatMul").cast(DType::f32);
  Tensor b = need(in, 1, "MatMul").cast(DType::f32);
  const bool a_vec = a.rank() == 1;
  const bool b_vec = b.rank() == 1;
  if (a_vec) a.shape.insert(a.shape.begin(), 1);
  if (b_vec) b.shape.push_back(1);
  if (a.rank() < 2 || b.rank() < 2) fail("MatMul", "scalar operands");
  const auto m = a.shape[a.rank() - 2];
  const auto k = a.shape[a.rank() - 1];
  const auto n = b.shape[b.rank() - 1];
  if (b.shape[b.rank() - 2] != k) {
    fail("MatMul", "inner dimensions differ: " + shape_string(a.shape) + " x " + shape_string(b.shape));
  }
  const std::vector<std::int64_t> a_batch(a.shape.begin(), a.shape.end() - 2);
  const std::vector<std::int64_t> b_batch(b.shape.begin(), b.shape.end() - 2);
  const auto batch = broadcast_shape({a_batch, b_batch}, "MatMul");
  const std::size_t a_mat = static_cast<std::size_t>(m * k);
  const std::size_t b_mat = static_cast<std::size_t>(k * n);
  const std::size_t o_mat = static_cast<std::size_t>(m * n);
  std::vector<float> out(numel_of(batch) * o_mat);
  auto mult = [&](std::size_t idx, std::size_t ao, std::size_t bo) {
    CMap am(a.f.data() + ao * a_mat, m, k);
    CMap bm(b.f.data() + bo * b_mat, k, n);
    MMap om(out.data() + idx * o_mat, m, n);
    om.noalias() = am * bm;
  };
  if (batch.empty()) {
    mult(0, 0, 0);
  } else {
    std::array<std::vector<std::size_t>, 2> st{aligned_strides(a_batch, batch), aligned_strides(b_batch, batch)};
    for_each_broadcast<2>(batch, st, [&](std::size_t idx, const std::array<std::size_t, 2>& o) { mult(idx, o[0], o[1]); });
  }
  std::vector<std::int64_t> shape = batch;
  if (!a_vec) shape.push_back(m);
  if (!b_vec) shape.push_back(n);
  return Tensor::floats(shape, std::move(out));
}

Tensor op_gemm(const Inputs& in, const Attributes& attrs) {
  const Tensor a = need(in, 0, "Gemm").cast(DType::f32);
  const Tensor b = need(in, 1, "Gemm").cast(DType::f32);
  if (a.rank() != 2 || b.rank() != 2) fail("Gemm", "operands must be 2-D");
  const float alpha = attrs.get_float("alpha", 1.f);
  const float beta = attrs.get_float("beta", 1.f);
  CMap am(a.f.data(), a.shape[0], a.shape[1]);
  CMap bm(b.f.data(), b.shape[0], b.shape[1]);
  RowMat lhs = attrs.get_int("transA", 0) ? RowMat(am.transpose()) : RowMat(am);
  RowMat rhs = attrs.get_int("transB", 0) ? RowMat(bm.transpose()) : RowMat(bm);
  if (lhs.cols() != rhs.rows()) fail("Gemm", "inner dimensions differ");
  RowMat prod = alpha * (lhs * rhs);
  Tensor y = Tensor::floats({prod.rows(), prod.cols()}, std::vector<float>(prod.data(), prod.data() + prod.size()));
  if (const Tensor* c = opt(in, 2)) {
    Tensor cs = c->cast(DType::f32);
    for (auto& v : cs.f) v *= beta;
    y = binary("Gemm", BinOp::add, y, cs);
  }
  return y;
}

// ---------------------------------------------------------------------------
// Normalization and reductions

Tensor op_softmax(const Inputs& in, const Attributes& attrs, int opset) {
  Tensor x = need(in, 0, "Softmax").cast(DType::f32);
  const auto axis = static_cast<std::size_t>(norm_axis(attrs.get_int("axis", opset >= 13 ? -1 : 1), x.rank(), "Softmax"));
  std::size_t outer = 1;
  std::size_t len = 1;
  std::size_t inner = 1;
  if (opset >= 13) {
    for (std::size_t d = 0; d < axis; ++d) outer *= static_cast<std::size_t>(x.shape[d]);
    len = static_cast<std::size_t>(x.shape[axis]);
    for (std::size_t d = axis + 1; d < x.rank(); ++d) inner *= static_cast<std::size_t>(x.shape[d]);
  } else {
    for (std::size_t d = 0; d < axis; ++d) outer *= static_cast<std::size_t>(x.shape[d]);
    for (std::size_t d = axis; d < x.rank(); ++d) len *= static_cast<std::size_t>(x.shape[d]);
  }
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t j = 0; j < inner; ++j) {
      float* base = x.f.data() + o * len * inner + j;
      float mx = -std::numeric_limits<float>::infinity();
      for (std::size_t t = 0; t < len; ++t) mx = std::max(mx, base[t * inner]);
      float sum = 0.f;
      for (std::size_t t = 0; t < len; ++t) {
        base[t * inner] = std::exp(base[t * inner] - mx);
        sum += base[t * inner];
      }
      for (std::size_t t = 0; t < len; ++t) base[t * inner] /= sum;
    }
  }
  return x;
}

Tensor op_layer_norm(const Inputs& in, const Attributes& attrs) {
  Tensor x = need(in, 0, "LayerNormalization").cast(DType::f32);
  const Tensor scale = need(in, 1, "LayerNormalization").cast(DType::f32);
  const Tensor* bias_in = opt(in, 2);
  const Tensor bias = bias_in ? bias_in->cast(DType::f32) : Tensor();
  const auto axis = static_cast<std::size_t>(norm_axis(attrs.get_int("axis", -1), x.rank(), "LayerNormalization"));
  const float eps = attrs.get_float("epsilon", 1e-5f);
  std::size_t outer = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= static_cast<std::size_t>(x.shape[d]);
  const std::size_t len = x.numel() / std::max<std::size_t>(outer, 1);
  if (scale.numel() != len || (bias_in && bias.numel() != len)) fail("LayerNormalization", "scale/bias size mismatch");
  for (std::size_t o = 0; o < outer; ++o) {
    float* row = x.f.data() + o * len;
    double mean = 0.0;
    for (std::size_t t = 0; t < len; ++t) mean += row[t];
    mean /= static_cast<double>(len);
    double var = 0.0;
    for (std::size_t t = 0; t < len; ++t) var += (row[t] - mean) * (row[t] - mean);
    var /= static_cast<double>(len);
    const double inv = 1.0 / std::sqrt(var + eps);
    for (std::size_t t = 0; t < len; ++t) {
      float v = static_cast<float>((row[t] - mean) * inv) * scale.f[t];
      if (bias_in) v += bias.f[t];
      row[t] = v;
    }
  }
  return x;
}

Tensor op_reduce_mean(const Inputs& in, const Attributes& attrs, int opset) {
  const Tensor x = need(in, 0, "ReduceMean").cast(DType::f32);
  auto axes = axes_from(in, 1, attrs, opset, 18);
  const bool keep = attrs.get_int("keepdims", 1) != 0;
  if (axes.empty()) {
    if (attrs.get_int("noop_with_empty_axes", 0)) return x;
    for (std::size_t d = 0; d < x.rank(); ++d) axes.push_back(static_cast<std::int64_t>(d));
  }
  std::vector<bool> reduce(x.rank(), false);
  for (auto a : axes) reduce[static_cast<std::size_t>(norm_axis(a, x.rank(), "ReduceMean"))] = true;
  std::vector<std::int64_t> kept_shape;
  for (std::size_t d = 0; d < x.rank(); ++d) kept_shape.push_back(reduce[d] ? 1 : x.shape[d]);
  const std::size_t n_out = numel_of(kept_shape);
  std::vector<double> acc(n_out, 0.0);
  // Map each input element to its output slot by zeroing the reduced strides.
  const auto out_st = strides_of(kept_shape);
  std::vector<std::size_t> st(x.rank());
  for (std::size_t d = 0; d < x.rank(); ++d) st[d] = reduce[d] ? 0 : out_st[d];
  std::array<std::vector<std::size_t>, 1> strides{st};
  for_each_broadcast<1>(x.shape, strides, [&](std::size_t k, const std::array<std::size_t, 1>& o) { acc[o[0]] += x.f[k]; });
  const double count = static_cast<double>(x.numel()) / static_cast<double>(std::max<std::size_t>(n_out, 1));
  std::vector<float> out(n_out);
  for (std::size_t k = 0; k < n_out; ++k) out[k] = static_cast<float>(acc[k] / count);
  std::vector<std::int64_t> shape;
  for (std::size_t d = 0; d < x.rank(); ++d) {
    if (!reduce[d]) {
      shape.push_back(x.shape[d]);
    } else if (keep) {
      shape.push_back(1);
    }
  }
  return Tensor::floats(shape, std::move(out));
}

// ---------------------------------------------------------------------------
// Constants and casts

Tensor op_cast(const Inputs& in, const Attributes& attrs) {
  const Tensor& x = need(in, 0, "Cast");
  const auto to = attrs.get_int("to", 1);
  switch (to) {
    case 1:   // float
    case 10:  // float16
    case 11:  // double
    case 16:  // bfloat16
      return x.cast(DType::f32);
    case 9: {  // bool
      Tensor t = x.cast(DType::i64);
      if (x.is_float()) {
        for (std::size_t k = 0; k < x.f.size(); ++k) t.i[k] = x.f[k] != 0.f;
      } else {
        for (auto& v : t.i) v = v != 0;
      }
      return t;
    }
    case 2: case 3: case 4: case 5: case 6: case 7: case 12: case 13:
      return x.cast(DType::i64);
    default:
      fail("Cast", "unsupported target type " + std::to_string(to));
  }
}

Tensor op_constant(const Attributes& attrs) {
  if (auto it = attrs.tensors.find("value"); it != attrs.tensors.end()) return it->second;
  if (auto it = attrs.floats.find("value_float"); it != attrs.floats.end()) return Tensor::floats({}, {it->second});
  if (auto it = attrs.ints.find("value_int"); it != attrs.ints.end()) return Tensor::ints({}, {it->second});
  if (auto it = attrs.int_lists.find("value_ints"); it != attrs.int_lists.end()) {
    return Tensor::ints({static_cast<std::int64_t>(it->second.size())}, it->second);
  }
  if (auto it = attrs.float_lists.find("value_floats"); it != attrs.float_lists.end()) {
    return Tensor::floats({static_cast<std::int64_t>(it->second.size())}, it->second);
  }
  fail("Constant", "unsupported value attribute");
}

Tensor op_constant_of_shape(const Inputs& in, const Attributes& attrs) {
  const auto shape = need(in, 0, "ConstantOfShape").to_ints();
  const std::size_t n = numel_of(shape);
  if (auto it = attrs.tensors.find("value"); it != attrs.tensors.end()) {
    const Tensor& v = it->second;
    if (v.numel() != 1) fail("ConstantOfShape", "value must hold one element");
    if (v.is_float()) return Tensor::floats(shape, std::vector<float>(n, v.f[0]));
    return Tensor::ints(shape, std::vector<std::int64_t>(n, v.i[0]));
  }
  return Tensor::floats(shape, std::vector<float>(n, 0.f));
}

Tensor op_range(const Inputs& in) {
  const Tensor& s = need(in, 0, "Range");
  const Tensor& l = need(in, 1, "Range");
  const Tensor& d = need(in, 2, "Range");
  const double start = s.get(0);
  const double limit = l.get(0);
  const double delta = d.get(0);
  if (delta == 0) fail("Range", "delta must not be 0");
  const auto n = static_cast<std::int64_t>(std::max(0.0, std::ceil((limit - start) / delta)));
  if (s.is_float() || l.is_float() || d.is_float()) {
    std::vector<float> out(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) out[k] = static_cast<float>(start + k * delta);
    return Tensor::floats({n}, std::move(out));
  }
  std::vector<std::int64_t> out(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) out[k] = s.i[0] + k * d.i[0];
  return Tensor::ints({n}, std::move(out));
}

Tensor op_neg_abs(const Tensor& x, bool neg) {
  if (x.is_float()) {
    return unary_float(x, neg ? +[](float v) { return -v; } : +[](float v) { return std::fabs(v); });
  }
  Tensor t = x;
  for (auto& v : t.i) v = neg ? -v : (v < 0 ? -v : v);
  return t;
}

using Handler = std::function<std::vector<Tensor>(const Inputs&, const Attributes&, int)>;

const std::unordered_map<std::string, Handler>& handlers() {
  static const std::unordered_map<std::string, Handler> table = [] {
    std::unordered_map<std::string, Handler> h;
    auto one = [](auto fn) -> Handler {
      return [fn](const Inputs& in, const Attributes& a, int opset) { return std::vector<Tensor>{fn(in, a, opset)}; };
    };
    auto bin = [&](const char* name, BinOp op) {
      h[name] = one([name, op](const Inputs& in, const Attributes&, int) {
        return binary(name, op, need(in, 0, name), need(in, 1, name));
      });
    };
    bin("Add", BinOp::add);
    bin("Sub", BinOp::sub);
    bin("Mul", BinOp::mul);
    bin("Div", BinOp::div);
    bin("Pow", BinOp::pow);
    bin("Equal", BinOp::equal);
    bin("Greater", BinOp::greater);
    bin("Less", BinOp::less);
    bin("And", BinOp::and_);
    bin("Or", BinOp::or_);
    auto un = [&](const char* name, float (*fn)(float)) {
      h[name] = one([name, fn](const Inputs& in, const Attributes&, int) { return unary_float(need(in, 0, name), fn); });
    };
    un("Erf", [](float v) { return std::erf(v); });
    un("Tanh", [](float v) { return std::tanh(v); });
    un("Sqrt", [](float v) { return std::sqrt(v); });
    un("Relu", [](float v) { return v > 0.f ? v : 0.f; });
    un("Exp", [](float v) { return std::exp(v); });
    un("Log", [](float v) { return std::log(v); });
    un("Sigmoid", [](float v) { return 1.f / (1.f + std::exp(-v)); });
    un("Reciprocal", [](float v) { return 1.f / v; });
    h["Neg"] = one([](const Inputs& in, const Attributes&, int) { return op_neg_abs(need(in, 0, "Neg"), true); });
    h["Abs"] = one([](const Inputs& in, const Attributes&, int) { return op_neg_abs(need(in, 0, "Abs"), false); });
    h["Not"] = one([](const Inputs& in, const Attributes&, int) {
      Tensor t = need(in, 0, "Not").cast(DType::i64);
      for (auto& v : t.i) v = v == 0;
      return t;
    });
    h["Identity"] = one([](const Inputs& in, const Attributes&, int) { return need(in, 0, "Identity"); });
    h["Cast"] = one([](const Inputs& in, const Attributes& a, int) { return op_cast(in, a); });
    h["Shape"] = one([](const Inputs& in, const Attributes& a, int) { return op_shape(in, a); });
    h["Gather"] = one([](const Inputs& in, const Attributes& a, int) { return op_gather(in, a); });
    h["Slice"] = one([](const Inputs& in, const Attributes& a, int o) { return op_slice(in, a, o); });
    h["Reshape"] = one([](const Inputs& in, const Attributes&, int) { return op_reshape(in); });
    h["Unsqueeze"] = one([](const Inputs& in, const Attributes& a, int o) { return op_unsqueeze(in, a, o); });
    h["Squeeze"] = one([](const Inputs& in, const Attributes& a, int o) { return op_squeeze(in, a, o); });
    h["Transpose"] = one([](const Inputs& in, const Attributes& a, int) { return op_transpose(in, a); });
    h["Concat"] = one([](const Inputs& in, const Attributes& a, int) { return op_concat(in, a); });
    h["Expand"] = one([](const Inputs& in, const Attributes&, int) { return op_expand(in); });
    h["Where"] = one([](const Inputs& in, const Attributes&, int) { return op_where(in); });
    h["MatMul"] = one([](const Inputs& in, const Attributes&, int) { return op_matmul(in); });
    h["Gemm"] = one([](const Inputs& in, const Attributes& a, int) { return op_gemm(in, a); });
    h["Softmax"] = one([](const Inputs& in, const Attributes& a, int o) { return op_softmax(in, a, o); });
    h["LayerNormalization"] = one([](const Inputs& in, const Attributes& a, int) { return op_layer_norm(in, a); });
    h["ReduceMean"] = one([](const Inputs& in, const Attributes& a, int o) { return op_reduce_mean(in, a, o); });
    h["Constant"] = one([](const Inputs&, const Attributes& a, int) { return op_constant(a); });
    h["ConstantOfShape"] = one([](const Inputs& in, const Attributes& a, int) { return op_constant_of_shape(in, a); });
    h["Range"] = one([](const Inputs& in, const Attributes&, int) { return op_range(in); });
    return h;
  }();
  return table;
}

}  // namespace

bool is_supported_op(const std::string& op_type) { return handlers().count(op_type) > 0; }

std::vector<Tensor> run_op(const std::string& op_type, const Inputs& inputs, const Attributes& attrs, int opset) {
  const auto& h = handlers();
  auto it = h.find(op_type);
  if (it == h.end()) throw BackendError("unsupported ONNX operator '" + op_type + "'");
  return it->second(inputs, attrs, opset);
}

}  // namespace docasref::onnx
