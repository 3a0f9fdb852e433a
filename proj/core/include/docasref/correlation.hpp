#pragma once

#include <optional>
#include <span>
#include <vector>

namespace docasref {

/// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> xs);

/// Product-moment correlation. Empty when either side is constant.
/// Throws Error on length mismatch or fewer than two values.
std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys);

/// Pearson correlation of average ranks. Empty when either side is constant.
std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys);

}  // namespace docasref
