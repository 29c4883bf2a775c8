#include "revstream/offline/spearman.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "revstream/error.hpp"

namespace revstream {

std::vector<double> mean_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 share ranks i+1..j.
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("spearman: length mismatch");
  if (x.size() < 2) throw InvalidArgument("spearman: need at least two samples");
  for (double v : x) {
    if (!std::isfinite(v)) throw InvalidArgument("spearman: non-finite value");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw InvalidArgument("spearman: non-finite value");
  }

  const auto rx = mean_ranks(x);
  const auto ry = mean_ranks(y);
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sx += rx[i];
    sy += ry[i];
    sxy += rx[i] * ry[i];
    sxx += rx[i] * rx[i];
    syy += ry[i] * ry[i];
  }
  const double vx = n * sxx - sx * sx;
  const double vy = n * syy - sy * sy;
  if (vx <= 0.0 || vy <= 0.0) throw InvalidArgument("spearman: constant input");
  const double r = (n * sxy - sx * sy) / (std::sqrt(vx) * std::sqrt(vy));
  return {std::clamp(r, -1.0, 1.0), x.size()};
}

}  // namespace revstream
