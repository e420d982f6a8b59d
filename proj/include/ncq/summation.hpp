#pragma once

#include <cstddef>
#include <span>

namespace ncq {

/// Pairwise sum with a fixed reduction tree: the range is split at size/2 and
/// both halves are reduced recursively.  Summing [0, 2n) therefore equals
/// summing [0, n) plus summing [n, 2n), bit for bit.
inline double pairwise_sum(std::span<const double> values) {
    switch (values.size()) {
    case 0: return 0.0;
    case 1: return values[0];
    case 2: return values[0] + values[1];
    default: break;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

} // namespace ncq
