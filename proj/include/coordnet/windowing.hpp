// Fixed-duration time windows over a time-ordered post stream.

#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "coordnet/types.hpp"

namespace coordnet {

/// Window geometry. stride == gamma gives adjacent windows, stride < gamma
/// overlapping ones; window i covers [anchor + i*stride, anchor + i*stride + gamma).
struct WindowConfig {
    Seconds gamma = 10;
    Seconds stride = 10;
    Seconds anchor = 0;

    static WindowConfig adjacent(Seconds gamma, Seconds anchor = 0) { return {gamma, gamma, anchor}; }

    bool is_adjacent() const noexcept { return stride == gamma; }

    void validate() const {
        if (gamma < 1) throw ConfigError("gamma must be at least 1 second");
        if (stride < 1 || stride > gamma) throw ConfigError("stride must be in [1, gamma]");
    }

    Seconds window_start(std::int64_t index) const noexcept { return anchor + index * stride; }
};

/// First post's timestamp floored to a multiple of gamma.
inline Seconds default_anchor(Seconds first_timestamp, Seconds gamma) {
    if (gamma < 1) throw ConfigError("gamma must be at least 1 second");
    auto q = first_timestamp / gamma;
    if (first_timestamp % gamma < 0) --q;
    return q * gamma;
}

namespace detail {
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    auto q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}
}  // namespace detail

/// Indices of every window containing t, ascending. Empty when t precedes the anchor.
inline std::vector<std::int64_t> window_indices(Seconds t, const WindowConfig& cfg) {
    std::vector<std::int64_t> out;
    if (t < cfg.anchor) return out;
    const auto offset = t - cfg.anchor;
    const auto hi = offset / cfg.stride;
    const auto lo = std::max<std::int64_t>(0, detail::floor_div(offset - cfg.gamma, cfg.stride) + 1);
    for (auto i = lo; i <= hi; ++i) out.push_back(i);
    return out;
}

/// A non-empty window. Posts are a contiguous slice of the time-ordered
/// stream passed to partition(), so the window must not outlive it.
struct Window {
    std::int64_t index = 0;
    Seconds start = 0;
    Seconds end = 0;                 ///< exclusive
    std::size_t first = 0;           ///< offset of posts.front() in the source stream
    std::span<const Post> posts;
};

struct PartitionResult {
    std::vector<Window> windows;
    std::size_t before_anchor = 0;   ///< posts dropped because t < anchor
};

/// Splits a time-ordered stream into its non-empty windows, ordered by index.
inline PartitionResult partition_checked(std::span<const Post> posts, const WindowConfig& cfg) {
    cfg.validate();
    PartitionResult result;
    auto begin = std::partition_point(posts.begin(), posts.end(),
                                      [&](const Post& p) { return p.timestamp < cfg.anchor; });
    result.before_anchor = static_cast<std::size_t>(begin - posts.begin());
    if (begin == posts.end()) return result;

    auto by_time = [](const Post& p, Seconds t) { return p.timestamp < t; };
    auto index = window_indices(begin->timestamp, cfg).front();
    auto cursor = begin;
    while (true) {
        const auto start = cfg.window_start(index);
        const auto end = start + cfg.gamma;
        auto lo = std::lower_bound(cursor, posts.end(), start, by_time);
        cursor = lo;
        if (lo == posts.end()) break;
        if (lo->timestamp >= end) {
            // Jump to the first window that can contain the next post.
            index = window_indices(lo->timestamp, cfg).front();
            continue;
        }
        auto hi = std::lower_bound(lo, posts.end(), end, by_time);
        result.windows.push_back({index, start, end, static_cast<std::size_t>(lo - posts.begin()),
                                  std::span<const Post>(lo, hi)});
        ++index;
    }
    return result;
}

inline std::vector<Window> partition(std::span<const Post> posts, const WindowConfig& cfg) {
    return partition_checked(posts, cfg).windows;
}

}  // namespace coordnet
