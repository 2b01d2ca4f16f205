// Temporal forensics on extracted communities: who posts first, cheerleader
// detection, account profiles and activity timelines.

#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "coordnet/hcc.hpp"

namespace coordnet {

inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kDaysPerYear = 365.25;

struct GridCell {
    std::int64_t total = 0;
    std::int64_t row_first = 0;   ///< times the row account acted strictly first
    std::int64_t ties = 0;        ///< equal timestamps; neither account counts as first

    std::int64_t row_second() const noexcept { return total - row_first - ties; }
    bool operator==(const GridCell&) const = default;
};

/// Per ordered account pair counts of co-actions and of who acted first.
struct FirstPosterGrid {
    std::vector<AccountId> accounts;
    std::map<std::pair<AccountId, AccountId>, GridCell> cells;   ///< (row, column); no diagonal

    const GridCell* cell(const AccountId& row, const AccountId& col) const {
        auto it = cells.find({row, col});
        return it == cells.end() ? nullptr : &it->second;
    }
};

inline FirstPosterGrid timing_grid(const std::set<AccountId>& members, std::span<const CoActionPair> pairs) {
    FirstPosterGrid grid;
    grid.accounts.assign(members.begin(), members.end());
    for (const auto& p : pairs) {
        if (!members.contains(p.account_a) || !members.contains(p.account_b)) continue;
        auto& ab = grid.cells[{p.account_a, p.account_b}];
        auto& ba = grid.cells[{p.account_b, p.account_a}];
        ++ab.total;
        ++ba.total;
        if (p.t_a < p.t_b) ++ab.row_first;
        else if (p.t_b < p.t_a) ++ba.row_first;
        else {
            ++ab.ties;
            ++ba.ties;
        }
    }
    return grid;
}

inline FirstPosterGrid timing_grid(const Hcc& hcc, std::span<const CoActionPair> pairs) {
    return timing_grid(hcc.accounts, pairs);
}

struct CheerleaderReport {
    AccountId account;
    AccountId partner;
    std::int64_t total = 0;
    double follower_fraction = 0.0;   ///< share of co-actions where `account` acted second
    bool flagged = false;
};

/// One report per ordered pair with at least min_pairs co-actions.
inline std::vector<CheerleaderReport> cheerleader_scores(const FirstPosterGrid& grid, std::int64_t min_pairs = 10,
                                                         double threshold = 0.9) {
    if (min_pairs < 1) throw ConfigError("min_pairs must be >= 1");
    if (!(threshold > 0.5 && threshold <= 1.0)) throw ConfigError("cheerleader threshold must be in (0.5, 1]");
    std::vector<CheerleaderReport> out;
    for (const auto& [key, c] : grid.cells) {
        if (c.total < min_pairs) continue;
        CheerleaderReport r{key.first, key.second, c.total,
                            static_cast<double>(c.row_second()) / static_cast<double>(c.total), false};
        r.flagged = r.follower_fraction >= threshold;
        out.push_back(std::move(r));
    }
    return out;
}

/// followers / (friends + followers), 0 when both are 0.
inline double reputation(std::int64_t friends, std::int64_t followers) {
    if (friends < 0 || followers < 0) throw ContractViolation("negative friend or follower count");
    const auto denom = friends + followers;
    return denom == 0 ? 0.0 : static_cast<double>(followers) / static_cast<double>(denom);
}

/// Sidecar metadata for one account.
struct AccountMeta {
    AccountId account;
    std::int64_t statuses_count = 0;
    std::optional<Seconds> created_at;
    std::int64_t friends = 0;
    std::int64_t followers = 0;
    std::optional<double> bot_rating;   ///< external rating, passed through unchanged
};

struct AccountProfile {
    AccountId account;
    std::int64_t tweets = 0;
    std::optional<double> age_days;
    std::optional<double> tweets_per_day;
    std::int64_t friends = 0;
    std::int64_t followers = 0;
    double reputation = 0.0;
    std::optional<double> bot_rating;
    std::int64_t posts_in_range = 0;
};

/// Profile as of `dataset_end`; age and rate are absent without a creation time.
inline AccountProfile profile_account(const AccountMeta& meta, Seconds dataset_end, std::int64_t posts_in_range = 0) {
    AccountProfile p;
    p.account = meta.account;
    p.tweets = meta.statuses_count;
    p.friends = meta.friends;
    p.followers = meta.followers;
    p.reputation = reputation(meta.friends, meta.followers);
    p.bot_rating = meta.bot_rating;
    p.posts_in_range = posts_in_range;
    if (meta.created_at) {
        p.age_days = static_cast<double>(dataset_end - *meta.created_at) / kSecondsPerDay;
        if (meta.statuses_count == 0) p.tweets_per_day = 0.0;
        else if (*p.age_days > 0) p.tweets_per_day = static_cast<double>(meta.statuses_count) / *p.age_days;
    }
    return p;
}

/// Profile using the last post of `posts` as the dataset end.
inline AccountProfile profile_account(const AccountMeta& meta, std::span<const Post> posts) {
    Seconds end = 0;
    std::int64_t own = 0;
    for (const auto& p : posts) {
        end = std::max(end, p.timestamp);
        if (p.account_id == meta.account) ++own;
    }
    return profile_account(meta, end, own);
}

struct MetadataParse {
    std::map<AccountId, AccountMeta> accounts;
    std::size_t skipped = 0;
};

/// Reads newline-delimited metadata documents (user_id, statuses_count,
/// created_at, friends_count, followers_count, optional bot_rating).
inline MetadataParse parse_metadata(std::istream& in) {
    MetadataParse out;
    auto count = [](const nlohmann::json& doc, const char* key) -> std::optional<std::int64_t> {
        auto it = doc.find(key);
        if (it == doc.end() || it->is_null()) return std::int64_t{0};
        if (it->is_number_integer()) return it->get<std::int64_t>();
        return std::nullopt;
    };
    for (std::string line; std::getline(in, line);) {
        auto text = detail::trim(line);
        if (text.empty()) continue;
        auto doc = nlohmann::json::parse(text, nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) {
            ++out.skipped;
            continue;
        }
        auto user = detail::id_field(doc, "user_id");
        auto statuses = count(doc, "statuses_count");
        auto friends = count(doc, "friends_count");
        auto followers = count(doc, "followers_count");
        if (!user || user->empty() || !statuses || !friends || !followers || *friends < 0 || *followers < 0) {
            ++out.skipped;
            continue;
        }
        AccountMeta m;
        m.account = *user;
        m.statuses_count = *statuses;
        m.friends = *friends;
        m.followers = *followers;
        m.created_at = detail::timestamp_field(doc);
        if (auto it = doc.find("bot_rating"); it != doc.end() && it->is_number()) m.bot_rating = it->get<double>();
        out.accounts[m.account] = std::move(m);
    }
    return out;
}

struct ActivityTimeline {
    AccountId account;
    Seconds bucket_seconds = 0;
    std::vector<std::pair<Seconds, std::int64_t>> counts;   ///< (bucket start, posts)
};

/// Post counts per bucket over [range_start, range_end], buckets aligned to
/// multiples of bucket_seconds. Empty buckets are kept.
inline ActivityTimeline activity_timeline(const AccountId& account, std::span<const Post> posts,
                                          Seconds bucket_seconds, Seconds range_start, Seconds range_end) {
    if (bucket_seconds < 1) throw ConfigError("bucket_seconds must be >= 1");
    ActivityTimeline tl{account, bucket_seconds, {}};
    if (range_end < range_start) return tl;
    const auto first = detail::floor_div(range_start, bucket_seconds);
    const auto last = detail::floor_div(range_end, bucket_seconds);
    tl.counts.reserve(static_cast<std::size_t>(last - first + 1));
    for (auto b = first; b <= last; ++b) tl.counts.emplace_back(b * bucket_seconds, 0);
    for (const auto& p : posts) {
        if (p.account_id != account || p.timestamp < range_start || p.timestamp > range_end) continue;
        ++tl.counts[static_cast<std::size_t>(detail::floor_div(p.timestamp, bucket_seconds) - first)].second;
    }
    return tl;
}

/// Timeline over the full extent of `posts`.
inline ActivityTimeline activity_timeline(const AccountId& account, std::span<const Post> posts,
                                          Seconds bucket_seconds) {
    if (posts.empty()) return {account, bucket_seconds, {}};
    auto [lo, hi] = std::minmax_element(posts.begin(), posts.end(),
                                        [](const Post& a, const Post& b) { return a.timestamp < b.timestamp; });
    return activity_timeline(account, posts, bucket_seconds, lo->timestamp, hi->timestamp);
}

}  // namespace coordnet
