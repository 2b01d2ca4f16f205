// Co-action detection: per-window hash join of actions on (type, reason).

#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "coordnet/ingestion.hpp"
#include "coordnet/windowing.hpp"

namespace coordnet {

/// Two distinct accounts performing the same (action_type, reason) inside
/// one window. Stored in canonical form with account_a < account_b.
struct CoActionPair {
    AccountId account_a;
    AccountId account_b;
    ActionType action_type{};
    std::string reason;
    Seconds t_a = 0;
    Seconds t_b = 0;
    std::int64_t window_index = 0;

    /// Identity of the underlying evidence, independent of the window it was found in.
    auto evidence_key() const { return std::tie(account_a, account_b, action_type, reason, t_a, t_b); }
    auto sort_key() const {
        return std::tie(account_a, account_b, action_type, reason, t_a, t_b, window_index);
    }

    bool involves(const AccountId& account) const { return account_a == account || account_b == account; }
    Seconds time_of(const AccountId& account) const { return account == account_a ? t_a : t_b; }
    const AccountId& other(const AccountId& account) const {
        return account == account_a ? account_b : account_a;
    }

    bool operator==(const CoActionPair&) const = default;
};

inline bool canonical_less(const CoActionPair& x, const CoActionPair& y) { return x.sort_key() < y.sort_key(); }

/// Builds a pair in canonical orientation. Throws on self-pairs.
inline CoActionPair make_coaction_pair(AccountId a, Seconds t_a, AccountId b, Seconds t_b, ActionType type,
                              std::string reason, std::int64_t window_index) {
    if (a == b) throw ContractViolation("co-action pair with identical accounts: " + a);
    if (b < a) {
        std::swap(a, b);
        std::swap(t_a, t_b);
    }
    return {std::move(a), std::move(b), type, std::move(reason), t_a, t_b, window_index};
}

using ActionList = std::vector<ActionInstance>;

/// Actions for every post of a stream, index-aligned with the posts.
inline std::vector<ActionList> extract_all(std::span<const Post> posts, const ExtractOptions& opts = {}) {
    std::vector<ActionList> out;
    out.reserve(posts.size());
    for (const auto& p : posts) out.push_back(extract_actions(p, opts));
    return out;
}

/// Co-action pairs inside one window. `actions` is index-aligned with
/// window.posts. Each account contributes its earliest matching action in
/// the window, so a group of n accounts sharing a reason yields n(n-1)/2 pairs.
inline std::vector<CoActionPair> find_coactions(const Window& window, std::span<const ActionList> actions,
                                                ActionTypeSet types) {
    if (actions.size() != window.posts.size())
        throw ContractViolation("action lists not aligned with window posts");

    struct GroupKey {
        ActionType type;
        std::string_view reason;
        bool operator==(const GroupKey&) const = default;
    };
    struct GroupHash {
        std::size_t operator()(const GroupKey& k) const noexcept {
            return std::hash<std::string_view>{}(k.reason) * 31u + static_cast<std::size_t>(k.type);
        }
    };
    // Earliest action time per account within each (type, reason) group; the
    // posts are (timestamp, post_id)-ordered so the first insertion wins.
    std::unordered_map<GroupKey, std::map<std::string_view, Seconds>, GroupHash> groups;

    for (const auto& list : actions) {
        for (const auto& act : list) {
            if (!types.contains(act.action_type)) continue;
            groups[{act.action_type, act.reason}].emplace(act.account_id, act.timestamp);
        }
    }

    std::vector<CoActionPair> out;
    for (const auto& [key, members] : groups) {
        if (members.size() < 2) continue;
        for (auto i = members.begin(); i != members.end(); ++i) {
            for (auto j = std::next(i); j != members.end(); ++j) {
                out.push_back({std::string(i->first), std::string(j->first), key.type, std::string(key.reason),
                               i->second, j->second, window.index});
            }
        }
    }
    std::sort(out.begin(), out.end(), canonical_less);
    return out;
}

/// Convenience overload extracting actions on the fly.
inline std::vector<CoActionPair> find_coactions(const Window& window, ActionTypeSet types,
                                                const ExtractOptions& opts = {}) {
    auto actions = extract_all(window.posts, opts);
    return find_coactions(window, actions, types);
}

/// Sorts canonically and collapses pairs found in several overlapping
/// windows from the same two actions, keeping the lowest window index.
inline void canonicalize_pairs(std::vector<CoActionPair>& pairs) {
    std::sort(pairs.begin(), pairs.end(), canonical_less);
    auto last = std::unique(pairs.begin(), pairs.end(), [](const CoActionPair& x, const CoActionPair& y) {
        return x.evidence_key() == y.evidence_key();
    });
    pairs.erase(last, pairs.end());
}

/// Pairs across all windows. `actions` is index-aligned with the full post
/// stream the windows were partitioned from.
inline std::vector<CoActionPair> coaction_stream(std::span<const Window> windows,
                                                 std::span<const ActionList> actions, ActionTypeSet types) {
    std::vector<CoActionPair> out;
    for (const auto& w : windows) {
        if (w.first + w.posts.size() > actions.size())
            throw ContractViolation("window exceeds action stream");
        auto found = find_coactions(w, actions.subspan(w.first, w.posts.size()), types);
        out.insert(out.end(), std::make_move_iterator(found.begin()), std::make_move_iterator(found.end()));
    }
    canonicalize_pairs(out);
    return out;
}

/// Options for one detection pass over a post stream.
struct DetectOptions {
    WindowConfig window;
    ActionTypeSet types{ActionType::CoRetweet};
    ExtractOptions extract;
};

struct DetectResult {
    std::vector<CoActionPair> pairs;
    std::size_t windows = 0;
    std::size_t before_anchor = 0;
};

/// partition + extract + coaction_stream in one call.
inline DetectResult detect(std::span<const Post> posts, const DetectOptions& opts) {
    auto parts = partition_checked(posts, opts.window);
    auto actions = extract_all(posts, opts.extract);
    DetectResult r;
    r.windows = parts.windows.size();
    r.before_anchor = parts.before_anchor;
    r.pairs = coaction_stream(parts.windows, actions, opts.types);
    return r;
}

}  // namespace coordnet
