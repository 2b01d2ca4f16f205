// Highly coordinating community (HCC) extraction: edge-weight threshold
// followed by connected components.

#pragma once

#include <algorithm>
#include <concepts>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "coordnet/network.hpp"

namespace coordnet {

struct Hcc {
    std::size_t id = 0;                     ///< 1-based rank by total_weight
    std::set<AccountId> accounts;
    std::map<AccountPair, EdgeEvidence> edges;
    double total_weight = 0.0;
    std::optional<AccountId> star_hub;
    double star_coefficient = 0.0;

    bool operator==(const Hcc&) const = default;
};

/// Keeps edges with weight strictly greater than theta, and their endpoints.
inline CoordinationNetwork filter_edges(const CoordinationNetwork& cn, double theta) {
    if (!(theta >= 0)) throw ConfigError("theta must be >= 0");
    CoordinationNetwork out;
    for (const auto& [key, ev] : cn.edges()) {
        if (ev.weight > theta) out.edge(key.first, key.second) = ev;
    }
    return out;
}

/// Node sets of the connected components, each sorted, ordered by smallest member.
inline std::vector<std::set<AccountId>> connected_components(const CoordinationNetwork& cn) {
    std::map<AccountId, std::vector<const AccountId*>> adj;
    for (const auto& n : cn.nodes()) adj[n];
    for (const auto& [key, ev] : cn.edges()) {
        adj[key.first].push_back(&key.second);
        adj[key.second].push_back(&key.first);
    }
    std::set<AccountId> seen;
    std::vector<std::set<AccountId>> out;
    for (const auto& [start, nbrs] : adj) {
        if (seen.contains(start)) continue;
        std::set<AccountId> comp;
        std::deque<const AccountId*> queue{&start};
        seen.insert(start);
        while (!queue.empty()) {
            const auto* u = queue.front();
            queue.pop_front();
            comp.insert(*u);
            for (const auto* v : adj[*u]) {
                if (seen.insert(*v).second) queue.push_back(v);
            }
        }
        out.push_back(std::move(comp));
    }
    return out;
}

/// Fills the induced edges and shape metrics of a community. The hub is the
/// unique max-degree node when star_coefficient >= hub_threshold; ties leave
/// the hub unset.
inline Hcc describe_community(const CoordinationNetwork& cn, std::set<AccountId> accounts,
                              double hub_threshold = 0.9) {
    Hcc h;
    h.accounts = std::move(accounts);
    std::map<AccountId, std::size_t> degree;
    for (const auto& [key, ev] : cn.edges()) {
        if (!h.accounts.contains(key.first) || !h.accounts.contains(key.second)) continue;
        h.edges.emplace(key, ev);
        h.total_weight += ev.weight;
        ++degree[key.first];
        ++degree[key.second];
    }
    if (h.accounts.size() < 2 || degree.empty()) return h;
    std::size_t best = 0, count_best = 0;
    const AccountId* hub = nullptr;
    for (const auto& [acct, d] : degree) {
        if (d > best) {
            best = d;
            count_best = 1;
            hub = &acct;
        } else if (d == best) {
            ++count_best;
        }
    }
    h.star_coefficient = static_cast<double>(best) / static_cast<double>(h.accounts.size() - 1);
    if (count_best == 1 && h.star_coefficient >= hub_threshold) h.star_hub = *hub;
    return h;
}

/// Interface for community extractors: anything callable as
/// extractor(network) -> std::vector<Hcc>.
template <typename E>
concept HccExtractor = requires(const E& e, const CoordinationNetwork& cn) {
    { e(cn) } -> std::same_as<std::vector<Hcc>>;
};

struct ThresholdComponentsExtractor {
    double theta = 10.0;
    std::size_t min_size = 2;
    double hub_threshold = 0.9;

    std::vector<Hcc> operator()(const CoordinationNetwork& cn) const {
        if (min_size < 2) throw ConfigError("min_size must be >= 2");
        auto filtered = filter_edges(cn, theta);
        std::vector<Hcc> out;
        for (auto& comp : connected_components(filtered)) {
            if (comp.size() < min_size) continue;
            out.push_back(describe_community(filtered, std::move(comp), hub_threshold));
        }
        std::stable_sort(out.begin(), out.end(), [](const Hcc& x, const Hcc& y) {
            if (x.total_weight != y.total_weight) return x.total_weight > y.total_weight;
            return *x.accounts.begin() < *y.accounts.begin();
        });
        for (std::size_t i = 0; i < out.size(); ++i) out[i].id = i + 1;
        return out;
    }
};

static_assert(HccExtractor<ThresholdComponentsExtractor>);

/// Components of the thresholded network with at least min_size accounts,
/// ordered by total weight, heaviest first.
inline std::vector<Hcc> extract_hccs(const CoordinationNetwork& cn, double theta, std::size_t min_size = 2) {
    return ThresholdComponentsExtractor{theta, min_size}(cn);
}

/// Accounts that had degree >= 2 before filtering but lost every edge to it;
/// such bridging accounts may be genuine coordinators.
inline std::vector<AccountId> removed_bridges(const CoordinationNetwork& cn, const CoordinationNetwork& filtered) {
    std::vector<AccountId> out;
    for (const auto& [acct, d] : cn.degrees()) {
        if (d >= 2 && !filtered.nodes().contains(acct)) out.push_back(acct);
    }
    return out;
}

}  // namespace coordnet
