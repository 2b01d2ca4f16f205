// Coordination networks: per-window construction, aggregation and
// transitive strengthening across window boundaries.

#pragma once

#include <algorithm>
#include <array>
#include <istream>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "coordnet/coaction.hpp"

namespace coordnet {

using Reason = std::pair<ActionType, std::string>;
using AccountPair = std::pair<AccountId, AccountId>;

inline AccountPair ordered_pair(const AccountId& a, const AccountId& b) {
    return a < b ? AccountPair{a, b} : AccountPair{b, a};
}

struct EdgeEvidence {
    double weight = 0.0;
    std::int64_t pair_count = 0;
    std::map<Reason, std::int64_t> reasons;   ///< multiset: reason -> multiplicity
    bool inferred = false;                    ///< exists only through transitive inference

    bool operator==(const EdgeEvidence&) const = default;
};

/// Undirected weighted account graph keyed by canonical (lo, hi) account pairs.
/// Ordered containers keep every traversal deterministic.
class CoordinationNetwork {
public:
    const std::set<AccountId>& nodes() const noexcept { return nodes_; }
    const std::map<AccountPair, EdgeEvidence>& edges() const noexcept { return edges_; }

    bool empty() const noexcept { return nodes_.empty(); }

    const EdgeEvidence* find(const AccountId& a, const AccountId& b) const {
        auto it = edges_.find(ordered_pair(a, b));
        return it == edges_.end() ? nullptr : &it->second;
    }

    /// Adds (or accumulates into) an edge. Self-loops are rejected.
    EdgeEvidence& edge(const AccountId& a, const AccountId& b) {
        if (a == b) throw ContractViolation("self-loop on " + a);
        nodes_.insert(a);
        nodes_.insert(b);
        return edges_[ordered_pair(a, b)];
    }

    void add_node(const AccountId& a) { nodes_.insert(a); }

    /// Sums weights, pair counts and reason multisets; an edge stays inferred
    /// only if it is inferred on both sides.
    void merge(const CoordinationNetwork& other) {
        nodes_.insert(other.nodes_.begin(), other.nodes_.end());
        for (const auto& [key, ev] : other.edges_) {
            auto [it, fresh] = edges_.try_emplace(key, ev);
            if (fresh) continue;
            auto& mine = it->second;
            mine.weight += ev.weight;
            mine.pair_count += ev.pair_count;
            for (const auto& [r, n] : ev.reasons) mine.reasons[r] += n;
            mine.inferred = mine.inferred && ev.inferred;
        }
    }

    std::map<AccountId, std::size_t> degrees() const {
        std::map<AccountId, std::size_t> deg;
        for (const auto& n : nodes_) deg[n] = 0;
        for (const auto& [key, ev] : edges_) {
            ++deg[key.first];
            ++deg[key.second];
        }
        return deg;
    }

    /// Throws ContractViolation if a structural invariant is broken.
    void validate() const {
        for (const auto& [key, ev] : edges_) {
            if (key.first >= key.second) throw ContractViolation("edge not canonical or self-loop");
            if (!nodes_.contains(key.first) || !nodes_.contains(key.second))
                throw ContractViolation("edge endpoint missing from node set");
            if (!(ev.weight > 0.0)) throw ContractViolation("non-positive edge weight");
            if (ev.inferred != (ev.pair_count == 0)) throw ContractViolation("inferred flag inconsistent");
        }
    }

    bool operator==(const CoordinationNetwork&) const = default;

private:
    std::set<AccountId> nodes_;
    std::map<AccountPair, EdgeEvidence> edges_;
};

/// Network for one window: weight = number of distinct (type, reason) pairs
/// linking two accounts.
inline CoordinationNetwork build_window_cn(std::span<const CoActionPair> pairs) {
    CoordinationNetwork cn;
    if (pairs.empty()) return cn;
    const auto window = pairs.front().window_index;
    for (const auto& p : pairs) {
        if (p.window_index != window) throw ContractViolation("pairs from different windows");
        auto& ev = cn.edge(p.account_a, p.account_b);
        ++ev.pair_count;
        if (ev.reasons[{p.action_type, p.reason}]++ == 0) ev.weight += 1.0;
    }
    return cn;
}

/// One network per window index, in index order.
inline std::vector<CoordinationNetwork> build_window_cns(std::span<const CoActionPair> pairs) {
    std::map<std::int64_t, std::vector<CoActionPair>> by_window;
    for (const auto& p : pairs) by_window[p.window_index].push_back(p);
    std::vector<CoordinationNetwork> out;
    out.reserve(by_window.size());
    for (const auto& [w, ps] : by_window) out.push_back(build_window_cn(ps));
    return out;
}

inline CoordinationNetwork aggregate(std::span<const CoordinationNetwork> networks) {
    CoordinationNetwork out;
    for (const auto& n : networks) out.merge(n);
    return out;
}

/// Window networks built from the pair stream and summed.
inline CoordinationNetwork build_network(std::span<const CoActionPair> pairs) {
    auto per_window = build_window_cns(pairs);
    return aggregate(per_window);
}

// ---------------------------------------------------------------------------
// Transitive strengthening

/// Scenario weights for inferring A-C from A-B and B-C co-actions.
struct ScenarioWeights {
    double w1 = 0.8;
    double w2 = 0.6;
    double w3 = 0.5;
    double w4 = 0.4;
    double w5 = 0.0;
    double decay_lambda = 1.0;
    std::int64_t k_horizon = 6;

    static ScenarioWeights zero() { return {0, 0, 0, 0, 0, 1.0, 6}; }

    /// Enforces 1 >= w1 >= w2 >= w3 >= w4 >= w5 >= 0, lambda >= 0, k >= 1.
    void validate() const {
        const double chain[] = {1.0, w1, w2, w3, w4, w5, 0.0};
        for (std::size_t i = 0; i + 1 < std::size(chain); ++i) {
            if (!std::isfinite(chain[i + 1]) || chain[i] < chain[i + 1]) {
                std::ostringstream msg;
                msg << "scenario weights must satisfy 1 >= w1 >= w2 >= w3 >= w4 >= w5 >= 0 (got " << w1 << ", "
                    << w2 << ", " << w3 << ", " << w4 << ", " << w5 << ")";
                throw ConfigError(msg.str());
            }
        }
        if (!std::isfinite(decay_lambda) || decay_lambda < 0) throw ConfigError("decay_lambda must be >= 0");
        if (k_horizon < 1) throw ConfigError("k_horizon must be >= 1");
    }
};

/// Reads flat `key = value` text; '#' starts a comment. Unspecified keys keep
/// their defaults. The result is validated.
inline ScenarioWeights parse_scenario_weights(std::istream& in, ScenarioWeights base = {}) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto text = detail::trim(line);
        if (text.empty()) continue;
        auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("weights line " + std::to_string(line_no) + ": expected key = value");
        auto key = std::string(detail::trim(text.substr(0, eq)));
        auto value = std::string(detail::trim(text.substr(eq + 1)));
        double v = 0;
        try {
            std::size_t used = 0;
            v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw ConfigError("weights line " + std::to_string(line_no) + ": bad number '" + value + "'");
        }
        if (key == "w1") base.w1 = v;
        else if (key == "w2") base.w2 = v;
        else if (key == "w3") base.w3 = v;
        else if (key == "w4") base.w4 = v;
        else if (key == "w5") base.w5 = v;
        else if (key == "decay_lambda") base.decay_lambda = v;
        else if (key == "k_horizon") {
            if (v != std::floor(v)) throw ConfigError("k_horizon must be an integer");
            base.k_horizon = static_cast<std::int64_t>(v);
        } else throw ConfigError("weights line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    base.validate();
    return base;
}

/// The six ways A and C can be related through a shared partner B.
///  a: same reason, all actions inside one gamma span (A and C co-act directly)
///  b: same reason, actions spread over >= gamma, B's two actions < gamma apart
///  c: different reasons, all actions inside one gamma span
///  d: different reasons, spread over >= gamma, B's two actions < gamma apart
///     (the windows holding them overlap)
///  e: same reason, B's two actions >= gamma apart (disjoint windows)
///  f: different reasons, B's two actions >= gamma apart
enum class Scenario : std::uint8_t { A, B, C, D, E, F };

constexpr char to_char(Scenario s) noexcept { return static_cast<char>('a' + static_cast<int>(s)); }

/// The geometry of one pair-of-pairs (A,B) + (B,C).
struct Bridge {
    AccountId a, b, c;
    Seconds t_a = 0, t_b1 = 0, t_b2 = 0, t_c = 0;
    bool same_reason = false;

    Seconds extent() const {
        auto [lo, hi] = std::minmax({t_a, t_b1, t_b2, t_c});
        return hi - lo;
    }
    Seconds bridge_gap() const { return t_b1 > t_b2 ? t_b1 - t_b2 : t_b2 - t_b1; }
    Seconds ac_gap() const { return t_a > t_c ? t_a - t_c : t_c - t_a; }
};

/// Resolves the shared account. Throws unless exactly one account is shared.
inline Bridge make_bridge(const CoActionPair& p1, const CoActionPair& p2) {
    const bool aa = p1.account_a == p2.account_a, ab = p1.account_a == p2.account_b;
    const bool ba = p1.account_b == p2.account_a, bb = p1.account_b == p2.account_b;
    const int shared = int(aa || ab) + int(ba || bb);
    if (shared != 1) throw ContractViolation("pairs must share exactly one account");
    Bridge br;
    br.b = (aa || ab) ? p1.account_a : p1.account_b;
    br.a = p1.other(br.b);
    br.c = p2.other(br.b);
    br.t_a = p1.time_of(br.a);
    br.t_b1 = p1.time_of(br.b);
    br.t_b2 = p2.time_of(br.b);
    br.t_c = p2.time_of(br.c);
    br.same_reason = p1.action_type == p2.action_type && p1.reason == p2.reason;
    return br;
}

inline Scenario classify_scenario(const Bridge& br, Seconds gamma) {
    if (br.extent() < gamma) return br.same_reason ? Scenario::A : Scenario::C;
    if (br.bridge_gap() < gamma) return br.same_reason ? Scenario::B : Scenario::D;
    return br.same_reason ? Scenario::E : Scenario::F;
}

inline Scenario classify_scenario(const CoActionPair& p1, const CoActionPair& p2, const WindowConfig& cfg) {
    return classify_scenario(make_bridge(p1, p2), cfg.gamma);
}

/// Weight of an inferred A-C link; delta_t is the gap between A's and C's
/// actions. Scenarios e and f decay as exp(-lambda * delta_t / gamma).
inline double transitive_weight(Scenario s, Seconds delta_t, const ScenarioWeights& sw, Seconds gamma) {
    const double decay = std::exp(-sw.decay_lambda * static_cast<double>(delta_t) / static_cast<double>(gamma));
    double w = 0.0;
    switch (s) {
        case Scenario::A: w = 1.0; break;
        case Scenario::B: w = sw.w1; break;
        case Scenario::C: w = sw.w2; break;
        case Scenario::D: w = sw.w3; break;
        case Scenario::E: w = sw.w4 * decay; break;
        case Scenario::F: w = sw.w5 * decay; break;
    }
    return std::clamp(w, 0.0, 1.0);
}

struct StrengthenStats {
    std::size_t bridges_examined = 0;             ///< pair-of-pairs inside the horizon
    std::array<std::size_t, 6> by_scenario{};     ///< counts per scenario a..f
    std::size_t inferred_edges = 0;               ///< edges created by inference
    std::size_t recurring_coretweets = 0;         ///< same-tweet co-retweets bridged across windows
};

struct StrengthenResult {
    CoordinationNetwork network;
    StrengthenStats stats;
};

/// Visits every pair-of-pairs sharing one account whose four actions span
/// less than k*gamma. Pairs are grouped by the bridging account and scanned
/// in time order, so the cost is bounded by the horizon.
template <typename Visit>
void for_each_bridge(std::span<const CoActionPair> pairs, Seconds horizon, Visit&& visit) {
    std::map<std::string_view, std::vector<std::size_t>> by_account;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        by_account[pairs[i].account_a].push_back(i);
        by_account[pairs[i].account_b].push_back(i);
    }
    for (auto& [account, idx] : by_account) {
        const AccountId b(account);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
            return pairs[x].time_of(b) < pairs[y].time_of(b);
        });
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const auto& p1 = pairs[idx[i]];
            const auto t1 = p1.time_of(b);
            for (std::size_t j = i + 1; j < idx.size(); ++j) {
                const auto& p2 = pairs[idx[j]];
                if (p2.time_of(b) - t1 >= horizon) break;
                if (p1.other(b) == p2.other(b)) continue;
                auto br = make_bridge(p1, p2);
                if (br.extent() >= horizon) continue;
                visit(br, p1, p2);
            }
        }
    }
}

/// Adds inferred A-C weight for every bridged pair-of-pairs within the
/// k*gamma horizon. Scenario a adds nothing because its A-C link is already
/// direct evidence. Contributions onto one edge are summed; absent edges are
/// created as inferred. Existing weights never decrease.
inline StrengthenResult strengthen_with_stats(const CoordinationNetwork& cn, std::span<const CoActionPair> pairs,
                                              const ScenarioWeights& sw, const WindowConfig& cfg) {
    sw.validate();
    cfg.validate();
    StrengthenResult result{cn, {}};
    std::map<AccountPair, double> inferred;

    for_each_bridge(pairs, sw.k_horizon * cfg.gamma, [&](const Bridge& br, const CoActionPair& p1, const CoActionPair&) {
        auto& st = result.stats;
        ++st.bridges_examined;
        const auto s = classify_scenario(br, cfg.gamma);
        ++st.by_scenario[static_cast<std::size_t>(s)];
        if (s == Scenario::E && p1.action_type == ActionType::CoRetweet) ++st.recurring_coretweets;
        if (s == Scenario::A) return;
        const double w = transitive_weight(s, br.ac_gap(), sw, cfg.gamma);
        if (w > 0.0) inferred[ordered_pair(br.a, br.c)] += w;
    });

    for (const auto& [key, w] : inferred) {
        auto& ev = result.network.edge(key.first, key.second);
        if (ev.pair_count == 0 && ev.weight == 0.0) {
            ev.inferred = true;
            ++result.stats.inferred_edges;
        }
        ev.weight += w;
    }
    return result;
}

inline CoordinationNetwork strengthen(const CoordinationNetwork& cn, std::span<const CoActionPair> pairs,
                                      const ScenarioWeights& sw, const WindowConfig& cfg) {
    return strengthen_with_stats(cn, pairs, sw, cfg).network;
}

}  // namespace coordnet
