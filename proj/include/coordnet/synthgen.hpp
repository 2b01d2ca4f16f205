// Synthetic post streams with planted coordination ground truth.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "coordnet/network.hpp"

namespace coordnet {

/// Identifier of the pseudo-random algorithm, recorded in truth files.
inline constexpr std::string_view kSynthRngAlgorithm = "mt19937_64";

struct PlantedGroup {
    std::vector<AccountId> accounts;
    ActionType action_type = ActionType::CoRetweet;
    std::int64_t n_coordination_events = 0;
    Seconds spread_seconds = 5;   ///< member actions of one event fall in [t0, t0 + spread)
};

struct PlantedCheerleader {
    AccountId leader;
    AccountId follower;
    Seconds reaction_delay_max = 5;
    std::int64_t n_events = 0;
    /// Swap roles on every other event; produces a symmetric, non-cheerleading pair.
    bool alternating = false;
    ActionType action_type = ActionType::CoRetweet;
};

struct SynthConfig {
    std::uint64_t seed = 1;
    std::int64_t n_background_accounts = 100;
    std::int64_t n_background_posts = 1000;
    Seconds start_time = 1'600'000'000;
    Seconds duration_seconds = 86'400;
    ActionTypeSet background_types{ActionType::CoRetweet};
    /// Zipfian reuse of background reasons, so that incidental coordination occurs.
    bool realistic = false;
    std::int64_t realistic_pool = 1000;
    double zipf_exponent = 1.1;
    /// Window length the stream will be analysed with; planted timings must fit inside it.
    Seconds gamma = 10;
    std::vector<PlantedGroup> groups;
    std::vector<PlantedCheerleader> cheerleaders;

    void validate() const;
};

struct SynthTruth {
    std::map<AccountPair, std::int64_t> edges;   ///< expected pair_count per planted edge
    std::vector<std::set<AccountId>> groups;
    std::vector<PlantedCheerleader> cheerleaders;
};

struct SynthOutput {
    std::vector<Post> posts;   ///< (timestamp, post_id)-ordered
    SynthTruth truth;
};

inline std::string background_account(std::int64_t i) { return "bg" + std::to_string(i); }

inline bool is_background_name(const AccountId& id) {
    if (id.size() < 3 || id.compare(0, 2, "bg") != 0) return false;
    return std::all_of(id.begin() + 2, id.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline void SynthConfig::validate() const {
    if (gamma < 1) throw ConfigError("synth gamma must be >= 1");
    if (duration_seconds < 1) throw ConfigError("duration_seconds must be >= 1");
    if (n_background_posts < 0) throw ConfigError("n_background_posts must be >= 0");
    if (n_background_posts > 0 && n_background_accounts < 1)
        throw ConfigError("background posts need at least one background account");
    if (background_types.empty()) throw ConfigError("background_types is empty");
    if (realistic && (realistic_pool < 1 || !(zipf_exponent > 0)))
        throw ConfigError("realistic mode needs a positive pool and exponent");

    auto check_planted = [](const AccountId& a) {
        if (a.empty()) throw ConfigError("planted account id is empty");
        if (is_background_name(a))
            throw ConfigError("planted account '" + a + "' collides with the background account space");
    };
    for (const auto& g : groups) {
        if (g.accounts.size() < 2) throw ConfigError("planted group needs at least 2 accounts");
        if (std::set<AccountId>(g.accounts.begin(), g.accounts.end()).size() != g.accounts.size())
            throw ConfigError("planted group repeats an account");
        for (const auto& a : g.accounts) check_planted(a);
        if (g.n_coordination_events < 1) throw ConfigError("planted group needs >= 1 event");
        if (g.spread_seconds < 1 || g.spread_seconds > gamma)
            throw ConfigError("group spread_seconds must be in [1, gamma]");
        if (g.spread_seconds > duration_seconds) throw ConfigError("spread exceeds duration");
    }
    for (const auto& c : cheerleaders) {
        check_planted(c.leader);
        check_planted(c.follower);
        if (c.leader == c.follower) throw ConfigError("cheerleader leader equals follower");
        if (c.n_events < 1) throw ConfigError("cheerleader pair needs >= 1 event");
        if (c.reaction_delay_max < 1 || c.reaction_delay_max >= gamma)
            throw ConfigError("reaction_delay_max must be in [1, gamma)");
        if (c.reaction_delay_max >= duration_seconds) throw ConfigError("reaction delay exceeds duration");
    }
}

namespace detail {

/// Platform-independent draws on top of the standard engine (whose output
/// sequence is fully specified, unlike the std distributions).
class SynthRng {
public:
    explicit SynthRng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }
    std::int64_t in_range(std::int64_t lo, std::int64_t hi) {   // inclusive
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

inline Post post_with_action(std::string post_id, AccountId account, Seconds t, ActionType type,
                             const std::string& reason) {
    Post p;
    p.post_id = std::move(post_id);
    p.account_id = std::move(account);
    p.timestamp = t;
    switch (type) {
        case ActionType::CoRetweet: p.retweet_of = reason; break;
        case ActionType::CoHashtag: p.hashtags = {reason}; break;
        case ActionType::CoUrl: p.urls = {"https://example.org/" + reason}; break;
        case ActionType::CoMention: p.mentions = {"m_" + reason}; break;
        case ActionType::CoConversation: p.conversation_id = "conv_" + reason; break;
    }
    return p;
}

}  // namespace detail

/// Deterministic for a fixed config. Background posts carry unique reasons
/// (unless `realistic`), so every co-action involves planted accounts.
inline SynthOutput generate(const SynthConfig& cfg) {
    cfg.validate();
    detail::SynthRng rng(cfg.seed);
    SynthOutput out;
    std::int64_t next_id = 0;
    auto new_id = [&] { return "p" + std::to_string(next_id++); };

    std::vector<ActionType> bg_types;
    for (auto t : kAllActionTypes)
        if (cfg.background_types.contains(t)) bg_types.push_back(t);

    std::vector<double> zipf_cdf;
    if (cfg.realistic) {
        double sum = 0;
        for (std::int64_t k = 1; k <= cfg.realistic_pool; ++k) {
            sum += 1.0 / std::pow(static_cast<double>(k), cfg.zipf_exponent);
            zipf_cdf.push_back(sum);
        }
        for (auto& c : zipf_cdf) c /= sum;
    }

    const Seconds end = cfg.start_time + cfg.duration_seconds - 1;
    for (std::int64_t i = 0; i < cfg.n_background_posts; ++i) {
        auto account = background_account(static_cast<std::int64_t>(rng.below(cfg.n_background_accounts)));
        auto t = rng.in_range(cfg.start_time, end);
        auto type = bg_types[rng.below(bg_types.size())];
        std::string reason;
        if (cfg.realistic) {
            auto k = std::lower_bound(zipf_cdf.begin(), zipf_cdf.end(), rng.unit()) - zipf_cdf.begin();
            reason = "z" + std::to_string(std::min<std::int64_t>(k, cfg.realistic_pool - 1));
        } else {
            reason = "b" + std::to_string(i);
        }
        out.posts.push_back(detail::post_with_action(new_id(), std::move(account), t, type, reason));
    }

    for (std::size_t gi = 0; gi < cfg.groups.size(); ++gi) {
        const auto& g = cfg.groups[gi];
        for (std::int64_t e = 0; e < g.n_coordination_events; ++e) {
            const auto t0 = rng.in_range(cfg.start_time, cfg.start_time + cfg.duration_seconds - g.spread_seconds);
            const auto reason = "g" + std::to_string(gi) + "e" + std::to_string(e);
            for (const auto& a : g.accounts) {
                auto t = t0 + rng.in_range(0, g.spread_seconds - 1);
                out.posts.push_back(detail::post_with_action(new_id(), a, t, g.action_type, reason));
            }
        }
        for (std::size_t i = 0; i < g.accounts.size(); ++i)
            for (std::size_t j = i + 1; j < g.accounts.size(); ++j)
                out.truth.edges[ordered_pair(g.accounts[i], g.accounts[j])] += g.n_coordination_events;
        out.truth.groups.emplace_back(g.accounts.begin(), g.accounts.end());
    }

    for (std::size_t ci = 0; ci < cfg.cheerleaders.size(); ++ci) {
        const auto& c = cfg.cheerleaders[ci];
        for (std::int64_t e = 0; e < c.n_events; ++e) {
            const auto t0 = rng.in_range(cfg.start_time, end - c.reaction_delay_max);
            const auto delay = rng.in_range(1, c.reaction_delay_max);
            const auto reason = "c" + std::to_string(ci) + "e" + std::to_string(e);
            const bool swap = c.alternating && (e % 2 == 1);
            const auto& first = swap ? c.follower : c.leader;
            const auto& second = swap ? c.leader : c.follower;
            out.posts.push_back(detail::post_with_action(new_id(), first, t0, c.action_type, reason));
            out.posts.push_back(detail::post_with_action(new_id(), second, t0 + delay, c.action_type, reason));
        }
        out.truth.edges[ordered_pair(c.leader, c.follower)] += c.n_events;
        out.truth.cheerleaders.push_back(c);
    }

    sort_posts(out.posts);
    return out;
}

// ---------------------------------------------------------------------------
// JSON config and truth files

inline SynthConfig parse_synth_config(const nlohmann::json& doc) {
    SynthConfig cfg;
    try {
        cfg.seed = doc.value("seed", cfg.seed);
        cfg.n_background_accounts = doc.value("n_background_accounts", cfg.n_background_accounts);
        cfg.n_background_posts = doc.value("n_background_posts", cfg.n_background_posts);
        cfg.start_time = doc.value("start_time", cfg.start_time);
        cfg.duration_seconds = doc.value("duration_seconds", cfg.duration_seconds);
        if (doc.contains("background_types"))
            cfg.background_types = parse_action_types(doc["background_types"].get<std::string>());
        cfg.realistic = doc.value("realistic", cfg.realistic);
        cfg.realistic_pool = doc.value("realistic_pool", cfg.realistic_pool);
        cfg.zipf_exponent = doc.value("zipf_exponent", cfg.zipf_exponent);
        cfg.gamma = doc.value("gamma", cfg.gamma);
        auto type_of = [](const nlohmann::json& j) {
            auto name = j.value("action_type", std::string("retweet"));
            auto t = parse_action_type(name);
            if (!t) throw ConfigError("unknown action type '" + name + "'");
            return *t;
        };
        for (const auto& g : doc.value("groups", nlohmann::json::array())) {
            PlantedGroup pg;
            pg.accounts = g.at("accounts").get<std::vector<std::string>>();
            pg.action_type = type_of(g);
            pg.n_coordination_events = g.at("n_coordination_events").get<std::int64_t>();
            pg.spread_seconds = g.value("spread_seconds", pg.spread_seconds);
            cfg.groups.push_back(std::move(pg));
        }
        for (const auto& c : doc.value("cheerleaders", nlohmann::json::array())) {
            PlantedCheerleader pc;
            pc.leader = c.at("leader").get<std::string>();
            pc.follower = c.at("follower").get<std::string>();
            pc.reaction_delay_max = c.value("reaction_delay_max", pc.reaction_delay_max);
            pc.n_events = c.at("n_events").get<std::int64_t>();
            pc.alternating = c.value("alternating", false);
            pc.action_type = type_of(c);
            cfg.cheerleaders.push_back(std::move(pc));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("synth config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

/// One JSON document per line: a header, then planted edges, groups and
/// cheerleader pairs.
inline std::vector<std::string> serialize_truth(const SynthConfig& cfg, const SynthTruth& truth) {
    std::vector<std::string> lines;
    nlohmann::ordered_json head;
    head["kind"] = "meta";
    head["rng"] = kSynthRngAlgorithm;
    head["seed"] = cfg.seed;
    lines.push_back(head.dump());
    for (const auto& [key, n] : truth.edges) {
        nlohmann::ordered_json j;
        j["kind"] = "edge";
        j["account_a"] = key.first;
        j["account_b"] = key.second;
        j["expected_pair_count"] = n;
        lines.push_back(j.dump());
    }
    for (const auto& g : truth.groups) {
        nlohmann::ordered_json j;
        j["kind"] = "group";
        j["accounts"] = std::vector<std::string>(g.begin(), g.end());
        lines.push_back(j.dump());
    }
    for (const auto& c : truth.cheerleaders) {
        nlohmann::ordered_json j;
        j["kind"] = "cheerleader";
        j["leader"] = c.leader;
        j["follower"] = c.follower;
        j["n_events"] = c.n_events;
        j["alternating"] = c.alternating;
        lines.push_back(j.dump());
    }
    return lines;
}

}  // namespace coordnet
