// End-to-end detection: pairs -> network -> strengthening -> HCCs -> forensics,
// plus the artifact files each stage writes.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "coordnet/coaction.hpp"
#include "coordnet/forensics.hpp"
#include "coordnet/hcc.hpp"
#include "coordnet/io.hpp"
#include "coordnet/network.hpp"

namespace coordnet {

struct PipelineOptions {
    Seconds gamma = 10;
    std::optional<Seconds> stride;   ///< defaults to gamma (adjacent windows)
    std::optional<Seconds> anchor;   ///< defaults to the first post floored to gamma
    ActionTypeSet types{ActionType::CoRetweet};
    ExtractOptions extract;
    bool strengthen = true;
    ScenarioWeights weights;
    double theta = 10.0;
    std::size_t min_size = 2;
    std::int64_t cheer_min_pairs = 10;
    double cheer_threshold = 0.9;
    Seconds timeline_bucket = 7 * 86400;

    WindowConfig window_for(std::span<const Post> posts) const {
        WindowConfig w{gamma, stride.value_or(gamma), 0};
        if (anchor) w.anchor = *anchor;
        else if (!posts.empty()) w.anchor = default_anchor(posts.front().timestamp, gamma);
        return w;
    }

    void validate() const {
        WindowConfig{gamma, stride.value_or(gamma), 0}.validate();
        weights.validate();
        if (!(theta >= 0)) throw ConfigError("theta must be >= 0");
        if (min_size < 2) throw ConfigError("min_size must be >= 2");
        if (cheer_min_pairs < 1) throw ConfigError("cheerleader min_pairs must be >= 1");
        if (!(cheer_threshold > 0.5 && cheer_threshold <= 1.0))
            throw ConfigError("cheerleader threshold must be in (0.5, 1]");
        if (timeline_bucket < 1) throw ConfigError("timeline bucket must be >= 1");
    }
};

struct HccForensics {
    FirstPosterGrid grid;
    std::vector<CheerleaderReport> cheerleaders;
    std::vector<AccountProfile> profiles;
    std::vector<ActivityTimeline> timelines;
};

struct PipelineResult {
    WindowConfig window;
    DetectResult detection;
    CoordinationNetwork aggregate;
    CoordinationNetwork network;   ///< after strengthening (equal to aggregate when disabled)
    StrengthenStats strengthen_stats;
    std::vector<Hcc> hccs;
    std::vector<AccountId> removed_bridges;
    std::vector<HccForensics> forensics;   ///< index-aligned with hccs
};

/// Forensics for one community. Profiles are emitted only for members with metadata.
inline HccForensics analyse_hcc(const std::set<AccountId>& members, std::span<const CoActionPair> pairs,
                                std::span<const Post> posts, const std::map<AccountId, AccountMeta>& metadata,
                                const PipelineOptions& opts) {
    HccForensics f;
    f.grid = timing_grid(members, pairs);
    f.cheerleaders = cheerleader_scores(f.grid, opts.cheer_min_pairs, opts.cheer_threshold);
    Seconds lo = 0, hi = 0;
    if (!posts.empty()) {
        lo = posts.front().timestamp;
        hi = posts.back().timestamp;
    }
    for (const auto& m : members) {
        if (auto it = metadata.find(m); it != metadata.end()) {
            std::int64_t own = 0;
            for (const auto& p : posts) own += p.account_id == m;
            f.profiles.push_back(profile_account(it->second, hi, own));
        }
        if (!posts.empty()) f.timelines.push_back(activity_timeline(m, posts, opts.timeline_bucket, lo, hi));
    }
    return f;
}

/// `posts` must be (timestamp, post_id)-ordered, as parse_posts returns them.
inline PipelineResult run_pipeline(std::span<const Post> posts, const std::map<AccountId, AccountMeta>& metadata,
                                   const PipelineOptions& opts) {
    opts.validate();
    PipelineResult r;
    r.window = opts.window_for(posts);
    r.detection = detect(posts, {r.window, opts.types, opts.extract});
    r.aggregate = build_network(r.detection.pairs);
    if (opts.strengthen) {
        auto s = strengthen_with_stats(r.aggregate, r.detection.pairs, opts.weights, r.window);
        r.network = std::move(s.network);
        r.strengthen_stats = s.stats;
    } else {
        r.network = r.aggregate;
    }
    r.network.validate();
    r.hccs = extract_hccs(r.network, opts.theta, opts.min_size);
    r.removed_bridges = removed_bridges(r.network, filter_edges(r.network, opts.theta));
    for (const auto& h : r.hccs) r.forensics.push_back(analyse_hcc(h.accounts, r.detection.pairs, posts, metadata, opts));
    return r;
}

// ---------------------------------------------------------------------------
// Artifact files. Each stage command writes its own subset; the pipeline
// writes all of them.

namespace artifacts {

inline constexpr const char* kPairs = "pairs.csv";
inline constexpr const char* kAggregate = "edges_aggregate.csv";
inline constexpr const char* kEdges = "edges.csv";
inline constexpr const char* kGraphml = "edges.graphml";
inline constexpr const char* kHccs = "hccs.csv";
inline constexpr const char* kMembers = "hcc_members.csv";
inline constexpr const char* kRemoved = "removed_bridges.csv";
inline constexpr const char* kGrids = "grids.csv";
inline constexpr const char* kCheerleaders = "cheerleaders.csv";
inline constexpr const char* kProfiles = "profiles.csv";
inline constexpr const char* kTimelines = "timelines.csv";

inline std::string hcc_edges_name(std::size_t id) { return "hcc_" + std::to_string(id) + "_edges.csv"; }

}  // namespace artifacts

inline void write_hcc_artifacts(const std::filesystem::path& dir, std::span<const Hcc> hccs,
                                std::span<const AccountId> removed) {
    io::write_file_atomic(dir / artifacts::kHccs, io::hccs_csv(hccs));
    io::write_file_atomic(dir / artifacts::kMembers, io::members_csv(hccs));
    for (const auto& h : hccs) io::write_file_atomic(dir / artifacts::hcc_edges_name(h.id), io::edges_csv(h.edges));
    std::ostringstream os;
    os << "account\n";
    for (const auto& a : removed) os << io::csv_field(a) << '\n';
    io::write_file_atomic(dir / artifacts::kRemoved, os.str());
}

/// `forensics` is keyed by HCC id.
inline void write_forensics_artifacts(const std::filesystem::path& dir,
                                      const std::map<std::size_t, HccForensics>& forensics) {
    std::ostringstream grids, cheer, profiles, timelines;
    grids << io::grid_header();
    cheer << io::cheerleader_header();
    profiles << io::profile_header();
    timelines << io::timeline_header();
    for (const auto& [id, f] : forensics) {
        io::append_grid_rows(grids, id, f.grid);
        io::append_cheerleader_rows(cheer, id, f.cheerleaders);
        for (const auto& p : f.profiles) io::append_profile_row(profiles, id, p);
        for (const auto& t : f.timelines) io::append_timeline_rows(timelines, id, t);
    }
    io::write_file_atomic(dir / artifacts::kGrids, grids.str());
    io::write_file_atomic(dir / artifacts::kCheerleaders, cheer.str());
    io::write_file_atomic(dir / artifacts::kProfiles, profiles.str());
    io::write_file_atomic(dir / artifacts::kTimelines, timelines.str());
}

inline void write_pipeline_artifacts(const std::filesystem::path& dir, const PipelineResult& r, bool with_graphml) {
    std::filesystem::create_directories(dir);
    io::write_file_atomic(dir / artifacts::kPairs, io::pairs_csv(r.detection.pairs));
    io::write_file_atomic(dir / artifacts::kAggregate, io::edges_csv(r.aggregate));
    io::write_file_atomic(dir / artifacts::kEdges, io::edges_csv(r.network));
    if (with_graphml) io::write_file_atomic(dir / artifacts::kGraphml, io::graphml(r.network));
    write_hcc_artifacts(dir, r.hccs, r.removed_bridges);
    std::map<std::size_t, HccForensics> by_id;
    for (std::size_t i = 0; i < r.hccs.size(); ++i) by_id[r.hccs[i].id] = r.forensics[i];
    write_forensics_artifacts(dir, by_id);
}

}  // namespace coordnet
