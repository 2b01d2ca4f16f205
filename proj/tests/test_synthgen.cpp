#include <gtest/gtest.h>

#include "coordnet/pipeline.hpp"
#include "coordnet/synthgen.hpp"
#include "oracles.hpp"

using namespace coordnet;
using namespace coordnet::testing;

namespace {

std::vector<std::string> serialized(const SynthOutput& out) {
    std::vector<std::string> lines;
    for (const auto& p : out.posts) lines.push_back(serialize_post(p));
    return lines;
}

DetectOptions stride_one(const std::vector<Post>& posts, ActionTypeSet types = ActionTypeSet::all()) {
    return {{10, 1, default_anchor(posts.front().timestamp, 10)}, types, {}};
}

}  // namespace

TEST(Synth, Deterministic) {
    SynthConfig cfg;
    cfg.seed = 99;
    cfg.background_types = ActionTypeSet::all();
    cfg.groups.push_back({{"a", "b", "c"}, ActionType::CoHashtag, 7, 4});
    cfg.cheerleaders.push_back({"l", "f", 5, 9, false, ActionType::CoUrl});
    EXPECT_EQ(serialized(generate(cfg)), serialized(generate(cfg)));
    EXPECT_EQ(serialize_truth(cfg, generate(cfg).truth), serialize_truth(cfg, generate(cfg).truth));
    auto other = cfg;
    other.seed = 100;
    EXPECT_NE(serialized(generate(cfg)), serialized(generate(other)));
}

TEST(Synth, GroupTruth) {
    SynthConfig cfg;
    cfg.groups.push_back({{"a", "b", "c"}, ActionType::CoRetweet, 5, 5});
    auto out = generate(cfg);
    ASSERT_EQ(out.truth.edges.size(), 3u);
    for (const auto& [k, n] : out.truth.edges) EXPECT_EQ(n, 5);

    auto cn = build_network(detect(out.posts, stride_one(out.posts)).pairs);
    for (const auto& [k, n] : out.truth.edges) {
        const auto* e = cn.find(k.first, k.second);
        ASSERT_NE(e, nullptr);
        EXPECT_EQ(e->pair_count, n);
    }
}

TEST(Synth, RejectsInvalidConfigs) {
    auto expect_reject = [](auto mutate) {
        SynthConfig cfg;
        mutate(cfg);
        EXPECT_THROW(generate(cfg), ConfigError);
    };
    expect_reject([](SynthConfig& c) { c.groups.push_back({{"bg3", "x"}, ActionType::CoRetweet, 2, 5}); });
    expect_reject([](SynthConfig& c) { c.groups.push_back({{"x"}, ActionType::CoRetweet, 2, 5}); });
    expect_reject([](SynthConfig& c) { c.groups.push_back({{"x", "x"}, ActionType::CoRetweet, 2, 5}); });
    expect_reject([](SynthConfig& c) { c.groups.push_back({{"x", "y"}, ActionType::CoRetweet, 2, 11}); });
    expect_reject([](SynthConfig& c) { c.cheerleaders.push_back({"l", "f", 10, 3, false, ActionType::CoRetweet}); });
    expect_reject([](SynthConfig& c) { c.cheerleaders.push_back({"l", "bg0", 3, 3, false, ActionType::CoRetweet}); });
    expect_reject([](SynthConfig& c) { c.n_background_accounts = 0; });

    SynthConfig ok;
    ok.groups.push_back({{"bgx", "bg"}, ActionType::CoRetweet, 2, 5});
    EXPECT_NO_THROW(generate(ok));
}

TEST(Synth, ParsesJsonConfig) {
    auto doc = nlohmann::json::parse(R"({
        "seed": 4, "n_background_posts": 10, "background_types": "retweet,hashtag",
        "groups": [{"accounts": ["a", "b"], "n_coordination_events": 3, "action_type": "url"}],
        "cheerleaders": [{"leader": "l", "follower": "f", "n_events": 2, "alternating": true}]
    })");
    auto cfg = parse_synth_config(doc);
    EXPECT_EQ(cfg.seed, 4u);
    EXPECT_EQ(cfg.groups.at(0).action_type, ActionType::CoUrl);
    EXPECT_TRUE(cfg.cheerleaders.at(0).alternating);
    EXPECT_THROW(parse_synth_config(nlohmann::json::parse(R"({"groups":[{"accounts":["a","b"]}]})")), ConfigError);
    EXPECT_THROW(parse_synth_config(nlohmann::json::parse(R"({"seed":"x"})")), ConfigError);
}

TEST(Synth, BackgroundNeverCoordinates) {
    SynthConfig cfg;
    cfg.seed = 3;
    cfg.n_background_accounts = 20;
    cfg.n_background_posts = 5000;
    cfg.duration_seconds = 600;
    cfg.background_types = ActionTypeSet::all();
    auto posts = generate(cfg).posts;
    for (Seconds gamma : {10, 60, 600})
        EXPECT_TRUE(detect(posts, {{gamma, 1, default_anchor(posts.front().timestamp, gamma)}, ActionTypeSet::all(), {}})
                        .pairs.empty());
}

TEST(Synth, RealisticModeProducesIncidentalCoordination) {
    SynthConfig cfg;
    cfg.seed = 3;
    cfg.n_background_posts = 2000;
    cfg.duration_seconds = 3600;
    cfg.realistic = true;
    auto posts = generate(cfg).posts;
    EXPECT_FALSE(detect(posts, stride_one(posts)).pairs.empty());
}

TEST(Synth, FollowerAlwaysSecond) {
    SynthConfig cfg;
    cfg.n_background_posts = 200;
    cfg.cheerleaders.push_back({"lead", "fol", 5, 30, false, ActionType::CoRetweet});
    auto out = generate(cfg);
    auto pairs = detect(out.posts, stride_one(out.posts)).pairs;
    auto reports = cheerleader_scores(timing_grid(std::set<AccountId>{"lead", "fol"}, pairs), 10, 0.9);
    bool seen = false;
    for (const auto& r : reports)
        if (r.account == "fol") {
            seen = true;
            EXPECT_EQ(r.follower_fraction, 1.0);
            EXPECT_EQ(r.total, 30);
        }
    EXPECT_TRUE(seen);
}

TEST(Synth, PipelineRecoversPlantedGroupAtEventsMinusOne) {
    SynthConfig cfg;
    cfg.seed = 21;
    cfg.n_background_posts = 10'000;
    cfg.duration_seconds = 2 * 86400;
    cfg.groups.push_back({{"g1", "g2", "g3", "g4", "g5"}, ActionType::CoRetweet, 12, 5});
    auto out = generate(cfg);
    PipelineOptions opts;
    opts.stride = 1;
    opts.strengthen = false;
    opts.theta = static_cast<double>(cfg.groups[0].n_coordination_events - 1);
    auto r = run_pipeline(out.posts, {}, opts);
    ASSERT_EQ(r.hccs.size(), 1u);
    EXPECT_EQ(r.hccs[0].accounts, out.truth.groups[0]);
}
