#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "coordnet/forensics.hpp"
#include "coordnet/synthgen.hpp"
#include "oracles.hpp"

using namespace coordnet;
using namespace coordnet::testing;

namespace {

std::vector<CoActionPair> timed_pairs(const AccountId& a, const AccountId& b,
                                      const std::vector<std::pair<Seconds, Seconds>>& times) {
    std::vector<CoActionPair> out;
    int i = 0;
    for (auto [ta, tb] : times) out.push_back(make_coaction_pair(a, ta, b, tb, ActionType::CoRetweet, "r" + std::to_string(i++), 0));
    return out;
}

std::vector<std::pair<Seconds, Seconds>> leads(std::size_t n, std::size_t a_first) {
    std::vector<std::pair<Seconds, Seconds>> out;
    for (std::size_t i = 0; i < n; ++i) {
        Seconds t = static_cast<Seconds>(100 * i);
        out.push_back(i < a_first ? std::pair{t, t + 3} : std::pair{t + 3, t});
    }
    return out;
}

AccountMeta meta_with_age(Seconds end, double years, std::int64_t tweets, std::int64_t friends, std::int64_t followers) {
    AccountMeta m;
    m.account = "acct";
    m.statuses_count = tweets;
    m.friends = friends;
    m.followers = followers;
    m.created_at = end - static_cast<Seconds>(years * kDaysPerYear * kSecondsPerDay);
    return m;
}

}  // namespace

TEST(TimingGrid, AlwaysFirst) {
    auto pairs = timed_pairs("A", "B", leads(74, 74));
    auto g = timing_grid(std::set<AccountId>{"A", "B"}, pairs);
    EXPECT_EQ(*g.cell("A", "B"), (GridCell{74, 74, 0}));
    EXPECT_EQ(*g.cell("B", "A"), (GridCell{74, 0, 0}));
}

TEST(TimingGrid, HalfAndHalf) {
    auto pairs = timed_pairs("A", "B", leads(64, 32));
    auto g = timing_grid(std::set<AccountId>{"A", "B"}, pairs);
    EXPECT_EQ(*g.cell("A", "B"), (GridCell{64, 32, 0}));
    EXPECT_EQ(*g.cell("B", "A"), (GridCell{64, 32, 0}));
}

TEST(TimingGrid, TiesCountForNeither) {
    auto pairs = timed_pairs("A", "B", {{5, 5}, {9, 9}});
    auto g = timing_grid(std::set<AccountId>{"A", "B"}, pairs);
    EXPECT_EQ(*g.cell("A", "B"), (GridCell{2, 0, 2}));
    EXPECT_EQ(*g.cell("B", "A"), (GridCell{2, 0, 2}));
}

TEST(TimingGrid, RestrictedToMembersAndAntisymmetric) {
    auto posts = random_stream(3, 400, 8, 10, 800);
    auto pairs = detect(posts, {{10, 1, default_anchor(posts.front().timestamp, 10)}, ActionTypeSet::all(), {}}).pairs;
    std::set<AccountId> members{"u0", "u1", "u2", "u3"};
    auto g = timing_grid(members, pairs);
    std::int64_t inside = 0;
    for (const auto& p : pairs) inside += members.contains(p.account_a) && members.contains(p.account_b);
    std::int64_t sum = 0;
    for (const auto& [key, c] : g.cells) {
        ASSERT_TRUE(members.contains(key.first) && members.contains(key.second));
        const auto& rev = *g.cell(key.second, key.first);
        ASSERT_EQ(c.total, rev.total);
        ASSERT_EQ(c.ties, rev.ties);
        ASSERT_EQ(c.row_first + rev.row_first + c.ties, c.total);
        if (key.first < key.second) sum += c.total;
    }
    EXPECT_EQ(sum, inside);
}

TEST(Cheerleader, Flagging) {
    auto always = timing_grid(std::set<AccountId>{"A", "B"}, timed_pairs("A", "B", leads(74, 74)));
    auto r = cheerleader_scores(always, 10, 0.95);
    ASSERT_EQ(r.size(), 2u);
    for (const auto& x : r) {
        if (x.account == "B") {
            EXPECT_DOUBLE_EQ(x.follower_fraction, 1.0);
            EXPECT_TRUE(x.flagged);
        } else {
            EXPECT_DOUBLE_EQ(x.follower_fraction, 0.0);
            EXPECT_FALSE(x.flagged);
        }
    }

    auto half = timing_grid(std::set<AccountId>{"A", "B"}, timed_pairs("A", "B", leads(64, 32)));
    for (const auto& x : cheerleader_scores(half)) {
        EXPECT_DOUBLE_EQ(x.follower_fraction, 0.5);
        EXPECT_FALSE(x.flagged);
    }

    auto few = timing_grid(std::set<AccountId>{"A", "B"}, timed_pairs("A", "B", leads(3, 3)));
    EXPECT_TRUE(cheerleader_scores(few, 10, 0.9).empty());
}

TEST(Cheerleader, ParameterChecks) {
    FirstPosterGrid g;
    EXPECT_THROW(cheerleader_scores(g, 0, 0.9), ConfigError);
    EXPECT_THROW(cheerleader_scores(g, 10, 0.5), ConfigError);
    EXPECT_THROW(cheerleader_scores(g, 10, 1.01), ConfigError);
    EXPECT_NO_THROW(cheerleader_scores(g, 1, 1.0));
}

TEST(Cheerleader, InvariantUnderRelabeling) {
    auto pairs = timed_pairs("A", "B", leads(40, 38));
    auto swapped = timed_pairs("Z", "Y", leads(40, 38));   // Z plays A's role but sorts last
    auto f1 = cheerleader_scores(timing_grid(std::set<AccountId>{"A", "B"}, pairs));
    auto f2 = cheerleader_scores(timing_grid(std::set<AccountId>{"Y", "Z"}, swapped));
    auto flagged = [](const std::vector<CheerleaderReport>& rs) {
        std::map<std::string, bool> m;
        for (const auto& r : rs) m[r.account] = r.flagged;
        return m;
    };
    auto m1 = flagged(f1), m2 = flagged(f2);
    EXPECT_EQ(m1["A"], m2["Z"]);
    EXPECT_EQ(m1["B"], m2["Y"]);
    EXPECT_TRUE(m1["B"]);
}

TEST(Reputation, Values) {
    EXPECT_NEAR(reputation(1800, 3600), 0.67, 0.005);
    EXPECT_NEAR(reputation(24, 118), 0.83, 0.005);
    EXPECT_EQ(reputation(0, 0), 0.0);
    EXPECT_THROW(reputation(-1, 3), ContractViolation);
}

TEST(Reputation, Properties) {
    for (std::int64_t x = 1; x < 200; x += 13) EXPECT_DOUBLE_EQ(reputation(x, x), 0.5);
    for (std::int64_t fr = 0; fr < 50; fr += 7)
        for (std::int64_t fo = 0; fo < 50; fo += 5) {
            double r = reputation(fr, fo);
            ASSERT_GE(r, 0.0);
            ASSERT_LE(r, 1.0);
            if (fr + fo > 0) {
                ASSERT_LE(r, reputation(fr, fo + 1));
                ASSERT_GE(r, reputation(fr + 1, fo));
            }
        }
}

TEST(Profile, TweetsPerDay) {
    const Seconds end = 1'600'000'000;
    auto p9 = profile_account(meta_with_age(end, 8.8, 103'300, 0, 0), end);
    ASSERT_TRUE(p9.tweets_per_day);
    EXPECT_NEAR(*p9.tweets_per_day, 32.1, 0.5);
    auto p2 = profile_account(meta_with_age(end, 6.4, 213'400, 1800, 3600), end);
    EXPECT_NEAR(*p2.tweets_per_day, 92.1, 1.5);
    EXPECT_NEAR(p2.reputation, 0.67, 0.005);
    EXPECT_NEAR(*p2.age_days / kDaysPerYear, 6.4, 1e-6);
    auto idle = profile_account(meta_with_age(end, 2, 0, 1, 1), end);
    EXPECT_EQ(*idle.tweets_per_day, 0.0);
}

TEST(Profile, MissingCreationTime) {
    AccountMeta m{"x", 500, std::nullopt, 10, 20, 0.7};
    auto p = profile_account(m, 1000);
    EXPECT_FALSE(p.age_days);
    EXPECT_FALSE(p.tweets_per_day);
    EXPECT_EQ(p.bot_rating, 0.7);
    EXPECT_NEAR(p.reputation, 2.0 / 3.0, 1e-12);
}

TEST(Profile, DatasetEndFromPosts) {
    std::vector<Post> posts = {{"1", "x", 100, {}, {}, {}, {}, {}}, {"2", "y", 86'500, {}, {}, {}, {}, {}}};
    AccountMeta m{"x", 10, 100, 0, 0, std::nullopt};
    auto p = profile_account(m, posts);
    EXPECT_DOUBLE_EQ(*p.age_days, 1.0);
    EXPECT_EQ(p.posts_in_range, 1);
}

TEST(Metadata, Parse) {
    std::istringstream in(
        R"({"user_id":"a","statuses_count":10,"created_at":100,"friends_count":1,"followers_count":3,"bot_rating":0.25})"
        "\n"
        R"({"user_id":7,"statuses_count":2,"friends_count":0,"followers_count":0})"
        "\nnonsense\n"
        R"({"user_id":"b","friends_count":-1})"
        "\n");
    auto r = parse_metadata(in);
    EXPECT_EQ(r.accounts.size(), 2u);
    EXPECT_EQ(r.skipped, 2u);
    EXPECT_EQ(r.accounts.at("a").bot_rating, 0.25);
    EXPECT_EQ(r.accounts.at("a").created_at, 100);
    EXPECT_FALSE(r.accounts.at("7").created_at);
}

TEST(Timeline, Buckets) {
    const Seconds week = 604800;
    std::vector<Post> posts;
    for (Seconds t : {week * 3 + 10, week * 3 + 500, week * 3 + 9000})
        posts.push_back({"p" + std::to_string(t), "A", t, {}, {}, {}, {}, {}});
    auto tl = activity_timeline("A", posts, week);
    ASSERT_EQ(tl.counts.size(), 1u);
    EXPECT_EQ(tl.counts[0], (std::pair<Seconds, std::int64_t>{week * 3, 3}));

    std::vector<Post> straddle = {{"1", "A", 99, {}, {}, {}, {}, {}}, {"2", "A", 100, {}, {}, {}, {}, {}}};
    auto t2 = activity_timeline("A", straddle, 100);
    ASSERT_EQ(t2.counts.size(), 2u);
    EXPECT_EQ(t2.counts[0].second, 1);
    EXPECT_EQ(t2.counts[1].second, 1);
    EXPECT_THROW(activity_timeline("A", straddle, 0), ConfigError);
}

TEST(Timeline, InactiveMemberShowsZeroRun) {
    // Two accounts of one group; the second goes quiet for about two months.
    const Seconds week = 604800;
    SynthConfig cfg;
    cfg.seed = 17;
    cfg.n_background_posts = 0;
    cfg.duration_seconds = 26 * week;
    cfg.groups.push_back({{"m1", "m2"}, ActionType::CoRetweet, 200, 5});
    auto posts = generate(cfg).posts;
    const Seconds quiet_from = cfg.start_time + 8 * week, quiet_to = cfg.start_time + 17 * week;
    std::erase_if(posts, [&](const Post& p) {
        return p.account_id == "m2" && p.timestamp >= quiet_from && p.timestamp < quiet_to;
    });

    auto t1 = activity_timeline("m1", posts, week);
    auto t2 = activity_timeline("m2", posts, week);
    ASSERT_EQ(t1.counts.size(), t2.counts.size());
    std::size_t run = 0, best = 0, active_m1 = 0;
    for (std::size_t i = 0; i < t2.counts.size(); ++i) {
        run = t2.counts[i].second == 0 ? run + 1 : 0;
        best = std::max(best, run);
        if (t2.counts[i].second == 0 && t1.counts[i].second > 0) ++active_m1;
    }
    EXPECT_GE(best, 7u);
    EXPECT_GE(active_m1, 7u);

    for (const auto& tl : {t1, t2}) {
        auto total = std::accumulate(tl.counts.begin(), tl.counts.end(), std::int64_t{0},
                                     [](std::int64_t s, const auto& c) { return s + c.second; });
        EXPECT_EQ(total, std::count_if(posts.begin(), posts.end(), [&](const Post& p) { return p.account_id == tl.account; }));
    }
}
