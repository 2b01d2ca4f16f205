#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "coordnet/io.hpp"
#include "oracles.hpp"

using namespace coordnet;
using namespace coordnet::testing;

TEST(Csv, QuotingRoundTrip) {
    std::vector<std::string> tricky = {"plain", "with,comma", "with \"quote\"", "line\nbreak", "", " lead"};
    std::ostringstream os;
    for (const auto& s : tricky) io::write_row(os, {s, "x"});
    auto rows = io::parse_csv(os.str());
    ASSERT_EQ(rows.size(), tricky.size());
    for (std::size_t i = 0; i < tricky.size(); ++i) {
        EXPECT_EQ(rows[i].at(0), tricky[i]);
        EXPECT_EQ(rows[i].at(1), "x");
    }
}

TEST(Csv, FormatDoubleIsShortestRoundTrip) {
    EXPECT_EQ(io::format_double(3.0), "3");
    EXPECT_EQ(io::format_double(0.1), "0.1");
    for (double v : {1.0 / 3.0, 2.5e-7, 123456.789}) EXPECT_EQ(std::stod(io::format_double(v)), v);
}

TEST(PairsCsv, RoundTrip) {
    auto posts = random_stream(2, 300, 10, 10, 600);
    auto pairs = detect(posts, {{10, 5, default_anchor(posts.front().timestamp, 10)}, ActionTypeSet::all(), {}}).pairs;
    ASSERT_FALSE(pairs.empty());
    auto text = io::pairs_csv(pairs);
    EXPECT_EQ(io::parse_pairs_csv(text), pairs);
    EXPECT_EQ(io::pairs_csv(io::parse_pairs_csv(text)), text);
}

TEST(PairsCsv, RejectsMalformed) {
    EXPECT_THROW(io::parse_pairs_csv("wrong,header\n"), IoError);
    EXPECT_THROW(io::parse_pairs_csv("account_a,account_b,action_type,reason,t_a,t_b,window_index\nA,B,retweet,x,1\n"),
                 IoError);
    EXPECT_THROW(io::parse_pairs_csv("account_a,account_b,action_type,reason,t_a,t_b,window_index\nA,B,nope,x,1,2,0\n"),
                 IoError);
    EXPECT_THROW(io::parse_pairs_csv("account_a,account_b,action_type,reason,t_a,t_b,window_index\nA,B,retweet,x,a,2,0\n"),
                 IoError);
}

TEST(Reasons, EscapingRoundTrip) {
    std::map<Reason, std::int64_t> rs = {{{ActionType::CoHashtag, "a|b"}, 2},
                                          {{ActionType::CoUrl, "https://x.org/a:b\\c"}, 1},
                                          {{ActionType::CoRetweet, "123"}, 3}};
    EXPECT_EQ(io::parse_reasons(io::format_reasons(rs)), rs);
    EXPECT_TRUE(io::parse_reasons("").empty());
}

TEST(EdgesCsv, RoundTripIncludingInferred) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto posts = random_stream(seed, 300, 15, 10, 600);
        WindowConfig cfg{10, 10, default_anchor(posts.front().timestamp, 10)};
        auto pairs = detect(posts, {cfg, ActionTypeSet::all(), {}}).pairs;
        ScenarioWeights sw;
        sw.w5 = 0.1;
        auto cn = strengthen(build_network(pairs), pairs, sw, cfg);
        auto text = io::edges_csv(cn);
        auto back = io::parse_edges_csv(text);
        EXPECT_EQ(io::edges_csv(back), text);
        ASSERT_EQ(back.edges().size(), cn.edges().size());
        for (const auto& [k, e] : cn.edges()) {
            const auto* b = back.find(k.first, k.second);
            ASSERT_NE(b, nullptr);
            EXPECT_EQ(b->weight, e.weight);
            EXPECT_EQ(b->inferred, e.inferred);
            EXPECT_EQ(b->reasons, e.reasons);
        }
    }
}

TEST(Graphml, ContainsNodesAndEdges) {
    CoordinationNetwork cn;
    auto& e = cn.edge("a&b", "c");
    e.weight = 2.5;
    e.pair_count = 1;
    auto g = io::graphml(cn);
    EXPECT_NE(g.find("<graphml"), std::string::npos);
    EXPECT_NE(g.find("a&amp;b"), std::string::npos);
    EXPECT_NE(g.find("2.5"), std::string::npos);
    EXPECT_NE(g.find("edgedefault=\"undirected\""), std::string::npos);
}

TEST(MembersCsv, RoundTrip) {
    CoordinationNetwork cn;
    cn.edge("a", "b").weight = 20;
    cn.edge("a", "b").pair_count = 20;
    cn.edge("c", "d").weight = 30;
    cn.edge("c", "d").pair_count = 30;
    auto hccs = extract_hccs(cn, 10);
    auto m = io::parse_members_csv(io::members_csv(hccs));
    EXPECT_EQ(m.at(1), (std::set<AccountId>{"c", "d"}));
    EXPECT_EQ(m.at(2), (std::set<AccountId>{"a", "b"}));
}

TEST(Files, AtomicWriteAndMissingRead) {
    auto dir = std::filesystem::temp_directory_path() / "coordnet_io_test";
    std::filesystem::create_directories(dir);
    io::write_file_atomic(dir / "x.csv", "hello\n");
    EXPECT_EQ(io::read_file(dir / "x.csv"), "hello\n");
    EXPECT_THROW(io::read_file(dir / "missing.csv"), IoError);
    std::filesystem::remove_all(dir);
}
