// coordnet command-line tool.
//
// Exit codes: 0 success, 2 I/O failure, 3 invalid configuration or usage,
// 4 internal invariant breach.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coordnet/coordnet.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace coordnet;

namespace {

constexpr int kExitIo = 2;
constexpr int kExitConfig = 3;
constexpr int kExitInternal = 4;

struct Flags {
    std::string input;
    std::string metadata;
    std::string pairs;
    std::string edges;
    std::string members;
    std::string weights;
    std::string config;
    std::string out;
    std::string truth;
    std::string out_dir = ".";
    std::string types = "retweet";
    std::string gamma_preset;
    std::string anchor = "auto";
    Seconds gamma = 10;
    std::optional<Seconds> stride;
    double theta = 10.0;
    std::size_t min_size = 2;
    bool own_actions_only = false;
    bool graphml = false;
    bool no_strengthen = false;
    std::int64_t min_pairs = 10;
    double cheer_threshold = 0.9;
    Seconds bucket = 7 * 86400;

    bool gamma_given = false;
    bool theta_given = false;
};

std::string joined_command_line(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

// ---------------------------------------------------------------------------
// Flag groups

void add_window_flags(CLI::App* app, Flags& f) {
    app->add_option("--gamma", f.gamma, "Window duration in seconds")->capture_default_str();
    app->add_option("--gamma-preset", f.gamma_preset, "ds1 = {900,3600,21600,86400} s; rnc = 10 s with theta 10")
        ->check(CLI::IsMember({"ds1", "rnc"}));
    app->add_option("--stride", f.stride, "Window stride in seconds (default: gamma, adjacent windows)");
    app->add_option("--anchor", f.anchor, "Start of window 0 in epoch seconds, or 'auto'")->capture_default_str();
}

void add_detect_flags(CLI::App* app, Flags& f) {
    add_window_flags(app, f);
    app->add_option("--types", f.types, "Action types: retweet,hashtag,url,mention,conversation")
        ->capture_default_str();
    app->add_flag("--own-actions-only", f.own_actions_only,
                  "Ignore hashtags, URLs and mentions embedded in retweets");
}

void add_hcc_flags(CLI::App* app, Flags& f) {
    app->add_option("--theta", f.theta, "Keep edges with weight strictly greater than this")->capture_default_str();
    app->add_option("--min-size", f.min_size, "Minimum accounts per HCC")->capture_default_str();
}

void add_forensics_flags(CLI::App* app, Flags& f) {
    app->add_option("--metadata", f.metadata, "Account metadata sidecar (JSON lines)");
    app->add_option("--min-pairs", f.min_pairs, "Minimum co-actions before a pair is scored")->capture_default_str();
    app->add_option("--cheer-threshold", f.cheer_threshold, "Follower fraction that flags a cheerleader")
        ->capture_default_str();
    app->add_option("--bucket", f.bucket, "Activity timeline bucket in seconds")->capture_default_str();
}

// ---------------------------------------------------------------------------
// Helpers

struct GammaPlan {
    std::vector<Seconds> gammas;
    double theta;
};

GammaPlan plan_gammas(const Flags& f) {
    GammaPlan plan{{f.gamma}, f.theta};
    if (f.gamma_preset.empty()) return plan;
    if (f.gamma_given) throw ConfigError("--gamma and --gamma-preset are exclusive");
    if (f.gamma_preset == "ds1") {
        plan.gammas = {900, 3600, 21600, 86400};
    } else {
        plan.gammas = {10};
        if (!f.theta_given) plan.theta = 10.0;
    }
    return plan;
}

std::optional<Seconds> parse_anchor(const std::string& s) {
    if (s == "auto") return std::nullopt;
    Seconds v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw ConfigError("--anchor must be an integer or 'auto'");
    return v;
}

ScenarioWeights load_weights(const Flags& f, cli::Manifest* manifest) {
    if (f.weights.empty()) return ScenarioWeights{};
    auto text = io::read_file(f.weights);
    if (manifest) manifest->config(f.weights, text);
    std::istringstream in(text);
    return parse_scenario_weights(in);
}

ParseResult load_posts(const std::string& path, cli::Manifest& manifest) {
    if (path.empty()) throw ConfigError("--input is required");
    auto text = io::read_file(path);
    manifest.input(path, text);
    std::istringstream in(text);
    auto parsed = parse_posts(in);
    for (const auto& m : parsed.messages) std::cerr << "warning: " << path << ": " << m << '\n';
    manifest.count("posts_parsed", parsed.posts.size());
    manifest.count("posts_skipped", parsed.skipped);
    return parsed;
}

std::map<AccountId, AccountMeta> load_metadata(const std::string& path, cli::Manifest& manifest) {
    if (path.empty()) return {};
    auto text = io::read_file(path);
    manifest.input(path, text);
    std::istringstream in(text);
    auto parsed = parse_metadata(in);
    if (parsed.skipped) std::cerr << "warning: " << path << ": skipped " << parsed.skipped << " records\n";
    manifest.count("metadata_accounts", parsed.accounts.size());
    return parsed.accounts;
}

std::vector<CoActionPair> load_pairs(const std::string& path, cli::Manifest& manifest) {
    if (path.empty()) throw ConfigError("--pairs is required");
    auto text = io::read_file(path);
    manifest.input(path, text);
    auto pairs = io::parse_pairs_csv(text);
    manifest.count("pairs", pairs.size());
    return pairs;
}

PipelineOptions pipeline_options(const Flags& f, Seconds gamma, double theta, const ScenarioWeights& w) {
    PipelineOptions o;
    o.gamma = gamma;
    o.stride = f.stride;
    o.anchor = parse_anchor(f.anchor);
    o.types = parse_action_types(f.types);
    o.extract.own_actions_only = f.own_actions_only;
    o.strengthen = !f.no_strengthen;
    o.weights = w;
    o.theta = theta;
    o.min_size = f.min_size;
    o.cheer_min_pairs = f.min_pairs;
    o.cheer_threshold = f.cheer_threshold;
    o.timeline_bucket = f.bucket;
    return o;
}

void record_options(cli::Manifest& m, const PipelineOptions& o, const WindowConfig& w) {
    m.setting("gamma", w.gamma);
    m.setting("stride", w.stride);
    m.setting("anchor", w.anchor);
    m.setting("types", o.types.to_string());
    m.setting("own_actions_only", o.extract.own_actions_only);
}

void record_weights(cli::Manifest& m, const ScenarioWeights& w) {
    m.setting("weights", nlohmann::ordered_json{{"w1", w.w1}, {"w2", w.w2}, {"w3", w.w3}, {"w4", w.w4},
                                                {"w5", w.w5}, {"decay_lambda", w.decay_lambda},
                                                {"k_horizon", w.k_horizon}});
}

fs::path gamma_dir(const Flags& f, const GammaPlan& plan, Seconds gamma) {
    fs::path dir = f.out_dir;
    if (plan.gammas.size() > 1) dir /= "gamma_" + std::to_string(gamma);
    fs::create_directories(dir);
    return dir;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_detect(const Flags& f, const std::string& cmdline) {
    auto plan = plan_gammas(f);
    cli::Manifest base("detect", cmdline);
    auto parsed = load_posts(f.input, base);
    for (auto gamma : plan.gammas) {
        auto opts = pipeline_options(f, gamma, plan.theta, {});
        opts.validate();
        auto window = opts.window_for(parsed.posts);
        auto result = detect(parsed.posts, {window, opts.types, opts.extract});
        auto dir = gamma_dir(f, plan, gamma);
        io::write_file_atomic(dir / artifacts::kPairs, io::pairs_csv(result.pairs));

        auto m = base;
        record_options(m, opts, window);
        m.count("windows", result.windows);
        m.count("posts_before_anchor", result.before_anchor);
        m.count("pairs", result.pairs.size());
        m.write(dir / "manifest.json");
        std::cout << "gamma=" << gamma << " pairs=" << result.pairs.size() << " -> " << (dir / artifacts::kPairs).string()
                  << '\n';
    }
    return 0;
}

int cmd_network(const Flags& f, const std::string& cmdline) {
    cli::Manifest m("network", cmdline);
    auto pairs = load_pairs(f.pairs, m);
    auto cn = build_network(pairs);
    fs::path dir = f.out_dir;
    fs::create_directories(dir);
    io::write_file_atomic(dir / artifacts::kAggregate, io::edges_csv(cn));
    if (f.graphml) io::write_file_atomic(dir / "edges_aggregate.graphml", io::graphml(cn));
    m.count("nodes", cn.nodes().size());
    m.count("edges", cn.edges().size());
    m.write(dir / "manifest.json");
    std::cout << "edges=" << cn.edges().size() << " -> " << (dir / artifacts::kAggregate).string() << '\n';
    return 0;
}

int cmd_strengthen(const Flags& f, const std::string& cmdline) {
    cli::Manifest m("strengthen", cmdline);
    auto weights = load_weights(f, &m);
    WindowConfig window{f.gamma, f.stride.value_or(f.gamma), parse_anchor(f.anchor).value_or(0)};
    window.validate();
    auto pairs = load_pairs(f.pairs, m);
    auto cn = build_network(pairs);
    auto s = strengthen_with_stats(cn, pairs, weights, window);
    s.network.validate();
    fs::path dir = f.out_dir;
    fs::create_directories(dir);
    io::write_file_atomic(dir / artifacts::kEdges, io::edges_csv(s.network));
    if (f.graphml) io::write_file_atomic(dir / artifacts::kGraphml, io::graphml(s.network));
    m.setting("gamma", window.gamma);
    record_weights(m, weights);
    m.count("edges", s.network.edges().size());
    m.count("inferred_edges", s.stats.inferred_edges);
    m.count("recurring_coretweets", s.stats.recurring_coretweets);
    m.write(dir / "manifest.json");
    if (s.stats.recurring_coretweets)
        std::cerr << "note: " << s.stats.recurring_coretweets
                  << " same-tweet co-retweet pairs recur across disjoint windows\n";
    std::cout << "edges=" << s.network.edges().size() << " inferred=" << s.stats.inferred_edges << " -> "
              << (dir / artifacts::kEdges).string() << '\n';
    return 0;
}

int cmd_hcc(const Flags& f, const std::string& cmdline) {
    cli::Manifest m("hcc", cmdline);
    if (f.edges.empty()) throw ConfigError("--edges is required");
    if (!(f.theta >= 0)) throw ConfigError("theta must be >= 0");
    auto text = io::read_file(f.edges);
    m.input(f.edges, text);
    auto cn = io::parse_edges_csv(text);
    auto hccs = extract_hccs(cn, f.theta, f.min_size);
    auto removed = removed_bridges(cn, filter_edges(cn, f.theta));
    fs::path dir = f.out_dir;
    fs::create_directories(dir);
    write_hcc_artifacts(dir, hccs, removed);
    m.setting("theta", f.theta);
    m.setting("min_size", f.min_size);
    m.count("hccs", hccs.size());
    m.write(dir / "manifest.json");
    std::cout << "hccs=" << hccs.size() << " -> " << (dir / artifacts::kHccs).string() << '\n';
    return 0;
}

int cmd_forensics(const Flags& f, const std::string& cmdline) {
    cli::Manifest m("forensics", cmdline);
    PipelineOptions opts;
    opts.cheer_min_pairs = f.min_pairs;
    opts.cheer_threshold = f.cheer_threshold;
    opts.timeline_bucket = f.bucket;
    opts.validate();
    if (f.members.empty()) throw ConfigError("--members is required");
    auto pairs = load_pairs(f.pairs, m);
    auto member_text = io::read_file(f.members);
    m.input(f.members, member_text);
    auto members = io::parse_members_csv(member_text);
    auto parsed = load_posts(f.input, m);
    auto meta = load_metadata(f.metadata, m);

    std::map<std::size_t, HccForensics> out;
    for (const auto& [id, accounts] : members) out[id] = analyse_hcc(accounts, pairs, parsed.posts, meta, opts);
    fs::path dir = f.out_dir;
    fs::create_directories(dir);
    write_forensics_artifacts(dir, out);
    m.count("hccs", out.size());
    m.write(dir / "manifest.json");
    std::cout << "forensics for " << out.size() << " HCCs -> " << dir.string() << '\n';
    return 0;
}

int cmd_synth(const Flags& f, const std::string& cmdline) {
    cli::Manifest m("synth", cmdline);
    if (f.config.empty() || f.out.empty()) throw ConfigError("--config and --out are required");
    auto text = io::read_file(f.config);
    m.config(f.config, text);
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ConfigError("synth config is not a JSON object");
    auto cfg = parse_synth_config(doc);
    auto gen = generate(cfg);

    std::string posts;
    for (const auto& p : gen.posts) posts += serialize_post(p) + '\n';
    io::write_file_atomic(f.out, posts);
    if (!f.truth.empty()) {
        std::string truth;
        for (const auto& line : serialize_truth(cfg, gen.truth)) truth += line + '\n';
        io::write_file_atomic(f.truth, truth);
    }
    m.setting("seed", cfg.seed);
    m.setting("rng", std::string(kSynthRngAlgorithm));
    m.count("posts", gen.posts.size());
    m.count("planted_edges", gen.truth.edges.size());
    m.write(f.out + ".manifest.json");
    std::cout << "posts=" << gen.posts.size() << " -> " << f.out << '\n';
    return 0;
}

int cmd_pipeline(const Flags& f, const std::string& cmdline) {
    auto plan = plan_gammas(f);
    cli::Manifest base("pipeline", cmdline);
    // Configuration is checked in full before any post is read.
    auto weights = load_weights(f, &base);
    for (auto gamma : plan.gammas) pipeline_options(f, gamma, plan.theta, weights).validate();

    auto parsed = load_posts(f.input, base);
    auto meta = load_metadata(f.metadata, base);
    for (auto gamma : plan.gammas) {
        auto opts = pipeline_options(f, gamma, plan.theta, weights);
        auto r = run_pipeline(parsed.posts, meta, opts);
        auto dir = gamma_dir(f, plan, gamma);
        write_pipeline_artifacts(dir, r, f.graphml);

        auto m = base;
        record_options(m, opts, r.window);
        m.setting("strengthen", opts.strengthen);
        record_weights(m, weights);
        m.setting("theta", opts.theta);
        m.setting("min_size", opts.min_size);
        m.setting("cheer_min_pairs", opts.cheer_min_pairs);
        m.setting("cheer_threshold", opts.cheer_threshold);
        m.count("windows", r.detection.windows);
        m.count("pairs", r.detection.pairs.size());
        m.count("edges", r.network.edges().size());
        m.count("inferred_edges", r.strengthen_stats.inferred_edges);
        m.count("hccs", r.hccs.size());
        m.write(dir / "manifest.json");
        std::cout << "gamma=" << gamma << " pairs=" << r.detection.pairs.size() << " edges=" << r.network.edges().size()
                  << " hccs=" << r.hccs.size() << " -> " << dir.string() << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Detect temporally coordinated behaviour in social-media post streams"};
    app.require_subcommand(1);
    Flags f;

    auto* detect_cmd = app.add_subcommand("detect", "Find co-action pairs in a post stream");
    detect_cmd->add_option("-i,--input", f.input, "Posts (JSON lines)")->required();
    detect_cmd->add_option("--out-dir", f.out_dir, "Output directory")->capture_default_str();
    add_detect_flags(detect_cmd, f);

    auto* network_cmd = app.add_subcommand("network", "Aggregate co-action pairs into a coordination network");
    network_cmd->add_option("--pairs", f.pairs, "Pair CSV from detect")->required();
    network_cmd->add_option("--out-dir", f.out_dir, "Output directory")->capture_default_str();
    network_cmd->add_flag("--graphml", f.graphml, "Also write GraphML");

    auto* strengthen_cmd = app.add_subcommand("strengthen", "Add transitive edges across window boundaries");
    strengthen_cmd->add_option("--pairs", f.pairs, "Pair CSV from detect")->required();
    strengthen_cmd->add_option("--weights", f.weights, "Scenario weight file (key = value)");
    strengthen_cmd->add_option("--out-dir", f.out_dir, "Output directory")->capture_default_str();
    strengthen_cmd->add_flag("--graphml", f.graphml, "Also write GraphML");
    add_window_flags(strengthen_cmd, f);

    auto* hcc_cmd = app.add_subcommand("hcc", "Extract highly coordinating communities");
    hcc_cmd->add_option("--edges", f.edges, "Edge CSV")->required();
    hcc_cmd->add_option("--out-dir", f.out_dir, "Output directory")->capture_default_str();
    add_hcc_flags(hcc_cmd, f);

    auto* forensics_cmd = app.add_subcommand("forensics", "First-poster grids, cheerleaders, profiles, timelines");
    forensics_cmd->add_option("--pairs", f.pairs, "Pair CSV from detect")->required();
    forensics_cmd->add_option("--members", f.members, "HCC member CSV from hcc")->required();
    forensics_cmd->add_option("-i,--input", f.input, "Posts (JSON lines)")->required();
    forensics_cmd->add_option("--out-dir", f.out_dir, "Output directory")->capture_default_str();
    add_forensics_flags(forensics_cmd, f);

    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic stream with planted coordination");
    synth_cmd->add_option("--config", f.config, "Synth config (JSON)")->required();
    synth_cmd->add_option("--out", f.out, "Posts output (JSON lines)")->required();
    synth_cmd->add_option("--truth", f.truth, "Ground-truth output (JSON lines)");

    auto* pipeline_cmd = app.add_subcommand("pipeline", "Run detect, network, strengthen, hcc and forensics");
    pipeline_cmd->alias("report");
    pipeline_cmd->add_option("-i,--input", f.input, "Posts (JSON lines)")->required();
    pipeline_cmd->add_option("--out-dir", f.out_dir, "Output directory")->capture_default_str();
    pipeline_cmd->add_option("--weights", f.weights, "Scenario weight file (key = value)");
    pipeline_cmd->add_flag("--no-strengthen", f.no_strengthen, "Skip transitive strengthening");
    pipeline_cmd->add_flag("--graphml", f.graphml, "Also write GraphML");
    add_detect_flags(pipeline_cmd, f);
    add_hcc_flags(pipeline_cmd, f);
    add_forensics_flags(pipeline_cmd, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    for (auto* sub : app.get_subcommands()) {
        auto given = [sub](const char* name) {
            const auto* opt = sub->get_option_no_throw(name);
            return opt != nullptr && opt->count() > 0;
        };
        f.gamma_given = given("--gamma");
        f.theta_given = given("--theta");
    }
    const auto cmdline = joined_command_line(argc, argv);
    try {
        if (*detect_cmd) return cmd_detect(f, cmdline);
        if (*network_cmd) return cmd_network(f, cmdline);
        if (*strengthen_cmd) return cmd_strengthen(f, cmdline);
        if (*hcc_cmd) return cmd_hcc(f, cmdline);
        if (*forensics_cmd) return cmd_forensics(f, cmdline);
        if (*synth_cmd) return cmd_synth(f, cmdline);
        if (*pipeline_cmd) return cmd_pipeline(f, cmdline);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ContractViolation& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitInternal;
}
