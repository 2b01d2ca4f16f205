// Post parsing, validation, reason normalization and action extraction.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <set>
#include <ranges>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include <boost/locale.hpp>
#include <json.hpp>

#include "coordnet/types.hpp"

namespace coordnet {

namespace detail {

inline const std::locale& fold_locale() {
    static const std::locale loc = boost::locale::generator{}("en_US.UTF-8");
    return loc;
}

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>((c >= 'A' && c <= 'Z') ? c - 'A' + 'a' : c);
    });
    return out;
}

inline std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::string canonical_url(std::string_view raw) {
    auto url = trim(raw);
    if (auto hash = url.find('#'); hash != std::string_view::npos) url = url.substr(0, hash);

    std::string scheme;
    std::string_view rest = url;
    if (auto sep = url.find("://"); sep != std::string_view::npos) {
        scheme = ascii_lower(url.substr(0, sep + 3));
        rest = url.substr(sep + 3);
    }
    auto host_end = rest.find_first_of("/?");
    std::string tail = ascii_lower(rest.substr(0, host_end));
    if (host_end != std::string_view::npos) tail += rest.substr(host_end);

    while (!tail.empty() && tail.back() == '/') tail.pop_back();
    // A bare scheme carries no identity.
    if (tail.empty()) return {};
    return scheme + tail;
}

}  // namespace detail

/// Canonical reason key for an action. Hashtags are Unicode case-folded with
/// leading '#' removed; URLs get scheme and host lowercased, fragment and
/// trailing slashes removed. Ids pass through unchanged. An empty result means
/// the action carries no usable reason and must be dropped.
inline std::string normalize_reason(ActionType type, std::string_view raw) {
    switch (type) {
        case ActionType::CoHashtag: {
            auto tag = detail::trim(raw);
            while (!tag.empty() && tag.front() == '#') tag.remove_prefix(1);
            tag = detail::trim(tag);
            if (tag.empty()) return {};
            return boost::locale::fold_case(std::string(tag), detail::fold_locale());
        }
        case ActionType::CoUrl:
            return detail::canonical_url(raw);
        case ActionType::CoRetweet:
        case ActionType::CoMention:
        case ActionType::CoConversation:
            return std::string(raw);
    }
    return {};
}

struct ExtractOptions {
    /// When set, a retweet contributes only its CoRetweet action; hashtags,
    /// URLs and mentions embedded in the retweeted content are ignored.
    bool own_actions_only = false;
};

/// A post is a reply when it belongs to a conversation rooted elsewhere.
inline bool is_reply(const Post& post) {
    return post.conversation_id && !post.conversation_id->empty() &&
           *post.conversation_id != post.post_id;
}

/// All actions carried by one post, deduplicated per (type, reason), in
/// type order then first-appearance order.
inline std::vector<ActionInstance> extract_actions(const Post& post, const ExtractOptions& opts = {}) {
    std::vector<ActionInstance> out;
    std::set<std::pair<ActionType, std::string>> seen;

    auto emit = [&](ActionType type, std::string_view raw) {
        if (raw.empty()) return;
        auto reason = normalize_reason(type, raw);
        if (reason.empty()) return;
        if (!seen.emplace(type, reason).second) return;
        out.push_back({type, std::move(reason), post.account_id, post.timestamp, post.post_id});
    };

    if (post.retweet_of) emit(ActionType::CoRetweet, *post.retweet_of);
    const bool embedded = !(opts.own_actions_only && post.retweet_of);
    if (embedded) {
        for (const auto& h : post.hashtags) emit(ActionType::CoHashtag, h);
        for (const auto& u : post.urls) emit(ActionType::CoUrl, u);
        for (const auto& m : post.mentions) emit(ActionType::CoMention, m);
    }
    if (is_reply(post)) emit(ActionType::CoConversation, *post.conversation_id);
    return out;
}

/// Outcome of parsing one post stream.
struct ParseResult {
    std::vector<Post> posts;
    std::size_t skipped = 0;     ///< malformed, invalid or duplicate records
    std::size_t warnings = 0;    ///< includes the empty-input warning
    std::vector<std::string> messages;
};

namespace detail {

inline constexpr std::size_t kMaxParseMessages = 20;

inline std::optional<std::string> id_field(const nlohmann::json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return std::nullopt;
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_unsigned()) return std::to_string(it->get<std::uint64_t>());
    if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
    return std::nullopt;
}

inline std::optional<Seconds> timestamp_field(const nlohmann::json& doc) {
    auto it = doc.find("created_at");
    if (it == doc.end()) return std::nullopt;
    if (it->is_number_integer()) return it->get<std::int64_t>();
    if (it->is_number_float()) {
        double v = it->get<double>();
        if (!std::isfinite(v)) return std::nullopt;
        return static_cast<Seconds>(std::trunc(v));
    }
    if (it->is_string()) {
        const auto& s = it->get_ref<const std::string&>();
        Seconds v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc{} && p == s.data() + s.size()) return v;
        // Fractional seconds are truncated.
        if (ec == std::errc{} && *p == '.') return v;
    }
    return std::nullopt;
}

inline bool string_array(const nlohmann::json& doc, const char* key, std::vector<std::string>& out) {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return true;
    if (!it->is_array()) return false;
    for (const auto& item : *it) {
        if (!item.is_string()) return false;
        out.push_back(item.get<std::string>());
    }
    return true;
}

}  // namespace detail

/// Parses one JSON document into a Post. Returns an error description on
/// failure instead of throwing so that callers can tally and continue.
inline std::variant<Post, std::string> parse_post(std::string_view line) {
    auto doc = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) return std::string("not a JSON object");

    Post p;
    auto id = detail::id_field(doc, "id");
    if (!id || id->empty()) return std::string("missing id");
    p.post_id = std::move(*id);

    auto user = detail::id_field(doc, "user_id");
    if (!user || user->empty()) return std::string("missing user_id");
    p.account_id = std::move(*user);

    auto ts = detail::timestamp_field(doc);
    if (!ts) return std::string("unparseable created_at");
    if (*ts < 0) return std::string("negative created_at");
    p.timestamp = *ts;

    if (doc.contains("retweeted_status_id") && !doc["retweeted_status_id"].is_null()) {
        auto rt = detail::id_field(doc, "retweeted_status_id");
        if (!rt) return std::string("bad retweeted_status_id");
        p.retweet_of = std::move(*rt);
    }
    if (doc.contains("conversation_id") && !doc["conversation_id"].is_null()) {
        auto conv = detail::id_field(doc, "conversation_id");
        if (!conv) return std::string("bad conversation_id");
        p.conversation_id = std::move(*conv);
    }
    if (!detail::string_array(doc, "hashtags", p.hashtags)) return std::string("bad hashtags");
    if (!detail::string_array(doc, "urls", p.urls)) return std::string("bad urls");
    if (!detail::string_array(doc, "mentions", p.mentions)) return std::string("bad mentions");
    return p;
}

/// Orders posts by (timestamp, post_id).
inline void sort_posts(std::vector<Post>& posts) {
    std::sort(posts.begin(), posts.end(), [](const Post& a, const Post& b) {
        return std::tie(a.timestamp, a.post_id) < std::tie(b.timestamp, b.post_id);
    });
}

/// Parses newline-delimited post documents. Blank lines are ignored;
/// malformed records and repeated post ids are skipped and counted.
template <std::ranges::input_range Lines>
ParseResult parse_posts(const Lines& lines) {
    ParseResult result;
    std::unordered_set<std::string> ids;
    std::size_t line_no = 0;
    auto note = [&](std::string msg) {
        ++result.warnings;
        if (result.messages.size() < detail::kMaxParseMessages) result.messages.push_back(std::move(msg));
    };

    for (const auto& raw : lines) {
        ++line_no;
        std::string_view line = detail::trim(raw);
        if (line.empty()) continue;
        auto parsed = parse_post(line);
        if (auto* err = std::get_if<std::string>(&parsed)) {
            ++result.skipped;
            note("line " + std::to_string(line_no) + ": " + *err);
            continue;
        }
        auto& post = std::get<Post>(parsed);
        if (!ids.insert(post.post_id).second) {
            ++result.skipped;
            note("line " + std::to_string(line_no) + ": duplicate id " + post.post_id);
            continue;
        }
        result.posts.push_back(std::move(post));
    }
    if (result.posts.empty() && result.skipped == 0) note("empty input");
    sort_posts(result.posts);
    return result;
}

inline ParseResult parse_posts(std::istream& in) {
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
    return parse_posts(lines);
}

/// Inverse of parse_post; optional fields and empty arrays are omitted.
inline std::string serialize_post(const Post& p) {
    nlohmann::ordered_json doc;
    doc["id"] = p.post_id;
    doc["user_id"] = p.account_id;
    doc["created_at"] = p.timestamp;
    if (p.retweet_of) doc["retweeted_status_id"] = *p.retweet_of;
    if (!p.hashtags.empty()) doc["hashtags"] = p.hashtags;
    if (!p.urls.empty()) doc["urls"] = p.urls;
    if (!p.mentions.empty()) doc["mentions"] = p.mentions;
    if (p.conversation_id) doc["conversation_id"] = *p.conversation_id;
    return doc.dump();
}

}  // namespace coordnet
