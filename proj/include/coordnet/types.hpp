// Core domain types shared by every stage of the coordination pipeline.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coordnet {

/// Epoch seconds. All window arithmetic is integral at one-second resolution.
using Seconds = std::int64_t;
using AccountId = std::string;

/// Thrown when a configuration value is out of range (exit code 3 at the CLI).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an operation is called outside its preconditions.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Thrown on unreadable or unwritable files (exit code 2 at the CLI).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ActionType : std::uint8_t {
    CoRetweet,
    CoHashtag,
    CoUrl,
    CoMention,
    CoConversation,
};

inline constexpr std::array<ActionType, 5> kAllActionTypes = {
    ActionType::CoRetweet, ActionType::CoHashtag, ActionType::CoUrl,
    ActionType::CoMention, ActionType::CoConversation};

/// Short names used in CSV files and on the command line.
constexpr std::string_view to_string(ActionType t) noexcept {
    switch (t) {
        case ActionType::CoRetweet: return "retweet";
        case ActionType::CoHashtag: return "hashtag";
        case ActionType::CoUrl: return "url";
        case ActionType::CoMention: return "mention";
        case ActionType::CoConversation: return "conversation";
    }
    return "unknown";
}

inline std::optional<ActionType> parse_action_type(std::string_view s) noexcept {
    for (auto t : kAllActionTypes) {
        if (to_string(t) == s) return t;
    }
    return std::nullopt;
}

/// Bit set over ActionType.
class ActionTypeSet {
public:
    constexpr ActionTypeSet() = default;
    constexpr ActionTypeSet(std::initializer_list<ActionType> types) {
        for (auto t : types) insert(t);
    }

    static constexpr ActionTypeSet all() {
        ActionTypeSet s;
        for (auto t : kAllActionTypes) s.insert(t);
        return s;
    }

    constexpr void insert(ActionType t) noexcept { bits_ |= bit(t); }
    constexpr bool contains(ActionType t) const noexcept { return (bits_ & bit(t)) != 0; }
    constexpr bool empty() const noexcept { return bits_ == 0; }
    constexpr bool operator==(const ActionTypeSet&) const = default;

    std::string to_string() const {
        std::string out;
        for (auto t : kAllActionTypes) {
            if (!contains(t)) continue;
            if (!out.empty()) out += ',';
            out += coordnet::to_string(t);
        }
        return out;
    }

private:
    static constexpr std::uint8_t bit(ActionType t) noexcept {
        return static_cast<std::uint8_t>(1u << static_cast<unsigned>(t));
    }
    std::uint8_t bits_ = 0;
};

/// Parses a comma-separated list such as "retweet,hashtag".
inline ActionTypeSet parse_action_types(std::string_view csv) {
    ActionTypeSet set;
    while (!csv.empty()) {
        auto comma = csv.find(',');
        auto item = csv.substr(0, comma);
        if (!item.empty()) {
            auto t = parse_action_type(item);
            if (!t) throw ConfigError("unknown action type '" + std::string(item) + "'");
            set.insert(*t);
        }
        if (comma == std::string_view::npos) break;
        csv.remove_prefix(comma + 1);
    }
    if (set.empty()) throw ConfigError("no action types selected");
    return set;
}

/// One social-media record.
struct Post {
    std::string post_id;
    AccountId account_id;
    Seconds timestamp = 0;
    std::optional<std::string> retweet_of;
    std::vector<std::string> hashtags;
    std::vector<std::string> urls;
    std::vector<AccountId> mentions;
    std::optional<std::string> conversation_id;

    bool operator==(const Post&) const = default;
};

/// One normalized action carried by a post; two of these from distinct
/// accounts with equal (action_type, reason) form a co-action.
struct ActionInstance {
    ActionType action_type{};
    std::string reason;
    AccountId account_id;
    Seconds timestamp = 0;
    std::string post_id;

    bool operator==(const ActionInstance&) const = default;
};

}  // namespace coordnet
