// CSV and GraphML readers/writers for pipeline artifacts. Every writer emits
// rows in canonical order so repeated runs are byte-identical.

#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "coordnet/forensics.hpp"
#include "coordnet/hcc.hpp"
#include "coordnet/network.hpp"

namespace coordnet::io {

// ---------------------------------------------------------------------------
// Primitives

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline void write_row(std::ostream& os, std::initializer_list<std::string_view> fields) {
    bool first = true;
    for (auto f : fields) {
        if (!first) os << ',';
        os << csv_field(f);
        first = false;
    }
    os << '\n';
}

using CsvRow = std::vector<std::string>;

/// RFC 4180 parser; quoted fields may contain separators, quotes and newlines.
inline std::vector<CsvRow> parse_csv(std::string_view text) {
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"': quoted = true; any = true; break;
            case ',': row.push_back(std::move(field)); field.clear(); any = true; break;
            case '\r': break;
            case '\n':
                if (any || !field.empty()) {
                    row.push_back(std::move(field));
                    rows.push_back(std::move(row));
                }
                row.clear();
                field.clear();
                any = false;
                break;
            default: field += c; any = true;
        }
    }
    if (quoted) throw IoError("unterminated quoted CSV field");
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes via a temporary sibling and renames, so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

namespace detail {

template <typename Int>
Int parse_int(const std::string& s, const char* what) {
    Int v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw IoError(std::string("bad ") + what + " '" + s + "'");
    return v;
}

inline double parse_real(const std::string& s, const char* what) {
    double v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw IoError(std::string("bad ") + what + " '" + s + "'");
    return v;
}

inline ActionType parse_type(const std::string& s) {
    auto t = parse_action_type(s);
    if (!t) throw IoError("unknown action type '" + s + "'");
    return *t;
}

inline void expect_header(const std::vector<CsvRow>& rows, const CsvRow& header, const char* what) {
    if (rows.empty() || rows.front() != header) throw IoError(std::string("missing or wrong header in ") + what);
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].size() != header.size())
            throw IoError(std::string(what) + " row " + std::to_string(i + 1) + " has wrong field count");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Co-action pairs

inline const CsvRow kPairHeader = {"account_a", "account_b", "action_type", "reason", "t_a", "t_b", "window_index"};

inline std::string pairs_csv(std::span<const CoActionPair> pairs) {
    std::ostringstream os;
    write_row(os, {"account_a", "account_b", "action_type", "reason", "t_a", "t_b", "window_index"});
    for (const auto& p : pairs) {
        write_row(os, {p.account_a, p.account_b, to_string(p.action_type), p.reason, std::to_string(p.t_a),
                       std::to_string(p.t_b), std::to_string(p.window_index)});
    }
    return os.str();
}

inline std::vector<CoActionPair> parse_pairs_csv(std::string_view text) {
    auto rows = parse_csv(text);
    detail::expect_header(rows, kPairHeader, "pair file");
    std::vector<CoActionPair> out;
    out.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        out.push_back(make_coaction_pair(r[0], detail::parse_int<Seconds>(r[4], "t_a"), r[1],
                                         detail::parse_int<Seconds>(r[5], "t_b"), detail::parse_type(r[2]), r[3],
                                         detail::parse_int<std::int64_t>(r[6], "window_index")));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Edge lists

/// `type:value` items joined by '|', one item per multiplicity; '|' and '\'
/// inside values are backslash-escaped.
inline std::string format_reasons(const std::map<Reason, std::int64_t>& reasons) {
    std::string out;
    for (const auto& [r, n] : reasons) {
        std::string item(to_string(r.first));
        item += ':';
        for (char c : r.second) {
            if (c == '|' || c == '\\') item += '\\';
            item += c;
        }
        for (std::int64_t k = 0; k < n; ++k) {
            if (!out.empty()) out += '|';
            out += item;
        }
    }
    return out;
}

inline std::map<Reason, std::int64_t> parse_reasons(std::string_view s) {
    std::map<Reason, std::int64_t> out;
    if (s.empty()) return out;
    std::string item;
    auto flush = [&] {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw IoError("bad reason item '" + item + "'");
        ++out[{detail::parse_type(item.substr(0, colon)), item.substr(colon + 1)}];
        item.clear();
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size()) {
            item += s[++i];
        } else if (s[i] == '|') {
            flush();
        } else {
            item += s[i];
        }
    }
    flush();
    return out;
}

inline const CsvRow kEdgeHeader = {"source", "target", "weight", "pair_count", "inferred", "reasons"};

inline std::string edges_csv(const std::map<AccountPair, EdgeEvidence>& edges) {
    std::ostringstream os;
    write_row(os, {"source", "target", "weight", "pair_count", "inferred", "reasons"});
    for (const auto& [key, ev] : edges) {
        write_row(os, {key.first, key.second, format_double(ev.weight), std::to_string(ev.pair_count),
                       ev.inferred ? "true" : "false", format_reasons(ev.reasons)});
    }
    return os.str();
}

inline std::string edges_csv(const CoordinationNetwork& cn) { return edges_csv(cn.edges()); }

inline CoordinationNetwork parse_edges_csv(std::string_view text) {
    auto rows = parse_csv(text);
    detail::expect_header(rows, kEdgeHeader, "edge file");
    CoordinationNetwork cn;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r[4] != "true" && r[4] != "false") throw IoError("bad inferred flag '" + r[4] + "'");
        EdgeEvidence ev;
        ev.weight = detail::parse_real(r[2], "weight");
        ev.pair_count = detail::parse_int<std::int64_t>(r[3], "pair_count");
        ev.inferred = r[4] == "true";
        ev.reasons = parse_reasons(r[5]);
        cn.edge(r[0], r[1]) = std::move(ev);
    }
    cn.validate();
    return cn;
}

/// GraphML with `weight`, `pair_count` and `inferred` edge attributes.
inline std::string graphml(const CoordinationNetwork& cn) {
    auto esc = [](std::string_view s) {
        std::string out;
        for (char c : s) {
            switch (c) {
                case '&': out += "&amp;"; break;
                case '<': out += "&lt;"; break;
                case '>': out += "&gt;"; break;
                case '"': out += "&quot;"; break;
                default: out += c;
            }
        }
        return out;
    };
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
       << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
       << "  <key id=\"pair_count\" for=\"edge\" attr.name=\"pair_count\" attr.type=\"long\"/>\n"
       << "  <key id=\"inferred\" for=\"edge\" attr.name=\"inferred\" attr.type=\"boolean\"/>\n"
       << "  <graph id=\"coordination\" edgedefault=\"undirected\">\n";
    for (const auto& n : cn.nodes()) os << "    <node id=\"" << esc(n) << "\"/>\n";
    for (const auto& [key, ev] : cn.edges()) {
        os << "    <edge source=\"" << esc(key.first) << "\" target=\"" << esc(key.second) << "\">"
           << "<data key=\"weight\">" << format_double(ev.weight) << "</data>"
           << "<data key=\"pair_count\">" << ev.pair_count << "</data>"
           << "<data key=\"inferred\">" << (ev.inferred ? "true" : "false") << "</data></edge>\n";
    }
    os << "  </graph>\n</graphml>\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Communities

inline std::string hccs_csv(std::span<const Hcc> hccs) {
    std::ostringstream os;
    write_row(os, {"hcc_id", "size", "total_weight", "star_hub", "star_coefficient"});
    for (const auto& h : hccs) {
        write_row(os, {std::to_string(h.id), std::to_string(h.accounts.size()), format_double(h.total_weight),
                       h.star_hub.value_or(""), format_double(h.star_coefficient)});
    }
    return os.str();
}

inline const CsvRow kMemberHeader = {"hcc_id", "account"};

inline std::string members_csv(std::span<const Hcc> hccs) {
    std::ostringstream os;
    write_row(os, {"hcc_id", "account"});
    for (const auto& h : hccs)
        for (const auto& a : h.accounts) write_row(os, {std::to_string(h.id), a});
    return os.str();
}

/// hcc_id -> member accounts.
inline std::map<std::size_t, std::set<AccountId>> parse_members_csv(std::string_view text) {
    auto rows = parse_csv(text);
    detail::expect_header(rows, kMemberHeader, "member file");
    std::map<std::size_t, std::set<AccountId>> out;
    for (std::size_t i = 1; i < rows.size(); ++i)
        out[detail::parse_int<std::size_t>(rows[i][0], "hcc_id")].insert(rows[i][1]);
    return out;
}

// ---------------------------------------------------------------------------
// Forensics

inline void append_grid_rows(std::ostream& os, std::size_t hcc_id, const FirstPosterGrid& grid) {
    for (const auto& [key, c] : grid.cells) {
        write_row(os, {std::to_string(hcc_id), key.first, key.second, std::to_string(c.total),
                       std::to_string(c.row_first), std::to_string(c.ties)});
    }
}

inline std::string grid_header() { return "hcc_id,row,column,total,row_first,ties\n"; }

inline void append_cheerleader_rows(std::ostream& os, std::size_t hcc_id, std::span<const CheerleaderReport> reps) {
    for (const auto& r : reps) {
        write_row(os, {std::to_string(hcc_id), r.account, r.partner, std::to_string(r.total),
                       format_double(r.follower_fraction), r.flagged ? "true" : "false"});
    }
}

inline std::string cheerleader_header() { return "hcc_id,account,partner,total,follower_fraction,flagged\n"; }

inline std::string optional_real(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

inline void append_profile_row(std::ostream& os, std::size_t hcc_id, const AccountProfile& p) {
    std::optional<double> years;
    if (p.age_days) years = *p.age_days / kDaysPerYear;
    write_row(os, {std::to_string(hcc_id), p.account, std::to_string(p.tweets), optional_real(years),
                   optional_real(p.tweets_per_day), optional_real(p.bot_rating), std::to_string(p.friends),
                   std::to_string(p.followers), format_double(p.reputation), std::to_string(p.posts_in_range)});
}

inline std::string profile_header() {
    return "hcc_id,account,tweets,age_years,tweets_per_day,bot_rating,friends,followers,reputation,posts_in_range\n";
}

inline void append_timeline_rows(std::ostream& os, std::size_t hcc_id, const ActivityTimeline& tl) {
    for (const auto& [start, n] : tl.counts)
        write_row(os, {std::to_string(hcc_id), tl.account, std::to_string(start), std::to_string(n)});
}

inline std::string timeline_header() { return "hcc_id,account,bucket_start,count\n"; }

}  // namespace coordnet::io
