// HTML handling for post bodies: code-block extraction, tag stripping,
// entity decoding and link extraction.
//
// Bodies arrive as sanitized HTML markup (the XML layer has already decoded
// the attribute escaping once). Code is whatever sits inside a
// <pre><code>...</code></pre> pair; inline <code> spans are prose.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace crowdcook {

struct CleanedBody {
    std::string text;                     // markup with code blocks cut out
    std::vector<std::string> code_blocks; // raw block contents, document order
    bool unterminated = false;            // an unclosed block ran to end of input
};

namespace detail {

inline char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline bool iequal(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (ascii_lower(a[i]) != ascii_lower(b[i])) return false;
    return true;
}

// Case-insensitive search for `needle` in `hay` starting at `from`.
inline std::size_t ifind(std::string_view hay, std::string_view needle, std::size_t from) {
    if (needle.empty()) return from;
    if (hay.size() < needle.size()) return std::string_view::npos;
    for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
        std::size_t j = 0;
        while (j < needle.size() && ascii_lower(hay[i + j]) == ascii_lower(needle[j])) ++j;
        if (j == needle.size()) return i;
    }
    return std::string_view::npos;
}

inline bool istarts_with(std::string_view s, std::size_t i, std::string_view prefix) {
    if (i + prefix.size() > s.size()) return false;
    for (std::size_t j = 0; j < prefix.size(); ++j)
        if (ascii_lower(s[i + j]) != prefix[j]) return false;
    return true;
}

// True when position i opens the named tag (i.e. "<name" followed by a
// delimiter, not a longer name like "<present").
inline bool tag_opens(std::string_view s, std::size_t i, std::string_view name) {
    if (i + 1 + name.size() > s.size() || s[i] != '<') return false;
    for (std::size_t j = 0; j < name.size(); ++j)
        if (ascii_lower(s[i + 1 + j]) != name[j]) return false;
    const std::size_t after = i + 1 + name.size();
    if (after >= s.size()) return true;
    const char c = s[after];
    return c == '>' || c == '/' || std::isspace(static_cast<unsigned char>(c));
}

inline void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp <= 0x7F) {
        out.push_back(static_cast<char>(cp));
    } else if (cp <= 0x7FF) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp <= 0xFFFF) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp <= 0x10FFFF) {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Decode the entity starting at s[i] (s[i] == '&'). Appends the decoded
// character(s) to out and returns the index just past the entity, or
// appends '&' and returns i+1 when it is not a recognized entity.
// When angle_as_space is set, &lt;/&gt; decode to a space instead of a
// bracket so stripped prose never reintroduces tag characters.
inline std::size_t decode_entity_at(std::string_view s, std::size_t i, std::string& out,
                                    bool angle_as_space) {
    const std::size_t semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
        out.push_back('&');
        return i + 1;
    }
    const std::string_view body = s.substr(i + 1, semi - i - 1);
    if (!body.empty() && body[0] == '#') {
        std::uint32_t cp = 0;
        bool ok = body.size() > 1;
        if (body.size() > 2 && (body[1] == 'x' || body[1] == 'X')) {
            for (std::size_t k = 2; k < body.size() && ok; ++k) {
                const char c = ascii_lower(body[k]);
                if (c >= '0' && c <= '9') cp = cp * 16 + static_cast<std::uint32_t>(c - '0');
                else if (c >= 'a' && c <= 'f') cp = cp * 16 + static_cast<std::uint32_t>(c - 'a' + 10);
                else ok = false;
            }
        } else {
            for (std::size_t k = 1; k < body.size() && ok; ++k) {
                if (body[k] >= '0' && body[k] <= '9') cp = cp * 10 + static_cast<std::uint32_t>(body[k] - '0');
                else ok = false;
            }
        }
        if (ok && cp > 0 && cp <= 0x10FFFF) {
            if (angle_as_space && (cp == '<' || cp == '>')) out.push_back(' ');
            else append_utf8(out, cp);
            return semi + 1;
        }
        out.push_back('&');
        return i + 1;
    }
    if (iequal(body, "lt")) { out.push_back(angle_as_space ? ' ' : '<'); return semi + 1; }
    if (iequal(body, "gt")) { out.push_back(angle_as_space ? ' ' : '>'); return semi + 1; }
    if (iequal(body, "amp")) { out.push_back('&'); return semi + 1; }
    if (iequal(body, "quot")) { out.push_back('"'); return semi + 1; }
    if (iequal(body, "apos")) { out.push_back('\''); return semi + 1; }
    if (iequal(body, "nbsp")) { out.push_back(' '); return semi + 1; }
    out.push_back('&');
    return i + 1;
}

inline const std::unordered_set<std::string>& block_tags() {
    static const std::unordered_set<std::string> tags = {
        "p", "div", "br", "hr", "li", "ul", "ol", "dl", "dt", "dd",
        "pre", "blockquote", "h1", "h2", "h3", "h4", "h5", "h6",
        "table", "thead", "tbody", "tfoot", "tr", "td", "th",
        "section", "article", "header", "footer", "form"};
    return tags;
}

} // namespace detail

// Decode XML/HTML character entities exactly once. Named entities
// (lt, gt, amp, quot, apos, nbsp) and numeric references are handled;
// anything unrecognized is left verbatim.
inline std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '&') {
            i = detail::decode_entity_at(s, i, out, /*angle_as_space=*/false);
        } else {
            out.push_back(s[i]);
            ++i;
        }
    }
    return out;
}

// Cut every <pre><code>...</code></pre> region out of the markup. The raw
// inner content is collected in document order; each removed region leaves
// one space behind so surrounding words stay separated. A block that never
// closes runs to the end of the input and is flagged.
inline CleanedBody strip_code(std::string_view html) {
    CleanedBody result;
    result.text.reserve(html.size());
    std::size_t i = 0;
    while (i < html.size()) {
        if (html[i] == '<' && detail::tag_opens(html, i, "pre")) {
            const std::size_t pre_close = html.find('>', i);
            if (pre_close == std::string_view::npos) break; // dangling tag, keep as text
            std::size_t p = pre_close + 1;
            while (p < html.size() && std::isspace(static_cast<unsigned char>(html[p]))) ++p;
            if (detail::tag_opens(html, p, "code")) {
                const std::size_t code_close = html.find('>', p);
                if (code_close != std::string_view::npos) {
                    const std::size_t inner_begin = code_close + 1;
                    std::size_t inner_end;
                    std::size_t region_end;
                    const std::size_t end_code = detail::ifind(html, "</code>", inner_begin);
                    const std::size_t end_pre = detail::ifind(html, "</pre>", inner_begin);
                    if (end_code != std::string_view::npos &&
                        (end_pre == std::string_view::npos || end_code < end_pre)) {
                        inner_end = end_code;
                        // consume the closing </pre> only when it directly
                        // follows; anything else stays outside the region
                        std::size_t q = end_code + 7;
                        while (q < html.size() && std::isspace(static_cast<unsigned char>(html[q])))
                            ++q;
                        region_end = detail::istarts_with(html, q, "</pre>") ? q + 6 : end_code + 7;
                    } else if (end_pre != std::string_view::npos) {
                        inner_end = end_pre; // block closed without </code>
                        region_end = end_pre + 6;
                    } else {
                        inner_end = html.size();
                        region_end = html.size();
                        result.unterminated = true;
                    }
                    result.code_blocks.emplace_back(html.substr(inner_begin, inner_end - inner_begin));
                    result.text.push_back(' ');
                    i = region_end;
                    continue;
                }
            }
        }
        result.text.push_back(html[i]);
        ++i;
    }
    if (i < html.size()) result.text.append(html.substr(i));
    return result;
}

// Remove every tag and decode entities. Block-level tags become a single
// space so words on either side do not run together; inline tags vanish.
// Stray angle brackets (and decoded &lt;/&gt;) come out as spaces, so the
// result never contains '<' or '>'. Plain text passes through unchanged.
inline std::string strip_html(std::string_view html) {
    std::string out;
    out.reserve(html.size());
    std::size_t i = 0;
    while (i < html.size()) {
        const char c = html[i];
        if (c == '<') {
            // comments
            if (html.substr(i).starts_with("<!--")) {
                const std::size_t end = html.find("-->", i + 4);
                i = (end == std::string_view::npos) ? html.size() : end + 3;
                continue;
            }
            std::size_t p = i + 1;
            if (p < html.size() && html[p] == '/') ++p;
            std::string name;
            while (p < html.size() &&
                   (std::isalnum(static_cast<unsigned char>(html[p])) || html[p] == '!')) {
                name.push_back(detail::ascii_lower(html[p]));
                ++p;
            }
            const std::size_t close = html.find('>', i + 1);
            if (name.empty() || close == std::string_view::npos) {
                out.push_back(' '); // not a tag, drop the bracket
                ++i;
                continue;
            }
            if (detail::block_tags().count(name)) out.push_back(' ');
            i = close + 1;
        } else if (c == '>') {
            out.push_back(' ');
            ++i;
        } else if (c == '&') {
            i = detail::decode_entity_at(html, i, out, /*angle_as_space=*/true);
        } else {
            out.push_back(c);
            ++i;
        }
    }
    return out;
}

// Collect URLs from markup with code blocks excluded: href targets of
// anchor tags plus bare http(s) URLs in the prose, de-duplicated, in
// document order.
inline std::vector<std::string> extract_links(std::string_view html) {
    const CleanedBody cleaned = strip_code(html);
    const std::string_view s = cleaned.text;
    std::vector<std::string> urls;
    std::unordered_set<std::string> seen;
    auto push = [&](std::string url) {
        while (!url.empty()) {
            const char t = url.back();
            if (t == '.' || t == ',' || t == ')' || t == ';' || t == ':' || t == '!' ||
                t == '?' || t == ']' || t == '\'' || t == '"')
                url.pop_back();
            else
                break;
        }
        if (!url.empty() && seen.insert(url).second) urls.push_back(std::move(url));
    };
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '<') {
            const std::size_t close = s.find('>', i + 1);
            if (close == std::string_view::npos) break;
            if (detail::tag_opens(s, i, "a")) {
                const std::string_view tag = s.substr(i, close - i);
                const std::size_t href = detail::ifind(tag, "href", 0);
                if (href != std::string_view::npos) {
                    std::size_t q = tag.find_first_of("\"'", href);
                    if (q != std::string_view::npos) {
                        const char quote = tag[q];
                        const std::size_t end = tag.find(quote, q + 1);
                        if (end != std::string_view::npos)
                            push(decode_entities(tag.substr(q + 1, end - q - 1)));
                    }
                }
            }
            i = close + 1;
        } else if (detail::istarts_with(s, i, "http://") || detail::istarts_with(s, i, "https://")) {
            std::size_t end = i;
            while (end < s.size() && !std::isspace(static_cast<unsigned char>(s[end])) &&
                   s[end] != '<' && s[end] != '>' && s[end] != '"' && s[end] != '\'')
                ++end;
            push(decode_entities(s.substr(i, end - i)));
            i = end;
        } else {
            ++i;
        }
    }
    return urls;
}

// Unicode code points in a UTF-8 string (continuation bytes not counted).
inline std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (const char c : s)
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    return n;
}

} // namespace crowdcook
