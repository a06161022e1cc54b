#include "paragraph/omp.hpp"

#include <cctype>
#include <cstdlib>

#include "paragraph/errors.hpp"

namespace paragraph {

namespace {

std::string strip(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

// Collapses interior whitespace runs to single spaces.
std::string normalize_ws(const std::string& s) {
    std::string out;
    bool in_space = false;
    for (char c : strip(s)) {
        if (c == ' ' || c == '\t') {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out += ' ';
        in_space = false;
        out += c;
    }
    return out;
}

std::optional<long long> int_arg(const std::vector<OmpClause>& clauses, const std::string& name) {
    for (const auto& c : clauses) {
        if (c.name == name) {
            char* end = nullptr;
            long long v = std::strtoll(c.args.c_str(), &end, 10);
            if (end == c.args.c_str()) return std::nullopt;
            return v;
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<long long> OmpDirectiveInfo::collapse() const { return int_arg(clauses, "collapse"); }
std::optional<long long> OmpDirectiveInfo::num_teams() const { return int_arg(clauses, "num_teams"); }
std::optional<long long> OmpDirectiveInfo::num_threads() const { return int_arg(clauses, "num_threads"); }

std::vector<OmpMapClause> OmpDirectiveInfo::maps() const {
    std::vector<OmpMapClause> out;
    for (const auto& c : clauses) {
        if (c.name != "map") continue;
        OmpMapClause m;
        size_t colon = c.args.find(':');
        if (colon == std::string::npos) throw SchemaError("map clause missing direction: " + c.args);
        m.direction = normalize_ws(c.args.substr(0, colon));
        std::string section = normalize_ws(c.args.substr(colon + 1));
        size_t lb = section.find('[');
        size_t rb = section.rfind(']');
        if (lb == std::string::npos || rb == std::string::npos || rb < lb)
            throw SchemaError("map clause missing array section: " + c.args);
        m.array = normalize_ws(section.substr(0, lb));
        std::string range = section.substr(lb + 1, rb - lb - 1);
        size_t sep = range.find(':');
        if (sep == std::string::npos) throw SchemaError("map section must be [lower:extent]: " + c.args);
        m.lower = normalize_ws(range.substr(0, sep));
        m.extent = normalize_ws(range.substr(sep + 1));
        out.push_back(std::move(m));
    }
    return out;
}

bool OmpDirectiveInfo::parallelizes_loop() const {
    return construct.find("parallel for") != std::string::npos;
}

bool OmpDirectiveInfo::static_schedule() const {
    for (const auto& c : clauses)
        if (c.name == "schedule" && c.args.rfind("static", 0) != 0) return false;
    return true;
}

std::string OmpDirectiveInfo::render() const {
    std::string s = "#pragma omp " + construct;
    for (const auto& c : clauses) s += " " + c.name + "(" + c.args + ")";
    return s;
}

OmpDirectiveInfo parse_omp_directive(const std::string& line) {
    std::string text = normalize_ws(line);
    const std::string prefix = "#pragma omp";
    if (text.rfind(prefix, 0) != 0) throw SchemaError("not an OpenMP pragma: " + line);
    std::string rest = strip(text.substr(prefix.size()));

    OmpDirectiveInfo info;
    size_t pos = 0;
    while (pos < rest.size()) {
        while (pos < rest.size() && (rest[pos] == ' ' || rest[pos] == ',')) pos++;
        if (pos >= rest.size()) break;
        size_t start = pos;
        while (pos < rest.size() && (std::isalnum(static_cast<unsigned char>(rest[pos])) || rest[pos] == '_'))
            pos++;
        std::string word = rest.substr(start, pos - start);
        if (word.empty()) throw SchemaError("malformed pragma near '" + rest.substr(start) + "'");
        if (pos < rest.size() && rest[pos] == '(') {
            int depth = 0;
            size_t open = pos;
            for (; pos < rest.size(); pos++) {
                if (rest[pos] == '(') depth++;
                if (rest[pos] == ')' && --depth == 0) break;
            }
            if (depth != 0) throw SchemaError("unbalanced parentheses in pragma: " + line);
            std::string args = normalize_ws(rest.substr(open + 1, pos - open - 1));
            pos++;
            info.clauses.push_back({word, args});
        } else {
            if (!info.clauses.empty())
                throw SchemaError("construct word '" + word + "' after clauses in pragma: " + line);
            if (!info.construct.empty()) info.construct += ' ';
            info.construct += word;
        }
    }
    if (info.construct.empty()) throw SchemaError("pragma has no construct: " + line);
    return info;
}

}  // namespace paragraph
