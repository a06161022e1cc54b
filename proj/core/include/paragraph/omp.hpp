#pragma once

#include <optional>
#include <string>
#include <vector>

namespace paragraph {

struct OmpMapClause {
    std::string direction;  // to | from | tofrom
    std::string array;
    std::string lower;   // section lower bound expression
    std::string extent;  // section length expression

    bool operator==(const OmpMapClause&) const = default;
};

struct OmpClause {
    std::string name;
    std::string args;  // raw text between the parentheses, whitespace-normalized

    bool operator==(const OmpClause&) const = default;
};

/// Parsed form of one "#pragma omp ..." line.
struct OmpDirectiveInfo {
    std::string construct;  // e.g. "parallel for", "target teams distribute parallel for"
    std::vector<OmpClause> clauses;

    std::optional<long long> collapse() const;
    std::optional<long long> num_teams() const;
    std::optional<long long> num_threads() const;
    std::vector<OmpMapClause> maps() const;

    /// True when the construct applies "parallel for" worksharing to the
    /// annotated loop (covers the combined target/teams/distribute forms).
    bool parallelizes_loop() const;

    /// Static unless an explicit schedule clause says otherwise.
    bool static_schedule() const;

    std::string render() const;  // "#pragma omp <construct> <clauses...>"

    bool operator==(const OmpDirectiveInfo&) const = default;
};

/// Parses a full "#pragma omp ..." line. Throws SchemaError on text that
/// does not start with "#pragma omp" or has unbalanced parentheses.
OmpDirectiveInfo parse_omp_directive(const std::string& line);

}  // namespace paragraph
