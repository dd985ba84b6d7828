#ifndef FDRLAB_REPORT_HPP
#define FDRLAB_REPORT_HPP

// CSV and JSON report writers. Both emit the same fields in the same order;
// reals are printed with 17 significant digits so reruns are byte-identical.

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "fdrlab/scenarios.hpp"

namespace fdrlab {

inline constexpr int report_schema_version = 1;

inline constexpr std::string_view report_columns[] = {
    "scenario", "model",   "m",        "m0",     "alpha", "procedure", "kind",           "n_reps",
    "seed",     "fdr_hat", "fwer_hat", "se_fdr", "bound", "bound_satisfied", "oracle_value", "wall_time_ms",
};

inline std::string format_real(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

// One field of a row: its text and whether it is a string (quoted in JSON).
struct Field {
    std::string text;
    bool is_string = false;
    bool is_null = false;
};

inline std::vector<Field> fields(const ReportRow& r)
{
    auto str = [](std::string s) { return Field{std::move(s), true, false}; };
    auto num = [](std::string s) { return Field{std::move(s), false, false}; };
    auto opt = [](const std::optional<double>& x) {
        return x ? Field{format_real(*x), false, false} : Field{"", false, true};
    };
    return {
        str(r.scenario),
        str(r.model),
        num(std::to_string(r.m)),
        num(std::to_string(r.m0)),
        num(format_real(r.alpha)),
        str(r.procedure),
        str(r.kind),
        num(std::to_string(r.n_reps)),
        num(std::to_string(r.seed)),
        num(format_real(r.fdr_hat)),
        num(format_real(r.fwer_hat)),
        num(format_real(r.se_fdr)),
        opt(r.bound),
        num(r.bound_satisfied ? "true" : "false"),
        opt(r.oracle_value),
        opt(r.wall_time_ms),
    };
}

inline std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string json_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out;
}

} // namespace detail

inline std::string csv_header()
{
    std::string h;
    for (std::size_t i = 0; i < std::size(report_columns); ++i) {
        if (i)
            h += ',';
        h += report_columns[i];
    }
    return h;
}

inline void write_csv(std::ostream& os, const std::vector<ReportRow>& rows)
{
    os << csv_header() << '\n';
    for (const auto& row : rows) {
        const auto fs = detail::fields(row);
        for (std::size_t i = 0; i < fs.size(); ++i) {
            if (i)
                os << ',';
            os << detail::csv_escape(fs[i].text);
        }
        os << '\n';
    }
}

inline void write_json(std::ostream& os, const std::vector<ReportRow>& rows)
{
    os << "[";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        os << (r ? ",\n  {" : "\n  {");
        const auto fs = detail::fields(rows[r]);
        for (std::size_t i = 0; i < fs.size(); ++i) {
            if (i)
                os << ", ";
            os << '"' << report_columns[i] << "\": ";
            if (fs[i].is_null)
                os << "null";
            else if (fs[i].is_string)
                os << '"' << detail::json_escape(fs[i].text) << '"';
            else
                os << fs[i].text;
        }
        os << '}';
    }
    os << (rows.empty() ? "]\n" : "\n]\n");
}

} // namespace fdrlab

#endif // FDRLAB_REPORT_HPP
