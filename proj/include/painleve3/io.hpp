#pragma once

#include <cstdio>
#include <sstream>
#include <string>

#include <json.hpp>

#include "classification.hpp"

namespace p3::io {

using json = nlohmann::json;

inline std::string format_double(double v) {
    if (std::isnan(v)) return "null";
    if (v == 0) v = 0;  // drop the sign of zero
    if (std::isinf(v)) return v > 0 ? "1e309" : "-1e309";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

namespace detail {

inline void emit(std::ostringstream& os, const json& j, int indent, int depth) {
    auto pad = [&](int d) {
        if (indent > 0) os << '\n' << std::string(std::size_t(indent * d), ' ');
    };
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {  // std::map keeps keys sorted
            if (!first) os << ',';
            first = false;
            pad(depth + 1);
            os << json(it.key()).dump() << (indent > 0 ? ": " : ":");
            emit(os, it.value(), indent, depth + 1);
        }
        pad(depth);
        os << '}';
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        // short numeric arrays stay on one line
        bool flat = j.size() <= 4 && std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
        os << '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) os << (flat && indent > 0 ? ", " : ",");
            if (!flat) pad(depth + 1);
            emit(os, j[i], indent, depth + 1);
        }
        if (!flat) pad(depth);
        os << ']';
        return;
    }
    case json::value_t::number_float: os << format_double(j.get<double>()); return;
    default: os << j.dump(); return;
    }
}

}  // namespace detail

inline std::string dump(const json& j, int indent = 2) {
    std::ostringstream os;
    detail::emit(os, j, indent, 0);
    return os.str();
}

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const Mat2& m) {
    return json::array({json::array({to_json(m.a), to_json(m.b)}), json::array({to_json(m.c), to_json(m.d)})});
}

inline json to_json(const MonodromyPoint& p) {
    return {{"s", to_json(p.s)}, {"b1", to_json(p.b1)}, {"b2", to_json(p.b2)}, {"constraint_residual", p.residual}};
}

inline json to_json(const FlowEvent& e) {
    return {{"x", e.x}, {"kind", ::p3::detail::kind_label(e.kind)}, {"gt", to_json(e.gt_at_event)}};
}

}  // namespace p3::io
