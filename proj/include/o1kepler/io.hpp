/**
 * @file io.hpp
 * @brief Spec files, trace rows and their CSV / JSON / SVG encodings.
 *
 * Every number is written with 17 significant digits so that parsing the
 * output and writing it again reproduces it byte for byte.
 */
#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynamics.hpp"
#include "geometry.hpp"

namespace o1kepler {

/// Reading or writing a file failed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// %.17g; round-trips every finite double (-0 is written as 0).
inline std::string format_number(double x) {
    if (!std::isfinite(x)) throw InvalidInput("format_number: non-finite value");
    if (x == 0.0) return "0";  // JSON readers drop the sign of -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error while reading '" + path + "'");
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("error while writing '" + path + "'");
}

namespace detail {

/// 1-based line and column of a byte offset.
inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline Vector json_vector(const nlohmann::json& j, const char* key, std::size_t n) {
    const auto it = j.find(key);
    if (it == j.end()) throw InvalidInput(std::string("spec: missing key \"") + key + "\"");
    if (!it->is_array()) throw InvalidInput(std::string("spec: \"") + key + "\" must be an array");
    if (it->size() != n)
        throw InvalidInput(std::string("spec: \"") + key + "\" must have n = " + std::to_string(n) + " entries");
    Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (!(*it)[i].is_number())
            throw InvalidInput(std::string("spec: \"") + key + "\" entries must be numbers");
        v(static_cast<Eigen::Index>(i)) = (*it)[i].get<double>();
    }
    return v;
}

}  // namespace detail

/**
 * @brief Parse a spec document {"n", "class", "u", "v"}.
 * @throws InvalidInput with "line L, column C" for syntax errors and a plain
 *         message for schema or validity errors.
 */
inline TrajectorySpec parse_spec(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // byte is the 1-based position of the offending character
        const auto [line, col] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw InvalidInput("spec: JSON syntax error at line " + std::to_string(line) + ", column " +
                           std::to_string(col));
    }
    if (!j.is_object()) throw InvalidInput("spec: top level must be an object");
    for (const auto& [key, _] : j.items())
        if (key != "n" && key != "class" && key != "u" && key != "v")
            throw InvalidInput("spec: unknown key \"" + key + "\"");

    const auto n_it = j.find("n");
    if (n_it == j.end()) throw InvalidInput("spec: missing key \"n\"");
    if (!n_it->is_number_integer()) throw InvalidInput("spec: \"n\" must be an integer");
    const auto n = n_it->get<long long>();
    if (n < 2 || n > 4096) throw InvalidInput("spec: \"n\" must be >= 2");

    const auto c_it = j.find("class");
    if (c_it == j.end()) throw InvalidInput("spec: missing key \"class\"");
    if (!c_it->is_string()) throw InvalidInput("spec: \"class\" must be a string");
    const auto cls = parse_energy_class(c_it->get<std::string>());
    if (!cls) throw InvalidInput("spec: \"class\" must be elliptic, parabolic or hyperbolic");

    const auto size = static_cast<std::size_t>(n);
    return TrajectorySpec(*cls, detail::json_vector(j, "u", size), detail::json_vector(j, "v", size));
}

inline TrajectorySpec read_spec_file(const std::string& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const IoError& e) {
        throw InvalidInput(std::string("spec: ") + e.what());
    }
    try {
        return parse_spec(text);
    } catch (const InvalidInput& e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

inline std::string spec_to_json(const TrajectorySpec& s) {
    const auto array = [](const Vector& x) {
        std::string out = "[";
        for (Eigen::Index i = 0; i < x.size(); ++i) out += (i ? ", " : "") + format_number(x(i));
        return out + "]";
    };
    return "{\"n\": " + std::to_string(s.n()) + ", \"class\": \"" + std::string(to_string(s.energy_class)) +
           "\", \"u\": " + array(s.u) + ", \"v\": " + array(s.v) + "}\n";
}

/// One sampled point of a closed-form trajectory.
struct TraceRow {
    double tau = 0.0;
    double t = 0.0;
    Vector X;
    std::optional<std::vector<double>> x_upper;  ///< empty on a collision row
    std::optional<Eigen::Vector2d> p;           ///< empty on collision rows and colliding specs

    bool collision() const { return !x_upper.has_value(); }
};

/// Row-major upper triangle.
inline std::vector<double> upper_triangle(const SymMatrix& x) {
    std::vector<double> out;
    for (int i = 0; i < x.n(); ++i)
        for (int j = i; j < x.n(); ++j) out.push_back(x(i, j));
    return out;
}

/**
 * @brief `steps` rows at uniform tau over [tau_min, tau_max], endpoints included.
 *
 * A row whose image is the origin keeps tau, t and X and leaves the rest empty.
 */
inline std::vector<TraceRow> sample_trace(const TrajectorySpec& s, double tau_min, double tau_max, int steps) {
    if (steps < 2) throw InvalidInput("sample: steps must be >= 2");
    if (!(std::isfinite(tau_min) && std::isfinite(tau_max) && tau_min < tau_max))
        throw InvalidInput("sample: need finite tau_min < tau_max");
    std::optional<PlaneChart> chart;
    if (!colliding(s)) chart = plane_of(s);

    std::vector<TraceRow> rows;
    rows.reserve(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        TraceRow row;
        row.tau = i + 1 == steps ? tau_max : tau_min + (tau_max - tau_min) * i / (steps - 1);
        row.t = physical_time(s, row.tau);
        row.X = position_up(s, row.tau);
        try {
            const ConePoint x = position_down(s, row.tau);
            row.x_upper = upper_triangle(x.base());
            if (chart) row.p = plane_coords(*chart, x);
        } catch (const CollisionError&) {
            // leave x_upper and p empty
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<std::string> trace_columns(int n) {
    std::vector<std::string> cols = {"tau", "t"};
    for (int i = 0; i < n; ++i) cols.push_back("X" + std::to_string(i));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) cols.push_back("x" + std::to_string(i) + std::to_string(j));
    cols.push_back("p1");
    cols.push_back("p2");
    return cols;
}

namespace detail {

/// Values of a row in trace_columns order; nullopt marks an empty field.
inline std::vector<std::optional<double>> row_values(const TraceRow& r, int n) {
    std::vector<std::optional<double>> vals = {r.tau, r.t};
    for (Eigen::Index i = 0; i < r.X.size(); ++i) vals.emplace_back(r.X(i));
    const std::size_t m = static_cast<std::size_t>(n) * (n + 1) / 2;
    for (std::size_t k = 0; k < m; ++k) vals.push_back(r.x_upper ? std::optional((*r.x_upper)[k]) : std::nullopt);
    vals.push_back(r.p ? std::optional((*r.p)(0)) : std::nullopt);
    vals.push_back(r.p ? std::optional((*r.p)(1)) : std::nullopt);
    return vals;
}

inline int row_order(const std::vector<TraceRow>& rows) {
    if (rows.empty()) throw InvalidInput("trace: no rows");
    return static_cast<int>(rows.front().X.size());
}

}  // namespace detail

inline std::string trace_to_csv(const std::vector<TraceRow>& rows) {
    const int n = detail::row_order(rows);
    std::string out;
    const auto cols = trace_columns(n);
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += '\n';
    for (const auto& r : rows) {
        const auto vals = detail::row_values(r, n);
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (i) out += ',';
            if (vals[i]) out += format_number(*vals[i]);
        }
        out += '\n';
    }
    return out;
}

/// Array of flat objects, one per line; collision rows carry "error": "collision".
inline std::string trace_to_json(const std::vector<TraceRow>& rows) {
    const int n = detail::row_order(rows);
    const auto cols = trace_columns(n);
    std::string out = "[\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto vals = detail::row_values(rows[k], n);
        out += "  {";
        bool first = true;
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (!vals[i]) continue;
            out += (first ? "\"" : ", \"") + cols[i] + "\": " + format_number(*vals[i]);
            first = false;
        }
        if (rows[k].collision()) out += ", \"error\": \"collision\"";
        out += k + 1 < rows.size() ? "},\n" : "}\n";
    }
    return out + "]\n";
}

/// Inverse of trace_to_json.
inline std::vector<TraceRow> trace_from_json(const std::string& text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(std::string("trace: ") + e.what());
    }
    if (!j.is_array() || j.empty()) throw InvalidInput("trace: expected a non-empty array");
    const auto num = [](const nlohmann::ordered_json& o, const std::string& key) {
        const auto it = o.find(key);
        if (it == o.end() || !it->is_number()) throw InvalidInput("trace: missing number \"" + key + "\"");
        return it->get<double>();
    };
    int n = 0;
    while (j.front().contains("X" + std::to_string(n))) ++n;
    if (n < 2) throw InvalidInput("trace: rows need X0, X1, ...");

    std::vector<TraceRow> rows;
    for (const auto& o : j) {
        TraceRow r;
        r.tau = num(o, "tau");
        r.t = num(o, "t");
        r.X.resize(n);
        for (int i = 0; i < n; ++i) r.X(i) = num(o, "X" + std::to_string(i));
        if (!o.contains("error")) {
            std::vector<double> upper;
            for (int i = 0; i < n; ++i)
                for (int k = i; k < n; ++k) upper.push_back(num(o, "x" + std::to_string(i) + std::to_string(k)));
            r.x_upper = std::move(upper);
            if (o.contains("p1")) r.p = Eigen::Vector2d(num(o, "p1"), num(o, "p2"));
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

/**
 * @brief Physical-time trace: columns t, X*, V* (dX/dt), x* (upper triangle), E.
 */
inline std::string physical_trace_to_csv(const Trace& trace) {
    if (trace.empty()) return "";
    const int n = static_cast<int>(trace.front().state.X.size());
    std::string out = "t";
    for (int i = 0; i < n; ++i) out += ",X" + std::to_string(i);
    for (int i = 0; i < n; ++i) out += ",V" + std::to_string(i);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) out += ",x" + std::to_string(i) + std::to_string(j);
    out += ",E\n";
    for (const auto& p : trace) {
        out += format_number(p.t);
        for (int i = 0; i < n; ++i) out += "," + format_number(p.state.X(i));
        for (int i = 0; i < n; ++i) out += "," + format_number(p.state.Xdot(i));
        for (double x : upper_triangle(q_map(p.state.X).base())) out += "," + format_number(x);
        out += "," + format_number(energy_reg(p.state)) + "\n";
    }
    return out;
}

inline std::string physical_trace_to_json(const Trace& trace) {
    std::string out = "[\n";
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const auto& p = trace[k];
        const int n = static_cast<int>(p.state.X.size());
        out += "  {\"t\": " + format_number(p.t);
        for (int i = 0; i < n; ++i) out += ", \"X" + std::to_string(i) + "\": " + format_number(p.state.X(i));
        for (int i = 0; i < n; ++i) out += ", \"V" + std::to_string(i) + "\": " + format_number(p.state.Xdot(i));
        const auto upper = upper_triangle(q_map(p.state.X).base());
        std::size_t idx = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                out += ", \"x" + std::to_string(i) + std::to_string(j) + "\": " + format_number(upper[idx++]);
        out += ", \"E\": " + format_number(energy_reg(p.state));
        out += k + 1 < trace.size() ? "},\n" : "}\n";
    }
    return out + "]\n";
}

namespace detail {

inline std::string fixed(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return std::string(buf) == "-0.0000" ? "0.0000" : buf;
}

}  // namespace detail

/**
 * @brief Standalone SVG 1.1 drawing of a plane-coordinate polyline with axes.
 *
 * Equal aspect ratio; the axes are the lines p1 = 0 and p2 = 0 when they cross
 * the view, otherwise the frame edges nearest to them.
 */
inline std::string plot_svg(const std::vector<Eigen::Vector2d>& points, const std::string& title) {
    if (points.size() < 2) throw InvalidInput("plot: need at least 2 points");
    constexpr double width = 640.0, height = 640.0, margin = 40.0;
    double lo1 = 0.0, hi1 = 0.0, lo2 = 0.0, hi2 = 0.0;  // the origin is always in view
    for (const auto& p : points) {
        lo1 = std::min(lo1, p(0));
        hi1 = std::max(hi1, p(0));
        lo2 = std::min(lo2, p(1));
        hi2 = std::max(hi2, p(1));
    }
    const double span = std::max({hi1 - lo1, hi2 - lo2, 1e-12});
    const double scale = (width - 2 * margin) / span;
    const double c1 = 0.5 * (lo1 + hi1), c2 = 0.5 * (lo2 + hi2);
    const auto sx = [&](double p1) { return width / 2 + (p1 - c1) * scale; };
    const auto sy = [&](double p2) { return height / 2 - (p2 - c2) * scale; };
    using detail::fixed;

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fixed(width) + "\" height=\"" +
           fixed(height) + "\" viewBox=\"0 0 " + fixed(width) + " " + fixed(height) + "\">\n";
    std::string escaped;
    for (char c : title) {
        switch (c) {
            case '&': escaped += "&amp;"; break;
            case '<': escaped += "&lt;"; break;
            case '>': escaped += "&gt;"; break;
            case '"': escaped += "&quot;"; break;
            default: escaped += c;
        }
    }
    svg += "  <title>" + escaped + "</title>\n";
    svg += "  <rect x=\"0\" y=\"0\" width=\"" + fixed(width) + "\" height=\"" + fixed(height) +
           "\" fill=\"white\"/>\n";
    svg += "  <g stroke=\"#888888\" stroke-width=\"1\">\n";
    svg += "    <line x1=\"" + fixed(margin / 2) + "\" y1=\"" + fixed(sy(0.0)) + "\" x2=\"" +
           fixed(width - margin / 2) + "\" y2=\"" + fixed(sy(0.0)) + "\"/>\n";
    svg += "    <line x1=\"" + fixed(sx(0.0)) + "\" y1=\"" + fixed(margin / 2) + "\" x2=\"" + fixed(sx(0.0)) +
           "\" y2=\"" + fixed(height - margin / 2) + "\"/>\n";
    svg += "  </g>\n";
    svg += "  <text x=\"" + fixed(width - margin / 2) + "\" y=\"" + fixed(sy(0.0) - 6) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">p1</text>\n";
    svg += "  <text x=\"" + fixed(sx(0.0) + 6) + "\" y=\"" + fixed(margin / 2 + 12) +
           "\" font-family=\"sans-serif\" font-size=\"12\">p2</text>\n";
    svg += "  <polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i)
        svg += (i ? " " : "") + fixed(sx(points[i](0))) + "," + fixed(sy(points[i](1)));
    svg += "\"/>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace o1kepler
