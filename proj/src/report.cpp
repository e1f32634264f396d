#include "bjlab/report.hpp"

#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace bjlab {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    std::string s(buf);
    // keep the value a JSON float when it prints like an integer
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

void emit(const Json& j, int depth, std::string& out) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(2 * depth), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) { out += "{}"; return; }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad + Json(it.key()).dump() + ": ";
                emit(it.value(), depth + 1, out);
            }
            out += "\n" + close + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) { out += "[]"; return; }
            // numeric arrays on one line; they are long and not worth a line per entry
            const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
            out += flat ? "[" : "[\n";
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += flat ? ", " : ",\n";
                first = false;
                if (!flat) out += pad;
                emit(e, depth + 1, out);
            }
            out += flat ? "]" : "\n" + close + "]";
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_double(v) : "null";
            return;
        }
        default:
            out += j.dump();
    }
}

Json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Json inertia_json(const Inertia& in) { return {{"neg", in.neg}, {"zero", in.zero}, {"pos", in.pos}}; }

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

/// About five round tick values covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) { step = m * mag; break; }
    std::vector<double> t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
        t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return t;
}

std::string fmt(const char* f, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

CurvatureProfile default_profile() { return CurvatureProfile(2.0 * std::numbers::pi, 1.0, {0.2}, {0.0}); }

CurvatureProfile profile_from_json(const Json& j) {
    try {
        if (!j.is_object() || !j.contains("length")) throw DomainError("profile: expected an object with \"length\"");
        const double length = j.at("length").get<double>();
        if (!(length > 0.0)) throw DomainError("profile: length must be positive");
        if (j.contains("constant")) return constant_profile(length, j.at("constant").get<double>());
        const Json& f = j.at("fourier");
        auto ak = f.value("ak", std::vector<double>{});
        auto bk = f.value("bk", std::vector<double>{});
        if (ak.size() < bk.size()) ak.resize(bk.size(), 0.0);
        if (bk.size() < ak.size()) bk.resize(ak.size(), 0.0);
        return CurvatureProfile(length, f.at("a0").get<double>(), ak, bk);
    } catch (const Json::exception& e) {
        throw DomainError(std::string("profile: ") + e.what());
    }
}

Json profile_to_json(const CurvatureProfile& p) {
    return {{"length", p.length()}, {"fourier", {{"a0", p.a0()}, {"ak", p.ak()}, {"bk", p.bk()}}}};
}

std::string dump_json(const Json& j) {
    std::string out;
    emit(j, 0, out);
    out += "\n";
    return out;
}

std::vector<double> downsample(const Eigen::VectorXd& v, std::size_t max_points) {
    const auto n = static_cast<std::size_t>(v.size());
    if (n <= max_points) return {v.data(), v.data() + n};
    const std::size_t stride = (n + max_points - 2) / (max_points - 1);
    std::vector<double> out;
    for (std::size_t i = 0; i < n; i += stride) out.push_back(v(static_cast<Index>(i)));
    if ((n - 1) % stride != 0) out.push_back(v(static_cast<Index>(n - 1)));
    return out;
}

Json plot_to_json(const Plot& plot) {
    Json series = Json::array();
    for (const auto& s : plot.series) series.push_back({{"label", s.label}, {"x", s.x}, {"y", s.y}});
    return {{"name", plot.name}, {"title", plot.title}, {"xlabel", plot.xlabel}, {"ylabel", plot.ylabel},
            {"series", series}};
}

Plot plot_from_json(const Json& j) {
    try {
        Plot p;
        p.name = j.at("name").get<std::string>();
        p.title = j.value("title", p.name);
        p.xlabel = j.value("xlabel", "");
        p.ylabel = j.value("ylabel", "");
        for (const auto& s : j.at("series")) {
            Series ser;
            ser.label = s.value("label", "");
            // null marks a non-finite value
            for (const auto& v : s.at("x")) ser.x.push_back(v.is_null() ? std::nan("") : v.get<double>());
            for (const auto& v : s.at("y")) ser.y.push_back(v.is_null() ? std::nan("") : v.get<double>());
            if (ser.x.size() != ser.y.size()) throw DomainError("plot: x and y differ in length");
            p.series.push_back(std::move(ser));
        }
        return p;
    } catch (const Json::exception& e) {
        throw DomainError(std::string("plot: ") + e.what());
    }
}

std::string render_svg(const Plot& plot) {
    constexpr double width = 720, height = 440, left = 70, right = 20, top = 40, bottom = 55;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& s : plot.series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const double pw = width - left - right, ph = height - top - bottom;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(plot.title)
      << "</text>\n";
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : nice_ticks(xmin, xmax)) {
        const std::string x = fmt("%.2f", px(t));
        o << "<line x1=\"" << x << "\" y1=\"" << top + ph << "\" x2=\"" << x << "\" y2=\"" << top + ph + 5
          << "\" stroke=\"black\"/><text x=\"" << x << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
          << fmt("%g", t) << "</text>\n";
    }
    for (double t : nice_ticks(ymin, ymax)) {
        const std::string y = fmt("%.2f", py(t));
        o << "<line x1=\"" << left - 5 << "\" y1=\"" << y << "\" x2=\"" << left << "\" y2=\"" << y
          << "\" stroke=\"black\"/><text x=\"" << left - 8 << "\" y=\"" << y
          << "\" text-anchor=\"end\" dominant-baseline=\"middle\">" << fmt("%g", t) << "</text>\n";
    }
    o << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">"
      << escape_xml(plot.xlabel) << "</text>\n";
    o << "<text transform=\"translate(16," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape_xml(plot.ylabel) << "</text>\n";

    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const auto& s = plot.series[k];
        const char* color = palette[k % std::size(palette)];
        // break the polyline at non-finite samples
        std::string pts;
        auto flush = [&] {
            if (!pts.empty())
                o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts
                  << "\"/>\n";
            pts.clear();
        };
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) { flush(); continue; }
            if (!pts.empty()) pts += ' ';
            pts += fmt("%.2f", px(s.x[i])) + "," + fmt("%.2f", py(s.y[i]));
        }
        flush();
        const double ly = top + 14 + 16 * static_cast<double>(k);
        o << "<line x1=\"" << left + pw - 130 << "\" y1=\"" << ly << "\" x2=\"" << left + pw - 110 << "\" y2=\"" << ly
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\"" << left + pw - 104 << "\" y=\"" << ly
          << "\" dominant-baseline=\"middle\">" << escape_xml(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::string render_csv(const Plot& plot) {
    if (plot.series.empty()) return "x\n";
    const auto& x = plot.series.front().x;
    for (const auto& s : plot.series)
        if (s.x != x) throw DomainError("render_csv: series do not share x");
    std::vector<std::string> header{plot.xlabel.empty() ? "x" : plot.xlabel};
    std::vector<Eigen::VectorXd> cols{Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Index>(x.size()))};
    for (const auto& s : plot.series) {
        header.push_back(s.label);
        cols.emplace_back(Eigen::Map<const Eigen::VectorXd>(s.y.data(), static_cast<Index>(s.y.size())));
    }
    return csv_table(header, cols);
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<Eigen::VectorXd>& columns) {
    if (header.size() != columns.size()) throw DomainError("csv_table: header and column counts differ");
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
    out += '\n';
    if (columns.empty()) return out;
    const Index rows = columns.front().size();
    for (const auto& c : columns)
        if (c.size() != rows) throw DomainError("csv_table: ragged columns");
    char buf[32];
    for (Index r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            std::snprintf(buf, sizeof buf, "%.15g", columns[c](r));
            if (c) out += ',';
            out += buf;
        }
        out += '\n';
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

Json to_json(const InteractionConstants& c) {
    return {{"c0", c.c0}, {"c0_error", c.c0_error}, {"c1", c.c1}, {"c1_error", c.c1_error},
            {"cbar_sq", c.cbar_sq}, {"cbar", c.cbar()}};
}

Json to_json(const CorrectorIntegrals& c) {
    return {{"i_x", c.i_x},       {"i_y", c.i_y},       {"i_z", c.i_z},       {"rhs_x", c.rhs_x},
            {"rhs_y", c.rhs_y},   {"rhs_z", c.rhs_z},   {"rho", c.rho},       {"orth_x", c.orth_x},
            {"orth_y", c.orth_y}, {"orth_z", c.orth_z}, {"half_window", c.half_window}, {"grid", c.grid}};
}

Json to_json(const LinearizedTodaReport& r) {
    return {{"eigen_residual", r.eigen_residual},
            {"kernel_tanh_residual", r.kernel_tanh_residual},
            {"kernel_even_residual", r.kernel_even_residual},
            {"smallest_eigenvalue", r.smallest_eigenvalue},
            {"eigenvector_error", r.eigenvector_error},
            {"grid", r.grid}};
}

Json to_json(const SpectrumReport& r) {
    std::vector<double> values;
    for (const auto& p : r.smallest) values.push_back(p.value);
    return {{"index", r.neg_count},          {"nullity", r.zero_count},   {"positive", r.pos_count},
            {"smallest_eigenvalues", values}, {"gap", r.gap},             {"zero_tolerance", r.zero_tolerance},
            {"lambda_max_estimate", r.lambda_max_estimate}};
}

Json to_json(const BouncingField& f) {
    return {{"length", f.length},
            {"n", f.n()},
            {"points", f.points},
            {"jumps", vec(f.jumps)},
            {"slope_plus", vec(f.slope_plus)},
            {"slope_minus", vec(f.slope_minus)},
            {"index", f.index},
            {"nullity", f.nullity},
            {"hn_value", f.hn_value},
            {"gradient_norm", f.gradient_norm},
            {"reflection_error", f.reflection_error}};
}

Json to_json(const IndexNullity& r) {
    Json j = {{"index", r.index}, {"nullity", r.nullity}, {"eigenvalues", vec(r.eigenvalues)},
              {"asymmetry", r.asymmetry}};
    if (r.q_form) j["q_form"] = inertia_json(*r.q_form);
    return j;
}

Json to_json(const GlueParameters& g) {
    Json minima = Json::array();
    for (const auto& m : g.minima)
        minima.push_back({{"kappa", m.kappa}, {"sbar", m.sbar}, {"delta", m.delta}, {"theta", m.theta}});
    return {{"minima", minima},   {"r_match", g.r_match}, {"c_kappa", g.c_kappa},
            {"c_delta", g.c_delta}, {"c_theta", g.c_theta}, {"c_sbar", g.c_sbar}};
}

Json to_json(const JacobiTodaSolution& s) {
    return {{"epsilon", s.epsilon},
            {"alpha", s.alpha},
            {"grid", s.grid()},
            {"residual_norm", s.residual_norm},
            {"newton_iterations", s.newton_iterations},
            {"continuation_steps", s.continuation_steps},
            {"method", s.method},
            {"psi_min", s.psi.minCoeff()},
            {"psi_max", s.psi.maxCoeff()},
            {"glue", to_json(s.glue)}};
}

Json to_json(const JtSpectrum& s) {
    Json j = {{"index", s.index},
              {"nullity", s.nullity},
              {"eigenvalues", s.eigenvalues},
              {"gap", s.gap},
              {"zero_tolerance", s.zero_tolerance}};
    if (s.refined) j["refined"] = inertia_json(*s.refined);
    return j;
}

Json to_json(const ACSolution& s) {
    const double lim = 2.0 * interaction_constants().c0 * s.grid.metric().profile().length();
    return {{"epsilon", s.epsilon},
            {"grid", {s.grid.ns(), s.grid.nt()}},
            {"tau", s.grid.metric().half_width()},
            {"residual_norm", s.residual_norm},
            {"approximation_residual", s.approximation_residual},
            {"newton_iterations", s.newton_iterations},
            {"energy", s.energy},
            {"energy_limit", lim},
            {"energy_relative_error", (s.energy - lim) / lim},
            {"v_norm", s.v_norm},
            {"h1_norm", s.h1_norm},
            {"h2_norm", s.h2_norm},
            {"max_abs_u", s.max_abs_u},
            {"zero_set",
             {{"components", 2},
              {"t_minus_min", s.zeros.t_minus.minCoeff()},
              {"t_minus_max", s.zeros.t_minus.maxCoeff()},
              {"t_plus_min", s.zeros.t_plus.minCoeff()},
              {"t_plus_max", s.zeros.t_plus.maxCoeff()}}}};
}

Json to_json(const ACSpectrum& s) {
    Json modes = Json::array();
    for (const auto& m : s.modes)
        modes.push_back({{"eigenvalue", m.eigenvalue}, {"layer_fraction", m.layer_fraction},
                         {"even_fraction", m.even_fraction}});
    return {{"index", s.index},
            {"zero_count", s.zero_count},
            {"nullity_flag", s.nullity_flag},
            {"zero_tolerance", s.zero_tolerance},
            {"eigenvalues", s.eigenvalues},
            {"modes", modes}};
}

}  // namespace bjlab
