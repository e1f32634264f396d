#pragma once

#include "bjlab/allencahn.hpp"

#include <json.hpp>

#include <string>

namespace bjlab {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "bjlab 0.1.0";

/// K = 1 + 0.2 cos s on a geodesic of length 2 pi.
CurvatureProfile default_profile();

/// {"length": L, "fourier": {"a0": ..., "ak": [...], "bk": [...]}}; {"length": L, "constant": k}
/// is accepted as shorthand. Throws DomainError on malformed input.
CurvatureProfile profile_from_json(const Json& j);
Json profile_to_json(const CurvatureProfile& profile);

/// Pretty JSON with doubles at 15 significant digits and non-finite values as null.
/// Object keys come out sorted, so equal documents give equal bytes.
std::string dump_json(const Json& j);

/// One polyline of a plot.
struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Plot {
    std::string name;  // file stem
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<Series> series;
};

/// Every `stride`-th entry so that at most `max_points` remain (the last point is always kept).
std::vector<double> downsample(const Eigen::VectorXd& v, std::size_t max_points = 512);

Json plot_to_json(const Plot& plot);
Plot plot_from_json(const Json& j);

/// Standalone SVG with axes, ticks and a legend.
std::string render_svg(const Plot& plot);

/// Columns x, then one y column per series; series must share x.
std::string render_csv(const Plot& plot);

/// CSV with a header row; all columns must have equal length.
std::string csv_table(const std::vector<std::string>& header, const std::vector<Eigen::VectorXd>& columns);

void write_text(const std::string& path, const std::string& text);

Json to_json(const InteractionConstants& c);
Json to_json(const CorrectorIntegrals& c);
Json to_json(const LinearizedTodaReport& r);
Json to_json(const SpectrumReport& r);
Json to_json(const BouncingField& f);
Json to_json(const IndexNullity& r);
Json to_json(const GlueParameters& g);
Json to_json(const JacobiTodaSolution& s);
Json to_json(const JtSpectrum& s);
Json to_json(const ACSolution& s);
Json to_json(const ACSpectrum& s);

}  // namespace bjlab
