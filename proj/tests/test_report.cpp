#include "bjlab/report.hpp"

#include <doctest.h>

#include <numbers>

using namespace bjlab;
using doctest::Approx;

TEST_CASE("deterministic JSON") {
    Json j = {{"zeta", 1.0}, {"alpha", {1.5, 2.0, std::nan("")}}, {"mid", {{"b", 3}, {"a", "x"}}}};
    j["inf"] = std::numeric_limits<double>::infinity();
    j["third"] = 1.0 / 3.0;
    j["flag"] = true;
    const std::string text = dump_json(j);
    CHECK(text == dump_json(Json::parse(dump_json(j))));
    CHECK(text ==
          "{\n"
          "  \"alpha\": [1.5, 2.0, null],\n"
          "  \"flag\": true,\n"
          "  \"inf\": null,\n"
          "  \"mid\": {\n"
          "    \"a\": \"x\",\n"
          "    \"b\": 3\n"
          "  },\n"
          "  \"third\": 0.333333333333333,\n"
          "  \"zeta\": 1.0\n"
          "}\n");
    CHECK(dump_json(Json::object()) == "{}\n");
    CHECK(dump_json(Json::array({Json::object({{"k", 1}})})) == "[\n  {\n    \"k\": 1\n  }\n]\n");
    CHECK(dump_json(Json(1e300)) == "1e+300\n");
}

TEST_CASE("profile round trip") {
    const CurvatureProfile p(3.0, 0.5, {0.2, -0.1}, {0.0, 0.3});
    const CurvatureProfile q = profile_from_json(profile_to_json(p));
    CHECK(q.length() == p.length());
    for (double s = 0.0; s < 3.0; s += 0.37) CHECK(q(s) == p(s));

    const CurvatureProfile c = profile_from_json(Json::parse(R"({"length": 2, "constant": 0.5})"));
    CHECK(c(1.3) == 0.5);
    const CurvatureProfile ragged =
        profile_from_json(Json::parse(R"({"length": 6.283185307179586, "fourier": {"a0": 1, "bk": [0, 0.1]}})"));
    CHECK(ragged(std::numbers::pi / 4) == Approx(1.1).epsilon(1e-14));
    CHECK(default_profile()(0.0) == Approx(1.2).epsilon(1e-15));

    CHECK_THROWS_AS(profile_from_json(Json::parse(R"({"fourier": {"a0": 1}})")), DomainError);
    CHECK_THROWS_AS(profile_from_json(Json::parse(R"({"length": -1, "constant": 1})")), DomainError);
    CHECK_THROWS_AS(profile_from_json(Json::parse(R"({"length": 1, "fourier": {"ak": [1]}})")), DomainError);
    CHECK_THROWS_AS(profile_from_json(Json::parse(R"({"length": "x", "constant": 1})")), DomainError);
    CHECK_THROWS_AS(profile_from_json(Json::parse("[1, 2]")), DomainError);
}

TEST_CASE("downsampling keeps both ends") {
    const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(2000, 0.0, 1999.0);
    const auto d = downsample(v, 512);
    CHECK(d.size() <= 512);
    CHECK(d.front() == 0.0);
    CHECK(d.back() == 1999.0);
    CHECK(downsample(v.head(10), 512).size() == 10);
    CHECK(std::is_sorted(d.begin(), d.end()));
}

TEST_CASE("csv") {
    Eigen::VectorXd a(2), b(2);
    a << 1.0, 0.1;
    b << -2.5, 1.0 / 3.0;
    CHECK(csv_table({"s", "psi"}, {a, b}) == "s,psi\n1,-2.5\n0.1,0.333333333333333\n");
    CHECK_THROWS_AS(csv_table({"s"}, {a, b}), DomainError);
    CHECK_THROWS_AS(csv_table({"s", "t"}, {a, Eigen::VectorXd(3)}), DomainError);

    Plot p{"phi", "Phi", "s", "value", {{"a", {0.0, 1.0}, {2.0, 3.0}}, {"b", {0.0, 1.0}, {4.0, 5.0}}}};
    CHECK(render_csv(p) == "s,a,b\n0,2,4\n1,3,5\n");
    p.series[1].x = {0.0, 2.0};
    CHECK_THROWS_AS(render_csv(p), DomainError);
}

TEST_CASE("plots") {
    Plot p{"phi", "Phi & <friends>", "s", "Phi", {{"Phi", {0.0, 1.0, 2.0}, {1.0, 2.0, std::nan("")}}}};
    const Plot q = plot_from_json(Json::parse(dump_json(plot_to_json(p))));
    CHECK(q.name == "phi");
    CHECK(q.title == p.title);
    REQUIRE(q.series.size() == 1);
    CHECK(q.series[0].x == p.series[0].x);
    CHECK(std::isnan(q.series[0].y[2]));

    const std::string svg = render_svg(p);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("Phi &amp; &lt;friends&gt;") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(render_svg(p) == svg);

    CHECK_THROWS_AS(plot_from_json(Json::parse(R"({"name": "x", "series": [{"x": [1], "y": []}]})")), DomainError);
    CHECK_THROWS_AS(plot_from_json(Json::parse(R"({"series": []})")), DomainError);
}

TEST_CASE("result serialization") {
    const Json c = to_json(interaction_constants());
    CHECK(c.at("cbar_sq").get<double>() == interaction_constants().cbar_sq);
    CHECK(c.contains("c0_error"));
    SpectrumReport r;
    r.neg_count = 1;
    r.pos_count = 4;
    const Json rj = to_json(r);
    CHECK(rj.at("index") == 1);
    CHECK(rj.at("nullity") == 0);
    CHECK(rj.at("positive") == 4);
}
