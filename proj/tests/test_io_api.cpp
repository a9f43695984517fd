#include <sstream>

#include <gtest/gtest.h>

#include "ratiodelay/api.hpp"

using namespace ratiodelay;
using nlohmann::json;

namespace {

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Validation;
}

}  // namespace

TEST(ParamsJson, RoundTrip) {
  for (const ModelParams& p : {paper_example(13, 1), paper_example(7, std::nullopt)}) {
    const json j = io::to_json(p);
    const ModelParams back = io::params_from_json(j);
    EXPECT_EQ(io::to_json(back), j);
  }
  const json j = io::to_json(paper_example(13, std::nullopt));
  EXPECT_TRUE(j.at("alpha").is_null());
  EXPECT_EQ(j.at("predators").size(), 2u);
  EXPECT_EQ(j.at("predators")[0].at("kind"), "holling");
}

TEST(ParamsJson, ValidationErrors) {
  json good = io::to_json(paper_example());
  auto broken = [&](auto mutate) {
    json j = good;
    mutate(j);
    return code_of([&] { io::params_from_json(j); });
  };
  EXPECT_EQ(broken([](json& j) { j.erase("r"); }), ErrorCode::Validation);
  EXPECT_EQ(broken([](json& j) { j["K"] = "big"; }), ErrorCode::Validation);
  EXPECT_EQ(broken([](json& j) { j["r"] = -1; }), ErrorCode::Validation);
  EXPECT_EQ(broken([](json& j) { j["alpha"] = 0; }), ErrorCode::Validation);
  EXPECT_EQ(broken([](json& j) { j["predators"] = json::array(); }), ErrorCode::Validation);
  EXPECT_EQ(broken([](json& j) { j["predators"][0]["kind"] = "beddington"; }), ErrorCode::Validation);
  EXPECT_EQ(broken([](json& j) { j["predators"][0].erase("d"); }), ErrorCode::Validation);
  EXPECT_EQ(code_of([] { io::params_from_json(json::array()); }), ErrorCode::Validation);
}

TEST(ParamsJson, KindDefaultsToHolling) {
  json j = io::to_json(paper_example());
  j["predators"][1].erase("kind");
  EXPECT_EQ(io::params_from_json(j).predators[1].response.kind, ResponseKind::Holling);
}

TEST(Csv, Headers) {
  const ModelParams p = paper_example(13, 1);
  const Trajectory t = api::run_simulation(p, api::SimulateOptions{1.0, 0.5});
  EXPECT_EQ(first_line(io::to_csv(t)), "t,x,y1,y2,q");
  EXPECT_EQ(first_line(io::to_csv(api::hcurve_scan(p, {0.1, 10, 5}))), "alpha,H,abscissa,stable");
  EXPECT_EQ(first_line(io::to_csv(prey_nullcline_sample(p, {1e-4, 0.05, 3}, {1e-4, 0.05, 3}))), "y1,y2,x");
  EXPECT_EQ(first_line(io::to_csv(sweep_parameter(p, SweepParam::R, 6, 13, 3), "r")),
            "r,class,has_equilibrium,A_stable,sign_stable,delay_robust,Ad_stable,a11,abscissa_A,abscissa_Ad,H");
}

TEST(Csv, TrajectoryRowsMatchSamples) {
  const Trajectory t = api::run_simulation(paper_example(13, std::nullopt), api::SimulateOptions{2.0, 0.5});
  const std::string csv = io::to_csv(t);
  EXPECT_EQ(first_line(csv), "t,x,y1,y2");
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), t.times.size() + 1);
}

TEST(Api, EnvelopeKeys) {
  const ModelParams p = paper_example(13, 1);
  const json eq = api::equilibrium_response(p);
  EXPECT_TRUE(eq.contains("params"));
  EXPECT_TRUE(eq.contains("applicability"));
  EXPECT_TRUE(eq.at("applicability").at("has_equilibrium").get<bool>());
  EXPECT_NEAR(eq.at("equilibrium").at("x_star").get<double>(), 0.1 * (1 - 5.0 / 13), 1e-15);
  EXPECT_TRUE(api::jacobian_response(p).contains("jacobian"));
  const json st = api::stability_response(p);
  EXPECT_TRUE(st.at("report").at("main3_conditions").at("delay_robust").get<bool>());
  EXPECT_EQ(st.at("report").at("stability_Ad"), "stable");
}

TEST(Api, NoEquilibriumIsReported) {
  EXPECT_EQ(code_of([] { api::stability_response(paper_example(5, 1)); }), ErrorCode::NoPositiveEquilibrium);
  EXPECT_EQ(code_of([] { api::equilibrium_response(paper_example(3, 1)); }), ErrorCode::NoPositiveEquilibrium);
  const json nc = api::nullcline_response(paper_example(3, 1), api::NullclineOptions::defaults(paper_example(3, 1)));
  EXPECT_FALSE(nc.at("applicability").at("has_equilibrium").get<bool>());
}

TEST(Api, StatusAndErrorBody) {
  EXPECT_EQ(api::http_status(ErrorCode::Validation), 400);
  EXPECT_EQ(api::http_status(ErrorCode::Domain), 400);
  EXPECT_EQ(api::http_status(ErrorCode::UnsupportedDimension), 400);
  EXPECT_EQ(api::http_status(ErrorCode::NoPositiveEquilibrium), 422);
  EXPECT_EQ(api::http_status(ErrorCode::NumericFailure), 500);
  EXPECT_EQ(api::http_status(ErrorCode::BudgetExceeded), 408);
  const json body = api::error_body(Error(ErrorCode::Domain, "cond", "bad"));
  EXPECT_EQ(body.at("code"), "domain");
  EXPECT_EQ(body.at("paper_condition"), "cond");
  EXPECT_EQ(body.at("message"), "bad");
}

TEST(Api, SimulateOptions) {
  const json body = {{"t_end", 5}, {"dt", 0.1}, {"initial", {{"x", 0.05}, {"y", {0.01, 0.02}}}}};
  const auto o = api::SimulateOptions::from_json(body, 2);
  EXPECT_EQ(o.t_end, 5);
  ASSERT_TRUE(o.initial.has_value());
  EXPECT_FALSE(o.initial->q.has_value());
  EXPECT_EQ(o.sample_count(), 52u);
  const json out = api::simulate_response(paper_example(13, 1), o);
  EXPECT_EQ(out.at("trajectory").at("states")[0].size(), 4u);
  EXPECT_TRUE(out.at("oscillation").at("heuristic").get<bool>());
  EXPECT_EQ(code_of([] { api::SimulateOptions::from_json({{"initial", {{"x", 1}, {"y", {1}}}}}, 2); }),
            ErrorCode::Validation);
  EXPECT_EQ(code_of([] { api::SimulateOptions::from_json({{"dt", "x"}}, 2); }), ErrorCode::Validation);
}

TEST(Api, SimulateSampleCap) {
  api::SimulateOptions o;
  o.t_end = 1000;
  o.dt = 0.01;
  EXPECT_EQ(code_of([&] { o.sample_count(); }), ErrorCode::Validation);
  o.dt = 0.0101;
  EXPECT_NO_THROW(o.sample_count());
  o.dt = 0;
  EXPECT_EQ(code_of([&] { o.sample_count(); }), ErrorCode::Validation);
}

TEST(Api, HCurveOptions) {
  const auto o = api::HCurveOptions::from_json({{"alpha_min", 0.5}, {"points", 7}});
  EXPECT_EQ(o.alpha_min, 0.5);
  EXPECT_EQ(o.alpha_max, 100.0);
  EXPECT_EQ(o.points, 7u);
  EXPECT_EQ(code_of([] { api::HCurveOptions::from_json({{"points", 2.5}}); }), ErrorCode::Validation);
  EXPECT_EQ(code_of([] { api::HCurveOptions::from_json({{"points", 1e6}}); }), ErrorCode::Validation);
  const json r = api::hcurve_response(paper_example(7, 1), {1, 10, 10});
  EXPECT_EQ(r.at("scan").at("alphas").size(), 10u);
  EXPECT_EQ(r.at("scan").at("switch_points").size(), 1u);
}

TEST(Api, NullclineOptions) {
  const ModelParams p = paper_example();
  const auto o = api::NullclineOptions::from_json({{"y1", {{"count", 4}}}}, p);
  EXPECT_EQ(o.y1.count, 4u);
  EXPECT_EQ(o.y2.count, 21u);
  EXPECT_EQ(code_of([&] { api::NullclineOptions::from_json({{"y1", {{"count", 300}}}, {"y2", {{"count", 300}}}}, p); }),
            ErrorCode::Validation);
  const json out = api::nullcline_response(p, o);
  EXPECT_EQ(out.at("nullcline").at("cells").size(), 4u * 21u);
}

TEST(Api, PresetsAndOverrides) {
  const json all = api::presets();
  ASSERT_TRUE(all.contains("paper-example"));
  EXPECT_EQ(all.at("paper-example").at("r"), 13.0);
  const ModelParams p = api::params_from_request({{"preset", "paper-example"}, {"r", 7}, {"alpha", nullptr}});
  EXPECT_EQ(p.r, 7.0);
  EXPECT_FALSE(p.alpha.has_value());
  EXPECT_EQ(p.n(), 2u);
  EXPECT_EQ(code_of([] { api::params_from_request({{"preset", "nope"}}); }), ErrorCode::Validation);
  EXPECT_EQ(code_of([] { api::params_from_request(json::array()); }), ErrorCode::Validation);
  const ModelParams direct = api::params_from_request(io::to_json(paper_example(9, 2)));
  EXPECT_EQ(direct.r, 9.0);
  EXPECT_EQ(*direct.alpha, 2.0);
}

TEST(Api, SchemaListsEveryEndpoint) {
  const json s = api::schema();
  for (const char* path : {"/api/equilibrium", "/api/jacobian", "/api/stability", "/api/hcurve", "/api/simulate",
                           "/api/nullcline", "/api/presets", "/api/schema"}) {
    EXPECT_TRUE(s.at("paths").contains(path)) << path;
  }
}

TEST(Sweep, PresetClassesAcrossR) {
  const ModelParams base = paper_example();
  auto cls = [&](double r) { return sweep_row([&] { ModelParams p = base; p.r = r; return p; }(), r).classification; };
  EXPECT_EQ(cls(4), "none");
  EXPECT_EQ(cls(5), "none");
  EXPECT_EQ(cls(6), "stable");
  EXPECT_EQ(cls(7.9), "stable");
  EXPECT_EQ(cls(8), "sign-stable");
  EXPECT_EQ(cls(12), "sign-stable");
  EXPECT_EQ(cls(12.1), "delay-robust");
  EXPECT_EQ(cls(20), "delay-robust");
}

TEST(Sweep, RowsAndJson) {
  const auto rows = sweep_parameter(paper_example(7), SweepParam::Alpha, 1, 10, 4);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows.front().value, 1.0);
  EXPECT_EQ(rows.back().value, 10.0);
  EXPECT_FALSE(*rows.front().ad_stable);
  EXPECT_TRUE(*rows.back().ad_stable);
  const json j = io::to_json(rows.front());
  EXPECT_EQ(j.at("class"), "stable");
  EXPECT_NEAR(j.at("H").get<double>(), -1584, 1e-9);
  EXPECT_EQ(code_of([] { sweep_parameter(paper_example(), SweepParam::R, 1, 2, 0); }), ErrorCode::Validation);
  EXPECT_EQ(sweep_value(3, 9, 1, 0), 3.0);
}

TEST(Sweep, BifurcateDocument) {
  const json d = api::bifurcate_response(paper_example(), "K", 0.05, 0.2, 3);
  EXPECT_EQ(d.at("sweep").at("param"), "K");
  EXPECT_EQ(d.at("rows").size(), 3u);
  EXPECT_EQ(code_of([] { api::sweep_param_from("m"); }), ErrorCode::Validation);
}
