#pragma once

// HTTP routes over the shared API documents. Requests are stateless; each
// handler runs synchronously under its own wall-clock budget.

#include <chrono>
#include <functional>
#include <string>

// Eigen must be seen before httplib: <resolv.h> defines a `_res` macro that
// collides with Eigen parameter names.
#include "ratiodelay/api.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace ratiodelay::server {

using json = nlohmann::json;

struct Options {
  std::chrono::milliseconds budget{10000};
  std::string cors_origin = "*";
};

namespace detail {

inline void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

inline void send_error(httplib::Response& res, const Error& e) { send_json(res, api::http_status(e.code()), api::error_body(e)); }

using Compute = std::function<json(const json& body, const ModelParams& params, const Budget& budget)>;

inline httplib::Server::Handler post_handler(Compute compute, Options opt) {
  return [compute = std::move(compute), opt](const httplib::Request& req, httplib::Response& res) {
    try {
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Validation, "", std::string("malformed JSON: ") + e.what());
      }
      const ModelParams params = api::params_from_request(body);
      const Budget budget(opt.budget);
      send_json(res, 200, compute(body, params, budget));
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const json::exception& e) {
      send_error(res, Error(ErrorCode::Validation, "", e.what()));
    } catch (const std::exception& e) {
      send_error(res, Error(ErrorCode::NumericFailure, "", e.what()));
    }
  };
}

}  // namespace detail

inline void install_routes(httplib::Server& svr, const Options& opt = {}) {
  svr.set_default_headers({{"Access-Control-Allow-Origin", opt.cors_origin},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  svr.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  using detail::post_handler;
  svr.Post("/api/equilibrium", post_handler([](const json&, const ModelParams& p, const Budget&) {
             return api::equilibrium_response(p);
           }, opt));
  svr.Post("/api/jacobian", post_handler([](const json&, const ModelParams& p, const Budget&) {
             return api::jacobian_response(p);
           }, opt));
  svr.Post("/api/stability", post_handler([](const json&, const ModelParams& p, const Budget&) {
             return api::stability_response(p);
           }, opt));
  svr.Post("/api/hcurve", post_handler([](const json& body, const ModelParams& p, const Budget& b) {
             return api::hcurve_response(p, api::HCurveOptions::from_json(body), b);
           }, opt));
  svr.Post("/api/simulate", post_handler([](const json& body, const ModelParams& p, const Budget& b) {
             return api::simulate_response(p, api::SimulateOptions::from_json(body, p.n()), b);
           }, opt));
  svr.Post("/api/nullcline", post_handler([](const json& body, const ModelParams& p, const Budget&) {
             return api::nullcline_response(p, api::NullclineOptions::from_json(body, p));
           }, opt));

  svr.Get("/api/presets", [](const httplib::Request&, httplib::Response& res) {
    detail::send_json(res, 200, api::presets());
  });
  svr.Get("/api/schema", [](const httplib::Request&, httplib::Response& res) {
    detail::send_json(res, 200, api::schema());
  });
  svr.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });
}

}  // namespace ratiodelay::server
