#pragma once

// JSON shapes of the library's result types. Key order is fixed
// (ordered_json) so identical inputs give byte-identical documents.

#include <string>

#include <json.hpp>

#include "cloglin/causal.hpp"
#include "cloglin/hypothesis.hpp"
#include "cloglin/loglin_fit.hpp"
#include "cloglin/oracle.hpp"
#include "cloglin/report.hpp"

namespace cloglin {

using Json = nlohmann::ordered_json;

inline std::string model_name(const ModelSpec& spec) { return spec.with_three_way() ? "saturated" : "two-way"; }

inline Json to_json(const NoCausalParams& p) {
  Json additive = Json::object();
  Json multiplicative = Json::object();
  for (VarSet t : kTermOrder) {
    additive[t.name()] = p.lambda(t);
    multiplicative[t.name()] = p.mu(t);
  }
  return Json{{"additive", additive}, {"multiplicative", multiplicative}};
}

inline Json to_json(const FitResult& fit) {
  Json terms = Json::array({"eta"});
  for (VarSet t : fit.spec.terms()) terms.push_back(t.name());
  Json cov = Json::array();
  for (Eigen::Index i = 0; i < fit.covariance.rows(); ++i)
    for (Eigen::Index j = 0; j < fit.covariance.cols(); ++j) cov.push_back(fit.covariance(i, j));

  Json out = to_json(fit.params);
  out["fitted_counts"] = fit.fitted_counts;
  out["covariance_terms"] = terms;
  out["covariance"] = cov;
  out["deviance"] = fit.deviance;
  out["iterations"] = fit.iterations;
  out["converged"] = fit.converged;
  out["model"] = model_name(fit.spec);
  return out;
}

inline Json to_json(const NormalizationFactors& f) {
  return Json{{"Xc", f.x_c},
              {"Z|X=0", f.z_given_x[0]},
              {"Z|X=1", f.z_given_x[1]},
              {"Y|X=0,Z=0", f.y_given_xz[0][0]},
              {"Y|X=0,Z=1", f.y_given_xz[0][1]},
              {"Y|X=1,Z=0", f.y_given_xz[1][0]},
              {"Y|X=1,Z=1", f.y_given_xz[1][1]}};
}

inline Json to_json(const CausalParams& cp) {
  Json out{{"Xc", cp.x_c}, {"Zc", cp.z_c}, {"XZc", cp.xz_c}, {"Y", cp.y},
           {"XY", cp.xy},  {"ZY", cp.zy},  {"XZY", cp.xzy}, {"with_interaction", cp.with_interaction}};
  Json log_form = Json::object();
  for (const char* key : {"Xc", "Zc", "XZc", "Y", "XY", "ZY", "XZY"}) log_form[key] = std::log(out[key].get<double>());
  out["additive"] = log_form;
  out["eta"] = to_json(eta_factors(cp));
  return out;
}

inline Json to_json(const EffectsReport& r) {
  return Json{{"TE", r.te},
              {"LDE", {{"z0", r.lde[0]}, {"z1", r.lde[1]}}},
              {"cell", {{"z0", r.cell[0]}, {"z1", r.cell[1]}}},
              {"IE", r.ie},
              {"IE_reverse", r.ie_reverse},
              {"NDE", r.nde},
              {"additive_interaction", r.additive_interaction},
              {"multiplicative_interaction", r.multiplicative_interaction},
              {"decomposition_residual", r.decomposition_residual},
              {"direction", {{"from", r.direction.from}, {"to", r.direction.to}}}};
}

inline Json to_json(const OracleReport& r) {
  Json out = to_json(static_cast<const EffectsReport&>(r));
  out["source"] = "oracle";
  return out;
}

inline Json to_json(const TestResult& t) {
  return Json{{"beta_hat", t.beta_hat}, {"se", t.se}, {"z", t.z}, {"p", t.p_two_sided}, {"constraint", t.combination}};
}

inline Json to_json(const LinearityReport& r) {
  return Json{{"bond1_residual", r.bond1_residual},
              {"bond2_residual", r.bond2_residual},
              {"bond1_test", r.bond1_test ? to_json(*r.bond1_test) : Json(nullptr)}};
}

}  // namespace cloglin
