#include "bhc/report.hpp"

#include <cstdio>
#include <ostream>

namespace bhc {

namespace {

Json vec_json(const Vec4& v) { return Json::array({v[0], v[1], v[2], v[3]}); }

// Non-finite doubles have no JSON literal; they become strings.
Json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

}  // namespace

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

Json grid_json(const GridSpec& g) {
  Json j;
  j["sequence"] = GridSpec::sequence;
  j["count"] = g.count;
  j["radius"] = g.radius;
  j["exclusion"] = g.exclusion;
  j["seed"] = g.seed;
  return j;
}

Json to_json(const ResidualReport& r, double tolerance) {
  Json j;
  j["equation"] = to_string(r.equation);
  Json params = Json::object();
  for (const auto& [k, v] : r.params) params[k] = number(v);
  j["params"] = params;
  j["grid"] = grid_json(r.grid);
  j["n_points"] = r.n_points();
  j["excluded"] = r.excluded;
  j["sup"] = number(r.sup);
  j["rms"] = number(r.rms);
  j["sup_sci"] = sci(r.sup);
  j["rms_sci"] = sci(r.rms);
  j["tolerance"] = tolerance;
  j["verdict"] = r.sup < tolerance && r.n_points() > 0 ? "pass" : "fail";
  return j;
}

void write_per_point_csv(std::ostream& os, const ResidualReport& r) {
  os << "index,residual\n";
  for (std::size_t i = 0; i < r.per_point.size(); ++i) os << i << ',' << Json(r.per_point[i]).dump() << '\n';
}

Json to_json(const MobiusTransform& T) {
  Json j;
  j["eps"] = T.eps;
  j["alpha"] = T.alpha;
  j["t_out"] = vec_json(T.t_out);
  j["t_in"] = vec_json(T.t_in);
  Json q = Json::array();
  for (std::size_t i = 0; i < 4; ++i) q.push_back(vec_json(T.Q.rows[i]));
  j["Q"] = q;
  j["literal"] = T.to_literal();
  return j;
}

Json to_json(const Verdict& v) {
  Json j;
  j["verdict"] = to_string(v.classification);
  j["numerical"] = to_string(v.numerical);
  j["corroborated"] = v.corroborated();
  j["reason"] = v.reason;
  Json e;
  e["bfo_sup"] = number(v.bfo_sup);
  e["bfo_sup_sci"] = sci(v.bfo_sup);
  e["tension_max"] = number(v.tension_max);
  e["factor_range"] = number(v.factor_range);
  if (v.fit) {
    e["A_fit"] = number(v.fit->value);
    e["A_fit_residual"] = number(v.fit->fit_residual);
  }
  j["evidence"] = e;
  if (v.normal_form) {
    Json nf;
    nf["delta"] = v.normal_form->delta;
    nf["e"] = vec_json(v.normal_form->e);
    j["normal_form"] = nf;
  }
  return j;
}

Json to_json(const RadialProfile& p) {
  Json j;
  j["tag"] = to_string(p.tag);
  if (p.tag == ProfileTag::s4_axisym) j["k"] = p.k;
  if (p.tag == ProfileTag::torus_1d) {
    j["a"] = p.a;
    j["A"] = p.A;
  }
  j["intervals"] = p.intervals();
  j["iterations"] = p.iterations;
  j["residual_sup"] = number(p.residual_sup);
  j["residual_sup_sci"] = sci(p.residual_sup);
  j["grid"] = p.grid;
  j["values"] = p.values;
  return j;
}

void write_profile_csv(std::ostream& os, const RadialProfile& p) {
  os << "coordinate,value\n";
  for (std::size_t i = 0; i < p.values.size(); ++i)
    os << Json(p.grid[i]).dump() << ',' << Json(p.values[i]).dump() << '\n';
}

Json summary_json(const BranchPoint& b) {
  Json j;
  j["k"] = b.k;
  j["arclength"] = b.arclength;
  j["amplitude"] = b.amplitude;
  j["gradient_energy"] = b.gradient_energy;
  j["residual"] = number(b.residual);
  j["residual_sci"] = sci(b.residual);
  j["iterations"] = b.iterations;
  const auto& v = b.profile.values;
  j["min"] = *std::min_element(v.begin(), v.end());
  j["max"] = *std::max_element(v.begin(), v.end());
  j["u_north"] = v.front();
  j["u_south"] = v.back();
  return j;
}

Json to_json(const RadialSolution& s) {
  Json j;
  j["delta"] = s.delta;
  j["bubble_error"] = s.bubble_error;
  j["bubble_error_sci"] = sci(s.bubble_error);
  j["far_field_defect"] = s.far_field_defect;
  j["profile"] = to_json(s.profile);
  return j;
}

Json to_json(const TorusResult& t) {
  Json j;
  j["converged"] = t.converged;
  j["status"] = t.status;
  j["multiplier"] = t.multiplier;
  j["obstruction"] = t.obstruction;
  Json h = Json::array();
  for (const auto& it : t.history) {
    Json r;
    r["iteration"] = it.iteration;
    r["residual_sup"] = it.residual_sup;
    r["second_difference_integral"] = it.second_difference_integral;
    r["cube_integral"] = it.cube_integral;
    r["multiplier"] = it.multiplier;
    r["min"] = it.min_value;
    h.push_back(r);
  }
  j["history"] = h;
  j["profile"] = to_json(t.profile);
  return j;
}

std::string dump_line(const Json& j) { return j.dump(); }

std::string dump_pretty(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace bhc
