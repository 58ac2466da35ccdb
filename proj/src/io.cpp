#include "membership/io.hpp"

#include <fstream>
#include <sstream>

#include "membership/error.hpp"

namespace membership {

namespace {

const Json& field(const Json& j, const std::string& name, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  const auto it = j.find(name);
  if (it == j.end()) throw ParseError(where + ": missing field \"" + name + "\"");
  return *it;
}

std::string join(const std::string& where, const std::string& name) {
  return where.empty() ? name : where + "." + name;
}

std::string indexed(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

Json cd_json(cd c) { return Json::array({c.real(), c.imag()}); }

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool is_poly_object(const Json& j) { return j.is_object() && j.contains("terms"); }

}  // namespace

Json poly_to_json(const Poly& p) {
  Json terms = Json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back({{"coeff", to_string(c)}, {"exps", e}});
  return {{"terms", terms}};
}

Poly poly_from_json(const Json& j, const std::vector<std::string>& vars, const std::string& where) {
  const Json& terms = field(j, "terms", where);
  if (!terms.is_array()) throw ParseError(join(where, "terms") + ": expected an array");
  Poly p(vars);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string tw = indexed(join(where, "terms"), t);
    const Json& coeff = field(terms[t], "coeff", tw);
    if (!coeff.is_string()) throw ParseError(tw + ".coeff: expected a rational string such as \"3/4\"");
    GaussRational c;
    try {
      c = parse_gauss_rational(coeff.get<std::string>());
    } catch (const Error& e) {
      throw ParseError(tw + ".coeff: " + e.what());
    }
    const Json& exps = field(terms[t], "exps", tw);
    if (!exps.is_array() || exps.size() != vars.size()) {
      throw ParseError(tw + ".exps: expected " + std::to_string(vars.size()) + " exponents");
    }
    Exponents e;
    for (const auto& x : exps) {
      if (!x.is_number_integer() || x.get<long long>() < 0) {
        throw ParseError(tw + ".exps: exponents must be non-negative integers");
      }
      e.push_back(x.get<unsigned>());
    }
    p.add_term(e, c);
  }
  return p;
}

Json complex_poly_to_json(const ComplexPoly& p) {
  Json terms = Json::array();
  for (const auto& [e, c] : p.terms) terms.push_back({{"coeff", cd_json(c)}, {"exps", e}});
  return {{"terms", terms}};
}

ComplexPoly complex_poly_from_json(const Json& j, const std::vector<std::string>& vars, const std::string& where) {
  ComplexPoly p;
  p.vars = vars;
  const Json& terms = field(j, "terms", where);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string tw = indexed(join(where, "terms"), t);
    const Json& c = field(terms[t], "coeff", tw);
    const Json& e = field(terms[t], "exps", tw);
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
      throw ParseError(tw + ".coeff: expected [re, im]");
    }
    if (!e.is_array() || e.size() != vars.size()) throw ParseError(tw + ".exps: wrong length");
    p.terms[e.get<Exponents>()] += cd(c[0].get<double>(), c[1].get<double>());
  }
  return p;
}

AffineSystem system_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("system: expected a JSON object");
  AffineSystem sys;
  const Json& vars = field(j, "vars", "system");
  if (!vars.is_array() || vars.empty()) throw ParseError("vars: expected a non-empty array of names");
  for (const auto& v : vars) {
    if (!v.is_string() || v.get<std::string>().empty()) throw ParseError("vars: names must be non-empty strings");
    sys.vars.push_back(v.get<std::string>());
  }
  const Json& gens = field(j, "generators", "system");
  if (!gens.is_array() || gens.empty()) throw ParseError("generators: expected a non-empty array");
  const Json& target = field(j, "target", "system");

  const bool module = gens.front().is_array();
  if (module) {
    for (std::size_t r = 0; r < gens.size(); ++r) {
      if (!gens[r].is_array()) throw ParseError(indexed("generators", r) + ": expected a row of polynomials");
      std::vector<Poly> row;
      for (std::size_t c = 0; c < gens[r].size(); ++c) {
        row.push_back(poly_from_json(gens[r][c], sys.vars, indexed(indexed("generators", r), c)));
      }
      sys.F.push_back(std::move(row));
    }
    if (!target.is_array()) throw ParseError("target: a module system needs one polynomial per row");
    for (std::size_t r = 0; r < target.size(); ++r) {
      sys.phi.push_back(poly_from_json(target[r], sys.vars, indexed("target", r)));
    }
  } else {
    std::vector<Poly> row;
    for (std::size_t c = 0; c < gens.size(); ++c) row.push_back(poly_from_json(gens[c], sys.vars, indexed("generators", c)));
    sys.F.push_back(std::move(row));
    if (is_poly_object(target)) {
      sys.phi.push_back(poly_from_json(target, sys.vars, "target"));
    } else if (target.is_array() && target.size() == 1) {
      sys.phi.push_back(poly_from_json(target[0], sys.vars, "target[0]"));
    } else {
      throw ParseError("target: expected a polynomial object");
    }
  }
  if (j.contains("nu_inf")) {
    if (!j["nu_inf"].is_string()) throw ParseError("nu_inf: expected a rational string such as \"3/2\"");
    try {
      sys.nu_inf = parse_rational(j["nu_inf"].get<std::string>());
    } catch (const Error& e) {
      throw ParseError(std::string("nu_inf: ") + e.what());
    }
  }
  if (j.contains("degrees")) {
    const Json& d = j["degrees"];
    if (!d.is_array()) throw ParseError("degrees: expected an array of integers");
    for (const auto& x : d) {
      if (!x.is_number_integer()) throw ParseError("degrees: expected integers");
      sys.declared_degrees.push_back(x.get<int>());
    }
  }
  try {
    sys.validate();
    (void)sys.column_degrees();
  } catch (const ArgumentError& e) {
    throw ParseError(std::string("system: ") + e.what());
  }
  return sys;
}

Json system_to_json(const AffineSystem& sys) {
  Json j;
  j["vars"] = sys.vars;
  if (sys.r() == 1) {
    Json gens = Json::array();
    for (const auto& p : sys.F.front()) gens.push_back(poly_to_json(p));
    j["generators"] = gens;
    j["target"] = poly_to_json(sys.phi.front());
  } else {
    Json rows = Json::array();
    for (const auto& row : sys.F) {
      Json r = Json::array();
      for (const auto& p : row) r.push_back(poly_to_json(p));
      rows.push_back(r);
    }
    j["generators"] = rows;
    Json t = Json::array();
    for (const auto& p : sys.phi) t.push_back(poly_to_json(p));
    j["target"] = t;
  }
  if (sys.nu_inf) j["nu_inf"] = to_string(*sys.nu_inf);
  if (!sys.declared_degrees.empty()) j["degrees"] = sys.declared_degrees;
  return j;
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(path + ": invalid JSON: " + e.what());
  }
}

AffineSystem load_system(const std::string& path) {
  try {
    return system_from_json(load_json(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string system_hash(const AffineSystem& sys) {
  std::ostringstream os;
  os << std::hex << fnv1a(system_to_json(sys).dump());
  return os.str();
}

Json profile_to_json(const SystemProfile& p) {
  Json j{{"n", p.n}, {"m", p.m}, {"r", p.r}, {"degrees", p.degrees}, {"deg_phi", p.deg_phi}};
  j["nu_inf"] = p.nu_inf ? Json(to_string(*p.nu_inf)) : Json(nullptr);
  return j;
}

Json bound_report_to_json(const BoundReport& r, const SystemProfile& p) {
  Json terms = Json::object();
  Json order = Json::array();
  for (const auto& [name, value] : r.formula_terms) {
    terms[name] = to_string(value);
    order.push_back(name);
  }
  Json j{{"theorem", to_string(r.theorem)},
         {"rho", r.rho},
         {"N_ko", kollar_N(p).get_str()},
         {"N_hi", to_string(hickel_N(p))},
         {"terms", terms},
         {"term_order", order},
         {"solvable_globally", r.solvable_globally},
         {"kollar_degree_two_caveat", r.kollar_degree_two_caveat},
         {"nu_source", r.nu_source},
         {"profile", profile_to_json(p)}};
  return j;
}

Json certificate_to_json(const Certificate& c, const AffineSystem& sys) {
  Json j;
  j["format"] = kCertificateFormat;
  j["tool_version"] = kToolVersion;
  j["mode"] = c.mode == CertificateMode::kExact ? "exact" : "numeric";
  j["rho"] = c.rho;
  j["theorem"] = c.theorem ? Json(to_string(*c.theorem)) : Json(nullptr);
  j["vars"] = sys.vars;
  j["system_hash"] = system_hash(sys);
  j["profile"] = profile_to_json(sys.profile());
  Json Q = Json::array();
  if (c.mode == CertificateMode::kExact) {
    for (const auto& q : c.Q) Q.push_back(poly_to_json(q.embed(union_vars(sys.vars, q.vars()))));
    if (!c.q.empty()) {
      j["homogeneous_vars"] = c.q.front().vars();
      Json qh = Json::array();
      for (const auto& q : c.q) qh.push_back(poly_to_json(q.embed(c.q.front().vars())));
      j["q"] = qh;
    }
  } else {
    for (const auto& q : c.Q_numeric) Q.push_back(complex_poly_to_json(q));
  }
  j["Q"] = Q;
  if (c.residual) {
    j["residual"] = {{"max_abs", c.residual->max_abs},
                     {"max_abs_target", c.residual->max_abs_target},
                     {"samples", c.residual->samples}};
  }
  if (c.mode == CertificateMode::kExact) {
    j["audit"] = {{"unknowns", c.unknowns}, {"equations", c.equations}, {"rank", c.rank}, {"unique", c.unique()}};
  }
  return j;
}

Certificate certificate_from_json(const Json& j, const AffineSystem& sys) {
  const std::string w = "certificate";
  if (!j.is_object()) throw ParseError(w + ": expected a JSON object");
  const Json& format = field(j, "format", w);
  if (format != kCertificateFormat) throw ParseError(w + ": unsupported format " + format.dump());
  const Json& hash = field(j, "system_hash", w);
  if (hash != system_hash(sys)) throw ArgumentError("certificate was issued for a different system");
  Certificate c;
  const std::string mode = field(j, "mode", w).get<std::string>();
  if (mode != "exact" && mode != "numeric") throw ParseError(w + ".mode: expected \"exact\" or \"numeric\"");
  c.mode = mode == "exact" ? CertificateMode::kExact : CertificateMode::kNumeric;
  c.rho = field(j, "rho", w).get<long>();
  if (j.contains("theorem") && !j["theorem"].is_null()) c.theorem = parse_theorem(j["theorem"].get<std::string>());
  const Json& Q = field(j, "Q", w);
  if (!Q.is_array() || static_cast<int>(Q.size()) != sys.m()) {
    throw ParseError(w + ".Q: expected " + std::to_string(sys.m()) + " cofactors");
  }
  for (std::size_t i = 0; i < Q.size(); ++i) {
    if (c.mode == CertificateMode::kExact) {
      c.Q.push_back(poly_from_json(Q[i], sys.vars, indexed(w + ".Q", i)));
    } else {
      c.Q_numeric.push_back(complex_poly_from_json(Q[i], sys.vars, indexed(w + ".Q", i)));
    }
  }
  if (j.contains("audit")) {
    const Json& a = j["audit"];
    c.unknowns = a.value("unknowns", std::size_t{0});
    c.equations = a.value("equations", std::size_t{0});
    c.rank = a.value("rank", std::size_t{0});
  }
  return c;
}

Json infeasible_to_json(const Infeasible& inf) {
  Json checks = Json::array();
  for (const auto& h : inf.checklist) checks.push_back({{"name", h.name}, {"status", h.status}, {"detail", h.detail}});
  return {{"status", "infeasible"},
          {"rho", inf.rho},
          {"unknowns", inf.unknowns},
          {"equations", inf.equations},
          {"rank", inf.rank},
          {"hypotheses", checks}};
}

Json verification_to_json(const VerificationReport& r) {
  Json j{{"max_degree", r.max_degree}, {"bound_satisfied", r.bound_satisfied}};
  if (!r.residual) j["exact_equality"] = r.exact_equality;
  if (r.residual) {
    j["residual"] = {{"max_abs", r.residual->max_abs},
                     {"max_abs_target", r.residual->max_abs_target},
                     {"samples", r.residual->samples}};
  }
  return j;
}

Json hefer_to_json(const HeferTable& t) {
  Json h = Json::array();
  for (const auto& row : t.h) {
    Json r = Json::array();
    for (const auto& p : row) r.push_back(poly_to_json(p.embed(t.joint_vars())));
    h.push_back(r);
  }
  return {{"base_vars", t.base_vars}, {"joint_vars", t.joint_vars()}, {"degrees", t.degrees},
          {"two_pi_i_power", t.two_pi_i_power}, {"h", h}};
}

Json integral_certificate_to_json(const IntegralCertificate& c, const AffineSystem& sys) {
  Json j = certificate_to_json(c.cert, sys);
  j["eps"] = c.eps ? Json(*c.eps) : Json(nullptr);
  j["max_std_error"] = c.max_std_error;
  Json est = Json::array();
  for (std::size_t i = 0; i < c.coefficients.size(); ++i) {
    Json row = Json::array();
    for (std::size_t s = 0; s < c.coefficients[i].size(); ++s) {
      const auto& e = c.coefficients[i][s];
      row.push_back({{"exps", c.monomials[i][s]},
                     {"value", cd_json(e.value)},
                     {"std_error", e.std_error},
                     {"samples", e.samples_used},
                     {"rejected", e.rejected}});
    }
    est.push_back(row);
  }
  j["homogeneous_vars"] = c.homogeneous_vars;
  j["estimates"] = est;
  Json prox = Json::array();
  for (const auto& p : c.proximity) {
    prox.push_back({{"monomial", p.monomial}, {"value", cd_json(p.value)}, {"nearest", p.nearest}, {"distance", p.distance}});
  }
  j["rational_proximity"] = prox;
  Json audit{{"exact_feasible", c.audit.exact_feasible},
             {"unique", c.audit.unique},
             {"unknowns", c.audit.unknowns},
             {"rank", c.audit.rank}};
  audit["max_coeff_diff"] = c.audit.max_coeff_diff ? Json(*c.audit.max_coeff_diff) : Json(nullptr);
  j["uniqueness_audit"] = audit;
  return j;
}

}  // namespace membership
