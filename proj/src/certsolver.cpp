#include "membership/certsolver.hpp"

#include <algorithm>
#include <map>

#include "membership/error.hpp"
#include "membership/rng.hpp"

namespace membership {

AffineSystem AffineSystem::ideal(std::vector<Poly> generators, Poly target) {
  if (generators.empty()) throw ArgumentError("at least one generator required");
  std::vector<std::string> vars = target.vars();
  for (const auto& g : generators) vars = union_vars(vars, g.vars());
  AffineSystem sys;
  sys.vars = vars;
  std::vector<Poly> row;
  for (const auto& g : generators) row.push_back(g.embed(vars));
  sys.F.push_back(std::move(row));
  sys.phi.push_back(target.embed(vars));
  return sys;
}

void AffineSystem::validate() const {
  if (vars.empty()) throw ArgumentError("system has no variables");
  if (F.empty() || F.front().empty()) throw ArgumentError("system has no generators");
  if (phi.size() != F.size()) throw ArgumentError("target length does not match generator rows");
  for (const auto& row : F) {
    if (row.size() != F.front().size()) throw ArgumentError("generator matrix rows differ in length");
    for (const auto& p : row) {
      if (p.vars() != vars) throw ArgumentError("generator variables do not match system variables");
    }
  }
  for (const auto& p : phi) {
    if (p.vars() != vars) throw ArgumentError("target variables do not match system variables");
  }
  if (!declared_degrees.empty() && static_cast<int>(declared_degrees.size()) != m()) {
    throw ArgumentError("declared degree count does not match generator count");
  }
  for (int j = 0; j < m(); ++j) {
    bool nonzero = false;
    for (const auto& row : F) nonzero |= !row[static_cast<std::size_t>(j)].is_zero();
    if (!nonzero) throw ArgumentError("generator column " + std::to_string(j + 1) + " is zero");
  }
}

std::vector<int> AffineSystem::column_degrees() const {
  std::vector<int> d(static_cast<std::size_t>(m()), 0);
  for (const auto& row : F) {
    for (std::size_t j = 0; j < row.size(); ++j) d[j] = std::max(d[j], row[j].degree());
  }
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (!declared_degrees.empty()) {
      if (declared_degrees[j] < d[j]) {
        throw ArgumentError("declared degree of generator " + std::to_string(j + 1) +
                            " is below its actual degree");
      }
      d[j] = declared_degrees[j];
    }
    d[j] = std::max(d[j], 1);
  }
  return d;
}

int AffineSystem::deg_phi() const {
  int d = 0;
  for (const auto& p : phi) d = std::max(d, p.degree());
  return d;
}

SystemProfile AffineSystem::profile() const {
  validate();
  return SystemProfile::make(n(), column_degrees(), deg_phi(), nu_inf, r());
}

std::string fresh_homvar(const std::vector<std::string>& vars) {
  std::string name = "z0";
  while (std::find(vars.begin(), vars.end(), name) != vars.end()) name += "_";
  return name;
}

HomogeneousSystem homogenize_system(const AffineSystem& sys, long rho) {
  sys.validate();
  const int dphi = sys.deg_phi();
  if (rho < dphi) throw ArgumentError("rho below deg Phi");
  HomogeneousSystem hs;
  hs.homvar = fresh_homvar(sys.vars);
  hs.degrees = sys.column_degrees();
  hs.rho = rho;
  for (const auto& row : sys.F) {
    std::vector<Poly> hrow;
    for (std::size_t j = 0; j < row.size(); ++j) {
      hrow.push_back(homogenize(row[j], static_cast<unsigned>(hs.degrees[j]), hs.homvar));
    }
    hs.f.push_back(std::move(hrow));
  }
  hs.vars = hs.f.front().front().vars();
  const Poly z0 = Poly::variable(hs.vars, hs.homvar);
  const Poly shift = z0.pow(static_cast<unsigned>(rho - dphi));
  for (const auto& p : sys.phi) hs.psi.push_back(shift * homogenize(p, static_cast<unsigned>(dphi), hs.homvar));
  return hs;
}

std::complex<double> ComplexPoly::operator()(std::span<const std::complex<double>> x) const {
  if (x.size() != vars.size()) throw ArgumentError("evaluation point has wrong length");
  std::complex<double> sum = 0.0;
  for (const auto& [e, c] : terms) {
    std::complex<double> t = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (unsigned k = 0; k < e[i]; ++k) t *= x[i];
    }
    sum += t;
  }
  return sum;
}

namespace {

struct LinearSolve {
  bool feasible = false;
  std::vector<GaussRational> solution;
  std::size_t rank = 0;
};

// Gauss-Jordan elimination on an augmented dense matrix over Q(i). Columns are
// scanned left to right; the pivot is the first remaining row with a nonzero
// entry. Each pivot row is scaled to a unit pivot.
LinearSolve solve_exact(std::vector<std::vector<GaussRational>> rows, std::size_t ncols) {
  LinearSolve out;
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < ncols && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && rows[p][c].is_zero()) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[r], rows[p]);
    const GaussRational inv = GaussRational(1) / rows[r][c];
    for (std::size_t k = c; k <= ncols; ++k) {
      if (!rows[r][k].is_zero()) rows[r][k] *= inv;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c].is_zero()) continue;
      const GaussRational factor = rows[i][c];
      for (std::size_t k = c; k <= ncols; ++k) {
        if (!rows[r][k].is_zero()) rows[i][k] -= factor * rows[r][k];
      }
    }
    pivot_col.push_back(c);
    ++r;
  }
  out.rank = r;
  for (std::size_t i = r; i < rows.size(); ++i) {
    if (!rows[i][ncols].is_zero()) return out;
  }
  out.feasible = true;
  out.solution.assign(ncols, GaussRational{});
  for (std::size_t i = 0; i < r; ++i) out.solution[pivot_col[i]] = rows[i][ncols];
  return out;
}

}  // namespace

CertifyResult certify_module(const AffineSystem& sys, long rho) {
  const HomogeneousSystem hs = homogenize_system(sys, rho);
  const std::size_t nv = hs.vars.size();

  // Unknown layout: column j contributes one unknown per monomial of degree rho - d_j.
  std::vector<std::vector<Exponents>> unknown_monos;
  std::size_t nunknowns = 0;
  for (int d : hs.degrees) {
    const long deg = rho - d;
    unknown_monos.push_back(deg < 0 ? std::vector<Exponents>{}
                                    : monomials_of_degree(nv, static_cast<unsigned>(deg)));
    nunknowns += unknown_monos.back().size();
  }
  const auto eq_monos = monomials_of_degree(nv, static_cast<unsigned>(rho));
  std::map<Exponents, std::size_t, GrlexGreater> eq_index;
  for (std::size_t k = 0; k < eq_monos.size(); ++k) eq_index.emplace(eq_monos[k], k);

  const std::size_t nrows = hs.f.size();
  const std::size_t neq = nrows * eq_monos.size();
  std::vector<std::vector<GaussRational>> rows(neq, std::vector<GaussRational>(nunknowns + 1));
  std::size_t col = 0;
  Exponents prod(nv);
  for (std::size_t j = 0; j < hs.degrees.size(); ++j) {
    for (const auto& mono : unknown_monos[j]) {
      for (std::size_t i = 0; i < nrows; ++i) {
        for (const auto& [e, c] : hs.f[i][j].terms()) {
          for (std::size_t v = 0; v < nv; ++v) prod[v] = e[v] + mono[v];
          rows[i * eq_monos.size() + eq_index.at(prod)][col] += c;
        }
      }
      ++col;
    }
  }
  for (std::size_t i = 0; i < nrows; ++i) {
    for (const auto& [e, c] : hs.psi[i].terms()) rows[i * eq_monos.size() + eq_index.at(e)][nunknowns] = c;
  }

  const LinearSolve sol = solve_exact(std::move(rows), nunknowns);
  if (!sol.feasible) {
    Infeasible inf;
    inf.rho = rho;
    inf.unknowns = nunknowns;
    inf.equations = neq;
    inf.rank = sol.rank;
    return inf;
  }
  Certificate cert;
  cert.rho = rho;
  cert.unknowns = nunknowns;
  cert.equations = neq;
  cert.rank = sol.rank;
  col = 0;
  for (std::size_t j = 0; j < hs.degrees.size(); ++j) {
    Poly qj(hs.vars);
    for (const auto& mono : unknown_monos[j]) qj.add_term(mono, sol.solution[col++]);
    cert.Q.push_back(dehomogenize(qj, hs.homvar));
    cert.q.push_back(std::move(qj));
  }
  return cert;
}

CertifyResult certify_exact(const std::vector<Poly>& F, const Poly& phi, long rho) {
  return certify_module(AffineSystem::ideal(F, phi), rho);
}

std::vector<Hypothesis> hypothesis_checklist(const AffineSystem& sys, Theorem theorem, long rho) {
  const SystemProfile p = sys.profile();
  std::vector<Hypothesis> out;
  out.push_back({"rho_at_least_deg_phi", rho >= p.deg_phi ? "ok" : "violated",
                 "rho = " + std::to_string(rho) + ", deg Phi = " + std::to_string(p.deg_phi)});
  const bool solvable = check_global_solvability(rho, p);
  out.push_back({"global_solvability", solvable ? "ok" : "violated",
                 "m <= n or rho - (d_1 + ... + d_{n+1}) >= -n"});
  switch (theorem) {
    case Theorem::kMacaulayNoether:
      out.push_back({"no_component_at_infinity", "unchecked",
                     "nu_inf taken as 0; requires Z to have no component in the hyperplane at infinity"});
      out.push_back({"target_annihilates_residue", "unchecked",
                     "Phi in the ideal (complete intersection) or empty projective zero set"});
      break;
    case Theorem::kIdeal:
      out.push_back({"integral_closure_power", "unchecked", "|Phi| <= C |F|^min(m,n) locally"});
      break;
    case Theorem::kCompleteIntersection:
      out.push_back({"codimension_at_least_m", "unchecked", "codim {F = 0} >= m"});
      out.push_back({"phi_in_ideal", "unchecked", "Phi in (F_1, ..., F_m)"});
      break;
    case Theorem::kModule:
      out.push_back({"determinantal_codimension", "unchecked", "codim {det F = 0} >= m - r + 1, or ||Phi|| <= C |det F|^min(n, m-r+1) locally"});
      out.push_back({"phi_in_module", "unchecked", "Phi in the module generated by the columns"});
      break;
  }
  out.push_back({"nu_inf_source", p.nu_inf ? "ok" : "unchecked",
                 p.nu_inf ? "user supplied" : "fallback nu_inf <= N_hi"});
  return out;
}

CertifyResult certify_at_bound(const AffineSystem& sys, Theorem theorem) {
  const BoundReport rep = rho_for(theorem, sys.profile());
  CertifyResult res = certify_module(sys, rep.rho);
  if (auto* cert = std::get_if<Certificate>(&res)) {
    cert->theorem = theorem;
  } else {
    std::get<Infeasible>(res).checklist = hypothesis_checklist(sys, theorem, rep.rho);
  }
  return res;
}

std::optional<long> minimal_rho(const AffineSystem& sys, long rho_max) {
  const long lo = sys.deg_phi();
  if (rho_max < lo) throw ArgumentError("rho_max below deg Phi");
  for (long rho = lo; rho <= rho_max; ++rho) {
    if (std::holds_alternative<Certificate>(certify_module(sys, rho))) return rho;
  }
  return std::nullopt;
}

std::optional<long> minimal_rho(const std::vector<Poly>& F, const Poly& phi, long rho_max) {
  return minimal_rho(AffineSystem::ideal(F, phi), rho_max);
}

ResidualStats numeric_residual(const AffineSystem& sys, const std::vector<ComplexPoly>& Q,
                               std::uint64_t seed, std::size_t points) {
  if (static_cast<int>(Q.size()) != sys.m()) throw ArgumentError("cofactor count does not match generators");
  ResidualStats st;
  st.samples = points;
  std::vector<NumericPoly> phi;
  std::vector<std::vector<NumericPoly>> F;
  for (const auto& p : sys.phi) phi.emplace_back(p);
  for (const auto& row : sys.F) {
    F.emplace_back();
    for (const auto& p : row) F.back().emplace_back(p);
  }
  std::vector<std::complex<double>> x(static_cast<std::size_t>(sys.n()));
  for (std::size_t s = 0; s < points; ++s) {
    CounterRng rng(seed, s);
    for (auto& v : x) v = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
    for (std::size_t i = 0; i < F.size(); ++i) {
      std::complex<double> lhs = 0.0;
      for (std::size_t j = 0; j < Q.size(); ++j) lhs += F[i][j](x) * Q[j](x);
      const std::complex<double> target = phi[i](x);
      st.max_abs = std::max(st.max_abs, std::abs(lhs - target));
      st.max_abs_target = std::max(st.max_abs_target, std::abs(target));
    }
  }
  return st;
}

VerificationReport verify_certificate(const AffineSystem& sys, const Certificate& cert, std::uint64_t seed,
                                      std::size_t points) {
  sys.validate();
  VerificationReport rep;
  if (cert.mode == CertificateMode::kNumeric) {
    rep.residual = numeric_residual(sys, cert.Q_numeric, seed, points);
    for (const auto& row : sys.F) {
      for (std::size_t j = 0; j < row.size(); ++j) {
        int dq = -1;
        for (const auto& [e, c] : cert.Q_numeric[j].terms) {
          if (c != 0.0) dq = std::max(dq, static_cast<int>(total_degree(e)));
        }
        if (dq >= 0 && !row[j].is_zero()) rep.max_degree = std::max(rep.max_degree, dq + row[j].degree());
      }
    }
    rep.bound_satisfied = rep.max_degree <= cert.rho;
    return rep;
  }
  if (static_cast<int>(cert.Q.size()) != sys.m()) throw ArgumentError("cofactor count does not match generators");
  rep.exact_equality = true;
  for (std::size_t i = 0; i < sys.F.size(); ++i) {
    Poly sum(sys.vars);
    for (std::size_t j = 0; j < cert.Q.size(); ++j) {
      const Poly prod = sys.F[i][j] * cert.Q[j].embed(union_vars(sys.vars, cert.Q[j].vars()));
      rep.max_degree = std::max(rep.max_degree, prod.degree());
      sum += prod;
    }
    rep.exact_equality = rep.exact_equality && sum == sys.phi[i];
  }
  rep.bound_satisfied = rep.max_degree <= cert.rho;
  return rep;
}

VerificationReport verify_certificate(const std::vector<Poly>& F, const Poly& phi, const Certificate& cert) {
  return verify_certificate(AffineSystem::ideal(F, phi), cert);
}

}  // namespace membership
