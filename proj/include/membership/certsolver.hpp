#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "membership/bounds.hpp"
#include "membership/poly.hpp"

namespace membership {

/// Affine membership problem  sum_j F^j Q_j = Phi  for an r x m polynomial
/// matrix F (r = 1 is the ideal case) and an r-column Phi.
struct AffineSystem {
  std::vector<std::string> vars;
  std::vector<std::vector<Poly>> F;   ///< rows x columns
  std::vector<Poly> phi;              ///< one entry per row
  std::vector<int> declared_degrees;  ///< optional, per column
  std::optional<Rational> nu_inf;

  static AffineSystem ideal(std::vector<Poly> generators, Poly target);

  int n() const { return static_cast<int>(vars.size()); }
  int m() const { return F.empty() ? 0 : static_cast<int>(F.front().size()); }
  int r() const { return static_cast<int>(F.size()); }
  /// Column degrees: declared when present, else max entry degree (at least 1).
  std::vector<int> column_degrees() const;
  int deg_phi() const;
  /// Entries re-expressed over `vars`; throws on malformed shapes.
  void validate() const;
  SystemProfile profile() const;
};

/// Homogenized counterpart at a fixed rho: column j of f is d_j-homogeneous,
/// psi = z0^(rho - deg Phi) phi.
struct HomogeneousSystem {
  std::string homvar;
  std::vector<std::string> vars;  ///< homvar first
  std::vector<std::vector<Poly>> f;
  std::vector<int> degrees;
  std::vector<Poly> psi;
  long rho = 0;

  int n() const { return static_cast<int>(vars.size()) - 1; }
};

/// First name among z0, z0_, z0__, ... not used by `vars`.
std::string fresh_homvar(const std::vector<std::string>& vars);
HomogeneousSystem homogenize_system(const AffineSystem& sys, long rho);

enum class CertificateMode { kExact, kNumeric };

struct ResidualStats {
  double max_abs = 0.0;
  double max_abs_target = 0.0;  ///< max |Phi| over the same points
  std::size_t samples = 0;
};

/// Polynomial with floating complex coefficients (numeric certificates).
struct ComplexPoly {
  std::vector<std::string> vars;
  std::map<Exponents, std::complex<double>, GrlexGreater> terms;

  std::complex<double> operator()(std::span<const std::complex<double>> x) const;
};

struct Certificate {
  long rho = 0;
  CertificateMode mode = CertificateMode::kExact;
  std::optional<Theorem> theorem;
  std::vector<Poly> Q;             ///< affine cofactors, exact mode
  std::vector<Poly> q;             ///< homogeneous cofactors, exact mode
  std::vector<ComplexPoly> Q_numeric;
  std::optional<ResidualStats> residual;
  // Linear-system audit.
  std::size_t unknowns = 0;
  std::size_t equations = 0;
  std::size_t rank = 0;
  bool unique() const { return rank == unknowns; }
};

struct Hypothesis {
  std::string name;
  std::string status;  ///< "ok", "violated", "unchecked"
  std::string detail;
};

struct Infeasible {
  long rho = 0;
  std::size_t unknowns = 0;
  std::size_t equations = 0;
  std::size_t rank = 0;
  std::vector<Hypothesis> checklist;
};

using CertifyResult = std::variant<Certificate, Infeasible>;

/// Solve sum_i f^i q_i = z0^(rho - deg Phi) phi exactly. Free unknowns are set
/// to zero, so the result is the first solution of the fixed elimination order.
CertifyResult certify_exact(const std::vector<Poly>& F, const Poly& phi, long rho);
CertifyResult certify_module(const AffineSystem& sys, long rho);

/// Certify at the rho of a theorem's bound; an Infeasible result carries the
/// hypothesis checklist for that theorem.
CertifyResult certify_at_bound(const AffineSystem& sys, Theorem theorem);
std::vector<Hypothesis> hypothesis_checklist(const AffineSystem& sys, Theorem theorem, long rho);

/// Smallest rho in [deg Phi, rho_max] with a feasible system.
std::optional<long> minimal_rho(const AffineSystem& sys, long rho_max);
std::optional<long> minimal_rho(const std::vector<Poly>& F, const Poly& phi, long rho_max);

struct VerificationReport {
  bool exact_equality = false;      ///< exact mode only
  int max_degree = -1;              ///< max deg(F^j Q_j) over entries
  bool bound_satisfied = false;
  std::optional<ResidualStats> residual;  ///< numeric mode only
};

VerificationReport verify_certificate(const AffineSystem& sys, const Certificate& cert,
                                      std::uint64_t seed = 20240611, std::size_t points = 20);
VerificationReport verify_certificate(const std::vector<Poly>& F, const Poly& phi, const Certificate& cert);

/// Residual max_x |sum_j F^j Q_j - Phi| for numeric cofactors at `points`
/// pseudo-random affine points in the box [-1, 1]^(2n).
ResidualStats numeric_residual(const AffineSystem& sys, const std::vector<ComplexPoly>& Q,
                               std::uint64_t seed, std::size_t points);

}  // namespace membership
