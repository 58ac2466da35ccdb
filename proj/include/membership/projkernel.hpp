#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "membership/forms.hpp"
#include "membership/hefer.hpp"
#include "membership/poly.hpp"

namespace membership {

/// Coefficients of a 1-form sum_k holo[k] d zeta_k + anti[k] d zetabar_k in
/// homogeneous coordinates.
struct OneForm {
  std::vector<cd> holo;
  std::vector<cd> anti;
};

/// Linear pullback of homogeneous differentials to the form layout used for
/// evaluation. `homogeneous` keeps all n+1 coordinates; a chart frame maps
/// d zeta_k to sum_a P[k][a] dt_a for a parametrization zeta = zeta(t) that is
/// affine in t (P its constant Jacobian).
class Frame {
 public:
  static Frame homogeneous(int ambient);
  /// Affine chart zeta_index = 1.
  static Frame chart(int ambient, int index);
  /// columns[a] is d zeta / d t_a.
  static Frame from_columns(int ambient, std::vector<std::vector<cd>> columns);

  int ambient() const { return ambient_; }
  int dim() const { return static_cast<int>(cols_.size()); }
  FormC embed(const OneForm& w, int ngen) const;
  FormC d_zeta(int k, int ngen) const;
  FormC d_zetabar(int k, int ngen) const;

 private:
  int ambient_ = 0;
  std::vector<std::vector<cd>> cols_;
};

/// Homogeneous generators f^1..f^m of the Koszul complex together with their
/// divided differences, snapshotted for floating evaluation.
class KoszulSystem {
 public:
  struct HeferTerm {
    cd c;
    std::vector<unsigned> w;
    std::vector<unsigned> z;
  };

  explicit KoszulSystem(std::vector<Poly> f);

  int n() const { return static_cast<int>(vars_.size()) - 1; }
  int ambient() const { return static_cast<int>(vars_.size()); }
  int m() const { return static_cast<int>(f_.size()); }
  const std::vector<std::string>& vars() const { return vars_; }
  const std::vector<Poly>& generators() const { return f_; }
  const std::vector<int>& degrees() const { return degrees_; }
  bool equal_degrees() const;
  const HeferTable& hefer() const { return table_; }
  /// Terms of the divided difference D[j][k](w, z).
  const std::vector<HeferTerm>& hefer_terms(int j, int k) const {
    return terms_[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
  }
  const NumericPoly& numeric(int j) const { return numeric_[static_cast<std::size_t>(j)]; }

 private:
  std::vector<std::string> vars_;
  std::vector<Poly> f_;
  std::vector<int> degrees_;
  HeferTable table_;
  std::vector<NumericPoly> numeric_;
  std::vector<std::vector<std::vector<HeferTerm>>> terms_;
};

/// Evaluation point zeta (integration variable) and optionally z (the point
/// where the division is evaluated), with per-point caches.
struct KernelPoint {
  std::vector<cd> zeta;
  std::optional<std::vector<cd>> z;
  double zeta_norm2 = 0.0;
  cd zetabar_dot_z = 0.0;
  std::vector<cd> f;
  std::vector<cd> fbar;
  std::vector<std::vector<cd>> grad;  ///< grad[j][k] = d f^j / d zeta_k
  double f_norm2 = 0.0;               ///< |f(zeta)|^2_{E*} = sum |f^j|^2 |zeta|^(-2 d_j)

  static KernelPoint make(const KoszulSystem& sys, std::span<const cd> zeta,
                          std::optional<std::span<const cd>> z = std::nullopt);
  /// Point without generator caches (weight-only kernels).
  static KernelPoint make(std::span<const cd> zeta, std::optional<std::span<const cd>> z = std::nullopt);
};

enum class AlphaMode { kNumericZ, kSymbolicZ };
enum class SigmaPath { kGeneral, kEqualDegree };

/// alpha_{0,0} = z . zetabar / |zeta|^2 as a linear polynomial in z.
KPoly alpha00_symbolic(const KernelPoint& pt);
FormC alpha11_eval(const KernelPoint& pt, const Frame& frame, int ngen);
/// alpha = alpha_{0,0} + alpha_{1,1}; numeric mode needs pt.z.
FormK alpha_eval(const KernelPoint& pt, const Frame& frame, int ngen, AlphaMode mode);

OneForm gamma_oneform(const KernelPoint& pt, int j);
std::vector<FormC> gamma_eval(const KernelPoint& pt, const Frame& frame, int ngen);

/// Minimal-norm section with f . sigma = 1. Throws off the domain (zeta in Z).
std::vector<cd> sigma_eval(const KoszulSystem& sys, const KernelPoint& pt,
                           SigmaPath path = SigmaPath::kGeneral);
/// dbar sigma_j as (0,1)-forms (only the `anti` part is populated).
std::vector<OneForm> dbar_sigma_eval(const KoszulSystem& sys, const KernelPoint& pt,
                                     SigmaPath path = SigmaPath::kGeneral);
/// sigma ^ (dbar sigma)^(k-1) with generator bits e_j.
FormC u_eval(const KoszulSystem& sys, const KernelPoint& pt, const Frame& frame, int k,
             SigmaPath path = SigmaPath::kGeneral);

/// Polynomial in the joint (w, z) variables of a HeferTable, optionally
/// carrying a dw_k label.
struct LabeledPoly {
  Poly coeff;
  std::optional<int> dw;
};

/// tau^*: w -> a zeta, dw_k -> gamma_k, z stays symbolic. The result keeps
/// the formal alpha power `a` unresolved. `two_pi_i_power` multiplies by
/// (2 pi i)^power.
FormK tau_symbolic(const LabeledPoly& h, const std::vector<std::string>& joint_vars,
                   int two_pi_i_power, const KernelPoint& pt, const Frame& frame, int ngen);

/// Replace every a^p by alpha^p = sum_t C(p, t) alpha00^(p-t) alpha11^t,
/// dropping components beyond the top degree. Negative p is a hard error.
FormK resolve_alpha(const FormK& x, const KernelPoint& pt, const Frame& frame);

/// tau_symbolic followed by resolve_alpha.
FormK tau_substitute(const LabeledPoly& h, const std::vector<std::string>& joint_vars,
                     int two_pi_i_power, const KernelPoint& pt, const Frame& frame, int ngen);

/// Building blocks of the Koszul division kernel at one point, with the
/// weight alpha kept as the formal symbol `a`.
class PointKernel {
 public:
  PointKernel(const KoszulSystem& sys, const KernelPoint& pt, Frame frame,
              SigmaPath path = SigmaPath::kGeneral);

  int dim() const { return frame_.dim(); }
  int ngen() const { return sys_->m(); }
  const Frame& frame() const { return frame_; }

  /// h_j = -(2 pi i)^(-1) sum_k D[j][k](a zeta, z) gamma_k.
  const FormK& h(int j) const { return h_[static_cast<std::size_t>(j)]; }
  /// hhat_j = a^(-d_j) h_j.
  FormK hhat(int j) const;
  /// delta_hhat(x) = sum_j hhat_j ^ delta_{e_j^*} x.
  FormK delta_hhat(const FormK& x) const;
  /// delta_h with the unweighted h_j.
  FormK delta_h(const FormK& x) const;
  /// (delta_hhat)^k / k! applied to x.
  FormK delta_hhat_power(const FormK& x, int k) const;

  /// a^kappa (delta_hhat)_k e_J.
  FormK H0(int kappa, int k, FormK::Mask gens) const;
  /// a^(kappa - d_i) delta_{e_i^*} (delta_hhat)_(k-1) e_J.
  FormK H1(int kappa, int k, FormK::Mask gens, int i) const;

  const FormC& u(int k) const { return u_[static_cast<std::size_t>(k - 1)]; }
  int max_k() const { return static_cast<int>(u_.size()); }

 private:
  const KoszulSystem* sys_;
  const KernelPoint* pt_;
  Frame frame_;
  std::vector<FormK> h_;
  std::vector<FormC> u_;
};

/// C^1 cutoff: 0 on t <= 1, 1 on t >= 2, 3s^2 - 2s^3 in between.
double cutoff(double t);

struct IntegrandOptions {
  std::optional<double> eps;
  SigmaPath path = SigmaPath::kGeneral;
};

/// (n, n)-density of the cofactor integrals, expanded in z-monomials:
/// q_i(z) = sum_mono z^mono * integral of density(i, mono).
class DivisionIntegrand {
 public:
  DivisionIntegrand(const KoszulSystem& sys, Poly psi, int kappa, IntegrandOptions opts = {});

  int kappa() const { return kappa_; }
  long rho() const { return kappa_ - sys_->n(); }
  const KoszulSystem& system() const { return *sys_; }
  /// Monomials (over the system's variables) of degree rho - d_i.
  const std::vector<Exponents>& monomials(int i) const {
    return monomials_[static_cast<std::size_t>(i)];
  }
  std::size_t size() const { return offsets_.back(); }
  std::size_t offset(int i) const { return offsets_[static_cast<std::size_t>(i)]; }

  /// Standard-orientation Lebesgue densities (before calibration) in the
  /// coordinates t of `frame`; out has size().
  void eval(const KernelPoint& pt, const Frame& frame, std::span<cd> out) const;

 private:
  const KoszulSystem* sys_;
  Poly psi_;
  NumericPoly psi_numeric_;
  int kappa_;
  IntegrandOptions opts_;
  std::vector<std::vector<Exponents>> monomials_;
  std::vector<std::size_t> offsets_;
  std::vector<std::vector<std::pair<KPoly::Key, std::size_t>>> index_;
};

/// Top-component extraction: resolves a and returns the coefficient of
/// dt_1..dt_n dtbar_1..dtbar_n as a z-polynomial.
KPoly top_coefficient(const FormK& x, const KernelPoint& pt, const Frame& frame);

/// Factor converting the dt..dtbar coefficient to a density against
/// Lebesgue measure in standard orientation: (-1)^(n(n-1)/2) (-2i)^n.
cd orientation_factor(int n);

/// Density of (alpha_{1,1})^n in the frame coordinates.
cd alpha11_power_density(const KernelPoint& pt, const Frame& frame);
/// Density of (alpha^kappa)_{n,n} psi(zeta) at numeric z (pt.z required).
cd reproducing_density(const NumericPoly& psi, int kappa, const KernelPoint& pt, const Frame& frame);

}  // namespace membership
