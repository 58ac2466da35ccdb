#include "membership/projkernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace membership {

namespace {

const cd kTwoPiI(0.0, 2.0 * std::numbers::pi);

double binom(int p, int t) {
  if (t < 0 || t > p) return 0.0;
  double r = 1.0;
  for (int s = 1; s <= t; ++s) r = r * (p - t + s) / s;
  return r;
}

cd two_pi_i_pow(int power) {
  cd r = 1.0;
  for (int s = 0; s < std::abs(power); ++s) r *= kTwoPiI;
  return power < 0 ? 1.0 / r : r;
}

FormK shift_a(const FormK& x, int s) {
  FormK out(x.dim(), x.ngen());
  for (const auto& [m, c] : x.components()) out.add(m, c.shifted(s));
  return out;
}

void require_nonzero(double norm2) {
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) throw NumericalError("kernel point: zeta must be nonzero");
}

// Cached powers of alpha_{0,0} and alpha_{1,1} at one point.
class AlphaPowers {
 public:
  AlphaPowers(const KernelPoint& pt, const Frame& frame, int ngen)
      : a00_(alpha00_symbolic(pt)), a11_(alpha11_eval(pt, frame, ngen)) {
    a11_pow_.push_back(FormC::scalar(frame.dim(), ngen, 1.0));
    for (int t = 1; t <= frame.dim(); ++t) a11_pow_.push_back(wedge(a11_pow_.back(), a11_));
    a00_pow_.emplace_back(cd(1.0));
  }

  const FormC& a11_power(int t) const { return a11_pow_[static_cast<std::size_t>(t)]; }
  const KPoly& a00_power(int q) {
    while (static_cast<int>(a00_pow_.size()) <= q) a00_pow_.push_back(a00_pow_.back() * a00_);
    return a00_pow_[static_cast<std::size_t>(q)];
  }

 private:
  KPoly a00_;
  FormC a11_;
  std::vector<FormC> a11_pow_;
  std::vector<KPoly> a00_pow_;
};

KPoly strip_a(KPoly::Key k, cd c) {
  constexpr KPoly::Key kZMask = (KPoly::Key{1} << 56) - 1;
  KPoly p;
  p.add((k & kZMask) | (static_cast<KPoly::Key>(KPoly::kAOffset) << 56), c);
  return p;
}

}  // namespace

// ---------------------------------------------------------------- Frame

Frame Frame::homogeneous(int ambient) {
  Frame f;
  f.ambient_ = ambient;
  for (int a = 0; a < ambient; ++a) {
    std::vector<cd> col(static_cast<std::size_t>(ambient), 0.0);
    col[static_cast<std::size_t>(a)] = 1.0;
    f.cols_.push_back(std::move(col));
  }
  return f;
}

Frame Frame::chart(int ambient, int index) {
  if (index < 0 || index >= ambient) throw ArgumentError("chart index out of range");
  Frame f;
  f.ambient_ = ambient;
  for (int a = 0; a < ambient; ++a) {
    if (a == index) continue;
    std::vector<cd> col(static_cast<std::size_t>(ambient), 0.0);
    col[static_cast<std::size_t>(a)] = 1.0;
    f.cols_.push_back(std::move(col));
  }
  return f;
}

Frame Frame::from_columns(int ambient, std::vector<std::vector<cd>> columns) {
  for (const auto& c : columns) {
    if (static_cast<int>(c.size()) != ambient) throw ArgumentError("frame column has wrong length");
  }
  Frame f;
  f.ambient_ = ambient;
  f.cols_ = std::move(columns);
  return f;
}

FormC Frame::embed(const OneForm& w, int ngen) const {
  FormC out(dim(), ngen);
  for (int a = 0; a < dim(); ++a) {
    cd h = 0.0;
    cd b = 0.0;
    const auto& col = cols_[static_cast<std::size_t>(a)];
    for (int k = 0; k < ambient_; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      if (!w.holo.empty()) h += w.holo[kk] * col[kk];
      if (!w.anti.empty()) b += w.anti[kk] * std::conj(col[kk]);
    }
    out.add(out.holo_bit(a), h);
    out.add(out.anti_bit(a), b);
  }
  return out;
}

FormC Frame::d_zeta(int k, int ngen) const {
  OneForm w{std::vector<cd>(static_cast<std::size_t>(ambient_), 0.0), {}};
  w.holo[static_cast<std::size_t>(k)] = 1.0;
  return embed(w, ngen);
}

FormC Frame::d_zetabar(int k, int ngen) const {
  OneForm w{{}, std::vector<cd>(static_cast<std::size_t>(ambient_), 0.0)};
  w.anti[static_cast<std::size_t>(k)] = 1.0;
  return embed(w, ngen);
}

// ---------------------------------------------------------------- KoszulSystem

KoszulSystem::KoszulSystem(std::vector<Poly> f) : f_(std::move(f)) {
  table_ = hefer_tuple(f_);
  vars_ = table_.base_vars;
  if (vars_.size() > static_cast<std::size_t>(KPoly::kMaxVars)) {
    throw ArgumentError("kernel evaluation supports at most 7 homogeneous variables");
  }
  for (auto& p : f_) {
    p = p.embed(vars_);
    if (p.is_zero()) throw ArgumentError("generator must be nonzero");
    degrees_.push_back(p.degree());
    numeric_.emplace_back(p);
  }
  const std::size_t N = vars_.size();
  terms_.resize(f_.size());
  for (std::size_t j = 0; j < f_.size(); ++j) {
    for (std::size_t k = 0; k < N; ++k) {
      std::vector<HeferTerm> list;
      const Poly h = table_.h[j][k].embed(table_.joint_vars());
      for (const auto& [e, c] : h.terms()) {
        HeferTerm t{c.to_complex(), std::vector<unsigned>(e.begin(), e.begin() + static_cast<long>(N)),
                    std::vector<unsigned>(e.begin() + static_cast<long>(N), e.end())};
        list.push_back(std::move(t));
      }
      terms_[j].push_back(std::move(list));
    }
  }
}

bool KoszulSystem::equal_degrees() const {
  for (int d : degrees_) {
    if (d != degrees_.front()) return false;
  }
  return true;
}

// ---------------------------------------------------------------- KernelPoint

KernelPoint KernelPoint::make(std::span<const cd> zeta, std::optional<std::span<const cd>> z) {
  KernelPoint pt;
  pt.zeta.assign(zeta.begin(), zeta.end());
  for (const cd& c : zeta) pt.zeta_norm2 += std::norm(c);
  require_nonzero(pt.zeta_norm2);
  if (z) {
    if (z->size() != zeta.size()) throw ArgumentError("kernel point: z and zeta differ in length");
    pt.z = std::vector<cd>(z->begin(), z->end());
    for (std::size_t k = 0; k < zeta.size(); ++k) pt.zetabar_dot_z += std::conj(zeta[k]) * (*z)[k];
  }
  return pt;
}

KernelPoint KernelPoint::make(const KoszulSystem& sys, std::span<const cd> zeta,
                              std::optional<std::span<const cd>> z) {
  if (static_cast<int>(zeta.size()) != sys.ambient()) throw ArgumentError("kernel point: wrong dimension");
  KernelPoint pt = make(zeta, z);
  const auto m = static_cast<std::size_t>(sys.m());
  pt.f.resize(m);
  pt.fbar.resize(m);
  pt.grad.assign(m, std::vector<cd>(zeta.size()));
  for (std::size_t j = 0; j < m; ++j) {
    pt.f[j] = sys.numeric(static_cast<int>(j)).value_and_gradient(zeta, pt.grad[j]);
    pt.fbar[j] = std::conj(pt.f[j]);
    pt.f_norm2 += std::norm(pt.f[j]) * std::pow(pt.zeta_norm2, -sys.degrees()[j]);
  }
  return pt;
}

// ---------------------------------------------------------------- alpha, gamma

KPoly alpha00_symbolic(const KernelPoint& pt) {
  KPoly p;
  std::vector<unsigned> e(pt.zeta.size(), 0);
  for (std::size_t k = 0; k < pt.zeta.size(); ++k) {
    e[k] = 1;
    p.add(KPoly::key(0, e), std::conj(pt.zeta[k]) / pt.zeta_norm2);
    e[k] = 0;
  }
  return p;
}

FormC alpha11_eval(const KernelPoint& pt, const Frame& frame, int ngen) {
  const int N = static_cast<int>(pt.zeta.size());
  const double n2 = pt.zeta_norm2;
  std::vector<FormC> dz;
  std::vector<FormC> dzb;
  for (int k = 0; k < N; ++k) {
    dz.push_back(frame.d_zeta(k, ngen));
    dzb.push_back(frame.d_zetabar(k, ngen));
  }
  FormC out(frame.dim(), ngen);
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) {
      cd c = -pt.zeta[static_cast<std::size_t>(j)] * std::conj(pt.zeta[static_cast<std::size_t>(k)]) / (n2 * n2);
      if (j == k) c += 1.0 / n2;
      out += wedge(dzb[static_cast<std::size_t>(j)], dz[static_cast<std::size_t>(k)]) * c;
    }
  }
  return out * (-1.0 / kTwoPiI);
}

FormK alpha_eval(const KernelPoint& pt, const Frame& frame, int ngen, AlphaMode mode) {
  FormK out = lift(alpha11_eval(pt, frame, ngen));
  if (mode == AlphaMode::kSymbolicZ) {
    out.add(0, alpha00_symbolic(pt));
  } else {
    if (!pt.z) throw ArgumentError("alpha_eval: numeric mode needs z");
    out.add(0, KPoly(pt.zetabar_dot_z / pt.zeta_norm2));
  }
  return out;
}

OneForm gamma_oneform(const KernelPoint& pt, int j) {
  const std::size_t N = pt.zeta.size();
  OneForm w{std::vector<cd>(N), {}};
  for (std::size_t k = 0; k < N; ++k) {
    w.holo[k] = -pt.zeta[static_cast<std::size_t>(j)] * std::conj(pt.zeta[k]) / pt.zeta_norm2;
  }
  w.holo[static_cast<std::size_t>(j)] += 1.0;
  return w;
}

std::vector<FormC> gamma_eval(const KernelPoint& pt, const Frame& frame, int ngen) {
  std::vector<FormC> out;
  for (int j = 0; j < static_cast<int>(pt.zeta.size()); ++j) out.push_back(frame.embed(gamma_oneform(pt, j), ngen));
  return out;
}

// ---------------------------------------------------------------- sigma

namespace {

void require_off_zero_set(const KernelPoint& pt) {
  if (!(pt.f_norm2 > 0.0) || !std::isfinite(pt.f_norm2)) {
    throw NumericalError("kernel point lies on the zero set of the generators");
  }
}

double plain_norm2(const KernelPoint& pt) {
  double s = 0.0;
  for (const cd& v : pt.f) s += std::norm(v);
  return s;
}

}  // namespace

std::vector<cd> sigma_eval(const KoszulSystem& sys, const KernelPoint& pt, SigmaPath path) {
  require_off_zero_set(pt);
  const auto m = static_cast<std::size_t>(sys.m());
  std::vector<cd> s(m);
  if (path == SigmaPath::kEqualDegree) {
    if (!sys.equal_degrees()) throw ArgumentError("equal-degree path needs equal degrees");
    const double f2 = plain_norm2(pt);
    for (std::size_t j = 0; j < m; ++j) s[j] = pt.fbar[j] / f2;
    return s;
  }
  for (std::size_t j = 0; j < m; ++j) {
    s[j] = pt.fbar[j] * std::pow(pt.zeta_norm2, -sys.degrees()[j]) / pt.f_norm2;
  }
  return s;
}

std::vector<OneForm> dbar_sigma_eval(const KoszulSystem& sys, const KernelPoint& pt, SigmaPath path) {
  require_off_zero_set(pt);
  const auto m = static_cast<std::size_t>(sys.m());
  const std::size_t N = pt.zeta.size();
  std::vector<OneForm> out(m, OneForm{{}, std::vector<cd>(N, 0.0)});

  if (path == SigmaPath::kEqualDegree) {
    if (!sys.equal_degrees()) throw ArgumentError("equal-degree path needs equal degrees");
    const double f2 = plain_norm2(pt);
    std::vector<cd> dnorm(N, 0.0);  // dbar |f|^2
    for (std::size_t l = 0; l < m; ++l) {
      for (std::size_t k = 0; k < N; ++k) dnorm[k] += pt.f[l] * std::conj(pt.grad[l][k]);
    }
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k < N; ++k) {
        out[j].anti[k] = std::conj(pt.grad[j][k]) / f2 - pt.fbar[j] * dnorm[k] / (f2 * f2);
      }
    }
    return out;
  }

  const double n2 = pt.zeta_norm2;
  const double S = pt.f_norm2;
  std::vector<double> s(m);
  for (std::size_t j = 0; j < m; ++j) s[j] = std::pow(n2, -sys.degrees()[j]);
  std::vector<cd> dS(N, 0.0);
  for (std::size_t l = 0; l < m; ++l) {
    const double dl = sys.degrees()[l];
    for (std::size_t k = 0; k < N; ++k) {
      dS[k] += pt.f[l] * std::conj(pt.grad[l][k]) * s[l] - dl * std::norm(pt.f[l]) * s[l] / n2 * pt.zeta[k];
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    const double dj = sys.degrees()[j];
    const cd g = pt.fbar[j] * s[j];
    for (std::size_t k = 0; k < N; ++k) {
      const cd dg = std::conj(pt.grad[j][k]) * s[j] - dj * g / n2 * pt.zeta[k];
      out[j].anti[k] = dg / S - g * dS[k] / (S * S);
    }
  }
  return out;
}

FormC u_eval(const KoszulSystem& sys, const KernelPoint& pt, const Frame& frame, int k, SigmaPath path) {
  const int m = sys.m();
  if (k < 1 || k > std::min(m, sys.n() + 1)) throw ArgumentError("u_eval: k out of range");
  FormC out(frame.dim(), m);
  FormC step(frame.dim(), m);
  if (path == SigmaPath::kEqualDegree) {
    // fbar.e ^ (dbar fbar . e)^(k-1) / |f|^(2k)
    if (!sys.equal_degrees()) throw ArgumentError("equal-degree path needs equal degrees");
    require_off_zero_set(pt);
    for (int j = 0; j < m; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      out.add(out.gen_bit(j), pt.fbar[jj]);
      OneForm w{{}, std::vector<cd>(pt.zeta.size())};
      for (std::size_t l = 0; l < pt.zeta.size(); ++l) w.anti[l] = std::conj(pt.grad[jj][l]);
      step += wedge(frame.embed(w, m), FormC::basis(frame.dim(), m, out.gen_bit(j), 1.0));
    }
    for (int s = 1; s < k; ++s) out = wedge(out, step);
    return out * std::pow(plain_norm2(pt), -k);
  }
  const auto sigma = sigma_eval(sys, pt, path);
  const auto ds = dbar_sigma_eval(sys, pt, path);
  for (int j = 0; j < m; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    out.add(out.gen_bit(j), sigma[jj]);
    step += wedge(frame.embed(ds[jj], m), FormC::basis(frame.dim(), m, out.gen_bit(j), 1.0));
  }
  for (int s = 1; s < k; ++s) out = wedge(out, step);
  return out;
}

// ---------------------------------------------------------------- tau^*

FormK tau_symbolic(const LabeledPoly& h, const std::vector<std::string>& joint_vars, int two_pi_i_power,
                   const KernelPoint& pt, const Frame& frame, int ngen) {
  const std::size_t N = pt.zeta.size();
  if (joint_vars.size() != 2 * N) throw ArgumentError("tau: joint variables must be w then z copies");
  const Poly c = h.coeff.embed(joint_vars);
  KPoly coeff;
  for (const auto& [e, g] : c.terms()) {
    cd v = g.to_complex();
    int a = 0;
    for (std::size_t k = 0; k < N; ++k) {
      for (unsigned s = 0; s < e[k]; ++s) v *= pt.zeta[k];
      a += static_cast<int>(e[k]);
    }
    coeff.add(KPoly::key(a, std::span<const unsigned>(e).subspan(N)), v);
  }
  coeff *= two_pi_i_pow(two_pi_i_power);
  if (!h.dw) return FormK::scalar(frame.dim(), ngen, coeff);
  if (*h.dw < 0 || *h.dw >= static_cast<int>(N)) throw ArgumentError("tau: dw label out of range");
  return lift(frame.embed(gamma_oneform(pt, *h.dw), ngen)).times(coeff);
}

FormK resolve_alpha(const FormK& x, const KernelPoint& pt, const Frame& frame) {
  AlphaPowers powers(pt, frame, x.ngen());
  FormK out(x.dim(), x.ngen());
  for (const auto& [mask, poly] : x.components()) {
    for (const auto& [key, c] : poly.terms()) {
      const int p = KPoly::a_exponent(key);
      if (p < 0) throw NumericalError("negative net alpha power");
      const KPoly zpart = strip_a(key, c);
      for (int t = 0; t <= std::min(p, x.dim()); ++t) {
        const FormC piece = wedge(powers.a11_power(t), FormC::basis(x.dim(), x.ngen(), mask, 1.0));
        if (piece.is_zero()) continue;
        const KPoly base = powers.a00_power(p - t) * zpart * cd(binom(p, t));
        for (const auto& [m2, v] : piece.components()) out.add(m2, base * v);
      }
    }
  }
  return out;
}

FormK tau_substitute(const LabeledPoly& h, const std::vector<std::string>& joint_vars, int two_pi_i_power,
                     const KernelPoint& pt, const Frame& frame, int ngen) {
  return resolve_alpha(tau_symbolic(h, joint_vars, two_pi_i_power, pt, frame, ngen), pt, frame);
}

KPoly top_coefficient(const FormK& x, const KernelPoint& pt, const Frame& frame) {
  const int dim = x.dim();
  AlphaPowers powers(pt, frame, x.ngen());
  const FormK::Mask top = x.top_mask();
  KPoly out;
  for (const auto& [mask, poly] : x.components()) {
    if (mask & x.gen_mask()) continue;
    const int t = dim - x.holo_degree(mask);
    if (t != dim - x.anti_degree(mask)) continue;
    const FormK::Mask rest = top & ~mask;
    cd top_coeff = powers.a11_power(t).component(rest);
    if (top_coeff == 0.0) continue;
    if (FormC::wedge_sign(rest, mask) < 0) top_coeff = -top_coeff;
    for (const auto& [key, c] : poly.terms()) {
      const int p = KPoly::a_exponent(key);
      if (p < 0) throw NumericalError("negative net alpha power");
      if (p < t) continue;
      out += powers.a00_power(p - t) * strip_a(key, c * binom(p, t) * top_coeff);
    }
  }
  return out;
}

cd orientation_factor(int n) {
  cd f = ((n * (n - 1) / 2) % 2) ? -1.0 : 1.0;
  for (int s = 0; s < n; ++s) f *= cd(0.0, -2.0);
  return f;
}

cd alpha11_power_density(const KernelPoint& pt, const Frame& frame) {
  FormC p = FormC::scalar(frame.dim(), 0, 1.0);
  const FormC a11 = alpha11_eval(pt, frame, 0);
  for (int t = 0; t < frame.dim(); ++t) p = wedge(p, a11);
  return p.component(p.top_mask()) * orientation_factor(frame.dim());
}

cd reproducing_density(const NumericPoly& psi, int kappa, const KernelPoint& pt, const Frame& frame) {
  if (!pt.z) throw ArgumentError("reproducing density needs z");
  const FormK weight = FormK::scalar(frame.dim(), 0, KPoly::monomial(psi(pt.zeta), kappa));
  return top_coefficient(weight, pt, frame).eval(*pt.z) * orientation_factor(frame.dim());
}

// ---------------------------------------------------------------- PointKernel

PointKernel::PointKernel(const KoszulSystem& sys, const KernelPoint& pt, Frame frame, SigmaPath path)
    : sys_(&sys), pt_(&pt), frame_(std::move(frame)) {
  const int m = sys.m();
  const int N = sys.ambient();
  std::vector<FormK> gammas;
  for (int k = 0; k < N; ++k) gammas.push_back(lift(frame_.embed(gamma_oneform(pt, k), m)));
  const cd scale = -1.0 / kTwoPiI;
  for (int j = 0; j < m; ++j) {
    FormK hj(frame_.dim(), m);
    for (int k = 0; k < N; ++k) {
      KPoly coeff;
      for (const auto& term : sys.hefer_terms(j, k)) {
        cd v = term.c;
        int a = 0;
        for (std::size_t l = 0; l < term.w.size(); ++l) {
          for (unsigned s = 0; s < term.w[l]; ++s) v *= pt.zeta[l];
          a += static_cast<int>(term.w[l]);
        }
        coeff.add(KPoly::key(a, term.z), v);
      }
      if (coeff.is_zero()) continue;
      hj += gammas[static_cast<std::size_t>(k)].times(coeff);
    }
    h_.push_back(hj * scale);
  }
  const int kmax = std::min(m, sys.n() + 1);
  if (pt.f_norm2 > 0.0) {
    for (int k = 1; k <= kmax; ++k) u_.push_back(u_eval(sys, pt, frame_, k, path));
  }
}

FormK PointKernel::hhat(int j) const { return shift_a(h(j), -sys_->degrees()[static_cast<std::size_t>(j)]); }

FormK PointKernel::delta_hhat(const FormK& x) const {
  FormK out(x.dim(), x.ngen());
  for (int j = 0; j < sys_->m(); ++j) {
    const FormK c = x.contract_gen(j);
    if (c.is_zero()) continue;
    out += wedge(hhat(j), c);
  }
  return out;
}

FormK PointKernel::delta_h(const FormK& x) const {
  FormK out(x.dim(), x.ngen());
  for (int j = 0; j < sys_->m(); ++j) {
    const FormK c = x.contract_gen(j);
    if (c.is_zero()) continue;
    out += wedge(h(j), c);
  }
  return out;
}

FormK PointKernel::delta_hhat_power(const FormK& x, int k) const {
  FormK y = x;
  double fact = 1.0;
  for (int s = 1; s <= k; ++s) {
    y = delta_hhat(y);
    fact *= s;
  }
  return y * (1.0 / fact);
}

FormK PointKernel::H0(int kappa, int k, FormK::Mask gens) const {
  const FormK eJ = FormK::basis(dim(), ngen(), gens << (2 * dim()), KPoly(1.0));
  return shift_a(delta_hhat_power(eJ, k), kappa);
}

FormK PointKernel::H1(int kappa, int k, FormK::Mask gens, int i) const {
  const FormK eJ = FormK::basis(dim(), ngen(), gens << (2 * dim()), KPoly(1.0));
  return shift_a(delta_hhat_power(eJ, k - 1).contract_gen(i),
                 kappa - sys_->degrees()[static_cast<std::size_t>(i)]);
}

// ---------------------------------------------------------------- integrand

double cutoff(double t) {
  if (t <= 1.0) return 0.0;
  if (t >= 2.0) return 1.0;
  const double s = t - 1.0;
  return s * s * (3.0 - 2.0 * s);
}

DivisionIntegrand::DivisionIntegrand(const KoszulSystem& sys, Poly psi, int kappa, IntegrandOptions opts)
    : sys_(&sys), psi_(std::move(psi)), kappa_(kappa), opts_(opts) {
  psi_ = psi_.embed(union_vars(sys.vars(), psi_.vars()));
  if (psi_.nvars() != sys.vars().size()) throw ArgumentError("target uses variables outside the system ring");
  if (!psi_.is_homogeneous()) throw ArgumentError("target must be homogeneous");
  if (!psi_.is_zero() && psi_.degree() != kappa - sys.n()) {
    throw ArgumentError("target degree must equal kappa - n");
  }
  if (opts_.eps && !(*opts_.eps > 0.0)) throw ArgumentError("eps must be positive");
  if (opts_.path == SigmaPath::kEqualDegree && !sys.equal_degrees()) {
    throw ArgumentError("equal-degree path needs equal degrees");
  }
  std::vector<int> d = sys.degrees();
  std::sort(d.rbegin(), d.rend());
  int need = 0;
  for (int i = 0; i < std::min(sys.m(), sys.n() + 1); ++i) need += d[static_cast<std::size_t>(i)];
  if (kappa < need) throw ArgumentError("kappa below the sum of the largest min(m, n+1) degrees");
  psi_numeric_ = NumericPoly(psi_);

  offsets_.push_back(0);
  for (int i = 0; i < sys.m(); ++i) {
    const long deg = rho() - sys.degrees()[static_cast<std::size_t>(i)];
    std::vector<Exponents> monos;
    if (deg >= 0) monos = monomials_of_degree(sys.vars().size(), static_cast<unsigned>(deg));
    std::vector<std::pair<KPoly::Key, std::size_t>> idx;
    for (std::size_t s = 0; s < monos.size(); ++s) idx.emplace_back(KPoly::key(0, monos[s]), offsets_.back() + s);
    std::sort(idx.begin(), idx.end());
    offsets_.push_back(offsets_.back() + monos.size());
    monomials_.push_back(std::move(monos));
    index_.push_back(std::move(idx));
  }
}

void DivisionIntegrand::eval(const KernelPoint& pt, const Frame& frame, std::span<cd> out) const {
  if (out.size() != size()) throw ArgumentError("density buffer has wrong size");
  if (frame.dim() != sys_->n()) throw ArgumentError("density needs an n-dimensional frame");
  std::fill(out.begin(), out.end(), cd(0.0));
  double chi = 1.0;
  if (opts_.eps) {
    chi = cutoff(std::sqrt(pt.f_norm2) / *opts_.eps);
    if (chi == 0.0) return;
  }
  require_off_zero_set(pt);
  const cd psi_val = psi_numeric_(pt.zeta);
  if (psi_val == 0.0) return;

  const PointKernel pk(*sys_, pt, frame, opts_.path);
  const int m = sys_->m();
  const int dim = frame.dim();
  FormK v(dim, m);
  for (int k = 1; k <= pk.max_k(); ++k) {
    if (opts_.path == SigmaPath::kGeneral) {
      v += pk.delta_hhat_power(lift(pk.u(k)), k - 1);
    } else {
      FormK y = lift(pk.u(k));
      double fact = 1.0;
      for (int s = 1; s < k; ++s) {
        y = pk.delta_h(y);
        fact *= s;
      }
      v += shift_a(y * (1.0 / fact), -sys_->degrees().front() * k);
    }
  }
  const cd scale = psi_val * orientation_factor(dim) * chi;
  for (int i = 0; i < m; ++i) {
    const int shift = opts_.path == SigmaPath::kGeneral ? kappa_ - sys_->degrees()[static_cast<std::size_t>(i)]
                                                        : kappa_;
    const KPoly top = top_coefficient(shift_a(v.contract_gen(i), shift), pt, frame);
    const auto& idx = index_[static_cast<std::size_t>(i)];
    for (const auto& [key, c] : top.terms()) {
      const auto it = std::lower_bound(idx.begin(), idx.end(), std::make_pair(key, std::size_t{0}));
      if (it == idx.end() || it->first != key) {
        throw NumericalError("cofactor density has a z-monomial of the wrong degree");
      }
      out[it->second] += c * scale;
    }
  }
}

}  // namespace membership
