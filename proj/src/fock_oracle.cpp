#include "diracsea/fock_oracle.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace diracsea {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Jordan-Wigner annihilators for ns fermionic sites; site 0 is the leftmost
// tensor factor, the vacuum is basis state 0.
std::vector<Mat> jw_annihilators(int ns) {
  Mat sz(2, 2), ann(2, 2), id(2, 2);
  sz << 1, 0, 0, -1;
  ann << 0, 1, 0, 0;
  id.setIdentity();
  std::vector<Mat> ops;
  ops.reserve(ns);
  for (int s = 0; s < ns; ++s) {
    Mat m = Mat::Identity(1, 1);
    for (int k = 0; k < ns; ++k) m = kron(m, k < s ? sz : (k == s ? ann : id));
    ops.push_back(std::move(m));
  }
  return ops;
}

Mat hermitian_exp(const Mat& h, double t) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const Eigen::VectorXd ev = es.eigenvalues();
  Vec phases(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    phases(i) = std::polar(1.0, -ev(i) * t);
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

struct FockSetup {
  int n;
  std::vector<Mat> b, d;   // annihilators
  Mat u_fock;              // exp(-i H_fock t)
  Mat u_sp;                // exp(-i h_sp t)
  std::vector<Mat> bt;     // Heisenberg b_p(t)
  std::vector<Mat> dt_dag; // Heisenberg d_p^+(t)
  Vec vac, chi, chi_plus, gminus_bra;  // states: |0>, |chi>, G+^+|0>, G-^+|0>
};

FockSetup build_fock(const ToyModel& model, double t) {
  model.validate();
  const int n = model.n_modes;
  FockSetup fs;
  fs.n = n;
  auto c = jw_annihilators(2 * n);
  fs.b.assign(c.begin(), c.begin() + n);
  fs.d.assign(c.begin() + n, c.end());
  fs.u_sp = hermitian_exp(model.h_sp, t);

  // H_fock = sum h[a,b] c_a^+ c_b with c = (b_k ; d_k^+): the quadratic form of
  // the standard field, whose Heisenberg flow realizes the Bogoliubov relations.
  const Eigen::Index dim = fs.b[0].rows();
  Mat hf = Mat::Zero(dim, dim);
  std::vector<Mat> cc(2 * n);
  for (int k = 0; k < n; ++k) {
    cc[k] = fs.b[k];
    cc[n + k] = fs.d[k].adjoint();
  }
  for (int a = 0; a < 2 * n; ++a) {
    for (int bb = 0; bb < 2 * n; ++bb) {
      if (model.h_sp(a, bb) != cplx{}) hf += model.h_sp(a, bb) * (cc[a].adjoint() * cc[bb]);
    }
  }
  fs.u_fock = hermitian_exp(hf, t);

  fs.bt.resize(n);
  fs.dt_dag.resize(n);
  for (int k = 0; k < n; ++k) {
    fs.bt[k] = fs.u_fock.adjoint() * fs.b[k] * fs.u_fock;
    fs.dt_dag[k] = fs.u_fock.adjoint() * fs.d[k].adjoint() * fs.u_fock;
  }

  fs.vac = Vec::Zero(dim);
  fs.vac(0) = 1.0;
  fs.chi = Vec::Zero(dim);
  fs.chi_plus = Vec::Zero(dim);
  fs.gminus_bra = Vec::Zero(dim);
  for (int k = 0; k < n; ++k) {
    fs.chi += model.g(k) * (fs.b[k].adjoint() * fs.vac);
    fs.chi += model.g(n + k) * (fs.d[k].adjoint() * fs.vac);
    fs.chi_plus += model.g(k) * (fs.b[k].adjoint() * fs.vac);
    // <0| G- with G- = sum g-(k) d_k; stored as the ket G-^+|0>.
    fs.gminus_bra += std::conj(model.g(n + k)) * (fs.d[k].adjoint() * fs.vac);
  }
  return fs;
}

}  // namespace

void ToyModel::validate() const {
  if (n_modes < 1 || n_modes > 4) {
    throw std::invalid_argument("ToyModel: n_modes must be in [1, 4] (cost guard)");
  }
  if (h_sp.rows() != 2 * n_modes || h_sp.cols() != 2 * n_modes) {
    throw std::invalid_argument("ToyModel: h_sp must be 2n x 2n");
  }
  if ((h_sp - h_sp.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("ToyModel: h_sp must be Hermitian");
  }
  if (modes.cols() != 2 * n_modes || modes.rows() % 2 != 0) {
    throw std::invalid_argument("ToyModel: modes must have 2n orthonormal columns");
  }
  if ((modes.adjoint() * modes - Mat::Identity(2 * n_modes, 2 * n_modes)).cwiseAbs().maxCoeff() >
      1e-10) {
    throw std::invalid_argument("ToyModel: mode columns must be orthonormal");
  }
  if (std::abs(g.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("ToyModel: coefficients must be unit norm");
  }
}

ToyModel random_toy_model(int n_modes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> energy(1.0, 3.0);
  const int n = n_modes;
  ToyModel m;
  m.n_modes = n;
  m.h_sp = Mat::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    const double e = energy(rng);
    m.h_sp(k, k) = e;
    m.h_sp(n + k, n + k) = -e;
  }
  Mat coupling(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < coupling.rows(); ++i) {
    for (Eigen::Index j = 0; j < coupling.cols(); ++j) coupling(i, j) = cplx(gauss(rng), gauss(rng));
  }
  m.h_sp += 0.5 * (coupling + coupling.adjoint());

  Mat raw(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    for (Eigen::Index j = 0; j < raw.cols(); ++j) raw(i, j) = cplx(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<Mat> qr(raw);
  m.modes = qr.householderQ() * Mat::Identity(2 * n, 2 * n);

  m.g = Vec(2 * n);
  for (int k = 0; k < 2 * n; ++k) m.g(k) = cplx(gauss(rng), gauss(rng));
  m.g.normalize();
  return m;
}

double anticommutator_defect(int n_modes) {
  const int n = n_modes;
  auto c = jw_annihilators(2 * n);
  const Eigen::Index dim = c[0].rows();
  const Mat id = Mat::Identity(dim, dim);
  double defect = 0.0;
  auto acomm = [](const Mat& x, const Mat& y) { return Mat(x * y + y * x); };
  for (int i = 0; i < 2 * n; ++i) {
    for (int j = 0; j < 2 * n; ++j) {
      const Mat ad = acomm(c[i], c[j].adjoint()) - (i == j ? id : Mat(Mat::Zero(dim, dim)));
      defect = std::max(defect, ad.cwiseAbs().maxCoeff());
      defect = std::max(defect, acomm(c[i], c[j]).cwiseAbs().maxCoeff());
    }
  }
  return defect;
}

double bogoliubov_defect(const ToyModel& model, double t) {
  const FockSetup fs = build_fock(model, t);
  const int n = fs.n;
  double defect = 0.0;
  for (int p = 0; p < n; ++p) {
    Mat rhs = Mat::Zero(fs.b[0].rows(), fs.b[0].cols());
    for (int k = 0; k < n; ++k) {
      rhs += fs.u_sp(p, k) * fs.b[k] + fs.u_sp(p, n + k) * fs.d[k].adjoint();
    }
    defect = std::max(defect, (fs.bt[p] - rhs).cwiseAbs().maxCoeff());
    rhs.setZero();
    for (int k = 0; k < n; ++k) {
      rhs += fs.u_sp(n + p, k) * fs.b[k] + fs.u_sp(n + p, n + k) * fs.d[k].adjoint();
    }
    defect = std::max(defect, (fs.dt_dag[p] - rhs).cwiseAbs().maxCoeff());
  }
  return defect;
}

ToyDensity exact_density(const ToyModel& model, double t) {
  const FockSetup fs = build_fock(model, t);
  const int n = fs.n;
  const int ns = model.n_samples();

  ToyDensity out;
  out.rho_total.resize(ns);
  out.rho_vac.resize(ns);
  out.rho1.resize(ns);
  out.rho2.resize(ns);
  out.rho3.resize(ns);

  for (int s = 0; s < ns; ++s) {
    double vac_e = 0.0, vac_p = 0.0, apn = 0.0, amn = 0.0, bpn = 0.0, bmn = 0.0;
    cplx cross_main{}, cross_block{};
    for (int alpha = 0; alpha < 2; ++alpha) {
      const int row = alpha * ns + s;
      Mat psi_e = Mat::Zero(fs.b[0].rows(), fs.b[0].cols());
      Mat phi_h = psi_e;
      for (int p = 0; p < n; ++p) {
        psi_e += model.modes(row, p) * fs.bt[p];
        phi_h += model.modes(row, n + p) * fs.dt_dag[p];
      }
      // Vacuum parts: <0|psi_e^+ psi_e|0>, <0|phi_h phi_h^+|0>.
      vac_e += (psi_e * fs.vac).squaredNorm();
      vac_p += (phi_h.adjoint() * fs.vac).squaredNorm();
      // Auxiliary fields as Fock matrix elements:
      //   A+ = <0|psi_e|chi+>, B+ = <0|phi_h|chi+>,
      //   A- = <0|G- psi_e|0>,  B- = <0|G- phi_h|0>.
      const cplx a_plus = fs.vac.dot(psi_e * fs.chi_plus);
      const cplx b_plus = fs.vac.dot(phi_h * fs.chi_plus);
      const cplx a_minus = fs.gminus_bra.dot(psi_e * fs.vac);
      const cplx b_minus = fs.gminus_bra.dot(phi_h * fs.vac);
      apn += std::norm(a_plus);
      amn += std::norm(a_minus);
      bpn += std::norm(b_plus);
      bmn += std::norm(b_minus);
      cross_main += std::conj(a_plus) * b_minus;
      cross_block += std::conj(a_minus) * b_plus;
    }
    out.rho_vac(s) = vac_e + vac_p;
    out.rho1(s) = vac_e + apn - amn;
    out.rho2(s) = vac_p + bmn - bpn;
    out.rho3(s) = 2.0 * cross_main.real() - 2.0 * cross_block.real();
    out.rho_total(s) = out.rho1(s) + out.rho2(s) + out.rho3(s);
  }
  out.n_total = out.rho_total.sum();
  out.n_vac = out.rho_vac.sum();
  const Vec gp = model.g.head(n), gm = model.g.tail(n);
  out.blocking_deficit = (fs.u_sp.bottomLeftCorner(n, n) * gp).squaredNorm() +
                         (fs.u_sp.topRightCorner(n, n) * gm).squaredNorm();
  return out;
}

DenseSynthesis::DenseSynthesis(const Eigen::MatrixXcd& modes) : modes_(modes) {}

void DenseSynthesis::synthesize(std::span<const cplx> h_plus, std::span<const cplx> h_minus,
                                std::span<cplx> up, std::span<cplx> lo) const {
  const auto n = static_cast<Eigen::Index>(n_modes());
  const auto ns = static_cast<Eigen::Index>(n_samples());
  Vec h = Vec::Zero(2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!h_plus.empty()) h(k) = h_plus[static_cast<std::size_t>(k)];
    if (!h_minus.empty()) h(n + k) = h_minus[static_cast<std::size_t>(k)];
  }
  const Vec field = modes_ * h;
  for (Eigen::Index s = 0; s < ns; ++s) {
    up[static_cast<std::size_t>(s)] = field(s);
    lo[static_cast<std::size_t>(s)] = field(ns + s);
  }
}

PropagatorMatrix toy_propagator(const ToyModel& model, double t) {
  const int n = model.n_modes;
  const Mat u = hermitian_exp(model.h_sp, t);
  PropagatorMatrix p(static_cast<std::size_t>(n), t);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) {
      const std::size_t idx = static_cast<std::size_t>(r) + p.n * static_cast<std::size_t>(c);
      p.vv[idx] = u(r, c);
      p.vw[idx] = u(r, n + c);
      p.wv[idx] = u(n + r, c);
      p.ww[idx] = u(n + r, n + c);
    }
  }
  return p;
}

ToyDensity decomposition_density(const ToyModel& model, double t) {
  const PropagatorMatrix p = toy_propagator(model, t);
  const DenseSynthesis synth(model.modes);
  const VacuumDensity vac = vacuum_density(p, synth);
  WavepacketCoefficients coeffs;
  const int n = model.n_modes;
  coeffs.h_plus.resize(n);
  coeffs.h_minus.resize(n);
  for (int k = 0; k < n; ++k) {
    coeffs.h_plus[k] = model.g(k);
    coeffs.h_minus[k] = model.g(n + k);
  }
  const AuxiliaryFields aux = wavepacket_fields(p, coeffs, synth);
  const DensityDecomposition d = wavepacket_density(p, coeffs, synth, vac);
  ToyDensity out;
  const int ns = model.n_samples();
  out.rho_total.resize(ns);
  out.rho_vac.resize(ns);
  out.rho1.resize(ns);
  out.rho2.resize(ns);
  out.rho3.resize(ns);
  for (int s = 0; s < ns; ++s) {
    out.rho_total(s) = d.rho_total[s];
    out.rho_vac(s) = d.rho_vac[s];
    out.rho1(s) = d.rho1[s];
    out.rho2(s) = d.rho2[s];
    out.rho3(s) = d.rho3[s];
  }
  out.n_total = out.rho_total.sum();
  out.n_vac = out.rho_vac.sum();
  out.blocking_deficit = aux.norm_b_plus + aux.norm_a_minus;
  return out;
}

CausalityIdentityResult exact_causality_identity(const ToyModel& model,
                                                 std::span<const double> f_samples,
                                                 int probe_sample, double t) {
  const FockSetup fs = build_fock(model, t);
  const int n = fs.n;
  const int ns = model.n_samples();
  if (static_cast<int>(f_samples.size()) != ns) {
    throw std::invalid_argument("exact_causality_identity: f size mismatch");
  }
  for (const double v : f_samples) {
    if (!(v >= 0.0)) throw std::invalid_argument("exact_causality_identity: f must be nonnegative");
  }
  if (probe_sample < 0 || probe_sample >= ns) {
    throw std::invalid_argument("exact_causality_identity: probe outside sample set");
  }
  const Eigen::Index dim = fs.b[0].rows();

  // Phi(0, x_s) per spinor component: annihilators with the mode functions.
  auto phi0 = [&](int row) {
    Mat m = Mat::Zero(dim, dim);
    for (int p = 0; p < n; ++p) m += model.modes(row, p) * fs.b[p] + model.modes(row, n + p) * fs.d[p];
    return m;
  };
  // Heisenberg field at the probe (both spinor components).
  auto phi_t = [&](int row) {
    Mat m = Mat::Zero(dim, dim);
    for (int p = 0; p < n; ++p) {
      m += model.modes(row, p) * fs.bt[p] + model.modes(row, n + p) * fs.dt_dag[p].adjoint();
    }
    return m;
  };

  Mat probe_op = Mat::Zero(dim, dim);
  for (int alpha = 0; alpha < 2; ++alpha) {
    const Mat ph = phi_t(alpha * ns + probe_sample);
    probe_op += ph.adjoint() * ph;
  }

  Mat o_op = Mat::Zero(dim, dim);
  Mat reordered = Mat::Zero(dim, dim);
  for (int s = 0; s < ns; ++s) {
    for (int alpha = 0; alpha < 2; ++alpha) {
      const Mat ph = phi0(alpha * ns + s);
      o_op += f_samples[s] * (ph.adjoint() * ph);
      reordered += f_samples[s] * (ph.adjoint() * probe_op * ph);
    }
  }

  CausalityIdentityResult res;
  res.zzz_value = std::real(fs.chi.dot(o_op * fs.chi));
  const double vac_probe = std::real(fs.vac.dot(probe_op * fs.vac));
  const cplx lhs_reordered = fs.chi.dot(reordered * fs.chi);
  const cplx lhs_raw = fs.chi.dot(probe_op * (o_op * fs.chi));
  res.algebraic_residual = std::abs(lhs_reordered - vac_probe * res.zzz_value);
  res.raw_defect = std::abs(lhs_raw - vac_probe * res.zzz_value);
  return res;
}

}  // namespace diracsea
