#include "spinpair/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>
#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

namespace spinpair {

std::vector<std::string> EngineParams::violations() const {
  std::vector<std::string> v;
  if (N < 1) v.push_back("N must be ≥ 1");
  if (!(E1 > 0)) v.push_back("E1 must be > 0");
  if (!(E2 >= E1)) v.push_back("E2 must be ≥ E1");
  if (!(omega0 >= 0)) v.push_back("omega0 must be ≥ 0");
  if (!(gamma0 > 0)) v.push_back("gamma0 must be > 0");
  if (!(beta2 > 0)) v.push_back("beta2 must be > 0");
  if (!(beta1 >= beta2)) v.push_back("beta1 must be ≥ beta2");
  return v;
}

void EngineParams::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "; " : "") << v[i];
  throw InvalidParameter(os.str());
}

EngineParams EngineParams::from_temperatures(double E1, double E2, double omega0, double gamma0,
                                             double T1, double T2, int N, Scaling s) {
  EngineParams p;
  p.E1 = E1;
  p.E2 = E2;
  p.omega0 = omega0;
  p.gamma0 = gamma0;
  p.beta1 = 1.0 / T1;
  p.beta2 = 1.0 / T2;
  p.N = N;
  p.scaling = s;
  return p;
}

Rates thermal_rates(double gamma0, double betaE) {
  if (!(betaE > 0)) throw InvalidParameter("beta*E must be > 0");
  const double n = 1.0 / std::expm1(betaE);
  return {n, gamma0 * n, gamma0 * (n + 1.0)};
}

Rates rates(const EngineParams& p, int i) {
  return thermal_rates(p.gamma_eff(), p.beta_eff(i) * p.energy(i));
}

int Liouvillian::max_charge() const { return *std::max_element(charge.begin(), charge.end()); }

namespace {

// Shared assembly: visits every (column, row, value) of the superoperator restricted to
// column indices accepted by `keep`.
template <typename Keep, typename Emit>
void assemble(const Liouvillian& L, Keep keep, Emit emit) {
  const int d = L.d;
  std::vector<SpMatC> rightT;
  rightT.reserve(L.terms.size());
  for (const auto& t : L.terms) rightT.push_back(t.right.transpose());
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      if (!keep(i, j)) continue;
      const int col = i + j * d;
      for (size_t k = 0; k < L.terms.size(); ++k) {
        const auto& A = L.terms[k].left;
        const auto& Bt = rightT[k];
        for (SpMatC::InnerIterator a(A, i); a; ++a)
          for (SpMatC::InnerIterator b(Bt, j); b; ++b)
            emit(a.row() + b.row() * d, col, L.terms[k].coeff * a.value() * b.value());
      }
    }
}

void add_dissipator(Liouvillian& L, SpMatC& K, const SpMatC& A, double rate) {
  if (rate == 0.0) return;
  SpMatC Ad = A.adjoint();
  L.terms.push_back({cplx(rate), A, Ad});
  K -= cplx(0.5 * rate) * SpMatC(Ad * A);
}

void finish_terms(Liouvillian& L, const SpMatC& K) {
  const auto I = sparse_identity<cplx>(L.d);
  L.terms.push_back({cplx(1.0), K, I});
  L.terms.push_back({cplx(1.0), I, SpMatC(K.adjoint())});
}

}  // namespace

SpMatC Liouvillian::matrix() const {
  if (dim() > 3'000'000) throw ResourceError("full superoperator too large; use sectors");
  std::vector<Eigen::Triplet<cplx>> t;
  assemble(*this, [](int, int) { return true; },
           [&](int r, int c, cplx v) { t.emplace_back(r, c, v); });
  SpMatC M(dim(), dim());
  M.setFromTriplets(t.begin(), t.end());
  return M;
}

Sector Liouvillian::sector(int q) const {
  Sector s;
  s.q = q;
  std::vector<int> local(static_cast<size_t>(d) * d, -1);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i)
      if (charge[i] - charge[j] == q) {
        local[i + static_cast<size_t>(j) * d] = static_cast<int>(s.index.size());
        s.index.push_back(i + j * d);
      }
  std::vector<Eigen::Triplet<cplx>> t;
  assemble(*this, [&](int i, int j) { return charge[i] - charge[j] == q; },
           [&](int r, int c, cplx v) {
             const int lr = local[r];
             if (lr < 0) throw NumericalInconsistency("generator term leaves its charge sector");
             t.emplace_back(lr, local[c], v);
           });
  const int n = static_cast<int>(s.index.size());
  s.matrix.resize(n, n);
  s.matrix.setFromTriplets(t.begin(), t.end());
  return s;
}

EngineLiouvillian build(const EngineParams& p, int max_N) {
  p.validate();
  if (p.N > max_N)
    throw ResourceError("N=" + std::to_string(p.N) + " exceeds the configured cap " +
                        std::to_string(max_N));
  const int d = (p.N + 1) * (p.N + 1);
  EngineLiouvillian L;
  L.params = p;
  L.ops = build_collective_ops<cplx>(p.N);
  L.d = d;
  L.charge.resize(L.d);
  for (int k1 = 0; k1 <= p.N; ++k1)
    for (int k2 = 0; k2 <= p.N; ++k2) L.charge[k1 * (p.N + 1) + k2] = k1 + k2;

  const auto& o = L.ops;
  SpMatC V = cplx(0.5 * p.omega_eff()) * SpMatC(o[1].minus * o[2].plus + o[1].plus * o[2].minus);
  SpMatC K = cplx(0.0, -1.0) * V;
  for (int i = 1; i <= 2; ++i) {
    const Rates r = rates(p, i);
    add_dissipator(L, K, o[i].minus, r.down);
    add_dissipator(L, K, o[i].plus, r.up);
  }
  finish_terms(L, K);
  return L;
}

SingleLiouvillian build_single(const SingleParams& p) {
  if (p.N < 1) throw InvalidParameter("N must be ≥ 1");
  SingleLiouvillian L;
  L.params = p;
  L.ops = build_single_ensemble_ops<cplx>(p.N);
  L.d = p.N + 1;
  L.charge.resize(L.d);
  for (int k = 0; k < L.d; ++k) L.charge[k] = k;
  const Rates r = thermal_rates(p.gamma0 / p.scale(), p.beta * p.E / p.scale());
  SpMatC K(L.d, L.d);
  add_dissipator(L, K, L.ops.minus, r.down);
  add_dissipator(L, K, L.ops.plus, r.up);
  finish_terms(L, K);
  return L;
}

MatC vec_to_mat(const Liouvillian& L, const Sector& s, const VecC& x) {
  MatC rho = MatC::Zero(L.d, L.d);
  for (size_t k = 0; k < s.index.size(); ++k) rho(s.index[k] % L.d, s.index[k] / L.d) = x[k];
  return rho;
}

namespace {

VecC mat_to_vec(const Sector& s, const MatC& m) {
  VecC x(s.index.size());
  const int d = static_cast<int>(m.rows());
  for (size_t k = 0; k < s.index.size(); ++k) x[k] = m(s.index[k] % d, s.index[k] / d);
  return x;
}

// Sector-0 matrix with row 0 (the (0,0) population) replaced by the trace functional.
SpMatC bordered(const Liouvillian& L, const Sector& s) {
  SpMatC A = s.matrix;
  A.prune([](const Eigen::Index& row, const Eigen::Index&, const cplx&) { return row != 0; });
  std::vector<Eigen::Triplet<cplx>> t;
  for (size_t k = 0; k < s.index.size(); ++k)
    if (s.index[k] % L.d == s.index[k] / L.d) t.emplace_back(0, static_cast<int>(k), 1.0);
  SpMatC T(A.rows(), A.cols());
  T.setFromTriplets(t.begin(), t.end());
  A += T;
  A.makeCompressed();
  return A;
}

// Hermitize, normalize and check positivity block by block (rho commutes with the charge).
void finalize(const Liouvillian& L, SteadyState& ss) {
  MatC& rho = ss.rho;
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace();
  std::vector<std::vector<int>> blocks(L.max_charge() + 1);
  for (int i = 0; i < L.d; ++i) blocks[L.charge[i]].push_back(i);
  for (const auto& b : blocks) {
    if (b.empty()) continue;
    const int n = static_cast<int>(b.size());
    MatC blk(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) blk(r, c) = rho(b[r], b[c]);
    Eigen::SelfAdjointEigenSolver<MatC> es(blk);
    const double mn = es.eigenvalues().minCoeff();
    if (mn < -1e-8) throw NumericalInconsistency("steady state has eigenvalue " + std::to_string(mn));
    if (mn < 0) {
      Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
      blk = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) rho(b[r], b[c]) = blk(r, c);
      ss.clipped = true;
    }
  }
  if (ss.clipped) rho /= rho.trace();
}

}  // namespace

SteadyState steady_state(const Liouvillian& L, SteadyMethod method) {
  SteadyState ss;
  if (method == SteadyMethod::dense_null_space) {
    if (L.dim() > 4096) throw ResourceError("dense null space limited to d^2 <= 4096");
    MatC M = MatC(L.matrix());
    Eigen::BDCSVD<MatC> svd(M, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const int n = static_cast<int>(s.size());
    if (s[n - 2] < 1e-10 * s[0]) throw DegeneracyError("Liouvillian kernel is not one-dimensional");
    VecC v = svd.matrixV().col(n - 1);
    ss.rho = Eigen::Map<MatC>(v.data(), L.d, L.d);
    finalize(L, ss);
    Eigen::Map<const VecC> x(ss.rho.data(), L.dim());
    ss.residual = (M * x).norm();
    return ss;
  }
  const Sector s = L.sector(0);
  Eigen::SparseLU<SpMatC, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(bordered(L, s));
  if (lu.info() != Eigen::Success) throw DegeneracyError("bordered Liouvillian is singular");
  VecC b = VecC::Zero(s.index.size());
  b[0] = 1.0;
  VecC x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw ConvergenceError("steady-state solve failed", x.norm());
  ss.rho = vec_to_mat(L, s, x);
  finalize(L, ss);
  ss.residual = (s.matrix * mat_to_vec(s, ss.rho)).norm();
  return ss;
}

MatC solve_traceless(const Liouvillian& L, const MatC& rhs) {
  const Sector s = L.sector(0);
  Eigen::SparseLU<SpMatC, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(bordered(L, s));
  if (lu.info() != Eigen::Success) throw ConvergenceError("singular resolvent", 0.0);
  VecC b = mat_to_vec(s, rhs);
  b[0] = 0.0;
  VecC x = lu.solve(b);
  return vec_to_mat(L, s, x);
}

double gap(const Liouvillian& L, int k, int dense_cap) {
  double best = -std::numeric_limits<double>::infinity();
  for (int q = 0; q <= L.max_charge(); ++q) {
    const Sector s = L.sector(q);
    const int n = static_cast<int>(s.index.size());
    std::vector<cplx> ev;
    if (n <= dense_cap) {
      Eigen::ComplexEigenSolver<MatC> es(MatC(s.matrix), false);
      if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", 0.0);
      ev.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    } else {
      const double scale = s.matrix.cwiseAbs().sum() / n;
      ev = shift_invert_eigs(s.matrix, cplx(q == 0 ? 1e-3 * scale : 0.0), std::min(k, n - 1));
    }
    if (q == 0) {
      auto z = std::min_element(ev.begin(), ev.end(),
                                [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
      ev.erase(z);
    }
    for (cplx e : ev) best = std::max(best, e.real());
  }
  return -best;
}

std::vector<MatC> evolve(const Liouvillian& L, const MatC& rho0, const std::vector<double>& t,
                         double rtol, double atol) {
  if (rho0.rows() != L.d || rho0.cols() != L.d)
    throw InvalidParameter("initial state dimension does not match the Liouvillian");
  std::vector<MatC> out;
  out.reserve(t.size());
  const SpMatC M = L.matrix();
  VecC x = Eigen::Map<const VecC>(rho0.data(), L.dim());
  double now = 0.0;
  auto push = [&] { out.push_back(Eigen::Map<MatC>(x.data(), L.d, L.d)); };
  if (L.dim() <= 2500) {
    const MatC Md = MatC(M);
    for (double tk : t) {
      if (tk > now) x = ((Md * (tk - now)).exp() * x).eval();
      now = tk;
      push();
    }
    return out;
  }
  namespace ode = boost::numeric::odeint;
  // real/imaginary split: odeint's error norm needs a real state
  const int n = L.dim();
  auto rhs = [&M, n](const Eigen::VectorXd& y, Eigen::VectorXd& dy, double) {
    const VecC z = y.head(n).cast<cplx>() + cplx(0, 1) * y.tail(n).cast<cplx>();
    const VecC dz = M * z;
    dy.resize(2 * n);
    dy.head(n) = dz.real();
    dy.tail(n) = dz.imag();
  };
  auto stepper = ode::make_controlled(atol, rtol,
                                      ode::runge_kutta_dopri5<Eigen::VectorXd, double, Eigen::VectorXd,
                                                              double, ode::vector_space_algebra>());
  Eigen::VectorXd y(2 * n);
  y << x.real(), x.imag();
  for (double tk : t) {
    if (tk > now) {
      const size_t steps = ode::integrate_adaptive(stepper, rhs, y, now, tk, (tk - now) / 100.0);
      if (steps > 50'000'000) throw ConvergenceError("step size underflow", y.norm());
    }
    now = tk;
    x = y.head(n).cast<cplx>() + cplx(0, 1) * y.tail(n).cast<cplx>();
    push();
  }
  return out;
}

double trace_distance(const MatC& a, const MatC& b) {
  Eigen::SelfAdjointEigenSolver<MatC> es(MatC(a - b), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace spinpair
