// Homogeneous self-dual interior-point method for the node-block SOCP.
//
// Standard form:   min c'x  s.t.  A x = b,  G x + s = h,  s in K
// with x = (x_hat, lambda), c = -e_lambda, G = -S (stacked node-local cone
// rows), h = 0. Nesterov-Todd scaling, Mehrotra predictor-corrector. The
// KKT system is reduced node by node (every cone touches the 9 unknowns of a
// single node) to normal equations in the equality multipliers; the lambda
// column is handled by bordering. Directions no cone sees (with some
// friction modes dropped) stay free and go through a quasi-definite
// augmented system instead.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#ifdef DOME_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#endif

#include "domelimit/conic_solver.hpp"

namespace dome {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using MatH = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 9, 9>;
using Mat39 = Eigen::Matrix<double, 3, 9>;

#ifdef DOME_HAVE_CHOLMOD
using Factor = Eigen::CholmodSimplicialLLT<SparseMatrix, Eigen::Lower>;
#else
using Factor = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower>;
#endif
// quasi-definite system when some stress directions touch no cone
using AugFactor = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower>;

constexpr double kInf = std::numeric_limits<double>::infinity();
// stalled iterates within this factor of the tolerances are accepted
constexpr double kInaccurate = 1e3;
constexpr double kFacePenalty[] = {1e-10, 1e-12};

double soc_res(const Vector3d& u) {
  return u(0) * u(0) - u(1) * u(1) - u(2) * u(2);
}

// Largest alpha >= 0 keeping u + alpha d in the cone; u interior.
double soc_max_step(const Vector3d& u, const Vector3d& d) {
  const double a = d(0) * d(0) - d(1) * d(1) - d(2) * d(2);
  const double b = u(0) * d(0) - u(1) * d(1) - u(2) * d(2);
  const double c = std::max(soc_res(u), 0.0);
  const double disc = b * b - a * c;
  if (a > 0.0) {
    if (b >= 0.0 || disc < 0.0) return kInf;
    return c / (-b + std::sqrt(disc));
  }
  if (a == 0.0) return b < 0.0 ? -c / (2.0 * b) : kInf;
  const double sq = std::sqrt(std::max(disc, 0.0));
  if (b > 0.0) return (b + sq) / (-a);
  return c / (-b + sq);
}

// Jordan product u o v.
Vector3d conic_prod(const Vector3d& u, const Vector3d& v) {
  Vector3d r;
  r(0) = u.dot(v);
  r.tail<2>() = u(0) * v.tail<2>() + v(0) * u.tail<2>();
  return r;
}

// w with l o w = d.
Vector3d conic_div(const Vector3d& l, const Vector3d& d) {
  Vector3d w;
  const double rho = l(0) * l(0) - l.tail<2>().squaredNorm();
  w(0) = (l(0) * d(0) - l.tail<2>().dot(d.tail<2>())) / rho;
  w.tail<2>() = (d.tail<2>() - w(0) * l.tail<2>()) / l(0);
  return w;
}

// Rotated-cone coordinates to standard-cone coordinates; an involution.
Vector3d rot_to_soc(const Vector3d& xi) {
  const double r = 1.0 / std::sqrt(2.0);
  return {r * (xi(0) + xi(1)), r * (xi(0) - xi(1)), xi(2)};
}

struct KktVec {
  VectorXd x;  // stress block
  double lam = 0.0;
  VectorXd y;
  ConeVectors z;

  void resize(Index n, Index m, Index D) {
    x.setZero(n);
    lam = 0.0;
    y.setZero(m);
    z.setZero(3, D);
  }
  void axpy(double a, const KktVec& o) {
    x += a * o.x;
    lam += a * o.lam;
    y += a * o.y;
    z += a * o.z;
  }
  double inf_norm() const {
    double r = std::abs(lam);
    if (x.size()) r = std::max(r, x.lpNorm<Eigen::Infinity>());
    if (y.size()) r = std::max(r, y.lpNorm<Eigen::Infinity>());
    if (z.size()) r = std::max(r, z.lpNorm<Eigen::Infinity>());
    return r;
  }
};

class Ipm {
 public:
  // penalty > 0 adds penalty * sum of cone slack first components to the
  // objective, which bounds an otherwise unbounded optimal face.
  Ipm(const ConicProgram& p, const SolverOptions& opt, double penalty = 0.0)
      : p_(p), opt_(opt), penalty_(penalty) {}

  SolveReport run();

 private:
  void setup();
  void build_block_structure();
  void build_augmented();

  ConeVectors S_times(const VectorXd& x) const;
  VectorXd St_times(const ConeVectors& z) const;

  Vector3d W(Index c, const Vector3d& x) const;
  Vector3d Winv(Index c, const Vector3d& x) const;
  Vector3d W2(Index c, const Vector3d& x) const;
  Vector3d Winv2(Index c, const Vector3d& x) const;

  bool update_scaling(const ConeVectors& s, const ConeVectors& z);
  void identity_scaling();
  bool factorize();
  bool factorize_augmented();
  void solve_reduced(const KktVec& r, KktVec& d) const;
  void solve_kkt(const KktVec& r, KktVec& d) const;
  void kkt_residual(const KktVec& r, const KktVec& d, KktVec& e) const;
  ConeVectors bring_to_cone(const ConeVectors& r) const;
  double line_search(const ConeVectors& lam, const ConeVectors& ds,
                     const ConeVectors& dz, double tau, double dtau,
                     double kap, double dkap) const;

  const ConicProgram& p_;
  SolverOptions opt_;
  double penalty_ = 0.0;
  VectorXd cx_;  // objective on the stress block

  Index N_ = 0, nf_ = 0, D_ = 0, m_ = 0, n9_ = 0;
  SparseMatrix A_;
  VectorXd a_, b_;
  VectorXd col_scale_, row_scale_;
  std::vector<double> fam_scale_;
  std::vector<bool> fam_rot_;
  Eigen::Matrix<double, Eigen::Dynamic, 9> G_;  // 3 nf x 9
  // Node unknowns split into directions seen by some cone (Qc) and free
  // ones (Qf, the null space of G).  Free directions stay in the reduced
  // system as unknowns instead of being divided by the regularization.
  Index rc_ = 9, nfree_ = 0;
  MatrixXd Qc_, Qf_, Gc_;

  std::vector<std::vector<int>> brows_;
  std::vector<MatrixXd> bD_, bDc_;
  std::vector<std::vector<int>> bpos_;
  std::vector<int> mdiag_;
  SparseMatrix M_;
  Factor factor_;
  bool analyzed_ = false;
  SparseMatrix K_;
  std::vector<int> kmap_;  // M_ value index -> K_ value index
  AugFactor aug_;
  VectorXd vf_;

  VectorXd eta_;
  ConeVectors w_;
  ConeVectors lam_;
  std::vector<Eigen::LLT<MatH>> hfac_;
  VectorXd v_;
  double av_ = 0.0;
  double delta_ = 1e-9;
};

void Ipm::setup() {
  N_ = p_.n_nodes;
  n9_ = kStressComponents * N_;
  m_ = p_.n_eq();
  nf_ = static_cast<Index>(p_.cones.families.size());
  if (static_cast<Index>(p_.cones.nodes.size()) != N_)
    throw AssemblyError("solver expects one cone group per node");
  for (Index k = 0; k < N_; ++k)
    if (p_.cones.nodes[static_cast<std::size_t>(k)] != k)
      throw AssemblyError("solver expects cone groups in node order");
  D_ = N_ * nf_;
  delta_ = opt_.regularization;
#ifdef DOME_HAVE_CHOLMOD
  factor_.cholmod().print = 0;
#endif

  col_scale_.resize(n9_);
  for (Index k = 0; k < N_; ++k)
    for (int c = 0; c < kStressComponents; ++c)
      col_scale_(kStressComponents * k + c) = p_.stress_unit(c);
  row_scale_.resize(m_);
  for (Index i = 0; i < m_; ++i) row_scale_(i) = p_.row_unit(i);

  // A = R^-1 [B; C] Dc
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(p_.B.nonZeros() + p_.C.nonZeros()));
  for (int k = 0; k < p_.B.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(p_.B, k); it; ++it)
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                        it.value() * col_scale_(it.col()) / row_scale_(it.row()));
  for (int k = 0; k < p_.C.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(p_.C, k); it; ++it) {
      const Index row = it.row() + p_.B.rows();
      trip.emplace_back(static_cast<int>(row), static_cast<int>(it.col()),
                        it.value() * col_scale_(it.col()) / row_scale_(row));
    }
  A_.resize(m_, n9_);
  A_.setFromTriplets(trip.begin(), trip.end());

  a_.setZero(m_);
  b_.setZero(m_);
  for (Index i = 0; i < p_.B.rows(); ++i) {
    a_(i) = p_.f_live(i) / row_scale_(i);
    b_(i) = -p_.f_dead(i) / row_scale_(i);
  }

  G_.resize(3 * nf_, 9);
  fam_scale_.resize(static_cast<std::size_t>(nf_));
  fam_rot_.resize(static_cast<std::size_t>(nf_));
  const Eigen::Matrix<double, 9, 1> dc = col_scale_.head<9>();
  for (Index f = 0; f < nf_; ++f) {
    const auto& fam = p_.cones.families[static_cast<std::size_t>(f)];
    const double scale = p_.cone_unit(fam.kind);
    Mat39 g = fam.matrix * dc.asDiagonal() / scale;
    if (fam.kind == ConeKind::rotated) {
      const double r = 1.0 / std::sqrt(2.0);
      const Eigen::Matrix<double, 1, 9> r0 = g.row(0), r1 = g.row(1);
      g.row(0) = r * (r0 + r1);
      g.row(1) = r * (r0 - r1);
    }
    G_.middleRows<3>(3 * f) = g;
    fam_scale_[static_cast<std::size_t>(f)] = scale;
    fam_rot_[static_cast<std::size_t>(f)] = fam.kind == ConeKind::rotated;
  }

  {
    ConeVectors e = ConeVectors::Zero(3, D_);
    e.row(0).setConstant(penalty_);
    cx_ = St_times(e);
  }

  rc_ = 0;
  if (nf_ > 0) {
    Eigen::JacobiSVD<MatrixXd> svd(MatrixXd(G_), Eigen::ComputeFullV);
    const VectorXd sv = svd.singularValues();
    for (Index i = 0; i < sv.size(); ++i) rc_ += sv(i) > 1e-10 * sv(0);
    if (rc_ < 9) {
      Qc_ = svd.matrixV().leftCols(rc_);
      Qf_ = svd.matrixV().rightCols(9 - rc_);
    }
  }
  if (rc_ == 9) {
    Qc_ = MatrixXd::Identity(9, 9);
    Qf_.resize(9, 0);
  } else if (rc_ == 0) {
    Qc_.resize(9, 0);
    Qf_ = MatrixXd::Identity(9, 9);
  }
  nfree_ = 9 - rc_;
  Gc_ = G_ * Qc_;

  eta_.setOnes(D_);
  w_.setZero(3, D_);
  lam_.setZero(3, D_);
  hfac_.resize(static_cast<std::size_t>(N_));
  build_block_structure();
}

void Ipm::build_block_structure() {
  brows_.assign(static_cast<std::size_t>(N_), {});
  bD_.assign(static_cast<std::size_t>(N_), MatrixXd());
  bDc_.assign(static_cast<std::size_t>(N_), MatrixXd());
  for (Index k = 0; k < N_; ++k) {
    auto& rows = brows_[static_cast<std::size_t>(k)];
    for (int c = 0; c < 9; ++c)
      for (SparseMatrix::InnerIterator it(A_, 9 * k + c); it; ++it)
        rows.push_back(static_cast<int>(it.row()));
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    MatrixXd Dk = MatrixXd::Zero(static_cast<Index>(rows.size()), 9);
    for (int c = 0; c < 9; ++c)
      for (SparseMatrix::InnerIterator it(A_, 9 * k + c); it; ++it) {
        const auto pos = std::lower_bound(rows.begin(), rows.end(), it.row()) - rows.begin();
        Dk(pos, c) = it.value();
      }
    bDc_[static_cast<std::size_t>(k)] = Dk * Qc_;
    bD_[static_cast<std::size_t>(k)] = std::move(Dk);
  }

  std::vector<Eigen::Triplet<double>> trip;
  std::size_t count = static_cast<std::size_t>(m_);
  for (const auto& rows : brows_) count += rows.size() * (rows.size() + 1) / 2;
  trip.reserve(count);
  for (Index i = 0; i < m_; ++i)
    trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
  for (const auto& rows : brows_)
    for (std::size_t j = 0; j < rows.size(); ++j)
      for (std::size_t i = j; i < rows.size(); ++i)
        trip.emplace_back(rows[i], rows[j], 1.0);
  M_.resize(m_, m_);
  M_.setFromTriplets(trip.begin(), trip.end());
  M_.makeCompressed();

  auto position = [&](int row, int col) {
    const int* begin = M_.innerIndexPtr() + M_.outerIndexPtr()[col];
    const int* end = M_.innerIndexPtr() + M_.outerIndexPtr()[col + 1];
    return static_cast<int>(std::lower_bound(begin, end, row) - M_.innerIndexPtr());
  };
  mdiag_.resize(static_cast<std::size_t>(m_));
  for (Index i = 0; i < m_; ++i)
    mdiag_[static_cast<std::size_t>(i)] = position(static_cast<int>(i), static_cast<int>(i));
  bpos_.assign(static_cast<std::size_t>(N_), {});
  for (Index k = 0; k < N_; ++k) {
    const auto& rows = brows_[static_cast<std::size_t>(k)];
    auto& pos = bpos_[static_cast<std::size_t>(k)];
    pos.reserve(rows.size() * (rows.size() + 1) / 2);
    for (std::size_t j = 0; j < rows.size(); ++j)
      for (std::size_t i = j; i < rows.size(); ++i) pos.push_back(position(rows[i], rows[j]));
  }
  if (nfree_ > 0) build_augmented();
}

// K = [M_c  A_f; A_f'  -dI], lower triangle.  A_f and the free diagonal are
// fixed; M_c values are copied in at each factorization.
void Ipm::build_augmented() {
  const Index mk = m_ + nfree_ * N_;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(M_.nonZeros() + nfree_ * N_ * 8));
  for (int j = 0; j < M_.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(M_, j); it; ++it)
      trip.emplace_back(static_cast<int>(it.row()), j, 0.0);
  for (Index k = 0; k < N_; ++k) {
    const auto& rows = brows_[static_cast<std::size_t>(k)];
    const MatrixXd Df = bD_[static_cast<std::size_t>(k)] * Qf_;
    for (Index j = 0; j < nfree_; ++j) {
      const int col = static_cast<int>(m_ + nfree_ * k + j);
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (Df(static_cast<Index>(i), j) != 0.0)
          trip.emplace_back(col, rows[i], Df(static_cast<Index>(i), j));
      trip.emplace_back(col, col, -delta_);
    }
  }
  K_.resize(mk, mk);
  K_.setFromTriplets(trip.begin(), trip.end());
  K_.makeCompressed();
  kmap_.resize(static_cast<std::size_t>(M_.nonZeros()));
  for (int j = 0; j < M_.outerSize(); ++j)
    for (int p = M_.outerIndexPtr()[j]; p < M_.outerIndexPtr()[j + 1]; ++p) {
      const int* begin = K_.innerIndexPtr() + K_.outerIndexPtr()[j];
      const int* end = K_.innerIndexPtr() + K_.outerIndexPtr()[j + 1];
      kmap_[static_cast<std::size_t>(p)] =
          static_cast<int>(std::lower_bound(begin, end, M_.innerIndexPtr()[p]) - K_.innerIndexPtr());
    }
  aug_.analyzePattern(K_);
}

ConeVectors Ipm::S_times(const VectorXd& x) const {
  Eigen::Map<const MatrixXd> X(x.data(), 9, N_);
  ConeVectors out(3, D_);
  Eigen::Map<MatrixXd>(out.data(), 3 * nf_, N_).noalias() = G_ * X;
  return out;
}

VectorXd Ipm::St_times(const ConeVectors& z) const {
  Eigen::Map<const MatrixXd> Z(z.data(), 3 * nf_, N_);
  VectorXd out(n9_);
  Eigen::Map<MatrixXd>(out.data(), 9, N_).noalias() = G_.transpose() * Z;
  return out;
}

Vector3d Ipm::W(Index c, const Vector3d& x) const {
  const double a = w_(0, c);
  const Eigen::Vector2d q = w_.col(c).tail<2>();
  const double qx = q.dot(x.tail<2>());
  Vector3d r;
  r(0) = a * x(0) + qx;
  r.tail<2>() = x.tail<2>() + (x(0) + qx / (1.0 + a)) * q;
  return eta_(c) * r;
}

Vector3d Ipm::Winv(Index c, const Vector3d& x) const {
  const double a = w_(0, c);
  const Eigen::Vector2d q = w_.col(c).tail<2>();
  const double qx = q.dot(x.tail<2>());
  Vector3d r;
  r(0) = a * x(0) - qx;
  r.tail<2>() = x.tail<2>() + (-x(0) + qx / (1.0 + a)) * q;
  return r / eta_(c);
}

Vector3d Ipm::W2(Index c, const Vector3d& x) const {
  const Vector3d w = w_.col(c);
  Vector3d jx(x(0), -x(1), -x(2));
  return eta_(c) * eta_(c) * (2.0 * w.dot(x) * w - jx);
}

Vector3d Ipm::Winv2(Index c, const Vector3d& x) const {
  const Vector3d jw(w_(0, c), -w_(1, c), -w_(2, c));
  Vector3d jx(x(0), -x(1), -x(2));
  return (2.0 * jw.dot(x) * jw - jx) / (eta_(c) * eta_(c));
}

void Ipm::identity_scaling() {
  eta_.setOnes();
  w_.setZero();
  w_.row(0).setOnes();
}

bool Ipm::update_scaling(const ConeVectors& s, const ConeVectors& z) {
  for (Index c = 0; c < D_; ++c) {
    const Vector3d sc = s.col(c), zc = z.col(c);
    const double sr = soc_res(sc), zr = soc_res(zc);
    if (!(sr > 0.0) || !(zr > 0.0) || sc(0) <= 0.0 || zc(0) <= 0.0) return false;
    const double sn = std::sqrt(sr), zn = std::sqrt(zr);
    const Vector3d sb = sc / sn, zb = zc / zn;
    const double g = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
    Vector3d w;
    w(0) = 0.5 / g * (sb(0) + zb(0));
    w.tail<2>() = 0.5 / g * (sb.tail<2>() - zb.tail<2>());
    // renormalize against rounding: a^2 - |q|^2 = 1
    w(0) = std::sqrt(1.0 + w.tail<2>().squaredNorm());
    w_.col(c) = w;
    eta_(c) = std::sqrt(sn / zn);
  }
  for (Index c = 0; c < D_; ++c) lam_.col(c) = W(c, z.col(c));
  return true;
}

bool Ipm::factorize() {
  // H_k = sum_f (W^-1 G_f)' (W^-1 G_f); formed from products so that it
  // stays semidefinite when W is badly conditioned.
  for (Index k = 0; k < N_; ++k) {
    MatH H = MatH::Zero(rc_, rc_);
    Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, 9> U(3, rc_);
    for (Index f = 0; f < nf_; ++f) {
      const Index c = k * nf_ + f;
      for (Index j = 0; j < rc_; ++j) U.col(j) = Winv(c, Gc_.block<3, 1>(3 * f, j));
      H.noalias() += U.transpose() * U;
    }
    // Nearly rank-deficient blocks need a shift that grows with the
    // block's own scale once W gets large.
    auto& llt = hfac_[static_cast<std::size_t>(k)];
    const double hmax = rc_ ? H.diagonal().maxCoeff() : 0.0;
    double shift = std::max(delta_, 1e-14 * hmax);
    for (;;) {
      MatH Hs = H;
      Hs.diagonal().array() += shift;
      llt.compute(Hs);
      if (llt.info() == Eigen::Success) break;
      shift *= 100.0;
      if (shift > 1e-4 * hmax) return false;
    }
  }

  std::fill(M_.valuePtr(), M_.valuePtr() + M_.nonZeros(), 0.0);
  for (Index k = 0; k < N_; ++k) {
    const auto& Dk = bDc_[static_cast<std::size_t>(k)];
    const auto& pos = bpos_[static_cast<std::size_t>(k)];
    MatrixXd Y = Dk.transpose();
    hfac_[static_cast<std::size_t>(k)].matrixL().solveInPlace(Y);
    const MatrixXd Bk = Y.transpose() * Y;
    std::size_t idx = 0;
    for (Index j = 0; j < Bk.cols(); ++j)
      for (Index i = j; i < Bk.rows(); ++i) M_.valuePtr()[pos[idx++]] += Bk(i, j);
  }
  if (nfree_ > 0) return factorize_augmented();
  if (!analyzed_) {
    factor_.analyzePattern(M_);
    analyzed_ = true;
  }
  // Normal equations lose definiteness to rounding near the optimum; retry
  // with a growing diagonal shift and let iterative refinement absorb it.
  double maxdiag = 0.0;
  for (int d : mdiag_) maxdiag = std::max(maxdiag, M_.valuePtr()[d]);
  double shift = std::max(delta_, 1e-15 * maxdiag);
  double applied = 0.0;
  for (;;) {
    for (int d : mdiag_) M_.valuePtr()[d] += shift - applied;
    applied = shift;
    factor_.factorize(M_);
    if (factor_.info() == Eigen::Success) break;
    shift *= 100.0;
    if (shift > 1e-4 * maxdiag) return false;
  }
  v_ = factor_.solve(a_);
  av_ = a_.dot(v_);
  return std::isfinite(av_) && av_ > 0.0;
}

bool Ipm::factorize_augmented() {
  double* kv = K_.valuePtr();
  const double* mv = M_.valuePtr();
  for (std::size_t p = 0; p < kmap_.size(); ++p) kv[kmap_[p]] = mv[p];
  double maxdiag = 0.0;
  for (int d : mdiag_) maxdiag = std::max(maxdiag, mv[d]);
  double shift = std::max(delta_, 1e-15 * maxdiag);
  for (;;) {
    for (int d : mdiag_) kv[kmap_[static_cast<std::size_t>(d)]] = mv[d] + shift;
    aug_.factorize(K_);
    if (aug_.info() == Eigen::Success) break;
    shift *= 100.0;
    if (shift > 1e-4 * maxdiag) return false;
  }
  VectorXd rhs = VectorXd::Zero(K_.rows());
  rhs.head(m_) = a_;
  const VectorXd sol = aug_.solve(rhs);
  v_ = sol.head(m_);
  vf_ = sol.tail(nfree_ * N_);
  av_ = a_.dot(v_);
  return std::isfinite(av_) && av_ > 0.0;
}

// Regularized solve of
//   [ dI   A'  G' ] [dx]   [r.x, r.lam]
//   [ A   -dI  0  ] [dy] = [r.y]
//   [ G    0  -W2 ] [dz]   [r.z]
void Ipm::solve_reduced(const KktVec& r, KktVec& d) const {
  ConeVectors t(3, D_);
  for (Index c = 0; c < D_; ++c) t.col(c) = Winv2(c, r.z.col(c));
  // G = -S, so G' W^-2 r_z = -S' W^-2 r_z
  const VectorXd q = r.x - St_times(t);
  VectorXd hq(n9_);
  for (Index k = 0; k < N_; ++k)
    hq.segment<9>(9 * k) =
        Qc_ * hfac_[static_cast<std::size_t>(k)].solve(Qc_.transpose() * q.segment<9>(9 * k));
  const VectorXd g = A_ * hq - r.y;
  VectorXd wv, zf;
  if (nfree_ == 0) {
    wv = factor_.solve(g);
  } else {
    VectorXd rhs(K_.rows());
    rhs.head(m_) = g;
    for (Index k = 0; k < N_; ++k)
      rhs.segment(m_ + nfree_ * k, nfree_) = Qf_.transpose() * q.segment<9>(9 * k);
    const VectorXd sol = aug_.solve(rhs);
    wv = sol.head(m_);
    zf = sol.tail(nfree_ * N_);
  }
  d.lam = (r.lam - a_.dot(wv)) / (av_ + delta_);
  d.y = wv + d.lam * v_;
  if (nfree_ > 0) zf += d.lam * vf_;
  const VectorXd aty = A_.transpose() * d.y;
  d.x.resize(n9_);
  for (Index k = 0; k < N_; ++k) {
    d.x.segment<9>(9 * k) =
        hq.segment<9>(9 * k) -
        Qc_ * hfac_[static_cast<std::size_t>(k)].solve(Qc_.transpose() * aty.segment<9>(9 * k));
    // z = -x_f
    if (nfree_ > 0) d.x.segment<9>(9 * k) -= Qf_ * zf.segment(nfree_ * k, nfree_);
  }
  const ConeVectors sx = S_times(d.x);
  d.z.resize(3, D_);
  for (Index c = 0; c < D_; ++c) d.z.col(c) = -Winv2(c, sx.col(c) + r.z.col(c));
}

// e = r - K d for the unregularized K.
void Ipm::kkt_residual(const KktVec& r, const KktVec& d, KktVec& e) const {
  e.x = r.x - (A_.transpose() * d.y - St_times(d.z));
  e.lam = r.lam - a_.dot(d.y);
  e.y = r.y - (A_ * d.x + a_ * d.lam);
  const ConeVectors sx = S_times(d.x);
  e.z.resize(3, D_);
  for (Index c = 0; c < D_; ++c)
    e.z.col(c) = r.z.col(c) - (-sx.col(c) - W2(c, d.z.col(c)));
}

void Ipm::solve_kkt(const KktVec& r, KktVec& d) const {
  solve_reduced(r, d);
  KktVec e, corr;
  kkt_residual(r, d, e);
  double err = e.inf_norm();
  const double target = 1e-11 * (1.0 + r.inf_norm());
  for (int it = 0; it < opt_.refine_steps && err > target; ++it) {
    solve_reduced(e, corr);
    KktVec trial = d;
    trial.axpy(1.0, corr);
    KktVec e2;
    kkt_residual(r, trial, e2);
    const double err2 = e2.inf_norm();
    if (!(err2 < err)) break;
    d = std::move(trial);
    e = std::move(e2);
    err = err2;
  }
}

ConeVectors Ipm::bring_to_cone(const ConeVectors& r) const {
  double alpha = -kInf;
  for (Index c = 0; c < D_; ++c)
    alpha = std::max(alpha, r.col(c).tail<2>().norm() - r(0, c));
  ConeVectors s = r;
  if (alpha >= 0.0) s.row(0).array() += 1.0 + alpha;
  return s;
}

double Ipm::line_search(const ConeVectors& lam, const ConeVectors& ds,
                        const ConeVectors& dz, double tau, double dtau,
                        double kap, double dkap) const {
  double alpha = kInf;
  for (Index c = 0; c < D_; ++c) {
    alpha = std::min(alpha, soc_max_step(lam.col(c), ds.col(c)));
    alpha = std::min(alpha, soc_max_step(lam.col(c), dz.col(c)));
  }
  if (dtau < 0.0) alpha = std::min(alpha, -tau / dtau);
  if (dkap < 0.0) alpha = std::min(alpha, -kap / dkap);
  return alpha;
}

SolveReport Ipm::run() {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  SolveReport rep;
  setup();
  const auto t1 = clock::now();
  rep.setup_seconds = std::chrono::duration<double>(t1 - t0).count();

  auto finish = [&](SolveStatus st, const std::string& msg) {
    rep.status = st;
    rep.message = msg;
    rep.solve_seconds = std::chrono::duration<double>(clock::now() - t1).count();
    return rep;
  };

  identity_scaling();
  if (!factorize()) return finish(SolveStatus::numerical_trouble, "initial factorization failed");

  // Initial point: least-squares primal with W = I, then dual.
  KktVec rhs, d;
  rhs.resize(n9_, m_, D_);
  rhs.y = b_;
  solve_kkt(rhs, d);
  VectorXd x = d.x;
  double lam = d.lam;
  ConeVectors s = bring_to_cone(-d.z);
  rhs.resize(n9_, m_, D_);
  rhs.lam = 1.0;  // -c
  rhs.x = -cx_;
  solve_kkt(rhs, d);
  VectorXd y = d.y;
  ConeVectors z = bring_to_cone(d.z);
  double tau = 1.0, kap = 1.0;

  const double resx0 = 1.0;
  const double resy0 = std::max(1.0, b_.norm());
  const double resz0 = 1.0;

  KktVec d1, d2, r2;
  r2.resize(n9_, m_, D_);
  KktVec r1;
  r1.resize(n9_, m_, D_);
  r1.lam = 1.0;
  r1.x = -cx_;
  r1.y = b_;

  SolveStatus status = SolveStatus::numerical_trouble;
  std::string message = "iteration limit reached";
  int iter = 0;
  double pres = kInf, dres = kInf, relgap = kInf;
  // last resort when the iteration stalls near the optimum
  struct Best {
    double merit = kInf, pres, dres, relgap;
    VectorXd x, y;
    ConeVectors s, z;
    double lam, tau;
  } best;
  for (;; ++iter) {
    // residuals
    const VectorXd aty = A_.transpose() * y;
    const VectorXd stz = St_times(z);
    const VectorXd hrx = -aty + stz;
    const VectorXd rx = hrx - tau * cx_;
    const double hrx_lam = -a_.dot(y);
    const VectorXd hry = A_ * x + a_ * lam;
    const ConeVectors sx = S_times(x);
    const ConeVectors hrz = s - sx;
    const VectorXd ry = hry - tau * b_;
    const double cx = -lam + cx_.dot(x);
    const double by = b_.dot(y);
    const double rt = kap + cx + by;
    const double rx_lam = hrx_lam + tau;

    const double nx = std::sqrt(x.squaredNorm() + lam * lam);
    const double ny = y.norm(), nz = z.norm(), ns = s.norm();
    const double nrx = std::sqrt(rx.squaredNorm() + rx_lam * rx_lam);
    const double gap = (s.array() * z.array()).sum();
    const double mu = (gap + kap * tau) / static_cast<double>(D_ + 1);
    const double pcost = cx / tau;
    const double dcost = -by / tau;
    pres = std::max(ry.norm() / std::max(resy0 + nx, 1.0),
                    hrz.norm() / std::max(resz0 + nx + ns, 1.0)) / tau;
    dres = nrx / std::max(resx0 + ny + nz, 1.0) / tau;
    const double gap_n = gap / (tau * tau);
    relgap = gap_n / std::max(1.0, std::abs(pcost));

    if (opt_.verbose)
      std::fprintf(stderr, "%3d  pcost %+.9e  dcost %+.9e  gap %.2e  pres %.2e  dres %.2e  k/t %.2e\n",
                   iter, pcost, dcost, gap_n, pres, dres, kap / tau);

    const double merit = std::max({pres / opt_.feastol, dres / opt_.feastol,
                                   std::min(gap_n / opt_.abstol, relgap / opt_.reltol)});
    if (merit < best.merit) best = {merit, pres, dres, relgap, x, y, s, z, lam, tau};
    if (pres < opt_.feastol && dres < opt_.feastol &&
        (gap_n < opt_.abstol || relgap < opt_.reltol)) {
      status = SolveStatus::optimal;
      message = "converged";
      break;
    }
    if (by / std::max(ny + nz, 1.0) < -opt_.reltol) {
      const double pinf =
          std::sqrt(hrx.squaredNorm() + hrx_lam * hrx_lam) / std::max(ny + nz, 1.0);
      if (pinf < opt_.feastol && tau < kap) {
        status = SolveStatus::infeasible;
        message = "primal infeasibility certificate found";
        break;
      }
    }
    if (cx / std::max(nx, 1.0) < -opt_.reltol) {
      const double dinf = std::max(hry.norm() / std::max(nx, 1.0),
                                   hrz.norm() / std::max(nx + ns, 1.0));
      if (dinf < opt_.feastol && tau < kap) {
        status = SolveStatus::unbounded;
        message = "dual infeasibility certificate found";
        break;
      }
    }
    if (iter >= opt_.max_iter) break;

    if (!update_scaling(s, z)) {
      message = "iterate left the cone";
      break;
    }
    if (!factorize()) {
      message = "factorization failed";
      break;
    }

    solve_kkt(r1, d1);
    const double c_d1 = -d1.lam + cx_.dot(d1.x), b_d1 = b_.dot(d1.y);
    const double denom = kap / tau - c_d1 - b_d1;

    // affine direction
    r2.x = rx;
    r2.lam = rx_lam;
    r2.y = -ry;
    r2.z = -hrz + s;
    solve_kkt(r2, d2);
    const double dtau_a = (rt - kap + (-d2.lam + cx_.dot(d2.x)) + b_.dot(d2.y)) / denom;
    KktVec da = d2;
    da.axpy(dtau_a, d1);
    ConeVectors wdz(3, D_), dsw(3, D_);
    for (Index c = 0; c < D_; ++c) {
      wdz.col(c) = W(c, da.z.col(c));
      dsw.col(c) = -lam_.col(c) - wdz.col(c);
    }
    const double dkap_a = -kap - kap / tau * dtau_a;
    const double alpha_a =
        std::min(1.0, line_search(lam_, dsw, wdz, tau, dtau_a, kap, dkap_a));
    const double sigma = std::clamp(std::pow(1.0 - alpha_a, 3), 1e-4, 1.0);

    // combined direction
    ConeVectors dsc(3, D_);
    for (Index c = 0; c < D_; ++c) {
      Vector3d v = conic_prod(lam_.col(c), lam_.col(c)) + conic_prod(dsw.col(c), wdz.col(c));
      v(0) -= sigma * mu;
      dsc.col(c) = v;
    }
    r2.x = (1.0 - sigma) * rx;
    r2.lam = (1.0 - sigma) * rx_lam;
    r2.y = -(1.0 - sigma) * ry;
    for (Index c = 0; c < D_; ++c)
      r2.z.col(c) = -(1.0 - sigma) * hrz.col(c) + W(c, conic_div(lam_.col(c), dsc.col(c)));
    solve_kkt(r2, d2);
    const double bkap = kap * tau + dkap_a * dtau_a - sigma * mu;
    const double dtau =
        ((1.0 - sigma) * rt - bkap / tau + (-d2.lam + cx_.dot(d2.x)) + b_.dot(d2.y)) / denom;
    KktVec dc = d2;
    dc.axpy(dtau, d1);
    for (Index c = 0; c < D_; ++c) {
      wdz.col(c) = W(c, dc.z.col(c));
      dsw.col(c) = -conic_div(lam_.col(c), dsc.col(c)) - wdz.col(c);
    }
    const double dkap = -(bkap + kap * dtau) / tau;
    const double alpha =
        0.99 * std::min(0.999, line_search(lam_, dsw, wdz, tau, dtau, kap, dkap));
    if (!(alpha > 1e-10)) {
      message = "step length too small";
      break;
    }

    x += alpha * dc.x;
    lam += alpha * dc.lam;
    y += alpha * dc.y;
    z += alpha * dc.z;
    for (Index c = 0; c < D_; ++c) s.col(c) += alpha * W(c, dsw.col(c));
    tau += alpha * dtau;
    kap += alpha * dkap;
    if (!std::isfinite(tau) || !std::isfinite(kap) || !x.allFinite()) {
      message = "non-finite iterate";
      break;
    }
  }

  if (status == SolveStatus::numerical_trouble && best.merit <= kInaccurate) {
    x = best.x;
    y = best.y;
    s = best.s;
    z = best.z;
    lam = best.lam;
    tau = best.tau;
    pres = best.pres;
    dres = best.dres;
    relgap = best.relgap;
    status = SolveStatus::optimal;
    message = "converged to reduced accuracy (" + message + ")";
  }

  rep.iterations = iter;
  rep.primal_residual = pres;
  rep.dual_residual = dres;
  rep.gap = relgap;

  // Infeasibility certificates are reported unnormalized.
  const double scale = status == SolveStatus::optimal ||
                               status == SolveStatus::numerical_trouble
                           ? 1.0 / tau
                           : 1.0;
  const VectorXd xs = x * scale;
  rep.lambda = lam * scale;
  rep.x_hat = xs.cwiseProduct(col_scale_);
  const VectorXd ys = (y * scale).cwiseQuotient(row_scale_);
  rep.u = ys.head(p_.B.rows());
  rep.bc_mult = ys.tail(p_.C.rows());
  rep.flows.resize(3, D_);
  rep.cone_duals.resize(3, D_);
  for (Index c = 0; c < D_; ++c) {
    const auto f = static_cast<std::size_t>(c % nf_);
    Vector3d zc = z.col(c) * scale;
    // duals of the unpenalized program
    if (scale != 1.0) zc(0) -= penalty_;
    if (fam_rot_[f]) zc = rot_to_soc(zc);
    rep.flows.col(c) = zc;
    rep.cone_duals.col(c) = zc / fam_scale_[f];
  }
  return finish(status, message);
}

}  // namespace

SolveReport solve(const ConicProgram& program, const SolverOptions& opts) {
  SolveReport rep = Ipm(program, opts).run();
  if (rep.status != SolveStatus::numerical_trouble) return rep;
  // An unbounded optimal face lets the iterates drift off to infinity.  A
  // tiny push towards the cone axes bounds it; the multiplier moves by O(eps).
  int iters = rep.iterations;
  for (double eps : kFacePenalty) {
    SolveReport retry = Ipm(program, opts, eps).run();
    iters += retry.iterations;
    if (retry.status == SolveStatus::optimal) {
      retry.iterations = iters;
      return retry;
    }
  }
  return rep;
}

}  // namespace dome
