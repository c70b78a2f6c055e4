#include "dynsparse/linops.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace dynsparse {

namespace {

Field join(Field a, Field b) {
  return (a == Field::Complex || b == Field::Complex) ? Field::Complex : Field::Real;
}

template <class M>
Field matrix_field(const M& m) {
  return (m.size() > 0 && m.imag().cwiseAbs().maxCoeff() > 0.0) ? Field::Complex : Field::Real;
}

void require(const MapPtr& m, const char* what) {
  if (!m) throw std::invalid_argument(std::string(what) + ": null operator");
}

}  // namespace

LinearMap::LinearMap(OperatorShape shape) : shape_(shape) {
  if (shape.rows < 0 || shape.cols < 0) throw std::invalid_argument("operator dimensions must be nonnegative");
}

Vec LinearMap::apply(const Vec& x) const {
  check_size("apply", cols(), x.size());
  Vec out(rows());
  apply_into(x, out);
  return out;
}

Vec LinearMap::adjoint_apply(const Vec& y) const {
  check_size("adjoint_apply", rows(), y.size());
  Vec out(cols());
  adjoint_into(y, out);
  return out;
}

// ---------------------------------------------------------------------------

IdentityMap::IdentityMap(Index n, Field field) : LinearMap({n, n, field}) {}
void IdentityMap::apply_into(const Vec& x, Vec& out) const { out = x; }
void IdentityMap::adjoint_into(const Vec& y, Vec& out) const { out = y; }

ZeroMap::ZeroMap(Index rows, Index cols, Field field) : LinearMap({rows, cols, field}) {}
void ZeroMap::apply_into(const Vec&, Vec& out) const { out.setZero(); }
void ZeroMap::adjoint_into(const Vec&, Vec& out) const { out.setZero(); }

DenseMap::DenseMap(Mat matrix)
    : LinearMap({matrix.rows(), matrix.cols(), matrix_field(matrix)}), matrix_(std::move(matrix)) {}
DenseMap::DenseMap(const RealMat& matrix) : LinearMap({matrix.rows(), matrix.cols(), Field::Real}) {
  matrix_ = matrix.cast<Scalar>();
}
void DenseMap::apply_into(const Vec& x, Vec& out) const { out.noalias() = matrix_ * x; }
void DenseMap::adjoint_into(const Vec& y, Vec& out) const { out.noalias() = matrix_.adjoint() * y; }

DiagonalMap::DiagonalMap(Vec diagonal)
    : LinearMap({diagonal.size(), diagonal.size(), matrix_field(diagonal)}),
      diag_(std::move(diagonal)) {}
DiagonalMap::DiagonalMap(const RealVec& diagonal) : LinearMap({diagonal.size(), diagonal.size(), Field::Real}) {
  diag_ = diagonal.cast<Scalar>();
}
void DiagonalMap::apply_into(const Vec& x, Vec& out) const { out = diag_.cwiseProduct(x); }
void DiagonalMap::adjoint_into(const Vec& y, Vec& out) const { out = diag_.conjugate().cwiseProduct(y); }

ScaledMap::ScaledMap(Scalar alpha, MapPtr inner)
    : LinearMap({inner ? inner->rows() : 0, inner ? inner->cols() : 0,
                 inner ? join(inner->field(), alpha.imag() != 0.0 ? Field::Complex : Field::Real) : Field::Real}),
      alpha_(alpha),
      inner_(std::move(inner)) {
  require(inner_, "ScaledMap");
}
void ScaledMap::apply_into(const Vec& x, Vec& out) const {
  forward_of(*inner_, x, out);
  out *= alpha_;
}
void ScaledMap::adjoint_into(const Vec& y, Vec& out) const {
  adjoint_of(*inner_, y, out);
  out *= std::conj(alpha_);
}

AdjointMap::AdjointMap(MapPtr inner)
    : LinearMap({inner ? inner->cols() : 0, inner ? inner->rows() : 0, inner ? inner->field() : Field::Real}),
      inner_(std::move(inner)) {
  require(inner_, "AdjointMap");
}
void AdjointMap::apply_into(const Vec& x, Vec& out) const { adjoint_of(*inner_, x, out); }
void AdjointMap::adjoint_into(const Vec& y, Vec& out) const { forward_of(*inner_, y, out); }

ComposeMap::ComposeMap(MapPtr outer, MapPtr inner)
    : LinearMap({outer ? outer->rows() : 0, inner ? inner->cols() : 0,
                 outer && inner ? join(outer->field(), inner->field()) : Field::Real}),
      outer_(std::move(outer)),
      inner_(std::move(inner)) {
  require(outer_, "ComposeMap");
  require(inner_, "ComposeMap");
  check_size("compose: outer.cols vs inner.rows", outer_->cols(), inner_->rows());
}
void ComposeMap::apply_into(const Vec& x, Vec& out) const {
  Vec mid(inner_->rows());
  forward_of(*inner_, x, mid);
  forward_of(*outer_, mid, out);
}
void ComposeMap::adjoint_into(const Vec& y, Vec& out) const {
  Vec mid(outer_->cols());
  adjoint_of(*outer_, y, mid);
  adjoint_of(*inner_, mid, out);
}

namespace {
OperatorShape stack_shape(const std::vector<MapPtr>& blocks, bool diagonal) {
  if (blocks.empty()) throw std::invalid_argument("operator stack needs at least one block");
  OperatorShape s{0, 0, Field::Real};
  for (const auto& b : blocks) {
    require(b, "stack");
    s.rows += b->rows();
    s.cols = diagonal ? s.cols + b->cols() : b->cols();
    s.field = join(s.field, b->field());
  }
  return s;
}
}  // namespace

VStackMap::VStackMap(std::vector<MapPtr> blocks) : LinearMap(stack_shape(blocks, false)), blocks_(std::move(blocks)) {
  for (const auto& b : blocks_) check_size("vstack: block column count", blocks_.front()->cols(), b->cols());
}
void VStackMap::apply_into(const Vec& x, Vec& out) const {
  Index off = 0;
  for (const auto& b : blocks_) {
    Vec part(b->rows());
    forward_of(*b, x, part);
    out.segment(off, b->rows()) = part;
    off += b->rows();
  }
}
void VStackMap::adjoint_into(const Vec& y, Vec& out) const {
  out.setZero();
  Index off = 0;
  Vec part(cols());
  for (const auto& b : blocks_) {
    adjoint_of(*b, y.segment(off, b->rows()), part);
    out += part;
    off += b->rows();
  }
}

BlockDiagonalMap::BlockDiagonalMap(std::vector<MapPtr> blocks)
    : LinearMap(stack_shape(blocks, true)), blocks_(std::move(blocks)) {
  Index r = 0, c = 0;
  for (const auto& b : blocks_) {
    row_off_.push_back(r);
    col_off_.push_back(c);
    r += b->rows();
    c += b->cols();
  }
}
void BlockDiagonalMap::apply_into(const Vec& x, Vec& out) const {
  for (std::size_t t = 0; t < blocks_.size(); ++t) {
    const auto& b = *blocks_[t];
    Vec part(b.rows());
    forward_of(b, x.segment(col_off_[t], b.cols()), part);
    out.segment(row_off_[t], b.rows()) = part;
  }
}
void BlockDiagonalMap::adjoint_into(const Vec& y, Vec& out) const {
  for (std::size_t t = 0; t < blocks_.size(); ++t) {
    const auto& b = *blocks_[t];
    Vec part(b.cols());
    adjoint_of(b, y.segment(row_off_[t], b.rows()), part);
    out.segment(col_off_[t], b.cols()) = part;
  }
}

KroneckerMap::KroneckerMap(MapPtr left, MapPtr right)
    : LinearMap({left && right ? left->rows() * right->rows() : 0, left && right ? left->cols() * right->cols() : 0,
                 left && right ? join(left->field(), right->field()) : Field::Real}),
      left_(std::move(left)),
      right_(std::move(right)) {
  require(left_, "KroneckerMap");
  require(right_, "KroneckerMap");
}

void KroneckerMap::apply_into(const Vec& x, Vec& out) const {
  const Index ns = right_->cols(), ne = left_->cols();
  const Index np = right_->rows(), nt = left_->rows();
  Eigen::Map<const Mat> z(x.data(), ns, ne);
  Mat spatial(np, ne);
  Vec col(np);
  for (Index j = 0; j < ne; ++j) {
    forward_of(*right_, z.col(j), col);
    spatial.col(j) = col;
  }
  Eigen::Map<Mat> result(out.data(), np, nt);
  Vec row(nt);
  for (Index i = 0; i < np; ++i) {
    forward_of(*left_, spatial.row(i).transpose(), row);
    result.row(i) = row.transpose();
  }
}

void KroneckerMap::adjoint_into(const Vec& y, Vec& out) const {
  const Index ns = right_->cols(), ne = left_->cols();
  const Index np = right_->rows(), nt = left_->rows();
  Eigen::Map<const Mat> ym(y.data(), np, nt);
  Mat spatial(ns, nt);
  Vec col(ns);
  for (Index j = 0; j < nt; ++j) {
    adjoint_of(*right_, ym.col(j), col);
    spatial.col(j) = col;
  }
  Eigen::Map<Mat> result(out.data(), ns, ne);
  Vec row(ne);
  for (Index i = 0; i < ns; ++i) {
    adjoint_of(*left_, spatial.row(i).transpose(), row);
    result.row(i) = row.transpose();
  }
}

// ---------------------------------------------------------------------------

MapPtr identity(Index n, Field field) { return std::make_shared<IdentityMap>(n, field); }
MapPtr zero(Index rows, Index cols, Field field) { return std::make_shared<ZeroMap>(rows, cols, field); }
MapPtr dense(Mat matrix) { return std::make_shared<DenseMap>(std::move(matrix)); }
MapPtr dense(const RealMat& matrix) { return std::make_shared<DenseMap>(matrix); }
MapPtr diagonal(Vec d) { return std::make_shared<DiagonalMap>(std::move(d)); }
MapPtr diagonal(const RealVec& d) { return std::make_shared<DiagonalMap>(d); }
MapPtr scaled(Scalar alpha, MapPtr a) { return std::make_shared<ScaledMap>(alpha, std::move(a)); }
MapPtr adjoint(MapPtr a) { return std::make_shared<AdjointMap>(std::move(a)); }
MapPtr compose(MapPtr outer, MapPtr inner) { return std::make_shared<ComposeMap>(std::move(outer), std::move(inner)); }

MapPtr compose(std::vector<MapPtr> chain) {
  if (chain.empty()) throw std::invalid_argument("compose: empty chain");
  MapPtr acc = chain.back();
  for (auto it = chain.rbegin() + 1; it != chain.rend(); ++it) acc = compose(*it, acc);
  return acc;
}

MapPtr vstack(std::vector<MapPtr> blocks) { return std::make_shared<VStackMap>(std::move(blocks)); }
MapPtr block_diagonal(std::vector<MapPtr> blocks) { return std::make_shared<BlockDiagonalMap>(std::move(blocks)); }
std::shared_ptr<const KroneckerMap> kronecker(MapPtr left, MapPtr right) {
  return std::make_shared<KroneckerMap>(std::move(left), std::move(right));
}

Vec kron_apply(const KroneckerMap& k, const Vec& z) {
  if (z.size() != k.cols()) {
    throw SizeError("kron_apply: length is not right.cols * left.cols (" + std::to_string(k.right()->cols()) + " * " +
                        std::to_string(k.left()->cols()) + ")",
                    k.cols(), z.size());
  }
  return k.apply(z);
}

Vec kron_adjoint_apply(const KroneckerMap& k, const Vec& y) {
  if (y.size() != k.rows()) {
    throw SizeError("kron_adjoint_apply: length is not right.rows * left.rows (" + std::to_string(k.right()->rows()) +
                        " * " + std::to_string(k.left()->rows()) + ")",
                    k.rows(), y.size());
  }
  return k.adjoint_apply(y);
}

double dot_test(const LinearMap& a, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("dot_test: trials must be >= 1");
  const double eps = std::numeric_limits<double>::epsilon();
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto s = seed * 1000003ULL + 2ULL * static_cast<std::uint64_t>(t);
    const Vec x = gaussian_vector(a.cols(), s, a.field());
    const Vec y = gaussian_vector(a.rows(), s + 1, a.field());
    const Vec ax = a.apply(x);
    const Vec ahy = a.adjoint_apply(y);
    const Scalar lhs = ax.dot(y);   // (Ax)^H y
    const Scalar rhs = x.dot(ahy);  // x^H (A^H y)
    const double defect = std::abs(lhs - rhs) / (ax.norm() * y.norm() + eps);
    worst = std::max(worst, defect);
  }
  return worst;
}

Mat to_dense(const LinearMap& a) {
  Mat m(a.rows(), a.cols());
  Vec e = Vec::Zero(a.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    e[j] = 1.0;
    m.col(j) = a.apply(e);
    e[j] = 0.0;
  }
  return m;
}

}  // namespace dynsparse
