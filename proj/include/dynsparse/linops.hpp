#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "dynsparse/core.hpp"

namespace dynsparse {

struct OperatorShape {
  Index rows = 0;
  Index cols = 0;
  Field field = Field::Real;
};

/// Matrix-free linear operator. Implementations are immutable after
/// construction and may be applied concurrently from several threads.
class LinearMap {
public:
  virtual ~LinearMap() = default;

  const OperatorShape& shape() const { return shape_; }
  Index rows() const { return shape_.rows; }
  Index cols() const { return shape_.cols; }
  Field field() const { return shape_.field; }

  /// y = A x. Throws SizeError unless x.size() == cols().
  Vec apply(const Vec& x) const;
  /// x = A^H y. Throws SizeError unless y.size() == rows().
  Vec adjoint_apply(const Vec& y) const;

protected:
  explicit LinearMap(OperatorShape shape);

  // Sizes are already validated; `out` is preallocated.
  virtual void apply_into(const Vec& x, Vec& out) const = 0;
  virtual void adjoint_into(const Vec& y, Vec& out) const = 0;

  // Lets combinators call the unchecked entry points of their children.
  static void forward_of(const LinearMap& m, const Vec& x, Vec& out) { m.apply_into(x, out); }
  static void adjoint_of(const LinearMap& m, const Vec& y, Vec& out) { m.adjoint_into(y, out); }

private:
  OperatorShape shape_;
};

using MapPtr = std::shared_ptr<const LinearMap>;

class IdentityMap final : public LinearMap {
public:
  explicit IdentityMap(Index n, Field field = Field::Real);

protected:
  void apply_into(const Vec& x, Vec& out) const override;
  void adjoint_into(const Vec& y, Vec& out) const override;
};

class ZeroMap final : public LinearMap {
public:
  ZeroMap(Index rows, Index cols, Field field = Field::Real);

protected:
  void apply_into(const Vec& x, Vec& out) const override;
  void adjoint_into(const Vec& y, Vec& out) const override;
};

/// Explicit matrix; used for small problems and as a test oracle partner.
class DenseMap final : public LinearMap {
public:
  explicit DenseMap(Mat matrix);
  explicit DenseMap(const RealMat& matrix);

  const Mat& matrix() const { return matrix_; }

protected:
  void apply_into(const Vec& x, Vec& out) const override;
  void adjoint_into(const Vec& y, Vec& out) const override;

private:
  Mat matrix_;
};

/// diag(d). The adjoint uses conj(d).
class DiagonalMap final : public LinearMap {
public:
  explicit DiagonalMap(Vec diagonal);
  explicit DiagonalMap(const RealVec& diagonal);

  const Vec& diagonal() const { return diag_; }

protected:
  void apply_into(const Vec& x, Vec& out) const override;
  void adjoint_into(const Vec& y, Vec& out) const override;

private:
  Vec diag_;
};

/// alpha * A.
class ScaledMap final : public LinearMap {
public:
  ScaledMap(Scalar alpha, MapPtr inner);

protected:
  void apply_into(const Vec& x, Vec& out) const override;
  void adjoint_into(const Vec& y, Vec& out) const override;

private:
  Scalar alpha_;
  MapPtr inner_;
};

/// A^H as a map in its own right.
class AdjointMap final : public LinearMap {
public:
  explicit AdjointMap(MapPtr inner);

protected:
  void apply_into(const Vec& x, Vec& out) const override;
  void adjoint_into(const Vec& y, Vec& out) const override;

private:
  MapPtr inner_;
};

/// outer ∘ inner, i.e. x -> outer(inner(x)).
class ComposeMap final : public LinearMap {
public:
  ComposeMap(MapPtr outer, MapPtr inner);

protected:
  void apply_into(const Vec& x, Vec& out) const override;
  void adjoint_into(const Vec& y, Vec& out) const override;

private:
  MapPtr outer_;
  MapPtr inner_;
};

/// [A_1; A_2; ...] sharing one input; the adjoint sums the block adjoints.
class VStackMap final : public LinearMap {
public:
  explicit VStackMap(std::vector<MapPtr> blocks);

  const std::vector<MapPtr>& blocks() const { return blocks_; }

protected:
  void apply_into(const Vec& x, Vec& out) const override;
  void adjoint_into(const Vec& y, Vec& out) const override;

private:
  std::vector<MapPtr> blocks_;
};

/// diag(A_1, ..., A_T). Input segment t is read only by block t and output
/// segment t is written only by block t.
class BlockDiagonalMap final : public LinearMap {
public:
  explicit BlockDiagonalMap(std::vector<MapPtr> blocks);

  const std::vector<MapPtr>& blocks() const { return blocks_; }
  Index row_offset(std::size_t block) const { return row_off_[block]; }
  Index col_offset(std::size_t block) const { return col_off_[block]; }

protected:
  void apply_into(const Vec& x, Vec& out) const override;
  void adjoint_into(const Vec& y, Vec& out) const override;

private:
  std::vector<MapPtr> blocks_;
  std::vector<Index> row_off_;
  std::vector<Index> col_off_;
};

/// left ⊗ right, applied without forming the product.
///
/// The input of length right.cols * left.cols is read column-major as a
/// matrix Z (right.cols x left.cols). The forward pass applies `right` to each
/// column and then `left` to each row, returning vec(right Z left^T). With
/// left = E (temporal) and right = S (spatial) this is W z = (E ⊗ S) z.
class KroneckerMap final : public LinearMap {
public:
  KroneckerMap(MapPtr left, MapPtr right);

  const MapPtr& left() const { return left_; }
  const MapPtr& right() const { return right_; }

protected:
  void apply_into(const Vec& x, Vec& out) const override;
  void adjoint_into(const Vec& y, Vec& out) const override;

private:
  MapPtr left_;
  MapPtr right_;
};

// Factories returning shared handles.
MapPtr identity(Index n, Field field = Field::Real);
MapPtr zero(Index rows, Index cols, Field field = Field::Real);
MapPtr dense(Mat matrix);
MapPtr dense(const RealMat& matrix);
MapPtr diagonal(Vec d);
MapPtr diagonal(const RealVec& d);
MapPtr scaled(Scalar alpha, MapPtr a);
MapPtr adjoint(MapPtr a);
MapPtr compose(MapPtr outer, MapPtr inner);
MapPtr compose(std::vector<MapPtr> chain);  // chain[0] ∘ chain[1] ∘ ...
MapPtr vstack(std::vector<MapPtr> blocks);
MapPtr block_diagonal(std::vector<MapPtr> blocks);
std::shared_ptr<const KroneckerMap> kronecker(MapPtr left, MapPtr right);

/// (left ⊗ right) z, with the length check reported in Kronecker terms.
Vec kron_apply(const KroneckerMap& k, const Vec& z);
/// (left ⊗ right)^H y.
Vec kron_adjoint_apply(const KroneckerMap& k, const Vec& y);

/// Largest relative defect |<Ax,y> - <x,A^H y>| / (|Ax| |y| + eps) over
/// `trials` Gaussian pairs drawn from stream `seed`.
double dot_test(const LinearMap& a, int trials, std::uint64_t seed);

/// Dense matrix of a small operator, built column by column from apply().
Mat to_dense(const LinearMap& a);

}  // namespace dynsparse
