#pragma once

#include <optional>
#include <vector>

#include "locmat/field.hpp"

namespace locmat {

/// Exact dense matrix over a FieldSpec. Small sizes only; this is the
/// elimination backend for inversion, nullspaces and rank computations.
class DenseMatrix {
public:
    DenseMatrix(FieldSpec field, int rows, int cols)
        : field_(field), rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, Scalar::zero(field)) {}

    static DenseMatrix identity(FieldSpec field, int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const FieldSpec& field() const { return field_; }

    Scalar& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    const Scalar& at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    DenseMatrix mul(const DenseMatrix& o) const;
    DenseMatrix add(const DenseMatrix& o) const;
    DenseMatrix sub(const DenseMatrix& o) const;

    bool is_zero() const;
    bool operator==(const DenseMatrix& o) const;

    Scalar trace() const;
    int rank() const;

    /// Gauss-Jordan inverse; nullopt when singular.
    std::optional<DenseMatrix> inverse() const;

private:
    FieldSpec field_;
    int rows_, cols_;
    std::vector<Scalar> data_;
};

/// Basis of the right nullspace via exact Gaussian elimination with
/// deterministic pivoting (first nonzero column, first nonzero row). Each
/// basis vector is normalized so its first nonzero coordinate equals 1.
std::vector<std::vector<Scalar>> solve_kernel(const DenseMatrix& m);

/// Incremental exact rank: feed coordinate vectors one at a time.
class RankTracker {
public:
    explicit RankTracker(FieldSpec field) : field_(field) {}
    /// Inserts the vector, returns the rank after insertion.
    int insert(std::vector<Scalar> v);
    int rank() const { return static_cast<int>(rows_.size()); }

private:
    FieldSpec field_;
    std::vector<std::vector<Scalar>> rows_; // reduced, each with leading 1
    std::vector<size_t> pivots_;
};

} // namespace locmat
