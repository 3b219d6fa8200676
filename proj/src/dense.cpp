#include "locmat/dense.hpp"

namespace locmat {

DenseMatrix DenseMatrix::identity(FieldSpec field, int n) {
    DenseMatrix m(field, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = Scalar::one(field);
    return m;
}

DenseMatrix DenseMatrix::mul(const DenseMatrix& o) const {
    check_same_field(field_, o.field_);
    if (cols_ != o.rows_) fail(Errc::ShapeMismatch, "dense dimension mismatch in mul");
    DenseMatrix r(field_, rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const Scalar& a = at(i, k);
            if (a.is_zero()) continue;
            for (int j = 0; j < o.cols_; ++j) {
                const Scalar& b = o.at(k, j);
                if (!b.is_zero()) r.at(i, j) = r.at(i, j) + a * b;
            }
        }
    return r;
}

DenseMatrix DenseMatrix::add(const DenseMatrix& o) const {
    check_same_field(field_, o.field_);
    if (rows_ != o.rows_ || cols_ != o.cols_) fail(Errc::ShapeMismatch, "dense dimension mismatch in add");
    DenseMatrix r(field_, rows_, cols_);
    for (size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] + o.data_[i];
    return r;
}

DenseMatrix DenseMatrix::sub(const DenseMatrix& o) const {
    check_same_field(field_, o.field_);
    if (rows_ != o.rows_ || cols_ != o.cols_) fail(Errc::ShapeMismatch, "dense dimension mismatch in sub");
    DenseMatrix r(field_, rows_, cols_);
    for (size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] - o.data_[i];
    return r;
}

bool DenseMatrix::is_zero() const {
    for (const auto& v : data_)
        if (!v.is_zero()) return false;
    return true;
}

bool DenseMatrix::operator==(const DenseMatrix& o) const {
    return field_ == o.field_ && rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

Scalar DenseMatrix::trace() const {
    Scalar t = Scalar::zero(field_);
    for (int i = 0; i < std::min(rows_, cols_); ++i) t = t + at(i, i);
    return t;
}

namespace {

// In-place reduced row echelon form with deterministic pivoting: scan columns
// left to right, take the first nonzero row at or below the current one.
// Returns the pivot columns.
std::vector<int> rref_in_place(DenseMatrix& m) {
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
        int pr = -1;
        for (int r = row; r < m.rows(); ++r)
            if (!m.at(r, col).is_zero()) {
                pr = r;
                break;
            }
        if (pr < 0) continue;
        if (pr != row)
            for (int c = 0; c < m.cols(); ++c) std::swap(m.at(pr, c), m.at(row, c));
        Scalar inv = m.at(row, col).inverse();
        for (int c = col; c < m.cols(); ++c) m.at(row, c) = m.at(row, c) * inv;
        for (int r = 0; r < m.rows(); ++r) {
            if (r == row || m.at(r, col).is_zero()) continue;
            Scalar f = m.at(r, col);
            for (int c = col; c < m.cols(); ++c) m.at(r, c) = m.at(r, c) - f * m.at(row, c);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

} // namespace

int DenseMatrix::rank() const {
    DenseMatrix copy = *this;
    return static_cast<int>(rref_in_place(copy).size());
}

std::optional<DenseMatrix> DenseMatrix::inverse() const {
    if (rows_ != cols_) fail(Errc::ShapeMismatch, "inverse of a non-square matrix");
    // Gauss-Jordan on [A | I]
    DenseMatrix aug(field_, rows_, 2 * cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) aug.at(i, j) = at(i, j);
        aug.at(i, cols_ + i) = Scalar::one(field_);
    }
    std::vector<int> pivots = rref_in_place(aug);
    if (static_cast<int>(pivots.size()) != rows_ || (rows_ > 0 && pivots.back() >= cols_)) return std::nullopt;
    for (int i = 0; i < rows_; ++i)
        if (pivots[i] != i) return std::nullopt;
    DenseMatrix inv(field_, rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) inv.at(i, j) = aug.at(i, cols_ + j);
    return inv;
}

std::vector<std::vector<Scalar>> solve_kernel(const DenseMatrix& m) {
    DenseMatrix r = m;
    std::vector<int> pivots = rref_in_place(r);
    std::vector<bool> is_pivot(static_cast<size_t>(m.cols()), false);
    for (int c : pivots) is_pivot[static_cast<size_t>(c)] = true;

    std::vector<std::vector<Scalar>> basis;
    for (int free = 0; free < m.cols(); ++free) {
        if (is_pivot[static_cast<size_t>(free)]) continue;
        std::vector<Scalar> v(static_cast<size_t>(m.cols()), Scalar::zero(m.field()));
        v[static_cast<size_t>(free)] = Scalar::one(m.field());
        for (size_t i = 0; i < pivots.size(); ++i) v[static_cast<size_t>(pivots[i])] = -r.at(static_cast<int>(i), free);
        // normalize the first nonzero coordinate to 1
        for (auto& c : v)
            if (!c.is_zero()) {
                Scalar inv = c.inverse();
                for (auto& x : v) x = x * inv;
                break;
            }
        basis.push_back(std::move(v));
    }
    return basis;
}

int RankTracker::insert(std::vector<Scalar> v) {
    for (size_t i = 0; i < rows_.size(); ++i) {
        const Scalar c = v[pivots_[i]]; // by value: the loop below overwrites v
        if (c.is_zero()) continue;
        for (size_t j = 0; j < v.size(); ++j) v[j] = v[j] - c * rows_[i][j];
    }
    for (size_t j = 0; j < v.size(); ++j) {
        if (v[j].is_zero()) continue;
        Scalar inv = v[j].inverse();
        for (auto& x : v) x = x * inv;
        rows_.push_back(std::move(v));
        pivots_.push_back(j);
        break;
    }
    return rank();
}

} // namespace locmat
