#include "locmat/minf.hpp"

#include <algorithm>
#include <sstream>

namespace locmat {

FinitaryMatrix FinitaryMatrix::unit(FieldSpec field, long row, long col) {
    FinitaryMatrix m(field);
    m.add_entry(row, col, Scalar::one(field));
    return m;
}

void FinitaryMatrix::add_entry(long row, long col, const Scalar& v) {
    if (row < 1 || col < 1) fail(Errc::IndexOutOfRange, "matrix indices are 1-based");
    if (v.is_zero()) return;
    auto key = std::make_pair(row, col);
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        entries_.emplace(key, v);
        return;
    }
    it->second = it->second + v;
    if (it->second.is_zero()) entries_.erase(it);
}

Scalar FinitaryMatrix::entry(long row, long col) const {
    auto it = entries_.find({row, col});
    return it == entries_.end() ? Scalar::zero(field_) : it->second;
}

FinitaryMatrix FinitaryMatrix::add(const FinitaryMatrix& o) const {
    check_same_field(field_, o.field_);
    FinitaryMatrix r = *this;
    for (const auto& [k, v] : o.entries_) r.add_entry(k.first, k.second, v);
    return r;
}

FinitaryMatrix FinitaryMatrix::sub(const FinitaryMatrix& o) const {
    check_same_field(field_, o.field_);
    FinitaryMatrix r = *this;
    for (const auto& [k, v] : o.entries_) r.add_entry(k.first, k.second, -v);
    return r;
}

FinitaryMatrix FinitaryMatrix::scale(const Scalar& c) const {
    FinitaryMatrix r(field_);
    if (c.is_zero()) return r;
    for (const auto& [k, v] : entries_) r.add_entry(k.first, k.second, v * c);
    return r;
}

FinitaryMatrix FinitaryMatrix::mul(const FinitaryMatrix& o) const {
    check_same_field(field_, o.field_);
    FinitaryMatrix r(field_);
    for (const auto& [k1, v1] : entries_)
        for (const auto& [k2, v2] : o.entries_)
            if (k1.second == k2.first) r.add_entry(k1.first, k2.second, v1 * v2);
    return r;
}

std::string FinitaryMatrix::str() const {
    if (entries_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : entries_) {
        if (!first) os << " + ";
        first = false;
        if (!v.is_one()) os << v.str() << "*";
        os << "e[" << k.first << "," << k.second << "]";
    }
    return os.str();
}

PatternMatrix PatternMatrix::from_finitary(FinitaryMatrix m) {
    PatternMatrix p(m.field());
    p.finitary_ = std::move(m);
    return p;
}

PatternMatrix PatternMatrix::family(FieldSpec field, Scalar coeff, AffineFamily fam) {
    PatternMatrix p(field);
    p.add_family(coeff, fam);
    p.normalize();
    return p;
}

PatternMatrix PatternMatrix::identity(FieldSpec field) {
    return family(field, Scalar::one(field), AffineFamily{1, 0, 1, 0, 1});
}

void PatternMatrix::add_finitary(long row, long col, const Scalar& v) { finitary_.add_entry(row, col, v); }

void PatternMatrix::add_family(const Scalar& coeff, const AffineFamily& fam) {
    if (fam.row_a < 1 || fam.col_a < 1) fail(Errc::IndexOutOfRange, "family index maps must be injective (slope >= 1)");
    if (fam.start < 1) fail(Errc::IndexOutOfRange, "family start must be >= 1");
    if (fam.row(fam.start) < 1 || fam.col(fam.start) < 1)
        fail(Errc::IndexOutOfRange, "family positions must stay >= 1");
    if (coeff.is_zero()) return;
    families_.emplace_back(coeff, fam);
}

PatternMatrix PatternMatrix::add(const PatternMatrix& o) const {
    check_same_field(field_, o.field_);
    PatternMatrix r = *this;
    r.finitary_ = r.finitary_.add(o.finitary_);
    for (const auto& [c, f] : o.families_) r.families_.emplace_back(c, f);
    r.normalize();
    return r;
}

PatternMatrix PatternMatrix::sub(const PatternMatrix& o) const { return add(o.scale(-Scalar::one(field_))); }

PatternMatrix PatternMatrix::scale(const Scalar& c) const {
    PatternMatrix r(field_);
    r.finitary_ = finitary_.scale(c);
    if (!c.is_zero())
        for (const auto& [c0, f] : families_) r.families_.emplace_back(c0 * c, f);
    r.normalize();
    return r;
}

bool PatternMatrix::operator==(const PatternMatrix& o) const {
    PatternMatrix a = *this, b = o;
    a.normalize();
    b.normalize();
    return a.finitary_ == b.finitary_ && a.families_ == b.families_;
}

DenseMatrix PatternMatrix::window_eval(long n) const {
    DenseMatrix m(field_, static_cast<int>(n), static_cast<int>(n));
    for (const auto& [k, v] : finitary_.entries())
        if (k.first <= n && k.second <= n)
            m.at(static_cast<int>(k.first) - 1, static_cast<int>(k.second) - 1) =
                m.at(static_cast<int>(k.first) - 1, static_cast<int>(k.second) - 1) + v;
    for (const auto& [c, f] : families_)
        for (long i = f.start; f.row(i) <= n && f.col(i) <= n; ++i)
            m.at(static_cast<int>(f.row(i)) - 1, static_cast<int>(f.col(i)) - 1) =
                m.at(static_cast<int>(f.row(i)) - 1, static_cast<int>(f.col(i)) - 1) + c;
    return m;
}

void PatternMatrix::normalize() {
    // Canonical form: every family is parametrized with start 1; families on
    // the same diagonal ray (equal slopes, aligned offsets) are merged, with
    // start mismatches peeled into the finitary part; families then absorb
    // exactly matching finitary entries immediately before their first
    // position. Gives a unique representation for equality tests.
    bool changed = true;
    while (changed) {
        changed = false;

        // reparametrize to start 1
        for (auto& [c, f] : families_) {
            if (f.start != 1) {
                f.row_b += f.row_a * (f.start - 1);
                f.col_b += f.col_a * (f.start - 1);
                f.start = 1;
            }
        }

        // group by ray: slopes plus alignment class of the offsets
        auto math_mod = [](long a, long m) { return ((a % m) + m) % m; };
        std::map<std::tuple<long, long, long, long>, std::vector<std::pair<Scalar, AffineFamily>>> rays;
        for (auto& [c, f] : families_)
            rays[{f.row_a, f.col_a, math_mod(f.row_b, f.row_a), f.row_b * f.col_a - f.col_b * f.row_a}].push_back(
                {c, f});
        families_.clear();
        for (auto& [key, fams] : rays) {
            // offsets relative to the earliest family on the ray
            long rb_min = fams.front().second.row_b;
            for (const auto& [c, f] : fams) rb_min = std::min(rb_min, f.row_b);
            const AffineFamily& probe = fams.front().second;
            AffineFamily base{probe.row_a, rb_min, probe.col_a, probe.col_b - (probe.row_b - rb_min) / probe.row_a * probe.col_a, 1};
            long last = 1; // base index where every member family is active
            for (const auto& [c, f] : fams) last = std::max(last, 1 + (f.row_b - rb_min) / f.row_a);
            Scalar total = Scalar::zero(field_);
            for (const auto& [c, f] : fams) {
                const long from = 1 + (f.row_b - rb_min) / f.row_a;
                for (long i = from; i < last; ++i) finitary_.add_entry(base.row(i), base.col(i), c);
                total = total + c;
            }
            if (fams.size() > 1) changed = true;
            if (!total.is_zero()) {
                AffineFamily merged{base.row_a, base.row_b + base.row_a * (last - 1), base.col_a,
                                    base.col_b + base.col_a * (last - 1), 1};
                families_.emplace_back(total, merged);
            }
        }

        // extend families backward over exactly matching finitary entries
        for (auto& [c, f] : families_) {
            while (f.row_b >= 1 && f.col_b >= 1 && finitary_.entry(f.row_b, f.col_b) == c) {
                finitary_.add_entry(f.row_b, f.col_b, -c);
                f.row_b -= f.row_a;
                f.col_b -= f.col_a;
                changed = true;
            }
        }
    }
    std::sort(families_.begin(), families_.end(), [](const auto& a, const auto& b) {
        if (!(a.second == b.second)) return a.second < b.second;
        return a.first < b.first;
    });
}

std::string PatternMatrix::str() const {
    std::ostringstream os;
    bool first = true;
    auto fmt_affine = [](long a, long b) {
        std::ostringstream s;
        if (a == 1)
            s << "i";
        else
            s << a << "i";
        if (b > 0) s << "+" << b;
        if (b < 0) s << b;
        return s.str();
    };
    for (const auto& [c, f] : families_) {
        if (!first) os << " + ";
        first = false;
        os << "sum(i>=" << f.start << ") ";
        if (!c.is_one()) os << c.str() << "*";
        os << "e[" << fmt_affine(f.row_a, f.row_b) << "," << fmt_affine(f.col_a, f.col_b) << "]";
    }
    if (!finitary_.is_zero()) {
        if (!first) os << " + ";
        first = false;
        os << finitary_.str();
    }
    if (first) os << "0";
    return os.str();
}

namespace {

// g = gcd(a, b) and x, y with a*x + b*y = g (a, b > 0).
long ext_gcd(long a, long b, long& x, long& y) {
    if (b == 0) {
        x = 1;
        y = 0;
        return a;
    }
    long x1, y1;
    long g = ext_gcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

long ceil_div(long a, long b) { // b > 0
    return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

} // namespace

PatternMatrix pattern_mul(const PatternMatrix& x, const PatternMatrix& y) {
    check_same_field(x.field(), y.field());
    const FieldSpec field = x.field();
    PatternMatrix r(field);

    // finitary x finitary
    FinitaryMatrix ff = x.finitary().mul(y.finitary());
    for (const auto& [k, v] : ff.entries()) r.add_finitary(k.first, k.second, v);

    // family x finitary: at most one family index matches each entry row
    for (const auto& [c, f] : x.families())
        for (const auto& [k, v] : y.finitary().entries()) {
            const long target = k.first; // need col_f(i) = row of the entry
            if ((target - f.col_b) % f.col_a != 0) continue;
            const long i = (target - f.col_b) / f.col_a;
            if (i < f.start) continue;
            r.add_finitary(f.row(i), k.second, c * v);
        }

    // finitary x family
    for (const auto& [k, v] : x.finitary().entries())
        for (const auto& [c, f] : y.families()) {
            const long target = k.second; // need row_f(j) = col of the entry
            if ((target - f.row_b) % f.row_a != 0) continue;
            const long j = (target - f.row_b) / f.row_a;
            if (j < f.start) continue;
            r.add_finitary(k.first, f.col(j), v * c);
        }

    // family x family: col_1(i) = row_2(j) is a linear Diophantine equation;
    // its solutions sweep an arithmetic progression of index pairs
    for (const auto& [c1, f1] : x.families())
        for (const auto& [c2, f2] : y.families()) {
            const long a = f1.col_a, b = f2.row_a;
            const long rhs = f2.row_b - f1.col_b; // a*i - b*j = rhs
            long u, v;
            const long g = ext_gcd(a, b, u, v);
            if (rhs % g != 0) continue;
            // particular solution of a*i - b*j = rhs
            long i0 = u * (rhs / g);
            long j0 = -v * (rhs / g);
            const long step_i = b / g, step_j = a / g;
            // smallest t with i0 + step_i*t >= start1 and j0 + step_j*t >= start2
            long t_min = std::max(ceil_div(f1.start - i0, step_i), ceil_div(f2.start - j0, step_j));
            const long i_min = i0 + step_i * t_min;
            const long j_min = j0 + step_j * t_min;
            AffineFamily prod{
                f1.row_a * step_i, f1.row(i_min) - f1.row_a * step_i,
                f2.col_a * step_j, f2.col(j_min) - f2.col_a * step_j,
                1,
            };
            r.add_family(c1 * c2, prod);
        }

    r.normalize();
    return r;
}

PatternMatrix pattern_commutator(const PatternMatrix& x, const PatternMatrix& y) {
    return pattern_mul(x, y).sub(pattern_mul(y, x));
}

FinitaryMatrix ad_apply(const PatternMatrix& m, const FinitaryMatrix& x) {
    PatternMatrix px = PatternMatrix::from_finitary(x);
    PatternMatrix bracket = pattern_mul(m, px).sub(pattern_mul(px, m));
    if (!bracket.families().empty()) fail(Errc::NotFinitaryResult, "bracket with a finitary matrix is not finitary");
    return bracket.finitary();
}

PatternMatrix build_z_minf(FieldSpec field) {
    return PatternMatrix::family(field, Scalar::one(field), AffineFamily{2, 0, 2, 2, 1});
}

PatternMatrix build_yk_minf(FieldSpec field, int k) {
    if (k < 1) fail(Errc::IndexOutOfRange, "y_k needs k >= 1");
    return PatternMatrix::family(field, Scalar::one(field), AffineFamily{2, 0, 2, 2L * k - 1, 1});
}

PatternMatrix build_df(FieldSpec field, const std::vector<Scalar>& f) {
    PatternMatrix p(field);
    for (size_t i = 0; i < f.size(); ++i) p.add_finitary(static_cast<long>(i) + 2, static_cast<long>(i) + 2, f[i]);
    p.normalize();
    return p;
}

PatternMatrix build_af(FieldSpec field, const std::vector<Scalar>& f) {
    PatternMatrix p = PatternMatrix::identity(field);
    for (size_t i = 0; i < f.size(); ++i) {
        const long k = static_cast<long>(i) + 1;
        p.add_finitary(2 * k - 1, 2 * k, f[i]);
    }
    p.normalize();
    return p;
}

FinitaryMatrix conjugate_by_af(const std::vector<Scalar>& f, const FinitaryMatrix& x) {
    FinitaryMatrix n(x.field());
    for (size_t i = 0; i < f.size(); ++i) {
        const long k = static_cast<long>(i) + 1;
        n.add_entry(2 * k - 1, 2 * k, f[i]);
    }
    // (Id - n) x (Id + n) with n^2 = 0
    FinitaryMatrix xn = x.mul(n);
    FinitaryMatrix nx = n.mul(x);
    return x.add(xn).sub(nx).sub(n.mul(xn));
}

} // namespace locmat
