#include "aniso/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

namespace aniso {

Matrix::Matrix(int rows, int cols, std::vector<double> entries) : rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (a_.size() != static_cast<size_t>(rows) * cols) throw DimensionMismatch("matrix entry count does not match shape");
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (cols_ != rhs.rows_) throw DimensionMismatch("matrix product shape mismatch");
    Matrix r(rows_, rhs.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const double aik = (*this)(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < rhs.cols_; ++j) r(i, j) += aik * rhs(k, j);
        }
    return r;
}

Vector Matrix::operator*(const Vector& v) const {
    if (cols_ != static_cast<int>(v.size())) throw DimensionMismatch("matrix-vector shape mismatch");
    Vector r(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot product length mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

Vector operator+(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionMismatch("vector sum length mismatch");
    Vector r(a);
    for (size_t i = 0; i < a.size(); ++i) r[i] += b[i];
    return r;
}

Vector operator-(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionMismatch("vector difference length mismatch");
    Vector r(a);
    for (size_t i = 0; i < a.size(); ++i) r[i] -= b[i];
    return r;
}

Vector operator*(double s, const Vector& a) {
    Vector r(a);
    for (double& x : r) x *= s;
    return r;
}

Vector solve(Matrix m, Vector rhs) {
    const int n = m.rows();
    if (m.cols() != n || static_cast<int>(rhs.size()) != n) throw DimensionMismatch("solve expects square system");
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int i = col + 1; i < n; ++i)
            if (std::fabs(m(i, col)) > std::fabs(m(pivot, col))) pivot = i;
        if (std::fabs(m(pivot, col)) < 1e-300) throw SingularMatrix("singular system in solve()");
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(m(pivot, j), m(col, j));
            std::swap(rhs[pivot], rhs[col]);
        }
        for (int i = col + 1; i < n; ++i) {
            const double f = m(i, col) / m(col, col);
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) m(i, j) -= f * m(col, j);
            rhs[i] -= f * rhs[col];
        }
    }
    Vector x(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = rhs[i];
        for (int j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
        x[i] = s / m(i, i);
    }
    return x;
}

Matrix inverse(const Matrix& m) {
    const int n = m.rows();
    if (m.cols() != n) throw NotSquare("inverse of non-square matrix");
    Matrix inv(n, n);
    for (int j = 0; j < n; ++j) {
        Vector e(n, 0.0);
        e[j] = 1.0;
        Vector col = solve(m, e);
        for (int i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

double determinant(Matrix m) {
    const int n = m.rows();
    if (m.cols() != n) throw NotSquare("determinant of non-square matrix");
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int i = col + 1; i < n; ++i)
            if (std::fabs(m(i, col)) > std::fabs(m(pivot, col))) pivot = i;
        if (m(pivot, col) == 0.0) return 0.0;
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(m(pivot, j), m(col, j));
            det = -det;
        }
        det *= m(col, col);
        for (int i = col + 1; i < n; ++i) {
            const double f = m(i, col) / m(col, col);
            for (int j = col; j < n; ++j) m(i, j) -= f * m(col, j);
        }
    }
    return det;
}

namespace {

double offdiag_frobenius(const Matrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

double frobenius(const Matrix& a) {
    double s = 0.0;
    for (double x : a.data()) s += x * x;
    return std::sqrt(s);
}

}  // namespace

EigenDecomposition jacobi_eigendecomposition(Matrix a) {
    const int n = a.rows();
    if (a.cols() != n) throw NotSquare("eigendecomposition of non-square matrix");
    Matrix v = Matrix::identity(n);
    const double stop = 1e-14 * frobenius(a) + 1e-300;

    for (int sweep = 0; sweep < 128 && offdiag_frobenius(a) > stop; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        const int src = order[j];
        out.eigenvalues[j] = a(src, src);
        int arg = 0;
        for (int i = 1; i < n; ++i)
            if (std::fabs(v(i, src)) > std::fabs(v(arg, src))) arg = i;
        const double sign = v(arg, src) >= 0.0 ? 1.0 : -1.0;
        for (int i = 0; i < n; ++i) out.eigenvectors(i, j) = sign * v(i, src);
    }
    return out;
}

Direction::Direction(Vector v) : u_(std::move(v)) {
    const double len = norm(u_);
    if (!(len > 1e-300)) throw ZeroVector("direction from (near-)zero vector");
    for (double& x : u_) x /= len;
}

Rotation::Rotation(Matrix o) : o_(std::move(o)) {
    const int n = o_.rows();
    if (o_.cols() != n) throw NotSquare("rotation matrix must be square");
    const Matrix g = o_.transpose() * o_;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double want = i == j ? 1.0 : 0.0;
            if (std::fabs(g(i, j) - want) > 1e-12) throw NotOrthogonal("O^T O deviates from identity beyond 1e-12");
        }
}

Vector Rotation::apply_inverse(const Vector& x) const { return o_.transpose() * x; }

Vector Rotation::column(int j) const {
    Vector c(dim());
    for (int i = 0; i < dim(); ++i) c[i] = o_(i, j);
    return c;
}

Vector SpdMatrix::eigenvector(int i) const {
    Vector v(n_);
    for (int k = 0; k < n_; ++k) v[k] = eigenvectors_(k, i);
    return v;
}

SpdMatrix spd_from_entries(const Matrix& raw) {
    const int n = raw.rows();
    if (raw.cols() != n) throw NotSquare("SPD matrix must be square");
    if (n < 1) throw NotSquare("SPD matrix must be at least 1x1");

    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = 0.5 * (raw(i, j) + raw(j, i));

    EigenDecomposition eig = jacobi_eigendecomposition(a);
    const double scale = std::fabs(eig.eigenvalues.back());
    for (double lam : eig.eigenvalues) {
        if (!(lam > 1e-12 * scale)) {
            std::ostringstream msg;
            msg << "matrix is not positive definite: eigenvalue " << lam;
            throw NotPositiveDefinite(msg.str());
        }
    }

    SpdMatrix m;
    m.n_ = n;
    m.a_ = a;
    m.eigenvalues_ = eig.eigenvalues;
    m.eigenvectors_ = eig.eigenvectors;

    // A^{1/2} = V diag(sqrt lambda) V^T, and similarly for the inverses.
    const Matrix& v = eig.eigenvectors;
    Matrix sq(n, n), iv(n, n), sqiv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0, t = 0, r = 0;
            for (int k = 0; k < n; ++k) {
                const double lam = eig.eigenvalues[k];
                const double vv = v(i, k) * v(j, k);
                s += std::sqrt(lam) * vv;
                t += vv / lam;
                r += vv / std::sqrt(lam);
            }
            sq(i, j) = s;
            iv(i, j) = t;
            sqiv(i, j) = r;
        }
    m.sqrt_ = sq;
    m.inv_ = iv;
    m.sqrt_inv_ = sqiv;

    double det = 1.0;
    for (double lam : eig.eigenvalues) det *= lam;
    m.det_ = det;
    m.sqrt_det_ = std::sqrt(det);
    m.d_min_ = std::sqrt(eig.eigenvalues.front());
    m.sqrt_norm_ = std::sqrt(eig.eigenvalues.back());
    return m;
}

SpdMatrix spd_identity(int n) { return spd_from_entries(Matrix::identity(n)); }

Rotation rotation_to_minus_en(const Direction& u) {
    const int n = u.dim();
    Vector v(n);  // v = (-e_n) - u, the Householder axis
    for (int i = 0; i < n; ++i) v[i] = -u[i];
    v[n - 1] -= 1.0;
    const double vlen = norm(v);
    if (vlen < 1e-8) return Rotation(Matrix::identity(n));

    const double inv_vv = 2.0 / (vlen * vlen);
    Matrix o = Matrix::identity(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) o(i, j) -= inv_vv * v[i] * v[j];
    return Rotation(o);
}

SpdMatrix conjugate(const SpdMatrix& a, const Rotation& o) {
    if (a.dim() != o.dim()) throw DimensionMismatch("conjugate: dimension mismatch");
    return spd_from_entries(o.entries().transpose() * a.entries() * o.entries());
}

std::optional<double> eigenspace_membership(const SpdMatrix& a, const Direction& u, double tol) {
    if (a.dim() != u.dim()) throw DimensionMismatch("eigenspace_membership: dimension mismatch");
    const Vector au = a.apply(u.components());
    const double lambda = dot(au, u.components());
    Vector residual = au - lambda * u.components();
    if (norm(residual) <= tol * a.norm() && lambda > 0.0) return lambda;
    return std::nullopt;
}

}  // namespace aniso
