#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "aniso/errors.hpp"

namespace aniso {

using Vector = std::vector<double>;

/// Small dense row-major matrix. Everything in this library is tiny
/// (n <= ~8), so no attempt is made at being clever.
class Matrix {
  public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {}
    Matrix(int rows, int cols, std::vector<double> entries);

    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    Matrix transpose() const;
    Matrix operator*(const Matrix& rhs) const;
    Vector operator*(const Vector& v) const;

    const std::vector<double>& data() const { return a_; }

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

double dot(const Vector& a, const Vector& b);
double norm(const Vector& a);
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& a);

/// Solve M x = rhs by Gaussian elimination with partial pivoting.
Vector solve(Matrix m, Vector rhs);
Matrix inverse(const Matrix& m);
double determinant(Matrix m);

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Eigenvalues
/// ascending, eigenvectors the matching orthonormal columns of V, each
/// sign-normalized so its largest-magnitude component is positive.
/// Converges when the off-diagonal Frobenius norm drops below
/// 1e-14 * ||A||_F.
struct EigenDecomposition {
    Vector eigenvalues;
    Matrix eigenvectors;  // column i pairs with eigenvalues[i]
};
EigenDecomposition jacobi_eigendecomposition(Matrix a);

/// Unit direction vector. The constructor normalizes its input.
class Direction {
  public:
    explicit Direction(Vector v);

    int dim() const { return static_cast<int>(u_.size()); }
    const Vector& components() const { return u_; }
    double operator[](int i) const { return u_[static_cast<size_t>(i)]; }

  private:
    Vector u_;
};

/// Orthogonal matrix; construction checks O^T O = I to 1e-12.
class Rotation {
  public:
    explicit Rotation(Matrix o);

    int dim() const { return o_.rows(); }
    const Matrix& entries() const { return o_; }
    Vector apply(const Vector& x) const { return o_ * x; }
    Vector apply_inverse(const Vector& x) const;  // O^T x
    Vector column(int j) const;

  private:
    Matrix o_;
};

/// Symmetric positive definite matrix with cached spectral data.
class SpdMatrix {
  public:
    int dim() const { return n_; }
    const Matrix& entries() const { return a_; }
    const Matrix& sqrt_entries() const { return sqrt_; }
    const Matrix& inv_entries() const { return inv_; }
    const Matrix& sqrt_inv_entries() const { return sqrt_inv_; }
    const Vector& eigenvalues() const { return eigenvalues_; }  // ascending
    Vector eigenvector(int i) const;

    double det() const { return det_; }
    double sqrt_det() const { return sqrt_det_; }
    /// Smallest eigenvalue of sqrt(A); equals 1/||(sqrt A)^{-1}||.
    double d_min() const { return d_min_; }
    double sqrt_inv_norm() const { return 1.0 / d_min_; }  // ||(sqrt A)^{-1}||
    double norm() const { return eigenvalues_.back(); }    // ||A||
    double sqrt_norm() const { return sqrt_norm_; }         // ||sqrt A||

    Vector apply(const Vector& x) const { return a_ * x; }

    friend SpdMatrix spd_from_entries(const Matrix& raw);

  private:
    SpdMatrix() = default;

    int n_ = 0;
    Matrix a_, sqrt_, inv_, sqrt_inv_;
    Vector eigenvalues_;
    Matrix eigenvectors_;
    double det_ = 0, sqrt_det_ = 0, d_min_ = 0, sqrt_norm_ = 0;
};

/// Build an SpdMatrix from raw entries; symmetrizes via (A + A^T)/2 first.
/// Throws NotSquare, or NotPositiveDefinite when any eigenvalue of the
/// symmetrized input is <= 1e-12 * ||A|| (near-PD inputs are rejected, not
/// regularized: silently shrinking d_min would corrupt every bound built
/// on it).
SpdMatrix spd_from_entries(const Matrix& raw);
SpdMatrix spd_identity(int n);

/// Deterministic orthogonal O with O(-e_n) = u: a Householder reflection,
/// or the exact identity when |u + e_n| < 1e-8.
Rotation rotation_to_minus_en(const Direction& u);

/// O^T A O as a fresh SpdMatrix.
SpdMatrix conjugate(const SpdMatrix& a, const Rotation& o);

/// If u is an eigenvector of A within tol (residual |Au - <Au,u>u| <=
/// tol * ||A||), returns the eigenvalue <Au,u>; otherwise empty.
std::optional<double> eigenspace_membership(const SpdMatrix& a, const Direction& u, double tol);

}  // namespace aniso
