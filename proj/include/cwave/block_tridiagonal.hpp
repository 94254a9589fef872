#ifndef CWAVE_BLOCK_TRIDIAGONAL_HPP
#define CWAVE_BLOCK_TRIDIAGONAL_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace cwave {

// Block LU (Thomas algorithm) for a tridiagonal system with 2x2 blocks:
//
//   lower[i] * u[i-1] + diag[i] * u[i] + upper[i] * u[i+1] = rhs[i]
//
// lower[0] and upper[n-1] are ignored. No pivoting is done, so the matrix
// should be block diagonally dominant or have a positive definite Hermitian
// part (both hold for the implicit-midpoint matrix I + i dt/2 H).
template <typename Scalar>
class BlockTridiagonalLU {
 public:
  using Block = Eigen::Matrix<Scalar, 2, 2>;
  using Vec = Eigen::Matrix<Scalar, 2, 1>;
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  BlockTridiagonalLU() = default;

  BlockTridiagonalLU(const std::vector<Block>& lower, const std::vector<Block>& diag,
                     const std::vector<Block>& upper) {
    factorize(lower, diag, upper);
  }

  void factorize(const std::vector<Block>& lower, const std::vector<Block>& diag,
                 const std::vector<Block>& upper) {
    const std::size_t n = diag.size();
    if (n == 0 || lower.size() != n || upper.size() != n) {
      throw std::invalid_argument("block tridiagonal: inconsistent band sizes");
    }
    upper_ = upper;
    pivot_inv_.resize(n);
    multiplier_.resize(n);
    multiplier_[0].setZero();
    pivot_inv_[0] = checked_inverse(diag[0], 0);
    for (std::size_t i = 1; i < n; ++i) {
      multiplier_[i].noalias() = lower[i] * pivot_inv_[i - 1];
      const Block pivot = diag[i] - multiplier_[i] * upper[i - 1];
      pivot_inv_[i] = checked_inverse(pivot, i);
    }
  }

  std::size_t size() const { return pivot_inv_.size(); }

  // Solves in place; `first` and `second` hold the two block components.
  template <typename D1, typename D2>
  void solve(Eigen::ArrayBase<D1>& first, Eigen::ArrayBase<D2>& second) const {
    const auto n = static_cast<Eigen::Index>(size());
    if (first.size() != n || second.size() != n) {
      throw std::invalid_argument("block tridiagonal: right-hand side has wrong length");
    }
    Scalar p0 = first(0), p1 = second(0);
    for (Eigen::Index i = 1; i < n; ++i) {
      const Block& w = multiplier_[static_cast<std::size_t>(i)];
      const Scalar c0 = first(i) - (w(0, 0) * p0 + w(0, 1) * p1);
      const Scalar c1 = second(i) - (w(1, 0) * p0 + w(1, 1) * p1);
      first(i) = p0 = c0;
      second(i) = p1 = c1;
    }
    {
      const Block& g = pivot_inv_[static_cast<std::size_t>(n - 1)];
      const Scalar c0 = p0, c1 = p1;
      first(n - 1) = p0 = g(0, 0) * c0 + g(0, 1) * c1;
      second(n - 1) = p1 = g(1, 0) * c0 + g(1, 1) * c1;
    }
    for (Eigen::Index i = n - 2; i >= 0; --i) {
      const Block& u = upper_[static_cast<std::size_t>(i)];
      const Block& g = pivot_inv_[static_cast<std::size_t>(i)];
      const Scalar c0 = first(i) - (u(0, 0) * p0 + u(0, 1) * p1);
      const Scalar c1 = second(i) - (u(1, 0) * p0 + u(1, 1) * p1);
      p0 = g(0, 0) * c0 + g(0, 1) * c1;
      p1 = g(1, 0) * c0 + g(1, 1) * c1;
      first(i) = p0;
      second(i) = p1;
    }
  }

 private:
  static Block checked_inverse(const Block& b, std::size_t row) {
    const Scalar det = b.determinant();
    const auto scale = b.cwiseAbs().maxCoeff();
    using std::abs;
    if (!(abs(det) > 1e-300) || !(abs(det) > 1e-14 * scale * scale)) {
      throw std::runtime_error("block tridiagonal: singular pivot at row " + std::to_string(row));
    }
    return b.inverse();
  }

  std::vector<Block> upper_;
  std::vector<Block> multiplier_;
  std::vector<Block> pivot_inv_;
};

}  // namespace cwave

#endif  // CWAVE_BLOCK_TRIDIAGONAL_HPP
