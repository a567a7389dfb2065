#include "sparsebonus/matrix.hpp"

#include <algorithm>

#include "sparsebonus/error.hpp"

namespace sparsebonus {

Matrix hconcat(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "hconcat: row count mismatch");
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto dst = out.row(r);
    std::ranges::copy(a.row(r), dst.begin());
    std::ranges::copy(b.row(r), dst.begin() + static_cast<std::ptrdiff_t>(a.cols()));
  }
  return out;
}

}  // namespace sparsebonus
