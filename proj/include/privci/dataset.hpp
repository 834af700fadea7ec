#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace privci {

// Raw test input: responses x, y and conditioning matrix z stored row-major
// (row i occupies z[i*d .. i*d+d)).
struct Dataset {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> z;
  std::size_t d = 1;

  [[nodiscard]] std::size_t n() const { return x.size(); }
};

// Dataset after rescaling; |x_i| <= 1 and |y_i| <= 1 hold by construction.
// clipped_x / clipped_y count values that hit the clamp.
struct BoundedDataset {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> z;
  std::size_t d = 1;
  double scale_x = 1.0;
  double scale_y = 1.0;
  std::size_t clipped_x = 0;
  std::size_t clipped_y = 0;

  [[nodiscard]] std::size_t n() const { return x.size(); }
};

// Bound heuristic sqrt(c * ln n); grows slowly so clipping stays rare for
// noise with sub-Gaussian tails. Requires n >= 2 and c > 0.
[[nodiscard]] double infer_bound(std::size_t n, double c);

// Divide x by scale_x and y by scale_y. With clip = true values outside
// [-1, 1] are clamped and counted; otherwise the first violation throws
// BoundViolation with its row index.
[[nodiscard]] BoundedDataset rescale(const Dataset& ds, double scale_x,
                                     double scale_y, bool clip);

// CSV loader. The header must contain columns x, y, z1..zd (any order,
// extra columns ignored). Throws MissingColumn, ParseFailure (with
// zero-based data row and column), NonFiniteValue, or TooFewRows (< 2 rows).
[[nodiscard]] Dataset load_csv(std::istream& in, std::size_t d);
[[nodiscard]] Dataset load_csv(const std::string& path, std::size_t d);

}  // namespace privci
