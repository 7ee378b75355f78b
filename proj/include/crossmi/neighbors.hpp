#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace crossmi {

// Chebyshev (max-norm) distance between two d-dimensional points.
inline double chebyshev(const double* a, const double* b, std::size_t dim) {
  double m = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    double diff = a[i] - b[i];
    if (diff < 0.0) diff = -diff;
    if (diff > m) m = diff;
  }
  return m;
}

// kd-tree over n points in d dimensions under the max-norm. Query results
// depend only on the point multiset, so the tree and a linear scan agree
// bit-for-bit on k-th neighbour distances and strict-radius counts.
class KdTree {
 public:
  // Copies the points (row-major n x dim).
  KdTree(const double* pts, std::size_t n, std::size_t dim, std::size_t leaf_size = 16);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }

  // Distance from q to its k-th nearest point, optionally skipping one
  // point by index. Requires k <= size() (minus one when excluding).
  double kth_distance(const double* q, std::size_t k,
                      std::ptrdiff_t exclude_index = -1) const;

  // Number of points with max-norm distance strictly less than radius.
  std::size_t count_within(const double* q, double radius) const;

 private:
  struct Node {
    std::uint32_t begin, end;   // range into idx_
    std::int32_t left, right;   // child node ids, -1 for leaf
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  const double* row(std::uint32_t i) const { return pts_.data() + i * dim_; }
  double box_min_dist(std::int32_t node, const double* q) const;
  double box_max_dist(std::int32_t node, const double* q) const;
  void knn_search(std::int32_t node, const double* q, std::size_t k,
                  std::ptrdiff_t exclude, std::vector<double>& heap) const;
  std::size_t count_search(std::int32_t node, const double* q, double radius) const;

  std::size_t n_, dim_, leaf_;
  std::vector<double> pts_;            // original order
  std::vector<std::uint32_t> idx_;     // permutation, leaves hold ranges
  std::vector<Node> nodes_;
  std::vector<double> boxes_;          // per node: dim lows then dim highs
};

// Brute-force counterparts used by the serial reference implementation.
double brute_kth_distance(const double* pts, std::size_t n, std::size_t dim,
                          const double* q, std::size_t k,
                          std::ptrdiff_t exclude_index = -1);
std::size_t brute_count_within(const double* pts, std::size_t n, std::size_t dim,
                               const double* q, double radius);

}  // namespace crossmi
