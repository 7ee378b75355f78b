#include "crossmi/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crossmi/error.hpp"

namespace crossmi {

KdTree::KdTree(const double* pts, std::size_t n, std::size_t dim, std::size_t leaf_size)
    : n_(n), dim_(dim), leaf_(leaf_size == 0 ? 1 : leaf_size) {
  if (n == 0 || dim == 0) {
    throw Error(errc::invalid_input, "kd-tree requires at least one point");
  }
  pts_.assign(pts, pts + n * dim);
  idx_.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) idx_[i] = i;
  nodes_.reserve(2 * n / leaf_ + 2);
  build(0, static_cast<std::uint32_t>(n));
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end, -1, -1});
  const std::size_t box_at = boxes_.size();
  boxes_.resize(box_at + 2 * dim_);
  double* lo = boxes_.data() + box_at;
  double* hi = lo + dim_;
  for (std::size_t d = 0; d < dim_; ++d) {
    lo[d] = std::numeric_limits<double>::infinity();
    hi[d] = -std::numeric_limits<double>::infinity();
  }
  for (std::uint32_t i = begin; i < end; ++i) {
    const double* p = row(idx_[i]);
    for (std::size_t d = 0; d < dim_; ++d) {
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
  }
  if (end - begin <= leaf_) return id;

  // split the widest extent at the median
  std::size_t split_dim = 0;
  double widest = -1.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    const double extent = hi[d] - lo[d];
    if (extent > widest) {
      widest = extent;
      split_dim = d;
    }
  }
  if (widest <= 0.0) return id;  // all points identical: keep as leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(idx_.begin() + begin, idx_.begin() + mid, idx_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return row(a)[split_dim] < row(b)[split_dim];
                   });
  const std::int32_t l = build(begin, mid);
  const std::int32_t r = build(mid, end);
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

double KdTree::box_min_dist(std::int32_t node, const double* q) const {
  const double* lo = boxes_.data() + static_cast<std::size_t>(node) * 2 * dim_;
  const double* hi = lo + dim_;
  double m = 0.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    double gap = 0.0;
    if (q[d] < lo[d]) gap = lo[d] - q[d];
    else if (q[d] > hi[d]) gap = q[d] - hi[d];
    if (gap > m) m = gap;
  }
  return m;
}

double KdTree::box_max_dist(std::int32_t node, const double* q) const {
  const double* lo = boxes_.data() + static_cast<std::size_t>(node) * 2 * dim_;
  const double* hi = lo + dim_;
  double m = 0.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    const double far_side = std::max(q[d] - lo[d], hi[d] - q[d]);
    if (far_side > m) m = far_side;
  }
  return m;
}

namespace {

inline void heap_push(std::vector<double>& heap, std::size_t k, double d) {
  if (heap.size() < k) {
    heap.push_back(d);
    std::push_heap(heap.begin(), heap.end());
  } else if (d < heap.front()) {
    std::pop_heap(heap.begin(), heap.end());
    heap.back() = d;
    std::push_heap(heap.begin(), heap.end());
  }
}

}  // namespace

void KdTree::knn_search(std::int32_t node, const double* q, std::size_t k,
                        std::ptrdiff_t exclude, std::vector<double>& heap) const {
  const Node& nd = nodes_[static_cast<std::size_t>(node)];
  if (heap.size() == k && box_min_dist(node, q) >= heap.front()) return;
  if (nd.left < 0) {
    for (std::uint32_t i = nd.begin; i < nd.end; ++i) {
      const std::uint32_t pi = idx_[i];
      if (static_cast<std::ptrdiff_t>(pi) == exclude) continue;
      heap_push(heap, k, chebyshev(q, row(pi), dim_));
    }
    return;
  }
  const double dl = box_min_dist(nd.left, q);
  const double dr = box_min_dist(nd.right, q);
  if (dl <= dr) {
    knn_search(nd.left, q, k, exclude, heap);
    knn_search(nd.right, q, k, exclude, heap);
  } else {
    knn_search(nd.right, q, k, exclude, heap);
    knn_search(nd.left, q, k, exclude, heap);
  }
}

double KdTree::kth_distance(const double* q, std::size_t k,
                            std::ptrdiff_t exclude_index) const {
  const std::size_t available = n_ - (exclude_index >= 0 ? 1 : 0);
  if (k == 0 || k > available) {
    throw Error(errc::invalid_input, "kth_distance: k out of range");
  }
  std::vector<double> heap;
  heap.reserve(k);
  knn_search(0, q, k, exclude_index, heap);
  return heap.front();
}

std::size_t KdTree::count_search(std::int32_t node, const double* q, double radius) const {
  const Node& nd = nodes_[static_cast<std::size_t>(node)];
  if (box_min_dist(node, q) >= radius) return 0;
  if (box_max_dist(node, q) < radius) return nd.end - nd.begin;
  if (nd.left < 0) {
    std::size_t c = 0;
    for (std::uint32_t i = nd.begin; i < nd.end; ++i) {
      if (chebyshev(q, row(idx_[i]), dim_) < radius) ++c;
    }
    return c;
  }
  return count_search(nd.left, q, radius) + count_search(nd.right, q, radius);
}

std::size_t KdTree::count_within(const double* q, double radius) const {
  if (!(radius > 0.0)) return 0;
  return count_search(0, q, radius);
}

double brute_kth_distance(const double* pts, std::size_t n, std::size_t dim,
                          const double* q, std::size_t k,
                          std::ptrdiff_t exclude_index) {
  std::vector<double> dists;
  dists.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<std::ptrdiff_t>(i) == exclude_index) continue;
    dists.push_back(chebyshev(q, pts + i * dim, dim));
  }
  if (k == 0 || k > dists.size()) {
    throw Error(errc::invalid_input, "brute_kth_distance: k out of range");
  }
  std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
  return dists[k - 1];
}

std::size_t brute_count_within(const double* pts, std::size_t n, std::size_t dim,
                               const double* q, double radius) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (chebyshev(q, pts + i * dim, dim) < radius) ++c;
  }
  return c;
}

}  // namespace crossmi
