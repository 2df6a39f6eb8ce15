#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

#include "motseg/core.hpp"

// Exact kd-tree over the rows of a feature matrix. Supports radius search
// and k-nearest-neighbour queries; no approximation, so downstream neighbour
// counts are reproducible and testable against a brute-force scan.

namespace motseg {

struct KdTreeStats {
    std::size_t nodes_visited = 0;
    std::size_t points_tested = 0;
};

class KdTree {
public:
    KdTree() = default;

    explicit KdTree(const Matrix& points, std::size_t leaf_size = 16)
        : points_(&points), dim_(points.cols()), leaf_size_(std::max<std::size_t>(1, leaf_size)) {
        const std::size_t n = points.rows();
        order_.resize(n);
        std::iota(order_.begin(), order_.end(), 0u);
        nodes_.reserve(n / leaf_size_ * 2 + 2);
        if (n > 0) root_ = build(0, n);
    }

    std::size_t size() const { return points_ ? points_->rows() : 0; }

    // All points with Euclidean distance <= radius from query, excluding
    // `skip_index` (pass a large value to keep everything). Results sorted by
    // point index; distances are exact Euclidean values.
    void radius_search(const double* query, double radius, std::size_t skip_index,
                       std::vector<std::pair<std::size_t, double>>& out,
                       KdTreeStats* stats = nullptr) const {
        out.clear();
        if (!root_valid()) return;
        const double r2 = radius * radius;
        search_radius(root_, query, r2, skip_index, out, stats);
        std::sort(out.begin(), out.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& p : out) p.second = std::sqrt(p.second);
    }

    // Exact k nearest neighbours (by Euclidean distance), excluding
    // `skip_index`. Ties broken toward smaller point index so queries are
    // deterministic. Returns pairs (index, distance) sorted by distance.
    void knn_search(const double* query, std::size_t k, std::size_t skip_index,
                    std::vector<std::pair<std::size_t, double>>& out,
                    KdTreeStats* stats = nullptr) const {
        out.clear();
        if (!root_valid() || k == 0) return;
        KnnHeap heap(k);
        search_knn(root_, query, skip_index, heap, stats);
        out = heap.sorted();
        for (auto& p : out) p.second = std::sqrt(p.second);
    }

private:
    struct Node {
        int left = -1;
        int right = -1;
        int axis = -1;           // -1 marks a leaf
        double split = 0.0;
        std::size_t begin = 0;   // leaf range into order_
        std::size_t end = 0;
        bool leaf() const { return axis < 0; }
    };

    // Max-heap over squared distances with index tie-break.
    struct KnnHeap {
        explicit KnnHeap(std::size_t k) : k(k) { items.reserve(k + 1); }

        static bool worse(const std::pair<std::size_t, double>& a,
                          const std::pair<std::size_t, double>& b) {
            if (a.second != b.second) return a.second < b.second;
            return a.first < b.first;  // larger index counts as farther
        }

        void push(std::size_t idx, double d2) {
            if (items.size() < k) {
                items.emplace_back(idx, d2);
                std::push_heap(items.begin(), items.end(), worse);
            } else if (worse({idx, d2}, items.front())) {
                std::pop_heap(items.begin(), items.end(), worse);
                items.back() = {idx, d2};
                std::push_heap(items.begin(), items.end(), worse);
            }
        }

        double worst() const {
            return items.size() < k ? std::numeric_limits<double>::infinity()
                                    : items.front().second;
        }

        std::vector<std::pair<std::size_t, double>> sorted() const {
            auto v = items;
            std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second < b.second;
                return a.first < b.first;
            });
            return v;
        }

        std::size_t k;
        std::vector<std::pair<std::size_t, double>> items;
    };

    bool root_valid() const { return points_ && root_ >= 0; }

    int build(std::size_t begin, std::size_t end) {
        Node node;
        if (end - begin <= leaf_size_) {
            node.begin = begin;
            node.end = end;
            nodes_.push_back(node);
            return static_cast<int>(nodes_.size() - 1);
        }
        // Split along the axis with the widest spread at the median point.
        std::size_t axis = 0;
        double best_spread = -1.0;
        for (std::size_t a = 0; a < dim_; ++a) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (std::size_t i = begin; i < end; ++i) {
                const double v = (*points_)(order_[i], a);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi - lo > best_spread) {
                best_spread = hi - lo;
                axis = a;
            }
        }
        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](std::size_t a, std::size_t b) {
                             const double va = (*points_)(a, axis), vb = (*points_)(b, axis);
                             if (va != vb) return va < vb;
                             return a < b;
                         });
        node.axis = static_cast<int>(axis);
        node.split = (*points_)(order_[mid], axis);
        const int self = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        const int left = build(begin, mid);
        const int right = build(mid, end);
        nodes_[self].left = left;
        nodes_[self].right = right;
        return self;
    }

    void search_radius(int ni, const double* query, double r2, std::size_t skip,
                       std::vector<std::pair<std::size_t, double>>& out,
                       KdTreeStats* stats) const {
        const Node& node = nodes_[ni];
        if (stats) ++stats->nodes_visited;
        if (node.leaf()) {
            for (std::size_t i = node.begin; i < node.end; ++i) {
                const std::size_t idx = order_[i];
                if (idx == skip) continue;
                if (stats) ++stats->points_tested;
                const double d2 = squared_distance(query, points_->row(idx), dim_);
                if (d2 <= r2) out.emplace_back(idx, d2);
            }
            return;
        }
        const double diff = query[node.axis] - node.split;
        const int near = diff <= 0.0 ? node.left : node.right;
        const int far = diff <= 0.0 ? node.right : node.left;
        search_radius(near, query, r2, skip, out, stats);
        if (diff * diff <= r2) search_radius(far, query, r2, skip, out, stats);
    }

    void search_knn(int ni, const double* query, std::size_t skip, KnnHeap& heap,
                    KdTreeStats* stats) const {
        const Node& node = nodes_[ni];
        if (stats) ++stats->nodes_visited;
        if (node.leaf()) {
            for (std::size_t i = node.begin; i < node.end; ++i) {
                const std::size_t idx = order_[i];
                if (idx == skip) continue;
                if (stats) ++stats->points_tested;
                heap.push(idx, squared_distance(query, points_->row(idx), dim_));
            }
            return;
        }
        const double diff = query[node.axis] - node.split;
        const int near = diff <= 0.0 ? node.left : node.right;
        const int far = diff <= 0.0 ? node.right : node.left;
        search_knn(near, query, skip, heap, stats);
        if (diff * diff <= heap.worst()) search_knn(far, query, skip, heap, stats);
    }

    const Matrix* points_ = nullptr;
    std::size_t dim_ = 0;
    std::size_t leaf_size_ = 16;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

} // namespace motseg
