#pragma once

#include <array>
#include <cstddef>
#include <iterator>
#include <memory>
#include <utility>
#include <vector>

namespace tacpred {

/// Immutable singly linked list with shared tails. push_front is O(1) and
/// never disturbs other versions; iteration is newest-first.
template <typename T>
class PList {
  struct Node {
    T value;
    std::shared_ptr<const Node> next;

    Node(T v, std::shared_ptr<const Node> n)
        : value(std::move(v)), next(std::move(n)) {}

    ~Node() {
      // Unlink the tail iteratively: dropping a long uniquely-owned chain
      // must not recurse once per element.
      auto n = std::move(next);
      while (n && n.use_count() == 1) {
        auto tail = std::move(const_cast<Node&>(*n).next);
        n = std::move(tail);
      }
    }
  };

  std::shared_ptr<const Node> head_;
  std::size_t size_ = 0;

  PList(std::shared_ptr<const Node> head, std::size_t size)
      : head_(std::move(head)), size_(size) {}

 public:
  PList() = default;

  [[nodiscard]] PList push_front(T value) const {
    return PList(std::make_shared<const Node>(std::move(value), head_), size_ + 1);
  }

  bool empty() const { return size_ == 0; }
  std::size_t size() const { return size_; }
  const T& front() const { return head_->value; }

  class iterator {
    const Node* node_ = nullptr;

   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = T;
    using difference_type = std::ptrdiff_t;
    using pointer = const T*;
    using reference = const T&;

    iterator() = default;
    explicit iterator(const Node* n) : node_(n) {}
    const T& operator*() const { return node_->value; }
    const T* operator->() const { return &node_->value; }
    iterator& operator++() {
      node_ = node_->next.get();
      return *this;
    }
    iterator operator++(int) {
      iterator old = *this;
      ++*this;
      return old;
    }
    bool operator!=(const iterator& o) const { return node_ != o.node_; }
    bool operator==(const iterator& o) const { return node_ == o.node_; }
  };

  iterator begin() const { return iterator(head_.get()); }
  iterator end() const { return iterator(nullptr); }

  /// Builds a list whose iteration order equals the order of `items`.
  template <typename Range>
  static PList from_range(const Range& items) {
    PList out;
    for (auto it = items.rbegin(); it != items.rend(); ++it) out = out.push_front(*it);
    return out;
  }
};

/// Chunked copy-on-write vector. Copying a CowVec is O(size / kChunkSize)
/// pointer copies and yields an independent version; writes clone only the
/// touched chunk, and only while it is still shared with another version.
/// Single logical writer per version; any number of concurrent readers.
template <typename T, std::size_t kChunkSize = 256>
class CowVec {
  using Chunk = std::array<T, kChunkSize>;
  std::vector<std::shared_ptr<Chunk>> chunks_;
  std::size_t size_ = 0;

  Chunk& writable(std::size_t chunk_index) {
    auto& cp = chunks_[chunk_index];
    if (cp.use_count() > 1) cp = std::make_shared<Chunk>(*cp);
    return *cp;
  }

 public:
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  const T& operator[](std::size_t i) const {
    return (*chunks_[i / kChunkSize])[i % kChunkSize];
  }

  void set(std::size_t i, T value) {
    writable(i / kChunkSize)[i % kChunkSize] = std::move(value);
  }

  void push_back(T value) {
    if (size_ % kChunkSize == 0) chunks_.push_back(std::make_shared<Chunk>());
    writable(size_ / kChunkSize)[size_ % kChunkSize] = std::move(value);
    ++size_;
  }

  const T& back() const { return (*this)[size_ - 1]; }
};

}  // namespace tacpred
