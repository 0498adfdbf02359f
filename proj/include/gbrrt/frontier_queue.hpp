#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gbrrt/types.hpp"

namespace gbrrt {

/// Indexed binary min-heap of (id, key). Equal keys pop in id order.
class FrontierQueue {
 public:
  struct Entry {
    NodeId id;
    double key;
  };

  std::size_t size() const { return heap_.size(); }
  bool empty() const { return heap_.empty(); }

  bool contains(NodeId id) const { return id < pos_.size() && pos_[id] != kAbsent; }

  std::optional<double> key_of(NodeId id) const {
    if (!contains(id)) return std::nullopt;
    return heap_[pos_[id]].key;
  }

  void push(NodeId id, double key) {
    if (contains(id)) throw DuplicateIdError("frontier queue: id " + std::to_string(id) + " already queued");
    if (id >= pos_.size()) pos_.resize(static_cast<std::size_t>(id) + 1, kAbsent);
    heap_.push_back({id, key});
    pos_[id] = heap_.size() - 1;
    sift_up(heap_.size() - 1);
  }

  std::optional<Entry> pop_min() {
    if (heap_.empty()) return std::nullopt;
    const Entry top = heap_.front();
    swap_slots(0, heap_.size() - 1);
    heap_.pop_back();
    pos_[top.id] = kAbsent;
    if (!heap_.empty()) sift_down(0);
    return top;
  }

  std::optional<Entry> peek() const {
    if (heap_.empty()) return std::nullopt;
    return heap_.front();
  }

  /// Lowers the key of a queued id. Absent ids and non-decreasing keys are
  /// left alone and report false.
  bool decrease_key(NodeId id, double new_key) {
    if (!contains(id)) return false;
    const std::size_t i = pos_[id];
    if (!(new_key < heap_[i].key)) return false;
    heap_[i].key = new_key;
    sift_up(i);
    return true;
  }

  /// Full consistency check of heap order and the position map. Returns an
  /// empty string when everything holds.
  std::string audit() const {
    std::size_t present = 0;
    for (std::size_t id = 0; id < pos_.size(); ++id) {
      if (pos_[id] == kAbsent) continue;
      ++present;
      if (pos_[id] >= heap_.size() || heap_[pos_[id]].id != id) return "position map out of sync at id " + std::to_string(id);
    }
    if (present != heap_.size()) return "position map size mismatch";
    for (std::size_t i = 1; i < heap_.size(); ++i)
      if (less(heap_[i], heap_[(i - 1) / 2])) return "heap order violated at slot " + std::to_string(i);
    return {};
  }

  const std::vector<Entry>& entries() const { return heap_; }

 private:
  static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);

  static bool less(const Entry& a, const Entry& b) {
    return a.key < b.key || (a.key == b.key && a.id < b.id);
  }

  void swap_slots(std::size_t a, std::size_t b) {
    std::swap(heap_[a], heap_[b]);
    pos_[heap_[a].id] = a;
    pos_[heap_[b].id] = b;
  }

  void sift_up(std::size_t i) {
    while (i > 0) {
      const std::size_t p = (i - 1) / 2;
      if (!less(heap_[i], heap_[p])) break;
      swap_slots(i, p);
      i = p;
    }
  }

  void sift_down(std::size_t i) {
    const std::size_t n = heap_.size();
    while (true) {
      std::size_t m = i;
      const std::size_t l = 2 * i + 1, r = l + 1;
      if (l < n && less(heap_[l], heap_[m])) m = l;
      if (r < n && less(heap_[r], heap_[m])) m = r;
      if (m == i) break;
      swap_slots(i, m);
      i = m;
    }
  }

  std::vector<Entry> heap_;
  std::vector<std::size_t> pos_;
};

}  // namespace gbrrt
