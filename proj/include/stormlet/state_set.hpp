#pragma once

#include <cstddef>
#include <vector>

namespace stormlet {

/// Fixed-width set of state (or row) indices.
class StateSet {
 public:
  StateSet() = default;
  explicit StateSet(std::size_t size, bool value = false) : bits_(size, value) {}

  std::size_t size() const noexcept { return bits_.size(); }
  bool test(std::size_t i) const { return bits_[i]; }
  bool operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool value = true) { bits_[i] = value; }
  void reset(std::size_t i) { bits_[i] = false; }
  void resize(std::size_t size, bool value = false) { bits_.resize(size, value); }

  std::size_t count() const {
    std::size_t n = 0;
    for (bool b : bits_) n += b;
    return n;
  }
  bool any() const {
    for (bool b : bits_)
      if (b) return true;
    return false;
  }
  bool none() const { return !any(); }
  bool all() const { return count() == size(); }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) out.push_back(i);
    return out;
  }

  StateSet& operator&=(const StateSet& other) {
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] = bits_[i] && other.bits_[i];
    return *this;
  }
  StateSet& operator|=(const StateSet& other) {
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] = bits_[i] || other.bits_[i];
    return *this;
  }
  StateSet operator~() const {
    StateSet out(*this);
    out.bits_.flip();
    return out;
  }
  friend StateSet operator&(StateSet a, const StateSet& b) { return a &= b; }
  friend StateSet operator|(StateSet a, const StateSet& b) { return a |= b; }
  /// Set difference.
  friend StateSet operator-(StateSet a, const StateSet& b) { return a &= ~b; }
  friend bool operator==(const StateSet&, const StateSet&) = default;

  bool is_subset_of(const StateSet& other) const {
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i] && !other.bits_[i]) return false;
    return true;
  }

  /// Index of the first member, or size() if empty.
  std::size_t first() const {
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) return i;
    return bits_.size();
  }

 private:
  std::vector<bool> bits_;
};

}  // namespace stormlet
