// state_set.hpp -- subsets of an automaton's state space as packed bitsets.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace nonterm {

using State = std::uint32_t;

class StateSet {
 public:
  StateSet() = default;
  explicit StateSet(std::uint32_t universe)
      : universe_(universe), words_((universe + 63) / 64, 0) {}

  static StateSet single(std::uint32_t universe, State q) {
    StateSet s(universe);
    s.insert(q);
    return s;
  }
  static StateSet full(std::uint32_t universe) {
    StateSet s(universe);
    for (State q = 0; q < universe; ++q) s.insert(q);
    return s;
  }

  std::uint32_t universe_size() const { return universe_; }

  bool test(State q) const { return (words_[q >> 6] >> (q & 63)) & 1; }
  void insert(State q) { words_[q >> 6] |= std::uint64_t{1} << (q & 63); }
  void erase(State q) { words_[q >> 6] &= ~(std::uint64_t{1} << (q & 63)); }

  bool empty() const {
    for (std::uint64_t w : words_) {
      if (w) return false;
    }
    return true;
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_) n += static_cast<std::size_t>(__builtin_popcountll(w));
    return n;
  }

  StateSet& operator|=(const StateSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  StateSet& operator&=(const StateSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }

  bool intersects(const StateSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i] & o.words_[i]) return true;
    }
    return false;
  }

  bool subset_of(const StateSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i] & ~o.words_[i]) return false;
    }
    return true;
  }

  bool operator==(const StateSet& o) const {
    return universe_ == o.universe_ && words_ == o.words_;
  }
  bool operator!=(const StateSet& o) const { return !(*this == o); }

  std::vector<State> to_vector() const {
    std::vector<State> out;
    for (State q = 0; q < universe_; ++q) {
      if (test(q)) out.push_back(q);
    }
    return out;
  }

  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (State q : to_vector()) {
      if (!first) s += ",";
      first = false;
      s += std::to_string(q);
    }
    return s + "}";
  }

 private:
  std::uint32_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Variable-to-state-set map used when interpreting open terms.
using Assignment = std::map<std::string, StateSet>;

}  // namespace nonterm
