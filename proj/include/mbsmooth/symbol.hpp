#pragma once

#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_set>

namespace mbsmooth {

// An interned token. Construction is case-sensitive and performs no
// normalization. Equality is a pointer compare against the process-wide
// intern pool; ordering falls back to text so that tie-breaking downstream
// is deterministic across runs and platforms.
class Symbol {
 public:
  Symbol() : text_(intern(std::string_view{})) {}
  explicit Symbol(std::string_view text) : text_(intern(text)) {}

  std::string_view text() const noexcept { return *text_; }
  const std::string& str() const noexcept { return *text_; }

  friend bool operator==(Symbol a, Symbol b) noexcept {
    return a.text_ == b.text_;
  }
  friend bool operator!=(Symbol a, Symbol b) noexcept {
    return a.text_ != b.text_;
  }
  friend bool operator<(Symbol a, Symbol b) noexcept {
    return a.text_ != b.text_ && *a.text_ < *b.text_;
  }

  // Stable identity for hashing; valid for the lifetime of the process.
  const void* id() const noexcept { return text_; }

 private:
  static const std::string* intern(std::string_view text) {
    static std::mutex mutex;
    static std::unordered_set<std::string> pool;  // node-based, stable refs
    std::lock_guard<std::mutex> lock(mutex);
    return &*pool.emplace(text).first;
  }

  const std::string* text_;
};

}  // namespace mbsmooth

template <>
struct std::hash<mbsmooth::Symbol> {
  std::size_t operator()(mbsmooth::Symbol s) const noexcept {
    return std::hash<const void*>{}(s.id());
  }
};
