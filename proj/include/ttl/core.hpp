#pragma once

// Interned indices, fresh-index minting and the error type shared by the
// whole library.

#include <atomic>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ttl {

enum class Polarity { Upper, Lower };

inline const char* to_string(Polarity p) {
  return p == Polarity::Upper ? "upper" : "lower";
}

// All recoverable library errors carry a kind tag plus a rendered message.
class Error : public std::runtime_error {
 public:
  enum class Kind {
    IllFormed,
    Clash,
    NotFree,
    AlreadyOccurs,
    EqualIndices,
    WouldBind,
    DanglingIndex,
    DuplicateIndex,
    RuleMismatch,
    InvalidInput,
    NotCyclicFragment,
    NotACycle,
    Unsupported,
    ParseError,
    Internal,
  };

  Error(Kind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

namespace detail {

struct IndexTable {
  std::mutex mu;
  std::vector<std::string> names;
  std::unordered_map<std::string, uint32_t> ids;
  // Counter behind "_k" fresh names.  Parsing an explicit "_k" advances the
  // counter so later mints can never collide.
  std::atomic<uint64_t> fresh_counter{0};

  static IndexTable& instance() {
    static IndexTable table;
    return table;
  }

  uint32_t intern(std::string_view name) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = ids.find(std::string(name));
    if (it != ids.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(names.size());
    names.emplace_back(name);
    ids.emplace(names.back(), id);
    if (name.size() > 1 && name[0] == '_') {
      uint64_t k = 0;
      bool digits = true;
      for (size_t i = 1; i < name.size(); ++i) {
        if (name[i] < '0' || name[i] > '9') { digits = false; break; }
        k = k * 10 + static_cast<uint64_t>(name[i] - '0');
      }
      if (digits) {
        uint64_t cur = fresh_counter.load();
        while (cur < k + 1 && !fresh_counter.compare_exchange_weak(cur, k + 1)) {}
      }
    }
    return id;
  }

  const std::string& name(uint32_t id) {
    std::lock_guard<std::mutex> lock(mu);
    return names[id];
  }
};

}  // namespace detail

// An index is an interned symbol.  Equality and hashing are O(1); the total
// order used by canonical forms compares the spelled names so it is stable
// across runs.
class Index {
 public:
  explicit Index(std::string_view name) : id_(detail::IndexTable::instance().intern(name)) {}

  static Index fresh() {
    uint64_t k = detail::IndexTable::instance().fresh_counter.fetch_add(1);
    return Index("_" + std::to_string(k + 1));
  }

  const std::string& name() const { return detail::IndexTable::instance().name(id_); }
  uint32_t id() const { return id_; }

  bool operator==(const Index& o) const { return id_ == o.id_; }
  bool operator!=(const Index& o) const { return id_ != o.id_; }
  bool operator<(const Index& o) const { return id_ != o.id_ && name() < o.name(); }

 private:
  uint32_t id_;
};

// Test helper: makes fresh-name sequences reproducible inside one process.
inline void reset_fresh_counter(uint64_t value = 0) {
  detail::IndexTable::instance().fresh_counter.store(value);
}

}  // namespace ttl

template <>
struct std::hash<ttl::Index> {
  size_t operator()(const ttl::Index& i) const noexcept { return std::hash<uint32_t>()(i.id()); }
};
