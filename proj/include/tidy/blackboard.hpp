#pragma once

#include <any>
#include <functional>
#include <string>
#include <type_traits>
#include <unordered_map>

#include "tidy/error.hpp"

namespace tidy {

/// Printable form of a blackboard value, used for episode-log deltas.
/// Overload for any additional type stored on the blackboard.
inline std::string bb_repr(bool v) { return v ? "true" : "false"; }
inline std::string bb_repr(int v) { return std::to_string(v); }
inline std::string bb_repr(long v) { return std::to_string(v); }
inline std::string bb_repr(std::size_t v) { return std::to_string(v); }
inline std::string bb_repr(double v) { return std::to_string(v); }
inline std::string bb_repr(const std::string& v) { return v; }
inline std::string bb_repr(const char* v) { return v; }

/// Keyed message store shared across behaviors. Reads of absent keys throw;
/// there are no silent defaults.
class Blackboard {
 public:
  template <class T>
  void set(const std::string& key, T value) {
    Slot slot;
    slot.repr = bb_repr(value);
    slot.value = std::move(value);
    slots_[key] = std::move(slot);
    if (on_set) on_set(key, slots_[key].repr);
  }

  void set(const std::string& key, const char* value) { set(key, std::string(value)); }

  template <class T>
  const T& get(const std::string& key) const {
    const auto it = slots_.find(key);
    if (it == slots_.end())
      fail(ErrorCode::BlackboardKeyMissing, "blackboard key '" + key + "' is not set");
    const T* v = std::any_cast<T>(&it->second.value);
    if (v == nullptr)
      fail(ErrorCode::BlackboardTypeMismatch, "blackboard key '" + key + "' holds another type");
    return *v;
  }

  bool has(const std::string& key) const { return slots_.count(key) > 0; }

  /// Invoked on every set with the key and its printable value.
  std::function<void(const std::string&, const std::string&)> on_set;

 private:
  struct Slot {
    std::any value;
    std::string repr;
  };
  std::unordered_map<std::string, Slot> slots_;
};

}  // namespace tidy
