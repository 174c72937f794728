#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <string_view>

namespace llweave {

// A channel name `base` or `base_k`. The suffix exists for freshening, so a
// base never ends in `_<digits>` itself.
struct ChannelName {
  std::string base;
  std::uint32_t suffix = 0;

  ChannelName() = default;
  ChannelName(std::string b, std::uint32_t s = 0) : base(std::move(b)), suffix(s) {}
  ChannelName(const char* text);

  // Splits a trailing `_<digits>` into the suffix.
  static ChannelName parse(std::string_view text);

  std::string str() const;

  auto operator<=>(const ChannelName&) const = default;
  bool operator==(const ChannelName&) const = default;
};

using ChannelSet = std::set<ChannelName>;

// Smallest `base_k` (k > current suffix) not contained in `avoid`.
ChannelName fresh_variant(const ChannelName& name, const ChannelSet& avoid);

// Channel-name generator for a single derivation or search.
class NameSupply {
 public:
  explicit NameSupply(std::uint32_t next = 1) : next_(next) {}
  ChannelName next(const std::string& base, const ChannelSet& avoid);
  std::uint32_t peek() const { return next_; }
  void advance_to(std::uint32_t n) {
    if (n > next_) next_ = n;
  }

 private:
  std::uint32_t next_;
};

bool is_channel_identifier(std::string_view text);

}  // namespace llweave

template <>
struct std::hash<llweave::ChannelName> {
  std::size_t operator()(const llweave::ChannelName& c) const noexcept {
    return std::hash<std::string>{}(c.base) * 31u + c.suffix;
  }
};
