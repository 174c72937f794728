#include "llweave/channel.hpp"

#include <cctype>

#include "llweave/error.hpp"

namespace llweave {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "syntax";
    case ErrorCode::ChannelClash: return "channel-clash";
    case ErrorCode::MissingChannel: return "missing-channel";
    case ErrorCode::NotFresh: return "not-fresh";
    case ErrorCode::ContextMismatch: return "context-mismatch";
    case ErrorCode::CutMismatch: return "cut-formula-mismatch";
    case ErrorCode::NotComposable: return "not-composable";
    case ErrorCode::Timeout: return "timeout";
    case ErrorCode::StaleRedex: return "stale-redex";
    case ErrorCode::UnknownRef: return "unknown-ref";
    case ErrorCode::ArityMismatch: return "arity-mismatch";
    case ErrorCode::InvalidRedexId: return "invalid-redex-id";
    case ErrorCode::StepLimit: return "step-limit-exceeded";
    case ErrorCode::DuplicateName: return "duplicate-name";
    case ErrorCode::EmptyService: return "empty-service";
    case ErrorCode::PortInUse: return "port-in-use";
    case ErrorCode::InvalidArgument: return "invalid-argument";
  }
  return "unknown";
}

ChannelName::ChannelName(const char* text) : ChannelName(parse(text)) {}

ChannelName ChannelName::parse(std::string_view text) {
  auto underscore = text.rfind('_');
  if (underscore != std::string_view::npos && underscore > 0 && underscore + 1 < text.size()) {
    auto digits = text.substr(underscore + 1);
    bool numeric = digits.front() != '0' && digits.size() <= 9;
    for (char c : digits) numeric = numeric && std::isdigit(static_cast<unsigned char>(c));
    if (numeric) {
      return ChannelName(std::string(text.substr(0, underscore)),
                         static_cast<std::uint32_t>(std::stoul(std::string(digits))));
    }
  }
  return ChannelName(std::string(text), 0);
}

std::string ChannelName::str() const {
  return suffix == 0 ? base : base + "_" + std::to_string(suffix);
}

ChannelName fresh_variant(const ChannelName& name, const ChannelSet& avoid) {
  ChannelName candidate(name.base, name.suffix + 1);
  while (avoid.contains(candidate)) ++candidate.suffix;
  return candidate;
}

ChannelName NameSupply::next(const std::string& base, const ChannelSet& avoid) {
  ChannelName candidate(base, next_++);
  while (avoid.contains(candidate)) candidate.suffix = next_++;
  return candidate;
}

bool is_channel_identifier(std::string_view text) {
  if (text.empty() || !std::islower(static_cast<unsigned char>(text.front()))) return false;
  for (char c : text) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

}  // namespace llweave
