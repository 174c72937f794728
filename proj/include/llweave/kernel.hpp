#pragma once

// Trusted core. A Theorem pairs a sequent with its process translation and
// can only be produced by the rule functions declared here.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "llweave/cll.hpp"
#include "llweave/pi.hpp"

namespace llweave::kernel {

enum class Rule { Id, Tensor, Par, PlusL, PlusR, With, Cut, Axiom };

std::string_view to_string(Rule r);

struct ProofTree {
  Rule rule = Rule::Id;
  std::string axiom;  // service name for Axiom leaves
  std::vector<ChannelName> principal;
  cll::AnnotatedSequent conclusion;
  std::vector<std::shared_ptr<const ProofTree>> premises;
};

namespace detail {
struct Mint;
}

class Theorem {
 public:
  const cll::AnnotatedSequent& sequent() const { return sequent_; }
  const pi::Process& process() const { return process_; }
  const ProofTree& derivation() const { return *derivation_; }
  const std::shared_ptr<const ProofTree>& derivation_ptr() const { return derivation_; }
  // Highest suffix handed out for bound names so far.
  std::uint32_t fresh_counter() const { return counter_; }

 private:
  friend struct detail::Mint;
  Theorem(cll::AnnotatedSequent s, pi::Process p, std::shared_ptr<const ProofTree> d, std::uint32_t counter)
      : sequent_(std::move(s)), process_(std::move(p)), derivation_(std::move(d)), counter_(counter) {}

  cll::AnnotatedSequent sequent_;
  pi::Process process_;
  std::shared_ptr<const ProofTree> derivation_;
  std::uint32_t counter_ = 0;
};

// ⊢ x:f, y:f^ with the one-shot buffer y(a).x<a>.0
Theorem ax(const cll::Formula& f, const ChannelName& x, const ChannelName& y);
Theorem tensor(const Theorem& left, const Theorem& right, const ChannelName& x, const ChannelName& y,
               const ChannelName& z);
Theorem par(const Theorem& premise, const ChannelName& x, const ChannelName& y, const ChannelName& z);
Theorem plus_l(const Theorem& premise, const ChannelName& x, const cll::Formula& b, const ChannelName& z);
Theorem plus_r(const Theorem& premise, const ChannelName& y, const cll::Formula& a, const ChannelName& z);
Theorem with_(const Theorem& left, const Theorem& right, const ChannelName& x, const ChannelName& y,
              const ChannelName& z);
Theorem cut(const Theorem& left, const Theorem& right, const ChannelName& x, const ChannelName& y);
// Hypothesis standing for an external service; extracts to Name(channels).
Theorem assume(const std::string& name, const cll::AnnotatedSequent& s);

// ⊢ x:f, y:f^ derived with Id at atoms only.
Theorem identity_expand(const cll::Formula& f, const ChannelName& x, const ChannelName& y);

// Injective renaming of the conclusion's channels.
Theorem rename_channels(const Theorem& t, const std::vector<std::pair<ChannelName, ChannelName>>& map);

std::map<Rule, int> rule_counts(const ProofTree& tree);
// Axiom leaf names in left-to-right order.
std::vector<std::string> axiom_leaves(const ProofTree& tree);
int proof_depth(const ProofTree& tree);

nlohmann::json proof_to_json(const ProofTree& tree);

}  // namespace llweave::kernel
