#pragma once

// Polyadic pi-calculus: terms, capture-avoiding substitution, structural
// congruence and the communication rule.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "llweave/channel.hpp"

namespace llweave::pi {

enum class Kind { Nil, Input, Output, Parallel, Sum, Restrict, Replicate, Ref };

using Names = std::vector<ChannelName>;

// Immutable process term. Prefixes carry an `origin` label (the defining
// service, or empty for kernel-built code) that is ignored by equality and
// printing; it only feeds trace attribution.
class Process {
 public:
  Process();  // 0

  static Process nil() { return Process(); }
  static Process input(ChannelName chan, Names params, Process body, std::string origin = {});
  static Process output(ChannelName chan, Names args, Process body, std::string origin = {});
  static Process parallel(Process a, Process b);
  static Process sum(Process a, Process b);
  static Process restrict(Names names, Process body);
  static Process replicate(Process body);
  static Process ref(std::string name, Names args);
  // Right fold with 0 as the unit; the empty list yields 0.
  static Process parallel_all(const std::vector<Process>& ps);

  Kind kind() const;
  bool is_nil() const { return kind() == Kind::Nil; }
  bool is_prefix() const { return kind() == Kind::Input || kind() == Kind::Output; }
  const ChannelName& channel() const;
  // Input params, output args, restricted names or reference args.
  const Names& names() const;
  const Process& body() const;
  const Process& left() const;
  const Process& right() const;
  const std::string& ref_name() const;
  const std::string& origin() const;
  const ChannelSet& free_names() const;

  // Sets the origin of every prefix in the term.
  Process relabeled(const std::string& origin) const;

  friend bool operator==(const Process& a, const Process& b);

 private:
  struct Node;
  explicit Process(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

ChannelSet free_names(const Process& p);
// Free and bound names alike.
ChannelSet all_names(const Process& p);

using Substitution = std::map<ChannelName, ChannelName>;

// Simultaneous capture-avoiding renaming of free names. Binders that collide
// with the range are freshened by suffix bump.
Process substitute(const Process& p, const Substitution& map);

Process parse_process(std::string_view text);
std::string print_process(const Process& p);

// Child indices: prefix/restriction/replication body = 0, parallel and sum
// children = 0 (left) and 1 (right).
using Path = std::vector<std::uint8_t>;

const Process& subterm_at(const Process& p, const Path& path);
Process replace_at(const Process& p, const Path& path, const Process& replacement);

struct Redex {
  ChannelName channel;
  Path sender_path;
  Path receiver_path;
  std::size_t arity = 0;

  auto operator<=>(const Redex&) const = default;
  bool operator==(const Redex&) const = default;
};

// Unguarded output/input pairs on the same channel and binding scope with
// equal arity, ordered by channel then paths. Reduction happens under
// parallel composition and restriction only; summands of a sum are
// unguarded when they are prefixes.
std::vector<Redex> enabled_redexes(const Process& p);

struct Firing {
  Process result;
  ChannelName channel;
  Names payload;
  std::string sender_origin;
  std::string receiver_origin;
};

Firing fire_detailed(const Process& p, const Redex& r);
Process fire(const Process& p, const Redex& r);

// Removes syntactic 0 units of | and + and restrictions of unused names.
Process prune(const Process& p);

// A prefix occurrence anywhere in the term, for edge reporting.
struct PrefixSite {
  Path path;
  bool output = false;
  ChannelName channel;
  // Identifies the binder of `channel`; -1 when it is free.
  long scope = -1;
  bool guarded = false;
  std::size_t arity = 0;
  std::string origin;
};

std::vector<PrefixSite> prefix_sites(const Process& p);

// Canonical representative of the congruence class generated by alpha
// renaming, monoid laws of | and + with unit 0, scope extrusion, restriction
// swapping and garbage collection, and !P = P | !P applied at most
// `unfold_bound` times.
std::string canonical_form(const Process& p, int unfold_bound = 2);
bool struct_congruent(const Process& p, const Process& q, int unfold_bound = 2);
// Congruence after treating the free names of each side as bound too.
bool congruent_up_to_renaming(const Process& p, const Process& q, int unfold_bound = 2);

// Every subterm, preorder.
std::vector<Process> subterms(const Process& p);

}  // namespace llweave::pi
