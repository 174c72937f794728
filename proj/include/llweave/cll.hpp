#pragma once

// MALL formulas in negation normal form and channel-annotated sequents.

#include <compare>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llweave/channel.hpp"

namespace llweave::cll {

enum class Connective { PosAtom, NegAtom, Tensor, Par, Plus, With };

// Immutable formula. Negation only ever sits on atoms.
class Formula {
 public:
  static Formula atom(std::string name);
  static Formula neg_atom(std::string name);
  static Formula tensor(Formula a, Formula b);
  static Formula par(Formula a, Formula b);
  static Formula plus(Formula a, Formula b);
  static Formula with(Formula a, Formula b);
  static Formula binary(Connective c, Formula a, Formula b);

  Connective kind() const;
  bool is_atom() const { return kind() == Connective::PosAtom || kind() == Connective::NegAtom; }
  const std::string& atom_name() const;
  const Formula& left() const;
  const Formula& right() const;

  // Atoms have depth 1.
  int depth() const;
  int size() const;

  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);
  friend bool operator==(const Formula& a, const Formula& b) { return (a <=> b) == 0; }

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

Connective dual(Connective c);

// Linear negation, pushed to the atoms.
Formula negate(const Formula& f);

Formula parse_formula(std::string_view text);
std::string print_formula(const Formula& f);

// Every subformula (including f itself), preorder.
std::vector<Formula> subformulas(const Formula& f);

struct Entry {
  ChannelName channel;
  Formula formula;
  bool operator==(const Entry&) const = default;
};

// Multiset of channel-annotated formulas with pairwise distinct channels.
// Entry order is retained (it is the argument order of service references)
// but is ignored by equality.
class AnnotatedSequent {
 public:
  AnnotatedSequent() = default;
  AnnotatedSequent(std::initializer_list<Entry> entries);
  explicit AnnotatedSequent(std::vector<Entry> entries);

  void add(ChannelName channel, Formula formula);
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool contains(const ChannelName& c) const;
  std::optional<Formula> find(const ChannelName& c) const;
  AnnotatedSequent without(const ChannelName& c) const;
  ChannelSet channels() const;
  std::vector<ChannelName> channel_list() const;
  // Formulas in sorted order; the provability-relevant content.
  std::vector<Formula> formula_multiset() const;
  AnnotatedSequent renamed(const std::vector<std::pair<ChannelName, ChannelName>>& map) const;

  friend bool operator==(const AnnotatedSequent& a, const AnnotatedSequent& b);

 private:
  std::vector<Entry> entries_;
};

AnnotatedSequent sequent_union(const AnnotatedSequent& a, const AnnotatedSequent& b);

std::string print_sequent(const AnnotatedSequent& s);
// Parses `x:A, y:(B * C)^`; the empty string is the empty sequent.
AnnotatedSequent parse_sequent(std::string_view text);

}  // namespace llweave::cll
