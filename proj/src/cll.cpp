#include "llweave/cll.hpp"

#include <algorithm>
#include <cctype>

#include "llweave/error.hpp"

namespace llweave::cll {

struct Formula::Node {
  Connective kind;
  std::string name;
  std::optional<Formula> lhs, rhs;
  int depth = 1;
  int size = 1;
};

Formula Formula::atom(std::string name) {
  if (name.empty()) throw Error(ErrorCode::InvalidArgument, "empty atom name");
  return Formula(std::make_shared<const Node>(Node{Connective::PosAtom, std::move(name), {}, {}, 1, 1}));
}

Formula Formula::neg_atom(std::string name) {
  if (name.empty()) throw Error(ErrorCode::InvalidArgument, "empty atom name");
  return Formula(std::make_shared<const Node>(Node{Connective::NegAtom, std::move(name), {}, {}, 1, 1}));
}

Formula Formula::binary(Connective c, Formula a, Formula b) {
  if (c == Connective::PosAtom || c == Connective::NegAtom) {
    throw Error(ErrorCode::InvalidArgument, "binary() needs a binary connective");
  }
  int depth = 1 + std::max(a.depth(), b.depth());
  int size = 1 + a.size() + b.size();
  return Formula(std::make_shared<const Node>(Node{c, {}, std::move(a), std::move(b), depth, size}));
}

Formula Formula::tensor(Formula a, Formula b) { return binary(Connective::Tensor, std::move(a), std::move(b)); }
Formula Formula::par(Formula a, Formula b) { return binary(Connective::Par, std::move(a), std::move(b)); }
Formula Formula::plus(Formula a, Formula b) { return binary(Connective::Plus, std::move(a), std::move(b)); }
Formula Formula::with(Formula a, Formula b) { return binary(Connective::With, std::move(a), std::move(b)); }

Connective Formula::kind() const { return node_->kind; }
const std::string& Formula::atom_name() const { return node_->name; }
const Formula& Formula::left() const { return *node_->lhs; }
const Formula& Formula::right() const { return *node_->rhs; }
int Formula::depth() const { return node_->depth; }
int Formula::size() const { return node_->size; }

std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  if (a.is_atom()) return a.atom_name() <=> b.atom_name();
  if (auto c = a.left() <=> b.left(); c != 0) return c;
  return a.right() <=> b.right();
}

Connective dual(Connective c) {
  switch (c) {
    case Connective::PosAtom: return Connective::NegAtom;
    case Connective::NegAtom: return Connective::PosAtom;
    case Connective::Tensor: return Connective::Par;
    case Connective::Par: return Connective::Tensor;
    case Connective::Plus: return Connective::With;
    case Connective::With: return Connective::Plus;
  }
  return c;
}

Formula negate(const Formula& f) {
  switch (f.kind()) {
    case Connective::PosAtom: return Formula::neg_atom(f.atom_name());
    case Connective::NegAtom: return Formula::atom(f.atom_name());
    default: return Formula::binary(dual(f.kind()), negate(f.left()), negate(f.right()));
  }
}

std::vector<Formula> subformulas(const Formula& f) {
  std::vector<Formula> out{f};
  if (!f.is_atom()) {
    for (auto& s : subformulas(f.left())) out.push_back(s);
    for (auto& s : subformulas(f.right())) out.push_back(s);
  }
  return out;
}

namespace {

char symbol(Connective c) {
  switch (c) {
    case Connective::Tensor: return '*';
    case Connective::Par: return '%';
    case Connective::Plus: return '+';
    case Connective::With: return '&';
    default: return '?';
  }
}

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : text_(text) {}

  Formula parse_all() {
    Formula f = additive();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(pos_, msg); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  Formula additive() {
    Formula f = multiplicative();
    while (true) {
      if (peek('+')) {
        ++pos_;
        f = Formula::plus(f, multiplicative());
      } else if (peek('&')) {
        ++pos_;
        f = Formula::with(f, multiplicative());
      } else {
        return f;
      }
    }
  }

  Formula multiplicative() {
    Formula f = postfix();
    while (true) {
      if (peek('*')) {
        ++pos_;
        f = Formula::tensor(f, postfix());
      } else if (peek('%')) {
        ++pos_;
        f = Formula::par(f, postfix());
      } else {
        return f;
      }
    }
  }

  Formula postfix() {
    Formula f = primary();
    while (peek('^')) {
      ++pos_;
      f = negate(f);
    }
    return f;
  }

  Formula primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of formula");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Formula f = additive();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return f;
    }
    if (std::isupper(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isupper(static_cast<unsigned char>(text_[pos_])) ||
                                     std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                     text_[pos_] == '_')) {
        ++pos_;
      }
      return Formula::atom(std::string(text_.substr(start, pos_ - start)));
    }
    fail("expected atom or '('");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void print_into(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case Connective::PosAtom: out += f.atom_name(); return;
    case Connective::NegAtom: out += f.atom_name(); out += '^'; return;
    default:
      out += '(';
      print_into(f.left(), out);
      out += ' ';
      out += symbol(f.kind());
      out += ' ';
      print_into(f.right(), out);
      out += ')';
  }
}

}  // namespace

Formula parse_formula(std::string_view text) { return FormulaParser(text).parse_all(); }

std::string print_formula(const Formula& f) {
  std::string out;
  print_into(f, out);
  return out;
}

AnnotatedSequent::AnnotatedSequent(std::initializer_list<Entry> entries) {
  for (const auto& e : entries) add(e.channel, e.formula);
}

AnnotatedSequent::AnnotatedSequent(std::vector<Entry> entries) {
  for (auto& e : entries) add(std::move(e.channel), std::move(e.formula));
}

void AnnotatedSequent::add(ChannelName channel, Formula formula) {
  if (contains(channel)) {
    throw Error(ErrorCode::ChannelClash, "channel clash on '" + channel.str() + "'");
  }
  entries_.push_back(Entry{std::move(channel), std::move(formula)});
}

bool AnnotatedSequent::contains(const ChannelName& c) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.channel == c; });
}

std::optional<Formula> AnnotatedSequent::find(const ChannelName& c) const {
  for (const auto& e : entries_) {
    if (e.channel == c) return e.formula;
  }
  return std::nullopt;
}

AnnotatedSequent AnnotatedSequent::without(const ChannelName& c) const {
  AnnotatedSequent out;
  for (const auto& e : entries_) {
    if (e.channel != c) out.entries_.push_back(e);
  }
  return out;
}

ChannelSet AnnotatedSequent::channels() const {
  ChannelSet out;
  for (const auto& e : entries_) out.insert(e.channel);
  return out;
}

std::vector<ChannelName> AnnotatedSequent::channel_list() const {
  std::vector<ChannelName> out;
  for (const auto& e : entries_) out.push_back(e.channel);
  return out;
}

std::vector<Formula> AnnotatedSequent::formula_multiset() const {
  std::vector<Formula> out;
  for (const auto& e : entries_) out.push_back(e.formula);
  std::sort(out.begin(), out.end());
  return out;
}

AnnotatedSequent AnnotatedSequent::renamed(
    const std::vector<std::pair<ChannelName, ChannelName>>& map) const {
  AnnotatedSequent out;
  for (const auto& e : entries_) {
    ChannelName c = e.channel;
    for (const auto& [from, to] : map) {
      if (from == c) {
        c = to;
        break;
      }
    }
    out.add(c, e.formula);
  }
  return out;
}

bool operator==(const AnnotatedSequent& a, const AnnotatedSequent& b) {
  if (a.size() != b.size()) return false;
  auto key = [](const AnnotatedSequent& s) {
    std::vector<std::pair<ChannelName, Formula>> v;
    for (const auto& e : s.entries()) v.emplace_back(e.channel, e.formula);
    std::sort(v.begin(), v.end());
    return v;
  };
  return key(a) == key(b);
}

AnnotatedSequent sequent_union(const AnnotatedSequent& a, const AnnotatedSequent& b) {
  AnnotatedSequent out = a;
  for (const auto& e : b.entries()) out.add(e.channel, e.formula);
  return out;
}

std::string print_sequent(const AnnotatedSequent& s) {
  std::string out;
  for (const auto& e : s.entries()) {
    if (!out.empty()) out += ", ";
    out += e.channel.str();
    out += ':';
    out += print_formula(e.formula);
  }
  return out;
}

AnnotatedSequent parse_sequent(std::string_view text) {
  AnnotatedSequent out;
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  skip();
  if (pos == text.size()) return out;
  while (true) {
    skip();
    std::size_t start = pos;
    while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) ++pos;
    auto name = text.substr(start, pos - start);
    if (!is_channel_identifier(name)) throw SyntaxError(start, "expected channel name");
    skip();
    if (pos >= text.size() || text[pos] != ':') throw SyntaxError(pos, "expected ':'");
    ++pos;
    // The formula runs to the next top-level comma.
    int nesting = 0;
    std::size_t fstart = pos;
    while (pos < text.size() && !(nesting == 0 && text[pos] == ',')) {
      if (text[pos] == '(') ++nesting;
      if (text[pos] == ')') --nesting;
      ++pos;
    }
    try {
      out.add(ChannelName::parse(name), parse_formula(text.substr(fstart, pos - fstart)));
    } catch (const SyntaxError& e) {
      throw SyntaxError(fstart + e.position(), "malformed formula");
    }
    if (pos == text.size()) return out;
    ++pos;
  }
}

}  // namespace llweave::cll
