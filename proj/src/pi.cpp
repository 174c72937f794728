#include "llweave/pi.hpp"

#include <algorithm>
#include <cctype>

#include "llweave/error.hpp"

namespace llweave::pi {

struct Process::Node {
  Kind kind = Kind::Nil;
  ChannelName chan;
  Names names;
  std::string label;  // origin for prefixes, definition name for Ref
  std::vector<Process> kids;
  ChannelSet fn;
};

namespace {

void require_distinct(const Names& names, const char* what) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = i + 1; j < names.size(); ++j) {
      if (names[i] == names[j]) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string(what) + " names must be distinct: '" + names[i].str() + "'");
      }
    }
  }
}

}  // namespace

Process::Process() {
  static const auto nil_node = std::make_shared<const Node>();
  node_ = nil_node;
}

Process Process::input(ChannelName chan, Names params, Process body, std::string origin) {
  require_distinct(params, "input parameter");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Input;
  n->fn = body.free_names();
  for (const auto& p : params) n->fn.erase(p);
  n->fn.insert(chan);
  n->chan = std::move(chan);
  n->names = std::move(params);
  n->label = std::move(origin);
  n->kids.push_back(std::move(body));
  return Process(std::move(n));
}

Process Process::output(ChannelName chan, Names args, Process body, std::string origin) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Output;
  n->fn = body.free_names();
  n->fn.insert(chan);
  n->fn.insert(args.begin(), args.end());
  n->chan = std::move(chan);
  n->names = std::move(args);
  n->label = std::move(origin);
  n->kids.push_back(std::move(body));
  return Process(std::move(n));
}

Process Process::parallel(Process a, Process b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Parallel;
  n->fn = a.free_names();
  n->fn.insert(b.free_names().begin(), b.free_names().end());
  n->kids = {std::move(a), std::move(b)};
  return Process(std::move(n));
}

Process Process::sum(Process a, Process b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  n->fn = a.free_names();
  n->fn.insert(b.free_names().begin(), b.free_names().end());
  n->kids = {std::move(a), std::move(b)};
  return Process(std::move(n));
}

Process Process::restrict(Names names, Process body) {
  if (names.empty()) throw Error(ErrorCode::InvalidArgument, "restriction needs at least one name");
  require_distinct(names, "restricted");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Restrict;
  n->fn = body.free_names();
  for (const auto& x : names) n->fn.erase(x);
  n->names = std::move(names);
  n->kids.push_back(std::move(body));
  return Process(std::move(n));
}

Process Process::replicate(Process body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Replicate;
  n->fn = body.free_names();
  n->kids.push_back(std::move(body));
  return Process(std::move(n));
}

Process Process::ref(std::string name, Names args) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Ref;
  n->fn.insert(args.begin(), args.end());
  n->label = std::move(name);
  n->names = std::move(args);
  return Process(std::move(n));
}

Process Process::parallel_all(const std::vector<Process>& ps) {
  if (ps.empty()) return nil();
  Process acc = ps.back();
  for (auto it = ps.rbegin() + 1; it != ps.rend(); ++it) acc = parallel(*it, acc);
  return acc;
}

Kind Process::kind() const { return node_->kind; }
const ChannelName& Process::channel() const { return node_->chan; }
const Names& Process::names() const { return node_->names; }
const std::string& Process::ref_name() const { return node_->label; }
const std::string& Process::origin() const {
  static const std::string empty;
  return is_prefix() ? node_->label : empty;
}
const ChannelSet& Process::free_names() const { return node_->fn; }

const Process& Process::body() const { return node_->kids.at(0); }
const Process& Process::left() const { return node_->kids.at(0); }
const Process& Process::right() const { return node_->kids.at(1); }

Process Process::relabeled(const std::string& origin) const {
  switch (kind()) {
    case Kind::Nil:
    case Kind::Ref: return *this;
    case Kind::Input: return input(channel(), names(), body().relabeled(origin), origin);
    case Kind::Output: return output(channel(), names(), body().relabeled(origin), origin);
    case Kind::Parallel: return parallel(left().relabeled(origin), right().relabeled(origin));
    case Kind::Sum: return sum(left().relabeled(origin), right().relabeled(origin));
    case Kind::Restrict: return restrict(names(), body().relabeled(origin));
    case Kind::Replicate: return replicate(body().relabeled(origin));
  }
  return *this;
}

bool operator==(const Process& a, const Process& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Kind::Nil: return true;
    case Kind::Input:
    case Kind::Output:
      return a.channel() == b.channel() && a.names() == b.names() && a.body() == b.body();
    case Kind::Parallel:
    case Kind::Sum: return a.left() == b.left() && a.right() == b.right();
    case Kind::Restrict: return a.names() == b.names() && a.body() == b.body();
    case Kind::Replicate: return a.body() == b.body();
    case Kind::Ref: return a.ref_name() == b.ref_name() && a.names() == b.names();
  }
  return false;
}

ChannelSet free_names(const Process& p) { return p.free_names(); }

namespace {

void collect_names(const Process& p, ChannelSet& out) {
  switch (p.kind()) {
    case Kind::Nil: return;
    case Kind::Input:
    case Kind::Output:
      out.insert(p.channel());
      out.insert(p.names().begin(), p.names().end());
      collect_names(p.body(), out);
      return;
    case Kind::Parallel:
    case Kind::Sum:
      collect_names(p.left(), out);
      collect_names(p.right(), out);
      return;
    case Kind::Restrict:
      out.insert(p.names().begin(), p.names().end());
      collect_names(p.body(), out);
      return;
    case Kind::Replicate: collect_names(p.body(), out); return;
    case Kind::Ref: out.insert(p.names().begin(), p.names().end()); return;
  }
}

ChannelName rename_with(const Substitution& m, const ChannelName& c) {
  auto it = m.find(c);
  return it == m.end() ? c : it->second;
}

Names rename_with(const Substitution& m, const Names& ns) {
  Names out;
  out.reserve(ns.size());
  for (const auto& c : ns) out.push_back(rename_with(m, c));
  return out;
}

// Handles the binder `bound` over `body`: drops shadowed entries and
// freshens binders that would capture a name from the map's range.
std::pair<Names, Process> subst_under_binder(const Names& bound, const Process& body,
                                             Substitution inner) {
  for (const auto& b : bound) inner.erase(b);
  std::erase_if(inner, [&](const auto& kv) { return !body.free_names().contains(kv.first); });
  if (inner.empty()) return {bound, body};
  ChannelSet range;
  for (const auto& [k, v] : inner) range.insert(v);
  ChannelSet avoid = range;
  avoid.insert(body.free_names().begin(), body.free_names().end());
  avoid.insert(bound.begin(), bound.end());
  Names renamed;
  for (const auto& b : bound) {
    if (range.contains(b)) {
      ChannelName fresh = fresh_variant(b, avoid);
      avoid.insert(fresh);
      inner[b] = fresh;
      renamed.push_back(fresh);
    } else {
      renamed.push_back(b);
    }
  }
  return {renamed, substitute(body, inner)};
}

}  // namespace

ChannelSet all_names(const Process& p) {
  ChannelSet out;
  collect_names(p, out);
  return out;
}

Process substitute(const Process& p, const Substitution& map) {
  Substitution rel;
  for (const auto& [k, v] : map) {
    if (k != v && p.free_names().contains(k)) rel.emplace(k, v);
  }
  if (rel.empty()) return p;
  switch (p.kind()) {
    case Kind::Nil: return p;
    case Kind::Input: {
      auto [params, body] = subst_under_binder(p.names(), p.body(), rel);
      return Process::input(rename_with(rel, p.channel()), params, body, p.origin());
    }
    case Kind::Output:
      return Process::output(rename_with(rel, p.channel()), rename_with(rel, p.names()), substitute(p.body(), rel),
                             p.origin());
    case Kind::Parallel: return Process::parallel(substitute(p.left(), rel), substitute(p.right(), rel));
    case Kind::Sum: return Process::sum(substitute(p.left(), rel), substitute(p.right(), rel));
    case Kind::Restrict: {
      auto [names, body] = subst_under_binder(p.names(), p.body(), rel);
      return Process::restrict(names, body);
    }
    case Kind::Replicate: return Process::replicate(substitute(p.body(), rel));
    case Kind::Ref: return Process::ref(p.ref_name(), rename_with(rel, p.names()));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

class ProcessParser {
 public:
  explicit ProcessParser(std::string_view text) : text_(text) {}

  Process parse_all() {
    Process p = parallel_level();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(pos_, msg); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string_view identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected identifier");
    return text_.substr(start, pos_ - start);
  }

  ChannelName channel_name() {
    std::size_t start = pos_;
    auto id = identifier();
    if (!is_channel_identifier(id) || id == "nu") {
      pos_ = start;
      fail("expected channel name");
    }
    return ChannelName::parse(id);
  }

  Names name_list(char close) {
    Names out;
    if (accept(close)) return out;
    do {
      out.push_back(channel_name());
    } while (accept(','));
    expect(close);
    return out;
  }

  Process parallel_level() {
    Process p = sum_level();
    while (accept('|')) p = Process::parallel(p, sum_level());
    return p;
  }

  Process sum_level() {
    Process p = unary();
    while (accept('+')) p = Process::sum(p, unary());
    return p;
  }

  Process continuation() {
    if (accept('.')) return unary();
    return Process::nil();
  }

  bool at_keyword_nu() {
    skip_ws();
    if (text_.substr(pos_, 2) != "nu") return false;
    std::size_t after = pos_ + 2;
    return after < text_.size() && !std::isalnum(static_cast<unsigned char>(text_[after])) &&
           text_[after] != '_';
  }

  Process unary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of process");
    char c = text_[pos_];
    if (c == '0') {
      ++pos_;
      return Process::nil();
    }
    if (c == '!') {
      ++pos_;
      return Process::replicate(unary());
    }
    if (c == '(') {
      ++pos_;
      Process p = parallel_level();
      expect(')');
      return p;
    }
    if (at_keyword_nu()) {
      pos_ += 2;
      Names names;
      do {
        names.push_back(channel_name());
      } while (accept(','));
      expect('.');
      return Process::restrict(std::move(names), unary());
    }
    if (std::isupper(static_cast<unsigned char>(c))) {
      std::string name(identifier());
      expect('(');
      return Process::ref(std::move(name), name_list(')'));
    }
    ChannelName chan = channel_name();
    if (accept('(')) {
      std::size_t at = pos_;
      Names params = name_list(')');
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (std::find(params.begin() + static_cast<long>(i) + 1, params.end(), params[i]) != params.end()) {
          throw SyntaxError(at, "repeated input parameter '" + params[i].str() + "'");
        }
      }
      return Process::input(std::move(chan), std::move(params), continuation());
    }
    if (accept('<')) {
      Names args = name_list('>');
      return Process::output(std::move(chan), std::move(args), continuation());
    }
    fail("expected '(' or '<' after channel name");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string join(const Names& ns) {
  std::string out;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (i) out += ',';
    out += ns[i].str();
  }
  return out;
}

// level: 0 = parallel operand, 1 = sum operand, 2 = unary operand
void print_into(const Process& p, int level, std::string& out) {
  switch (p.kind()) {
    case Kind::Nil: out += '0'; return;
    case Kind::Input:
      out += p.channel().str() + "(" + join(p.names()) + ").";
      print_into(p.body(), 2, out);
      return;
    case Kind::Output:
      out += p.channel().str() + "<" + join(p.names()) + ">.";
      print_into(p.body(), 2, out);
      return;
    case Kind::Parallel:
      if (level > 0) out += '(';
      print_into(p.left(), 0, out);
      out += " | ";
      print_into(p.right(), 1, out);
      if (level > 0) out += ')';
      return;
    case Kind::Sum:
      if (level > 1) out += '(';
      print_into(p.left(), 1, out);
      out += " + ";
      print_into(p.right(), 2, out);
      if (level > 1) out += ')';
      return;
    case Kind::Restrict:
      out += "nu " + join(p.names()) + ". ";
      print_into(p.body(), 2, out);
      return;
    case Kind::Replicate:
      out += '!';
      print_into(p.body(), 2, out);
      return;
    case Kind::Ref: out += p.ref_name() + "(" + join(p.names()) + ")"; return;
  }
}

}  // namespace

Process parse_process(std::string_view text) { return ProcessParser(text).parse_all(); }

std::string print_process(const Process& p) {
  std::string out;
  print_into(p, 0, out);
  return out;
}

const Process& subterm_at(const Process& p, const Path& path) {
  const Process* cur = &p;
  for (auto idx : path) {
    switch (cur->kind()) {
      case Kind::Input:
      case Kind::Output:
      case Kind::Restrict:
      case Kind::Replicate:
        if (idx != 0) throw Error(ErrorCode::InvalidArgument, "invalid path");
        cur = &cur->body();
        break;
      case Kind::Parallel:
      case Kind::Sum:
        if (idx > 1) throw Error(ErrorCode::InvalidArgument, "invalid path");
        cur = idx == 0 ? &cur->left() : &cur->right();
        break;
      default: throw Error(ErrorCode::InvalidArgument, "invalid path");
    }
  }
  return *cur;
}

namespace {

Process replace_from(const Process& p, const Path& path, std::size_t i, const Process& repl) {
  if (i == path.size()) return repl;
  switch (p.kind()) {
    case Kind::Input:
      return Process::input(p.channel(), p.names(), replace_from(p.body(), path, i + 1, repl), p.origin());
    case Kind::Output:
      return Process::output(p.channel(), p.names(), replace_from(p.body(), path, i + 1, repl), p.origin());
    case Kind::Restrict: return Process::restrict(p.names(), replace_from(p.body(), path, i + 1, repl));
    case Kind::Replicate: return Process::replicate(replace_from(p.body(), path, i + 1, repl));
    case Kind::Parallel:
      return path[i] == 0 ? Process::parallel(replace_from(p.left(), path, i + 1, repl), p.right())
                          : Process::parallel(p.left(), replace_from(p.right(), path, i + 1, repl));
    case Kind::Sum:
      return path[i] == 0 ? Process::sum(replace_from(p.left(), path, i + 1, repl), p.right())
                          : Process::sum(p.left(), replace_from(p.right(), path, i + 1, repl));
    default: throw Error(ErrorCode::InvalidArgument, "invalid path");
  }
}

void collect_subterms(const Process& p, std::vector<Process>& out) {
  out.push_back(p);
  switch (p.kind()) {
    case Kind::Input:
    case Kind::Output:
    case Kind::Restrict:
    case Kind::Replicate: collect_subterms(p.body(), out); break;
    case Kind::Parallel:
    case Kind::Sum:
      collect_subterms(p.left(), out);
      collect_subterms(p.right(), out);
      break;
    default: break;
  }
}

}  // namespace

Process replace_at(const Process& p, const Path& path, const Process& replacement) {
  return replace_from(p, path, 0, replacement);
}

std::vector<Process> subterms(const Process& p) {
  std::vector<Process> out;
  collect_subterms(p, out);
  return out;
}

Process prune(const Process& p) {
  switch (p.kind()) {
    case Kind::Nil:
    case Kind::Ref: return p;
    case Kind::Input: return Process::input(p.channel(), p.names(), prune(p.body()), p.origin());
    case Kind::Output: return Process::output(p.channel(), p.names(), prune(p.body()), p.origin());
    case Kind::Parallel:
    case Kind::Sum: {
      Process l = prune(p.left());
      Process r = prune(p.right());
      if (l.is_nil()) return r;
      if (r.is_nil()) return l;
      return p.kind() == Kind::Parallel ? Process::parallel(l, r) : Process::sum(l, r);
    }
    case Kind::Restrict: {
      Process body = prune(p.body());
      Names used;
      for (const auto& n : p.names()) {
        if (body.free_names().contains(n)) used.push_back(n);
      }
      if (used.empty()) return body;
      return Process::restrict(std::move(used), body);
    }
    case Kind::Replicate: return Process::replicate(prune(p.body()));
  }
  return p;
}

}  // namespace llweave::pi
