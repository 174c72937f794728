#include "llweave/services.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "llweave/error.hpp"

namespace llweave::services {

using cll::Formula;
using pi::Process;

namespace {

std::vector<std::string> tokens(std::string_view atom) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : atom) {
    if (c == '_') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

char first_initial(std::string_view atom) { return tokens(atom).front().front(); }
char last_initial(std::string_view atom) { return tokens(atom).back().front(); }

Formula iterated_tensor(const std::vector<std::string>& atoms) {
  Formula f = Formula::atom(atoms.back());
  for (auto it = atoms.rbegin() + 1; it != atoms.rend(); ++it) f = Formula::tensor(Formula::atom(*it), f);
  return f;
}

ChannelName claim(const std::string& base, ChannelSet& used) {
  ChannelName c = ChannelName::parse(base);
  if (used.contains(c)) c = fresh_variant(c, used);
  used.insert(c);
  return c;
}

}  // namespace

std::string payload_token(std::string_view atom) {
  auto ts = tokens(atom);
  if (ts.size() == 1) return ts.front().substr(0, 2);
  std::string out;
  for (const auto& t : ts) out += t.front();
  return out;
}

std::string service_initials(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (std::isupper(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (out.empty() && !name.empty()) out += static_cast<char>(std::tolower(static_cast<unsigned char>(name.front())));
  return out;
}

std::optional<Formula> result_formula(const ServiceSpec& s) {
  std::optional<Formula> result;
  if (!s.effects.empty() && !s.outputs.empty()) {
    result = Formula::tensor(iterated_tensor(s.effects), iterated_tensor(s.outputs));
  } else if (!s.effects.empty()) {
    result = iterated_tensor(s.effects);
  } else if (!s.outputs.empty()) {
    result = iterated_tensor(s.outputs);
  }
  if (s.exception) {
    Formula e = Formula::atom(*s.exception);
    result = result ? Formula::plus(*result, e) : e;
  }
  return result;
}

cll::AnnotatedSequent encode(const ServiceSpec& s) {
  std::vector<std::string> consumed = s.preconditions;
  consumed.insert(consumed.end(), s.inputs.begin(), s.inputs.end());
  std::optional<Formula> result = result_formula(s);
  if (consumed.empty() && !result) {
    throw Error(ErrorCode::EmptyService, "service '" + s.name + "' has no inputs or outputs");
  }

  // Atom entries are named by the initial of their first word, or of their
  // last word when that is ambiguous within the service.
  std::vector<std::string> atoms = consumed;
  bool atomic_result = result && result->is_atom();
  if (atomic_result) atoms.push_back(result->atom_name());
  std::map<char, int> first_counts;
  for (const auto& a : atoms) ++first_counts[first_initial(a)];
  auto letter = [&](const std::string& a) {
    char c = first_initial(a);
    return first_counts[c] > 1 ? last_initial(a) : c;
  };

  std::string initials = service_initials(s.name);
  ChannelSet used;
  cll::AnnotatedSequent out;
  for (const auto& a : consumed) out.add(claim(initials + letter(a), used), Formula::neg_atom(a));
  if (result) {
    std::string base = initials + (atomic_result ? letter(result->atom_name()) : 'o');
    out.add(claim(base, used), *result);
  }
  return out;
}

Translator::Translator(TranslateOptions options, ChannelSet reserved)
    : options_(std::move(options)), used_(std::move(reserved)) {}

ChannelName Translator::fresh(const std::string& base) { return claim(base, used_); }

ChannelName Translator::constant_for(const std::string& atom) {
  std::string base = payload_token(atom);
  if (!options_.unique_payloads) {
    for (const auto& c : constants_) {
      if (c.base == base) return c;
    }
  }
  ChannelName c = fresh(base);
  constants_.push_back(c);
  return c;
}

ChannelName Translator::binder_for(const std::string& atom) { return fresh(payload_token(atom)); }

ChannelName Translator::sub_channel(const Formula& f) {
  return fresh(options_.prefix + (f.is_atom() ? std::string(1, first_initial(f.atom_name())) : std::string("o")));
}

Process Translator::translate(const ChannelName& channel, const Formula& f) {
  switch (f.kind()) {
    case cll::Connective::PosAtom:
      return Process::output(channel, {constant_for(f.atom_name())}, Process::nil());
    case cll::Connective::NegAtom:
      return Process::input(channel, {binder_for(f.atom_name())}, Process::nil());
    case cll::Connective::Tensor:
    case cll::Connective::Par: {
      ChannelName a = sub_channel(f.left());
      ChannelName b = sub_channel(f.right());
      Process both = Process::parallel(translate(a, f.left()), translate(b, f.right()));
      if (f.kind() == cll::Connective::Par) return Process::input(channel, {a, b}, both);
      return Process::restrict({a, b}, Process::output(channel, {a, b}, both));
    }
    case cll::Connective::Plus: {
      ChannelName a = sub_channel(f.left());
      ChannelName b = sub_channel(f.right());
      ChannelName u = fresh("u");
      ChannelName v = fresh("v");
      Process choice = Process::sum(Process::output(u, {a}, translate(a, f.left())),
                                    Process::output(v, {b}, translate(b, f.right())));
      return Process::restrict({a, b}, Process::input(channel, {u, v}, choice));
    }
    case cll::Connective::With: {
      ChannelName u, v;
      if (options_.restrict_choices) {
        u = fresh("u");
        v = fresh("v");
      } else {
        // Free continuation names, named after the branch they select.
        auto name = [&](const Formula& branch) {
          ChannelName c = fresh((branch.is_atom() ? payload_token(branch.atom_name()) : std::string("k")) + "c");
          constants_.push_back(c);
          return c;
        };
        u = name(f.left());
        v = name(f.right());
      }
      ChannelName x = fresh("x");
      ChannelName y = fresh("y");
      Process offer = Process::sum(Process::input(u, {x}, translate(x, f.left())),
                                   Process::input(v, {y}, translate(y, f.right())));
      Process p = Process::output(channel, {u, v}, offer);
      return options_.restrict_choices ? Process::restrict({u, v}, p) : p;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unreachable formula kind");
}

ProcessDef stub(const ServiceSpec& s) {
  cll::AnnotatedSequent seq = encode(s);
  ProcessDef def;
  def.name = s.name;
  def.params = seq.channel_list();
  Translator tr(TranslateOptions{service_initials(s.name), false, true}, seq.channels());

  std::vector<std::pair<ChannelName, ChannelName>> receives;
  std::optional<cll::Entry> result;
  for (const auto& e : seq.entries()) {
    if (e.formula.kind() == cll::Connective::NegAtom) {
      receives.emplace_back(e.channel, tr.binder_for(e.formula.atom_name()));
    } else {
      result = e;
    }
  }
  Process body = result ? tr.translate(result->channel, result->formula) : Process::nil();
  for (auto it = receives.rbegin(); it != receives.rend(); ++it) body = Process::input(it->first, {it->second}, body);
  def.body = body;
  def.constants = tr.constants();
  return def;
}

ProcessDef client(const ServiceSpec& goal, const std::string& name) {
  cll::AnnotatedSequent seq = encode(goal);
  ProcessDef def;
  def.name = name;
  def.params = seq.channel_list();
  Translator tr(TranslateOptions{service_initials(goal.name), false, false}, seq.channels());

  std::vector<std::pair<ChannelName, ChannelName>> sends;
  std::optional<cll::Entry> result;
  for (const auto& e : seq.entries()) {
    if (e.formula.kind() == cll::Connective::NegAtom) {
      sends.emplace_back(e.channel, tr.constant_for(e.formula.atom_name()));
    } else {
      result = e;
    }
  }
  Process body = result ? tr.translate(result->channel, cll::negate(result->formula)) : Process::nil();
  for (auto it = sends.rbegin(); it != sends.rend(); ++it) body = Process::output(it->first, {it->second}, body);
  def.body = body;
  def.constants = tr.constants();
  return def;
}

// ---------------------------------------------------------------------------
// Registry documents

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_atom_name(std::string_view s) {
  if (s.empty() || !std::isupper(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isupper(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_';
  });
}

bool is_service_name(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::vector<std::string> atom_list(const std::string& text, std::size_t line) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::string a = trim(item);
    if (!is_atom_name(a)) throw SyntaxError(line, "invalid atom '" + a + "'", "line");
    out.push_back(a);
  }
  if (out.empty()) throw SyntaxError(line, "empty atom list", "line");
  return out;
}

}  // namespace

Document parse_document(std::string_view text) {
  Document doc;
  ServiceSpec* current = nullptr;
  std::map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;

  auto finish = [&] {
    if (current && current->inputs.empty() && current->outputs.empty()) {
      throw Error(ErrorCode::EmptyService, "service '" + current->name + "' has neither inputs nor outputs");
    }
    current = nullptr;
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (line.empty()) {
      finish();
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string::npos) {
      std::istringstream words(line);
      std::string keyword, name, extra;
      words >> keyword >> name >> extra;
      if ((keyword != "service" && keyword != "request") || !is_service_name(name) || !extra.empty()) {
        throw SyntaxError(line_no, "expected 'service <Name>' or 'request <Name>'", "line");
      }
      finish();
      if (seen.contains(name)) {
        throw Error(ErrorCode::DuplicateName, "duplicate service name '" + name + "' at line " +
                                                  std::to_string(line_no) + " (first defined at line " +
                                                  std::to_string(seen[name]) + ")");
      }
      seen[name] = line_no;
      auto& list = keyword == "service" ? doc.services : doc.requests;
      list.push_back(ServiceSpec{name, {}, {}, {}, {}, std::nullopt});
      current = &list.back();
      continue;
    }
    if (!current) throw SyntaxError(line_no, "field outside of a service block", "line");
    std::string key = trim(std::string_view(line).substr(0, colon));
    std::string value = trim(std::string_view(line).substr(colon + 1));
    auto atoms = atom_list(value, line_no);
    auto append = [&](std::vector<std::string>& dst) { dst.insert(dst.end(), atoms.begin(), atoms.end()); };
    if (key == "in") {
      append(current->inputs);
    } else if (key == "out") {
      append(current->outputs);
    } else if (key == "pre") {
      append(current->preconditions);
    } else if (key == "eff") {
      append(current->effects);
    } else if (key == "exc") {
      if (atoms.size() != 1 || current->exception) throw SyntaxError(line_no, "a service has at most one exception", "line");
      current->exception = atoms.front();
    } else {
      throw SyntaxError(line_no, "unknown field '" + key + "'", "line");
    }
  }
  finish();
  return doc;
}

std::vector<ServiceSpec> load_registry(std::string_view text) {
  Document doc = parse_document(text);
  if (!doc.requests.empty()) {
    throw Error(ErrorCode::InvalidArgument, "registry contains a request block ('" + doc.requests.front().name + "')");
  }
  return doc.services;
}

ServiceSpec load_request(std::string_view text) {
  Document doc = parse_document(text);
  if (doc.requests.size() != 1 || !doc.services.empty()) {
    throw Error(ErrorCode::InvalidArgument, "a request document holds exactly one 'request' block");
  }
  return doc.requests.front();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace llweave::services
