#pragma once

// Service descriptions, their sequent encoding, and generated pi-calculus
// stubs and request clients.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llweave/cll.hpp"
#include "llweave/pi.hpp"

namespace llweave::services {

struct ServiceSpec {
  std::string name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> preconditions;
  std::vector<std::string> effects;
  std::optional<std::string> exception;

  bool operator==(const ServiceSpec&) const = default;
};

// A named process with parameters substituted on instantiation. Constants
// are free payload names that stay global.
struct ProcessDef {
  std::string name;
  pi::Names params;
  pi::Names constants;
  pi::Process body;
};

// Effects then outputs, tensored, optionally `+ exception`. Empty when the
// service produces nothing.
std::optional<cll::Formula> result_formula(const ServiceSpec& s);

cll::AnnotatedSequent encode(const ServiceSpec& s);
ProcessDef stub(const ServiceSpec& s);
ProcessDef client(const ServiceSpec& goal, const std::string& name = "Request");

// Lowercase payload token for an atom: LENGTH_CM -> lc, BRAND -> br.
std::string payload_token(std::string_view atom);
// Uppercase letters of a service name, lowercased: SelLen -> sl.
std::string service_initials(std::string_view name);

struct TranslateOptions {
  // Base for generated sub-channel names.
  std::string prefix = "k";
  // Give each emitted payload constant its own suffix.
  bool unique_payloads = false;
  // Restrict the continuation pair sent for a `&`.
  bool restrict_choices = true;
};

// Translation of a formula into the process that offers it on a channel:
// positive atoms send a payload, negative atoms receive one, * sends a pair
// of fresh channels, % receives one, + receives a continuation pair and
// selects one of them, & sends a continuation pair and offers both branches.
class Translator {
 public:
  Translator(TranslateOptions options, ChannelSet reserved);

  pi::Process translate(const ChannelName& channel, const cll::Formula& f);
  ChannelName constant_for(const std::string& atom);
  ChannelName binder_for(const std::string& atom);
  // Free payload names emitted so far, in order of first use.
  const pi::Names& constants() const { return constants_; }

 private:
  ChannelName fresh(const std::string& base);
  ChannelName sub_channel(const cll::Formula& f);

  TranslateOptions options_;
  ChannelSet used_;
  pi::Names constants_;
};

struct Document {
  std::vector<ServiceSpec> services;
  std::vector<ServiceSpec> requests;
};

// Line-oriented format: `service Name` / `request Name` headers followed by
// `in:`, `out:`, `pre:`, `eff:`, `exc:` lines; `#` starts a comment; blocks
// are separated by blank lines.
Document parse_document(std::string_view text);
std::vector<ServiceSpec> load_registry(std::string_view text);
ServiceSpec load_request(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace llweave::services
