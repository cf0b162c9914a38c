#pragma once

#include <picheck/logic.hpp>
#include <picheck/process.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace picheck {

enum class Protocol : std::uint8_t { bac, feldhofer };
enum class Style : std::uint8_t { min, get, ch, two };
enum class Variant : std::uint8_t { silent, error };
enum class Side : std::uint8_t { system, spec };

struct ModelId {
  Protocol protocol = Protocol::bac;
  Style style = Style::min;
  Variant variant = Variant::silent;
  Side side = Side::system;

  // "bac-get", "feldhofer-min-err", ...
  std::string name() const;
  bool operator==(const ModelId&) const = default;
};

// Parses a model name such as "feldhofer-min-err"; throws Error.
ModelId parse_model_name(std::string_view name, Side side);
std::vector<std::string> model_names();
Side parse_side(std::string_view text);

// Source text of the model, with the role definitions it uses.
std::string model_source(const ModelId& id);
ExtendedProcess build_model(const ModelId& id);

struct Attack {
  std::string name;
  Dialect dialect;
  std::string source;
  std::string model;  // the model name it targets
  bool system_satisfies;
  bool spec_satisfies;
  unsigned bang_cap;
};

const std::vector<Attack>& attacks();
const Attack& find_attack(std::string_view name);
// Parsed, with free variables instantiated as fresh public constants.
Formula attack_formula(std::string_view name);

// Small worked examples used by the documentation and the acceptance suite.
struct ExamplePair {
  std::string name;
  std::string left;
  std::string right;
  // A located formula satisfied by the left process only; empty if none.
  std::string left_only_formula;
};

const std::vector<ExamplePair>& example_pairs();
const ExamplePair& find_example(std::string_view name);

}  // namespace picheck
