#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace gam {

enum class Model { Sc, Gam0, Gam, GamArm };

// Same-address load-load ordering rule (ppo case 3 variant).
//   None:   loads of the same address are never ordered (base model).
//   PoPair: ordered unless a same-address store lies between them.
//   RfPair: ordered under the PoPair condition only when the two loads
//           read from different stores.
enum class LdLdRule { None, PoPair, RfPair };

struct ModelConfig {
  Model model = Model::Gam;
  bool scTotalOrder = false;  // ppo = program order over memory ops,
                              // load value taken from mo alone
  LdLdRule ldld = LdLdRule::PoPair;

  static ModelConfig for_model(Model m) {
    switch (m) {
      case Model::Sc:
        return {Model::Sc, true, LdLdRule::None};
      case Model::Gam0:
        return {Model::Gam0, false, LdLdRule::None};
      case Model::Gam:
        return {Model::Gam, false, LdLdRule::PoPair};
      case Model::GamArm:
        return {Model::GamArm, false, LdLdRule::RfPair};
    }
    return {};
  }

  bool operational_supported() const { return model != Model::GamArm; }
};

inline const char* to_string(Model m) {
  switch (m) {
    case Model::Sc: return "sc";
    case Model::Gam0: return "gam0";
    case Model::Gam: return "gam";
    case Model::GamArm: return "gam_arm";
  }
  return "?";
}

inline std::optional<Model> model_from_string(const std::string& s) {
  if (s == "sc") return Model::Sc;
  if (s == "gam0") return Model::Gam0;
  if (s == "gam") return Model::Gam;
  if (s == "gam_arm") return Model::GamArm;
  return std::nullopt;
}

// Thrown when a configured resource limit is exceeded.
struct BudgetError : std::runtime_error {
  enum class Kind { MemInstances, States };
  Kind kind;
  std::uint64_t limit;
  BudgetError(Kind k, std::uint64_t lim, const std::string& msg)
      : std::runtime_error(msg), kind(k), limit(lim) {}
};

// Thrown when an engine does not implement the requested model.
struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gam
