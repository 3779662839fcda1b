#pragma once

#include <memory>
#include <string>
#include <vector>

#include "smoothcat/fincat.hpp"

namespace smoothcat {

struct SmoothConfig;
struct VObject;
struct BaseChange;

enum class Direction { Input, Output };

/// One probe of a candidate map: a test-category leg and a structured leg.
/// The engine decides forcing by per-condition characterisations; trials are
/// kept for audit records and diagnostics.
struct Trial {
  Direction direction = Direction::Input;
  int test_leg = -1;          // morphism index: target t (input) or source t (output)
  Assignment space_leg;       // underlying map of the structured leg
};

/// How a forcing condition built on one configuration is re-read on another.
enum class TransferMode {
  ViaFunctor,  // candidate is forced when its image under the base functor is
  ViaLifts,    // candidate is forced at the finest (input) / coarsest (output) lift
  ExtendMin,   // forced when it factors through a forced map on a sub-test-category
  ExtendMax,   // forced when all its restrictions to the sub-test-category are forced
};

/// A condition evaluated through another configuration. Which structure the
/// inner condition sees depends on the mode: the functor image, a topological
/// lift, or the restriction to a sub-test-category.
struct TransferredCondition {
  TransferMode mode = TransferMode::ViaFunctor;
  std::shared_ptr<const SmoothConfig> inner;   // configuration owning the inner term
  std::shared_ptr<const BaseChange> base;      // ViaFunctor / ViaLifts
  std::vector<int> small_objects;              // ExtendMin / ExtendMax: big-site object indices
  std::vector<int> small_morphisms;            // big-site morphism indices
  std::string label;                           // stable tag for serialisation and cache keys
};

/// One clause of a forcing condition.
///
/// The catalogue:
///   empty        nothing is forced.
///   terminal     maps factoring through the terminal test object are forced.
///   saturation   a map is forced when every composite with the opposite-side
///                test family is realised by a test morphism.
///   sheaf        input side: forced along a named coverage of the test
///                category; output side: forced when the map agrees with
///                genuine output tests on an open cover of the carrier.
///   determined   forced through any family of test morphisms that detects
///                membership in the image of the test category.
///   specdet      as determined, but only through a named, pre-declared list
///                of detecting families.
///   union(...)   forced under any member condition.
struct ConditionTerm {
  enum class Kind { Empty, Terminal, Saturation, Sheaf, Determined, SpecDet, Union, Transferred };
  Kind kind = Kind::Empty;
  std::string coverage_name;              // Sheaf, input side
  std::string det_list_name;              // SpecDet
  std::vector<ConditionTerm> members;     // Union
  std::shared_ptr<const TransferredCondition> transfer;  // Transferred

  static ConditionTerm empty() { return {}; }
  static ConditionTerm terminal() { return {Kind::Terminal, {}, {}, {}, nullptr}; }
  static ConditionTerm saturation() { return {Kind::Saturation, {}, {}, {}, nullptr}; }
  static ConditionTerm sheaf(std::string coverage = {}) {
    return {Kind::Sheaf, std::move(coverage), {}, {}, nullptr};
  }
  static ConditionTerm determined() { return {Kind::Determined, {}, {}, {}, nullptr}; }
  static ConditionTerm specdet(std::string list) {
    return {Kind::SpecDet, {}, std::move(list), {}, nullptr};
  }
  static ConditionTerm union_of(std::vector<ConditionTerm> ms) {
    return {Kind::Union, {}, {}, std::move(ms), nullptr};
  }
};

/// A pair of condition terms, one per direction.
struct ForcingSpec {
  ConditionTerm input;
  ConditionTerm output;
};

/// Canonical textual form: "<input-term>; <output-term>" with terms drawn from
/// empty | terminal | saturation | sheaf(<name>) | determined | specdet(<name>)
/// | union(a,b,...).
ForcingSpec parse_forcing(const std::string& text);
std::string format_forcing(const ForcingSpec& spec);
std::string format_term(const ConditionTerm& term);

bool is_forced(const Assignment& f, int test_obj, const VObject& x, Direction dir,
               const SmoothConfig& cfg);
bool satisfies_forcing(const VObject& x, const SmoothConfig& cfg);

/// Nothing between embedded test objects may be forced unless it is already
/// realised by a test morphism. Violations carry the offending map.
struct StupidityViolation {
  Direction direction;
  int src_obj;
  int dst_obj;
  Assignment map;
  std::string detail;
};
std::vector<StupidityViolation> audit_non_stupid(const SmoothConfig& cfg);

/// Probe-based ordering of forcing conditions: a <= b when every map forced
/// under a is forced under b, for every structure on carriers up to the cap.
bool condition_leq(const ForcingSpec& a, const ForcingSpec& b, const SitePtr& site,
                   const Caps& caps = {});

/// Nearest structures of a stronger condition around a weakly-constrained one:
/// the meet of everything above (forcing_meet) and the join of everything
/// below (forcing_join), computed inside the strong fibre.
VObject forcing_meet(const VObject& a, const SmoothConfig& weak, const SmoothConfig& strong);
VObject forcing_join(const VObject& a, const SmoothConfig& weak, const SmoothConfig& strong);

struct ForadjReport {
  bool leq_holds = false;         // a lies below the meet of its strong upper set
  bool otest_preserved = false;   // that meet keeps a's output families
};
ForadjReport check_foradj(const VObject& a, const SmoothConfig& weak, const SmoothConfig& strong);

/// Detecting families for the determined condition: all families of test
/// morphisms into (input) or out of (output) the object whose composites
/// decide membership in the image of the test category.
std::vector<std::vector<int>> detecting_families(const SitePtr& site, int obj, Direction dir);
bool family_detects(const Site& site, int obj, Direction dir, const std::vector<int>& family);

/// Validity of named specdet lists and, where referenced, coverages.
std::vector<Violation> validate_forcing_names(const ConditionTerm& term, const Site& site,
                                              Direction dir);

}  // namespace smoothcat
