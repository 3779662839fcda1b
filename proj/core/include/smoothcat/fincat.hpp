#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "smoothcat/util.hpp"

namespace smoothcat {

enum class UnderlyingKind { FinSet, FinTop };

/// Subset of a carrier's elements, one bit per element.
using Bits = std::uint32_t;

/// Finite topology: open sets as sorted bitmasks over the carrier.
struct Topology {
  std::vector<Bits> opens;

  bool contains(Bits set) const;
  bool operator==(const Topology&) const = default;
  auto operator<=>(const Topology&) const = default;
};

Topology discrete_topology(int size);
Topology indiscrete_topology(int size);
/// All topologies on a carrier of the given size, in a canonical order.
/// Brute force over families of subsets; refuses sizes above the scan cap.
std::vector<Topology> all_topologies(int size, int max_scan = 4);

/// Object of the underlying category: a finite set, optionally topologised.
struct Carrier {
  int size = 0;
  std::optional<Topology> topology;  // engaged exactly in FinTop mode

  UnderlyingKind kind() const {
    return topology ? UnderlyingKind::FinTop : UnderlyingKind::FinSet;
  }
  bool operator==(const Carrier&) const = default;
  auto operator<=>(const Carrier&) const = default;
};

Carrier finset_carrier(int size);
Carrier fintop_carrier(int size, Topology t);

/// Total function between carriers: target element per source element.
using Assignment = std::vector<std::uint8_t>;

Assignment identity_assignment(int size);
/// g after f.
Assignment compose(const Assignment& g, const Assignment& f);
Bits preimage(const Assignment& f, Bits target_set);
bool is_continuous(const Assignment& f, const Topology& src, const Topology& dst);
/// Whether f is a morphism of the underlying category between these carriers.
bool is_underlying_morphism(const Assignment& f, const Carrier& src, const Carrier& dst);

/// All assignments src -> dst in lexicographic order.
std::vector<Assignment> all_assignments(int src_size, int dst_size);
/// The underlying-category hom-set: all assignments in FinSet mode, the
/// continuous ones in FinTop mode. Lexicographic order.
std::vector<Assignment> continuous_maps(const Carrier& src, const Carrier& dst);

struct Morphism {
  std::string id;
  int src = 0;
  int dst = 0;
};

/// Category with finitely many objects and morphisms. Morphisms are opaque
/// ids; composition is an explicit table, so hom-sets can be proper subsets
/// of what the carriers would allow.
struct FinCategory {
  std::vector<std::string> objects;
  std::vector<Morphism> morphisms;
  std::vector<int> identities;                 // object index -> morphism index
  std::vector<std::vector<int>> compose_table; // [g][f] -> morphism index, -1 if not composable

  // Derived lookups, filled by finalize().
  std::vector<std::vector<std::vector<int>>> hom;  // [src][dst] -> morphism indices

  void finalize();
  int object_index(const std::string& id) const;
  int morphism_index(const std::string& id) const;
  /// g after f; requires dst(f) == src(g).
  int compose(int g, int f) const;
  const std::vector<int>& hom_set(int src, int dst) const;
  /// Object t with exactly one morphism into it from every object, if any.
  std::optional<int> terminal_object() const;
};

struct Violation {
  std::string code;
  std::string detail;
};

std::vector<Violation> validate_category(const FinCategory& cat);

/// Faithful realisation of a test category in the underlying category:
/// a carrier per object and an assignment per morphism.
struct ConcreteFunctor {
  std::vector<Carrier> on_objects;      // by object index
  std::vector<Assignment> on_morphisms; // by morphism index
};

std::vector<Violation> check_faithful_functor(const ConcreteFunctor& u,
                                              const FinCategory& cat,
                                              UnderlyingKind kind);

/// Covering families for the sheaf condition, keyed by the covered object.
/// Each family lists morphisms into (input side) that object.
struct Coverage {
  std::map<int, std::vector<std::vector<int>>> families;
};

/// Named detecting families for the specifically-determined condition.
/// Input families are morphisms into the key object, output families out of it.
struct DetFamilyList {
  std::map<int, std::vector<std::vector<int>>> input_families;
  std::map<int, std::vector<std::vector<int>>> output_families;
};

/// A concrete site: test category, its realisation in the underlying
/// category, and the named auxiliary data forcing conditions can refer to.
struct Site {
  std::string name;
  UnderlyingKind kind = UnderlyingKind::FinSet;
  FinCategory cat;
  ConcreteFunctor u;
  std::map<std::string, Coverage> coverages;
  std::map<std::string, DetFamilyList> det_lists;

  std::uint64_t fingerprint = 0;

  void finalize();
  std::vector<Violation> validate(const Caps& caps = {}) const;

  const Carrier& carrier_of(int obj) const { return u.on_objects.at(obj); }
  const Assignment& map_of(int mor) const { return u.on_morphisms.at(mor); }
  /// Morphism index realised by the given assignment between two test
  /// carriers, if any (unique when the functor is faithful).
  std::optional<int> image_morphism(int src_obj, int dst_obj, const Assignment& f) const;
  bool in_image(int src_obj, int dst_obj, const Assignment& f) const {
    return image_morphism(src_obj, dst_obj, f).has_value();
  }

 private:
  // (src,dst) -> assignment -> morphism index
  std::vector<std::vector<std::map<Assignment, int>>> image_index_;
};

using SitePtr = std::shared_ptr<const Site>;

}  // namespace smoothcat
