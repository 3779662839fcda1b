#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "smoothcat/fincat.hpp"
#include "smoothcat/forcing.hpp"

namespace smoothcat {

/// Input and output test families of one structure: per test object, the
/// maps from (itest) and to (otest) its carrier that count as tests.
/// Families are sorted sets of assignments, so equality of structures is
/// plain set equality.
struct TestFamilies {
  std::vector<std::vector<Assignment>> itest;  // by test object index
  std::vector<std::vector<Assignment>> otest;

  bool operator==(const TestFamilies&) const = default;
};

/// A carrier together with its test families.
struct VObject {
  Carrier carrier;
  TestFamilies fam;

  bool operator==(const VObject&) const = default;
};

/// Everything needed to interpret structures: the site, the forcing
/// condition, and resource caps. Immutable once built.
struct SmoothConfig {
  SitePtr site;
  ForcingSpec forcing;
  Caps caps;

  UnderlyingKind kind() const { return site->kind; }
  std::uint64_t fingerprint() const;
};

using ConfigPtr = std::shared_ptr<const SmoothConfig>;
ConfigPtr make_config(SitePtr site, ForcingSpec forcing, Caps caps = {});

bool family_contains(const std::vector<Assignment>& fam, const Assignment& f);
void family_insert(std::vector<Assignment>& fam, const Assignment& f);

std::vector<Violation> validate_vobject(const VObject& x, const SmoothConfig& cfg);

/// Whether f underlies a structure-preserving morphism x1 -> x2.
bool is_vmorphism(const Assignment& f, const VObject& x1, const VObject& x2,
                  const SmoothConfig& cfg);

/// The canonical structure on a test object's carrier: tests are exactly the
/// realised test morphisms in both directions.
VObject embed_test(int test_obj, const SmoothConfig& cfg);
VObject embed_test(const std::string& test_obj, const SmoothConfig& cfg);

/// Identity-lift order on structures over one carrier: a <= b when the
/// identity map underlies a morphism a -> b, i.e. itest grows and otest
/// shrinks componentwise.
bool order_leq(const VObject& a, const VObject& b);

/// The fibre over one carrier: every forcing-satisfying structure, in the
/// lexicographic order of the bit-encoding of (itest, otest).
struct FibreLattice {
  Carrier carrier;
  std::vector<VObject> elements;
  std::vector<std::vector<bool>> leq;  // leq[i][j]: elements[i] <= elements[j]

  int index_of(const VObject& x) const;  // -1 when absent
  int min_index() const;
  int max_index() const;
};

FibreLattice fibre_enumerate(const Carrier& carrier, const SmoothConfig& cfg);
/// Fibre enumeration result, memoised per (config fingerprint, carrier).
std::shared_ptr<const FibreLattice> fibre_cached(const Carrier& carrier, const SmoothConfig& cfg);

/// Every valid structure on the carrier, forcing ignored.
std::vector<VObject> enumerate_valid(const Carrier& carrier, const SmoothConfig& cfg);

/// Greatest lower / least upper bound of a family inside the fibre. The empty
/// meet is the fibre maximum (itest = all underlying maps); the empty join is
/// the fibre minimum.
VObject meet_structures(const std::vector<VObject>& s, const Carrier& carrier,
                        const SmoothConfig& cfg);
VObject join_structures(const std::vector<VObject>& s, const Carrier& carrier,
                        const SmoothConfig& cfg);

VObject fibre_min(const Carrier& carrier, const SmoothConfig& cfg);
VObject fibre_max(const Carrier& carrier, const SmoothConfig& cfg);

/// Aliases for fibre_min and fibre_max. The words "indiscrete" and "discrete"
/// are used inconsistently for these two constructions in the literature this
/// engine deals with, so prefer the min/max names; the aliases pin one
/// reading (indiscrete = minimum, discrete = maximum) and nothing else.
inline VObject indiscrete_structure(const Carrier& c, const SmoothConfig& cfg) {
  return fibre_min(c, cfg);
}
inline VObject discrete_structure(const Carrier& c, const SmoothConfig& cfg) {
  return fibre_max(c, cfg);
}

/// Total order used for deterministic reports: lexicographic on the
/// bit-encoding of (itest, otest) over the canonical candidate enumeration.
bool vobject_less(const VObject& a, const VObject& b, const SmoothConfig& cfg);

/// All probe carriers up to the cap: FinSet sizes 0..cap, or every topology
/// on those sizes in FinTop mode. Deterministic order.
std::vector<Carrier> probe_carriers(const SmoothConfig& cfg, int max_size = -1);

/// Families of x re-indexed along a list of test-object indices (the data
/// part of restricting to a sub-test-category).
VObject restrict_families(const VObject& x, const std::vector<int>& objects);

/// Candidate underlying maps test-carrier -> carrier (input) and
/// carrier -> test-carrier (output) for each test object, in canonical order.
struct CandidateMaps {
  std::vector<std::vector<Assignment>> in_cands;
  std::vector<std::vector<Assignment>> out_cands;
};
CandidateMaps candidate_maps(const Carrier& carrier, const SmoothConfig& cfg);

}  // namespace smoothcat
