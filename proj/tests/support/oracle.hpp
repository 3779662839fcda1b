#pragma once

// Independent brute-force oracles used to pin expected values. These go out
// of their way NOT to share machinery with the engine: enumeration is a raw
// power-set filter through the public validity definitions, and lattice
// bounds are computed by scanning for common bounds.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "smoothcat/forcing.hpp"
#include "smoothcat/spaces.hpp"

namespace smoothcat::oracle {

/// Every subset of a candidate list, as sorted families.
inline std::vector<std::vector<Assignment>> all_subsets(const std::vector<Assignment>& cands) {
  std::vector<std::vector<Assignment>> out;
  std::uint64_t limit = 1ull << cands.size();
  for (std::uint64_t mask = 0; mask < limit; ++mask) {
    std::vector<Assignment> fam;
    for (std::size_t i = 0; i < cands.size(); ++i)
      if (mask & (1ull << i)) fam.push_back(cands[i]);
    out.push_back(std::move(fam));
  }
  return out;
}

/// Raw power-set filter: all structures on the carrier, checked one subset
/// tuple at a time against validate_vobject (and satisfies_forcing when
/// with_forcing is set).
inline std::vector<VObject> enumerate(const Carrier& carrier, const SmoothConfig& cfg,
                                      bool with_forcing = true) {
  auto cands = candidate_maps(carrier, cfg);
  auto n = cands.in_cands.size();
  std::vector<std::vector<std::vector<Assignment>>> in_choices(n), out_choices(n);
  for (std::size_t t = 0; t < n; ++t) {
    in_choices[t] = all_subsets(cands.in_cands[t]);
    out_choices[t] = all_subsets(cands.out_cands[t]);
  }

  std::vector<VObject> found;
  VObject x;
  x.carrier = carrier;
  x.fam.itest.resize(n);
  x.fam.otest.resize(n);
  // Odometer over the 2n subset choices.
  std::vector<std::size_t> pick(2 * n, 0);
  for (;;) {
    for (std::size_t t = 0; t < n; ++t) {
      x.fam.itest[t] = in_choices[t][pick[t]];
      x.fam.otest[t] = out_choices[t][pick[n + t]];
    }
    if (validate_vobject(x, cfg).empty() && (!with_forcing || satisfies_forcing(x, cfg)))
      found.push_back(x);
    std::size_t d = 0;
    while (d < 2 * n) {
      std::size_t limit = d < n ? in_choices[d].size() : out_choices[d - n].size();
      if (++pick[d] < limit) break;
      pick[d] = 0;
      ++d;
    }
    if (d == 2 * n) break;
  }
  std::sort(found.begin(), found.end(),
            [&](const VObject& a, const VObject& b) { return vobject_less(a, b, cfg); });
  return found;
}

/// Greatest lower bound by scanning the fibre for the maximum common lower
/// bound. Returns -1 when none exists.
inline int brute_glb(const std::vector<VObject>& fibre, const std::vector<int>& subset) {
  std::vector<int> lower;
  for (std::size_t i = 0; i < fibre.size(); ++i) {
    bool below_all = true;
    for (int s : subset)
      if (!order_leq(fibre[i], fibre[s])) {
        below_all = false;
        break;
      }
    if (below_all) lower.push_back(static_cast<int>(i));
  }
  for (int cand : lower) {
    bool top_of_lower = true;
    for (int other : lower)
      if (!order_leq(fibre[other], fibre[cand])) {
        top_of_lower = false;
        break;
      }
    if (top_of_lower) return cand;
  }
  return -1;
}

inline int brute_lub(const std::vector<VObject>& fibre, const std::vector<int>& subset) {
  std::vector<int> upper;
  for (std::size_t i = 0; i < fibre.size(); ++i) {
    bool above_all = true;
    for (int s : subset)
      if (!order_leq(fibre[s], fibre[i])) {
        above_all = false;
        break;
      }
    if (above_all) upper.push_back(static_cast<int>(i));
  }
  for (int cand : upper) {
    bool bottom_of_upper = true;
    for (int other : upper)
      if (!order_leq(fibre[cand], fibre[other])) {
        bottom_of_upper = false;
        break;
      }
    if (bottom_of_upper) return cand;
  }
  return -1;
}

/// Adequacy by a plain triple scan, written independently of the engine.
inline bool adequate_scan(const Site& site, const std::vector<int>& small_objects) {
  auto n = static_cast<int>(site.cat.objects.size());
  auto is_small = [&](int o) {
    return std::find(small_objects.begin(), small_objects.end(), o) != small_objects.end();
  };
  for (int b1 = 0; b1 < n; ++b1)
    for (int b2 = 0; b2 < n; ++b2)
      for (const auto& f : continuous_maps(site.carrier_of(b1), site.carrier_of(b2))) {
        if (site.in_image(b1, b2, f)) continue;
        bool detected = false;
        for (std::size_t m1 = 0; m1 < site.cat.morphisms.size() && !detected; ++m1) {
          if (!is_small(site.cat.morphisms[m1].src) || site.cat.morphisms[m1].dst != b1) continue;
          for (std::size_t m2 = 0; m2 < site.cat.morphisms.size(); ++m2) {
            if (site.cat.morphisms[m2].src != b2 || !is_small(site.cat.morphisms[m2].dst)) continue;
            Assignment comp = compose(site.map_of(static_cast<int>(m2)),
                                      compose(f, site.map_of(static_cast<int>(m1))));
            if (!site.in_image(site.cat.morphisms[m1].src, site.cat.morphisms[m2].dst, comp)) {
              detected = true;
              break;
            }
          }
        }
        if (!detected) return false;
      }
  return true;
}

}  // namespace smoothcat::oracle
