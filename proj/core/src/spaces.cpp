#include "smoothcat/spaces.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

namespace smoothcat {

std::uint64_t SmoothConfig::fingerprint() const {
  std::uint64_t h = fnv1a(0, site->fingerprint);
  h = fnv1a(h, format_forcing(forcing));
  return h;
}

ConfigPtr make_config(SitePtr site, ForcingSpec forcing, Caps caps) {
  auto cfg = std::make_shared<SmoothConfig>();
  cfg->site = std::move(site);
  cfg->forcing = std::move(forcing);
  cfg->caps = caps;
  return cfg;
}

bool family_contains(const std::vector<Assignment>& fam, const Assignment& f) {
  return std::binary_search(fam.begin(), fam.end(), f);
}

void family_insert(std::vector<Assignment>& fam, const Assignment& f) {
  auto it = std::lower_bound(fam.begin(), fam.end(), f);
  if (it == fam.end() || *it != f) fam.insert(it, f);
}

namespace {

std::string obj_name(const SmoothConfig& cfg, int t) { return cfg.site->cat.objects.at(t); }

std::string show(const Assignment& a) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) os << ',';
    os << int(a[i]);
  }
  os << ']';
  return os.str();
}

void check_carrier_kind(const Carrier& c, const SmoothConfig& cfg) {
  if (c.kind() != cfg.kind())
    throw InputError("carrier kind does not match the configuration");
  if (c.size > cfg.caps.max_carrier)
    throw CapError("carrier size " + std::to_string(c.size) + " exceeds the cap " +
                       std::to_string(cfg.caps.max_carrier),
                   cfg.caps.max_carrier, c.size);
}

}  // namespace

CandidateMaps candidate_maps(const Carrier& carrier, const SmoothConfig& cfg) {
  CandidateMaps out;
  auto n = cfg.site->cat.objects.size();
  out.in_cands.resize(n);
  out.out_cands.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    out.in_cands[t] = continuous_maps(cfg.site->carrier_of(static_cast<int>(t)), carrier);
    out.out_cands[t] = continuous_maps(carrier, cfg.site->carrier_of(static_cast<int>(t)));
  }
  return out;
}

std::vector<Violation> validate_vobject(const VObject& x, const SmoothConfig& cfg) {
  check_carrier_kind(x.carrier, cfg);
  const auto& site = *cfg.site;
  auto n = site.cat.objects.size();
  std::vector<Violation> out;

  if (x.fam.itest.size() != n || x.fam.otest.size() != n) {
    out.push_back({"family-shape", "families are not indexed by every test object"});
    return out;
  }

  for (std::size_t t = 0; t < n; ++t) {
    const Carrier& ct = site.carrier_of(static_cast<int>(t));
    for (const auto& i : x.fam.itest[t])
      if (!is_underlying_morphism(i, ct, x.carrier))
        out.push_back({"family-member", "itest(" + obj_name(cfg, t) + ") contains " + show(i) +
                                            " which is not an underlying morphism"});
    for (const auto& o : x.fam.otest[t])
      if (!is_underlying_morphism(o, x.carrier, ct))
        out.push_back({"family-member", "otest(" + obj_name(cfg, t) + ") contains " + show(o) +
                                            " which is not an underlying morphism"});
    if (!std::is_sorted(x.fam.itest[t].begin(), x.fam.itest[t].end()) ||
        std::adjacent_find(x.fam.itest[t].begin(), x.fam.itest[t].end()) != x.fam.itest[t].end())
      out.push_back({"family-order", "itest(" + obj_name(cfg, t) + ") is not a sorted set"});
    if (!std::is_sorted(x.fam.otest[t].begin(), x.fam.otest[t].end()) ||
        std::adjacent_find(x.fam.otest[t].begin(), x.fam.otest[t].end()) != x.fam.otest[t].end())
      out.push_back({"family-order", "otest(" + obj_name(cfg, t) + ") is not a sorted set"});
  }
  if (!out.empty()) return out;

  // Subfunctor closure in both directions.
  for (std::size_t m = 0; m < site.cat.morphisms.size(); ++m) {
    const auto& mor = site.cat.morphisms[m];
    const Assignment& um = site.map_of(static_cast<int>(m));
    for (const auto& i : x.fam.itest[mor.dst]) {
      Assignment pulled = compose(i, um);
      if (!family_contains(x.fam.itest[mor.src], pulled))
        out.push_back({"subfunctor-closure",
                       "itest(" + obj_name(cfg, mor.dst) + ") member " + show(i) +
                           " pulled along " + mor.id + " is missing at " + obj_name(cfg, mor.src)});
    }
    for (const auto& o : x.fam.otest[mor.src]) {
      Assignment pushed = compose(um, o);
      if (!family_contains(x.fam.otest[mor.dst], pushed))
        out.push_back({"subfunctor-closure",
                       "otest(" + obj_name(cfg, mor.src) + ") member " + show(o) +
                           " pushed along " + mor.id + " is missing at " + obj_name(cfg, mor.dst)});
    }
  }

  // Compatibility: every output-after-input composite is a test morphism.
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t t2 = 0; t2 < n; ++t2)
      for (const auto& i : x.fam.itest[t])
        for (const auto& o : x.fam.otest[t2]) {
          Assignment c = compose(o, i);
          if (!site.in_image(static_cast<int>(t), static_cast<int>(t2), c))
            out.push_back({"compatibility",
                           "composite of itest(" + obj_name(cfg, t) + ") member " + show(i) +
                               " and otest(" + obj_name(cfg, t2) + ") member " + show(o) +
                               " is " + show(c) + ", not a test morphism"});
        }
  return out;
}

bool is_vmorphism(const Assignment& f, const VObject& x1, const VObject& x2,
                  const SmoothConfig& cfg) {
  if (static_cast<int>(f.size()) != x1.carrier.size)
    throw InputError("is_vmorphism: map does not match the source carrier");
  for (auto v : f)
    if (v >= x2.carrier.size) throw InputError("is_vmorphism: map does not match the target carrier");
  if (!is_underlying_morphism(f, x1.carrier, x2.carrier)) return false;

  auto n = cfg.site->cat.objects.size();
  for (std::size_t t = 0; t < n; ++t) {
    for (const auto& i : x1.fam.itest[t])
      if (!family_contains(x2.fam.itest[t], compose(f, i))) return false;
    for (const auto& o : x2.fam.otest[t])
      if (!family_contains(x1.fam.otest[t], compose(o, f))) return false;
  }
  return true;
}

VObject embed_test(int test_obj, const SmoothConfig& cfg) {
  const auto& site = *cfg.site;
  if (test_obj < 0 || test_obj >= static_cast<int>(site.cat.objects.size()))
    throw InputError("embed_test: unknown test object index");
  VObject x;
  x.carrier = site.carrier_of(test_obj);
  auto n = site.cat.objects.size();
  x.fam.itest.resize(n);
  x.fam.otest.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    for (int m : site.cat.hom_set(static_cast<int>(t), test_obj))
      family_insert(x.fam.itest[t], site.map_of(m));
    for (int m : site.cat.hom_set(test_obj, static_cast<int>(t)))
      family_insert(x.fam.otest[t], site.map_of(m));
  }
  return x;
}

VObject embed_test(const std::string& test_obj, const SmoothConfig& cfg) {
  return embed_test(cfg.site->cat.object_index(test_obj), cfg);
}

bool order_leq(const VObject& a, const VObject& b) {
  if (a.carrier != b.carrier) throw InputError("order_leq: structures live on different carriers");
  for (std::size_t t = 0; t < a.fam.itest.size(); ++t) {
    for (const auto& i : a.fam.itest[t])
      if (!family_contains(b.fam.itest[t], i)) return false;
    for (const auto& o : b.fam.otest[t])
      if (!family_contains(a.fam.otest[t], o)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Fibre enumeration.
//
// Structures are subsets of the candidate maps, so each side of a structure is
// a bitmask over "atoms" (test object, candidate index). Closure under the
// test-category action is a set of one-step implications between atoms, and
// compatibility is a per-pair exclusion mask; both are precomputed once.
// ---------------------------------------------------------------------------

namespace {

struct EnumContext {
  CandidateMaps cands;
  // Atom layout: per object, contiguous ranges in declaration order.
  std::vector<int> in_base, out_base;  // first atom id per object
  int in_bits = 0, out_bits = 0;
  std::vector<std::uint64_t> in_req;   // atom -> atoms it forces into the set
  std::vector<std::uint64_t> out_req;
  std::vector<std::uint64_t> bad_out;  // in atom -> incompatible out atoms
};

int index_of_assignment(const std::vector<Assignment>& list, const Assignment& a) {
  auto it = std::lower_bound(list.begin(), list.end(), a);
  if (it == list.end() || *it != a) return -1;
  return static_cast<int>(it - list.begin());
}

EnumContext build_enum_context(const Carrier& carrier, const SmoothConfig& cfg) {
  EnumContext ctx;
  ctx.cands = candidate_maps(carrier, cfg);
  const auto& site = *cfg.site;
  auto n = site.cat.objects.size();

  ctx.in_base.resize(n);
  ctx.out_base.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    ctx.in_base[t] = ctx.in_bits;
    ctx.in_bits += static_cast<int>(ctx.cands.in_cands[t].size());
    ctx.out_base[t] = ctx.out_bits;
    ctx.out_bits += static_cast<int>(ctx.cands.out_cands[t].size());
  }
  if (ctx.in_bits > 62 || ctx.out_bits > 62)
    throw CapError("fibre enumeration refused: too many candidate maps", 62,
                   static_cast<std::uint64_t>(std::max(ctx.in_bits, ctx.out_bits)));
  std::uint64_t candidates = (1ull << ctx.in_bits) + (1ull << ctx.out_bits);
  if (candidates > cfg.caps.max_enum_candidates)
    throw CapError("fibre enumeration refused: " + std::to_string(candidates) +
                       " candidate structures exceed the bound " +
                       std::to_string(cfg.caps.max_enum_candidates),
                   cfg.caps.max_enum_candidates, candidates);

  ctx.in_req.assign(ctx.in_bits, 0);
  ctx.out_req.assign(ctx.out_bits, 0);
  for (std::size_t m = 0; m < site.cat.morphisms.size(); ++m) {
    const auto& mor = site.cat.morphisms[m];
    const Assignment& um = site.map_of(static_cast<int>(m));
    const auto& at_dst = ctx.cands.in_cands[mor.dst];
    for (std::size_t i = 0; i < at_dst.size(); ++i) {
      int j = index_of_assignment(ctx.cands.in_cands[mor.src], compose(at_dst[i], um));
      ctx.in_req[ctx.in_base[mor.dst] + i] |= 1ull << (ctx.in_base[mor.src] + j);
    }
    const auto& at_src = ctx.cands.out_cands[mor.src];
    for (std::size_t o = 0; o < at_src.size(); ++o) {
      int j = index_of_assignment(ctx.cands.out_cands[mor.dst], compose(um, at_src[o]));
      ctx.out_req[ctx.out_base[mor.src] + o] |= 1ull << (ctx.out_base[mor.dst] + j);
    }
  }

  ctx.bad_out.assign(ctx.in_bits, 0);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t i = 0; i < ctx.cands.in_cands[t].size(); ++i)
      for (std::size_t t2 = 0; t2 < n; ++t2)
        for (std::size_t o = 0; o < ctx.cands.out_cands[t2].size(); ++o) {
          Assignment c = compose(ctx.cands.out_cands[t2][o], ctx.cands.in_cands[t][i]);
          if (!site.in_image(static_cast<int>(t), static_cast<int>(t2), c))
            ctx.bad_out[ctx.in_base[t] + i] |= 1ull << (ctx.out_base[t2] + o);
        }
  return ctx;
}

std::vector<std::uint64_t> closed_masks(int bits, const std::vector<std::uint64_t>& req) {
  std::vector<std::uint64_t> out;
  std::uint64_t limit = 1ull << bits;
  for (std::uint64_t mask = 0; mask < limit; ++mask) {
    bool ok = true;
    std::uint64_t rest = mask;
    while (rest) {
      int a = std::countr_zero(rest);
      rest &= rest - 1;
      if ((req[a] & ~mask) != 0) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(mask);
  }
  return out;
}

VObject materialize(const Carrier& carrier, const EnumContext& ctx, std::uint64_t in_mask,
                    std::uint64_t out_mask) {
  VObject x;
  x.carrier = carrier;
  auto n = ctx.cands.in_cands.size();
  x.fam.itest.resize(n);
  x.fam.otest.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t i = 0; i < ctx.cands.in_cands[t].size(); ++i)
      if (in_mask & (1ull << (ctx.in_base[t] + i)))
        x.fam.itest[t].push_back(ctx.cands.in_cands[t][i]);
    for (std::size_t o = 0; o < ctx.cands.out_cands[t].size(); ++o)
      if (out_mask & (1ull << (ctx.out_base[t] + o)))
        x.fam.otest[t].push_back(ctx.cands.out_cands[t][o]);
  }
  return x;
}

// Bitstring key with atom 0 as the most significant position, so integer
// comparison realises the documented lexicographic enumeration order.
std::pair<std::uint64_t, std::uint64_t> canonical_key(const EnumContext& ctx,
                                                      std::uint64_t in_mask,
                                                      std::uint64_t out_mask) {
  auto rev = [](std::uint64_t m, int bits) {
    std::uint64_t r = 0;
    for (int b = 0; b < bits; ++b)
      if (m & (1ull << b)) r |= 1ull << (63 - b);
    return r;
  };
  return {rev(in_mask, ctx.in_bits), rev(out_mask, ctx.out_bits)};
}

std::vector<VObject> enumerate_structures(const Carrier& carrier, const SmoothConfig& cfg,
                                          bool apply_forcing) {
  check_carrier_kind(carrier, cfg);
  EnumContext ctx = build_enum_context(carrier, cfg);
  auto in_closed = closed_masks(ctx.in_bits, ctx.in_req);
  auto out_closed = closed_masks(ctx.out_bits, ctx.out_req);

  std::vector<std::vector<std::pair<std::pair<std::uint64_t, std::uint64_t>, VObject>>> buckets(
      in_closed.size());
  parallel_for(in_closed.size(), 0, [&](std::size_t ii) {
    std::uint64_t in_mask = in_closed[ii];
    std::uint64_t forbidden = 0;
    std::uint64_t rest = in_mask;
    while (rest) {
      int a = std::countr_zero(rest);
      rest &= rest - 1;
      forbidden |= ctx.bad_out[a];
    }
    for (std::uint64_t out_mask : out_closed) {
      if (out_mask & forbidden) continue;
      VObject x = materialize(carrier, ctx, in_mask, out_mask);
      if (apply_forcing && !satisfies_forcing(x, cfg)) continue;
      buckets[ii].emplace_back(canonical_key(ctx, in_mask, out_mask), std::move(x));
    }
  });

  std::vector<std::pair<std::pair<std::uint64_t, std::uint64_t>, VObject>> keyed;
  for (auto& b : buckets)
    for (auto& kv : b) keyed.push_back(std::move(kv));
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<VObject> out;
  out.reserve(keyed.size());
  for (auto& kv : keyed) out.push_back(std::move(kv.second));
  return out;
}

}  // namespace

std::vector<VObject> enumerate_valid(const Carrier& carrier, const SmoothConfig& cfg) {
  return enumerate_structures(carrier, cfg, false);
}

FibreLattice fibre_enumerate(const Carrier& carrier, const SmoothConfig& cfg) {
  FibreLattice fl;
  fl.carrier = carrier;
  fl.elements = enumerate_structures(carrier, cfg, true);
  if (fl.elements.size() > cfg.caps.max_fibre_elements)
    throw CapError("fibre holds " + std::to_string(fl.elements.size()) +
                       " structures, above the bound " +
                       std::to_string(cfg.caps.max_fibre_elements),
                   cfg.caps.max_fibre_elements, fl.elements.size());
  auto k = fl.elements.size();
  fl.leq.assign(k, std::vector<bool>(k, false));
  parallel_for(k, 0, [&](std::size_t i) {
    for (std::size_t j = 0; j < k; ++j)
      fl.leq[i][j] = order_leq(fl.elements[i], fl.elements[j]);
  });
  return fl;
}

std::shared_ptr<const FibreLattice> fibre_cached(const Carrier& carrier,
                                                 const SmoothConfig& cfg) {
  static std::mutex mu;
  static std::map<std::pair<std::uint64_t, Carrier>, std::shared_ptr<const FibreLattice>> cache;
  std::pair<std::uint64_t, Carrier> key{cfg.fingerprint(), carrier};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto computed = std::make_shared<const FibreLattice>(fibre_enumerate(carrier, cfg));
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.emplace(key, computed);
  return it->second;
}

int FibreLattice::index_of(const VObject& x) const {
  for (std::size_t i = 0; i < elements.size(); ++i)
    if (elements[i] == x) return static_cast<int>(i);
  return -1;
}

int FibreLattice::min_index() const {
  for (std::size_t i = 0; i < elements.size(); ++i) {
    bool all = true;
    for (std::size_t j = 0; j < elements.size(); ++j)
      if (!leq[i][j]) {
        all = false;
        break;
      }
    if (all) return static_cast<int>(i);
  }
  return -1;
}

int FibreLattice::max_index() const {
  for (std::size_t i = 0; i < elements.size(); ++i) {
    bool all = true;
    for (std::size_t j = 0; j < elements.size(); ++j)
      if (!leq[j][i]) {
        all = false;
        break;
      }
    if (all) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::vector<Assignment> intersect_families(const std::vector<const std::vector<Assignment>*>& fams,
                                           const std::vector<Assignment>& everything) {
  if (fams.empty()) return everything;
  std::vector<Assignment> acc = *fams[0];
  for (std::size_t k = 1; k < fams.size(); ++k) {
    std::vector<Assignment> next;
    std::set_intersection(acc.begin(), acc.end(), fams[k]->begin(), fams[k]->end(),
                          std::back_inserter(next));
    acc = std::move(next);
  }
  return acc;
}

void check_bound_args(const std::vector<VObject>& s, const Carrier& carrier,
                      const SmoothConfig& cfg) {
  for (const auto& x : s) {
    if (x.carrier != carrier)
      throw InputError("meet/join: structures do not share the stated carrier");
    if (!satisfies_forcing(x, cfg))
      throw InputError("meet/join: a structure does not satisfy the forcing condition");
  }
}

}  // namespace

VObject meet_structures(const std::vector<VObject>& s, const Carrier& carrier,
                        const SmoothConfig& cfg) {
  check_bound_args(s, carrier, cfg);
  auto cands = candidate_maps(carrier, cfg);
  auto fibre = fibre_cached(carrier, cfg);

  // Lower bounds of s inside the fibre supply the output families.
  std::vector<const VObject*> lower;
  for (const auto& y : fibre->elements) {
    bool below_all = true;
    for (const auto& x : s)
      if (!order_leq(y, x)) {
        below_all = false;
        break;
      }
    if (below_all) lower.push_back(&y);
  }

  VObject out;
  out.carrier = carrier;
  auto n = cands.in_cands.size();
  out.fam.itest.resize(n);
  out.fam.otest.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<const std::vector<Assignment>*> ifams, ofams;
    for (const auto& x : s) ifams.push_back(&x.fam.itest[t]);
    for (const auto* y : lower) ofams.push_back(&y->fam.otest[t]);
    out.fam.itest[t] = intersect_families(ifams, cands.in_cands[t]);
    out.fam.otest[t] = intersect_families(ofams, cands.out_cands[t]);
  }
  return out;
}

VObject join_structures(const std::vector<VObject>& s, const Carrier& carrier,
                        const SmoothConfig& cfg) {
  check_bound_args(s, carrier, cfg);
  auto cands = candidate_maps(carrier, cfg);
  auto fibre = fibre_cached(carrier, cfg);

  std::vector<const VObject*> upper;
  for (const auto& y : fibre->elements) {
    bool above_all = true;
    for (const auto& x : s)
      if (!order_leq(x, y)) {
        above_all = false;
        break;
      }
    if (above_all) upper.push_back(&y);
  }

  VObject out;
  out.carrier = carrier;
  auto n = cands.in_cands.size();
  out.fam.itest.resize(n);
  out.fam.otest.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<const std::vector<Assignment>*> ifams, ofams;
    for (const auto* y : upper) ifams.push_back(&y->fam.itest[t]);
    for (const auto& x : s) ofams.push_back(&x.fam.otest[t]);
    out.fam.itest[t] = intersect_families(ifams, cands.in_cands[t]);
    out.fam.otest[t] = intersect_families(ofams, cands.out_cands[t]);
  }
  return out;
}

VObject fibre_min(const Carrier& carrier, const SmoothConfig& cfg) {
  return join_structures({}, carrier, cfg);
}

VObject fibre_max(const Carrier& carrier, const SmoothConfig& cfg) {
  return meet_structures({}, carrier, cfg);
}

bool vobject_less(const VObject& a, const VObject& b, const SmoothConfig& cfg) {
  if (a.carrier != b.carrier) return a.carrier < b.carrier;
  auto cands = candidate_maps(a.carrier, cfg);
  auto key = [&](const VObject& x) {
    std::vector<bool> bits;
    for (std::size_t t = 0; t < cands.in_cands.size(); ++t)
      for (const auto& c : cands.in_cands[t]) bits.push_back(family_contains(x.fam.itest[t], c));
    for (std::size_t t = 0; t < cands.out_cands.size(); ++t)
      for (const auto& c : cands.out_cands[t]) bits.push_back(family_contains(x.fam.otest[t], c));
    return bits;
  };
  return key(a) < key(b);
}

VObject restrict_families(const VObject& x, const std::vector<int>& objects) {
  VObject y;
  y.carrier = x.carrier;
  for (int big : objects) {
    y.fam.itest.push_back(x.fam.itest.at(big));
    y.fam.otest.push_back(x.fam.otest.at(big));
  }
  return y;
}

std::vector<Carrier> probe_carriers(const SmoothConfig& cfg, int max_size) {
  if (max_size < 0) max_size = cfg.caps.probe_carrier;
  std::vector<Carrier> out;
  for (int n = 0; n <= max_size; ++n) {
    if (cfg.kind() == UnderlyingKind::FinSet) {
      out.push_back(finset_carrier(n));
    } else {
      for (auto& t : all_topologies(n, std::max(max_size, cfg.caps.max_topology_scan)))
        out.push_back(fintop_carrier(n, t));
    }
  }
  return out;
}

}  // namespace smoothcat
