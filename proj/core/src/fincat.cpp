#include "smoothcat/fincat.hpp"

#include <algorithm>
#include <sstream>

namespace smoothcat {

bool Topology::contains(Bits set) const {
  return std::binary_search(opens.begin(), opens.end(), set);
}

Topology discrete_topology(int size) {
  Topology t;
  Bits full = (size >= 32) ? ~Bits(0) : ((Bits(1) << size) - 1);
  for (Bits s = 0; s <= full; ++s) {
    t.opens.push_back(s);
    if (s == full) break;
  }
  return t;
}

Topology indiscrete_topology(int size) {
  Topology t;
  Bits full = (size >= 32) ? ~Bits(0) : ((Bits(1) << size) - 1);
  t.opens.push_back(0);
  if (full != 0) t.opens.push_back(full);
  return t;
}

namespace {

bool closed_under_union_intersection(const std::vector<Bits>& opens) {
  for (std::size_t i = 0; i < opens.size(); ++i) {
    for (std::size_t j = i + 1; j < opens.size(); ++j) {
      Bits u = opens[i] | opens[j];
      Bits n = opens[i] & opens[j];
      if (!std::binary_search(opens.begin(), opens.end(), u)) return false;
      if (!std::binary_search(opens.begin(), opens.end(), n)) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<Topology> all_topologies(int size, int max_scan) {
  if (size > max_scan) {
    throw CapError("topology enumeration refused: carrier size " + std::to_string(size) +
                       " exceeds the scan cap " + std::to_string(max_scan),
                   static_cast<std::uint64_t>(max_scan), static_cast<std::uint64_t>(size));
  }
  Bits full = (Bits(1) << size) - 1;
  int subset_count = 1 << size;
  std::vector<Topology> out;
  // A family of subsets is encoded by one bit per subset of the carrier.
  std::uint64_t family_count = 1ull << subset_count;
  for (std::uint64_t fam = 0; fam < family_count; ++fam) {
    if (!(fam & 1ull)) continue;                               // must contain the empty set
    if (!(fam & (1ull << full))) continue;                     // must contain the full carrier
    std::vector<Bits> opens;
    for (int s = 0; s < subset_count; ++s)
      if (fam & (1ull << s)) opens.push_back(static_cast<Bits>(s));
    if (!closed_under_union_intersection(opens)) continue;
    out.push_back(Topology{std::move(opens)});
  }
  std::sort(out.begin(), out.end());
  return out;
}

Carrier finset_carrier(int size) { return Carrier{size, std::nullopt}; }

Carrier fintop_carrier(int size, Topology t) {
  return Carrier{size, std::move(t)};
}

Assignment identity_assignment(int size) {
  Assignment a(size);
  for (int i = 0; i < size; ++i) a[i] = static_cast<std::uint8_t>(i);
  return a;
}

Assignment compose(const Assignment& g, const Assignment& f) {
  Assignment out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = g[f[i]];
  return out;
}

Bits preimage(const Assignment& f, Bits target_set) {
  Bits out = 0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (target_set & (Bits(1) << f[i])) out |= Bits(1) << i;
  return out;
}

bool is_continuous(const Assignment& f, const Topology& src, const Topology& dst) {
  for (Bits open : dst.opens)
    if (!src.contains(preimage(f, open))) return false;
  return true;
}

bool is_underlying_morphism(const Assignment& f, const Carrier& src, const Carrier& dst) {
  if (static_cast<int>(f.size()) != src.size) return false;
  for (auto v : f)
    if (v >= dst.size) return false;
  if (src.topology && dst.topology) return is_continuous(f, *src.topology, *dst.topology);
  return true;
}

std::vector<Assignment> all_assignments(int src_size, int dst_size) {
  std::vector<Assignment> out;
  if (src_size == 0) {
    out.push_back(Assignment{});
    return out;
  }
  if (dst_size == 0) return out;  // no maps from nonempty to empty
  Assignment cur(src_size, 0);
  for (;;) {
    out.push_back(cur);
    int i = src_size - 1;
    while (i >= 0 && cur[i] == dst_size - 1) {
      cur[i] = 0;
      --i;
    }
    if (i < 0) break;
    ++cur[i];
  }
  return out;
}

std::vector<Assignment> continuous_maps(const Carrier& src, const Carrier& dst) {
  std::vector<Assignment> out;
  for (auto& f : all_assignments(src.size, dst.size))
    if (is_underlying_morphism(f, src, dst)) out.push_back(f);
  return out;
}

void FinCategory::finalize() {
  hom.assign(objects.size(), std::vector<std::vector<int>>(objects.size()));
  for (std::size_t m = 0; m < morphisms.size(); ++m)
    hom[morphisms[m].src][morphisms[m].dst].push_back(static_cast<int>(m));
}

int FinCategory::object_index(const std::string& id) const {
  for (std::size_t i = 0; i < objects.size(); ++i)
    if (objects[i] == id) return static_cast<int>(i);
  throw InputError("unknown object id: " + id);
}

int FinCategory::morphism_index(const std::string& id) const {
  for (std::size_t i = 0; i < morphisms.size(); ++i)
    if (morphisms[i].id == id) return static_cast<int>(i);
  throw InputError("unknown morphism id: " + id);
}

int FinCategory::compose(int g, int f) const {
  int r = compose_table.at(g).at(f);
  if (r < 0)
    throw InputError("morphisms not composable: " + morphisms[g].id + " after " +
                     morphisms[f].id);
  return r;
}

const std::vector<int>& FinCategory::hom_set(int src, int dst) const {
  return hom.at(src).at(dst);
}

std::optional<int> FinCategory::terminal_object() const {
  for (std::size_t t = 0; t < objects.size(); ++t) {
    bool ok = true;
    for (std::size_t s = 0; s < objects.size(); ++s)
      if (hom[s][t].size() != 1) {
        ok = false;
        break;
      }
    if (ok) return static_cast<int>(t);
  }
  return std::nullopt;
}

std::vector<Violation> validate_category(const FinCategory& cat) {
  std::vector<Violation> out;
  auto n_obj = static_cast<int>(cat.objects.size());
  auto n_mor = static_cast<int>(cat.morphisms.size());

  if (static_cast<int>(cat.identities.size()) != n_obj)
    out.push_back({"identity-missing", "identity table does not cover every object"});
  if (static_cast<int>(cat.compose_table.size()) != n_mor)
    out.push_back({"compose-missing", "composition table does not cover every morphism"});
  if (!out.empty()) return out;

  for (int a = 0; a < n_obj; ++a) {
    int id = cat.identities[a];
    if (id < 0 || id >= n_mor || cat.morphisms[id].src != a || cat.morphisms[id].dst != a)
      out.push_back({"identity-shape", "identity of " + cat.objects[a] + " is not an endomorphism"});
  }

  // Totality and closure on composable pairs.
  for (int g = 0; g < n_mor; ++g) {
    for (int f = 0; f < n_mor; ++f) {
      bool composable = cat.morphisms[f].dst == cat.morphisms[g].src;
      int r = cat.compose_table[g][f];
      if (composable && r < 0)
        out.push_back({"compose-partial",
                       "compose(" + cat.morphisms[g].id + "," + cat.morphisms[f].id + ") undefined"});
      if (composable && r >= 0) {
        if (cat.morphisms[r].src != cat.morphisms[f].src ||
            cat.morphisms[r].dst != cat.morphisms[g].dst)
          out.push_back({"compose-closure",
                         "compose(" + cat.morphisms[g].id + "," + cat.morphisms[f].id +
                             ") lands outside the declared hom-set"});
      }
      if (!composable && r >= 0)
        out.push_back({"compose-spurious",
                       "compose(" + cat.morphisms[g].id + "," + cat.morphisms[f].id +
                           ") defined on a non-composable pair"});
    }
  }
  if (!out.empty()) return out;

  // Identity laws.
  for (int f = 0; f < n_mor; ++f) {
    int src_id = cat.identities[cat.morphisms[f].src];
    int dst_id = cat.identities[cat.morphisms[f].dst];
    if (cat.compose_table[f][src_id] != f)
      out.push_back({"identity-law", cat.morphisms[f].id + " after identity is not itself"});
    if (cat.compose_table[dst_id][f] != f)
      out.push_back({"identity-law", "identity after " + cat.morphisms[f].id + " is not itself"});
  }

  // Associativity on every composable triple.
  for (int h = 0; h < n_mor; ++h)
    for (int g = 0; g < n_mor; ++g) {
      if (cat.morphisms[g].dst != cat.morphisms[h].src) continue;
      for (int f = 0; f < n_mor; ++f) {
        if (cat.morphisms[f].dst != cat.morphisms[g].src) continue;
        int lhs = cat.compose_table[h][cat.compose_table[g][f]];
        int rhs = cat.compose_table[cat.compose_table[h][g]][f];
        if (lhs != rhs)
          out.push_back({"associativity",
                         "(" + cat.morphisms[h].id + "," + cat.morphisms[g].id + "," +
                             cat.morphisms[f].id + ") associates inconsistently"});
      }
    }
  return out;
}

std::vector<Violation> check_faithful_functor(const ConcreteFunctor& u,
                                              const FinCategory& cat,
                                              UnderlyingKind kind) {
  std::vector<Violation> out;
  if (u.on_objects.size() != cat.objects.size() || u.on_morphisms.size() != cat.morphisms.size()) {
    out.push_back({"functor-partial", "object or morphism assignment is not total"});
    return out;
  }

  for (std::size_t a = 0; a < cat.objects.size(); ++a) {
    const Carrier& c = u.on_objects[a];
    bool has_top = c.topology.has_value();
    if ((kind == UnderlyingKind::FinTop) != has_top)
      out.push_back({"carrier-kind", "carrier of " + cat.objects[a] + " has the wrong kind"});
    if (has_top) {
      const Topology& t = *c.topology;
      Bits full = (Bits(1) << c.size) - 1;
      if (!t.contains(0) || !t.contains(full))
        out.push_back({"topology", "topology on " + cat.objects[a] + " misses the empty or full set"});
      if (!closed_under_union_intersection(t.opens))
        out.push_back({"topology", "topology on " + cat.objects[a] + " is not closed under union/intersection"});
    }
  }
  if (!out.empty()) return out;

  for (std::size_t m = 0; m < cat.morphisms.size(); ++m) {
    const auto& mor = cat.morphisms[m];
    if (!is_underlying_morphism(u.on_morphisms[m], u.on_objects[mor.src], u.on_objects[mor.dst]))
      out.push_back({"image-map", mor.id + " is not realised by an underlying morphism"});
  }
  if (!out.empty()) return out;

  for (std::size_t a = 0; a < cat.objects.size(); ++a) {
    if (u.on_morphisms[cat.identities[a]] != identity_assignment(u.on_objects[a].size))
      out.push_back({"functoriality", "identity of " + cat.objects[a] + " is not realised by the identity"});
  }
  for (std::size_t g = 0; g < cat.morphisms.size(); ++g)
    for (std::size_t f = 0; f < cat.morphisms.size(); ++f) {
      if (cat.morphisms[f].dst != cat.morphisms[g].src) continue;
      int gf = cat.compose_table[g][f];
      if (gf < 0) continue;  // validate_category reports this
      if (u.on_morphisms[gf] != compose(u.on_morphisms[g], u.on_morphisms[f]))
        out.push_back({"functoriality",
                       "u(" + cat.morphisms[g].id + " . " + cat.morphisms[f].id +
                           ") differs from the composite of the images"});
    }

  for (std::size_t s = 0; s < cat.objects.size(); ++s)
    for (std::size_t d = 0; d < cat.objects.size(); ++d) {
      const auto& hs = cat.hom[s][d];
      for (std::size_t i = 0; i < hs.size(); ++i)
        for (std::size_t j = i + 1; j < hs.size(); ++j)
          if (u.on_morphisms[hs[i]] == u.on_morphisms[hs[j]])
            out.push_back({"faithfulness",
                           "hom(" + cat.objects[s] + "," + cat.objects[d] + "): " +
                               cat.morphisms[hs[i]].id + " and " + cat.morphisms[hs[j]].id +
                               " collapse to one map"});
    }
  return out;
}

void Site::finalize() {
  cat.finalize();
  image_index_.assign(cat.objects.size(),
                      std::vector<std::map<Assignment, int>>(cat.objects.size()));
  for (std::size_t m = 0; m < cat.morphisms.size(); ++m) {
    const auto& mor = cat.morphisms[m];
    image_index_[mor.src][mor.dst].emplace(u.on_morphisms[m], static_cast<int>(m));
  }

  std::uint64_t h = fnv1a(0, name);
  h = fnv1a(h, static_cast<std::uint64_t>(kind));
  for (const auto& o : cat.objects) h = fnv1a(h, o);
  for (const auto& m : cat.morphisms) {
    h = fnv1a(h, m.id);
    h = fnv1a(h, static_cast<std::uint64_t>(m.src));
    h = fnv1a(h, static_cast<std::uint64_t>(m.dst));
  }
  for (const auto& row : cat.compose_table)
    for (int v : row) h = fnv1a(h, static_cast<std::uint64_t>(v + 1));
  for (const auto& c : u.on_objects) {
    h = fnv1a(h, static_cast<std::uint64_t>(c.size));
    if (c.topology)
      for (Bits b : c.topology->opens) h = fnv1a(h, static_cast<std::uint64_t>(b));
  }
  for (const auto& a : u.on_morphisms) h = fnv1a(h, a.data(), a.size());
  for (const auto& [cname, cov] : coverages) {
    h = fnv1a(h, cname);
    for (const auto& [obj, fams] : cov.families) {
      h = fnv1a(h, static_cast<std::uint64_t>(obj));
      for (const auto& fam : fams)
        for (int m : fam) h = fnv1a(h, static_cast<std::uint64_t>(m));
    }
  }
  for (const auto& [dname, dl] : det_lists) {
    h = fnv1a(h, dname);
    for (const auto* side : {&dl.input_families, &dl.output_families})
      for (const auto& [obj, fams] : *side) {
        h = fnv1a(h, static_cast<std::uint64_t>(obj));
        for (const auto& fam : fams)
          for (int m : fam) h = fnv1a(h, static_cast<std::uint64_t>(m) + 7);
      }
  }
  fingerprint = h;
}

std::vector<Violation> Site::validate(const Caps& caps) const {
  std::vector<Violation> out = validate_category(cat);
  auto functor_report = check_faithful_functor(u, cat, kind);
  out.insert(out.end(), functor_report.begin(), functor_report.end());

  if (static_cast<int>(cat.objects.size()) > caps.max_test_objects)
    out.push_back({"cap", "test category has more than " + std::to_string(caps.max_test_objects) +
                              " objects"});
  for (std::size_t a = 0; a < u.on_objects.size(); ++a)
    if (u.on_objects[a].size > caps.max_carrier)
      out.push_back({"cap", "test carrier of " + cat.objects[a] + " exceeds the element cap"});

  for (const auto& [cname, cov] : coverages)
    for (const auto& [obj, fams] : cov.families) {
      if (obj < 0 || obj >= static_cast<int>(cat.objects.size())) {
        out.push_back({"coverage", cname + ": unknown covered object"});
        continue;
      }
      for (const auto& fam : fams) {
        if (fam.empty()) out.push_back({"coverage", cname + ": empty covering family"});
        for (int m : fam)
          if (m < 0 || m >= static_cast<int>(cat.morphisms.size()) || cat.morphisms[m].dst != obj)
            out.push_back({"coverage",
                           cname + ": covering morphism does not target " + cat.objects[obj]});
      }
    }
  for (const auto& [dname, dl] : det_lists) {
    for (const auto& [obj, fams] : dl.input_families)
      for (const auto& fam : fams)
        for (int m : fam)
          if (m < 0 || m >= static_cast<int>(cat.morphisms.size()) || cat.morphisms[m].dst != obj)
            out.push_back({"det-family", dname + ": input family member does not target " +
                                             cat.objects.at(obj)});
    for (const auto& [obj, fams] : dl.output_families)
      for (const auto& fam : fams)
        for (int m : fam)
          if (m < 0 || m >= static_cast<int>(cat.morphisms.size()) || cat.morphisms[m].src != obj)
            out.push_back({"det-family", dname + ": output family member does not leave " +
                                             cat.objects.at(obj)});
  }
  return out;
}

std::optional<int> Site::image_morphism(int src_obj, int dst_obj, const Assignment& f) const {
  const auto& idx = image_index_.at(src_obj).at(dst_obj);
  auto it = idx.find(f);
  if (it == idx.end()) return std::nullopt;
  return it->second;
}

}  // namespace smoothcat
