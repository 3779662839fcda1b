#include "smoothcat/forcing.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "smoothcat/basechange.hpp"
#include "smoothcat/spaces.hpp"

namespace smoothcat {

// ---------------------------------------------------------------------------
// Textual syntax.
// ---------------------------------------------------------------------------

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  std::string word() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    return text.substr(start, pos - start);
  }

  ConditionTerm term() {
    std::string w = word();
    if (w == "empty") return ConditionTerm::empty();
    if (w == "terminal") return ConditionTerm::terminal();
    if (w == "saturation") return ConditionTerm::saturation();
    if (w == "determined") return ConditionTerm::determined();
    if (w == "sheaf") {
      std::string cov;
      if (eat('(')) {
        if (!eat(')')) {
          cov = word();
          if (!eat(')')) throw InputError("forcing syntax: expected ')' after sheaf coverage");
        }
      }
      return ConditionTerm::sheaf(cov);
    }
    if (w == "specdet") {
      if (!eat('(')) throw InputError("forcing syntax: specdet needs a family-list name");
      std::string name = word();
      if (!eat(')')) throw InputError("forcing syntax: expected ')' after specdet list");
      return ConditionTerm::specdet(name);
    }
    if (w == "union") {
      if (!eat('(')) throw InputError("forcing syntax: union needs members");
      std::vector<ConditionTerm> ms;
      ms.push_back(term());
      while (eat(',')) ms.push_back(term());
      if (!eat(')')) throw InputError("forcing syntax: expected ')' after union members");
      return ConditionTerm::union_of(std::move(ms));
    }
    throw InputError("forcing syntax: unknown condition '" + w + "'");
  }
};

}  // namespace

ForcingSpec parse_forcing(const std::string& text) {
  Parser p{text};
  ForcingSpec spec;
  spec.input = p.term();
  if (!p.eat(';')) throw InputError("forcing syntax: expected ';' between input and output terms");
  spec.output = p.term();
  p.skip_ws();
  if (p.pos != text.size()) throw InputError("forcing syntax: trailing input after output term");
  return spec;
}

std::string format_term(const ConditionTerm& term) {
  switch (term.kind) {
    case ConditionTerm::Kind::Empty: return "empty";
    case ConditionTerm::Kind::Terminal: return "terminal";
    case ConditionTerm::Kind::Saturation: return "saturation";
    case ConditionTerm::Kind::Determined: return "determined";
    case ConditionTerm::Kind::Sheaf:
      return term.coverage_name.empty() ? "sheaf" : "sheaf(" + term.coverage_name + ")";
    case ConditionTerm::Kind::SpecDet: return "specdet(" + term.det_list_name + ")";
    case ConditionTerm::Kind::Union: {
      std::string out = "union(";
      for (std::size_t i = 0; i < term.members.size(); ++i) {
        if (i) out += ",";
        out += format_term(term.members[i]);
      }
      return out + ")";
    }
    case ConditionTerm::Kind::Transferred:
      return "transferred(" + (term.transfer ? term.transfer->label : std::string("?")) + ")";
  }
  return "?";
}

std::string format_forcing(const ForcingSpec& spec) {
  return format_term(spec.input) + "; " + format_term(spec.output);
}

// ---------------------------------------------------------------------------
// Detecting families.
// ---------------------------------------------------------------------------

bool family_detects(const Site& site, int obj, Direction dir, const std::vector<int>& family) {
  auto n = static_cast<int>(site.cat.objects.size());
  for (int other = 0; other < n; ++other) {
    const Carrier& co = site.carrier_of(other);
    const Carrier& ct = site.carrier_of(obj);
    if (dir == Direction::Input) {
      // Maps leaving the object: all composites with the family being tests
      // must certify the map itself.
      for (const auto& g : continuous_maps(ct, co)) {
        if (site.in_image(obj, other, g)) continue;
        bool all_pass = true;
        for (int m : family) {
          const auto& mor = site.cat.morphisms[m];
          if (!site.in_image(mor.src, other, compose(g, site.map_of(m)))) {
            all_pass = false;
            break;
          }
        }
        if (all_pass) return false;
      }
    } else {
      for (const auto& g : continuous_maps(co, ct)) {
        if (site.in_image(other, obj, g)) continue;
        bool all_pass = true;
        for (int m : family) {
          const auto& mor = site.cat.morphisms[m];
          if (!site.in_image(other, mor.dst, compose(site.map_of(m), g))) {
            all_pass = false;
            break;
          }
        }
        if (all_pass) return false;
      }
    }
  }
  return true;
}

std::vector<std::vector<int>> detecting_families(const SitePtr& site, int obj, Direction dir) {
  static std::mutex mu;
  static std::map<std::tuple<std::uint64_t, int, int>, std::vector<std::vector<int>>> cache;
  std::tuple<std::uint64_t, int, int> key{site->fingerprint, obj, static_cast<int>(dir)};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  std::vector<int> pool;
  for (std::size_t m = 0; m < site->cat.morphisms.size(); ++m) {
    const auto& mor = site->cat.morphisms[m];
    if (dir == Direction::Input ? mor.dst == obj : mor.src == obj)
      pool.push_back(static_cast<int>(m));
  }
  if (pool.size() > 16)
    throw CapError("determined condition refused: too many morphisms at one object", 16,
                   pool.size());

  std::vector<std::vector<int>> families;
  for (std::uint64_t mask = 0; mask < (1ull << pool.size()); ++mask) {
    std::vector<int> fam;
    for (std::size_t b = 0; b < pool.size(); ++b)
      if (mask & (1ull << b)) fam.push_back(pool[b]);
    if (family_detects(*site, obj, dir, fam)) families.push_back(std::move(fam));
  }

  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.emplace(key, std::move(families));
  return it->second;
}

std::vector<Violation> validate_forcing_names(const ConditionTerm& term, const Site& site,
                                              Direction dir) {
  std::vector<Violation> out;
  switch (term.kind) {
    case ConditionTerm::Kind::Sheaf:
      if (dir == Direction::Input && !site.coverages.count(term.coverage_name))
        out.push_back({"forcing-name", "unknown coverage '" + term.coverage_name + "'"});
      break;
    case ConditionTerm::Kind::SpecDet: {
      auto it = site.det_lists.find(term.det_list_name);
      if (it == site.det_lists.end()) {
        out.push_back({"forcing-name", "unknown detecting-family list '" + term.det_list_name + "'"});
        break;
      }
      const auto& side =
          dir == Direction::Input ? it->second.input_families : it->second.output_families;
      for (const auto& [obj, fams] : side)
        for (const auto& fam : fams)
          if (!family_detects(site, obj, dir, fam)) {
            std::string ms;
            for (int m : fam) ms += (ms.empty() ? "" : ",") + site.cat.morphisms[m].id;
            out.push_back({"det-family",
                           "family {" + ms + "} at " + site.cat.objects[obj] +
                               " does not detect membership in the test image"});
          }
      break;
    }
    case ConditionTerm::Kind::Union:
      for (const auto& m : term.members) {
        auto r = validate_forcing_names(m, site, dir);
        out.insert(out.end(), r.begin(), r.end());
      }
      break;
    default:
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Forcing decision procedures.
// ---------------------------------------------------------------------------

namespace {

bool term_forces(const ConditionTerm& term, const Assignment& f, int test_obj, const VObject& x,
                 Direction dir, const SmoothConfig& cfg);

bool saturation_forces(const Assignment& f, int t, const VObject& x, Direction dir,
                       const SmoothConfig& cfg) {
  const auto& site = *cfg.site;
  auto n = site.cat.objects.size();
  for (std::size_t t2 = 0; t2 < n; ++t2) {
    if (dir == Direction::Input) {
      for (const auto& o : x.fam.otest[t2])
        if (!site.in_image(t, static_cast<int>(t2), compose(o, f))) return false;
    } else {
      for (const auto& i : x.fam.itest[t2])
        if (!site.in_image(static_cast<int>(t2), t, compose(f, i))) return false;
    }
  }
  return true;
}

bool terminal_forces(const Assignment& f, int t, const VObject& x, Direction dir,
                     const SmoothConfig& cfg) {
  const auto& site = *cfg.site;
  auto term_obj = site.cat.terminal_object();
  if (!term_obj)
    throw InputError("terminal condition requested but the test category has no terminal object");
  int tau = *term_obj;
  const Carrier& ctau = site.carrier_of(tau);
  if (dir == Direction::Input) {
    const Assignment& bang = site.map_of(site.cat.hom_set(t, tau).front());
    for (const auto& g : continuous_maps(ctau, x.carrier))
      if (compose(g, bang) == f) return true;
    return false;
  }
  for (int m : site.cat.hom_set(tau, t))
    for (const auto& g : continuous_maps(x.carrier, ctau))
      if (compose(site.map_of(m), g) == f) return true;
  return false;
}

bool sheaf_forces(const ConditionTerm& term, const Assignment& f, int t, const VObject& x,
                  Direction dir, const SmoothConfig& cfg) {
  const auto& site = *cfg.site;
  if (dir == Direction::Input) {
    auto cov_it = site.coverages.find(term.coverage_name);
    if (cov_it == site.coverages.end())
      throw InputError("sheaf condition refers to unknown coverage '" + term.coverage_name + "'");
    if (family_contains(x.fam.itest[t], f)) return true;  // identity covering
    auto fams = cov_it->second.families.find(t);
    if (fams == cov_it->second.families.end()) return false;
    for (const auto& fam : fams->second) {
      bool all_local = true;
      for (int m : fam) {
        const auto& mor = site.cat.morphisms[m];
        if (!family_contains(x.fam.itest[mor.src], compose(f, site.map_of(m)))) {
          all_local = false;
          break;
        }
      }
      if (all_local) return true;
    }
    return false;
  }

  if (!x.carrier.topology)
    throw InputError("output sheaf condition requires a topological underlying category");
  const Topology& top = *x.carrier.topology;
  Bits full = x.carrier.size >= 32 ? ~Bits(0) : ((Bits(1) << x.carrier.size) - 1);
  Bits covered = 0;
  for (Bits open : top.opens) {
    bool agrees = false;
    for (const auto& o : x.fam.otest[t]) {
      bool same = true;
      for (int e = 0; e < x.carrier.size; ++e)
        if ((open & (Bits(1) << e)) && o[e] != f[e]) {
          same = false;
          break;
        }
      if (same) {
        agrees = true;
        break;
      }
    }
    if (agrees) covered |= open;
  }
  return covered == full;
}

bool determined_forces(const std::vector<std::vector<int>>& families, const Assignment& f, int t,
                       const VObject& x, Direction dir, const SmoothConfig& cfg) {
  const auto& site = *cfg.site;
  for (const auto& fam : families) {
    bool all_tests = true;
    for (int m : fam) {
      const auto& mor = site.cat.morphisms[m];
      if (dir == Direction::Input) {
        if (!family_contains(x.fam.itest[mor.src], compose(f, site.map_of(m)))) {
          all_tests = false;
          break;
        }
      } else {
        if (!family_contains(x.fam.otest[mor.dst], compose(site.map_of(m), f))) {
          all_tests = false;
          break;
        }
      }
    }
    if (all_tests) return true;
  }
  return false;
}

bool transferred_forces(const ConditionTerm& term, const Assignment& f, int t, const VObject& x,
                        Direction dir, const SmoothConfig& cfg) {
  const auto& tr = *term.transfer;
  switch (tr.mode) {
    case TransferMode::ViaFunctor: {
      VObject image = map_vobject(*tr.base, x);
      return is_forced(tr.base->map_assignment(f), t, image, dir, *tr.inner);
    }
    case TransferMode::ViaLifts: {
      VObject lifted = dir == Direction::Input ? finest_lift(x, *tr.base)
                                               : coarsest_lift(x, *tr.base);
      return is_forced(f, t, lifted, dir, *tr.inner);
    }
    case TransferMode::ExtendMin: {
      const auto& site = *cfg.site;
      VObject small_x = restrict_families(x, tr.small_objects);
      for (std::size_t si = 0; si < tr.small_objects.size(); ++si) {
        int a = tr.small_objects[si];
        const Carrier& ca = site.carrier_of(a);
        if (dir == Direction::Input) {
          for (int m : site.cat.hom_set(t, a)) {
            for (const auto& g : continuous_maps(ca, x.carrier))
              if (compose(g, site.map_of(m)) == f &&
                  is_forced(g, static_cast<int>(si), small_x, dir, *tr.inner))
                return true;
          }
        } else {
          for (int m : site.cat.hom_set(a, t)) {
            for (const auto& g : continuous_maps(x.carrier, ca))
              if (compose(site.map_of(m), g) == f &&
                  is_forced(g, static_cast<int>(si), small_x, dir, *tr.inner))
                return true;
          }
        }
      }
      return false;
    }
    case TransferMode::ExtendMax: {
      const auto& site = *cfg.site;
      VObject small_x = restrict_families(x, tr.small_objects);
      for (std::size_t si = 0; si < tr.small_objects.size(); ++si) {
        int a = tr.small_objects[si];
        if (dir == Direction::Input) {
          for (int m : site.cat.hom_set(a, t))
            if (!is_forced(compose(f, site.map_of(m)), static_cast<int>(si), small_x, dir,
                           *tr.inner))
              return false;
        } else {
          for (int m : site.cat.hom_set(t, a))
            if (!is_forced(compose(site.map_of(m), f), static_cast<int>(si), small_x, dir,
                           *tr.inner))
              return false;
        }
      }
      return true;
    }
  }
  return false;
}

bool term_forces(const ConditionTerm& term, const Assignment& f, int t, const VObject& x,
                 Direction dir, const SmoothConfig& cfg) {
  switch (term.kind) {
    case ConditionTerm::Kind::Empty:
      return false;
    case ConditionTerm::Kind::Saturation:
      return saturation_forces(f, t, x, dir, cfg);
    case ConditionTerm::Kind::Terminal:
      return terminal_forces(f, t, x, dir, cfg);
    case ConditionTerm::Kind::Sheaf:
      return sheaf_forces(term, f, t, x, dir, cfg);
    case ConditionTerm::Kind::Determined:
      return determined_forces(detecting_families(cfg.site, t, dir), f, t, x, dir, cfg);
    case ConditionTerm::Kind::SpecDet: {
      auto it = cfg.site->det_lists.find(term.det_list_name);
      if (it == cfg.site->det_lists.end())
        throw InputError("unknown detecting-family list '" + term.det_list_name + "'");
      const auto& side =
          dir == Direction::Input ? it->second.input_families : it->second.output_families;
      auto fams = side.find(t);
      if (fams == side.end()) return false;
      return determined_forces(fams->second, f, t, x, dir, cfg);
    }
    case ConditionTerm::Kind::Union:
      for (const auto& m : term.members)
        if (term_forces(m, f, t, x, dir, cfg)) return true;
      return false;
    case ConditionTerm::Kind::Transferred:
      return transferred_forces(term, f, t, x, dir, cfg);
  }
  return false;
}

}  // namespace

bool is_forced(const Assignment& f, int test_obj, const VObject& x, Direction dir,
               const SmoothConfig& cfg) {
  const auto& site = *cfg.site;
  if (test_obj < 0 || test_obj >= static_cast<int>(site.cat.objects.size()))
    throw InputError("is_forced: unknown test object index");
  const Carrier& ct = site.carrier_of(test_obj);
  const Carrier& src = dir == Direction::Input ? ct : x.carrier;
  const Carrier& dst = dir == Direction::Input ? x.carrier : ct;
  if (!is_underlying_morphism(f, src, dst))
    throw InputError("is_forced: candidate is not an underlying morphism of the right shape");
  const ConditionTerm& term = dir == Direction::Input ? cfg.forcing.input : cfg.forcing.output;
  return term_forces(term, f, test_obj, x, dir, cfg);
}

bool satisfies_forcing(const VObject& x, const SmoothConfig& cfg) {
  auto n = cfg.site->cat.objects.size();
  for (std::size_t t = 0; t < n; ++t) {
    const Carrier& ct = cfg.site->carrier_of(static_cast<int>(t));
    for (const auto& f : continuous_maps(ct, x.carrier))
      if (!family_contains(x.fam.itest[t], f) &&
          is_forced(f, static_cast<int>(t), x, Direction::Input, cfg))
        return false;
    for (const auto& f : continuous_maps(x.carrier, ct))
      if (!family_contains(x.fam.otest[t], f) &&
          is_forced(f, static_cast<int>(t), x, Direction::Output, cfg))
        return false;
  }
  return true;
}

std::vector<StupidityViolation> audit_non_stupid(const SmoothConfig& cfg) {
  const auto& site = *cfg.site;
  auto n = static_cast<int>(site.cat.objects.size());
  std::vector<StupidityViolation> out;
  for (int t1 = 0; t1 < n; ++t1)
    for (int t2 = 0; t2 < n; ++t2) {
      for (const auto& f : continuous_maps(site.carrier_of(t1), site.carrier_of(t2))) {
        if (site.in_image(t1, t2, f)) continue;
        if (is_forced(f, t1, embed_test(t2, cfg), Direction::Input, cfg))
          out.push_back({Direction::Input, t1, t2, f,
                         "non-test map " + site.cat.objects[t1] + " -> " + site.cat.objects[t2] +
                             " is forced as an input test"});
        if (is_forced(f, t2, embed_test(t1, cfg), Direction::Output, cfg))
          out.push_back({Direction::Output, t1, t2, f,
                         "non-test map " + site.cat.objects[t1] + " -> " + site.cat.objects[t2] +
                             " is forced as an output test"});
      }
    }
  return out;
}

namespace {

/// Forced input and output candidates of one structure, as index bitmaps over
/// the canonical candidate lists.
std::pair<std::vector<std::vector<bool>>, std::vector<std::vector<bool>>> forced_sets(
    const VObject& x, const SmoothConfig& cfg, const CandidateMaps& cands) {
  auto n = cands.in_cands.size();
  std::vector<std::vector<bool>> fin(n), fout(n);
  for (std::size_t t = 0; t < n; ++t) {
    fin[t].resize(cands.in_cands[t].size());
    for (std::size_t i = 0; i < cands.in_cands[t].size(); ++i)
      fin[t][i] = is_forced(cands.in_cands[t][i], static_cast<int>(t), x, Direction::Input, cfg);
    fout[t].resize(cands.out_cands[t].size());
    for (std::size_t o = 0; o < cands.out_cands[t].size(); ++o)
      fout[t][o] = is_forced(cands.out_cands[t][o], static_cast<int>(t), x, Direction::Output, cfg);
  }
  return {fin, fout};
}

}  // namespace

bool condition_leq(const ForcingSpec& a, const ForcingSpec& b, const SitePtr& site,
                   const Caps& caps) {
  static std::mutex mu;
  static std::map<std::tuple<std::uint64_t, std::string, std::string, int>, bool> cache;
  std::tuple<std::uint64_t, std::string, std::string, int> key{
      site->fingerprint, format_forcing(a), format_forcing(b), caps.probe_carrier};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  auto cfg_a = make_config(site, a, caps);
  auto cfg_b = make_config(site, b, caps);
  bool result = true;
  for (const auto& carrier : probe_carriers(*cfg_a)) {
    auto cands = candidate_maps(carrier, *cfg_a);
    for (const auto& x : enumerate_valid(carrier, *cfg_a)) {
      auto [fa_in, fa_out] = forced_sets(x, *cfg_a, cands);
      auto [fb_in, fb_out] = forced_sets(x, *cfg_b, cands);
      for (std::size_t t = 0; t < cands.in_cands.size() && result; ++t) {
        for (std::size_t i = 0; i < fa_in[t].size(); ++i)
          if (fa_in[t][i] && !fb_in[t][i]) {
            result = false;
            break;
          }
        for (std::size_t o = 0; o < fa_out[t].size() && result; ++o)
          if (fa_out[t][o] && !fb_out[t][o]) {
            result = false;
            break;
          }
      }
      if (!result) break;
    }
    if (!result) break;
  }

  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, result);
  return result;
}

namespace {

void check_forcing_pair(const VObject& a, const SmoothConfig& weak, const SmoothConfig& strong) {
  if (weak.site->fingerprint != strong.site->fingerprint)
    throw InputError("forcing functors need both conditions on one site");
  if (!satisfies_forcing(a, weak))
    throw InputError("structure does not satisfy the weaker forcing condition");
  Caps guard = weak.caps;
  guard.probe_carrier = std::min(guard.probe_carrier, 2);
  if (!condition_leq(weak.forcing, strong.forcing, weak.site, guard))
    throw InputError("forcing functors need the first condition below the second");
}

}  // namespace

VObject forcing_meet(const VObject& a, const SmoothConfig& weak, const SmoothConfig& strong) {
  check_forcing_pair(a, weak, strong);
  auto fibre = fibre_cached(a.carrier, strong);
  std::vector<VObject> upper;
  for (const auto& b : fibre->elements)
    if (order_leq(a, b)) upper.push_back(b);
  return meet_structures(upper, a.carrier, strong);
}

VObject forcing_join(const VObject& a, const SmoothConfig& weak, const SmoothConfig& strong) {
  check_forcing_pair(a, weak, strong);
  auto fibre = fibre_cached(a.carrier, strong);
  std::vector<VObject> lower;
  for (const auto& b : fibre->elements)
    if (order_leq(b, a)) lower.push_back(b);
  return join_structures(lower, a.carrier, strong);
}

ForadjReport check_foradj(const VObject& a, const SmoothConfig& weak, const SmoothConfig& strong) {
  VObject m = forcing_meet(a, weak, strong);
  ForadjReport rep;
  rep.leq_holds = order_leq(a, m);
  rep.otest_preserved = (m.fam.otest == a.fam.otest);
  return rep;
}

}  // namespace smoothcat
