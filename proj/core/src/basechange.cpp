#include "smoothcat/basechange.hpp"

#include <algorithm>
#include <sstream>

namespace smoothcat {

Carrier BaseFunctor::map_carrier(const Carrier& c) const {
  switch (kind) {
    case Kind::Identity: return c;
    case Kind::Forget: return finset_carrier(c.size);
    case Kind::Discrete: return fintop_carrier(c.size, discrete_topology(c.size));
    case Kind::Indiscrete: return fintop_carrier(c.size, indiscrete_topology(c.size));
    case Kind::Custom: return obj_fn(c);
  }
  return c;
}

Assignment BaseFunctor::map_assignment(const Assignment& f) const {
  if (kind == Kind::Custom && mor_fn) return mor_fn(f);
  return f;
}

BaseFunctor BaseFunctor::identity() { return BaseFunctor{Kind::Identity, "identity", {}, {}}; }
BaseFunctor BaseFunctor::forget() { return BaseFunctor{Kind::Forget, "forget", {}, {}}; }
BaseFunctor BaseFunctor::discrete() { return BaseFunctor{Kind::Discrete, "discrete", {}, {}}; }
BaseFunctor BaseFunctor::indiscrete() { return BaseFunctor{Kind::Indiscrete, "indiscrete", {}, {}}; }
BaseFunctor BaseFunctor::custom(std::string name, std::function<Carrier(const Carrier&)> obj,
                                std::function<Assignment(const Assignment&)> mor) {
  return BaseFunctor{Kind::Custom, std::move(name), std::move(obj), std::move(mor)};
}

namespace {

Site derived_site(const Site& s, UnderlyingKind kind, const BaseFunctor& g, const char* suffix) {
  Site out = s;
  out.name = s.name + suffix;
  out.kind = kind;
  for (auto& c : out.u.on_objects) c = g.map_carrier(c);
  out.finalize();
  return out;
}

}  // namespace

Site site_forget(const Site& s) {
  return derived_site(s, UnderlyingKind::FinSet, BaseFunctor::forget(), ".set");
}
Site site_discrete(const Site& s) {
  return derived_site(s, UnderlyingKind::FinTop, BaseFunctor::discrete(), ".disc");
}
Site site_indiscrete(const Site& s) {
  return derived_site(s, UnderlyingKind::FinTop, BaseFunctor::indiscrete(), ".indisc");
}

BaseChange make_base_change(ConfigPtr source, ConfigPtr target, BaseFunctor g) {
  if (source->site->cat.objects.size() != target->site->cat.objects.size() ||
      source->site->cat.morphisms.size() != target->site->cat.morphisms.size())
    throw InputError("base change: the two configurations must share one test category");

  // Intertwining on objects and morphisms of the shared test category.
  for (std::size_t t = 0; t < source->site->cat.objects.size(); ++t)
    if (g.map_carrier(source->site->carrier_of(static_cast<int>(t))) !=
        target->site->carrier_of(static_cast<int>(t)))
      throw InputError("base change: functor does not intertwine the site carriers at " +
                       source->site->cat.objects[t]);
  for (std::size_t m = 0; m < source->site->cat.morphisms.size(); ++m)
    if (g.map_assignment(source->site->map_of(static_cast<int>(m))) !=
        target->site->map_of(static_cast<int>(m)))
      throw InputError("base change: functor does not intertwine the site maps at " +
                       source->site->cat.morphisms[m].id);

  // Functoriality on test data: identities and composites of realised maps.
  for (std::size_t t = 0; t < source->site->cat.objects.size(); ++t) {
    const Carrier& c = source->site->carrier_of(static_cast<int>(t));
    if (g.map_assignment(identity_assignment(c.size)) != identity_assignment(c.size))
      throw InputError("base change: functor does not preserve identities");
  }
  for (std::size_t a = 0; a < source->site->cat.morphisms.size(); ++a)
    for (std::size_t b = 0; b < source->site->cat.morphisms.size(); ++b) {
      const auto& ma = source->site->cat.morphisms[a];
      const auto& mb = source->site->cat.morphisms[b];
      if (mb.dst != ma.src) continue;
      auto lhs = g.map_assignment(compose(source->site->map_of(static_cast<int>(a)),
                                          source->site->map_of(static_cast<int>(b))));
      auto rhs = compose(g.map_assignment(source->site->map_of(static_cast<int>(a))),
                         g.map_assignment(source->site->map_of(static_cast<int>(b))));
      if (lhs != rhs) throw InputError("base change: functor does not preserve composition");
    }

  return BaseChange{std::move(source), std::move(target), std::move(g)};
}

VObject map_vobject(const BaseChange& bc, const VObject& x) {
  VObject out;
  out.carrier = bc.map_carrier(x.carrier);
  auto n = x.fam.itest.size();
  out.fam.itest.resize(n);
  out.fam.otest.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    for (const auto& i : x.fam.itest[t]) family_insert(out.fam.itest[t], bc.map_assignment(i));
    for (const auto& o : x.fam.otest[t]) family_insert(out.fam.otest[t], bc.map_assignment(o));
  }
  auto report = validate_vobject(out, *bc.target);
  if (!report.empty())
    throw InputError("map_vobject: image structure is invalid: " + report.front().detail);
  return out;
}

namespace {

bool injective_on_test_homs(const BaseChange& bc) {
  const auto& site = *bc.source->site;
  auto n = static_cast<int>(site.cat.objects.size());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      auto maps = continuous_maps(site.carrier_of(a), site.carrier_of(b));
      for (std::size_t i = 0; i < maps.size(); ++i)
        for (std::size_t j = i + 1; j < maps.size(); ++j)
          if (bc.map_assignment(maps[i]) == bc.map_assignment(maps[j])) return false;
    }
  return true;
}

std::shared_ptr<const TransferredCondition> make_transfer(const BaseChange& bc, TransferMode mode,
                                                          const ConfigPtr& inner) {
  auto tr = std::make_shared<TransferredCondition>();
  tr->mode = mode;
  tr->inner = inner;
  tr->base = std::make_shared<BaseChange>(bc);
  std::ostringstream label;
  label << (mode == TransferMode::ViaFunctor ? "via-" + bc.g.name : "via-lifts") << ":" << std::hex
        << inner->fingerprint();
  tr->label = label.str();
  return tr;
}

}  // namespace

ForcingSpec transfer_forcing(const BaseChange& bc) {
  if (!injective_on_test_homs(bc))
    throw InputError(
        "transfer refused: functor is not injective on maps between test carriers; "
        "compose map_vobject with a forcing functor instead");
  auto tr = make_transfer(bc, TransferMode::ViaFunctor, bc.target);
  ForcingSpec out;
  out.input = ConditionTerm{ConditionTerm::Kind::Transferred, {}, {}, {}, tr};
  out.output = ConditionTerm{ConditionTerm::Kind::Transferred, {}, {}, {}, tr};
  return out;
}

ForcingSpec transfer_forcing_lifts(const BaseChange& bc) {
  if (bc.source->kind() != UnderlyingKind::FinTop || bc.target->kind() != UnderlyingKind::FinSet)
    throw InputError("lift transfer needs a topological source configuration over a plain one");
  // The lifts must fix the embedded test objects.
  for (std::size_t t = 0; t < bc.source->site->cat.objects.size(); ++t) {
    VObject top_embed = embed_test(static_cast<int>(t), *bc.source);
    VObject set_embed = embed_test(static_cast<int>(t), *bc.target);
    if (finest_lift(set_embed, bc) != top_embed || coarsest_lift(set_embed, bc) != top_embed)
      throw InputError("lift transfer refused: lifts do not fix the embedded test object " +
                       bc.source->site->cat.objects[t]);
  }
  auto tr = make_transfer(bc, TransferMode::ViaLifts, bc.source);
  ForcingSpec out;
  out.input = ConditionTerm{ConditionTerm::Kind::Transferred, {}, {}, {}, tr};
  out.output = ConditionTerm{ConditionTerm::Kind::Transferred, {}, {}, {}, tr};
  return out;
}

namespace {

Topology topology_generated_by(int size, const std::vector<Bits>& subbasis) {
  // Close under pairwise intersection, then arbitrary union.
  std::vector<Bits> inters{static_cast<Bits>(size >= 32 ? ~Bits(0) : (Bits(1) << size) - 1)};
  for (Bits s : subbasis)
    if (std::find(inters.begin(), inters.end(), s) == inters.end()) inters.push_back(s);
  for (std::size_t i = 0; i < inters.size(); ++i)
    for (std::size_t j = 0; j < inters.size(); ++j) {
      Bits v = inters[i] & inters[j];
      if (std::find(inters.begin(), inters.end(), v) == inters.end()) inters.push_back(v);
    }
  std::vector<Bits> opens{0};
  for (std::size_t i = 0; i < inters.size(); ++i)
    for (std::size_t j = 0; j < opens.size(); ++j) {
      Bits v = inters[i] | opens[j];
      if (std::find(opens.begin(), opens.end(), v) == opens.end()) opens.push_back(v);
    }
  std::sort(opens.begin(), opens.end());
  opens.erase(std::unique(opens.begin(), opens.end()), opens.end());
  return Topology{opens};
}

void check_forget_shape(const VObject& b, const BaseChange& bc) {
  if (bc.g.kind != BaseFunctor::Kind::Forget)
    throw InputError("lifts are defined along a forgetful base change");
  if (b.carrier.topology) throw InputError("lifts start from a plain structure");
  if (b.fam.itest.size() != bc.source->site->cat.objects.size())
    throw InputError("lift: structure does not match the site");
}

VObject lift_with_topology(const VObject& b, Topology top) {
  VObject out = b;
  out.carrier.topology = std::move(top);
  return out;
}

}  // namespace

VObject initial_lift(const VObject& b, const std::vector<LiftSink>& sinks, const BaseChange& bc) {
  check_forget_shape(b, bc);
  const auto& top_site = *bc.source->site;
  std::vector<Bits> subbasis;
  for (std::size_t t = 0; t < b.fam.otest.size(); ++t) {
    const Carrier& ct = top_site.carrier_of(static_cast<int>(t));
    for (const auto& o : b.fam.otest[t])
      for (Bits open : ct.topology->opens) subbasis.push_back(preimage(o, open));
  }
  for (const auto& sink : sinks) {
    if (!sink.target.carrier.topology)
      throw InputError("initial_lift: sink target is not topological");
    if (sink.leg.size() != static_cast<std::size_t>(b.carrier.size))
      throw InputError("initial_lift: sink leg does not leave the lifted carrier");
    for (Bits open : sink.target.carrier.topology->opens)
      subbasis.push_back(preimage(sink.leg, open));
  }
  return lift_with_topology(b, topology_generated_by(b.carrier.size, subbasis));
}

VObject coarsest_lift(const VObject& b, const BaseChange& bc) {
  return initial_lift(b, {}, bc);
}

VObject finest_lift(const VObject& b, const BaseChange& bc) {
  check_forget_shape(b, bc);
  const auto& top_site = *bc.source->site;
  // Final topology of the input tests: open exactly when every preimage is.
  int subset_count = 1 << b.carrier.size;
  std::vector<Bits> opens;
  for (int s = 0; s < subset_count; ++s) {
    Bits set = static_cast<Bits>(s);
    bool open = true;
    for (std::size_t t = 0; t < b.fam.itest.size() && open; ++t) {
      const Carrier& ct = top_site.carrier_of(static_cast<int>(t));
      for (const auto& i : b.fam.itest[t])
        if (!ct.topology->contains(preimage(i, set))) {
          open = false;
          break;
        }
    }
    if (open) opens.push_back(set);
  }
  return lift_with_topology(b, Topology{opens});
}

}  // namespace smoothcat
