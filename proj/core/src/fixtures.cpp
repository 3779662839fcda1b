#include "smoothcat/fixtures.hpp"

#include <map>

namespace smoothcat {
namespace fixtures {

namespace {

/// Builds a site whose composition table is induced by the carrier maps;
/// faithfulness makes the table unique.
Site concrete_site(std::string name, UnderlyingKind kind,
                   std::vector<std::pair<std::string, Carrier>> objects,
                   std::vector<std::tuple<std::string, std::string, std::string, Assignment>> mors,
                   std::map<std::string, std::string> identities) {
  Site s;
  s.name = std::move(name);
  s.kind = kind;
  for (auto& [id, carrier] : objects) {
    s.cat.objects.push_back(id);
    s.u.on_objects.push_back(carrier);
  }
  auto obj_index = [&](const std::string& id) {
    for (std::size_t i = 0; i < s.cat.objects.size(); ++i)
      if (s.cat.objects[i] == id) return static_cast<int>(i);
    throw InputError("fixture: unknown object " + id);
  };
  for (auto& [id, src, dst, map] : mors) {
    s.cat.morphisms.push_back({id, obj_index(src), obj_index(dst)});
    s.u.on_morphisms.push_back(map);
  }
  auto mor_index = [&](const std::string& id) {
    for (std::size_t i = 0; i < s.cat.morphisms.size(); ++i)
      if (s.cat.morphisms[i].id == id) return static_cast<int>(i);
    throw InputError("fixture: unknown morphism " + id);
  };
  s.cat.identities.resize(s.cat.objects.size());
  for (auto& [obj, mor] : identities) s.cat.identities[obj_index(obj)] = mor_index(mor);

  auto n = s.cat.morphisms.size();
  s.cat.compose_table.assign(n, std::vector<int>(n, -1));
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t f = 0; f < n; ++f) {
      if (s.cat.morphisms[f].dst != s.cat.morphisms[g].src) continue;
      Assignment comp = compose(s.u.on_morphisms[g], s.u.on_morphisms[f]);
      int found = -1;
      for (std::size_t m = 0; m < n; ++m)
        if (s.cat.morphisms[m].src == s.cat.morphisms[f].src &&
            s.cat.morphisms[m].dst == s.cat.morphisms[g].dst && s.u.on_morphisms[m] == comp) {
          found = static_cast<int>(m);
          break;
        }
      if (found < 0)
        throw InputError("fixture: composite of " + s.cat.morphisms[g].id + " and " +
                         s.cat.morphisms[f].id + " is not among the declared morphisms");
      s.cat.compose_table[g][f] = found;
    }
  s.finalize();
  return s;
}

Site f1_base() {
  return concrete_site(
      "f1", UnderlyingKind::FinSet,
      {{"p", finset_carrier(1)}, {"e", finset_carrier(2)}},
      {
          {"id_p", "p", "p", {0}},
          {"c0", "p", "e", {0}},
          {"c1", "p", "e", {1}},
          {"bang", "e", "p", {0, 0}},
          {"id_e", "e", "e", {0, 1}},
          {"k0", "e", "e", {0, 0}},
          {"k1", "e", "e", {1, 1}},
      },
      {{"p", "id_p"}, {"e", "id_e"}});
}

Topology sierpinski() { return Topology{{0b00, 0b10, 0b11}}; }
Topology point_topology() { return Topology{{0b0, 0b1}}; }

Site f3_base() {
  return concrete_site(
      "f3", UnderlyingKind::FinTop,
      {{"q", fintop_carrier(1, point_topology())}, {"r", fintop_carrier(2, sierpinski())}},
      {
          {"id_q", "q", "q", {0}},
          {"q0", "q", "r", {0}},
          {"q1", "q", "r", {1}},
          {"bang_r", "r", "q", {0, 0}},
          {"id_r", "r", "r", {0, 1}},
          {"k0_r", "r", "r", {0, 0}},
          {"k1_r", "r", "r", {1, 1}},
      },
      {{"q", "id_q"}, {"r", "id_r"}});
}

}  // namespace

SitePtr f1_site() {
  static SitePtr site = std::make_shared<const Site>(f1_base());
  return site;
}

SitePtr f1_site_with_coverages() {
  static SitePtr site = [] {
    Site s = f1_base();
    s.name = "f1cov";
    Coverage points;
    points.families[s.cat.object_index("e")] = {
        {s.cat.morphism_index("c0"), s.cat.morphism_index("c1")}};
    points.families[s.cat.object_index("p")] = {{s.cat.morphism_index("id_p")}};
    s.coverages["points"] = points;
    Coverage triv;
    triv.families[s.cat.object_index("e")] = {{s.cat.morphism_index("id_e")}};
    triv.families[s.cat.object_index("p")] = {{s.cat.morphism_index("id_p")}};
    s.coverages["triv"] = triv;
    s.finalize();
    return std::make_shared<const Site>(std::move(s));
  }();
  return site;
}

SitePtr f3_site() {
  static SitePtr site = [] {
    Site s = f3_base();
    DetFamilyList proj;
    proj.output_families[s.cat.object_index("r")] = {{s.cat.morphism_index("id_r")}};
    proj.output_families[s.cat.object_index("q")] = {{s.cat.morphism_index("id_q")}};
    s.det_lists["proj"] = proj;
    s.finalize();
    return std::make_shared<const Site>(std::move(s));
  }();
  return site;
}

SitePtr e_only_site() {
  static SitePtr site = std::make_shared<const Site>(concrete_site(
      "e_only", UnderlyingKind::FinSet, {{"e", finset_carrier(2)}},
      {
          {"id_e", "e", "e", {0, 1}},
          {"k0", "e", "e", {0, 0}},
          {"k1", "e", "e", {1, 1}},
      },
      {{"e", "id_e"}}));
  return site;
}

SitePtr r_only_site() {
  static SitePtr site = std::make_shared<const Site>(concrete_site(
      "r_only", UnderlyingKind::FinTop, {{"r", fintop_carrier(2, sierpinski())}},
      {
          {"id_r", "r", "r", {0, 1}},
          {"k0_r", "r", "r", {0, 0}},
          {"k1_r", "r", "r", {1, 1}},
      },
      {{"r", "id_r"}}));
  return site;
}

ConfigPtr f1(Caps caps) {
  return make_config(f1_site(), parse_forcing("saturation; saturation"), caps);
}

ConfigPtr f2(Caps caps) {
  return make_config(f1_site(), parse_forcing("terminal; empty"), caps);
}

ConfigPtr f3(Caps caps) {
  return make_config(f3_site(), parse_forcing("saturation; union(sheaf, terminal)"), caps);
}

}  // namespace fixtures
}  // namespace smoothcat
