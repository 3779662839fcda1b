#include <doctest.h>

#include <algorithm>

#include "smoothcat/fincat.hpp"
#include "smoothcat/fixtures.hpp"
#include "smoothcat/spaces.hpp"

using namespace smoothcat;

namespace {

FinCategory one_object_category() {
  FinCategory c;
  c.objects = {"a"};
  c.morphisms = {{"id_a", 0, 0}};
  c.identities = {0};
  c.compose_table = {{0}};
  c.finalize();
  return c;
}

bool has_code(const std::vector<Violation>& report, const std::string& code) {
  return std::any_of(report.begin(), report.end(),
                     [&](const Violation& v) { return v.code == code; });
}

}  // namespace

TEST_CASE("validate_category accepts the one-object category") {
  CHECK(validate_category(one_object_category()).empty());
}

TEST_CASE("validate_category accepts the asymmetric pair site") {
  CHECK(validate_category(fixtures::f1_site()->cat).empty());
}

TEST_CASE("validate_category reports a rebound composite") {
  FinCategory cat = fixtures::f1_site()->cat;
  int k0 = cat.morphism_index("k0");
  int k1 = cat.morphism_index("k1");
  int id_e = cat.morphism_index("id_e");
  cat.compose_table[k0][k1] = id_e;
  auto report = validate_category(cat);
  REQUIRE(!report.empty());
  CHECK((has_code(report, "associativity") || has_code(report, "identity-law")));
}

TEST_CASE("continuous_maps on the two-point order topology") {
  Carrier s = fintop_carrier(2, Topology{{0b00, 0b10, 0b11}});
  auto endos = continuous_maps(s, s);
  REQUIRE(endos.size() == 3);
  CHECK(family_contains(endos, Assignment{0, 0}));
  CHECK(family_contains(endos, Assignment{0, 1}));
  CHECK(family_contains(endos, Assignment{1, 1}));
}

TEST_CASE("continuous_maps to a one-point space is a singleton") {
  Carrier s = fintop_carrier(2, Topology{{0b00, 0b10, 0b11}});
  Carrier pt = fintop_carrier(1, Topology{{0b0, 0b1}});
  CHECK(continuous_maps(s, pt).size() == 1);
}

TEST_CASE("continuous_maps from a discrete domain is everything") {
  Carrier d = fintop_carrier(2, discrete_topology(2));
  for (auto& t : all_topologies(2)) {
    Carrier c = fintop_carrier(2, t);
    CHECK(continuous_maps(d, c).size() == 4);
  }
}

TEST_CASE("continuity is closed under composition on fixture carriers") {
  auto tops = all_topologies(2);
  for (auto& ta : tops)
    for (auto& tb : tops)
      for (auto& tc : tops) {
        Carrier a = fintop_carrier(2, ta), b = fintop_carrier(2, tb), c = fintop_carrier(2, tc);
        for (auto& f : continuous_maps(a, b))
          for (auto& g : continuous_maps(b, c))
            CHECK(is_underlying_morphism(compose(g, f), a, c));
      }
}

TEST_CASE("there are four topologies on a two-point carrier") {
  CHECK(all_topologies(2).size() == 4);
}

TEST_CASE("there are 29 topologies on a three-point carrier") {
  CHECK(all_topologies(3).size() == 29);
}

TEST_CASE("check_faithful_functor accepts the fixture functors") {
  CHECK(check_faithful_functor(fixtures::f1_site()->u, fixtures::f1_site()->cat,
                               UnderlyingKind::FinSet)
            .empty());
  CHECK(check_faithful_functor(fixtures::f3_site()->u, fixtures::f3_site()->cat,
                               UnderlyingKind::FinTop)
            .empty());
}

TEST_CASE("check_faithful_functor accepts a single-morphism category") {
  FinCategory cat = one_object_category();
  ConcreteFunctor u;
  u.on_objects = {finset_carrier(1)};
  u.on_morphisms = {identity_assignment(1)};
  CHECK(check_faithful_functor(u, cat, UnderlyingKind::FinSet).empty());
}

TEST_CASE("collapsing the two constants breaks faithfulness at hom(p,e)") {
  auto site = fixtures::f1_site();
  ConcreteFunctor u = site->u;
  u.on_morphisms[site->cat.morphism_index("c1")] = u.on_morphisms[site->cat.morphism_index("c0")];
  auto report = check_faithful_functor(u, site->cat, UnderlyingKind::FinSet);
  bool found = false;
  for (const auto& v : report)
    if (v.code == "faithfulness" && v.detail.find("hom(p,e)") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("faithful functors induce injective hom maps on all pairs") {
  for (const auto& site : {fixtures::f1_site(), fixtures::f3_site()}) {
    auto n = site->cat.objects.size();
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t d = 0; d < n; ++d) {
        const auto& hs = site->cat.hom_set(static_cast<int>(s), static_cast<int>(d));
        for (std::size_t i = 0; i < hs.size(); ++i)
          for (std::size_t j = i + 1; j < hs.size(); ++j)
            CHECK(site->map_of(hs[i]) != site->map_of(hs[j]));
      }
  }
}

TEST_CASE("site validation caps oversized carriers") {
  Site s = *fixtures::f1_site();
  Caps caps;
  caps.max_carrier = 1;
  auto report = s.validate(caps);
  CHECK(has_code(report, "cap"));
}

TEST_CASE("the terminal object of the pair site is the point") {
  auto site = fixtures::f1_site();
  auto t = site->cat.terminal_object();
  REQUIRE(t.has_value());
  CHECK(site->cat.objects[*t] == "p");
}
