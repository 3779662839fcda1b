#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "smoothcat/spaces.hpp"

namespace smoothcat {

/// Functor between the two underlying categories, acting on carriers and on
/// the assignments beneath maps. The canonical three leave assignments alone
/// and only add or drop topology; custom functors supply hooks and must pass
/// the same validity checks.
struct BaseFunctor {
  enum class Kind { Identity, Forget, Discrete, Indiscrete, Custom };
  Kind kind = Kind::Identity;
  std::string name = "identity";
  std::function<Carrier(const Carrier&)> obj_fn;
  std::function<Assignment(const Assignment&)> mor_fn;

  Carrier map_carrier(const Carrier& c) const;
  Assignment map_assignment(const Assignment& f) const;

  static BaseFunctor identity();
  static BaseFunctor forget();
  static BaseFunctor discrete();
  static BaseFunctor indiscrete();
  static BaseFunctor custom(std::string name, std::function<Carrier(const Carrier&)> obj,
                            std::function<Assignment(const Assignment&)> mor);
};

/// A validated change of underlying category: the functor, the configuration
/// it leaves and the one it lands in, sharing one test category. The
/// intertwining requirement is that mapping the source site's carriers and
/// assignments reproduces the target site's.
struct BaseChange {
  ConfigPtr source;
  ConfigPtr target;
  BaseFunctor g;

  Carrier map_carrier(const Carrier& c) const { return g.map_carrier(c); }
  Assignment map_assignment(const Assignment& f) const { return g.map_assignment(f); }
};

/// Builds and validates a base change; throws InputError when the functor
/// fails to intertwine the two sites or breaks functoriality on test data.
BaseChange make_base_change(ConfigPtr source, ConfigPtr target, BaseFunctor g);

/// Target site induced from a source site by the canonical functors.
Site site_forget(const Site& s);
Site site_discrete(const Site& s);
Site site_indiscrete(const Site& s);

/// Image of a structure under the base functor: mapped carrier, mapped
/// families. Re-validated in the target configuration.
VObject map_vobject(const BaseChange& bc, const VObject& x);

/// Re-reads the target configuration's forcing condition on the source side:
/// a map is forced exactly when its image is. Requires the functor to be
/// injective on underlying maps in and out of the test image; refuses
/// otherwise (compose through map_vobject and the forcing functors instead).
ForcingSpec transfer_forcing(const BaseChange& bc);

/// Re-reads a topological-side forcing condition on the plain side through
/// the finest/coarsest lifts. bc must be a forget-style change whose lifts
/// fix the embedded test objects.
ForcingSpec transfer_forcing_lifts(const BaseChange& bc);

/// A structured sink for the initial lift: a topological structure together
/// with the underlying map of a morphism into its image.
struct LiftSink {
  VObject target;      // structure over the topological side
  Assignment leg;      // underlying map, source carrier -> target carrier
};

/// Unique topological lift of a plain structure along a family of sinks: the
/// coarsest topology making all output tests and all sink legs continuous.
VObject initial_lift(const VObject& b, const std::vector<LiftSink>& sinks, const BaseChange& bc);

/// Left and right adjoint sections of the forgetful map on structures: the
/// final topology of the input tests, and the initial topology of the output
/// tests.
VObject finest_lift(const VObject& b, const BaseChange& bc);
VObject coarsest_lift(const VObject& b, const BaseChange& bc);

}  // namespace smoothcat
