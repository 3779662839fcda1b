#pragma once

#include "smoothcat/spaces.hpp"

namespace smoothcat {
namespace fixtures {

/// The asymmetric pair site: a point object p and a pair object e over
/// finite sets. hom(e,e) carries the identity and both constants but not the
/// swap, so the realised test maps are a proper subset of all maps.
SitePtr f1_site();
/// f1_site with coverage "points" (e covered by its two points) and "triv"
/// (identity coverings only) declared.
SitePtr f1_site_with_coverages();

/// A point object q and the two-point object r carrying the order topology,
/// over finite topological spaces. hom(r,r) is the three continuous
/// endomaps; "proj" names identity detecting families for the output side.
SitePtr f3_site();

/// Single-object cut-downs used by presets.
SitePtr e_only_site();  // just e from f1_site
SitePtr r_only_site();  // just r from f3_site

ConfigPtr f1(Caps caps = {});  // (saturation; saturation)
ConfigPtr f2(Caps caps = {});  // (terminal; empty)
ConfigPtr f3(Caps caps = {});  // (saturation; union(sheaf, terminal))

}  // namespace fixtures
}  // namespace smoothcat
