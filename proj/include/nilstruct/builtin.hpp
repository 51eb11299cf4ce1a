#pragma once

#include <string>
#include <vector>

#include "nilstruct/manifold.hpp"

namespace nilstruct {

// Built-in example manifolds:
//   flat-B        n=1, pair metric [[0,1],[1,0]]
//   curved-B      n=1, metric [[z1^2+1, 1],[1, 0]]
//   lifted-curved n=2, complete lift of the curved base diag(1, z1^2+1);
//                 carries the base chart
//   kahler-4      n=2, curved hybrid metric from the antisymmetry
//                 constraint family
// All use the adapted structure and coordinates z1..z{2n+m}.
std::vector<std::string> builtin_names();

ChartManifold builtin_manifold(const std::string& name);

}  // namespace nilstruct
