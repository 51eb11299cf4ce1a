#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "nilstruct/manifold.hpp"

namespace nilstruct::verify {

using json = nlohmann::json;

// One named certificate run: the pass flag plus a JSON body of residuals.
struct Outcome {
  bool passed = false;
  json body;
};

json to_json(const ResidualReport& r);

// The individual certificates. Charts default to the relevant builtins
// when the list is empty; checks that need a class of metric (pure /
// hybrid) filter what they are given.
Outcome lemma1(std::vector<ChartManifold> charts, const Sampling& s);
Outcome lemma2(std::vector<ChartManifold> charts, const Sampling& s);
Outcome assertion1(std::vector<ChartManifold> charts, const Sampling& s);
Outcome theorem1(std::vector<ChartManifold> charts, const Sampling& s);
Outcome theorem2(std::vector<ChartManifold> charts, const Sampling& s);
Outcome theorem3(const Sampling& s);
Outcome theorem4(std::vector<ChartManifold> charts, const Sampling& s);
Outcome theorem5(std::vector<ChartManifold> charts, const Sampling& s,
                 const std::string& h_override = "");
Outcome theorem6(std::vector<ChartManifold> charts, const Sampling& s);
Outcome theorem7(std::vector<ChartManifold> charts, const Sampling& s);
Outcome corollary_g(std::vector<ChartManifold> charts, const Sampling& s);
Outcome assertion2(std::vector<ChartManifold> charts, const Sampling& s);
Outcome assertion3(std::vector<ChartManifold> charts, const Sampling& s);
Outcome assertion4(std::vector<ChartManifold> charts, const Sampling& s);
Outcome assertion5(const Sampling& s);

// Every certificate in a fixed order; `charts` empty means builtins.
Outcome all(std::vector<ChartManifold> charts, const Sampling& s);

// Names accepted by the CLI verify subcommand.
std::vector<std::string> check_names();

Outcome dispatch(const std::string& name, std::vector<ChartManifold> charts,
                 const Sampling& s, const std::string& h_override = "");

}  // namespace nilstruct::verify
