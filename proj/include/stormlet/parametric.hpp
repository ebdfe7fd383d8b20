#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "stormlet/model.hpp"
#include "stormlet/property.hpp"
#include "stormlet/rational_function.hpp"

namespace stormlet {

struct Interval {
  Rational lower;
  Rational upper;
};

/// Closed box of parameter values.
using Region = std::map<std::string, Interval>;

/// "p=1/2,q=0.3".
ParameterPoint parse_point(std::string_view text);

/// "0.3<=p<=0.6,1/4<=q<=1/2".
Region parse_region(std::string_view text);

/// Parameter names occurring in the transition functions, sorted.
std::vector<std::string> model_parameters(const Model<RationalFunction>& model);

/// Value of an unbounded reachability or expected-reward query at the first
/// initial state as a function of the parameters, by state elimination.
/// The graph is taken as given: an edge is present if its function is not
/// identically zero.
RationalFunction solution_function(const Model<RationalFunction>& model, const Property& property);

/// Concrete chain at a parameter point. Every transition must evaluate to a
/// probability (a rate for CTMCs), rows must stay distributions, and no
/// denominator may vanish; entries evaluating to zero are dropped.
Model<Rational> instantiate(const Model<RationalFunction>& model, const ParameterPoint& point);

/// Sound bounds of a probability query over a whole region. Each state's
/// distribution is multi-affine in the parameters, so its values over the
/// region are the convex hull of its corner instantiations; the MDP with
/// one choice per corner is solved exactly for min and max.
Interval region_lifting(const Model<RationalFunction>& model, const Property& property, const Region& region);

}  // namespace stormlet
