#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "mms/bvp.hpp"
#include "mms/builders.hpp"
#include "mms/capacity.hpp"
#include "mms/gamma.hpp"
#include "mms/optimizer.hpp"
#include "mms/space.hpp"
#include "mms/spectrum.hpp"

namespace mms {

using json = nlohmann::json;

/// Extended reals: +/-infinity serialise as the strings "inf" / "-inf".
json real_to_json(double x);
double real_from_json(const json& j);

/// Space schema: {"n", "measure", "rows": [{"idx","coef","weight","loc"}...],
/// optional "coords", "labels", "admissible", "grid"}.
json space_to_json(const DiscreteSpace& space);
DiscreteSpace space_from_json(const json& j);

json axiom_report_to_json(const AxiomReport& report);
json spectrum_to_json(const SpectrumResult& result);
json opt_result_to_json(const OptResult& result);
json convergence_report_to_json(const ConvergenceReport& report);
json comparison_report_to_json(const ComparisonReport& report);
json capacity_to_json(const CapacityResult& result);
json phi_to_json(const PhiFunctional& phi);
PhiFunctional phi_from_json(const json& j);
json builder_spec_to_json(const BuilderSpec& spec);
BuilderSpec builder_spec_from_json(const json& j);

/// Symmetric coordinate MatrixMarket dump of the form matrix (lower triangle).
void write_matrix_market(std::ostream& os, const SpMat& m);

/// CSV with one row per point: index, coordinates, then the named fields.
void write_field_csv(std::ostream& os, const DiscreteSpace& space,
                     const std::vector<std::pair<std::string, Vec>>& fields);

}  // namespace mms
