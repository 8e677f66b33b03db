#pragma once

#include <string>
#include <vector>

#include "fairspace/envyfree_convex.hpp"
#include "fairspace/json_io.hpp"
#include "fairspace/kkm_solver.hpp"
#include "fairspace/proportional.hpp"

namespace fairspace {

Json table_to_json(const ValueTable& V);
ValueTable table_from_json(const Json& j);

/// certificate envelopes; "kind" selects the claim set the verifier re-checks
Json envy_certificate_to_json(const EnvyCertificate& cert);
Json levi_certificate_to_json(const EnvyCertificate& cert, const Vec& alphas);
Json simultaneous_certificate_to_json(const SimultaneousResult& res, bool secretive,
                                      double mass_tol);
Json allocation_certificate_to_json(const GroupAllocationResult& res, int n, double mass_tol);
Json recursion_node_to_json(const RecursionNode& node);
Json proportional_certificate_to_json(const ProportionalResult& res);

struct VerifyInputs {
  std::vector<Measure> measures;  // flat list (envy / secretive / levi kinds)
  bool has_base = false;
  Measure base;  // simultaneous / group-allocation / proportional kinds
  std::vector<std::vector<Measure>> groups;
};

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> violations;
};

/// recompute every quantitative claim of the certificate from the partition
/// and the measures alone, with no solver state; arity mismatches throw,
/// violated inequalities are collected
VerifyReport verify_certificate(const PartitionFile& pf, const Json& cert,
                                const VerifyInputs& in);

}  // namespace fairspace
