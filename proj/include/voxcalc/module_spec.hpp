#pragma once

#include <memory>
#include <string>

#include "voxcalc/zhu.hpp"

namespace voxcalc {

/// Lowest-weight basis element of positive weight; its class generates A(V)
/// for the shipped backends ([alpha] for Heisenberg, [omega] for Virasoro).
GradedVector zhu_generator(const VertexAlgebra& V);

/// A(V)-module from a short spec:
///   scalar:λ=<q>        1-dim, generator acts by q
///   jordan2:λ=<q>       2-dim, generator acts by [[q, 1], [0, q]]
///   diag:λ=<q>,<q>,...  generator acts diagonally
///   zero                the zero module
///   file:<path>         JSON {"dimension": n, "images": {"<A(V) label>": [[...], ...]}}
/// "lambda=" may replace "λ=". Entries are integers or "p/q" strings.
AVModule module_from_spec(std::shared_ptr<const VertexAlgebra> V, const std::string& spec, long zhu_cutoff = 2);

/// The same module as JSON, keyed by the labels of the A(V) basis.
std::string module_to_json(const AVModule& M);

}  // namespace voxcalc
