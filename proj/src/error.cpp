#include "kpartite/error.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace kpartite {

HomogeneityViolation::HomogeneityViolation(std::size_t row_cluster, std::size_t col_cluster,
                                           double spread)
    : AssumptionViolation(fmt::format(
          "homogeneity violated in block ({},{}): row sums spread {:.6g}", row_cluster + 1,
          col_cluster + 1, spread)),
      row_cluster_(row_cluster),
      col_cluster_(col_cluster),
      spread_(spread) {}

namespace {
std::string describe_failures(const std::vector<std::vector<std::size_t>>& failures) {
  std::string out = "no hub cluster satisfies close friendship:";
  for (std::size_t hub = 0; hub < failures.size(); ++hub)
    out += fmt::format(" hub {} fails clusters [{}];", hub, fmt::join(failures[hub], ","));
  return out;
}
}  // namespace

Assumption3Violation::Assumption3Violation(std::vector<std::vector<std::size_t>> failures)
    : AssumptionViolation(describe_failures(failures)), failures_(std::move(failures)) {}

ZeroPivot::ZeroPivot(std::size_t stage)
    : SynthesisError(fmt::format("zero pivot at stage {}", stage)), stage_(stage) {}

IntermediateBlockNotPD::IntermediateBlockNotPD(std::size_t stage)
    : SynthesisError(fmt::format("Schur block at stage {} is not positive definite", stage)),
      stage_(stage) {}

SynthesisFailed::SynthesisFailed(int doublings, std::string failing_check)
    : SynthesisError(fmt::format("synthesis failed after {} margin doublings: {}", doublings,
                                 failing_check)),
      doublings_(doublings),
      check_(std::move(failing_check)) {}

}  // namespace kpartite
