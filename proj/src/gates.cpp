#include "qtp/gates.hpp"

namespace qtp {

static_assert(kGateTable.size() == 35);
static_assert([] {
  for (std::size_t i = 0; i < kGateTable.size(); ++i) {
    if (static_cast<std::size_t>(kGateTable[i].kind) != i) return false;
  }
  return true;
}());

std::optional<GateKind> gate_from_name(std::string_view name) {
  for (const auto& info : kGateTable) {
    if (info.name == name) return info.kind;
  }
  if (name == "cu1") return GateKind::cp;
  if (name == "cu3") return GateKind::cu;
  return std::nullopt;
}

}  // namespace qtp
