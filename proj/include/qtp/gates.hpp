#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace qtp {

// Canonical gate vocabulary. The enumerator value doubles as the one-hot
// slot in the node feature vector; slot kInputSlot is reserved for the
// qubit-input nodes of a circuit DAG.
enum class GateKind : std::uint8_t {
  id, x, y, z, h, s, sdg, t, tdg, sx, sxdg,
  rx, ry, rz, p, u1, u2, u3, u,
  cx, cy, cz, ch, cp, crx, cry, crz, cu, swap,
  ccx, cswap,
  rxx, ryy, rzz, ecr,
};

inline constexpr int kNumGateKinds = 35;
inline constexpr int kInputSlot = kNumGateKinds;

struct GateInfo {
  GateKind kind;
  std::string_view name;
  int arity;
  int param_count;
};

inline constexpr std::array<GateInfo, kNumGateKinds> kGateTable{{
    {GateKind::id, "id", 1, 0},     {GateKind::x, "x", 1, 0},
    {GateKind::y, "y", 1, 0},       {GateKind::z, "z", 1, 0},
    {GateKind::h, "h", 1, 0},       {GateKind::s, "s", 1, 0},
    {GateKind::sdg, "sdg", 1, 0},   {GateKind::t, "t", 1, 0},
    {GateKind::tdg, "tdg", 1, 0},   {GateKind::sx, "sx", 1, 0},
    {GateKind::sxdg, "sxdg", 1, 0}, {GateKind::rx, "rx", 1, 1},
    {GateKind::ry, "ry", 1, 1},     {GateKind::rz, "rz", 1, 1},
    {GateKind::p, "p", 1, 1},       {GateKind::u1, "u1", 1, 1},
    {GateKind::u2, "u2", 1, 2},     {GateKind::u3, "u3", 1, 3},
    {GateKind::u, "u", 1, 3},       {GateKind::cx, "cx", 2, 0},
    {GateKind::cy, "cy", 2, 0},     {GateKind::cz, "cz", 2, 0},
    {GateKind::ch, "ch", 2, 0},     {GateKind::cp, "cp", 2, 1},
    {GateKind::crx, "crx", 2, 1},   {GateKind::cry, "cry", 2, 1},
    {GateKind::crz, "crz", 2, 1},   {GateKind::cu, "cu", 2, 3},
    {GateKind::swap, "swap", 2, 0}, {GateKind::ccx, "ccx", 3, 0},
    {GateKind::cswap, "cswap", 3, 0}, {GateKind::rxx, "rxx", 2, 1},
    {GateKind::ryy, "ryy", 2, 1},   {GateKind::rzz, "rzz", 2, 1},
    {GateKind::ecr, "ecr", 2, 0},
}};

constexpr const GateInfo& gate_info(GateKind k) {
  return kGateTable[static_cast<std::size_t>(k)];
}
constexpr std::string_view gate_name(GateKind k) { return gate_info(k).name; }
constexpr int gate_arity(GateKind k) { return gate_info(k).arity; }
constexpr int gate_param_count(GateKind k) { return gate_info(k).param_count; }
constexpr int type_slot(GateKind k) { return static_cast<int>(k); }

/// Looks up a vocabulary name. Also accepts the qelib1 aliases cu1 and cu3.
std::optional<GateKind> gate_from_name(std::string_view name);

}  // namespace qtp
