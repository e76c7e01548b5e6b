#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qtp/circuit.hpp"

namespace qtp {

struct ParseResult {
  Circuit circuit;
  std::vector<std::string> warnings;
};

/// Parses the OpenQASM 2.0 subset: qreg/creg declarations, qelib1 gates from
/// the vocabulary (with register broadcast), barrier and measure. Registers
/// are flattened in declaration order. Barriers are dropped; each measure is
/// dropped with a warning. Throws ParseError on any error.
ParseResult parse_qasm(std::string_view text, std::string name = "circuit");

ParseResult read_qasm_file(const std::filesystem::path& path);

/// One statement per line over a single register `q`; angles use 17
/// significant digits so parse_qasm restores them exactly.
std::string serialize_qasm(const Circuit& c);

void write_qasm_file(const std::filesystem::path& path, const Circuit& c);

}  // namespace qtp
