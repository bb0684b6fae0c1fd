// SPDX-License-Identifier: Apache-2.0
#include <sstream>

#include "svabench/errors.hpp"
#include "svabench/pipeline.hpp"

namespace svabench {

const std::string_view kDefaultTaskDescription =
    "Each Verilog program below is followed by SystemVerilog assertions that hold on it. "
    "Write assertions for the test program in the same form: one `assert property` statement per line, "
    "clocked on the design clock, using only signal == constant comparisons joined by && and ## delays.";

const std::string_view kCorrectionInstruction =
    "The SystemVerilog assertion below is rejected by the parser. "
    "Reply with the corrected assertion only, keeping its meaning unchanged.";

std::string Prompt::render() const {
  std::ostringstream out;
  out << task_description << "\n\n";
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    out << "Program " << i + 1 << ":\n" << ex.design_text << "\n\n";
    out << "Assertions " << i + 1 << ":\n";
    for (const auto& a : ex.assertions) out << a << "\n";
    out << "\n";
  }
  out << "Test Program:\n" << test_program << "\n";
  return out.str();
}

Prompt build_prompt(std::string task_description, std::vector<IceTuple> ices, std::string test_design,
                    bool allow_zero_shot) {
  if (ices.empty() && !allow_zero_shot) {
    throw EmptyExampleSet("no in-context examples and zero-shot prompting is disabled");
  }
  return {std::move(task_description), std::move(ices), std::move(test_design)};
}

}  // namespace svabench
